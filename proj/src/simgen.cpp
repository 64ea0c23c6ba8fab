#include "opinionrank/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace opinionrank {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::vector<ClassId> uniform_truth(std::size_t n, std::size_t classes, Rng& rng) {
    std::uniform_int_distribution<ClassId> pick(0, static_cast<ClassId>(classes) - 1);
    std::vector<ClassId> truth(n);
    for (auto& t : truth) t = pick(rng);
    return truth;
}

void require_dims(std::size_t instances, std::size_t sources) {
    if (instances < 1 || sources < 1) throw std::invalid_argument("need at least one instance and one source");
}

Dataset generate_whitehill(const WhitehillParams& params, Rng& rng) {
    const std::size_t s = params.alpha.size();
    const std::size_t n = params.beta.size();
    require_dims(n, s);
    for (double b : params.beta) {
        if (!(b >= 0.0)) throw std::invalid_argument("inverse difficulty beta must be non-negative");
    }

    auto truth = uniform_truth(n, 2, rng);
    std::vector<ClassId> cells(s * n);
    for (std::size_t j = 0; j < s; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            // alpha * inf is NaN only for a pure guesser on a trivial instance.
            const double logodds = params.alpha[j] == 0.0 ? 0.0 : params.alpha[j] * params.beta[i];
            const bool correct = uniform01(rng) < sigmoid(logodds);
            cells[j * n + i] = correct ? truth[i] : 1 - truth[i];
        }
    }
    return Dataset{OpinionMatrix(s, n, 2, std::move(cells)), std::move(truth)};
}

}  // namespace

std::size_t default_bad_labelers(std::size_t sources) {
    return static_cast<std::size_t>(std::lround(static_cast<double>(sources) / 26.0));
}

WhitehillParams sample_whitehill_params(WhitehillVariant variant, std::size_t instances, std::size_t sources,
                                        std::size_t n_bad, Rng& rng) {
    require_dims(instances, sources);
    WhitehillParams p;
    p.variant = variant;
    p.alpha.resize(sources);
    p.beta.resize(instances);
    switch (variant) {
        case WhitehillVariant::model: {
            std::normal_distribution<double> alpha(1.0, 1.0);
            std::lognormal_distribution<double> beta(1.0, 1.0);
            for (auto& a : p.alpha) a = alpha(rng);
            for (auto& b : p.beta) b = beta(rng);
            break;
        }
        case WhitehillVariant::stability: {
            std::uniform_real_distribution<double> alpha(0.0, 4.0);
            std::uniform_real_distribution<double> log_beta(0.0, 3.0);
            for (auto& a : p.alpha) a = alpha(rng);
            for (auto& b : p.beta) b = std::exp(log_beta(rng));
            break;
        }
        case WhitehillVariant::difficulty: {
            if (instances % 2 != 0) throw std::invalid_argument("difficulty experiment needs an even instance count");
            if (n_bad > sources) {
                throw std::invalid_argument("bad labeler count " + std::to_string(n_bad) + " exceeds " +
                                            std::to_string(sources) + " labelers");
            }
            p.n_bad = n_bad;
            // Hard instances have beta = 1, so sigmoid(alpha) is the accuracy on them.
            for (std::size_t j = 0; j < sources; ++j) {
                p.alpha[j] = logit(j < n_bad ? kBadLabelerAccuracy : kGoodLabelerAccuracy);
            }
            for (std::size_t i = 0; i < instances; ++i) {
                p.beta[i] = i < instances / 2 ? std::numeric_limits<double>::infinity() : 1.0;
            }
            break;
        }
    }
    return p;
}

Dataset gen_whitehill(const WhitehillParams& params, std::uint64_t seed) {
    Rng rng(seed);
    return generate_whitehill(params, rng);
}

Dataset gen_whitehill_model(std::size_t instances, std::size_t sources, std::uint64_t seed) {
    Rng rng(seed);
    const auto params = sample_whitehill_params(WhitehillVariant::model, instances, sources, 0, rng);
    return generate_whitehill(params, rng);
}

Dataset gen_whitehill_difficulty(std::size_t instances, std::size_t sources, std::optional<std::size_t> n_bad,
                                 std::uint64_t seed) {
    Rng rng(seed);
    const auto params = sample_whitehill_params(WhitehillVariant::difficulty, instances, sources,
                                                n_bad.value_or(default_bad_labelers(sources)), rng);
    return generate_whitehill(params, rng);
}

Dataset gen_whitehill_stability(std::size_t instances, std::size_t sources, std::uint64_t seed) {
    Rng rng(seed);
    const auto params = sample_whitehill_params(WhitehillVariant::stability, instances, sources, 0, rng);
    return generate_whitehill(params, rng);
}

double welinder_sigma_mean(const WelinderParams& params) {
    return params.sigma_convention == GammaConvention::shape_scale ? params.sigma_shape * params.sigma_second
                                                                   : params.sigma_shape / params.sigma_second;
}

WelinderAnnotators sample_welinder_annotators(std::size_t sources, const WelinderParams& params, Rng& rng) {
    if (!(params.theta_z > 0.0)) throw std::invalid_argument("theta_z must be positive");
    if (!(params.adversary_prob >= 0.0 && params.adversary_prob <= 1.0)) {
        throw std::invalid_argument("adversary probability must be in [0, 1]");
    }
    if (!(params.sigma_shape > 0.0 && params.sigma_second > 0.0)) {
        throw std::invalid_argument("gamma parameters must be positive");
    }
    auto check_override = [sources](std::size_t size, const char* name) {
        if (size != 0 && size != sources) {
            throw std::invalid_argument(std::string(name) + " override must have one entry per annotator");
        }
    };
    check_override(params.w.size(), "w");
    check_override(params.tau.size(), "tau");
    check_override(params.sigma.size(), "sigma");

    const double scale = params.sigma_convention == GammaConvention::shape_scale ? params.sigma_second
                                                                                 : 1.0 / params.sigma_second;
    std::bernoulli_distribution adversary(params.adversary_prob);
    std::normal_distribution<double> tau(0.0, params.tau_sd);
    std::gamma_distribution<double> sigma(params.sigma_shape, scale);

    WelinderAnnotators a;
    a.w.resize(sources);
    a.tau.resize(sources);
    a.sigma.resize(sources);
    for (std::size_t j = 0; j < sources; ++j) {
        a.w[j] = adversary(rng) ? -1 : 1;
        a.tau[j] = tau(rng);
        a.sigma[j] = sigma(rng);
    }
    if (!params.w.empty()) a.w = params.w;
    if (!params.tau.empty()) a.tau = params.tau;
    if (!params.sigma.empty()) a.sigma = params.sigma;
    for (std::size_t j = 0; j < sources; ++j) {
        if (a.w[j] != 1 && a.w[j] != -1) throw std::invalid_argument("annotator weight must be +1 or -1");
        if (!(a.sigma[j] > 0.0)) throw std::invalid_argument("annotator noise scale must be positive");
    }
    return a;
}

Dataset gen_welinder(std::size_t instances, std::size_t sources, const WelinderParams& params, std::uint64_t seed) {
    require_dims(instances, sources);
    Rng rng(seed);
    const auto annotators = sample_welinder_annotators(sources, params, rng);
    auto truth = uniform_truth(instances, 2, rng);

    std::vector<double> signal(instances);
    for (std::size_t i = 0; i < instances; ++i) {
        signal[i] = std::normal_distribution<double>(truth[i] == 1 ? 1.0 : -1.0, params.theta_z)(rng);
    }

    std::vector<ClassId> cells(sources * instances);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 0; j < sources; ++j) {
        for (std::size_t i = 0; i < instances; ++i) {
            const double seen = signal[i] + annotators.sigma[j] * unit(rng);
            cells[j * instances + i] = annotators.w[j] * seen >= annotators.tau[j] ? 1 : 0;
        }
    }
    return Dataset{OpinionMatrix(sources, instances, 2, std::move(cells)), std::move(truth)};
}

ClassId obfuscate_label(ClassId opinion, std::size_t n_classes, Rng& rng) {
    const auto k = static_cast<ClassId>(n_classes);
    std::exponential_distribution<double> unit_gamma(1.0);
    std::vector<double> u(n_classes);
    double total = 0.0;
    for (auto& x : u) total += (x = unit_gamma(rng));
    for (auto& x : u) x /= total;

    // z ~ Categorical(u)
    const double draw = uniform01(rng);
    ClassId z = k - 1;
    double cumulative = 0.0;
    for (ClassId a = 0; a < k; ++a) {
        cumulative += u[static_cast<std::size_t>(a)];
        if (draw < cumulative) {
            z = a;
            break;
        }
    }

    ClassId best = 0;
    double best_value = -1.0;
    for (ClassId a = 0; a < k; ++a) {
        const ClassId idx = (((opinion + z - a) % k) + k) % k;
        if (u[static_cast<std::size_t>(idx)] > best_value) {
            best_value = u[static_cast<std::size_t>(idx)];
            best = a;
        }
    }
    return best;
}

Dataset gen_goldberger(std::size_t instances, std::size_t sources, const GoldbergerParams& params,
                       std::uint64_t seed) {
    require_dims(instances, sources);
    if (params.n_classes < 2) throw std::invalid_argument("need at least two classes");
    if (!params.reliability.empty() && params.reliability.size() != sources) {
        throw std::invalid_argument("reliability override must have one entry per expert");
    }
    if (!(params.reliability_low >= 0.0 && params.reliability_low <= params.reliability_high &&
          params.reliability_high <= 1.0)) {
        throw std::invalid_argument("reliability range must lie in [0, 1]");
    }

    Rng rng(seed);
    std::vector<double> p = params.reliability;
    if (p.empty()) {
        std::uniform_real_distribution<double> pick(params.reliability_low, params.reliability_high);
        p.resize(sources);
        for (auto& x : p) x = pick(rng);
    }
    for (double x : p) {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("reliability must be in [0, 1]");
    }

    const std::size_t k = params.n_classes;
    auto truth = uniform_truth(instances, k, rng);
    std::uniform_int_distribution<ClassId> wrong_offset(1, static_cast<ClassId>(k) - 1);
    std::vector<ClassId> cells(sources * instances);
    for (std::size_t j = 0; j < sources; ++j) {
        for (std::size_t i = 0; i < instances; ++i) {
            ClassId y = truth[i];
            if (!(uniform01(rng) < p[j])) y = (y + wrong_offset(rng)) % static_cast<ClassId>(k);
            cells[j * instances + i] = params.obfuscate ? obfuscate_label(y, k, rng) : y;
        }
    }
    return Dataset{OpinionMatrix(sources, instances, k, std::move(cells)), std::move(truth)};
}

}  // namespace opinionrank
