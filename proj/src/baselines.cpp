#include "opinionrank/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace opinionrank {

namespace {

std::size_t argmax_first(const double* values, std::size_t k) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
        if (values[c] > values[best]) best = c;
    }
    return best;
}

// Votes per class, laid out instance-major: votes[i * k + c].
std::vector<double> vote_counts(const OpinionMatrix& opinions) {
    const std::size_t n = opinions.instances();
    const std::size_t k = opinions.classes();
    std::vector<double> votes(n * k, 0.0);
    for (std::size_t j = 0; j < opinions.sources(); ++j) {
        const auto row = opinions.row(j);
        for (std::size_t i = 0; i < n; ++i) {
            if (row[i] != kMissing) votes[i * k + static_cast<std::size_t>(row[i])] += 1.0;
        }
    }
    return votes;
}

void m_step(const OpinionMatrix& opinions, double smoothing, DawidSkeneModel& model) {
    const std::size_t n = model.instances;
    const std::size_t k = model.classes;
    const std::size_t s = model.sources;

    for (std::size_t c = 0; c < k; ++c) {
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) mass += model.posteriors[i * k + c];
        model.priors[c] = (mass + smoothing) / (static_cast<double>(n) + static_cast<double>(k) * smoothing);
    }

    std::fill(model.confusion.begin(), model.confusion.end(), smoothing);
    for (std::size_t j = 0; j < s; ++j) {
        const auto row = opinions.row(j);
        double* conf = model.confusion.data() + j * k * k;
        for (std::size_t i = 0; i < n; ++i) {
            if (row[i] == kMissing) continue;
            const auto emitted = static_cast<std::size_t>(row[i]);
            for (std::size_t truth = 0; truth < k; ++truth) {
                conf[truth * k + emitted] += model.posteriors[i * k + truth];
            }
        }
        for (std::size_t truth = 0; truth < k; ++truth) {
            double total = 0.0;
            for (std::size_t b = 0; b < k; ++b) total += conf[truth * k + b];
            for (std::size_t b = 0; b < k; ++b) conf[truth * k + b] /= total;
        }
    }
}

// Recomputes posteriors; returns the penalized log-likelihood.
double e_step(const OpinionMatrix& opinions, double smoothing, DawidSkeneModel& model) {
    const std::size_t n = model.instances;
    const std::size_t k = model.classes;
    const std::size_t s = model.sources;

    std::vector<double> log_conf(model.confusion.size());
    std::transform(model.confusion.begin(), model.confusion.end(), log_conf.begin(),
                   [](double p) { return std::log(p); });

    std::vector<double> logp(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < k; ++c) logp[i * k + c] = std::log(model.priors[c]);
    }
    for (std::size_t j = 0; j < s; ++j) {
        const auto row = opinions.row(j);
        const double* lc = log_conf.data() + j * k * k;
        for (std::size_t i = 0; i < n; ++i) {
            if (row[i] == kMissing) continue;
            const auto emitted = static_cast<std::size_t>(row[i]);
            for (std::size_t c = 0; c < k; ++c) logp[i * k + c] += lc[c * k + emitted];
        }
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* lp = logp.data() + i * k;
        const double top = *std::max_element(lp, lp + k);
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) total += std::exp(lp[c] - top);
        const double log_norm = top + std::log(total);
        for (std::size_t c = 0; c < k; ++c) model.posteriors[i * k + c] = std::exp(lp[c] - log_norm);
        objective += log_norm;
    }

    double log_prior = 0.0;
    for (double lc : log_conf) log_prior += lc;
    for (double p : model.priors) log_prior += std::log(p);
    return objective + smoothing * log_prior;
}

}  // namespace

MajorityVoteResult majority_vote(const OpinionMatrix& opinions) {
    const std::size_t n = opinions.instances();
    const std::size_t k = opinions.classes();
    const auto votes = vote_counts(opinions);

    MajorityVoteResult out;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* v = votes.data() + i * k;
        if (std::all_of(v, v + k, [](double x) { return x == 0.0; })) out.unlabeled.push_back(i);
        out.labels[i] = static_cast<ClassId>(argmax_first(v, k));
    }
    return out;
}

DawidSkeneResult dawid_skene(const OpinionMatrix& opinions, const DawidSkeneOptions& options) {
    if (options.max_iterations < 1) throw std::invalid_argument("Dawid-Skene needs at least one iteration");
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("Dawid-Skene tolerance must be positive");
    if (!(options.smoothing > 0.0)) throw std::invalid_argument("Dawid-Skene smoothing must be positive");

    const std::size_t n = opinions.instances();
    const std::size_t k = opinions.classes();
    const std::size_t s = opinions.sources();

    DawidSkeneResult out;
    DawidSkeneModel& model = out.model;
    model.sources = s;
    model.classes = k;
    model.instances = n;
    model.confusion.assign(s * k * k, 0.0);
    model.priors.assign(k, 1.0 / static_cast<double>(k));
    model.posteriors = vote_counts(opinions);

    // Soft majority-vote initialization.
    for (std::size_t i = 0; i < n; ++i) {
        double* t = model.posteriors.data() + i * k;
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) total += t[c];
        if (total == 0.0) {
            out.unlabeled.push_back(i);
            std::fill(t, t + k, 1.0 / static_cast<double>(k));
        } else {
            for (std::size_t c = 0; c < k; ++c) t[c] /= total;
        }
    }

    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        m_step(opinions, options.smoothing, model);
        const double objective = e_step(opinions, options.smoothing, model);
        model.log_likelihood.push_back(objective);
        model.iterations = iter + 1;
        if (options.observer) options.observer(model);
        if (std::abs(objective - previous) < options.tolerance) break;
        previous = objective;
    }

    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.labels[i] = static_cast<ClassId>(argmax_first(model.posteriors.data() + i * k, k));
    }
    // An instance without labels carries no evidence; match the majority-vote fallback.
    for (std::size_t i : out.unlabeled) out.labels[i] = 0;
    return out;
}

}  // namespace opinionrank
