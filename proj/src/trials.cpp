#include "opinionrank/simgen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "opinionrank/errors.hpp"

namespace opinionrank {

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::opinionrank: return "opinionrank";
        case Method::majority: return "majority";
        case Method::dawid_skene: return "dawid-skene";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "opinionrank") return Method::opinionrank;
    if (name == "majority") return Method::majority;
    if (name == "dawid-skene") return Method::dawid_skene;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Experiment experiment) noexcept {
    switch (experiment) {
        case Experiment::whitehill_model: return "whitehill-model";
        case Experiment::whitehill_difficulty: return "whitehill-difficulty";
        case Experiment::whitehill_stability: return "whitehill-stability";
        case Experiment::welinder: return "welinder";
        case Experiment::goldberger: return "goldberger";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name) {
    for (auto e : {Experiment::whitehill_model, Experiment::whitehill_difficulty, Experiment::whitehill_stability,
                   Experiment::welinder, Experiment::goldberger}) {
        if (to_string(e) == name) return e;
    }
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

Dataset GeneratorSpec::generate(std::uint64_t seed) const {
    switch (experiment) {
        case Experiment::whitehill_model: return gen_whitehill_model(instances, sources, seed);
        case Experiment::whitehill_difficulty: return gen_whitehill_difficulty(instances, sources, n_bad, seed);
        case Experiment::whitehill_stability: return gen_whitehill_stability(instances, sources, seed);
        case Experiment::welinder: return gen_welinder(instances, sources, welinder, seed);
        case Experiment::goldberger: return gen_goldberger(instances, sources, goldberger, seed);
    }
    throw std::logic_error("unhandled experiment");
}

GeneratorSpec default_spec(Experiment experiment, std::size_t sources) {
    GeneratorSpec spec;
    spec.experiment = experiment;
    spec.sources = sources;
    switch (experiment) {
        case Experiment::whitehill_model: spec.instances = 200; break;
        case Experiment::whitehill_difficulty: spec.instances = 1000; break;
        case Experiment::whitehill_stability: spec.instances = 2000; break;
        case Experiment::welinder: spec.instances = 500; break;
        case Experiment::goldberger: spec.instances = 200; break;
    }
    return spec;
}

std::vector<std::size_t> default_source_sweep(Experiment experiment) {
    auto range = [](std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> out(hi - lo + 1);
        std::iota(out.begin(), out.end(), lo);
        return out;
    };
    switch (experiment) {
        case Experiment::whitehill_model: return range(2, 20);
        case Experiment::whitehill_difficulty: return {50};
        case Experiment::whitehill_stability: return {20};
        case Experiment::welinder: return range(4, 20);
        case Experiment::goldberger: return range(5, 9);
    }
    return {};
}

MethodSummary summarize(Method method, std::span<const double> accuracies) {
    if (accuracies.empty()) throw std::invalid_argument("cannot summarize zero trials");
    MethodSummary m;
    m.method = method;
    m.trials = accuracies.size();
    m.accuracies.assign(accuracies.begin(), accuracies.end());
    const double count = static_cast<double>(m.trials);
    // Summed in trial order, so the result does not depend on how trials were scheduled.
    m.mean_accuracy = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / count;
    double ss = 0.0;
    for (double a : accuracies) ss += (a - m.mean_accuracy) * (a - m.mean_accuracy);
    m.std_accuracy = std::sqrt(ss / count);
    m.std_error = m.std_accuracy / std::sqrt(count);
    return m;
}

const MethodSummary& TrialReport::method(Method m) const {
    for (const auto& s : methods) {
        if (s.method == m) return s;
    }
    throw std::out_of_range("method '" + std::string(to_string(m)) + "' not in report");
}

double accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth) {
    if (predicted.size() != truth.size() || truth.empty()) {
        throw std::invalid_argument("prediction and truth lengths differ or are empty");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<ClassId> predict(Method method, const OpinionMatrix& opinions, const TrialOptions& options) {
    switch (method) {
        case Method::opinionrank: {
            auto decisions = decide_labels(opinion_rank(opinions, options.opinionrank));
            if (decisions.task == Task::multilabel) {
                throw std::invalid_argument("multilabel decisions cannot be scored as single labels");
            }
            return std::move(decisions.labels);
        }
        case Method::majority: return majority_vote(opinions).labels;
        case Method::dawid_skene: return dawid_skene(opinions, options.dawid_skene).labels;
    }
    throw std::logic_error("unhandled method");
}

TrialReport run_trials(const GeneratorSpec& spec, std::span<const Method> methods, std::size_t trials,
                       std::uint64_t base_seed, const TrialOptions& options) {
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    if (methods.empty()) throw std::invalid_argument("need at least one method");

    std::vector<std::vector<double>> acc(methods.size(), std::vector<double>(trials));
    for (std::size_t t = 0; t < trials; ++t) {
        try {
            const Dataset data = spec.generate(base_seed + t);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                acc[m][t] = accuracy(predict(methods[m], data.opinions, options), data.truth);
            }
        } catch (const std::exception& e) {
            throw TrialError(t, e.what());
        }
    }

    TrialReport report;
    report.experiment = std::string(to_string(spec.experiment));
    switch (spec.experiment) {
        case Experiment::whitehill_model: report.variant = "model"; break;
        case Experiment::whitehill_difficulty:
            report.variant = "difficulty/n_bad=" + std::to_string(spec.n_bad.value_or(default_bad_labelers(spec.sources)));
            break;
        case Experiment::whitehill_stability: report.variant = "stability"; break;
        case Experiment::welinder: report.variant = "welinder"; break;
        case Experiment::goldberger: report.variant = "goldberger"; break;
    }
    report.sources = spec.sources;
    report.instances = spec.instances;
    report.trials = trials;
    report.base_seed = base_seed;
    for (std::size_t m = 0; m < methods.size(); ++m) report.methods.push_back(summarize(methods[m], acc[m]));
    return report;
}

}  // namespace opinionrank
