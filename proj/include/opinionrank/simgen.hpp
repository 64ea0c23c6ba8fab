#pragma once

// Synthetic annotation data under three label-generation models, and a seeded
// Monte-Carlo harness that scores aggregators against the generated truth.
//
// Every generator is a pure function of its arguments and seed. Distributions
// come from <random> driven by std::mt19937_64, so outputs are reproducible on
// a given standard library.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opinionrank/baselines.hpp"
#include "opinionrank/core.hpp"
#include "opinionrank/opinion_matrix.hpp"

namespace opinionrank {

using Rng = std::mt19937_64;

struct Dataset {
    OpinionMatrix opinions;
    std::vector<ClassId> truth;
};

// ---------------------------------------------------------------------------
// Expertise / difficulty model. A label is correct with probability
// sigmoid(alpha_j * beta_i); an incorrect binary label is the other class.

enum class WhitehillVariant : std::uint8_t {
    model,       // alpha ~ N(1, 1), log beta ~ N(1, 1)
    difficulty,  // easy/hard instances, good/bad labelers
    stability,   // alpha ~ U[0, 4], log beta ~ U[0, 3]
};

struct WhitehillParams {
    WhitehillVariant variant = WhitehillVariant::model;
    std::vector<double> alpha;  // per labeler, any real
    std::vector<double> beta;   // per instance, >= 0; +inf marks an instance everyone gets right
    std::size_t n_bad = 0;      // difficulty variant: labelers [0, n_bad) are bad
};

// Difficulty variant accuracies on hard instances.
inline constexpr double kGoodLabelerAccuracy = 0.95;
inline constexpr double kBadLabelerAccuracy = 0.54;

// One bad labeler per 25 good ones, rounded: 2 of 50.
std::size_t default_bad_labelers(std::size_t sources);

WhitehillParams sample_whitehill_params(WhitehillVariant variant, std::size_t instances, std::size_t sources,
                                        std::size_t n_bad, Rng& rng);

// Labels from explicit parameters. Truth is uniform over {0, 1}.
Dataset gen_whitehill(const WhitehillParams& params, std::uint64_t seed);

Dataset gen_whitehill_model(std::size_t instances, std::size_t sources, std::uint64_t seed);
// Instances [0, n/2) are easy, the rest hard. n must be even.
Dataset gen_whitehill_difficulty(std::size_t instances, std::size_t sources, std::optional<std::size_t> n_bad,
                                 std::uint64_t seed);
Dataset gen_whitehill_stability(std::size_t instances, std::size_t sources, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Signal/noise/threshold model. x_i ~ N(+-1, theta_z^2), y_ij ~ N(x_i, sigma_j^2),
// label = 1 iff w_j * y_ij >= tau_j.

enum class GammaConvention : std::uint8_t {
    shape_scale,  // Gamma(k, theta): mean k * theta
    shape_rate,   // Gamma(k, lambda): mean k / lambda
};

struct WelinderParams {
    double theta_z = 0.5;
    double adversary_prob = 0.01;
    double tau_sd = 0.5;
    double sigma_shape = 1.5;
    double sigma_second = 0.3;  // scale or rate, per sigma_convention
    GammaConvention sigma_convention = GammaConvention::shape_scale;

    // Per-annotator overrides; sampled when empty, otherwise length s.
    std::vector<int> w;
    std::vector<double> tau;
    std::vector<double> sigma;
};

struct WelinderAnnotators {
    std::vector<int> w;
    std::vector<double> tau;
    std::vector<double> sigma;
};

double welinder_sigma_mean(const WelinderParams& params);
WelinderAnnotators sample_welinder_annotators(std::size_t sources, const WelinderParams& params, Rng& rng);
Dataset gen_welinder(std::size_t instances, std::size_t sources, const WelinderParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Per-expert reliability with uniform errors, then label obfuscation through a
// flat-Dirichlet shift and argmax hardening.

struct GoldbergerParams {
    std::size_t n_classes = 3;
    std::vector<double> reliability;  // explicit p_j; sampled when empty
    double reliability_low = 0.4;
    double reliability_high = 0.7;
    bool obfuscate = true;
};

// Hardened label emitted for opinion y: argmax_a U[(y + z - a) mod K] with
// U ~ Dirichlet(1, ..., 1) and z ~ Categorical(U).
ClassId obfuscate_label(ClassId opinion, std::size_t n_classes, Rng& rng);

Dataset gen_goldberger(std::size_t instances, std::size_t sources, const GoldbergerParams& params,
                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Monte-Carlo harness.

enum class Method : std::uint8_t { opinionrank, majority, dawid_skene };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);

enum class Experiment : std::uint8_t {
    whitehill_model,
    whitehill_difficulty,
    whitehill_stability,
    welinder,
    goldberger,
};

std::string_view to_string(Experiment experiment) noexcept;
Experiment parse_experiment(std::string_view name);

struct GeneratorSpec {
    Experiment experiment = Experiment::whitehill_model;
    std::size_t sources = 10;
    std::size_t instances = 200;
    std::optional<std::size_t> n_bad;  // whitehill_difficulty only
    WelinderParams welinder;
    GoldbergerParams goldberger;

    Dataset generate(std::uint64_t seed) const;
};

// Instance count and source sweep used by each experiment by default.
GeneratorSpec default_spec(Experiment experiment, std::size_t sources);
std::vector<std::size_t> default_source_sweep(Experiment experiment);

struct MethodSummary {
    Method method = Method::opinionrank;
    std::size_t trials = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population standard deviation
    double std_error = 0.0;     // std_accuracy / sqrt(trials)
    std::vector<double> accuracies;  // indexed by trial
};

MethodSummary summarize(Method method, std::span<const double> accuracies);

struct TrialReport {
    std::string experiment;
    std::string variant;
    std::size_t sources = 0;
    std::size_t instances = 0;
    std::size_t trials = 0;
    std::uint64_t base_seed = 0;
    std::vector<MethodSummary> methods;

    const MethodSummary& method(Method m) const;
};

struct TrialOptions {
    OpinionRankOptions opinionrank;
    DawidSkeneOptions dawid_skene;
};

double accuracy(std::span<const ClassId> predicted, std::span<const ClassId> truth);

std::vector<ClassId> predict(Method method, const OpinionMatrix& opinions, const TrialOptions& options = {});

// Trial t draws its dataset with seed base_seed + t. Failures are rethrown as
// TrialError tagged with t.
TrialReport run_trials(const GeneratorSpec& spec, std::span<const Method> methods, std::size_t trials,
                       std::uint64_t base_seed, const TrialOptions& options = {});

}  // namespace opinionrank
