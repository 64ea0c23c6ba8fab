#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "opinionrank/baselines.hpp"
#include "opinionrank/bench.hpp"
#include "opinionrank/core.hpp"
#include "opinionrank/errors.hpp"
#include "opinionrank/io.hpp"
#include "opinionrank/simgen.hpp"

namespace opinionrank::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::size_t kPaperScaleTrials = 50000;

// Flag combination rejected after parsing; maps to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string default_output_dir() {
    const char* env = std::getenv(kOutputDirEnv);
    return env && *env ? env : ".";
}

void write_text_file(const fs::path& path, const std::string& body) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw std::runtime_error("cannot create directory '" + path.parent_path().string() + "'");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << body;
    if (!out.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// Rejects counts below 1 with a readable message.
const CLI::Validator kAtLeastOne(
    [](std::string& value) -> std::string {
        std::size_t parsed = 0;
        if (!CLI::detail::lexical_cast(value, parsed) || parsed < 1) return "must be a positive integer";
        return {};
    },
    "POSITIVE");

std::string percent(double fraction) { return fmt::format("{:.1f}%", 100.0 * fraction); }

// ---------------------------------------------------------------------------

struct AggregateConfig {
    std::string input;
    std::string out_dir;
    std::size_t power = 1000;
    std::size_t top_n = 0;  // 0 = all sources
    bool raw_top_n = false;
    std::string task = "auto";
    std::string missing_token;
    std::vector<std::string> classes;
    bool baselines = false;
    std::string truth;
    std::uint64_t seed = 0;
};

int cmd_aggregate(const AggregateConfig& cfg, std::ostream& out) {
    AnnotationFileSpec spec;
    spec.missing_token = cfg.missing_token;
    if (!cfg.classes.empty()) spec.classes = cfg.classes;
    const AnnotationTable table = read_opinions(fs::path(cfg.input), spec);
    const auto& opinions = table.opinions;

    OpinionRankOptions options;
    options.power.max_iterations = cfg.power;
    options.renormalize_top_n = !cfg.raw_top_n;
    if (cfg.top_n != 0) {
        if (cfg.top_n > opinions.sources()) {
            throw UsageError(fmt::format("--top-n {} exceeds the {} sources in '{}'", cfg.top_n, opinions.sources(),
                                         cfg.input));
        }
        options.top_n = cfg.top_n;
    }
    if (cfg.task != "auto") {
        options.task = parse_task(cfg.task);
        if (*options.task == Task::binary && opinions.classes() != 2) {
            throw UsageError(fmt::format("--task binary needs exactly two classes; '{}' has {}", cfg.input,
                                         opinions.classes()));
        }
    }

    const auto result = rank_opinions(opinions, options);
    const auto decisions = decide_labels(result.scores);
    const auto paths = write_outputs(fs::path(cfg.out_dir), result, decisions, table);

    fmt::print(out, "{} sources, {} instances, {} classes, task {}\n", opinions.sources(), opinions.instances(),
               opinions.classes(), to_string(result.scores.task()));
    fmt::print(out, "wrote {}\nwrote {}\nwrote {}\n", paths.scores.string(), paths.predictions.string(),
               paths.rankings.string());

    std::map<std::string, std::vector<ClassId>> labeled;
    if (decisions.task != Task::multilabel) labeled["opinionrank"] = decisions.labels;
    if (cfg.baselines) {
        const auto mv = majority_vote(opinions);
        const auto ds = dawid_skene(opinions);
        for (auto& [name, labels, unlabeled] :
             {std::tuple{"majority", mv.labels, mv.unlabeled}, std::tuple{"dawid-skene", ds.labels, ds.unlabeled}}) {
            const fs::path path = fs::path(cfg.out_dir) / fmt::format("predictions_{}.csv", name);
            std::ofstream f(path, std::ios::binary | std::ios::trunc);
            if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
            write_label_predictions(f, labels, table.alphabet, table.instance_ids);
            if (!f.flush()) throw std::runtime_error("failed writing '" + path.string() + "'");
            fmt::print(out, "wrote {}\n", path.string());
            if (!unlabeled.empty()) {
                fmt::print(out, "warning: {} instance(s) had no labels; {} assigned '{}'\n", unlabeled.size(), name,
                           table.alphabet.token(0));
            }
            labeled[name] = labels;
        }
    }

    if (!cfg.truth.empty()) {
        const auto truth = read_truth(fs::path(cfg.truth), table.alphabet, table.instance_ids);
        for (const auto& [name, labels] : labeled) {
            const double acc = accuracy(labels, truth);
            fmt::print(out, "accuracy {:<12} {:.6f}\n", name, acc);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateConfig {
    std::string experiment;
    std::size_t trials = 1000;
    bool paper_scale = false;
    std::uint64_t seed = 0;
    std::vector<std::string> methods{"opinionrank", "majority", "dawid-skene"};
    std::vector<std::size_t> sources;
    std::size_t instances = 0;
    std::size_t n_bad = 0;
    bool n_bad_set = false;
    std::string gamma_convention = "shape-scale";
    double adversary_prob = 0.01;
    std::size_t power = 1000;
    std::string out_dir;
};

// Published comparison figures shown next to simulated results.
std::vector<std::pair<std::string, std::string>> reference_figures(Experiment experiment) {
    switch (experiment) {
        case Experiment::whitehill_difficulty:
            return {{"majority (published)", "error 11.2%"},
                    {"dawid-skene (published)", "error 8.4%"},
                    {"glad (published)", "error 4.5%"},
                    {"opinionrank (published)", "error 0.0%"}};
        case Experiment::whitehill_stability: return {{"glad (published)", "mean accuracy 85.84%"}};
        default: return {};
    }
}

json report_to_json(const TrialReport& r) {
    json j;
    j["variant"] = r.variant;
    j["sources"] = r.sources;
    j["instances"] = r.instances;
    j["trials"] = r.trials;
    j["base_seed"] = r.base_seed;
    j["methods"] = json::array();
    for (const auto& m : r.methods) {
        j["methods"].push_back({{"method", std::string(to_string(m.method))},
                                {"mean_accuracy", m.mean_accuracy},
                                {"std_accuracy", m.std_accuracy},
                                {"stderr", m.std_error},
                                {"error_rate", 1.0 - m.mean_accuracy}});
    }
    return j;
}

void print_report_table(std::ostream& out, const TrialReport& r) {
    fmt::print(out, "{} s={} n={} ({} trials, {})\n", r.experiment, r.sources, r.instances, r.trials, r.variant);
    fmt::print(out, "  {:<14} {:>10} {:>10} {:>10} {:>8}\n", "method", "mean", "std", "stderr", "error");
    for (const auto& m : r.methods) {
        fmt::print(out, "  {:<14} {:>10.6f} {:>10.6f} {:>10.6f} {:>8}\n", to_string(m.method), m.mean_accuracy,
                   m.std_accuracy, m.std_error, percent(1.0 - m.mean_accuracy));
    }
}

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err) {
    const Experiment experiment = parse_experiment(cfg.experiment);
    std::vector<Method> methods;
    for (const auto& name : cfg.methods) methods.push_back(parse_method(name));

    std::size_t trials = cfg.trials;
    if (cfg.paper_scale) {
        trials = kPaperScaleTrials;
        fmt::print(err, "warning: running {} trials per configuration; this can take a long time\n", trials);
    }
    if (cfg.n_bad_set && experiment != Experiment::whitehill_difficulty) {
        throw UsageError("--n-bad only applies to whitehill-difficulty");
    }

    const auto sweep = cfg.sources.empty() ? default_source_sweep(experiment) : cfg.sources;
    std::vector<GeneratorSpec> specs;
    for (std::size_t s : sweep) {
        GeneratorSpec spec = default_spec(experiment, s);
        if (cfg.instances != 0) spec.instances = cfg.instances;
        if (cfg.n_bad_set) {
            if (cfg.n_bad > s) throw UsageError(fmt::format("--n-bad {} exceeds {} sources", cfg.n_bad, s));
            spec.n_bad = cfg.n_bad;
        }
        if (experiment == Experiment::whitehill_difficulty && spec.instances % 2 != 0) {
            throw UsageError("whitehill-difficulty needs an even instance count");
        }
        spec.welinder.sigma_convention =
            cfg.gamma_convention == "shape-rate" ? GammaConvention::shape_rate : GammaConvention::shape_scale;
        spec.welinder.adversary_prob = cfg.adversary_prob;
        specs.push_back(spec);
    }

    TrialOptions options;
    options.opinionrank.power.max_iterations = cfg.power;

    json report;
    report["experiment"] = cfg.experiment;
    report["trials"] = trials;
    report["base_seed"] = cfg.seed;
    report["configurations"] = json::array();
    for (const auto& spec : specs) {
        const TrialReport r = run_trials(spec, methods, trials, cfg.seed, options);
        print_report_table(out, r);
        report["configurations"].push_back(report_to_json(r));
    }
    const auto refs = reference_figures(experiment);
    if (!refs.empty()) {
        report["published_reference"] = json::object();
        fmt::print(out, "published reference figures:\n");
        for (const auto& [name, value] : refs) {
            fmt::print(out, "  {:<24} {}\n", name, value);
            report["published_reference"][name] = value;
        }
    }

    const fs::path path = fs::path(cfg.out_dir) / fmt::format("simulate_{}.json", cfg.experiment);
    write_text_file(path, report.dump(2) + "\n");
    fmt::print(out, "wrote {}\n", path.string());
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScoreConfig {
    std::string predictions;
    std::string truth;
    std::string out_dir;
};

int cmd_score(const ScoreConfig& cfg, std::ostream& out) {
    const LabelTable predicted = read_label_table(fs::path(cfg.predictions));
    const LabelTable truth = read_label_table(fs::path(cfg.truth));
    // Align truth to the prediction order; any id mismatch is an error.
    const auto expected = align_labels(truth, predicted.ids);
    if (expected.empty()) throw ValidationError("no instances to score", {});

    std::size_t correct = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) correct += predicted.tokens[i] == expected[i];
    const double acc = static_cast<double>(correct) / static_cast<double>(expected.size());

    fmt::print(out, "accuracy {} ({}/{})\n", format_real(acc), correct, expected.size());
    json summary;
    summary["predictions"] = cfg.predictions;
    summary["truth"] = cfg.truth;
    summary["correct"] = correct;
    summary["total"] = expected.size();
    summary["accuracy"] = acc;
    const fs::path path = fs::path(cfg.out_dir) / "score.json";
    write_text_file(path, summary.dump(2) + "\n");
    fmt::print(out, "wrote {}\n", path.string());
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchConfig {
    std::vector<std::size_t> sources{1, 10, 25, 50, 75, 100};
    std::vector<std::size_t> instances{10, 100, 1000};
    std::size_t repetitions = 100;
    std::uint64_t seed = 0;
    std::size_t power = 1000;
    std::string out_dir;
};

int cmd_bench(const BenchConfig& cfg, std::ostream& out) {
    BenchOptions options;
    options.sources = cfg.sources;
    options.instances = cfg.instances;
    options.repetitions = cfg.repetitions;
    options.seed = cfg.seed;
    options.opinionrank.power.max_iterations = cfg.power;

    fmt::print(out, "{:>8} {:>10} {:>6} {:>14} {:>14}\n", "sources", "instances", "reps", "mean_ms", "std_ms");
    options.progress = [&out](const BenchCell& c) {
        fmt::print(out, "{:>8} {:>10} {:>6} {:>14.4f} {:>14.4f}\n", c.sources, c.instances, c.repetitions,
                   1e3 * c.mean_seconds, 1e3 * c.std_seconds);
        out.flush();
    };
    const auto cells = run_bench(options);

    std::string csv = "sources,instances,repetitions,mean_seconds,std_seconds,min_seconds\n";
    for (const auto& c : cells) {
        csv += fmt::format("{},{},{},{},{},{}\n", c.sources, c.instances, c.repetitions, format_real(c.mean_seconds),
                           format_real(c.std_seconds), format_real(c.min_seconds));
    }

    // Scaling exponents at the largest s and n of the grid.
    auto slope_over = [&](bool over_instances) -> std::optional<double> {
        const std::size_t fixed = over_instances ? cfg.sources.back() : cfg.instances.back();
        std::vector<double> x, y;
        for (const auto& c : cells) {
            if ((over_instances ? c.sources : c.instances) != fixed) continue;
            x.push_back(static_cast<double>(over_instances ? c.instances : c.sources));
            y.push_back(c.mean_seconds);
        }
        try {
            return loglog_slope(x, y);
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    };
    if (auto sn = slope_over(true)) fmt::print(out, "log-log slope in n (s={}): {:.3f}\n", cfg.sources.back(), *sn);
    if (auto ss = slope_over(false)) fmt::print(out, "log-log slope in s (n={}): {:.3f}\n", cfg.instances.back(), *ss);

    const fs::path path = fs::path(cfg.out_dir) / "bench.csv";
    write_text_file(path, csv);
    fmt::print(out, "wrote {}\n", path.string());
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Aggregate unreliable annotations with spectral source ranking"};
    app.require_subcommand(1);
    const std::string out_dir = default_output_dir();

    AggregateConfig agg;
    agg.out_dir = out_dir;
    auto* aggregate = app.add_subcommand("aggregate", "Run OpinionRank on an annotation file");
    aggregate->add_option("input", agg.input, "Annotation CSV (rows are instances)")->required();
    aggregate->add_option("-o,--out-dir", agg.out_dir, "Output directory")->capture_default_str();
    aggregate->add_option("--power", agg.power, "Power-iteration budget")->check(kAtLeastOne)->capture_default_str();
    aggregate->add_option("--top-n", agg.top_n, "Keep only the N highest-ranked sources")->check(kAtLeastOne);
    aggregate->add_flag("--raw-top-n", agg.raw_top_n, "Do not renormalize the kept weights");
    aggregate->add_option("--task", agg.task, "Decision rule")
        ->check(CLI::IsMember({"auto", "binary", "multinomial", "multilabel"}))
        ->capture_default_str();
    aggregate->add_option("--missing-token", agg.missing_token, "Cell value meaning 'no label'");
    aggregate->add_option("--classes", agg.classes, "Declared class alphabet, in id order")->delimiter(',');
    aggregate->add_flag("--baselines", agg.baselines, "Also run majority vote and Dawid-Skene");
    aggregate->add_option("--truth", agg.truth, "Truth file (instance,label) for accuracy");
    aggregate->add_option("--seed", agg.seed, "Accepted for interface symmetry; aggregation is deterministic");

    SimulateConfig sim;
    sim.out_dir = out_dir;
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo experiment on synthetic annotators");
    simulate->add_option("experiment", sim.experiment, "Experiment name")
        ->required()
        ->check(CLI::IsMember({"whitehill-model", "whitehill-difficulty", "whitehill-stability", "welinder",
                               "goldberger"}));
    simulate->add_option("--trials", sim.trials, "Trials per configuration")->check(kAtLeastOne)->capture_default_str();
    simulate->add_flag("--paper-scale", sim.paper_scale, "Run 50000 trials per configuration");
    simulate->add_option("--seed", sim.seed, "Base seed; trial t uses seed + t")->capture_default_str();
    simulate->add_option("--methods", sim.methods, "Aggregators to score")
        ->delimiter(',')
        ->check(CLI::IsMember({"opinionrank", "majority", "dawid-skene"}));
    simulate->add_option("--sources", sim.sources, "Source counts to sweep")->delimiter(',')->check(kAtLeastOne);
    simulate->add_option("--instances", sim.instances, "Instance count override")->check(kAtLeastOne);
    auto* n_bad = simulate->add_option("--n-bad", sim.n_bad, "Bad labelers (whitehill-difficulty)");
    simulate->add_option("--gamma-convention", sim.gamma_convention, "Noise Gamma(1.5, 0.3) convention (welinder)")
        ->check(CLI::IsMember({"shape-scale", "shape-rate"}))
        ->capture_default_str();
    simulate->add_option("--adversary-prob", sim.adversary_prob, "Adversarial annotator probability (welinder)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    simulate->add_option("--power", sim.power, "Power-iteration budget")->check(kAtLeastOne)->capture_default_str();
    simulate->add_option("-o,--out-dir", sim.out_dir, "Output directory")->capture_default_str();

    ScoreConfig sc;
    sc.out_dir = out_dir;
    auto* score = app.add_subcommand("score", "Compare a predictions file with a truth file");
    score->add_option("--predictions", sc.predictions, "Predictions CSV (instance,label)")->required();
    score->add_option("--truth", sc.truth, "Truth CSV (instance,label)")->required();
    score->add_option("-o,--out-dir", sc.out_dir, "Output directory")->capture_default_str();

    BenchConfig bc;
    bc.out_dir = out_dir;
    auto* bench = app.add_subcommand("bench", "Time OpinionRank on random binary opinions");
    bench->add_option("--sources", bc.sources, "Source counts")->delimiter(',')->check(kAtLeastOne)->capture_default_str();
    bench->add_option("--instances", bc.instances, "Instance counts")->delimiter(',')->check(kAtLeastOne)->capture_default_str();
    bench->add_option("--repetitions", bc.repetitions, "Timed passes per cell")->check(kAtLeastOne)->capture_default_str();
    bench->add_option("--seed", bc.seed, "Seed for the random opinions")->capture_default_str();
    bench->add_option("--power", bc.power, "Power-iteration budget")->check(kAtLeastOne)->capture_default_str();
    bench->add_option("-o,--out-dir", bc.out_dir, "Output directory")->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (aggregate->parsed()) return cmd_aggregate(agg, out);
        if (simulate->parsed()) {
            sim.n_bad_set = n_bad->count() > 0;
            return cmd_simulate(sim, out, err);
        }
        if (score->parsed()) return cmd_score(sc, out);
        if (bench->parsed()) return cmd_bench(bc, out);
    } catch (const UsageError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitUsage;
    } catch (const ValidationError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitRuntime;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace opinionrank::cli
