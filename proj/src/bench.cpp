#include "opinionrank/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace opinionrank {

OpinionMatrix random_binary_opinions(std::size_t sources, std::size_t instances, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<ClassId> cells(sources * instances);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i % 64 == 0) bits = rng();
        cells[i] = static_cast<ClassId>(bits & 1u);
        bits >>= 1;
    }
    return OpinionMatrix(sources, instances, 2, std::move(cells));
}

BenchCell time_cell(std::size_t sources, std::size_t instances, std::size_t repetitions, std::uint64_t seed,
                    const OpinionRankOptions& options) {
    if (repetitions < 1) throw std::invalid_argument("need at least one repetition");
    using clock = std::chrono::steady_clock;

    std::vector<double> seconds(repetitions);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto opinions = random_binary_opinions(sources, instances, seed + r);
        const auto start = clock::now();
        const auto scores = opinion_rank(opinions, options);
        const auto stop = clock::now();
        // Keep the result observable so the call cannot be elided.
        if (scores.instances() != instances) throw std::logic_error("score width mismatch");
        seconds[r] = std::chrono::duration<double>(stop - start).count();
    }

    BenchCell cell{sources, instances, repetitions, 0.0, 0.0, 0.0};
    for (double t : seconds) cell.mean_seconds += t;
    cell.mean_seconds /= static_cast<double>(repetitions);
    for (double t : seconds) cell.std_seconds += (t - cell.mean_seconds) * (t - cell.mean_seconds);
    cell.std_seconds = std::sqrt(cell.std_seconds / static_cast<double>(repetitions));
    cell.min_seconds = *std::min_element(seconds.begin(), seconds.end());
    return cell;
}

std::vector<BenchCell> run_bench(const BenchOptions& options) {
    if (options.sources.empty() || options.instances.empty()) throw std::invalid_argument("bench grid is empty");
    std::vector<BenchCell> cells;
    for (std::size_t s : options.sources) {
        for (std::size_t n : options.instances) {
            cells.push_back(time_cell(s, n, options.repetitions, options.seed, options.opinionrank));
            if (options.progress) options.progress(cells.back());
        }
    }
    return cells;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs two or more paired points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("log-log slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw std::invalid_argument("slope needs at least two distinct x values");
    return sxy / sxx;
}

}  // namespace opinionrank
