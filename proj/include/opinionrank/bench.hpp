#pragma once

// Wall-clock timing of a full OpinionRank pass over random binary opinions.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "opinionrank/core.hpp"

namespace opinionrank {

struct BenchCell {
    std::size_t sources = 0;
    std::size_t instances = 0;
    std::size_t repetitions = 0;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
    double min_seconds = 0.0;
};

struct BenchOptions {
    std::vector<std::size_t> sources{1, 10, 25, 50, 75, 100};
    std::vector<std::size_t> instances{10, 100, 1000};
    std::size_t repetitions = 100;
    std::uint64_t seed = 0;
    OpinionRankOptions opinionrank;
    // Invoked after each finished cell.
    std::function<void(const BenchCell&)> progress;
};

// Uniform random s x n binary opinions; every cell present.
OpinionMatrix random_binary_opinions(std::size_t sources, std::size_t instances, std::uint64_t seed);

// Times one (s, n) cell. Only the opinion_rank call is inside the timed region;
// input generation is not.
BenchCell time_cell(std::size_t sources, std::size_t instances, std::size_t repetitions, std::uint64_t seed,
                    const OpinionRankOptions& options = {});

// Every (s, n) pair of the grid, sources-major, on the calling thread.
std::vector<BenchCell> run_bench(const BenchOptions& options);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace opinionrank
