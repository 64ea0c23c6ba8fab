#include "opinionrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "opinionrank/errors.hpp"

namespace opinionrank {

namespace {

// Agreement between two membership rows: both present and equal.
// Block sums fit in 16 bits, which keeps the vectorized inner loop narrow.
std::int64_t agreements(const std::int8_t* a, const std::int8_t* b, std::size_t n) {
    constexpr std::size_t kBlock = 65535;
    std::int64_t total = 0;
    for (std::size_t begin = 0; begin < n; begin += kBlock) {
        const std::size_t end = std::min(n, begin + kBlock);
        std::uint16_t block = 0;
        for (std::size_t j = begin; j < end; ++j) {
            block = static_cast<std::uint16_t>(block + ((a[j] == b[j]) & (a[j] >= 0)));
        }
        total += block;
    }
    return total;
}

std::int64_t present(const std::int8_t* a, std::size_t n) {
    std::int64_t total = 0;
    for (std::size_t j = 0; j < n; ++j) total += (a[j] >= 0);
    return total;
}

void check_ranking_size(const RankingVector& ranking, std::size_t sources) {
    if (ranking.size() != sources) {
        throw std::invalid_argument("ranking has " + std::to_string(ranking.size()) +
                                    " weights for " + std::to_string(sources) + " sources");
    }
}

ClassRanking rank_class(const BinaryMembershipMatrix& membership, const OpinionRankOptions& options,
                        std::span<double> scores_out) {
    const std::size_t s = membership.sources();
    const std::size_t n_keep = options.top_n.value_or(s);

    ClassRanking out;
    out.class_id = membership.class_id();
    out.ranking = dominant_eigenvector(to_stochastic(count_agreements(membership)), options.power);
    out.kept = select_top_n(out.ranking, n_keep);
    const auto scores = weighted_scores(membership, out.ranking, out.kept, options.renormalize_top_n);
    std::copy(scores.begin(), scores.end(), scores_out.begin());
    return out;
}

void check_top_n(const OpinionRankOptions& options, std::size_t sources) {
    if (options.top_n && (*options.top_n < 1 || *options.top_n > sources)) {
        throw std::invalid_argument("top-N must be in [1, " + std::to_string(sources) + "], got " +
                                    std::to_string(*options.top_n));
    }
}

}  // namespace

BinaryMembershipMatrix::BinaryMembershipMatrix(std::size_t sources, std::size_t instances,
                                               ClassId class_id, std::vector<std::int8_t> cells)
    : sources_(sources), instances_(instances), class_id_(class_id), cells_(std::move(cells)) {
    if (cells_.size() != sources_ * instances_) {
        throw std::invalid_argument("membership cell count does not match dimensions");
    }
    for (auto c : cells_) {
        if (c != 0 && c != 1 && c != kAbsent) throw std::invalid_argument("membership cell must be 0, 1 or missing");
    }
}

std::int8_t BinaryMembershipMatrix::at(std::size_t source, std::size_t instance) const {
    if (source >= sources_ || instance >= instances_) throw std::out_of_range("membership index");
    return cells_[source * instances_ + instance];
}

std::span<const std::int8_t> BinaryMembershipMatrix::row(std::size_t source) const {
    if (source >= sources_) throw std::out_of_range("membership source index");
    return std::span<const std::int8_t>(cells_).subspan(source * instances_, instances_);
}

WeightedScores::WeightedScores(Task task, std::size_t rows, std::size_t instances)
    : task_(task), rows_(rows), instances_(instances), scores_(rows * instances, 0.0) {
    if (task_ == Task::binary && rows_ != 1) {
        throw std::invalid_argument("binary scores hold exactly one row");
    }
}

double WeightedScores::at(std::size_t row, std::size_t instance) const {
    if (row >= rows_ || instance >= instances_) throw std::out_of_range("score index");
    return scores_[row * instances_ + instance];
}

std::span<double> WeightedScores::row(std::size_t r) {
    if (r >= rows_) throw std::out_of_range("score row");
    return std::span<double>(scores_).subspan(r * instances_, instances_);
}

std::span<const double> WeightedScores::row(std::size_t r) const {
    if (r >= rows_) throw std::out_of_range("score row");
    return std::span<const double>(scores_).subspan(r * instances_, instances_);
}

Task default_task(std::size_t classes) noexcept {
    return classes == 2 ? Task::binary : Task::multinomial;
}

BinaryMembershipMatrix build_membership_matrix(const OpinionMatrix& opinions, ClassId class_id) {
    if (class_id < 0 || static_cast<std::size_t>(class_id) >= opinions.classes()) {
        throw std::invalid_argument("class id " + std::to_string(class_id) + " outside [0, " +
                                    std::to_string(opinions.classes()) + ")");
    }
    const auto src = opinions.cells();
    std::vector<std::int8_t> cells(src.size());
    std::transform(src.begin(), src.end(), cells.begin(), [class_id](ClassId label) -> std::int8_t {
        if (label == kMissing) return BinaryMembershipMatrix::kAbsent;
        return label == class_id ? 1 : 0;
    });
    return BinaryMembershipMatrix(opinions.sources(), opinions.instances(), class_id, std::move(cells));
}

AgreementCounts count_agreements(const BinaryMembershipMatrix& membership) {
    const std::size_t s = membership.sources();
    const std::size_t n = membership.instances();
    AgreementCounts out{s, n, std::vector<std::int64_t>(s * s, 0)};
    const std::int8_t* base = membership.cells().data();
    for (std::size_t i = 0; i < s; ++i) {
        const std::int8_t* a = base + i * n;
        out.counts[i * s + i] = present(a, n);
        for (std::size_t j = i + 1; j < s; ++j) {
            const std::int64_t c = agreements(a, base + j * n, n);
            out.counts[i * s + j] = c;
            out.counts[j * s + i] = c;
        }
    }
    return out;
}

CorroborationMatrix to_stochastic(const AgreementCounts& counts) {
    if (counts.instances == 0) throw std::invalid_argument("agreement counts need at least one instance");
    const std::size_t s = counts.sources;
    const double n = static_cast<double>(counts.instances);
    CorroborationMatrix out{s, std::vector<double>(s * s)};
    for (std::size_t i = 0; i < s; ++i) {
        const auto first = counts.counts.begin() + static_cast<std::ptrdiff_t>(i * s);
        const double row_max = static_cast<double>(*std::max_element(first, first + static_cast<std::ptrdiff_t>(s))) / n;
        double total = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            const double e = std::exp(static_cast<double>(counts.counts[i * s + j]) / n - row_max);
            out.probs[i * s + j] = e;
            total += e;
        }
        for (std::size_t j = 0; j < s; ++j) out.probs[i * s + j] /= total;
    }
    return out;
}

RankingVector dominant_eigenvector(const CorroborationMatrix& corr, const PowerIterationOptions& options) {
    const std::size_t s = corr.sources;
    if (s == 0 || corr.probs.size() != s * s) throw std::invalid_argument("corroboration matrix must be square and non-empty");
    if (options.max_iterations < 1) throw std::invalid_argument("power iteration budget must be at least 1");
    if (options.start_index >= s) throw std::invalid_argument("start index outside the source range");

    // next = C^T v, traversing C by rows.
    auto step = [&](const std::vector<double>& v, std::vector<double>& next) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < s; ++i) {
            const double vi = v[i];
            const double* row = corr.probs.data() + i * s;
            for (std::size_t j = 0; j < s; ++j) next[j] += vi * row[j];
        }
    };
    auto max_abs_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
        return d;
    };

    std::vector<double> v(s, 0.0);
    v[options.start_index] = 1.0;
    std::vector<double> next(s);
    std::size_t it = 0;
    while (it < options.max_iterations) {
        step(v, next);
        ++it;
        const double total = std::accumulate(next.begin(), next.end(), 0.0);
        for (double& x : next) x /= total;
        const double change = max_abs_diff(next, v);
        v.swap(next);
        if (change < options.step_tolerance) break;
    }

    step(v, next);
    const double residual = max_abs_diff(next, v);
    if (!(residual < options.residual_tolerance)) {
        throw ConvergenceError("power iteration did not converge after " + std::to_string(it) +
                                   " iterations (residual " + std::to_string(residual) + ")",
                               residual, it);
    }
    return RankingVector{std::move(v), it, residual};
}

std::vector<std::size_t> select_top_n(const RankingVector& ranking, std::size_t n_keep) {
    const std::size_t s = ranking.size();
    if (n_keep < 1 || n_keep > s) {
        throw std::invalid_argument("top-N must be in [1, " + std::to_string(s) + "], got " +
                                    std::to_string(n_keep));
    }
    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ranking.weights[a] > ranking.weights[b];
    });
    order.resize(n_keep);
    return order;
}

std::vector<double> weighted_scores(const BinaryMembershipMatrix& membership, const RankingVector& ranking,
                                    std::span<const std::size_t> keep, bool renormalize) {
    const std::size_t s = membership.sources();
    const std::size_t n = membership.instances();
    check_ranking_size(ranking, s);
    if (keep.empty()) throw std::invalid_argument("weighted vote needs at least one source");
    std::vector<bool> used(s, false);
    double kept_mass = 0.0;
    for (std::size_t i : keep) {
        if (i >= s || used[i]) throw std::invalid_argument("kept source indices must be distinct and in range");
        used[i] = true;
        kept_mass += ranking.weights[i];
    }
    const double scale = (renormalize && keep.size() < s) ? 1.0 / kept_mass : 1.0;

    std::vector<double> scores(n, 0.0);
    for (std::size_t i : keep) {
        const double w = ranking.weights[i] * scale;
        const auto row = membership.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            // 1 -> 1, 0 -> 0, missing (-1) -> 0.5
            const double m = static_cast<double>(row[j]) + 1.5 * static_cast<double>(row[j] < 0);
            scores[j] += w * m;
        }
    }
    // Rounding can push a full-weight sum a few ulps past 1.
    for (double& x : scores) x = std::clamp(x, 0.0, 1.0);
    return scores;
}

OpinionRankResult rank_opinions(const OpinionMatrix& opinions, const OpinionRankOptions& options) {
    const Task task = options.task.value_or(default_task(opinions.classes()));
    if (task == Task::binary && opinions.classes() != 2) {
        throw std::invalid_argument("binary task needs exactly two classes, got " +
                                    std::to_string(opinions.classes()));
    }
    check_top_n(options, opinions.sources());

    std::vector<ClassId> passes;
    if (task == Task::binary) {
        passes.push_back(1);
    } else {
        passes.resize(opinions.classes());
        std::iota(passes.begin(), passes.end(), ClassId{0});
    }

    OpinionRankResult result{WeightedScores(task, passes.size(), opinions.instances()), {}};
    result.rankings.reserve(passes.size());
    for (std::size_t r = 0; r < passes.size(); ++r) {
        const auto membership = build_membership_matrix(opinions, passes[r]);
        result.rankings.push_back(rank_class(membership, options, result.scores.row(r)));
    }
    return result;
}

OpinionRankResult rank_memberships(std::span<const BinaryMembershipMatrix> memberships,
                                   const OpinionRankOptions& options) {
    if (memberships.empty()) throw std::invalid_argument("need at least one membership matrix");
    const std::size_t s = memberships.front().sources();
    const std::size_t n = memberships.front().instances();
    for (const auto& m : memberships) {
        if (m.sources() != s || m.instances() != n) {
            throw std::invalid_argument("membership matrices must share dimensions");
        }
    }
    check_top_n(options, s);

    OpinionRankResult result{WeightedScores(Task::multilabel, memberships.size(), n), {}};
    for (std::size_t r = 0; r < memberships.size(); ++r) {
        result.rankings.push_back(rank_class(memberships[r], options, result.scores.row(r)));
    }
    return result;
}

WeightedScores opinion_rank(const OpinionMatrix& opinions, const OpinionRankOptions& options) {
    return rank_opinions(opinions, options).scores;
}

LabelDecisions decide_labels(const WeightedScores& scores) {
    const std::size_t n = scores.instances();
    LabelDecisions out;
    out.task = scores.task();
    out.rows = scores.rows();
    out.instances = n;
    switch (scores.task()) {
        case Task::binary: {
            out.labels.resize(n);
            const auto row = scores.row(0);
            for (std::size_t j = 0; j < n; ++j) out.labels[j] = row[j] >= 0.5 ? 1 : 0;
            break;
        }
        case Task::multinomial: {
            out.labels.assign(n, 0);
            for (std::size_t j = 0; j < n; ++j) {
                double best = scores.at(0, j);
                for (std::size_t c = 1; c < scores.rows(); ++c) {
                    if (scores.at(c, j) > best) {
                        best = scores.at(c, j);
                        out.labels[j] = static_cast<ClassId>(c);
                    }
                }
            }
            break;
        }
        case Task::multilabel: {
            out.memberships.resize(scores.rows() * n);
            for (std::size_t c = 0; c < scores.rows(); ++c) {
                const auto row = scores.row(c);
                for (std::size_t j = 0; j < n; ++j) out.memberships[c * n + j] = row[j] >= 0.5 ? 1 : 0;
            }
            break;
        }
    }
    return out;
}

}  // namespace opinionrank
