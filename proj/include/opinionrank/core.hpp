#pragma once

// Spectral ranking of label sources by mutual corroboration, and the weighted
// vote built on top of it.
//
// Pipeline per class:
//   opinions -> binary membership -> agreement counts -> row softmax
//            -> stationary distribution -> (top-N) -> weighted membership scores
//
// The stationary distribution of the corroboration chain is read as the relative
// reliability of each source. Nothing here estimates absolute reliability.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "opinionrank/opinion_matrix.hpp"

namespace opinionrank {

// Membership of each (source, instance) cell in one class.
class BinaryMembershipMatrix {
public:
    static constexpr std::int8_t kAbsent = -1;

    BinaryMembershipMatrix(std::size_t sources, std::size_t instances, ClassId class_id,
                           std::vector<std::int8_t> cells);

    std::size_t sources() const noexcept { return sources_; }
    std::size_t instances() const noexcept { return instances_; }
    ClassId class_id() const noexcept { return class_id_; }

    // 1, 0 or kAbsent.
    std::int8_t at(std::size_t source, std::size_t instance) const;
    std::span<const std::int8_t> row(std::size_t source) const;
    std::span<const std::int8_t> cells() const noexcept { return cells_; }

    friend bool operator==(const BinaryMembershipMatrix&, const BinaryMembershipMatrix&) = default;

private:
    std::size_t sources_;
    std::size_t instances_;
    ClassId class_id_;
    std::vector<std::int8_t> cells_;
};

// Symmetric s x s count of instances on which two sources give the same
// non-missing membership value. counts[i][i] is the number of labels source i gave.
struct AgreementCounts {
    std::size_t sources = 0;
    std::size_t instances = 0;
    std::vector<std::int64_t> counts;  // row-major s x s

    std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * sources + j]; }
};

// Row-stochastic, strictly positive transition matrix between sources.
struct CorroborationMatrix {
    std::size_t sources = 0;
    std::vector<double> probs;  // row-major s x s

    double at(std::size_t i, std::size_t j) const { return probs[i * sources + j]; }
};

// Stationary distribution of a corroboration chain: positive, sums to 1.
struct RankingVector {
    std::vector<double> weights;
    std::size_t iterations = 0;  // power-iteration steps taken
    double residual = 0.0;       // ||C^T v - v||_inf at exit

    std::size_t size() const noexcept { return weights.size(); }
};

// Class-membership scores in [0, 1]. Binary tasks store a single row holding
// the score of the positive class (id 1); other tasks store one row per class.
class WeightedScores {
public:
    WeightedScores(Task task, std::size_t rows, std::size_t instances);

    Task task() const noexcept { return task_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t instances() const noexcept { return instances_; }

    double at(std::size_t row, std::size_t instance) const;
    std::span<double> row(std::size_t r);
    std::span<const double> row(std::size_t r) const;

    friend bool operator==(const WeightedScores&, const WeightedScores&) = default;

private:
    Task task_;
    std::size_t rows_;
    std::size_t instances_;
    std::vector<double> scores_;
};

struct PowerIterationOptions {
    std::size_t max_iterations = 1000;   // P
    double step_tolerance = 1e-12;       // stop when ||v_t - v_{t-1}||_inf falls below
    double residual_tolerance = 1e-10;   // required ||C^T v - v||_inf on exit
    std::size_t start_index = 0;         // elementary start vector e_i
};

struct OpinionRankOptions {
    // Defaults to binary when k = 2 and multinomial otherwise.
    std::optional<Task> task;
    PowerIterationOptions power;
    // Sources kept in the weighted vote; all of them when unset.
    std::optional<std::size_t> top_n;
    // Rescale kept weights to sum to 1 when top_n < s. Off gives the raw partial sum.
    bool renormalize_top_n = true;
};

// Ranking computed for one class pass.
struct ClassRanking {
    ClassId class_id = 0;
    RankingVector ranking;
    std::vector<std::size_t> kept;  // sources retained in the vote, rank order
};

struct OpinionRankResult {
    WeightedScores scores;
    std::vector<ClassRanking> rankings;  // one per score row
};

// Per-instance decisions. `labels` is filled for binary and multinomial tasks;
// `memberships` (rows x n, row-major) for multilabel.
struct LabelDecisions {
    Task task = Task::binary;
    std::size_t rows = 0;
    std::size_t instances = 0;
    std::vector<ClassId> labels;
    std::vector<std::uint8_t> memberships;

    bool member(std::size_t row, std::size_t instance) const {
        return memberships[row * instances + instance] != 0;
    }
};

Task default_task(std::size_t classes) noexcept;

BinaryMembershipMatrix build_membership_matrix(const OpinionMatrix& opinions, ClassId class_id);

AgreementCounts count_agreements(const BinaryMembershipMatrix& membership);

CorroborationMatrix to_stochastic(const AgreementCounts& counts);

// Power iteration v <- C^T v from e_{start_index}. Throws ConvergenceError when
// the residual tolerance is not met within max_iterations.
RankingVector dominant_eigenvector(const CorroborationMatrix& corr,
                                   const PowerIterationOptions& options = {});

// Indices of the n_keep largest weights, descending; ties go to the lower index.
std::vector<std::size_t> select_top_n(const RankingVector& ranking, std::size_t n_keep);

// Weighted vote over `keep`; missing memberships count as 0.5.
std::vector<double> weighted_scores(const BinaryMembershipMatrix& membership,
                                    const RankingVector& ranking,
                                    std::span<const std::size_t> keep,
                                    bool renormalize = true);

// Full pipeline, keeping the per-class rankings.
OpinionRankResult rank_opinions(const OpinionMatrix& opinions, const OpinionRankOptions& options = {});

// Full pipeline over caller-built memberships, one matrix per class. This is
// the entry point for genuinely multilabel input where a source may assign
// several classes to one instance. Always a multilabel task.
OpinionRankResult rank_memberships(std::span<const BinaryMembershipMatrix> memberships,
                                   const OpinionRankOptions& options = {});

WeightedScores opinion_rank(const OpinionMatrix& opinions, const OpinionRankOptions& options = {});

LabelDecisions decide_labels(const WeightedScores& scores);

}  // namespace opinionrank
