#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "opinionrank/core.hpp"
#include "opinionrank/errors.hpp"

namespace opinionrank {
namespace {

constexpr ClassId M = kMissing;
constexpr std::int8_t A = BinaryMembershipMatrix::kAbsent;

BinaryMembershipMatrix membership(const std::vector<std::vector<std::int8_t>>& rows, ClassId class_id = 1) {
    std::vector<std::int8_t> cells;
    for (const auto& r : rows) cells.insert(cells.end(), r.begin(), r.end());
    return BinaryMembershipMatrix(rows.size(), rows.front().size(), class_id, cells);
}

RankingVector ranking_of(std::vector<double> w) {
    RankingVector r;
    r.weights = std::move(w);
    return r;
}

CorroborationMatrix corr_of(std::size_t s, std::vector<double> probs) { return CorroborationMatrix{s, std::move(probs)}; }

// ---------------------------------------------------------------------------
// build_membership_matrix

TEST(MembershipMatrix, MarksTheRequestedClass) {
    const auto m = build_membership_matrix(OpinionMatrix::from_rows({{0, 1}, {0, 0}}, 2), 0);
    EXPECT_EQ(m, membership({{1, 0}, {1, 1}}, 0));
}

TEST(MembershipMatrix, MissingPassesThrough) {
    const auto m = build_membership_matrix(OpinionMatrix::from_rows({{2, M, 2}}, 3), 2);
    EXPECT_EQ(m, membership({{1, A, 1}}, 2));
}

TEST(MembershipMatrix, NoMemberGivesZeros) {
    const auto m = build_membership_matrix(OpinionMatrix::from_rows({{1, 1}, {1, 1}}, 2), 0);
    EXPECT_EQ(m, membership({{0, 0}, {0, 0}}, 0));
}

TEST(MembershipMatrix, RejectsClassOutOfRange) {
    const auto o = OpinionMatrix::from_rows({{0, 1}}, 2);
    EXPECT_THROW(build_membership_matrix(o, 2), std::invalid_argument);
    EXPECT_THROW(build_membership_matrix(o, -1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// count_agreements

TEST(AgreementCounts, MatchesHandCount) {
    const auto c = count_agreements(membership({{1, 1, 0, 0}, {1, 1, 0, 1}, {0, 1, 1, 1}}));
    const std::vector<std::int64_t> expected{4, 3, 1, 3, 4, 2, 1, 2, 4};
    EXPECT_EQ(c.sources, 3u);
    EXPECT_EQ(c.instances, 4u);
    EXPECT_EQ(c.counts, expected);
}

TEST(AgreementCounts, IdenticalCompleteRowsAgreeEverywhere) {
    const auto c = count_agreements(membership({{1, 0, 1, 1, 0}, {1, 0, 1, 1, 0}, {1, 0, 1, 1, 0}}));
    for (auto v : c.counts) EXPECT_EQ(v, 5);
}

TEST(AgreementCounts, MissingSourceAgreesWithNobodyIncludingItself) {
    const auto c = count_agreements(membership({{1, 0, 1}, {A, A, A}, {1, 1, 1}}));
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(c.at(1, j), 0);
        EXPECT_EQ(c.at(j, 1), 0);
    }
    EXPECT_EQ(c.at(0, 2), 2);
}

TEST(AgreementCounts, MissingCellsCountNoAgreement) {
    const auto c = count_agreements(membership({{1, A, 0}, {1, A, 0}}));
    EXPECT_EQ(c.at(0, 0), 2);
    EXPECT_EQ(c.at(0, 1), 2);
}

TEST(AgreementCounts, LongRowsMatchNaiveCount) {
    // Exceeds the inner accumulation block so block flushing is exercised.
    const std::size_t n = 200000;
    std::vector<std::int8_t> cells(2 * n);
    std::int64_t expected = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<std::int8_t>(i % 3 == 0 ? A : (i / 7) % 2);
        const auto b = static_cast<std::int8_t>((i / 5) % 2);
        cells[i] = a;
        cells[n + i] = b;
        expected += a >= 0 && a == b;
    }
    const auto c = count_agreements(BinaryMembershipMatrix(2, n, 1, cells));
    EXPECT_EQ(c.at(0, 1), expected);
    EXPECT_EQ(c.at(1, 0), expected);
    EXPECT_EQ(c.at(1, 1), static_cast<std::int64_t>(n));
}

// ---------------------------------------------------------------------------
// to_stochastic

TEST(ToStochastic, ZeroCountsGiveUniformRows) {
    const auto p = to_stochastic(AgreementCounts{4, 7, std::vector<std::int64_t>(16, 0)});
    for (double v : p.probs) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(ToStochastic, RowMatchesScalarSoftmax) {
    const auto p = to_stochastic(AgreementCounts{3, 4, {4, 3, 1, 3, 4, 2, 1, 2, 4}});
    const double e0 = std::exp(1.0), e1 = std::exp(0.75), e2 = std::exp(0.25);
    const double z = e0 + e1 + e2;
    EXPECT_NEAR(p.at(0, 0), e0 / z, 1e-15);
    EXPECT_NEAR(p.at(0, 1), e1 / z, 1e-15);
    EXPECT_NEAR(p.at(0, 2), e2 / z, 1e-15);
}

TEST(ToStochastic, IdenticalRowsGiveUniformMatrix) {
    const auto p = to_stochastic(count_agreements(membership({{1, 0, 1}, {1, 0, 1}, {1, 0, 1}})));
    for (double v : p.probs) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(ToStochastic, ScalesByInstanceCount) {
    const std::int64_t n = 1'000'000;
    const auto p = to_stochastic(AgreementCounts{2, n, {n, 0, 0, n}});
    const double e = std::exp(1.0);
    EXPECT_NEAR(p.at(0, 0), e / (e + 1.0), 1e-15);
    EXPECT_NEAR(p.at(0, 1), 1.0 / (e + 1.0), 1e-15);
}

// ---------------------------------------------------------------------------
// dominant_eigenvector

TEST(DominantEigenvector, UniformIsStationary) {
    const auto v = dominant_eigenvector(corr_of(5, std::vector<double>(25, 0.2)));
    for (double w : v.weights) EXPECT_NEAR(w, 0.2, 1e-12);
}

TEST(DominantEigenvector, TwoStateChain) {
    const auto v = dominant_eigenvector(corr_of(2, {0.9, 0.1, 0.2, 0.8}));
    EXPECT_NEAR(v.weights[0], 2.0 / 3.0, 1e-10);
    EXPECT_NEAR(v.weights[1], 1.0 / 3.0, 1e-10);
    EXPECT_LT(v.residual, 1e-10);
}

TEST(DominantEigenvector, RelabelingPermutesTheVector) {
    const std::vector<double> c{0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.25, 0.25, 0.5};
    const std::vector<std::size_t> sigma{2, 0, 1};  // new index r = old sigma[r]
    std::vector<double> permuted(9);
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t q = 0; q < 3; ++q) permuted[r * 3 + q] = c[sigma[r] * 3 + sigma[q]];
    }
    const auto v = dominant_eigenvector(corr_of(3, c));
    const auto u = dominant_eigenvector(corr_of(3, permuted));
    for (std::size_t r = 0; r < 3; ++r) EXPECT_NEAR(u.weights[r], v.weights[sigma[r]], 1e-10);
}

TEST(DominantEigenvector, SingleSource) {
    const auto v = dominant_eigenvector(corr_of(1, {1.0}));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_DOUBLE_EQ(v.weights[0], 1.0);
}

TEST(DominantEigenvector, TooSmallBudgetRaisesConvergenceError) {
    PowerIterationOptions options;
    options.max_iterations = 1;
    try {
        dominant_eigenvector(corr_of(2, {0.9, 0.1, 0.2, 0.8}), options);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.residual(), 1e-10);
        EXPECT_EQ(e.iterations(), 1u);
    }
}

TEST(DominantEigenvector, RejectsBadOptions) {
    PowerIterationOptions options;
    options.max_iterations = 0;
    EXPECT_THROW(dominant_eigenvector(corr_of(2, {0.5, 0.5, 0.5, 0.5}), options), std::invalid_argument);
    options = {};
    options.start_index = 2;
    EXPECT_THROW(dominant_eigenvector(corr_of(2, {0.5, 0.5, 0.5, 0.5}), options), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// select_top_n

TEST(SelectTopN, AllSources) {
    EXPECT_EQ(select_top_n(ranking_of({0.1, 0.6, 0.3}), 3), (std::vector<std::size_t>{1, 2, 0}));
}

TEST(SelectTopN, SortsByWeight) {
    EXPECT_EQ(select_top_n(ranking_of({0.5, 0.2, 0.3}), 2), (std::vector<std::size_t>{0, 2}));
}

TEST(SelectTopN, TieGoesToLowerIndex) {
    EXPECT_EQ(select_top_n(ranking_of({0.4, 0.4, 0.2}), 1), (std::vector<std::size_t>{0}));
}

TEST(SelectTopN, RejectsOutOfRange) {
    EXPECT_THROW(select_top_n(ranking_of({0.5, 0.5}), 0), std::invalid_argument);
    EXPECT_THROW(select_top_n(ranking_of({0.5, 0.5}), 3), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// weighted_scores

TEST(WeightedScoresOp, UniformWeightsGiveVoteFraction) {
    const auto m = membership({{1, 0, 1}, {1, 0, 0}, {1, 1, 0}, {0, 0, 0}});
    const std::vector<std::size_t> keep{0, 1, 2, 3};
    const auto s = weighted_scores(m, ranking_of({0.25, 0.25, 0.25, 0.25}), keep);
    EXPECT_DOUBLE_EQ(s[0], 0.75);
    EXPECT_DOUBLE_EQ(s[1], 0.25);
    EXPECT_DOUBLE_EQ(s[2], 0.25);
}

TEST(WeightedScoresOp, MissingCountsAsHalf) {
    const std::vector<std::size_t> keep{0};
    const auto s = weighted_scores(membership({{A, 1}}), ranking_of({1.0}), keep);
    EXPECT_DOUBLE_EQ(s[0], 0.5);
    EXPECT_DOUBLE_EQ(s[1], 1.0);
}

TEST(WeightedScoresOp, DotProduct) {
    const std::vector<std::size_t> keep{0, 1, 2};
    const auto s = weighted_scores(membership({{1}, {0}, {1}}), ranking_of({0.6, 0.3, 0.1}), keep);
    EXPECT_NEAR(s[0], 0.7, 1e-15);
}

TEST(WeightedScoresOp, SubsetIsRenormalizedUnlessRaw) {
    const auto m = membership({{1}, {0}, {1}});
    const std::vector<std::size_t> keep{0, 1};
    const auto v = ranking_of({0.6, 0.3, 0.1});
    EXPECT_NEAR(weighted_scores(m, v, keep)[0], 0.6 / 0.9, 1e-15);
    EXPECT_NEAR(weighted_scores(m, v, keep, false)[0], 0.6, 1e-15);
}

// ---------------------------------------------------------------------------
// rank_opinions / opinion_rank

TEST(OpinionRank, UnanimousSourcesGiveIndicators) {
    const auto o = OpinionMatrix::from_rows({{0, 2, 1, 2}, {0, 2, 1, 2}, {0, 2, 1, 2}}, 3);
    const auto scores = opinion_rank(o);
    ASSERT_EQ(scores.task(), Task::multinomial);
    ASSERT_EQ(scores.rows(), 3u);
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_NEAR(scores.at(c, i), o.at(0, i) == static_cast<ClassId>(c) ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(OpinionRank, InvertedSourceIsRankedLowest) {
    const std::vector<ClassId> honest{1, 0, 0, 1, 1, 0, 1, 0};
    std::vector<ClassId> inverted;
    for (auto x : honest) inverted.push_back(1 - x);
    const auto o = OpinionMatrix::from_rows({honest, honest, inverted, honest, honest}, 2);
    const auto result = rank_opinions(o);
    ASSERT_EQ(result.rankings.size(), 1u);
    const auto& w = result.rankings[0].ranking.weights;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (j != 2) {
            EXPECT_LT(w[2], w[j]);
        }
    }
}

TEST(OpinionRank, BinaryRunsOnePositivePass) {
    const auto o = OpinionMatrix::from_rows({{1, 0, 1}, {1, 1, 0}}, 2);
    const auto result = rank_opinions(o);
    EXPECT_EQ(result.scores.task(), Task::binary);
    EXPECT_EQ(result.scores.rows(), 1u);
    EXPECT_EQ(result.rankings[0].class_id, 1);
}

TEST(OpinionRank, MultinomialOnTwoClassesRunsTwoPasses) {
    OpinionRankOptions options;
    options.task = Task::multinomial;
    const auto result = rank_opinions(OpinionMatrix::from_rows({{1, 0, 1}, {1, 1, 0}}, 2), options);
    EXPECT_EQ(result.scores.rows(), 2u);
}

TEST(OpinionRank, BinaryTaskNeedsTwoClasses) {
    OpinionRankOptions options;
    options.task = Task::binary;
    EXPECT_THROW(rank_opinions(OpinionMatrix::from_rows({{0, 1, 2}}, 3), options), std::invalid_argument);
}

TEST(OpinionRank, SingleSourceCopiesOpinionsWithMissingAsHalf) {
    const auto scores = opinion_rank(OpinionMatrix::from_rows({{1, M, 0}}, 2));
    EXPECT_DOUBLE_EQ(scores.at(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(scores.at(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(scores.at(0, 2), 0.0);
}

TEST(OpinionRank, TopNKeepsRankedSources) {
    const std::vector<ClassId> honest{1, 0, 0, 1, 1, 0};
    const std::vector<ClassId> noisy{0, 1, 0, 1, 0, 0};
    OpinionRankOptions options;
    options.top_n = 2;
    const auto result = rank_opinions(OpinionMatrix::from_rows({noisy, honest, honest}, 2), options);
    EXPECT_EQ(result.rankings[0].kept, (std::vector<std::size_t>{1, 2}));
    for (std::size_t i = 0; i < honest.size(); ++i) EXPECT_NEAR(result.scores.at(0, i), honest[i], 1e-12);
}

TEST(OpinionRank, TopNOutOfRangeIsRejected) {
    OpinionRankOptions options;
    options.top_n = 3;
    EXPECT_THROW(rank_opinions(OpinionMatrix::from_rows({{0, 1}, {1, 1}}, 2), options), std::invalid_argument);
}

TEST(OpinionRank, RankMembershipsIsMultilabel) {
    // Source 0 tags instance 0 with both classes.
    const std::vector<BinaryMembershipMatrix> m{membership({{1, 0}, {1, 0}}, 0), membership({{1, 1}, {0, 1}}, 1)};
    const auto result = rank_memberships(m);
    EXPECT_EQ(result.scores.task(), Task::multilabel);
    const auto d = decide_labels(result.scores);
    EXPECT_TRUE(d.member(0, 0));
    EXPECT_FALSE(d.member(0, 1));
    EXPECT_TRUE(d.member(1, 0));  // 0.5 meets the threshold
    EXPECT_TRUE(d.member(1, 1));
}

// ---------------------------------------------------------------------------
// decide_labels

TEST(DecideLabels, BinaryThreshold) {
    WeightedScores s(Task::binary, 1, 3);
    s.row(0)[0] = 0.7;
    s.row(0)[1] = 0.3;
    s.row(0)[2] = 0.5;
    const auto d = decide_labels(s);
    EXPECT_EQ(d.labels, (std::vector<ClassId>{1, 0, 1}));
}

TEST(DecideLabels, MultinomialArgmax) {
    WeightedScores s(Task::multinomial, 3, 2);
    s.row(0)[0] = 0.2, s.row(1)[0] = 0.5, s.row(2)[0] = 0.3;
    s.row(0)[1] = 0.4, s.row(1)[1] = 0.2, s.row(2)[1] = 0.4;
    const auto d = decide_labels(s);
    EXPECT_EQ(d.labels, (std::vector<ClassId>{1, 0}));
}

TEST(DecideLabels, MultilabelThresholdsEachRow) {
    WeightedScores s(Task::multilabel, 2, 2);
    s.row(0)[0] = 0.5, s.row(0)[1] = 0.49;
    s.row(1)[0] = 0.9, s.row(1)[1] = 0.1;
    const auto d = decide_labels(s);
    EXPECT_TRUE(d.labels.empty());
    EXPECT_EQ(d.memberships, (std::vector<std::uint8_t>{1, 0, 1, 0}));
}

TEST(WeightedScoresType, BinaryHasOneRow) {
    EXPECT_THROW(WeightedScores(Task::binary, 2, 3), std::invalid_argument);
}

TEST(TaskNames, RoundTrip) {
    for (Task t : {Task::binary, Task::multinomial, Task::multilabel}) EXPECT_EQ(parse_task(to_string(t)), t);
    EXPECT_THROW(parse_task("ternary"), std::invalid_argument);
    EXPECT_EQ(default_task(2), Task::binary);
    EXPECT_EQ(default_task(3), Task::multinomial);
}

TEST(OpinionMatrixType, ValidatesCells) {
    EXPECT_THROW(OpinionMatrix(1, 2, 2, {0, 2}), std::invalid_argument);
    EXPECT_THROW(OpinionMatrix(1, 2, 2, {0, -2}), std::invalid_argument);
    EXPECT_THROW(OpinionMatrix(1, 2, 1), std::invalid_argument);
    EXPECT_THROW(OpinionMatrix(0, 2, 2), std::invalid_argument);
    EXPECT_NO_THROW(OpinionMatrix(1, 2, 2, {0, M}));
}

}  // namespace
}  // namespace opinionrank
