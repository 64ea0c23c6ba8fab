#pragma once

// Delimited-text readers and writers for annotation matrices, truth labels,
// and aggregation outputs.
//
// Annotation file layout (comma-delimited, UTF-8):
//
//   #classes=duck,not_duck          optional alphabet directive
//   image,alice,bob,carol            header: instance column, one column per source
//   img1,duck,duck,                  empty cell = missing label
//   img2,not_duck,duck,not_duck
//
// Rows are instances. Without a directive, class ids follow first appearance
// in reading order.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opinionrank/core.hpp"
#include "opinionrank/opinion_matrix.hpp"

namespace opinionrank {

// Bijection between class tokens and dense ids [0, k).
class ClassAlphabet {
public:
    ClassAlphabet() = default;
    explicit ClassAlphabet(std::vector<std::string> tokens);

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::string& token(ClassId id) const;
    std::optional<ClassId> find(std::string_view token) const;
    ClassId add(std::string token);
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    friend bool operator==(const ClassAlphabet&, const ClassAlphabet&) = default;

private:
    std::vector<std::string> tokens_;
};

struct AnnotationFileSpec {
    char delimiter = ',';
    std::string missing_token;  // empty cell by default
    // Declared alphabet. Takes the place of first-appearance discovery.
    std::optional<std::vector<std::string>> classes;
};

struct AnnotationTable {
    OpinionMatrix opinions;
    std::vector<std::string> instance_ids;
    std::vector<std::string> source_ids;
    ClassAlphabet alphabet;
};

AnnotationTable read_opinions(std::istream& in, const AnnotationFileSpec& spec = {});
AnnotationTable read_opinions(const std::filesystem::path& path, const AnnotationFileSpec& spec = {});

// Writes the alphabet directive so a re-read reproduces the same class ids.
void write_opinions(std::ostream& out, const AnnotationTable& table, const AnnotationFileSpec& spec = {});

// Two-column (instance id, label token) file with a header row.
struct LabelTable {
    std::vector<std::string> ids;
    std::vector<std::string> tokens;
};

LabelTable read_label_table(std::istream& in, char delimiter = ',');
LabelTable read_label_table(const std::filesystem::path& path, char delimiter = ',');

// Reorders `table` to follow `instance_ids`. Missing, extra, or duplicate ids
// raise ValidationError listing every offender.
std::vector<std::string> align_labels(const LabelTable& table, std::span<const std::string> instance_ids);

// Truth labels aligned to instance order and mapped through `alphabet`.
std::vector<ClassId> read_truth(std::istream& in, const ClassAlphabet& alphabet,
                                std::span<const std::string> instance_ids);
std::vector<ClassId> read_truth(const std::filesystem::path& path, const ClassAlphabet& alphabet,
                                std::span<const std::string> instance_ids);

// Token naming score row r.
std::string score_row_token(const OpinionRankResult& result, const ClassAlphabet& alphabet, std::size_t row);

void write_scores(std::ostream& out, const OpinionRankResult& result, const ClassAlphabet& alphabet,
                  std::span<const std::string> instance_ids);
void write_predictions(std::ostream& out, const LabelDecisions& decisions, const OpinionRankResult& result,
                       const ClassAlphabet& alphabet, std::span<const std::string> instance_ids);
void write_label_predictions(std::ostream& out, std::span<const ClassId> labels, const ClassAlphabet& alphabet,
                             std::span<const std::string> instance_ids);
void write_rankings(std::ostream& out, const OpinionRankResult& result, const ClassAlphabet& alphabet,
                    std::span<const std::string> source_ids);

struct ScoreTable {
    std::vector<std::string> row_tokens;
    std::vector<std::string> instance_ids;
    std::vector<double> values;  // row-major rows x instances

    double at(std::size_t row, std::size_t instance) const { return values[row * instance_ids.size() + instance]; }
};

ScoreTable read_scores(std::istream& in);

struct OutputPaths {
    std::filesystem::path scores;
    std::filesystem::path predictions;
    std::filesystem::path rankings;
};

// Writes scores.csv, predictions.csv and rankings.csv into `directory`,
// creating it if needed. Throws std::runtime_error when a file cannot be written.
OutputPaths write_outputs(const std::filesystem::path& directory, const OpinionRankResult& result,
                          const LabelDecisions& decisions, const AnnotationTable& table);

// Formats with 12 significant digits.
std::string format_real(double value);

}  // namespace opinionrank
