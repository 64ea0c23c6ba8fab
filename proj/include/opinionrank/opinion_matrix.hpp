#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace opinionrank {

// Dense class index in [0, k). Negative values never denote a class.
using ClassId = std::int32_t;

inline constexpr ClassId kMissing = -1;

enum class Task : std::uint8_t {
    binary,       // k = 2, one pass over the positive class (id 1)
    multinomial,  // one pass per class, argmax decision
    multilabel,   // one pass per class, independent thresholds
};

std::string_view to_string(Task task) noexcept;
Task parse_task(std::string_view name);

// s x n grid of categorical opinions. Row i holds the labels given by source i.
class OpinionMatrix {
public:
    OpinionMatrix(std::size_t sources, std::size_t instances, std::size_t classes);
    // cells are row-major (source-major) and validated against `classes`.
    OpinionMatrix(std::size_t sources, std::size_t instances, std::size_t classes,
                  std::vector<ClassId> cells);
    // Convenience for tests and small inputs: one inner vector per source.
    static OpinionMatrix from_rows(const std::vector<std::vector<ClassId>>& rows,
                                   std::size_t classes);

    std::size_t sources() const noexcept { return sources_; }
    std::size_t instances() const noexcept { return instances_; }
    std::size_t classes() const noexcept { return classes_; }

    ClassId at(std::size_t source, std::size_t instance) const;
    void set(std::size_t source, std::size_t instance, ClassId label);
    bool missing(std::size_t source, std::size_t instance) const { return at(source, instance) == kMissing; }

    std::span<const ClassId> row(std::size_t source) const;
    std::span<const ClassId> cells() const noexcept { return cells_; }

    // Copy with sources reordered so that new row r is old row order[r].
    OpinionMatrix permute_sources(std::span<const std::size_t> order) const;

    friend bool operator==(const OpinionMatrix&, const OpinionMatrix&) = default;

private:
    std::size_t sources_;
    std::size_t instances_;
    std::size_t classes_;
    std::vector<ClassId> cells_;
};

}  // namespace opinionrank
