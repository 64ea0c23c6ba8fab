#include "opinionrank/opinion_matrix.hpp"

#include <stdexcept>
#include <string>

namespace opinionrank {

std::string_view to_string(Task task) noexcept {
    switch (task) {
        case Task::binary: return "binary";
        case Task::multinomial: return "multinomial";
        case Task::multilabel: return "multilabel";
    }
    return "unknown";
}

Task parse_task(std::string_view name) {
    if (name == "binary") return Task::binary;
    if (name == "multinomial") return Task::multinomial;
    if (name == "multilabel") return Task::multilabel;
    throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

OpinionMatrix::OpinionMatrix(std::size_t sources, std::size_t instances, std::size_t classes)
    : OpinionMatrix(sources, instances, classes, std::vector<ClassId>(sources * instances, kMissing)) {}

OpinionMatrix::OpinionMatrix(std::size_t sources, std::size_t instances, std::size_t classes,
                             std::vector<ClassId> cells)
    : sources_(sources), instances_(instances), classes_(classes), cells_(std::move(cells)) {
    if (sources_ == 0) throw std::invalid_argument("opinion matrix needs at least one source");
    if (instances_ == 0) throw std::invalid_argument("opinion matrix needs at least one instance");
    if (classes_ < 2) throw std::invalid_argument("opinion matrix needs at least two classes");
    if (cells_.size() != sources_ * instances_) {
        throw std::invalid_argument("opinion matrix cell count " + std::to_string(cells_.size()) +
                                    " does not match " + std::to_string(sources_) + "x" +
                                    std::to_string(instances_));
    }
    for (std::size_t idx = 0; idx < cells_.size(); ++idx) {
        const ClassId c = cells_[idx];
        if (c != kMissing && (c < 0 || static_cast<std::size_t>(c) >= classes_)) {
            throw std::invalid_argument("label " + std::to_string(c) + " at source " +
                                        std::to_string(idx / instances_) + ", instance " +
                                        std::to_string(idx % instances_) + " is outside [0, " +
                                        std::to_string(classes_) + ")");
        }
    }
}

OpinionMatrix OpinionMatrix::from_rows(const std::vector<std::vector<ClassId>>& rows,
                                       std::size_t classes) {
    if (rows.empty()) throw std::invalid_argument("opinion matrix needs at least one source");
    const std::size_t n = rows.front().size();
    std::vector<ClassId> cells;
    cells.reserve(rows.size() * n);
    for (const auto& r : rows) {
        if (r.size() != n) throw std::invalid_argument("opinion rows have different lengths");
        cells.insert(cells.end(), r.begin(), r.end());
    }
    return OpinionMatrix(rows.size(), n, classes, std::move(cells));
}

ClassId OpinionMatrix::at(std::size_t source, std::size_t instance) const {
    if (source >= sources_ || instance >= instances_) throw std::out_of_range("opinion matrix index");
    return cells_[source * instances_ + instance];
}

void OpinionMatrix::set(std::size_t source, std::size_t instance, ClassId label) {
    if (source >= sources_ || instance >= instances_) throw std::out_of_range("opinion matrix index");
    if (label != kMissing && (label < 0 || static_cast<std::size_t>(label) >= classes_)) {
        throw std::invalid_argument("label " + std::to_string(label) + " outside [0, " +
                                    std::to_string(classes_) + ")");
    }
    cells_[source * instances_ + instance] = label;
}

std::span<const ClassId> OpinionMatrix::row(std::size_t source) const {
    if (source >= sources_) throw std::out_of_range("opinion matrix source index");
    return std::span<const ClassId>(cells_).subspan(source * instances_, instances_);
}

OpinionMatrix OpinionMatrix::permute_sources(std::span<const std::size_t> order) const {
    if (order.size() != sources_) throw std::invalid_argument("permutation size mismatch");
    std::vector<bool> seen(sources_, false);
    std::vector<ClassId> cells;
    cells.reserve(cells_.size());
    for (std::size_t src : order) {
        if (src >= sources_ || seen[src]) throw std::invalid_argument("not a permutation");
        seen[src] = true;
        auto r = row(src);
        cells.insert(cells.end(), r.begin(), r.end());
    }
    return OpinionMatrix(sources_, instances_, classes_, std::move(cells));
}

}  // namespace opinionrank
