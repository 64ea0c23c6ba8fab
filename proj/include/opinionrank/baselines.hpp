#pragma once

// Reference aggregators: plurality vote and Dawid-Skene EM.

#include <cstddef>
#include <functional>
#include <vector>

#include "opinionrank/opinion_matrix.hpp"

namespace opinionrank {

struct MajorityVoteResult {
    std::vector<ClassId> labels;
    // Instances nobody labeled; they receive class 0.
    std::vector<std::size_t> unlabeled;
};

// Plurality over non-missing votes; ties go to the lowest class id.
MajorityVoteResult majority_vote(const OpinionMatrix& opinions);

struct DawidSkeneModel {
    std::size_t sources = 0;
    std::size_t classes = 0;
    std::size_t instances = 0;
    // confusion[(j * k + truth) * k + emitted]
    std::vector<double> confusion;
    std::vector<double> priors;
    // posteriors[i * k + c]
    std::vector<double> posteriors;
    // Objective after each E-step. This is the observed-data log-likelihood plus
    // the log-density of the additive-smoothing prior, which EM never decreases.
    std::vector<double> log_likelihood;
    std::size_t iterations = 0;

    double confusion_at(std::size_t source, ClassId truth, ClassId emitted) const {
        return confusion[(source * classes + static_cast<std::size_t>(truth)) * classes +
                         static_cast<std::size_t>(emitted)];
    }
    double posterior_at(std::size_t instance, ClassId c) const {
        return posteriors[instance * classes + static_cast<std::size_t>(c)];
    }
};

struct DawidSkeneOptions {
    std::size_t max_iterations = 100;
    double tolerance = 1e-7;
    double smoothing = 1e-9;
    // Called with the model after every EM iteration.
    std::function<void(const DawidSkeneModel&)> observer;
};

struct DawidSkeneResult {
    std::vector<ClassId> labels;
    std::vector<std::size_t> unlabeled;
    DawidSkeneModel model;
};

DawidSkeneResult dawid_skene(const OpinionMatrix& opinions, const DawidSkeneOptions& options = {});

}  // namespace opinionrank
