#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace csvm {

// Labeled feature rows used for SVM training. Labels are +1 / -1.
struct PatchSet {
    std::size_t dim = 0;
    std::vector<float> features;  // count() x dim, row-major
    std::vector<int> labels;

    // Provenance of each row: source sample index and top-left patch corner.
    // Filled by the patch sampler; empty for feature sets built elsewhere.
    struct Origin {
        std::size_t sample = 0;
        int y = 0;
        int x = 0;
    };
    std::vector<Origin> origins;

    std::size_t count() const { return labels.size(); }
    const float* row(std::size_t i) const { return features.data() + i * dim; }
};

// L2-regularized squared-hinge linear SVM without a bias term:
//
//   F(w) = w'w + C * sum_i max(1 - y_i w'x_i, 0)^2
//
// Weights are stored in 32-bit floats like every other trained array;
// the solver itself works in 64-bit.
struct SvmModel {
    std::vector<float> weights;
    double penalty_c = 1.0;
    int iterations_run = 0;
    double final_objective = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  // objective after each accepted step
};

// Deterministic full-batch gradient descent with Armijo backtracking.
// Starts from w = 0; the objective never increases across iterations.
// Reports convergence once the gradient norm drops below tol * (1 + |w|);
// otherwise stops at max_iter or when the line search cannot make progress.
SvmModel train_l2svm(const PatchSet& data, double c, double tol = 1e-6, int max_iter = 1000);

// w'x with 64-bit accumulation.
double decision(const SvmModel& model, const float* x, std::size_t len);
double decision(const SvmModel& model, const std::vector<float>& x);

// +1 if the decision score is strictly positive, otherwise -1 (ties map to -1).
int predict(const SvmModel& model, const std::vector<float>& x);
int label_from_score(double score);

} // namespace csvm
