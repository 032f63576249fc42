#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gak/gram.hpp"
#include "gak/matrix.hpp"

namespace gak {

struct SmoOptions {
    double tolerance = 1e-3;              // max KKT violation at convergence
    std::size_t max_iterations = 100000;
    bool allow_nonconverged = false;      // otherwise ConvergenceError
    bool track_objective = false;         // fill SvmBinaryModel::objective_trace
};

/// Soft-margin dual solution over a precomputed kernel:
///   f(x) = sum_i alphas[i] * targets[i] * K(x_i, x) + bias
struct SvmBinaryModel {
    std::vector<double> alphas;
    std::vector<int> targets;  // +1 / -1
    double bias = 0.0;
    std::string positive_label;
    double C = 1.0;
    std::size_t iterations = 0;
    bool converged = true;
    std::vector<double> objective_trace;  // dual objective after each step

    /// Decision value from one column of kernel values against the training items.
    double decision(std::span<const double> kernel_column) const;
};

/// Dual value  sum(alpha) - 1/2 sum_ij alpha_i alpha_j t_i t_j K_ij.
double dual_objective(const Matrix& gram, std::span<const int> targets, std::span<const double> alphas);

/// SMO with the maximal-violating-pair working set. The gram matrix is
/// expected to be PSD (regularize it first); a non-positive curvature along
/// the chosen pair is clamped to a small positive value.
SvmBinaryModel train_binary(const Matrix& gram, std::span<const int> targets, double C,
                            const SmoOptions& options = {});

struct OvaModel {
    std::vector<std::string> labels;       // sorted, unique
    std::vector<SvmBinaryModel> binaries;  // one per label
    std::vector<std::string> train_ids;
};

/// One binary problem per label (that label +1, the rest -1).
OvaModel train_ova(const Matrix& gram, std::span<const std::string> item_labels,
                   std::span<const std::string> train_ids, double C, const SmoOptions& options = {});

inline OvaModel train_ova(const GramMatrix& gram, std::span<const std::string> item_labels, double C,
                          const SmoOptions& options = {}) {
    return train_ova(gram.values, item_labels, gram.ids, C, options);
}

/// Decision values, one row per test item and one column per label.
Matrix decision_values(const OvaModel& model, const Matrix& cross);

/// argmax over labels of the decision value; ties go to the earliest label.
std::vector<std::string> predict(const OvaModel& model, const Matrix& cross);

/// Checks that cross.row_ids matches the model's training ids.
std::vector<std::string> predict(const OvaModel& model, const CrossGram& cross);

}  // namespace gak
