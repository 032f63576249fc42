#include "gak/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "gak/errors.hpp"

namespace gak {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double SvmBinaryModel::decision(std::span<const double> kernel_column) const {
    if (kernel_column.size() != alphas.size())
        throw ValidationError("kernel column has " + std::to_string(kernel_column.size()) +
                              " entries, model has " + std::to_string(alphas.size()));
    double f = bias;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        if (alphas[i] != 0.0) f += alphas[i] * targets[i] * kernel_column[i];
    return f;
}

double dual_objective(const Matrix& gram, std::span<const int> targets, std::span<const double> alphas) {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        lin += alphas[i];
        if (alphas[i] == 0.0) continue;
        for (std::size_t j = 0; j < alphas.size(); ++j)
            quad += alphas[i] * alphas[j] * targets[i] * targets[j] * gram(i, j);
    }
    return lin - 0.5 * quad;
}

SvmBinaryModel train_binary(const Matrix& gram, std::span<const int> targets, double C,
                            const SmoOptions& options) {
    const std::size_t n = targets.size();
    if (gram.rows() != n || gram.cols() != n)
        throw ValidationError("gram is " + std::to_string(gram.rows()) + "x" + std::to_string(gram.cols()) +
                              " but there are " + std::to_string(n) + " targets");
    if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError("C must be positive and finite");
    bool has_pos = false, has_neg = false;
    for (int t : targets) {
        if (t == 1) has_pos = true;
        else if (t == -1) has_neg = true;
        else throw ValidationError("targets must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw ValidationError("targets contain a single class");

    auto Q = [&](std::size_t i, std::size_t j) { return targets[i] * targets[j] * gram(i, j); };

    SvmBinaryModel model;
    model.C = C;
    model.targets.assign(targets.begin(), targets.end());
    std::vector<double>& alpha = model.alphas;
    alpha.assign(n, 0.0);
    // Gradient of 1/2 a'Qa - e'a.
    std::vector<double> grad(n, -1.0);

    auto in_up = [&](std::size_t i) { return targets[i] == 1 ? alpha[i] < C : alpha[i] > 0.0; };
    auto in_low = [&](std::size_t i) { return targets[i] == 1 ? alpha[i] > 0.0 : alpha[i] < C; };
    auto objective = [&] {
        double f = 0.0;
        for (std::size_t i = 0; i < n; ++i) f += alpha[i] * (grad[i] - 1.0);
        return -0.5 * f;  // dual value = -(1/2 a'Qa - e'a)
    };

    std::size_t iter = 0;
    bool converged = false;
    for (; iter < options.max_iterations; ++iter) {
        double g_max = -std::numeric_limits<double>::infinity();
        double g_min = std::numeric_limits<double>::infinity();
        std::size_t i = n, j = n;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = -targets[k] * grad[k];
            if (in_up(k) && v > g_max) { g_max = v; i = k; }
            if (in_low(k) && v < g_min) { g_min = v; j = k; }
        }
        if (i == n || j == n || g_max - g_min <= options.tolerance) {
            converged = true;
            break;
        }

        const double old_ai = alpha[i], old_aj = alpha[j];
        if (targets[i] != targets[j]) {
            double quad = gram(i, i) + gram(j, j) + 2.0 * Q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
            } else {
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
            }
            if (diff > 0.0) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
            } else {
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
            }
        } else {
            double quad = gram(i, i) + gram(j, j) - 2.0 * Q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
                if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
            } else {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
                if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
            }
        }

        const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
        for (std::size_t k = 0; k < n; ++k) grad[k] += Q(k, i) * dai + Q(k, j) * daj;
        if (options.track_objective) model.objective_trace.push_back(objective());
    }
    model.iterations = iter;
    model.converged = converged;
    if (!converged && !options.allow_nonconverged)
        throw ConvergenceError("SMO did not converge within " + std::to_string(options.max_iterations) +
                               " iterations (C = " + std::to_string(C) + ")");

    // Bias from free vectors, or the midpoint of the feasible interval.
    double sum_free = 0.0, ub = std::numeric_limits<double>::infinity(),
           lb = -std::numeric_limits<double>::infinity();
    std::size_t n_free = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double yg = targets[k] * grad[k];
        if (alpha[k] >= C) {
            if (targets[k] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[k] <= 0.0) {
            if (targets[k] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    model.bias = -rho;
    return model;
}

OvaModel train_ova(const Matrix& gram, std::span<const std::string> item_labels,
                   std::span<const std::string> train_ids, double C, const SmoOptions& options) {
    if (item_labels.size() != gram.rows())
        throw ValidationError("label count does not match gram size");
    if (train_ids.size() != gram.rows()) throw ValidationError("id count does not match gram size");
    const std::set<std::string> distinct(item_labels.begin(), item_labels.end());
    if (distinct.size() < 2) throw ValidationError("one-vs-all needs at least two labels");

    OvaModel model;
    model.labels.assign(distinct.begin(), distinct.end());
    model.train_ids.assign(train_ids.begin(), train_ids.end());
    std::vector<int> targets(item_labels.size());
    for (const auto& label : model.labels) {
        for (std::size_t i = 0; i < item_labels.size(); ++i) targets[i] = item_labels[i] == label ? 1 : -1;
        auto bin = train_binary(gram, targets, C, options);
        bin.positive_label = label;
        model.binaries.push_back(std::move(bin));
    }
    return model;
}

Matrix decision_values(const OvaModel& model, const Matrix& cross) {
    if (cross.rows() != model.train_ids.size())
        throw ValidationError("cross-gram has " + std::to_string(cross.rows()) + " rows, model has " +
                              std::to_string(model.train_ids.size()) + " training items");
    Matrix out(cross.cols(), model.labels.size());
    std::vector<double> column(cross.rows());
    for (std::size_t t = 0; t < cross.cols(); ++t) {
        for (std::size_t i = 0; i < cross.rows(); ++i) column[i] = cross(i, t);
        for (std::size_t c = 0; c < model.binaries.size(); ++c) out(t, c) = model.binaries[c].decision(column);
    }
    return out;
}

std::vector<std::string> predict(const OvaModel& model, const Matrix& cross) {
    const Matrix f = decision_values(model, cross);
    std::vector<std::string> out;
    out.reserve(f.rows());
    for (std::size_t t = 0; t < f.rows(); ++t) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < f.cols(); ++c)
            if (f(t, c) > f(t, best)) best = c;
        out.push_back(model.labels[best]);
    }
    return out;
}

std::vector<std::string> predict(const OvaModel& model, const CrossGram& cross) {
    if (cross.row_ids != model.train_ids)
        throw ValidationError("cross-gram rows are not aligned with the model's training ids");
    return predict(model, cross.values);
}

}  // namespace gak
