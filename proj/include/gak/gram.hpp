#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gak/dtw.hpp"
#include "gak/ground_kernel.hpp"
#include "gak/matrix.hpp"
#include "gak/timeseries.hpp"

namespace gak {

enum class KernelFamily { ga_log, ga_linear, dtw1, dtw2 };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Which sequence kernel a Gram matrix holds.
/// ga_*: `ground` is the local kernel. dtw2: ground.sigma is the Gaussian
/// width. dtw1: `ground` is unused.
struct KernelSelector {
    KernelFamily family = KernelFamily::ga_log;
    GroundKernelSpec ground = GroundKernelSpec::gaussian(1.0);
    std::optional<MeanMode> mean_mode;  // dtw families only; nullopt = size rule

    bool log_domain() const noexcept { return family == KernelFamily::ga_log; }
    bool uses_sigma() const noexcept { return family != KernelFamily::dtw1; }
    KernelSelector with_sigma(double sigma) const;
};

/// One kernel value between two series. ga_linear throws NotRepresentable
/// when K under- or overflows a double.
double evaluate_kernel(const KernelSelector& kernel, const TimeSeries& x, const TimeSeries& y);

struct Regularization {
    double lambda_min_before = 0.0;
    double shift_applied = 0.0;  // max(0, -lambda_min_before) when applied
};

struct GramMatrix {
    Matrix values;
    std::vector<std::string> ids;
    KernelSelector kernel;
    std::optional<Regularization> regularization;
};

struct CrossGram {
    Matrix values;  // train x test
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
};

/// Upper triangle evaluated (in parallel when workers > 1), then mirrored.
/// workers == 0 means hardware concurrency. The result does not depend on
/// the worker count.
GramMatrix build_gram(const LabeledDataset& ds, const KernelSelector& kernel, std::size_t workers = 1);

CrossGram build_cross_gram(const LabeledDataset& train, const LabeledDataset& test,
                           const KernelSelector& kernel, std::size_t workers = 1);

double min_eigenvalue(const Matrix& g);
inline double min_eigenvalue(const GramMatrix& g) { return min_eigenvalue(g.values); }

/// Adds -lambda_min * I when lambda_min < -1e-12 * max(1, max|g|); otherwise
/// returns g unchanged with a zero shift recorded.
GramMatrix regularize(const GramMatrix& g);

/// Regularizes a bare matrix; returns the record alongside.
Matrix regularize(const Matrix& g, Regularization* record = nullptr);

struct PsdReport {
    bool is_psd = false;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

/// is_psd = lambda_min >= -tol * max(1, spectral radius).
PsdReport psd_check(const Matrix& g, double tol);
inline PsdReport psd_check(const GramMatrix& g, double tol) { return psd_check(g.values, tol); }

nlohmann::json kernel_desc_json(const KernelSelector& kernel);
KernelSelector kernel_from_desc_json(const nlohmann::json& desc);

/// Writes `<base>.gram.csv` (full matrix) and `<base>.gram.json` (ids,
/// kernel_desc, regularization).
void write_gram(const std::filesystem::path& base, const GramMatrix& g);
GramMatrix read_gram(const std::filesystem::path& base);

namespace detail {
/// Runs fn(k) for k in [0, count) over `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);
std::size_t resolve_workers(std::size_t workers);
}  // namespace detail

}  // namespace gak
