#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gak/gram.hpp"
#include "gak/svm.hpp"
#include "gak/timeseries.hpp"

namespace gak {

/// Default C grid: 10^-2 ... 10^6.
std::vector<double> default_c_grid();

/// Median Euclidean distance between points of the dataset, over an evenly
/// strided sample of at most `max_points` points.
double median_point_distance(const LabeledDataset& ds, std::size_t max_points = 1000);

/// median_point_distance(ds) * {0.25, 0.5, 1, 2, 4}.
std::vector<double> default_sigma_grid(const LabeledDataset& ds);

struct CvConfig {
    std::size_t folds = 4;
    std::size_t repeats = 4;
    std::vector<double> sigma_grid;
    std::vector<double> c_grid;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    SmoOptions smo;

    void validate() const;
};

struct CvEntry {
    double sigma = 0.0;  // NaN for kernels without a width (dtw1)
    double C = 0.0;
    double mean_error = 0.0;
    double std_error = 0.0;               // sample std over folds x repeats
    std::vector<double> fold_errors;      // repeat-major
    std::vector<double> fold_shifts;      // regularization shift per fold
    std::size_t nonconverged = 0;         // binary SMO runs that hit the cap
};

struct CvReport {
    KernelFamily family = KernelFamily::ga_log;
    std::size_t folds = 0;
    std::size_t repeats = 0;
    std::vector<CvEntry> entries;  // sigma-major, then C, in grid order
};

/// Stratified fold index per item, one vector per repeat.
std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& ds, std::size_t folds,
                                                       std::size_t repeats, std::uint64_t seed);

/// Repeated stratified k-fold CV over the (sigma, C) grid. The full Gram is
/// computed once per sigma; each fold regularizes only its training block
/// and scores the held-out items through the unregularized cross block.
CvReport cross_validate(const LabeledDataset& ds, const KernelSelector& kernel, const CvConfig& cfg);

struct GridChoice {
    double sigma = 0.0;
    double C = 0.0;
    double mean_error = 0.0;
};

/// Minimal mean CV error; ties go to the smaller sigma, then the smaller C.
GridChoice grid_select(const CvReport& report);

/// Fraction of mismatches.
double error_rate(std::span<const std::string> predicted, std::span<const std::string> truth);

struct ProtocolResult {
    double test_error = 0.0;
    double sigma = 0.0;
    double C = 0.0;
    std::optional<CvReport> cv;
    std::vector<std::string> predictions;
    Regularization train_regularization;
};

/// Train/test protocol: optional CV grid selection, then a regularized
/// training Gram, one-vs-all SMO, and prediction through the unregularized
/// train x test matrix. With no CV, sigma_grid/c_grid must hold one value each.
ProtocolResult run_protocol(const LabeledDataset& train, const LabeledDataset& test,
                            const KernelSelector& kernel, const CvConfig& cfg, bool run_cv);

nlohmann::json to_json(const CvReport& report);
/// Header sigma,C,mean_error,std_error,nonconverged; one row per entry.
void write_cv_csv(std::ostream& out, const CvReport& report);

}  // namespace gak
