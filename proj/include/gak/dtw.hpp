#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "gak/alignment.hpp"
#include "gak/ground_kernel.hpp"
#include "gak/timeseries.hpp"

namespace gak {

/// Local term for the max-sum DP: a c.p.d. score, or a ground kernel's
/// linear value.
using LocalScore = std::variant<CpdScoreSpec, GroundKernelSpec>;

struct DtwResult {
    double best_score_sum = 0.0;  // unnormalized max over alignments
    Alignment path;
    double mean_score = 0.0;      // best_score_sum / |path|
};

/// Max-sum DP  D(i,j) = local(x_i, y_j) + max(D(i-1,j-1), D(i-1,j), D(i,j-1)).
/// Backtracking prefers diag, then down (i-1,j), then right (i,j-1) on ties.
DtwResult dtw_best_path(const TimeSeries& x, const TimeSeries& y, const LocalScore& local);

/// How the mean-normalized optimum max_pi S(pi)/|pi| is found.
///   exhaustive: exact. Solved by a DP stratified by path length.
///   heuristic:  the sum-optimal path's mean.
enum class MeanMode { exhaustive, heuristic };

std::string to_string(MeanMode mode);
MeanMode mean_mode_from_string(const std::string& name);

/// Default rule: exhaustive when n*m <= 64, heuristic beyond.
MeanMode resolve_mean_mode(std::optional<MeanMode> requested, std::size_t n, std::size_t m);

struct MeanScore {
    double mean = 0.0;
    std::size_t path_length = 0;
    MeanMode mode = MeanMode::exhaustive;
};

/// max over alignments of (1/|pi|) sum of local terms, per `mode`.
MeanScore best_mean_score(const TimeSeries& x, const TimeSeries& y, const LocalScore& local,
                          std::optional<MeanMode> mode = std::nullopt);

struct DtwKernelValue {
    double value = 0.0;
    MeanMode mode = MeanMode::exhaustive;
};

/// exp(max_pi mean of -|x_i - y_j|^2).
DtwKernelValue kdtw1(const TimeSeries& x, const TimeSeries& y,
                     std::optional<MeanMode> mode = std::nullopt);

/// max_pi mean of exp(-|x_i - y_j|^2 / sigma^2).
DtwKernelValue kdtw2(const TimeSeries& x, const TimeSeries& y, double sigma,
                     std::optional<MeanMode> mode = std::nullopt);

}  // namespace gak
