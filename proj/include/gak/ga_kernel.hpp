#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gak/alignment.hpp"
#include "gak/ground_kernel.hpp"
#include "gak/timeseries.hpp"

namespace gak {

struct GaResult {
    double value_log = 0.0;               // log K(x, y)
    std::optional<double> value_linear;   // K itself, when a normal double
    std::size_t cells_computed = 0;       // always n * m
};

/// Global alignment kernel: the sum over all alignments of the product of
/// ground-kernel values, computed by the sum-product recursion
///
///   M(i,j) = (M(i,j-1) + M(i-1,j-1) + M(i-1,j)) * k(x_i, y_j)
///
/// with M(0,0) = 1 and zero elsewhere on the border. The recursion runs in
/// log domain on eval_log(), so no intermediate ever overflows. Memory is
/// two rows of length min(n, m). No length normalization is applied.
GaResult ga_kernel(const TimeSeries& x, const TimeSeries& y, const GroundKernelSpec& k);

/// Same recursion, keeping the whole (n+1) x (m+1) table of log M values,
/// row-major. Border entries are -inf except [0][0] = 0.
std::vector<double> ga_kernel_log_table(const TimeSeries& x, const TimeSeries& y,
                                        const GroundKernelSpec& k);

/// The recursion carried out on plain doubles with eval(). Only useful to
/// demonstrate where the linear domain breaks down: the result can be 0 or
/// +inf for long series.
double ga_kernel_linear_reference(const TimeSeries& x, const TimeSeries& y,
                                  const GroundKernelSpec& k);

/// Explicit sum over enumerate(|x|, |y|) of product_weight, added in
/// descending magnitude. Exponential cost; used as an oracle.
double ga_kernel_bruteforce(const TimeSeries& x, const TimeSeries& y, const GroundKernelSpec& k,
                            const AlignmentBudget& budget = {});

/// log K, i.e. the soft-max log(sum exp S(pi)) over all alignment scores.
double softmax_of_scores(const TimeSeries& x, const TimeSeries& y, const GroundKernelSpec& k);

}  // namespace gak
