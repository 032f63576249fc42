#include "gak/ga_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "gak/errors.hpp"
#include "gak/logsumexp.hpp"

namespace gak {

namespace {

void check_pair(const TimeSeries& x, const TimeSeries& y, const GroundKernelSpec& k) {
    k.validate();
    if (x.dim() != y.dim())
        throw DimensionMismatch("series have dimensions " + std::to_string(x.dim()) + " and " +
                                std::to_string(y.dim()));
}

std::optional<double> representable_exp(double log_value) {
    static const double lo = std::log(std::numeric_limits<double>::min());
    static const double hi = std::log(std::numeric_limits<double>::max());
    if (!(log_value >= lo && log_value <= hi)) return std::nullopt;
    return std::exp(log_value);
}

}  // namespace

GaResult ga_kernel(const TimeSeries& x_in, const TimeSeries& y_in, const GroundKernelSpec& k) {
    check_pair(x_in, y_in, k);
    // K is symmetric; iterate rows over the longer series so the rolling
    // rows have the shorter length.
    const bool swap = y_in.length() > x_in.length();
    const TimeSeries& x = swap ? y_in : x_in;
    const TimeSeries& y = swap ? x_in : y_in;
    const std::size_t n = x.length(), m = y.length(), d = x.dim();

    std::vector<double> prev(m + 1, neg_inf), cur(m + 1, neg_inf);
    prev[0] = 0.0;  // log M(0,0)
    std::size_t cells = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = neg_inf;
        const double* xi = x.point(i - 1).data();
        for (std::size_t j = 1; j <= m; ++j) {
            const double local =
                detail::eval_log_from_sq(k, detail::sq_dist_unchecked(xi, y.point(j - 1).data(), d));
            cur[j] = logsumexp3(cur[j - 1], prev[j - 1], prev[j]) + local;
            ++cells;
        }
        std::swap(prev, cur);
    }

    GaResult out;
    out.value_log = prev[m];
    out.value_linear = representable_exp(out.value_log);
    out.cells_computed = cells;
    return out;
}

std::vector<double> ga_kernel_log_table(const TimeSeries& x, const TimeSeries& y,
                                        const GroundKernelSpec& k) {
    check_pair(x, y, k);
    const std::size_t n = x.length(), m = y.length(), d = x.dim(), w = m + 1;
    std::vector<double> table((n + 1) * w, neg_inf);
    table[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double* xi = x.point(i - 1).data();
        for (std::size_t j = 1; j <= m; ++j) {
            const double local =
                detail::eval_log_from_sq(k, detail::sq_dist_unchecked(xi, y.point(j - 1).data(), d));
            table[i * w + j] =
                logsumexp3(table[i * w + j - 1], table[(i - 1) * w + j - 1], table[(i - 1) * w + j]) + local;
        }
    }
    return table;
}

double ga_kernel_linear_reference(const TimeSeries& x, const TimeSeries& y, const GroundKernelSpec& k) {
    check_pair(x, y, k);
    const std::size_t n = x.length(), m = y.length(), d = x.dim();
    std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
    prev[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = 0.0;
        const double* xi = x.point(i - 1).data();
        for (std::size_t j = 1; j <= m; ++j) {
            const double local =
                detail::eval_from_sq(k, detail::sq_dist_unchecked(xi, y.point(j - 1).data(), d));
            cur[j] = (cur[j - 1] + prev[j - 1] + prev[j]) * local;
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double ga_kernel_bruteforce(const TimeSeries& x, const TimeSeries& y, const GroundKernelSpec& k,
                            const AlignmentBudget& budget) {
    check_pair(x, y, k);
    const auto paths = enumerate(x.length(), y.length(), budget);
    std::vector<double> weights;
    weights.reserve(paths.size());
    for (const auto& a : paths) weights.push_back(product_weight(a, x, y, k));
    std::sort(weights.begin(), weights.end(), std::greater<>());
    double total = 0.0;
    for (double w : weights) total += w;
    return total;
}

double softmax_of_scores(const TimeSeries& x, const TimeSeries& y, const GroundKernelSpec& k) {
    return ga_kernel(x, y, k).value_log;
}

}  // namespace gak
