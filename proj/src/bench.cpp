#include "gak/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "gak/errors.hpp"
#include "gak/ga_kernel.hpp"

namespace gak {

namespace {

TimeSeries random_series(std::size_t length, std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(length * dim);
    for (auto& x : v) x = gauss(rng);
    return TimeSeries(dim, std::move(v));
}

}  // namespace

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw ValidationError("need >= 2 points for a slope");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx;
        sxy += dx * (std::log(ys[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

BenchReport run_bench(const std::vector<std::size_t>& lengths, std::size_t dim, std::size_t repeats,
                      std::uint64_t seed) {
    if (lengths.empty()) throw ValidationError("no lengths to benchmark");
    if (repeats == 0) throw ValidationError("repeats must be positive");
    std::mt19937_64 rng(seed);
    // E|x-y|^2 = 2*dim for standard normal coordinates; pick sigma so that
    // exp(-2*dim/sigma^2) = 1/2.
    const auto k = GroundKernelSpec::gaussian(std::sqrt(2.0 * static_cast<double>(dim) / std::log(2.0)));

    BenchReport report;
    std::vector<double> xs, ys;
    for (std::size_t len : lengths) {
        const auto x = random_series(len, dim, rng);
        const auto y = random_series(len, dim, rng);
        BenchRow row;
        row.length = len;
        row.seconds = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < repeats; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto res = ga_kernel(x, y, k);
            const auto t1 = std::chrono::steady_clock::now();
            row.cells_computed = res.cells_computed;
            row.seconds = std::min(row.seconds, std::chrono::duration<double>(t1 - t0).count());
        }
        row.cells_per_second = static_cast<double>(row.cells_computed) / row.seconds;
        xs.push_back(static_cast<double>(len));
        ys.push_back(row.seconds);
        report.rows.push_back(row);
    }
    report.slope = lengths.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
    return report;
}

}  // namespace gak
