#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gak {

struct BenchRow {
    std::size_t length = 0;
    std::size_t cells_computed = 0;
    double seconds = 0.0;  // min over repeats
    double cells_per_second = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double slope = 0.0;  // least-squares slope of log(seconds) against log(length)
};

/// Times ga_kernel on pairs of random Gaussian series of each length. The
/// ground kernel width is set so a typical local value is about 1/2.
BenchReport run_bench(const std::vector<std::size_t>& lengths, std::size_t dim = 13,
                      std::size_t repeats = 3, std::uint64_t seed = 0);

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace gak
