#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gak/ground_kernel.hpp"
#include "gak/timeseries.hpp"

namespace gak {

using BigInt = boost::multiprecision::cpp_int;

/// A monotone staircase path through the n x m index grid, stored as two
/// 1-based index tuples of equal length. Steps are (1,0), (0,1) or (1,1):
/// elements may repeat, nothing is skipped.
struct Alignment {
    std::vector<std::size_t> pi1;
    std::vector<std::size_t> pi2;

    std::size_t size() const noexcept { return pi1.size(); }

    friend bool operator==(const Alignment&, const Alignment&) = default;
};

struct AlignmentBudget {
    std::size_t max_cells = 64;
    std::size_t max_count = 1'000'000;
};

bool is_valid(const Alignment& a, std::size_t n, std::size_t m);

/// |A(n,m)|: C(1,j) = C(i,1) = 1, C(i,j) = C(i-1,j) + C(i,j-1) + C(i-1,j-1).
BigInt count_alignments(std::size_t n, std::size_t m);

/// Every alignment of an n x m grid, in lexicographic order of the move
/// sequence with diag < right (advance pi2) < down (advance pi1).
/// Throws BudgetExceeded when n*m or the alignment count exceeds the budget.
std::vector<Alignment> enumerate(std::size_t n, std::size_t m, const AlignmentBudget& budget = {});

/// Sum of phi along the alignment.
double score(const Alignment& a, const TimeSeries& x, const TimeSeries& y, const CpdScoreSpec& phi);

/// Product of k along the alignment.
double product_weight(const Alignment& a, const TimeSeries& x, const TimeSeries& y,
                      const GroundKernelSpec& k);

}  // namespace gak
