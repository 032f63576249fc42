#include "gak/alignment.hpp"

#include "gak/errors.hpp"

namespace gak {

namespace {

void require_valid(const Alignment& a, const TimeSeries& x, const TimeSeries& y) {
    if (x.dim() != y.dim())
        throw DimensionMismatch("series have dimensions " + std::to_string(x.dim()) + " and " +
                                std::to_string(y.dim()));
    if (!is_valid(a, x.length(), y.length()))
        throw ValidationError("alignment is not valid for a " + std::to_string(x.length()) + "x" +
                              std::to_string(y.length()) + " grid");
}

}  // namespace

bool is_valid(const Alignment& a, std::size_t n, std::size_t m) {
    const std::size_t p = a.pi1.size();
    if (p == 0 || a.pi2.size() != p || n == 0 || m == 0) return false;
    if (a.pi1.front() != 1 || a.pi2.front() != 1) return false;
    if (a.pi1.back() != n || a.pi2.back() != m) return false;
    for (std::size_t i = 0; i + 1 < p; ++i) {
        if (a.pi1[i + 1] < a.pi1[i] || a.pi2[i + 1] < a.pi2[i]) return false;
        const std::size_t d1 = a.pi1[i + 1] - a.pi1[i];
        const std::size_t d2 = a.pi2[i + 1] - a.pi2[i];
        if (d1 > 1 || d2 > 1 || d1 + d2 == 0) return false;
    }
    return true;
}

BigInt count_alignments(std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) return 0;
    // Rolling row over j; prev[j] = C(i-1, j).
    std::vector<BigInt> row(m, BigInt(1));
    for (std::size_t i = 1; i < n; ++i) {
        BigInt diag = row[0];  // C(i-1, j-1) for the next j
        for (std::size_t j = 1; j < m; ++j) {
            BigInt up = row[j];
            row[j] = up + row[j - 1] + diag;
            diag = std::move(up);
        }
    }
    return row[m - 1];
}

std::vector<Alignment> enumerate(std::size_t n, std::size_t m, const AlignmentBudget& budget) {
    if (n == 0 || m == 0) throw ValidationError("grid dimensions must be positive");
    if (n * m > budget.max_cells)
        throw BudgetExceeded("grid has " + std::to_string(n * m) + " cells, budget allows " +
                             std::to_string(budget.max_cells));
    const BigInt count = count_alignments(n, m);
    if (count > budget.max_count)
        throw BudgetExceeded("grid has " + count.str() + " alignments, budget allows " +
                             std::to_string(budget.max_count));

    std::vector<Alignment> out;
    out.reserve(count.convert_to<std::size_t>());
    Alignment cur;
    cur.pi1.reserve(n + m);
    cur.pi2.reserve(n + m);

    // Depth-first, trying moves in the fixed order diag, right, down.
    auto walk = [&](auto&& self, std::size_t i, std::size_t j) -> void {
        cur.pi1.push_back(i);
        cur.pi2.push_back(j);
        if (i == n && j == m) {
            out.push_back(cur);
        } else {
            if (i < n && j < m) self(self, i + 1, j + 1);
            if (j < m) self(self, i, j + 1);
            if (i < n) self(self, i + 1, j);
        }
        cur.pi1.pop_back();
        cur.pi2.pop_back();
    };
    walk(walk, 1, 1);
    return out;
}

double score(const Alignment& a, const TimeSeries& x, const TimeSeries& y, const CpdScoreSpec& phi) {
    require_valid(a, x, y);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += eval_cpd(phi, x.point(a.pi1[i] - 1), y.point(a.pi2[i] - 1));
    return s;
}

double product_weight(const Alignment& a, const TimeSeries& x, const TimeSeries& y,
                      const GroundKernelSpec& k) {
    require_valid(a, x, y);
    double w = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) w *= eval(k, x.point(a.pi1[i] - 1), y.point(a.pi2[i] - 1));
    return w;
}

}  // namespace gak
