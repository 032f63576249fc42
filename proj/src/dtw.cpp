#include "gak/dtw.hpp"

#include <algorithm>
#include <cmath>

#include "gak/errors.hpp"
#include "gak/logsumexp.hpp"

namespace gak {

namespace {

// Dense table of local terms, row-major n x m.
std::vector<double> local_table(const TimeSeries& x, const TimeSeries& y, const LocalScore& local) {
    if (x.dim() != y.dim())
        throw DimensionMismatch("series have dimensions " + std::to_string(x.dim()) + " and " +
                                std::to_string(y.dim()));
    if (const auto* k = std::get_if<GroundKernelSpec>(&local)) k->validate();
    const std::size_t n = x.length(), m = y.length(), d = x.dim();
    std::vector<double> out(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double sq = detail::sq_dist_unchecked(x.point(i).data(), y.point(j).data(), d);
            out[i * m + j] = std::holds_alternative<CpdScoreSpec>(local)
                                 ? -sq
                                 : detail::eval_from_sq(std::get<GroundKernelSpec>(local), sq);
        }
    }
    return out;
}

}  // namespace

DtwResult dtw_best_path(const TimeSeries& x, const TimeSeries& y, const LocalScore& local) {
    const auto loc = local_table(x, y, local);
    const std::size_t n = x.length(), m = y.length(), w = m + 1;
    std::vector<double> D((n + 1) * w, neg_inf);
    D[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            D[i * w + j] = loc[(i - 1) * m + (j - 1)] +
                           std::max({D[(i - 1) * w + j - 1], D[(i - 1) * w + j], D[i * w + j - 1]});

    DtwResult out;
    out.best_score_sum = D[n * w + m];
    std::size_t i = n, j = m;
    while (true) {
        out.path.pi1.push_back(i);
        out.path.pi2.push_back(j);
        if (i == 1 && j == 1) break;
        const double diag = D[(i - 1) * w + j - 1];
        const double down = D[(i - 1) * w + j];
        const double right = D[i * w + j - 1];
        if (diag >= down && diag >= right) {
            --i;
            --j;
        } else if (down >= right) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(out.path.pi1.begin(), out.path.pi1.end());
    std::reverse(out.path.pi2.begin(), out.path.pi2.end());
    out.mean_score = out.best_score_sum / static_cast<double>(out.path.size());
    return out;
}

std::string to_string(MeanMode mode) {
    return mode == MeanMode::exhaustive ? "exhaustive" : "heuristic";
}

MeanMode mean_mode_from_string(const std::string& name) {
    if (name == "exhaustive") return MeanMode::exhaustive;
    if (name == "heuristic") return MeanMode::heuristic;
    throw ValidationError("unknown mean mode '" + name + "'");
}

MeanMode resolve_mean_mode(std::optional<MeanMode> requested, std::size_t n, std::size_t m) {
    if (requested) return *requested;
    return n * m <= AlignmentBudget{}.max_cells ? MeanMode::exhaustive : MeanMode::heuristic;
}

MeanScore best_mean_score(const TimeSeries& x, const TimeSeries& y, const LocalScore& local,
                          std::optional<MeanMode> mode) {
    const std::size_t n = x.length(), m = y.length();
    const MeanMode resolved = resolve_mean_mode(mode, n, m);
    if (resolved == MeanMode::heuristic) {
        const auto r = dtw_best_path(x, y, local);
        return {r.mean_score, r.path.size(), resolved};
    }

    // Best sum restricted to paths of exactly p cells, for every p; the mean
    // optimum is then max_p best(p) / p. Layer p only reads layer p-1.
    const auto loc = local_table(x, y, local);
    const std::size_t w = m + 1;
    std::vector<double> prev((n + 1) * w, neg_inf), cur((n + 1) * w, neg_inf);
    prev[1 * w + 1] = loc[0];  // p = 1: the single cell (1,1)

    MeanScore best{n == 1 && m == 1 ? loc[0] : neg_inf, 1, resolved};
    for (std::size_t p = 2; p <= n + m - 1; ++p) {
        std::fill(cur.begin(), cur.end(), neg_inf);
        for (std::size_t i = 1; i <= std::min(n, p); ++i) {
            // A p-cell path ending at (i,j) needs max(i,j) <= p <= i+j-1.
            const std::size_t j_lo = p + 1 > i ? std::max<std::size_t>(1, p + 1 - i) : 1;
            const std::size_t j_hi = std::min(m, p);
            for (std::size_t j = j_lo; j <= j_hi; ++j) {
                const double pred = std::max({prev[(i - 1) * w + j - 1], prev[(i - 1) * w + j],
                                              prev[i * w + j - 1]});
                if (pred != neg_inf) cur[i * w + j] = pred + loc[(i - 1) * m + (j - 1)];
            }
        }
        const double end = cur[n * w + m];
        if (end != neg_inf) {
            const double mean = end / static_cast<double>(p);
            if (mean > best.mean) best = {mean, p, resolved};
        }
        std::swap(prev, cur);
    }
    return best;
}

DtwKernelValue kdtw1(const TimeSeries& x, const TimeSeries& y, std::optional<MeanMode> mode) {
    const auto r = best_mean_score(x, y, CpdScoreSpec{}, mode);
    return {std::exp(r.mean), r.mode};
}

DtwKernelValue kdtw2(const TimeSeries& x, const TimeSeries& y, double sigma,
                     std::optional<MeanMode> mode) {
    const auto r = best_mean_score(x, y, GroundKernelSpec::gaussian(sigma), mode);
    return {r.mean, r.mode};
}

}  // namespace gak
