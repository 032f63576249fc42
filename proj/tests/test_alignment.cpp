#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "gak/alignment.hpp"
#include "gak/errors.hpp"
#include "test_util.hpp"

using namespace gak;

namespace {

// Independent path construction: every sequence of steps from {(1,0),(0,1),(1,1)}
// leading from (1,1) to (n,m), counted by brute recursion on the grid.
std::size_t count_paths_brute(std::size_t i, std::size_t j, std::size_t n, std::size_t m) {
    if (i == n && j == m) return 1;
    std::size_t total = 0;
    if (i < n) total += count_paths_brute(i + 1, j, n, m);
    if (j < m) total += count_paths_brute(i, j + 1, n, m);
    if (i < n && j < m) total += count_paths_brute(i + 1, j + 1, n, m);
    return total;
}

Alignment make(std::vector<std::size_t> a, std::vector<std::size_t> b) { return {std::move(a), std::move(b)}; }

}  // namespace

TEST_CASE("is_valid") {
    CHECK(is_valid(make({1, 2, 2, 3, 4, 5, 5, 5}, {1, 2, 3, 4, 4, 5, 6, 7}), 5, 7));
    CHECK_FALSE(is_valid(make({1, 1}, {1, 1}), 1, 1));
    CHECK_FALSE(is_valid(make({1, 2}, {1, 1}), 3, 1));
    CHECK(is_valid(make({1}, {1}), 1, 1));
    CHECK_FALSE(is_valid(make({1, 3}, {1, 2}), 3, 2));   // skips an index
    CHECK_FALSE(is_valid(make({1, 2, 1}, {1, 2, 3}), 1, 3));  // goes backwards
    CHECK_FALSE(is_valid(make({2}, {1}), 2, 1));         // does not start at 1
    CHECK_FALSE(is_valid(make({1, 2}, {1}), 2, 1));      // ragged
    CHECK_FALSE(is_valid(make({}, {}), 1, 1));
}

TEST_CASE("count_alignments") {
    CHECK(count_alignments(1, 1) == 1);
    CHECK(count_alignments(3, 3) == 13);
    CHECK(count_alignments(5, 7) == 1289);
    CHECK(count_alignments(8, 8) == 48639);
    CHECK(count_alignments(1, 40) == 1);
    // Big values stay exact: C(200, 200) has ~150 decimal digits.
    const BigInt big = count_alignments(200, 200);
    CHECK(big.str().size() > 100);
    CHECK(big == count_alignments(199, 200) + count_alignments(200, 199) + count_alignments(199, 199));
    for (std::size_t n = 1; n <= 8; ++n)
        for (std::size_t m = 1; m <= 8; ++m) CHECK(count_alignments(n, m) == count_alignments(m, n));
    for (std::size_t n = 1; n <= 6; ++n)
        for (std::size_t m = 1; m <= 6; ++m) CHECK(count_alignments(n, m) == count_paths_brute(1, 1, n, m));
}

TEST_CASE("enumerate examples") {
    const auto one = enumerate(1, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == make({1}, {1}));

    const auto two = enumerate(2, 2);
    REQUIRE(two.size() == 3);
    CHECK(two[0] == make({1, 2}, {1, 2}));
    CHECK(two[1] == make({1, 1, 2}, {1, 2, 2}));
    CHECK(two[2] == make({1, 2, 2}, {1, 1, 2}));

    const auto col = enumerate(2, 1);
    REQUIRE(col.size() == 1);
    CHECK(col[0] == make({1, 2}, {1, 1}));

    CHECK(enumerate(5, 7).size() == 1289);
}

TEST_CASE("enumerate covers exactly the valid alignments") {
    for (std::size_t n = 1; n <= 8; ++n) {
        for (std::size_t m = 1; m <= 8; ++m) {
            const auto all = enumerate(n, m);
            CHECK(BigInt(all.size()) == count_alignments(n, m));
            std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen;
            for (const auto& a : all) {
                CHECK(is_valid(a, n, m));
                CHECK(a.size() >= std::max(n, m));
                CHECK(a.size() <= n + m - 1);
                seen.insert({a.pi1, a.pi2});
            }
            CHECK(seen.size() == all.size());
        }
    }
}

TEST_CASE("enumerate budget") {
    CHECK_THROWS_AS(enumerate(9, 9), BudgetExceeded);  // 81 cells > 64
    CHECK_THROWS_AS(enumerate(6, 6, {64, 100}), BudgetExceeded);
    CHECK_NOTHROW(enumerate(9, 9, {100, 1'000'000}));
    try {
        enumerate(6, 6, {64, 100});
    } catch (const BudgetExceeded& e) {
        CHECK(std::string(e.what()).find("1683") != std::string::npos);
    }
}

TEST_CASE("score and product_weight") {
    const auto x = TimeSeries::from_points({{0.0}, {1.0}});
    const auto y = TimeSeries::from_points({{0.0}});
    CHECK(score(make({1, 2}, {1, 1}), x, y, {}) == -1.0);
    CHECK(score(make({1, 2}, {1, 2}), x, x, {}) == 0.0);
    CHECK(product_weight(make({1, 2}, {1, 2}), x, x, GroundKernelSpec::gaussian(1.0)) == 1.0);
    CHECK_THROWS_AS(score(make({1}, {1}), x, y, {}), ValidationError);

    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const auto a = testing::random_series(rng, 1 + t % 4, 2);
        const auto b = testing::random_series(rng, 1 + (t / 4) % 4, 2);
        const auto k = GroundKernelSpec::gaussian(1.5);
        for (const auto& al : enumerate(a.length(), b.length())) {
            CHECK(product_weight(al, a, b, GroundKernelSpec::unit()) == 1.0);
            // Independent re-summation along the path.
            double s = 0.0, log_w = 0.0;
            for (std::size_t i = 0; i < al.size(); ++i) {
                const auto p = a.point(al.pi1[i] - 1), q = b.point(al.pi2[i] - 1);
                const double d0 = p[0] - q[0], d1 = p[1] - q[1];
                s -= d0 * d0 + d1 * d1;
                log_w += eval_log(k, p, q);
            }
            CHECK(std::abs(score(al, a, b, {}) - s) <= 1e-15 * std::max(1.0, std::abs(s)));
            const double w = product_weight(al, a, b, k);
            CHECK(std::abs(std::exp(log_w) - w) <= 1e-12 * w);
        }
    }
}
