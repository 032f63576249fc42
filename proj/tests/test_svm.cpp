#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gak/errors.hpp"
#include "gak/gram.hpp"
#include "gak/svm.hpp"
#include "test_util.hpp"

using namespace gak;

namespace {

// Gaussian Gram over random 2-d points, two shifted clusters.
std::pair<Matrix, std::vector<int>> two_clusters(std::mt19937_64& rng, std::size_t per_side, double gap) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::array<double, 2>> pts;
    std::vector<int> t;
    for (std::size_t i = 0; i < 2 * per_side; ++i) {
        const double shift = i < per_side ? gap : -gap;
        pts.push_back({g(rng) + shift, g(rng)});
        t.push_back(i < per_side ? 1 : -1);
    }
    Matrix K(pts.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double dx = pts[i][0] - pts[j][0], dy = pts[i][1] - pts[j][1];
            K(i, j) = std::exp(-(dx * dx + dy * dy) / 4.0);
        }
    return {K, t};
}

double kkt_residual(const SvmBinaryModel& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.alphas.size(); ++i) s += m.alphas[i] * m.targets[i];
    return std::abs(s);
}

}  // namespace

TEST_CASE("two-point problem solved by hand") {
    const std::vector<int> t{1, -1};
    const auto m = train_binary(Matrix::identity(2), t, 10.0);
    CHECK(m.alphas[0] == 1.0);
    CHECK(m.alphas[1] == 1.0);
    CHECK(m.bias == 0.0);
    const std::vector<double> c0{1.0, 0.0}, c1{0.0, 1.0};
    CHECK(m.decision(c0) == 1.0);
    CHECK(m.decision(c1) == -1.0);
    CHECK(kkt_residual(m) == 0.0);
    CHECK(dual_objective(Matrix::identity(2), t, m.alphas) == 1.0);
}

TEST_CASE("block-diagonal Gram separates perfectly") {
    Matrix K(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) K(i, j) = (i < 3) == (j < 3) ? 1.0 : 0.0;
    const std::vector<int> t{1, 1, 1, -1, -1, -1};
    const auto m = train_binary(K, t, 1000.0);
    for (std::size_t i = 0; i < 6; ++i) {
        std::vector<double> col(K.row(i).begin(), K.row(i).end());
        CHECK(m.decision(col) * t[i] > 0.0);
    }
}

TEST_CASE("dual feasibility and monotone objective") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto [K, t] = two_clusters(rng, 10 + trial, 0.3 + 0.1 * trial);
        const double C = std::pow(10.0, trial % 5 - 1);
        SmoOptions opts;
        opts.track_objective = true;
        const auto m = train_binary(K, t, C, opts);
        CHECK(m.converged);
        for (double a : m.alphas) {
            CHECK(a >= 0.0);
            CHECK(a <= C);
        }
        CHECK(kkt_residual(m) <= 1e-6);
        for (std::size_t k = 1; k < m.objective_trace.size(); ++k)
            CHECK(m.objective_trace[k] >= m.objective_trace[k - 1] - 1e-12 * std::abs(m.objective_trace[k - 1]));
        CHECK(m.objective_trace.back() == doctest::Approx(dual_objective(K, t, m.alphas)).epsilon(1e-9));
    }
}

TEST_CASE("decision values through a cross-Gram equal to the training Gram") {
    std::mt19937_64 rng(9);
    auto [K, t] = two_clusters(rng, 15, 0.5);
    const auto m = train_binary(K, t, 5.0);
    std::vector<std::string> labels, ids;
    for (std::size_t i = 0; i < t.size(); ++i) {
        labels.push_back(t[i] > 0 ? "pos" : "neg");
        ids.push_back("i" + std::to_string(i));
    }
    const auto ova = train_ova(K, labels, ids, 5.0);
    const Matrix f = decision_values(ova, K);  // columns of K = training items
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> col(t.size());
        for (std::size_t r = 0; r < t.size(); ++r) col[r] = K(r, i);
        const double direct = ova.binaries[1].decision(col);  // "pos" sorts after "neg"
        CHECK(std::abs(f(i, 1) - direct) <= 1e-9);
        CHECK(std::abs(ova.binaries[1].decision(col) - m.decision(col)) <= 1e-9);
    }
}

TEST_CASE("duplicated data leaves the decision function unchanged") {
    std::mt19937_64 rng(13);
    auto [K, t] = two_clusters(rng, 8, 0.8);
    SmoOptions tight;
    tight.tolerance = 1e-9;
    const double C = 1e4;  // large enough that no bound is active
    const auto m = train_binary(K, t, C, tight);

    const std::size_t n = t.size();
    Matrix K2(2 * n, 2 * n);
    std::vector<int> t2(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) {
        t2[i] = t[i % n];
        for (std::size_t j = 0; j < 2 * n; ++j) K2(i, j) = K(i % n, j % n);
    }
    const auto m2 = train_binary(K2, t2, C, tight);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> col(K.row(i).begin(), K.row(i).end());
        std::vector<double> col2(2 * n);
        for (std::size_t r = 0; r < 2 * n; ++r) col2[r] = K(r % n, i);
        CHECK(std::abs(m.decision(col) - m2.decision(col2)) <= 1e-6);
    }
}

TEST_CASE("svm errors") {
    const std::vector<int> same{1, 1};
    CHECK_THROWS_AS(train_binary(Matrix::identity(2), same, 1.0), ValidationError);
    const std::vector<int> bad{1, 0};
    CHECK_THROWS_AS(train_binary(Matrix::identity(2), bad, 1.0), ValidationError);
    const std::vector<int> ok{1, -1};
    CHECK_THROWS_AS(train_binary(Matrix::identity(3), ok, 1.0), ValidationError);
    CHECK_THROWS_AS(train_binary(Matrix::identity(2), ok, 0.0), ValidationError);

    std::mt19937_64 rng(1);
    auto [K, t] = two_clusters(rng, 20, 0.0);
    SmoOptions capped;
    capped.max_iterations = 2;
    CHECK_THROWS_AS(train_binary(K, t, 1e6, capped), ConvergenceError);
    capped.allow_nonconverged = true;
    CHECK_FALSE(train_binary(K, t, 1e6, capped).converged);
}

TEST_CASE("one-vs-all prediction rules") {
    // Three separable blocks.
    Matrix K(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) K(i, j) = i / 2 == j / 2 ? 1.0 : 0.0;
    const std::vector<std::string> labels{"a", "a", "b", "b", "c", "c"};
    const std::vector<std::string> ids{"0", "1", "2", "3", "4", "5"};
    const auto model = train_ova(K, labels, ids, 100.0);
    CHECK(model.labels == std::vector<std::string>{"a", "b", "c"});
    CHECK(predict(model, K) == labels);

    // A test item identical to a support vector of class b.
    Matrix probe(6, 1);
    for (std::size_t i = 0; i < 6; ++i) probe(i, 0) = K(i, 2);
    CHECK(predict(model, probe) == std::vector<std::string>{"b"});

    // Degenerate model: every decision value equal -> first label.
    OvaModel flat = model;
    for (auto& b : flat.binaries) {
        std::fill(b.alphas.begin(), b.alphas.end(), 0.0);
        b.bias = 0.5;
    }
    CHECK(predict(flat, probe) == std::vector<std::string>{"a"});

    // Permuting test columns permutes predictions.
    Matrix perm(6, 6);
    const std::vector<std::size_t> order{4, 0, 5, 2, 1, 3};
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) perm(i, j) = K(i, order[j]);
    const auto p = predict(model, perm);
    for (std::size_t j = 0; j < 6; ++j) CHECK(p[j] == labels[order[j]]);

    CrossGram cross{K, {"0", "1", "2", "3", "5", "4"}, ids};
    CHECK_THROWS_AS(predict(model, cross), ValidationError);
    cross.row_ids = ids;
    CHECK(predict(model, cross) == labels);

    const std::vector<std::string> single{"a", "a", "a", "a", "a", "a"};
    CHECK_THROWS_AS(train_ova(K, single, ids, 1.0), ValidationError);
}
