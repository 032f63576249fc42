#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gak/errors.hpp"
#include "gak/ga_kernel.hpp"
#include "gak/gram.hpp"
#include "test_util.hpp"

using namespace gak;

namespace {

Matrix random_symmetric(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = g(rng);
    return a;
}

std::vector<double> eigen_reference(const Matrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

GramMatrix wrap(Matrix m) {
    GramMatrix g;
    for (std::size_t i = 0; i < m.rows(); ++i) g.ids.push_back("i" + std::to_string(i));
    g.values = std::move(m);
    return g;
}

}  // namespace

TEST_CASE("min eigenvalue on known spectra") {
    CHECK(min_eigenvalue(Matrix::identity(3)) == doctest::Approx(1.0));
    CHECK(min_eigenvalue(Matrix::from_rows({{1, 2}, {2, 1}})) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(min_eigenvalue(Matrix::from_rows({{5, 0, 0}, {0, -3, 0}, {0, 0, 0}})) == -3.0);
    CHECK(min_eigenvalue(Matrix::from_rows({{7}})) == 7.0);
}

TEST_CASE("jacobi spectrum agrees with a reference solver") {
    std::mt19937_64 rng(31);
    for (std::size_t n : {2u, 3u, 5u, 10u, 40u, 120u}) {
        for (int rep = 0; rep < 3; ++rep) {
            const auto a = random_symmetric(rng, n, 1.0 + 10.0 * rep);
            const auto ours = symmetric_eigenvalues(a);
            const auto ref = eigen_reference(a);
            const double radius = std::max(std::abs(ref.front()), std::abs(ref.back()));
            for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(ours[k] - ref[k]) <= 1e-9 * std::max(1.0, radius));
        }
    }
}

TEST_CASE("matrix validation") {
    CHECK_THROWS_AS(min_eigenvalue(Matrix::from_rows({{1, 2}, {2.5, 1}})), ValidationError);
    CHECK_THROWS_AS(min_eigenvalue(Matrix(2, 3)), ValidationError);
    CHECK_THROWS_AS(min_eigenvalue(Matrix::from_rows({{1, NAN}, {NAN, 1}})), ValidationError);
    CHECK_THROWS_AS(Matrix::from_rows({{1, 2}, {3}}), ValidationError);
}

TEST_CASE("regularize") {
    SUBCASE("PSD input is untouched") {
        const auto g = regularize(wrap(Matrix::identity(3)));
        CHECK(g.values == Matrix::identity(3));
        REQUIRE(g.regularization);
        CHECK(g.regularization->shift_applied == 0.0);
        CHECK(g.regularization->lambda_min_before == doctest::Approx(1.0));
    }
    SUBCASE("2x2 indefinite") {
        const auto g = regularize(wrap(Matrix::from_rows({{1, 2}, {2, 1}})));
        CHECK(g.regularization->shift_applied == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(g.values(0, 0) == doctest::Approx(2.0));
        CHECK(g.values(1, 1) == doctest::Approx(2.0));
        CHECK(g.values(0, 1) == 2.0);
        const auto eig = symmetric_eigenvalues(g.values);
        CHECK(eig[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(eig[1] == doctest::Approx(4.0));
    }
    SUBCASE("random indefinite matrices: PSD and idempotent") {
        std::mt19937_64 rng(41);
        for (int t = 0; t < 30; ++t) {
            const auto a = random_symmetric(rng, 2 + t % 25, 0.1 + t);
            const auto once = regularize(wrap(a));
            const auto& rec = *once.regularization;
            CHECK(rec.shift_applied == std::max(0.0, -rec.lambda_min_before));
            const auto report = psd_check(once, 1e-9);
            CHECK(report.is_psd);
            const auto twice = regularize(once);
            CHECK(twice.values == once.values);
            CHECK(twice.regularization->shift_applied == 0.0);
        }
    }
}

TEST_CASE("psd_check") {
    auto r = psd_check(Matrix::identity(4), 0.0);
    CHECK(r.is_psd);
    CHECK(r.lambda_min == doctest::Approx(1.0));
    r = psd_check(Matrix::from_rows({{1, 2}, {2, 1}}), 1e-9);
    CHECK_FALSE(r.is_psd);
    CHECK(r.lambda_min == doctest::Approx(-1.0));
}

TEST_CASE("build_gram basics") {
    const auto s = TimeSeries::from_points({{0.0}, {1.0}, {0.5}});
    const auto t = TimeSeries::from_points({{2.0}, {1.0}, {-0.5}});
    LabeledDataset one({{"a", "A", s}});
    const auto g1 = build_gram(one, {KernelFamily::ga_log, GroundKernelSpec::gaussian(1.0)});
    CHECK(g1.values.rows() == 1);
    CHECK(g1.values(0, 0) == ga_kernel(s, s, GroundKernelSpec::gaussian(1.0)).value_log);

    LabeledDataset two({{"a", "A", s}, {"b", "B", t}});
    const auto gu = build_gram(two, {KernelFamily::ga_log, GroundKernelSpec::unit()});
    CHECK(gu.values(0, 1) == doctest::Approx(std::log(13.0)).epsilon(1e-14));
    CHECK(gu.ids == std::vector<std::string>{"a", "b"});

    const auto lin = build_gram(two, {KernelFamily::ga_linear, GroundKernelSpec::unit()});
    CHECK(lin.values(0, 1) == doctest::Approx(13.0).epsilon(1e-14));

    // Non-representable pairs are refused in linear mode, naming the pair.
    std::mt19937_64 rng(3);
    LabeledDataset big({{"p", "A", testing::random_series(rng, 600, 1)}, {"q", "B", testing::random_series(rng, 600, 1)}});
    CHECK_THROWS_WITH_AS(build_gram(big, {KernelFamily::ga_linear, GroundKernelSpec::unit()}),
                         doctest::Contains("'p'"), NotRepresentable);
}

TEST_CASE("gram symmetry, permutation and worker independence") {
    std::mt19937_64 rng(51);
    const auto ds = testing::random_dataset(rng, 12, 2, 15, 2, 3);
    for (auto family : {KernelFamily::ga_log, KernelFamily::ga_linear, KernelFamily::dtw1, KernelFamily::dtw2}) {
        const KernelSelector k{family, GroundKernelSpec::gaussian(1.2)};
        const auto g = build_gram(ds, k, 1);
        for (std::size_t i = 0; i < ds.size(); ++i)
            for (std::size_t j = 0; j < ds.size(); ++j) CHECK(g.values(i, j) == g.values(j, i));
        for (std::size_t w : {2u, 3u, 8u}) CHECK(build_gram(ds, k, w).values == g.values);

        std::vector<std::size_t> perm(ds.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto gp = build_gram(ds.subset(perm), k, 2);
        for (std::size_t i = 0; i < ds.size(); ++i)
            for (std::size_t j = 0; j < ds.size(); ++j) CHECK(gp.values(i, j) == g.values(perm[i], perm[j]));
    }
}

TEST_CASE("cross gram") {
    std::mt19937_64 rng(61);
    const auto train = testing::random_dataset(rng, 6, 3, 8, 2);
    const KernelSelector k{KernelFamily::ga_log, GroundKernelSpec::gaussian(1.0)};
    const auto g = build_gram(train, k);
    const auto c = build_cross_gram(train, train, k, 3);
    CHECK(c.values == g.values);
    CHECK(c.row_ids == train.ids());

    const std::vector<std::size_t> rev{5, 4, 3, 2, 1, 0};
    const auto cr = build_cross_gram(train, train.subset(rev), k);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(cr.values(i, j) == g.values(i, rev[j]));
    CHECK(cr.col_ids.front() == train[5].id);

    LabeledDataset x({{"x", "A", TimeSeries::from_points({{0.0, 1.0}})}});
    LabeledDataset y({{"y", "A", TimeSeries::from_points({{1.0, 1.0}})}});
    CHECK(build_cross_gram(x, y, k).values(0, 0) == -1.0);

    LabeledDataset z({{"z", "A", TimeSeries::from_points({{0.0}})}});
    CHECK_THROWS_AS(build_cross_gram(x, z, k), DimensionMismatch);
}

TEST_CASE("ga_linear with the halved ratio kernel gives PSD Grams") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        const auto ds = testing::random_dataset(rng, 20, 3, 10, 2);
        const auto g = build_gram(ds, {KernelFamily::ga_linear, GroundKernelSpec::halved_gaussian_ratio(1.0)});
        const auto r = psd_check(g, 1e-8);
        CHECK(r.is_psd);
    }
}

TEST_CASE("log gram diagonal dominance grows with length") {
    SynthSpec spec;
    spec.num_classes = 2;
    spec.per_class = 4;
    spec.dim = 2;
    spec.seed = 5;
    double last_gap = -INFINITY;
    for (std::size_t len : {50u, 100u, 200u}) {
        spec.base_length = len;
        const auto ds = generate_synthetic(spec);
        // Only holds at bandwidths on the scale of point distances; at sigma >= 0.5
        // longer series outscore the diagonal through their extra alignments.
        const auto g = build_gram(ds, {KernelFamily::ga_log, GroundKernelSpec::gaussian(0.25)});
        std::vector<double> gaps;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            for (std::size_t j = 0; j < ds.size(); ++j) {
                if (i == j) continue;
                CHECK(g.values(i, i) > g.values(i, j));
                gaps.push_back(g.values(i, i) - g.values(i, j));
            }
        }
        std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
        const double median = gaps[gaps.size() / 2];
        CHECK(median > last_gap);
        last_gap = median;
    }
}

TEST_CASE("gram persistence") {
    testing::TempDir dir("gram");
    std::mt19937_64 rng(71);
    const auto ds = testing::random_dataset(rng, 5, 2, 6, 3);
    KernelSelector k{KernelFamily::dtw2, GroundKernelSpec::gaussian(0.9), MeanMode::exhaustive};
    const auto g = regularize(build_gram(ds, k));
    write_gram(dir / "m", g);
    CHECK(std::filesystem::exists(dir / "m.gram.csv"));
    CHECK(std::filesystem::exists(dir / "m.gram.json"));
    const auto back = read_gram(dir / "m");
    CHECK(back.values == g.values);
    CHECK(back.ids == g.ids);
    CHECK(back.kernel.family == KernelFamily::dtw2);
    CHECK(back.kernel.ground.sigma == 0.9);
    CHECK(back.kernel.mean_mode == MeanMode::exhaustive);
    REQUIRE(back.regularization);
    CHECK(back.regularization->shift_applied == g.regularization->shift_applied);

    const auto plain = build_gram(ds, {KernelFamily::ga_log, GroundKernelSpec::halved_gaussian_ratio(2.0)});
    write_gram(dir / "p", plain);
    const auto p = read_gram(dir / "p");
    CHECK_FALSE(p.regularization);
    CHECK(p.kernel.ground == plain.kernel.ground);
    CHECK(p.kernel.log_domain());
}
