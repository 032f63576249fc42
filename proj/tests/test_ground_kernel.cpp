#include <cmath>
#include <random>

#include "doctest.h"
#include "gak/errors.hpp"
#include "gak/ground_kernel.hpp"

using namespace gak;

namespace {

std::vector<double> random_point(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> p(d);
    for (auto& v : p) v = g(rng);
    return p;
}

const std::vector<GroundKernelSpec> all_specs = {
    GroundKernelSpec::gaussian(0.5), GroundKernelSpec::gaussian(1.0), GroundKernelSpec::gaussian(3.0),
    GroundKernelSpec::halved_gaussian_ratio(0.7), GroundKernelSpec::halved_gaussian_ratio(2.0),
    GroundKernelSpec::unit()};

}  // namespace

TEST_CASE("eval examples") {
    const std::vector<double> x{0.3, -1.2}, origin{0.0}, one{1.0};
    CHECK(eval(GroundKernelSpec::gaussian(2.0), x, x) == 1.0);
    CHECK(eval(GroundKernelSpec::gaussian(1.0), origin, one) == doctest::Approx(0.3678794).epsilon(1e-7));
    CHECK(eval(GroundKernelSpec::halved_gaussian_ratio(1.5), x, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval(GroundKernelSpec::unit(), origin, one) == 1.0);
}

TEST_CASE("eval_log stays finite where eval underflows") {
    const std::vector<double> origin{0.0}, far{30.0};  // squared distance 900
    const auto g = GroundKernelSpec::gaussian(1.0);
    CHECK(eval_log(g, origin, far) == -900.0);
    CHECK(eval(g, origin, far) == 0.0);
    const auto h = GroundKernelSpec::halved_gaussian_ratio(1.0);
    CHECK(eval_log(h, origin, far) == doctest::Approx(-900.0 - std::log(2.0)));
    CHECK(eval_log(GroundKernelSpec::unit(), origin, far) == 0.0);
}

TEST_CASE("eval_cpd") {
    const std::vector<double> a{0, 0}, b{3, 4};
    CHECK(eval_cpd({}, a, a) == 0.0);
    CHECK(eval_cpd({}, a, b) == -25.0);
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        auto x = random_point(rng, 3), y = random_point(rng, 3);
        CHECK(eval_cpd({}, x, y) == eval_cpd({}, y, x));
        CHECK(eval_cpd({}, x, y) < 0.0);
    }
}

TEST_CASE("ratio transform recovers the halved gaussian") {
    const std::vector<double> x{1.0, 2.0};
    const auto h = GroundKernelSpec::halved_gaussian_ratio(1.3);
    CHECK(ratio_transform_check(h, x, x) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ratio_transform_check(GroundKernelSpec::unit(), x, x) == 0.5);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        auto a = random_point(rng, 2), b = random_point(rng, 2);
        const double sq = squared_distance(a, b);
        const double chi = 0.5 * std::exp(-sq / (1.3 * 1.3));
        CHECK(std::abs(ratio_transform_check(h, a, b) - chi) <= 1e-12 * chi);
    }
}

TEST_CASE("ground kernel properties on random pairs") {
    std::mt19937_64 rng(3);
    for (const auto& spec : all_specs) {
        CAPTURE(to_string(spec.kind));
        CAPTURE(spec.sigma);
        for (int t = 0; t < 200; ++t) {
            const std::size_t d = 1 + t % 4;
            auto x = random_point(rng, d, 1.5), y = random_point(rng, d, 1.5);
            const double v = eval(spec, x, y);
            CHECK(v == eval(spec, y, x));
            CHECK(v > 0.0);
            if (spec.kind != GroundKernelSpec::Kind::unit) CHECK(v <= 1.0);
            if (v >= 1e-300) CHECK(std::abs(std::exp(eval_log(spec, x, y)) - v) <= 1e-12 * v);
        }
    }
}

TEST_CASE("ground kernels decrease strictly with distance") {
    const std::vector<double> origin{0.0};
    for (const auto& spec : all_specs) {
        if (spec.kind == GroundKernelSpec::Kind::unit) continue;
        double last = 2.0;
        for (double r = 0.0; r < 3.0 * spec.sigma; r += 0.05 * spec.sigma) {
            const std::vector<double> p{r};
            const double v = eval(spec, origin, p);
            CHECK(v < last);
            last = v;
        }
    }
}

TEST_CASE("ground kernel errors") {
    const std::vector<double> a{0.0}, b{0.0, 1.0}, bad{NAN};
    CHECK_THROWS_AS(eval(GroundKernelSpec::gaussian(1.0), a, b), DimensionMismatch);
    CHECK_THROWS_AS(eval_log(GroundKernelSpec::gaussian(1.0), a, bad), ValidationError);
    CHECK_THROWS_AS(eval(GroundKernelSpec::gaussian(0.0), a, a), ValidationError);
    CHECK_THROWS_AS(eval(GroundKernelSpec::gaussian(-1.0), a, a), ValidationError);
    CHECK_NOTHROW(eval(GroundKernelSpec{GroundKernelSpec::Kind::unit, -1.0}, a, a));
    CHECK(ground_kind_from_string("halved_gaussian_ratio") == GroundKernelSpec::Kind::halved_gaussian_ratio);
    CHECK_THROWS_AS(ground_kind_from_string("poly"), ValidationError);
}
