#include "gak/ground_kernel.hpp"

#include <cmath>

#include "gak/errors.hpp"

namespace gak {

void GroundKernelSpec::validate() const {
    if (kind != Kind::unit && !(sigma > 0.0 && std::isfinite(sigma)))
        throw ValidationError("sigma must be positive and finite, got " + std::to_string(sigma));
}

std::string to_string(GroundKernelSpec::Kind kind) {
    switch (kind) {
        case GroundKernelSpec::Kind::gaussian: return "gaussian";
        case GroundKernelSpec::Kind::halved_gaussian_ratio: return "halved_gaussian_ratio";
        case GroundKernelSpec::Kind::unit: return "unit";
    }
    return "?";
}

GroundKernelSpec::Kind ground_kind_from_string(const std::string& name) {
    if (name == "gaussian") return GroundKernelSpec::Kind::gaussian;
    if (name == "halved_gaussian_ratio") return GroundKernelSpec::Kind::halved_gaussian_ratio;
    if (name == "unit") return GroundKernelSpec::Kind::unit;
    throw ValidationError("unknown ground kernel '" + name + "'");
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DimensionMismatch("points have dimensions " + std::to_string(x.size()) + " and " +
                                std::to_string(y.size()));
    if (x.empty()) throw ValidationError("points must have dimension >= 1");
    for (std::size_t k = 0; k < x.size(); ++k)
        if (!std::isfinite(x[k]) || !std::isfinite(y[k]))
            throw ValidationError("non-finite coordinate");
    return detail::sq_dist_unchecked(x.data(), y.data(), x.size());
}

namespace detail {

double eval_log_from_sq(const GroundKernelSpec& spec, double sq) noexcept {
    switch (spec.kind) {
        case GroundKernelSpec::Kind::gaussian:
            return -sq / (spec.sigma * spec.sigma);
        case GroundKernelSpec::Kind::halved_gaussian_ratio: {
            // log(h / (1 - h)) = log h - log1p(-h); log h needs no exp.
            const double log_h = -std::log(2.0) - sq / (spec.sigma * spec.sigma);
            return log_h - std::log1p(-std::exp(log_h));
        }
        case GroundKernelSpec::Kind::unit:
            return 0.0;
    }
    return 0.0;
}

double eval_from_sq(const GroundKernelSpec& spec, double sq) noexcept {
    switch (spec.kind) {
        case GroundKernelSpec::Kind::gaussian:
            return std::exp(-sq / (spec.sigma * spec.sigma));
        case GroundKernelSpec::Kind::halved_gaussian_ratio: {
            const double h = 0.5 * std::exp(-sq / (spec.sigma * spec.sigma));
            return h / (1.0 - h);
        }
        case GroundKernelSpec::Kind::unit:
            return 1.0;
    }
    return 1.0;
}

}  // namespace detail

double eval(const GroundKernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    spec.validate();
    return detail::eval_from_sq(spec, squared_distance(x, y));
}

double eval_log(const GroundKernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    spec.validate();
    return detail::eval_log_from_sq(spec, squared_distance(x, y));
}

double eval_cpd(const CpdScoreSpec&, std::span<const double> x, std::span<const double> y) {
    return -squared_distance(x, y);
}

double ratio_transform_check(const GroundKernelSpec& spec, std::span<const double> x,
                             std::span<const double> y) {
    const double k = eval(spec, x, y);
    return k / (1.0 + k);
}

}  // namespace gak
