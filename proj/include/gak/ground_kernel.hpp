#pragma once

#include <span>
#include <string>

namespace gak {

/// Local kernel k on R^d x R^d.
///
///   gaussian               exp(-|x-y|^2 / sigma^2)   (no factor 2)
///   halved_gaussian_ratio  h / (1 - h),  h = exp(-|x-y|^2 / sigma^2) / 2
///   unit                   1
///
/// The ratio form is the one for which k / (1 + k) is itself the (p.d.)
/// halved Gaussian. `unit` makes the alignment kernel count alignments.
struct GroundKernelSpec {
    enum class Kind { gaussian, halved_gaussian_ratio, unit };

    Kind kind = Kind::gaussian;
    double sigma = 1.0;

    static GroundKernelSpec gaussian(double sigma) { return {Kind::gaussian, sigma}; }
    static GroundKernelSpec halved_gaussian_ratio(double sigma) {
        return {Kind::halved_gaussian_ratio, sigma};
    }
    static GroundKernelSpec unit() { return {Kind::unit, 1.0}; }

    void validate() const;

    friend bool operator==(const GroundKernelSpec&, const GroundKernelSpec&) = default;
};

std::string to_string(GroundKernelSpec::Kind kind);
GroundKernelSpec::Kind ground_kind_from_string(const std::string& name);

/// Conditionally positive definite local score. Only -|x-y|^2 is provided.
struct CpdScoreSpec {
    enum class Kind { neg_sq_euclid };
    Kind kind = Kind::neg_sq_euclid;

    friend bool operator==(const CpdScoreSpec&, const CpdScoreSpec&) = default;
};

/// |x-y|^2. Throws DimensionMismatch / ValidationError on bad input.
double squared_distance(std::span<const double> x, std::span<const double> y);

double eval(const GroundKernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// log k(x,y), computed without ever exponentiating the Gaussian, so it stays
/// exact where eval() underflows.
double eval_log(const GroundKernelSpec& spec, std::span<const double> x, std::span<const double> y);

double eval_cpd(const CpdScoreSpec& spec, std::span<const double> x, std::span<const double> y);

/// k / (1 + k). For halved_gaussian_ratio this recovers exp(-|x-y|^2/sigma^2) / 2.
double ratio_transform_check(const GroundKernelSpec& spec, std::span<const double> x,
                             std::span<const double> y);

namespace detail {

// Unchecked hot-path versions used inside the DP loops. Inputs must already
// be validated (same dimension, finite).
inline double sq_dist_unchecked(const double* x, const double* y, std::size_t d) noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        const double diff = x[k] - y[k];
        acc += diff * diff;
    }
    return acc;
}

double eval_log_from_sq(const GroundKernelSpec& spec, double sq) noexcept;
double eval_from_sq(const GroundKernelSpec& spec, double sq) noexcept;

}  // namespace detail

}  // namespace gak
