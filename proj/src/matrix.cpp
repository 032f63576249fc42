#include "gak/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "gak/errors.hpp"

namespace gak {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size(), c = r ? rows.front().size() : 0;
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw ValidationError("ragged matrix rows");
        std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
    }
    return m;
}

Matrix Matrix::submatrix(std::span<const std::size_t> ri, std::span<const std::size_t> ci) const {
    Matrix out(ri.size(), ci.size());
    for (std::size_t a = 0; a < ri.size(); ++a)
        for (std::size_t b = 0; b < ci.size(); ++b) out(a, b) = (*this)(ri[a], ci[b]);
    return out;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

void require_symmetric(const Matrix& a, double rel_tol) {
    if (a.rows() != a.cols())
        throw ValidationError("matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                              ", expected square");
    for (double v : a.data())
        if (!std::isfinite(v)) throw ValidationError("matrix has non-finite entries");
    const double tol = rel_tol * std::max(1.0, a.max_abs());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol)
                throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
}

std::vector<double> symmetric_eigenvalues(const Matrix& input, double tol) {
    require_symmetric(input, 1e-12);
    const std::size_t n = input.rows();
    Matrix a = input;
    // Work on the exactly symmetrized copy.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };
    if (tol <= 0.0) {
        double fro = 0.0;
        for (double v : a.data()) fro += v * v;
        tol = 1e-12 * std::max(1.0, std::sqrt(fro));
    }

    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle zeroing a(p,q) (Golub & Van Loan, sym.schur2).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
            }
        }
    }
    if (off_norm() > tol) throw ConvergenceError("Jacobi eigensolver did not converge");

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace gak
