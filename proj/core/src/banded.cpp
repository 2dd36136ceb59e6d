#include "mctr/banded.hpp"

#include <cmath>

namespace mctr {

std::vector<double> BandedSpd::solve(std::vector<double> b) const {
    if (b.size() != n_) throw std::invalid_argument("BandedSpd::solve: size mismatch");

    // Cholesky factor L in the same banded layout: L(i+k, i) in l[k][i].
    std::vector<std::vector<double>> l(bw_ + 1, std::vector<double>(n_, 0.0));
    for (size_t j = 0; j < n_; ++j) {
        double d = diag_[0][j];
        const size_t kmin = j >= bw_ ? j - bw_ : 0;
        for (size_t k = kmin; k < j; ++k) d -= l[j - k][k] * l[j - k][k];
        if (d <= 0.0) throw std::runtime_error("BandedSpd::solve: matrix not positive definite");
        const double lj = std::sqrt(d);
        l[0][j] = lj;
        const size_t imax = std::min(n_ - 1, j + bw_);
        for (size_t i = j + 1; i <= imax; ++i) {
            double s = diag_[i - j][j];
            const size_t km = i >= bw_ ? i - bw_ : 0;
            for (size_t k = km; k < j; ++k) s -= l[i - k][k] * l[j - k][k];
            l[i - j][j] = s / lj;
        }
    }

    // forward substitution L y = b
    for (size_t i = 0; i < n_; ++i) {
        double s = b[i];
        const size_t kmin = i >= bw_ ? i - bw_ : 0;
        for (size_t k = kmin; k < i; ++k) s -= l[i - k][k] * b[k];
        b[i] = s / l[0][i];
    }
    // back substitution L^T x = y
    for (size_t ii = n_; ii-- > 0;) {
        double s = b[ii];
        const size_t jmax = std::min(n_ - 1, ii + bw_);
        for (size_t j = ii + 1; j <= jmax; ++j) s -= l[j - ii][ii] * b[j];
        b[ii] = s / l[0][ii];
    }
    return b;
}

}  // namespace mctr
