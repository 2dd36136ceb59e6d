#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mctr {

/// Symmetric positive-definite banded matrix stored by diagonals:
/// diag[k][i] holds A(i, i+k) for k = 0..bandwidth.
class BandedSpd {
public:
    BandedSpd(size_t n, size_t bandwidth)
        : n_(n), bw_(bandwidth), diag_(bandwidth + 1, std::vector<double>(n, 0.0)) {}

    size_t size() const { return n_; }
    size_t bandwidth() const { return bw_; }

    double& at(size_t i, size_t j) {
        if (j < i) std::swap(i, j);
        return diag_[j - i][i];
    }
    double get(size_t i, size_t j) const {
        if (j < i) std::swap(i, j);
        return diag_[j - i][i];
    }

    /// In-place banded Cholesky solve A x = b. Throws if not positive definite.
    std::vector<double> solve(std::vector<double> b) const;

private:
    size_t n_;
    size_t bw_;
    std::vector<std::vector<double>> diag_;
};

}  // namespace mctr
