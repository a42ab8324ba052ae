#include "dcal/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dcal {

void SymMatrix::add_outer(std::span<const double> x, double weight) {
    for (std::size_t i = 0; i < dim_; ++i) {
        const double wxi = weight * x[i];
        for (std::size_t j = 0; j <= i; ++j) {
            lower_[i * (i + 1) / 2 + j] += wxi * x[j];
        }
    }
}

std::vector<double> SymMatrix::apply(std::span<const double> x) const {
    std::vector<double> out(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            out[i] += at(i, j) * x[j];
        }
    }
    return out;
}

std::vector<double> CholeskyFactor::solve(std::span<const double> rhs) const {
    std::vector<double> y(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = rhs[i];
        for (std::size_t j = 0; j < i; ++j) {
            s -= at(i, j) * y[j];
        }
        y[i] = s / at(i, i);
    }
    std::vector<double> x(dim_);
    for (std::size_t ii = dim_; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < dim_; ++j) {
            s -= at(j, ii) * x[j];
        }
        x[ii] = s / at(ii, ii);
    }
    return x;
}

std::vector<double> CholeskyFactor::apply(std::span<const double> x) const {
    std::vector<double> out(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            out[i] += at(i, j) * x[j];
        }
    }
    return out;
}

CholeskyFactor cholesky(const SymMatrix& a, double rel_pivot_tol) {
    const std::size_t n = a.dim();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max_diag = std::max(max_diag, std::abs(a.at(i, i)));
    }
    const double threshold = rel_pivot_tol * max_diag;

    std::vector<double> lower(n * (n + 1) / 2, 0.0);
    auto l = [&](std::size_t i, std::size_t j) -> double& {
        return lower[i * (i + 1) / 2 + j];
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            if (i == j) {
                if (s <= threshold) {
                    throw SingularSystem(
                        i, "matrix is not positive definite at pivot " + std::to_string(i) +
                               " (pivot " + std::to_string(s) + " <= " + std::to_string(threshold) +
                               "); check for collinear columns");
                }
                l(i, j) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return CholeskyFactor(n, std::move(lower));
}

std::vector<double> solve_spd(const SymMatrix& a, std::span<const double> rhs,
                              double rel_pivot_tol) {
    return cholesky(a, rel_pivot_tol).solve(rhs);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

} // namespace dcal
