#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "dcal/error.hpp"

namespace dcal {

/// A pivot is treated as zero when it is <= this factor times the largest
/// diagonal entry of the system being factored.
inline constexpr double kDefaultPivotTol = 1e-12;

/// Dense symmetric matrix of small dimension (regressor cross-products,
/// covariance matrices). Only the lower triangle is stored; `at(i, j)`
/// accepts the indices in either order.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), lower_(dim * (dim + 1) / 2, 0.0) {}

    std::size_t dim() const noexcept { return dim_; }

    double& at(std::size_t i, std::size_t j) { return lower_[index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return lower_[index(i, j)]; }

    /// Accumulates `weight * x xᵀ` into the matrix.
    void add_outer(std::span<const double> x, double weight = 1.0);

    /// `A x` for symmetric A.
    std::vector<double> apply(std::span<const double> x) const;

private:
    static std::size_t index(std::size_t i, std::size_t j) noexcept {
        if (i < j) std::swap(i, j);
        return i * (i + 1) / 2 + j;
    }

    std::size_t dim_ = 0;
    std::vector<double> lower_;
};

/// Lower-triangular Cholesky factor L with A = L Lᵀ.
class CholeskyFactor {
public:
    CholeskyFactor(std::size_t dim, std::vector<double> lower)
        : dim_(dim), lower_(std::move(lower)) {}

    std::size_t dim() const noexcept { return dim_; }

    /// Entry (i, j); zero above the diagonal.
    double at(std::size_t i, std::size_t j) const {
        return i < j ? 0.0 : lower_[i * (i + 1) / 2 + j];
    }

    /// Solves A x = rhs via forward and back substitution.
    std::vector<double> solve(std::span<const double> rhs) const;

    /// `L x`, used to induce a target covariance on iid standard normals.
    std::vector<double> apply(std::span<const double> x) const;

private:
    std::size_t dim_;
    std::vector<double> lower_; // packed row-major lower triangle
};

/// Factors a symmetric positive definite matrix. Throws SingularSystem
/// naming the first pivot at which positive definiteness fails.
CholeskyFactor cholesky(const SymMatrix& a, double rel_pivot_tol = kDefaultPivotTol);

/// Solves A x = rhs for symmetric positive definite A. Throws
/// SingularSystem with the failing pivot index when A is (numerically)
/// singular; no regularization is applied.
std::vector<double> solve_spd(const SymMatrix& a, std::span<const double> rhs,
                              double rel_pivot_tol = kDefaultPivotTol);

double dot(std::span<const double> a, std::span<const double> b);

/// Compensated (Neumaier) accumulator; keeps long reductions accurate
/// without requiring any particular summation order.
class NeumaierSum {
public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace dcal
