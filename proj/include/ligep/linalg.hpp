#pragma once

// Dense kernel: pivoted LU, thin SVD, and the block-diagonal basis lift I_d ⊗ V.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "ligep/errors.hpp"
#include "ligep/grid.hpp"

namespace ligep {

inline constexpr double kSingularPivot = 1e-300;

/// Partial-pivoting LU of a square matrix, factorized once and reused.
///
/// `solve` performs one step of iterative refinement against the stored
/// matrix; the extra O(n²) matvec is negligible next to the factorization.
class LuFactorization {
public:
    LuFactorization() = default;

    explicit LuFactorization(Matrix a, std::optional<std::size_t> step = std::nullopt)
        : a_(std::move(a)) {
        if (a_.rows() != a_.cols()) {
            throw DimensionError("lu: matrix must be square, got " + std::to_string(a_.rows()) +
                                 "x" + std::to_string(a_.cols()));
        }
        if (!a_.allFinite()) {
            throw SingularMatrixError("lu: matrix has non-finite entries", step);
        }
        lu_.compute(a_);
        const Vector pivots = lu_.matrixLU().diagonal();
        for (Eigen::Index i = 0; i < pivots.size(); ++i) {
            if (!(std::abs(pivots(i)) >= kSingularPivot)) {
                throw SingularMatrixError("lu: zero pivot at row " + std::to_string(i), step);
            }
        }
        step_ = step;
    }

    Eigen::Index size() const noexcept { return a_.rows(); }
    const Matrix& matrix() const noexcept { return a_; }

    Vector solve(const Vector& b) const {
        detail::require_same_size(b.size(), a_.rows(), "lu_solve");
        Vector x = lu_.solve(b);
        x += lu_.solve(b - a_ * x);
        if (!x.allFinite()) {
            throw SingularMatrixError("lu: solve produced non-finite values", step_);
        }
        return x;
    }

private:
    Matrix a_;
    Eigen::PartialPivLU<Matrix> lu_;
    std::optional<std::size_t> step_;
};

inline Vector lu_solve(const Matrix& a, const Vector& b,
                       std::optional<std::size_t> step = std::nullopt) {
    detail::require_same_size(b.size(), a.rows(), "lu_solve");
    return LuFactorization(a, step).solve(b);
}

struct ThinSvd {
    Matrix u;      ///< m×k, orthonormal columns
    Vector sigma;  ///< k, non-negative, non-increasing
    Matrix vt;     ///< k×n, orthonormal rows
};

inline ThinSvd thin_svd(const Matrix& z) {
    if (!z.allFinite()) throw std::invalid_argument("thin_svd: non-finite input");
    Eigen::BDCSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
}

/// Left singular vectors and the singular values only (all a POD basis needs).
inline std::pair<Matrix, Vector> left_singular(const Matrix& z) {
    if (!z.allFinite()) throw std::invalid_argument("left_singular: non-finite input");
    Eigen::BDCSVD<Matrix> svd(z, Eigen::ComputeThinU);
    return {svd.matrixU(), svd.singularValues()};
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// 𝐕 = I_d ⊗ V applied blockwise, never materialized.
class BlockDiagonalLift {
public:
    BlockDiagonalLift(Matrix v, std::size_t blocks) : v_(std::move(v)), blocks_(blocks) {
        if (blocks == 0) throw std::invalid_argument("BlockDiagonalLift: block count must be positive");
    }

    const Matrix& basis() const noexcept { return v_; }
    std::size_t blocks() const noexcept { return blocks_; }
    Eigen::Index full_block() const noexcept { return v_.rows(); }
    Eigen::Index reduced_block() const noexcept { return v_.cols(); }

    /// (𝐕 x)_i = V x_i
    Vector apply(const Vector& x) const {
        const Eigen::Index n = v_.rows();
        const Eigen::Index r = v_.cols();
        detail::require_same_size(x.size(), r * d(), "lift_apply");
        Vector y(n * d());
        for (Eigen::Index i = 0; i < d(); ++i) y.segment(i * n, n) = v_ * x.segment(i * r, r);
        return y;
    }

    /// (𝐕ᵀ y)_i = Vᵀ y_i
    Vector project(const Vector& y) const {
        const Eigen::Index n = v_.rows();
        const Eigen::Index r = v_.cols();
        detail::require_same_size(y.size(), n * d(), "lift_project");
        Vector x(r * d());
        for (Eigen::Index i = 0; i < d(); ++i) {
            x.segment(i * r, r) = v_.transpose() * y.segment(i * n, n);
        }
        return x;
    }

    Matrix materialize() const {
        return kron(Matrix::Identity(d(), d()), v_);
    }

private:
    Eigen::Index d() const noexcept { return static_cast<Eigen::Index>(blocks_); }

    Matrix v_;
    std::size_t blocks_;
};

inline Vector lift_apply(const BlockDiagonalLift& lift, const Vector& x) { return lift.apply(x); }
inline Vector lift_project(const BlockDiagonalLift& lift, const Vector& y) {
    return lift.project(y);
}

}  // namespace ligep
