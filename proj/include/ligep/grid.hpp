#pragma once

// Periodic 1-D grids and the difference/averaging operator calculus built on them.
//
// Every spatial operator is a circulant: a short stencil of (offset, weight)
// pairs applied on each row with periodic wrap. Operators can be used
// matrix-free through `Stencil` or materialized densely through
// `StencilOperator::matrix()`.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ligep/errors.hpp"

namespace ligep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// N nodes x_j = a + j*dx (j = 0..N-1) covering the half-open period [a, b).
class Grid1D {
public:
    Grid1D(double a, double b, std::size_t nodes) : a_(a), b_(b), n_(nodes) {
        if (nodes < 3) {
            throw std::invalid_argument("Grid1D: at least 3 nodes required");
        }
        if (!(b > a)) {
            throw std::invalid_argument("Grid1D: right endpoint must exceed left endpoint");
        }
    }

    /// Grid with N = (b - a) / dx nodes; dx must divide the period.
    static Grid1D from_spacing(double a, double b, double dx) {
        if (!(dx > 0.0)) {
            throw std::invalid_argument("Grid1D: spacing must be positive");
        }
        const double count = (b - a) / dx;
        const double rounded = std::round(count);
        if (rounded < 3.0 || std::abs(count - rounded) > 1e-8 * std::max(1.0, count)) {
            throw std::invalid_argument("Grid1D: spacing " + std::to_string(dx) +
                                        " does not divide [" + std::to_string(a) + ", " +
                                        std::to_string(b) + ")");
        }
        return Grid1D(a, b, static_cast<std::size_t>(rounded));
    }

    double left() const noexcept { return a_; }
    double right() const noexcept { return b_; }
    double period() const noexcept { return b_ - a_; }
    std::size_t size() const noexcept { return n_; }
    Eigen::Index ssize() const noexcept { return static_cast<Eigen::Index>(n_); }
    double dx() const noexcept { return (b_ - a_) / static_cast<double>(n_); }

    double node(std::size_t j) const noexcept { return a_ + static_cast<double>(j) * dx(); }

    Vector nodes() const {
        Vector x(ssize());
        for (std::size_t j = 0; j < n_; ++j) x(static_cast<Eigen::Index>(j)) = node(j);
        return x;
    }

    /// Periodic index wrap.
    std::size_t wrap(std::ptrdiff_t j) const noexcept {
        const auto n = static_cast<std::ptrdiff_t>(n_);
        return static_cast<std::size_t>(((j % n) + n) % n);
    }

private:
    double a_;
    double b_;
    std::size_t n_;
};

/// Cyclic stencil: row j of the operator reads u[j + offset] * weight.
struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;

    static Stencil identity() { return {{0}, {1.0}}; }

    std::size_t width() const {
        if (offsets.empty()) return 0;
        const auto [lo, hi] = std::minmax_element(offsets.begin(), offsets.end());
        return static_cast<std::size_t>(*hi - *lo + 1);
    }

    Stencil scaled(double factor) const {
        Stencil s = *this;
        for (double& w : s.weights) w *= factor;
        return s;
    }

    /// y = S u with periodic wrap.
    Vector apply(const Vector& u) const {
        const Eigen::Index n = u.size();
        Vector y = Vector::Zero(n);
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const Eigen::Index o = ((offsets[k] % n) + n) % n;
            const double w = weights[k];
            // y_j += w * u_{j+o}, split at the wrap point.
            y.head(n - o) += w * u.segment(o, n - o);
            if (o > 0) y.tail(o) += w * u.head(o);
        }
        return y;
    }

    /// Y = S X (stencil acting on each column).
    Matrix apply_left(const Matrix& x) const {
        const Eigen::Index n = x.rows();
        Matrix y = Matrix::Zero(n, x.cols());
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const Eigen::Index o = ((offsets[k] % n) + n) % n;
            const double w = weights[k];
            y.topRows(n - o) += w * x.middleRows(o, n - o);
            if (o > 0) y.bottomRows(o) += w * x.topRows(o);
        }
        return y;
    }

    /// Y = X S (stencil acting from the right; column j of S has weight w at row j - offset).
    Matrix apply_right(const Matrix& x) const {
        const Eigen::Index n = x.cols();
        Matrix y = Matrix::Zero(x.rows(), n);
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const Eigen::Index o = ((offsets[k] % n) + n) % n;
            const double w = weights[k];
            // (X S)_{:, j} += w * X_{:, j - o}
            y.rightCols(n - o) += w * x.leftCols(n - o);
            if (o > 0) y.leftCols(o) += w * x.rightCols(o);
        }
        return y;
    }

    /// Dense circulant realization on n nodes.
    Matrix to_matrix(Eigen::Index n) const {
        Matrix m = Matrix::Zero(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < offsets.size(); ++k) {
                const Eigen::Index col = (((j + offsets[k]) % n) + n) % n;
                m(j, col) += weights[k];
            }
        }
        return m;
    }
};

/// Stencil of the product `lhs * rhs` (circulants commute, so order only
/// affects summation order).
inline Stencil compose(const Stencil& lhs, const Stencil& rhs) {
    Stencil out;
    for (std::size_t i = 0; i < lhs.offsets.size(); ++i) {
        for (std::size_t k = 0; k < rhs.offsets.size(); ++k) {
            const int off = lhs.offsets[i] + rhs.offsets[k];
            const double w = lhs.weights[i] * rhs.weights[k];
            auto it = std::find(out.offsets.begin(), out.offsets.end(), off);
            if (it == out.offsets.end()) {
                out.offsets.push_back(off);
                out.weights.push_back(w);
            } else {
                out.weights[static_cast<std::size_t>(it - out.offsets.begin())] += w;
            }
        }
    }
    return out;
}

inline Stencil power(const Stencil& s, int exponent) {
    Stencil out = Stencil::identity();
    for (int i = 0; i < exponent; ++i) out = compose(out, s);
    return out;
}

/// Accumulate `a += coeff * L diag(s) R` for stencils L, R without forming dense factors.
inline void add_stencil_product(Matrix& a, double coeff, const Stencil& left, const Vector& s,
                                const Stencil& right) {
    const Eigen::Index n = a.rows();
    detail::require_same_size(a.cols(), n, "add_stencil_product");
    detail::require_same_size(s.size(), n, "add_stencil_product");
    for (Eigen::Index j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < left.offsets.size(); ++p) {
            const Eigen::Index mid = (((j + left.offsets[p]) % n) + n) % n;
            const double lw = coeff * left.weights[p] * s(mid);
            for (std::size_t q = 0; q < right.offsets.size(); ++q) {
                const Eigen::Index col = (((mid + right.offsets[q]) % n) + n) % n;
                a(j, col) += lw * right.weights[q];
            }
        }
    }
}

enum class OperatorKind {
    ForwardDiff,   ///< δx:    (u_{j+1} - u_j) / h
    CentralDiff,   ///< δx½:   (u_{j+1} - u_{j-1}) / 2h
    Average,       ///< μx:    (u_{j+1} + u_j) / 2
    SecondDiff,    ///< Dxx:   (u_{j-1} - 2u_j + u_{j+1}) / h²
    ThirdDiff,     ///< Dxxx:  5-point second-order ∂xxx
};

inline std::string to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::ForwardDiff: return "forward-diff";
        case OperatorKind::CentralDiff: return "central-diff";
        case OperatorKind::Average: return "average";
        case OperatorKind::SecondDiff: return "second-diff";
        case OperatorKind::ThirdDiff: return "third-diff";
    }
    return "unknown";
}

inline Stencil make_stencil(OperatorKind kind, double h) {
    switch (kind) {
        case OperatorKind::ForwardDiff: return {{0, 1}, {-1.0 / h, 1.0 / h}};
        case OperatorKind::CentralDiff: return {{-1, 1}, {-0.5 / h, 0.5 / h}};
        case OperatorKind::Average: return {{0, 1}, {0.5, 0.5}};
        case OperatorKind::SecondDiff: {
            const double h2 = h * h;
            return {{-1, 0, 1}, {1.0 / h2, -2.0 / h2, 1.0 / h2}};
        }
        case OperatorKind::ThirdDiff: {
            const double h3 = h * h * h;
            return {{-2, -1, 1, 2}, {-0.5 / h3, 1.0 / h3, -1.0 / h3, 0.5 / h3}};
        }
    }
    throw std::invalid_argument("make_stencil: unknown operator kind");
}

/// A circulant operator on a grid with its dense N×N realization.
class StencilOperator {
public:
    StencilOperator(OperatorKind kind, const Grid1D& grid)
        : kind_(kind), grid_(grid), stencil_(make_stencil(kind, grid.dx())) {
        const std::size_t span = stencil_.width();
        if (grid.size() < span) {
            throw std::invalid_argument("StencilOperator: " + to_string(kind) + " needs at least " +
                                        std::to_string(span) + " nodes, grid has " +
                                        std::to_string(grid.size()));
        }
        matrix_ = stencil_.to_matrix(grid.ssize());
    }

    OperatorKind kind() const noexcept { return kind_; }
    const Grid1D& grid() const noexcept { return grid_; }
    const Stencil& stencil() const noexcept { return stencil_; }
    const Matrix& matrix() const noexcept { return matrix_; }

    Vector apply(const Vector& u) const {
        detail::require_same_size(u.size(), grid_.ssize(), "StencilOperator::apply");
        return stencil_.apply(u);
    }

private:
    OperatorKind kind_;
    Grid1D grid_;
    Stencil stencil_;
    Matrix matrix_;
};

inline StencilOperator build_operator(const Grid1D& grid, OperatorKind kind) {
    return StencilOperator(kind, grid);
}

/// Forward difference and mean across two time levels.
struct TimeDifferences {
    Vector delta;  ///< δt = (u_next - u_prev) / dt
    Vector mean;   ///< μt = (u_next + u_prev) / 2
};

inline TimeDifferences apply_time_ops(const Vector& u_prev, const Vector& u_next, double dt) {
    detail::require_same_size(u_prev.size(), u_next.size(), "apply_time_ops");
    if (!(dt > 0.0)) throw std::invalid_argument("apply_time_ops: dt must be positive");
    return {(u_next - u_prev) / dt, (u_next + u_prev) / 2.0};
}

}  // namespace ligep
