#pragma once

// Kahan's linearly implicit integrator for quadratic ODEs
//
//     M y' = Q(y) + B y + c,      Q(y) = T(y, y),
//
// and the polarization machinery for quadratic and cubic forms.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ligep/errors.hpp"
#include "ligep/grid.hpp"
#include "ligep/linalg.hpp"

namespace ligep {

/// Right-hand side Q(y) + B y + c with Q given through its symmetric bilinear map T.
///
/// `bilinear` may be empty (purely linear system). `partial`, when set, returns the
/// matrix of b ↦ T(a, b) directly; otherwise it is probed column by column.
/// `mass` is an optional constant left-hand matrix (identity when unset).
/// B need not be symmetric: Galerkin baselines feed skew or general B here.
struct QuadraticODE {
    using Bilinear = std::function<Vector(const Vector&, const Vector&)>;
    using Partial = std::function<Matrix(const Vector&)>;

    Eigen::Index dim = 0;
    Bilinear bilinear;
    Partial partial;
    Matrix linear;
    Vector constant;
    std::optional<Matrix> mass;

    static QuadraticODE make(Eigen::Index dim, Bilinear t, Matrix b = {}, Vector c = {}) {
        QuadraticODE sys;
        sys.dim = dim;
        sys.bilinear = std::move(t);
        sys.linear = b.size() == 0 ? Matrix::Zero(dim, dim) : std::move(b);
        sys.constant = c.size() == 0 ? Vector::Zero(dim) : std::move(c);
        sys.validate_shapes();
        return sys;
    }

    void validate_shapes() const {
        detail::require_same_size(linear.rows(), dim, "QuadraticODE linear part");
        detail::require_same_size(linear.cols(), dim, "QuadraticODE linear part");
        detail::require_same_size(constant.size(), dim, "QuadraticODE constant part");
        if (mass) {
            detail::require_same_size(mass->rows(), dim, "QuadraticODE mass");
            detail::require_same_size(mass->cols(), dim, "QuadraticODE mass");
        }
    }

    bool is_linear() const noexcept { return !bilinear; }

    Vector apply_bilinear(const Vector& a, const Vector& b) const {
        detail::require_same_size(a.size(), dim, "QuadraticODE::bilinear");
        detail::require_same_size(b.size(), dim, "QuadraticODE::bilinear");
        if (!bilinear) return Vector::Zero(dim);
        return bilinear(a, b);
    }

    Vector quadratic(const Vector& y) const { return apply_bilinear(y, y); }

    /// Matrix of b ↦ T(a, b).
    Matrix bilinear_matrix(const Vector& a) const {
        detail::require_same_size(a.size(), dim, "QuadraticODE::bilinear_matrix");
        if (!bilinear) return Matrix::Zero(dim, dim);
        if (partial) return partial(a);
        Matrix m(dim, dim);
        Vector e = Vector::Zero(dim);
        for (Eigen::Index k = 0; k < dim; ++k) {
            e(k) = 1.0;
            m.col(k) = bilinear(a, e);
            e(k) = 0.0;
        }
        return m;
    }

    Vector rhs(const Vector& y) const { return quadratic(y) + linear * y + constant; }

    /// Largest relative |T(a,b) - T(b,a)| over random pairs.
    double bilinear_asymmetry(int trials = 8, unsigned seed = 7) const {
        if (!bilinear) return 0.0;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            Vector a(dim), b(dim);
            for (Eigen::Index i = 0; i < dim; ++i) {
                a(i) = normal(rng);
                b(i) = normal(rng);
            }
            const Vector ab = bilinear(a, b);
            const Vector ba = bilinear(b, a);
            const double scale = std::max(ab.norm(), 1e-300);
            worst = std::max(worst, (ab - ba).norm() / scale);
        }
        return worst;
    }
};

/// Q̄(a, b) = ½(Q(a+b) − Q(a) − Q(b)).
inline Vector polarize_quadratic(const QuadraticODE& sys, const Vector& a, const Vector& b) {
    detail::require_same_size(a.size(), sys.dim, "polarize_quadratic");
    detail::require_same_size(b.size(), sys.dim, "polarize_quadratic");
    return 0.5 * (sys.quadratic(a + b) - sys.quadratic(a) - sys.quadratic(b));
}

/// One Kahan step: (M/dt − T(y,·) − B/2) y' = (M/dt + B/2) y + c.
inline Vector kahan_step(const QuadraticODE& sys, const Vector& y, double dt,
                         std::optional<std::size_t> step = std::nullopt) {
    detail::require_same_size(y.size(), sys.dim, "kahan_step");
    if (!(dt > 0.0)) throw std::invalid_argument("kahan_step: dt must be positive");
    const Matrix mass_dt = sys.mass ? Matrix(*sys.mass / dt)
                                    : Matrix(Matrix::Identity(sys.dim, sys.dim) / dt);
    Matrix lhs = mass_dt - 0.5 * sys.linear;
    if (!sys.is_linear()) lhs -= sys.bilinear_matrix(y);
    const Vector rhs = mass_dt * y + 0.5 * (sys.linear * y) + sys.constant;
    return lu_solve(lhs, rhs, step);
}

/// Kahan stepper that reuses the factorization when the system is linear
/// (T = 0 and B constant); otherwise refactorizes every step.
class KahanStepper {
public:
    KahanStepper(QuadraticODE sys, double dt) : sys_(std::move(sys)), dt_(dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("KahanStepper: dt must be positive");
        sys_.validate_shapes();
        if (sys_.is_linear()) {
            const Matrix mass_dt = sys_.mass ? Matrix(*sys_.mass / dt_)
                                             : Matrix(Matrix::Identity(sys_.dim, sys_.dim) / dt_);
            constant_lu_.emplace(mass_dt - 0.5 * sys_.linear);
            rhs_matrix_ = mass_dt + 0.5 * sys_.linear;
        }
    }

    const QuadraticODE& system() const noexcept { return sys_; }
    double dt() const noexcept { return dt_; }

    Vector step(const Vector& y, std::optional<std::size_t> n = std::nullopt) const {
        if (constant_lu_) {
            detail::require_same_size(y.size(), sys_.dim, "KahanStepper::step");
            return constant_lu_->solve(rhs_matrix_ * y + sys_.constant);
        }
        return kahan_step(sys_, y, dt_, n);
    }

private:
    QuadraticODE sys_;
    double dt_;
    std::optional<LuFactorization> constant_lu_;
    Matrix rhs_matrix_;
};

/// Explicit third-order array G with T(a, b)_i = Σ_{j,k} G[i,j,k] a_j b_k.
///
/// Stored as an (n·n)×n slab so that the matrix of b ↦ T(a, b) is one
/// matrix-vector product: slab(i + n·k, j) = G[i,j,k].
class BilinearTensor {
public:
    BilinearTensor() = default;
    explicit BilinearTensor(Eigen::Index n) : n_(n), slab_(Matrix::Zero(n * n, n)) {}

    Eigen::Index size() const noexcept { return n_; }

    double& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
        return slab_(i + n_ * k, j);
    }
    double operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return slab_(i + n_ * k, j);
    }

    Matrix& slab() noexcept { return slab_; }
    const Matrix& slab() const noexcept { return slab_; }

    /// Matrix M with M(i, k) = Σ_j G[i,j,k] a_j.
    Matrix partial(const Vector& a) const {
        detail::require_same_size(a.size(), n_, "BilinearTensor::partial");
        const Vector flat = slab_ * a;
        return Eigen::Map<const Matrix>(flat.data(), n_, n_);
    }

    Vector contract(const Vector& a, const Vector& b) const { return partial(a) * b; }

    /// G[i,j,k] ← ½(G[i,j,k] + G[i,k,j]).
    void symmetrize() {
        for (Eigen::Index i = 0; i < n_; ++i) {
            for (Eigen::Index j = 0; j < n_; ++j) {
                for (Eigen::Index k = j + 1; k < n_; ++k) {
                    const double avg = 0.5 * ((*this)(i, j, k) + (*this)(i, k, j));
                    (*this)(i, j, k) = avg;
                    (*this)(i, k, j) = avg;
                }
            }
        }
    }

    double max_asymmetry() const {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n_; ++i)
            for (Eigen::Index j = 0; j < n_; ++j)
                for (Eigen::Index k = 0; k < n_; ++k)
                    worst = std::max(worst, std::abs((*this)(i, j, k) - (*this)(i, k, j)));
        return worst;
    }

private:
    Eigen::Index n_ = 0;
    Matrix slab_;
};

/// S(z) = zᵀQ(z)z + zᵀBz + cᵀz + d with Q(z)_{jk} = Σ_i C[i,j,k] z_i and C fully symmetric.
///
/// 6·Q(z) is the linear part of the Hessian of S and 2·B its constant part.
class CubicHamiltonian {
public:
    CubicHamiltonian(std::size_t dim, std::vector<double> cubic, Matrix quadratic, Vector linear,
                     double constant)
        : dim_(static_cast<Eigen::Index>(dim)),
          cubic_(std::move(cubic)),
          quadratic_(std::move(quadratic)),
          linear_(std::move(linear)),
          constant_(constant) {
        if (cubic_.size() != dim * dim * dim) {
            throw DimensionError("CubicHamiltonian: cubic coefficient array must have d^3 entries");
        }
        detail::require_same_size(quadratic_.rows(), dim_, "CubicHamiltonian B");
        detail::require_same_size(quadratic_.cols(), dim_, "CubicHamiltonian B");
        detail::require_same_size(linear_.size(), dim_, "CubicHamiltonian c");
        double scale = 0.0;
        for (double v : cubic_) scale = std::max(scale, std::abs(v));
        for (Eigen::Index i = 0; i < dim_; ++i)
            for (Eigen::Index j = 0; j < dim_; ++j)
                for (Eigen::Index k = 0; k < dim_; ++k) {
                    const double v = c(i, j, k);
                    if (std::abs(v - c(j, i, k)) > 1e-14 * scale ||
                        std::abs(v - c(i, k, j)) > 1e-14 * scale) {
                        throw std::invalid_argument("CubicHamiltonian: cubic coefficients not symmetric");
                    }
                }
        if ((quadratic_ - quadratic_.transpose()).cwiseAbs().maxCoeff() >
            1e-14 * std::max(1.0, quadratic_.cwiseAbs().maxCoeff())) {
            throw std::invalid_argument("CubicHamiltonian: B must be symmetric");
        }
    }

    /// Symmetrizes an arbitrary cubic coefficient array before constructing.
    static CubicHamiltonian from_cubic_terms(std::size_t dim, const std::vector<double>& cubic,
                                             const Matrix& quadratic, const Vector& linear,
                                             double constant) {
        const auto d = dim;
        std::vector<double> sym(d * d * d, 0.0);
        auto at = [d](const std::vector<double>& a, std::size_t i, std::size_t j, std::size_t k) {
            return a[(i * d + j) * d + k];
        };
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k)
                    sym[(i * d + j) * d + k] = (at(cubic, i, j, k) + at(cubic, i, k, j) +
                                                at(cubic, j, i, k) + at(cubic, j, k, i) +
                                                at(cubic, k, i, j) + at(cubic, k, j, i)) /
                                               6.0;
        return CubicHamiltonian(dim, std::move(sym), 0.5 * (quadratic + quadratic.transpose()),
                                linear, constant);
    }

    Eigen::Index dim() const noexcept { return dim_; }
    const Matrix& quadratic() const noexcept { return quadratic_; }
    const Vector& linear() const noexcept { return linear_; }
    double constant() const noexcept { return constant_; }

    double c(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
        return cubic_[static_cast<std::size_t>((i * dim_ + j) * dim_ + k)];
    }

    Matrix q_matrix(const Vector& z) const {
        detail::require_same_size(z.size(), dim_, "CubicHamiltonian::q_matrix");
        Matrix q = Matrix::Zero(dim_, dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) {
            if (z(i) == 0.0) continue;
            for (Eigen::Index j = 0; j < dim_; ++j)
                for (Eigen::Index k = 0; k < dim_; ++k) q(j, k) += c(i, j, k) * z(i);
        }
        return q;
    }

    double value(const Vector& z) const {
        return z.dot(q_matrix(z) * z) + z.dot(quadratic_ * z) + linear_.dot(z) + constant_;
    }

    Vector gradient(const Vector& z) const {
        return 3.0 * (q_matrix(z) * z) + 2.0 * (quadratic_ * z) + linear_;
    }

    /// S̄(x,y,z) = xᵀQ(y)z + ⅓(xᵀBy + yᵀBz + zᵀBx) + ⅓cᵀ(x+y+z) + d.
    double polarized(const Vector& x, const Vector& y, const Vector& z) const {
        detail::require_same_size(x.size(), dim_, "polarize_cubic");
        detail::require_same_size(y.size(), dim_, "polarize_cubic");
        detail::require_same_size(z.size(), dim_, "polarize_cubic");
        return x.dot(q_matrix(y) * z) +
               (x.dot(quadratic_ * y) + y.dot(quadratic_ * z) + z.dot(quadratic_ * x)) / 3.0 +
               linear_.dot(x + y + z) / 3.0 + constant_;
    }

    /// ∂S̄/∂x at (y, z) = Q(y)z + B(y+z)/3 + c/3.
    Vector grad_polarized(const Vector& y, const Vector& z) const {
        detail::require_same_size(y.size(), dim_, "grad_polarized");
        detail::require_same_size(z.size(), dim_, "grad_polarized");
        return q_matrix(y) * z + quadratic_ * (y + z) / 3.0 + linear_ / 3.0;
    }

private:
    Eigen::Index dim_;
    std::vector<double> cubic_;
    Matrix quadratic_;
    Vector linear_;
    double constant_;
};

inline double polarize_cubic(const CubicHamiltonian& h, const Vector& x, const Vector& y,
                             const Vector& z) {
    return h.polarized(x, y, z);
}

inline Vector grad_polarized(const CubicHamiltonian& h, const Vector& y, const Vector& z) {
    return h.grad_polarized(y, z);
}

}  // namespace ligep
