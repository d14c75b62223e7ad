#pragma once

// Fully discrete linearly implicit energy-preserving full-order models
// (wave, KdV, Camassa–Holm) with D = δx½ on a periodic grid, their initial
// data, the auxiliary-variable reconstructions used to build global
// snapshots, and the generic coupled stepper on the full multi-symplectic
// state.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ligep/errors.hpp"
#include "ligep/grid.hpp"
#include "ligep/kahan.hpp"
#include "ligep/linalg.hpp"
#include "ligep/model.hpp"

namespace ligep {

/// Primary-state trajectory; column n holds u at t_n = n·dt.
struct FomTrajectory {
    Grid1D grid;
    double dt;
    Matrix u;
    ModelParams params;

    std::size_t steps() const noexcept { return static_cast<std::size_t>(u.cols()) - 1; }
    double time(std::size_t n) const noexcept { return static_cast<double>(n) * dt; }
};

/// Named per-component snapshot sequences (columns are time levels).
struct ComponentSet {
    std::vector<std::string> names;
    std::vector<Matrix> series;

    void add(std::string name, Matrix m) {
        names.push_back(std::move(name));
        series.push_back(std::move(m));
    }

    const Matrix& at(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return series[i];
        throw std::invalid_argument("ComponentSet: no component '" + std::string(name) + "'");
    }

    bool contains(std::string_view name) const {
        for (const auto& n : names)
            if (n == name) return true;
        return false;
    }
};

inline Stencil central_stencil(const Grid1D& grid) {
    return make_stencil(OperatorKind::CentralDiff, grid.dx());
}

// ---------------------------------------------------------------------------
// Initial data

/// u⁰ = sech(x), v⁰ = 0; the second level comes from the Taylor start
/// u¹ = u⁰ + dt·v⁰ + (dt²/2) D²u⁰.
inline std::pair<Vector, Vector> wave_initialize(const Grid1D& grid, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("wave_initialize: dt must be positive");
    const Vector x = grid.nodes();
    Vector u0 = x.unaryExpr([](double s) { return 1.0 / std::cosh(s); });
    const Stencil d2 = power(central_stencil(grid), 2);
    Vector u1 = u0 + 0.5 * dt * dt * d2.apply(u0);
    return {std::move(u0), std::move(u1)};
}

/// u⁰ = cos(πx).
inline Vector kdv_initialize(const Grid1D& grid) {
    const double pi = std::acos(-1.0);
    return grid.nodes().unaryExpr([pi](double s) { return std::cos(pi * s); });
}

/// Periodic peakon of height c and period a with its crest at x0 + a/2.
inline double ch_profile(double x, double c, double a, double x0) {
    const double scale = c / std::cosh(a / 2.0);
    const double s = x - x0;
    return std::abs(s) <= a / 2.0 ? scale * std::cosh(s) : scale * std::cosh(a - s);
}

inline Vector ch_initialize(const Grid1D& grid, double c, double a, double x0) {
    return grid.nodes().unaryExpr([=](double x) { return ch_profile(x, c, a, x0); });
}

inline Vector ch_initialize(const Grid1D& grid, const ChParams& p) {
    return ch_initialize(grid, p.c, p.a, p.x0);
}

/// φ with φ₀ = 0 and φ_{j+1} = φ_j + (dx/2)(f_j + f_{j+1}).
inline Vector trapezoid_antiderivative(const Vector& f, const Grid1D& grid) {
    detail::require_same_size(f.size(), grid.ssize(), "trapezoid_antiderivative");
    Vector phi(f.size());
    phi(0) = 0.0;
    const double half = 0.5 * grid.dx();
    for (Eigen::Index j = 1; j < f.size(); ++j) phi(j) = phi(j - 1) + half * (f(j - 1) + f(j));
    return phi;
}

inline Matrix trapezoid_antiderivative(const Matrix& f, const Grid1D& grid) {
    Matrix phi(f.rows(), f.cols());
    for (Eigen::Index n = 0; n < f.cols(); ++n)
        phi.col(n) = trapezoid_antiderivative(Vector(f.col(n)), grid);
    return phi;
}

// ---------------------------------------------------------------------------
// Eliminated steppers

/// δt²u − μt²D²u = 0 as a three-level scheme with a constant matrix.
class WaveFomStepper {
public:
    WaveFomStepper(const Grid1D& grid, double dt)
        : grid_(grid), dt_(dt), d2_(power(central_stencil(grid), 2)) {
        if (!(dt > 0.0)) throw std::invalid_argument("WaveFomStepper: dt must be positive");
        const double inv = 1.0 / (dt * dt);
        Matrix lhs = d2_.to_matrix(grid.ssize()) * -0.25;
        lhs.diagonal().array() += inv;
        lu_ = LuFactorization(std::move(lhs));
    }

    Vector step(const Vector& u_prev, const Vector& u_curr) const {
        detail::require_same_size(u_prev.size(), grid_.ssize(), "wave_fom_step");
        detail::require_same_size(u_curr.size(), grid_.ssize(), "wave_fom_step");
        const double inv = 1.0 / (dt_ * dt_);
        const Vector rhs = 2.0 * inv * u_curr + 0.5 * d2_.apply(u_curr) - inv * u_prev +
                           0.25 * d2_.apply(u_prev);
        return lu_.solve(rhs);
    }

    const Grid1D& grid() const noexcept { return grid_; }
    double dt() const noexcept { return dt_; }

private:
    Grid1D grid_;
    double dt_;
    Stencil d2_;
    LuFactorization lu_;
};

inline Vector wave_fom_step(const Vector& u_prev, const Vector& u_curr, const Grid1D& grid,
                            double dt) {
    return WaveFomStepper(grid, dt).step(u_prev, u_curr);
}

/// δt u + (η/2) D(uⁿ∘uⁿ⁺¹) + γ² μt D³u = 0, refactorized every step.
class KdvFomStepper {
public:
    KdvFomStepper(const Grid1D& grid, double dt, const KdvParams& p)
        : grid_(grid), dt_(dt), p_(p), d_(central_stencil(grid)), d3_(power(d_, 3)) {
        if (!(dt > 0.0)) throw std::invalid_argument("KdvFomStepper: dt must be positive");
        const double g2 = p.gamma * p.gamma;
        base_ = d3_.to_matrix(grid.ssize()) * (0.5 * g2);
        base_.diagonal().array() += 1.0 / dt;
    }

    Matrix step_matrix(const Vector& u) const {
        Matrix a = base_;
        add_stencil_product(a, 0.5 * p_.eta, d_, u, Stencil::identity());
        return a;
    }

    Vector step(const Vector& u, std::optional<std::size_t> n = std::nullopt) const {
        detail::require_same_size(u.size(), grid_.ssize(), "kdv_fom_step");
        const double g2 = p_.gamma * p_.gamma;
        const Vector rhs = u / dt_ - 0.5 * g2 * d3_.apply(u);
        return lu_solve(step_matrix(u), rhs, n);
    }

private:
    Grid1D grid_;
    double dt_;
    KdvParams p_;
    Stencil d_;
    Stencil d3_;
    Matrix base_;
};

inline Vector kdv_fom_step(const Vector& u, const Grid1D& grid, double dt, double eta,
                           double gamma) {
    return KdvFomStepper(grid, dt, {eta, gamma}).step(u);
}

/// Camassa–Holm scheme; every product of a level-n and a level-(n+1) factor
/// is linear in uⁿ⁺¹:
///   ((I − D²)/dt − ½D²diag(Duⁿ) − ½D²diag(uⁿ)D + (3/2)D diag(uⁿ) + ½D diag(Duⁿ)D) uⁿ⁺¹
///     = ((I − D²)/dt) uⁿ
class ChFomStepper {
public:
    ChFomStepper(const Grid1D& grid, double dt)
        : grid_(grid), dt_(dt), d_(central_stencil(grid)), d2_(power(d_, 2)) {
        if (!(dt > 0.0)) throw std::invalid_argument("ChFomStepper: dt must be positive");
        base_ = d2_.to_matrix(grid.ssize()) * (-1.0 / dt);
        base_.diagonal().array() += 1.0 / dt;
    }

    Matrix step_matrix(const Vector& u) const {
        const Vector du = d_.apply(u);
        const Stencil id = Stencil::identity();
        Matrix a = base_;
        add_stencil_product(a, -0.5, d2_, du, id);
        add_stencil_product(a, -0.5, d2_, u, d_);
        add_stencil_product(a, 1.5, d_, u, id);
        add_stencil_product(a, 0.5, d_, du, d_);
        return a;
    }

    Vector step(const Vector& u, std::optional<std::size_t> n = std::nullopt) const {
        detail::require_same_size(u.size(), grid_.ssize(), "ch_fom_step");
        const Vector rhs = (u - d2_.apply(u)) / dt_;
        return lu_solve(step_matrix(u), rhs, n);
    }

private:
    Grid1D grid_;
    double dt_;
    Stencil d_;
    Stencil d2_;
    Matrix base_;
};

inline Vector ch_fom_step(const Vector& u, const Grid1D& grid, double dt) {
    return ChFomStepper(grid, dt).step(u);
}

// ---------------------------------------------------------------------------
// Trajectories

/// Run `steps` steps from the model's standard initial data.
inline FomTrajectory simulate_fom(Model model, const Grid1D& grid, double dt, std::size_t steps,
                                  const ModelParams& params) {
    FomTrajectory traj{grid, dt, Matrix(grid.ssize(), static_cast<Eigen::Index>(steps) + 1), params};
    switch (model) {
        case Model::Wave: {
            auto [u0, u1] = wave_initialize(grid, dt);
            traj.u.col(0) = u0;
            if (steps >= 1) traj.u.col(1) = u1;
            const WaveFomStepper stepper(grid, dt);
            for (std::size_t n = 1; n < steps; ++n) {
                const auto c = static_cast<Eigen::Index>(n);
                traj.u.col(c + 1) = stepper.step(traj.u.col(c - 1), traj.u.col(c));
            }
            break;
        }
        case Model::Kdv: {
            traj.u.col(0) = kdv_initialize(grid);
            const KdvFomStepper stepper(grid, dt, params.kdv);
            for (std::size_t n = 0; n < steps; ++n) {
                const auto c = static_cast<Eigen::Index>(n);
                traj.u.col(c + 1) = stepper.step(traj.u.col(c), n);
            }
            break;
        }
        case Model::Ch: {
            traj.u.col(0) = ch_initialize(grid, params.ch);
            const ChFomStepper stepper(grid, dt);
            for (std::size_t n = 0; n < steps; ++n) {
                const auto c = static_cast<Eigen::Index>(n);
                traj.u.col(c + 1) = stepper.step(traj.u.col(c), n);
            }
            break;
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Auxiliary variables

/// Time derivative of a snapshot sequence: central differences inside,
/// second-order one-sided differences at both ends.
inline Matrix time_derivative(const Matrix& u, double dt) {
    const Eigen::Index nt = u.cols();
    if (nt < 3) throw std::invalid_argument("time_derivative: need at least 3 snapshots");
    Matrix ut(u.rows(), nt);
    ut.col(0) = (-3.0 * u.col(0) + 4.0 * u.col(1) - u.col(2)) / (2.0 * dt);
    for (Eigen::Index n = 1; n + 1 < nt; ++n) ut.col(n) = (u.col(n + 1) - u.col(n - 1)) / (2.0 * dt);
    ut.col(nt - 1) = (3.0 * u.col(nt - 1) - 4.0 * u.col(nt - 2) + u.col(nt - 3)) / (2.0 * dt);
    return ut;
}

/// Auxiliary components of the multi-symplectic state recovered from u.
///
/// wave: v, w    kdv: phi, v, w    ch: phi, v, w, nu
inline ComponentSet reconstruct_aux(Model model, const Matrix& u, const Grid1D& grid, double dt,
                                    const ModelParams& params) {
    detail::require_same_size(u.rows(), grid.ssize(), "reconstruct_aux");
    if (u.cols() < 3) {
        throw std::invalid_argument("reconstruct_aux: trajectory needs at least 3 snapshots");
    }
    const Stencil d = central_stencil(grid);
    const Eigen::Index nt = u.cols();
    ComponentSet out;
    switch (model) {
        case Model::Wave: {
            // vⁿ = δt uⁿ − (dt/2) μt D² uⁿ; the last level follows vⁿ⁺¹ = vⁿ + dt D² μt uⁿ.
            const Matrix d2u = power(d, 2).apply_left(u);
            Matrix v(u.rows(), nt);
            for (Eigen::Index n = 0; n + 1 < nt; ++n) {
                v.col(n) = (u.col(n + 1) - u.col(n)) / dt -
                           0.25 * dt * (d2u.col(n + 1) + d2u.col(n));
            }
            v.col(nt - 1) = v.col(nt - 2) + 0.5 * dt * (d2u.col(nt - 1) + d2u.col(nt - 2));
            out.add("v", std::move(v));
            out.add("w", d.apply_left(u));
            break;
        }
        case Model::Kdv: {
            const auto& p = params.kdv;
            Matrix v = p.gamma * d.apply_left(u);
            Matrix w = 0.5 * p.gamma * d.apply_left(v) + 0.25 * p.eta * u.cwiseProduct(u);
            out.add("phi", trapezoid_antiderivative(u, grid));
            out.add("v", std::move(v));
            out.add("w", std::move(w));
            break;
        }
        case Model::Ch: {
            Matrix nu = d.apply_left(u);
            Matrix w = trapezoid_antiderivative(Matrix(0.5 * time_derivative(u, dt)), grid);
            Matrix v = u.cwiseProduct(nu) + d.apply_left(w);
            out.add("phi", trapezoid_antiderivative(u, grid));
            out.add("v", std::move(v));
            out.add("w", std::move(w));
            out.add("nu", std::move(nu));
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coupled multi-symplectic stepper (verification path)

struct CompactStepResult {
    Vector z_next;
    Eigen::Index rank_deficiency = 0;  ///< numerical nullity of the assembled system
    double residual = 0.0;             ///< relative residual of the solve
};

/// Assemble 𝐊/dt + ½𝐋𝐃 − 3Q(𝐳ⁿ) − 𝐁 and its right-hand side for the
/// compact scheme 𝐊δt𝐳 + 𝐋μt𝐃𝐳 = 3 ∂S̄/∂x(𝐳ⁿ, 𝐳ⁿ⁺¹).
inline std::pair<Matrix, Vector> assemble_compact_system(const MultiSymplecticSystem& sys,
                                                         const Vector& z, const Grid1D& grid,
                                                         double dt) {
    const Eigen::Index n = grid.ssize();
    const auto d = static_cast<Eigen::Index>(sys.d);
    detail::require_same_size(z.size(), d * n, "ligep_compact_step");
    const Matrix id = Matrix::Identity(n, n);
    const Matrix dx = central_stencil(grid).to_matrix(n);
    const Matrix kk = kron(sys.k, id);
    const Matrix ld = kron(sys.l, dx);
    const Matrix bb = kron(sys.hamiltonian.quadratic(), id);

    Matrix a = kk / dt + 0.5 * ld - bb;
    Vector node(d);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index i = 0; i < d; ++i) node(i) = z(i * n + m);
        const Matrix q = sys.hamiltonian.q_matrix(node);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) a(i * n + m, j * n + m) -= 3.0 * q(i, j);
    }
    Vector rhs = kk * z / dt - 0.5 * (ld * z) + bb * z;
    for (Eigen::Index i = 0; i < d; ++i) rhs.segment(i * n, n).array() += sys.hamiltonian.linear()(i);
    return {std::move(a), std::move(rhs)};
}

/// One step of the coupled scheme on the stacked state 𝐳 = (z_1, …, z_d).
///
/// The assembled matrix is rank deficient whenever K is (potential-type
/// components enter only through D, which annihilates constants), so the
/// solve is rank revealing: the minimum-norm solution is returned with the
/// detected nullity. Inconsistent systems raise SingularMatrixError.
inline CompactStepResult ligep_compact_step(const MultiSymplecticSystem& sys, const Vector& z,
                                            const Grid1D& grid, double dt,
                                            std::optional<std::size_t> step = std::nullopt) {
    if (!(dt > 0.0)) throw std::invalid_argument("ligep_compact_step: dt must be positive");
    auto [a, rhs] = assemble_compact_system(sys, z, grid, dt);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(1e-11);
    cod.compute(a);
    Vector x = cod.solve(rhs);
    for (int pass = 0; pass < 2; ++pass) x += cod.solve(rhs - a * x);
    const double scale = a.norm() * x.norm() + rhs.norm();
    const double residual = scale > 0.0 ? (a * x - rhs).norm() / scale : 0.0;
    if (!x.allFinite() || residual > 1e-10) {
        throw SingularMatrixError("ligep_compact_step: assembled system is singular and inconsistent",
                                  step);
    }
    return {std::move(x), a.rows() - cod.rank(), residual};
}

}  // namespace ligep
