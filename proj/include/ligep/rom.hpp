#pragma once

// Reduced-order models: the energy-preserving LIGEP-ROMs for wave, KdV and
// Camassa–Holm, the explicit-tensor online path, and the POD-Galerkin
// baselines integrated with Kahan's method.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ligep/errors.hpp"
#include "ligep/fom.hpp"
#include "ligep/grid.hpp"
#include "ligep/kahan.hpp"
#include "ligep/linalg.hpp"
#include "ligep/model.hpp"
#include "ligep/pod.hpp"

namespace ligep {

/// D̃ = VᵀDV and the quantities the ROM schemes and energies need.
struct ReducedOperators {
    Matrix v;   ///< N×r basis
    Matrix d;   ///< D̃
    Matrix d2;  ///< D̃²
    Matrix d3;  ///< D̃³
    Matrix p;   ///< V D̃ (lifted reduced derivative)

    Eigen::Index rank() const noexcept { return v.cols(); }
};

inline ReducedOperators reduce_operators(const Matrix& v, const Grid1D& grid) {
    detail::require_same_size(v.rows(), grid.ssize(), "reduce_operators");
    ReducedOperators ops;
    ops.v = v;
    ops.d = v.transpose() * central_stencil(grid).apply_left(v);
    ops.d2 = ops.d * ops.d;
    ops.d3 = ops.d2 * ops.d;
    ops.p = v * ops.d;
    return ops;
}

/// Vᵀ diag(s) X
inline Matrix weighted_gram(const Matrix& v, const Vector& s, const Matrix& x) {
    return v.transpose() * (s.asDiagonal() * x);
}

/// H[p,j,k] = Σ_m V_mp V_mj V_mk, the single r³ array every quadratic ROM term reduces to.
inline BilinearTensor lifted_triple_product(const Matrix& v) {
    const Eigen::Index r = v.cols();
    BilinearTensor h(r);
    for (Eigen::Index k = 0; k < r; ++k) {
        const Matrix block = weighted_gram(v, v.col(k), v);
        h.slab().middleRows(k * r, r) = block;
    }
    return h;
}

inline constexpr Eigen::Index kMaxTensorRank = 512;

/// Explicit G with the ROM quadratic term equal to Σ_{j,k} G[·,j,k] ũ_j ũ_k.
///
/// kdv: G(a,b) = (η/2) D̃ Vᵀ(Va∘Vb)
/// ch:  G(a,b) = −½D̃²Vᵀ(Pa∘Vb + Va∘Pb) + (3/2)D̃Vᵀ(Va∘Vb) + ½D̃Vᵀ(Pa∘Pb)
/// wave has no quadratic term and yields the zero array.
inline BilinearTensor build_reduced_cubic_tensor(const ReducedOperators& ops, Model model,
                                                 const ModelParams& params = {}) {
    const Eigen::Index r = ops.rank();
    if (r > kMaxTensorRank) {
        throw std::invalid_argument("build_reduced_cubic_tensor: rank " + std::to_string(r) +
                                    " exceeds the limit " + std::to_string(kMaxTensorRank));
    }
    BilinearTensor g(r);
    if (model == Model::Wave) return g;
    const BilinearTensor h = lifted_triple_product(ops.v);
    Vector e = Vector::Zero(r);
    for (Eigen::Index j = 0; j < r; ++j) {
        e(j) = 1.0;
        Matrix m;
        if (model == Model::Kdv) {
            m = 0.5 * params.kdv.eta * ops.d * h.partial(e);
        } else {
            const Matrix ha = h.partial(e);
            const Matrix hda = h.partial(ops.d.col(j));
            m = -0.5 * ops.d2 * (hda + ha * ops.d) + 1.5 * ops.d * ha + 0.5 * ops.d * hda * ops.d;
        }
        for (Eigen::Index k = 0; k < r; ++k) g.slab().col(j).segment(k * r, r) = m.col(k);
        e(j) = 0.0;
    }
    g.symmetrize();
    return g;
}

inline BilinearTensor build_reduced_cubic_tensor(const Matrix& v, const Grid1D& grid, Model model,
                                                 const ModelParams& params = {}) {
    return build_reduced_cubic_tensor(reduce_operators(v, grid), model, params);
}

enum class RomPath { Lifted, Tensor };

// ---------------------------------------------------------------------------
// LIGEP-ROM steppers

/// δt²ũ − μt²D̃²ũ = 0
class WaveRomStepper {
public:
    WaveRomStepper(const ReducedOperators& ops, double dt) : d2_(ops.d2), dt_(dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("WaveRomStepper: dt must be positive");
        const double inv = 1.0 / (dt * dt);
        Matrix lhs = -0.25 * d2_;
        lhs.diagonal().array() += inv;
        lu_ = LuFactorization(std::move(lhs));
    }

    Vector step(const Vector& prev, const Vector& curr) const {
        detail::require_same_size(prev.size(), d2_.rows(), "wave_rom_step");
        detail::require_same_size(curr.size(), d2_.rows(), "wave_rom_step");
        const double inv = 1.0 / (dt_ * dt_);
        return lu_.solve(2.0 * inv * curr + 0.5 * (d2_ * curr) - inv * prev + 0.25 * (d2_ * prev));
    }

private:
    Matrix d2_;
    double dt_;
    LuFactorization lu_;
};

inline Vector wave_rom_step(const Vector& prev, const Vector& curr, const ReducedOperators& ops,
                            double dt) {
    return WaveRomStepper(ops, dt).step(prev, curr);
}

/// δtũ + (η/2)D̃Vᵀ(ûⁿ∘ûⁿ⁺¹) + γ²μtD̃³ũ = 0
class KdvRomStepper {
public:
    KdvRomStepper(ReducedOperators ops, double dt, const KdvParams& p,
                  RomPath path = RomPath::Lifted)
        : ops_(std::move(ops)), dt_(dt), p_(p), path_(path) {
        if (!(dt > 0.0)) throw std::invalid_argument("KdvRomStepper: dt must be positive");
        const double g2 = p.gamma * p.gamma;
        base_ = 0.5 * g2 * ops_.d3;
        base_.diagonal().array() += 1.0 / dt;
        rhs_ = -0.5 * g2 * ops_.d3;
        rhs_.diagonal().array() += 1.0 / dt;
        if (path_ == RomPath::Tensor) tensor_ = build_reduced_cubic_tensor(ops_, Model::Kdv, {p, {}});
    }

    Matrix step_matrix(const Vector& a) const {
        if (path_ == RomPath::Tensor) return base_ + tensor_.partial(a);
        return base_ + 0.5 * p_.eta * ops_.d * weighted_gram(ops_.v, ops_.v * a, ops_.v);
    }

    Vector step(const Vector& a, std::optional<std::size_t> n = std::nullopt) const {
        detail::require_same_size(a.size(), ops_.rank(), "kdv_rom_step");
        return lu_solve(step_matrix(a), rhs_ * a, n);
    }

    const ReducedOperators& operators() const noexcept { return ops_; }

private:
    ReducedOperators ops_;
    double dt_;
    KdvParams p_;
    RomPath path_;
    Matrix base_;
    Matrix rhs_;
    BilinearTensor tensor_;
};

inline Vector kdv_rom_step(const Vector& a, const ReducedOperators& ops, double dt, double eta,
                           double gamma) {
    return KdvRomStepper(ops, dt, {eta, gamma}).step(a);
}

/// Reduced Camassa–Holm scheme, linear in ũⁿ⁺¹.
class ChRomStepper {
public:
    ChRomStepper(ReducedOperators ops, double dt, RomPath path = RomPath::Lifted)
        : ops_(std::move(ops)), dt_(dt), path_(path) {
        if (!(dt > 0.0)) throw std::invalid_argument("ChRomStepper: dt must be positive");
        base_ = -ops_.d2 / dt;
        base_.diagonal().array() += 1.0 / dt;
        if (path_ == RomPath::Tensor) tensor_ = build_reduced_cubic_tensor(ops_, Model::Ch);
    }

    Matrix step_matrix(const Vector& a) const {
        if (path_ == RomPath::Tensor) return base_ + tensor_.partial(a);
        const Vector va = ops_.v * a;
        const Vector pa = ops_.p * a;
        const Matrix& v = ops_.v;
        const Matrix& p = ops_.p;
        return base_ - 0.5 * ops_.d2 * (weighted_gram(v, pa, v) + weighted_gram(v, va, p)) +
               1.5 * ops_.d * weighted_gram(v, va, v) + 0.5 * ops_.d * weighted_gram(v, pa, p);
    }

    Vector step(const Vector& a, std::optional<std::size_t> n = std::nullopt) const {
        detail::require_same_size(a.size(), ops_.rank(), "ch_rom_step");
        return lu_solve(step_matrix(a), base_ * a, n);
    }

    const ReducedOperators& operators() const noexcept { return ops_; }

private:
    ReducedOperators ops_;
    double dt_;
    RomPath path_;
    Matrix base_;
    BilinearTensor tensor_;
};

inline Vector ch_rom_step(const Vector& a, const ReducedOperators& ops, double dt) {
    return ChRomStepper(ops, dt).step(a);
}

/// Reduced trajectory; column n holds ũ at t_n.
struct RomTrajectory {
    Matrix u;
    double dt = 0.0;
    Eigen::Index rank = 0;

    std::size_t steps() const noexcept { return static_cast<std::size_t>(u.cols()) - 1; }
};

/// Run the LIGEP-ROM from projected FOM initial levels.
///
/// `initial` holds the FOM levels the scheme needs (two columns for the
/// three-level wave scheme, one otherwise).
inline RomTrajectory simulate_ligep_rom(Model model, const ReducedOperators& ops,
                                        const Matrix& initial, double dt, std::size_t steps,
                                        const ModelParams& params, RomPath path = RomPath::Lifted) {
    const Eigen::Index r = ops.rank();
    RomTrajectory traj{Matrix(r, static_cast<Eigen::Index>(steps) + 1), dt, r};
    const Matrix projected = ops.v.transpose() * initial;
    traj.u.col(0) = projected.col(0);
    switch (model) {
        case Model::Wave: {
            if (initial.cols() < 2) throw std::invalid_argument("simulate_ligep_rom: wave needs two initial levels");
            if (steps >= 1) traj.u.col(1) = projected.col(1);
            const WaveRomStepper stepper(ops, dt);
            for (Eigen::Index n = 1; n < static_cast<Eigen::Index>(steps); ++n)
                traj.u.col(n + 1) = stepper.step(traj.u.col(n - 1), traj.u.col(n));
            break;
        }
        case Model::Kdv: {
            const KdvRomStepper stepper(ops, dt, params.kdv, path);
            for (std::size_t n = 0; n < steps; ++n) {
                const auto c = static_cast<Eigen::Index>(n);
                traj.u.col(c + 1) = stepper.step(traj.u.col(c), n);
            }
            break;
        }
        case Model::Ch: {
            const ChRomStepper stepper(ops, dt, path);
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
// POD-Galerkin baselines

/// Semi-discrete Hamiltonian wave system y = (u, v), y' = J y with J = [[0, I], [Dxx, 0]].
inline Matrix wave_hamiltonian_matrix(const Grid1D& grid) {
    const Eigen::Index n = grid.ssize();
    Matrix j = Matrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n).setIdentity();
    j.bottomLeftCorner(n, n) = make_stencil(OperatorKind::SecondDiff, grid.dx()).to_matrix(n);
    return j;
}

inline QuadraticODE wave_semidiscrete(const Grid1D& grid) {
    return QuadraticODE::make(2 * grid.ssize(), {}, wave_hamiltonian_matrix(grid));
}

/// Full-order Kahan (here implicit midpoint) trajectory of the Hamiltonian wave system.
/// Column n is y(t_n) = (u, v) stacked.
inline Matrix simulate_wave_hamiltonian(const Grid1D& grid, double dt, std::size_t steps) {
    const Eigen::Index n = grid.ssize();
    Matrix y(2 * n, static_cast<Eigen::Index>(steps) + 1);
    y.col(0).head(n) = grid.nodes().unaryExpr([](double s) { return 1.0 / std::cosh(s); });
    y.col(0).tail(n).setZero();
    const KahanStepper stepper(wave_semidiscrete(grid), dt);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(steps); ++k)
        y.col(k + 1) = stepper.step(y.col(k), static_cast<std::size_t>(k));
    return y;
}

/// −(η/2)[a∘Dx b + b∘Dx a] − γ² Dxxx on the full grid (u_t = −η u u_x − γ² u_xxx).
inline QuadraticODE kdv_semidiscrete(const Grid1D& grid, const KdvParams& p) {
    const Stencil dx = central_stencil(grid);
    const Eigen::Index n = grid.ssize();
    auto t = [dx, eta = p.eta](const Vector& a, const Vector& b) -> Vector {
        return -0.5 * eta * (a.cwiseProduct(dx.apply(b)) + b.cwiseProduct(dx.apply(a)));
    };
    const Matrix b = -p.gamma * p.gamma * make_stencil(OperatorKind::ThirdDiff, grid.dx()).to_matrix(n);
    return QuadraticODE::make(n, t, b);
}

/// Polarized Camassa–Holm right-hand side −3uu_x + 2u_xu_xx + uu_xxx on the full grid,
/// with mass I − Dxx.
inline QuadraticODE ch_semidiscrete(const Grid1D& grid) {
    const double h = grid.dx();
    const Stencil dx = central_stencil(grid);
    const Stencil dxx = make_stencil(OperatorKind::SecondDiff, h);
    const Stencil dxxx = make_stencil(OperatorKind::ThirdDiff, h);
    auto t = [=](const Vector& a, const Vector& b) -> Vector {
        const Vector da = dx.apply(a), db = dx.apply(b);
        return -1.5 * (a.cwiseProduct(db) + b.cwiseProduct(da)) +
               (da.cwiseProduct(dxx.apply(b)) + db.cwiseProduct(dxx.apply(a))) +
               0.5 * (a.cwiseProduct(dxxx.apply(b)) + b.cwiseProduct(dxxx.apply(a)));
    };
    QuadraticODE sys = QuadraticODE::make(grid.ssize(), t);
    Matrix mass = -dxx.to_matrix(grid.ssize());
    mass.diagonal().array() += 1.0;
    sys.mass = std::move(mass);
    return sys;
}

/// Galerkin projection of a quadratic ODE onto W: T̃(a,b) = WᵀT(Wa,Wb), B̃ = WᵀBW, M̃ = WᵀMW.
struct GalerkinModel {
    Model model;
    Matrix w;
    QuadraticODE reduced;
};

namespace detail {

inline Matrix project_mass(const Matrix& w, const std::optional<Matrix>& mass) {
    if (!mass) return Matrix::Identity(w.cols(), w.cols());
    return w.transpose() * (*mass) * w;
}

}  // namespace detail

/// wave: W is 2N×r over stacked (u, v); kdv/ch: W is N×r over u.
inline GalerkinModel build_galerkin(Model model, const Matrix& w, const Grid1D& grid,
                                    const ModelParams& params) {
    const Eigen::Index r = w.cols();
    GalerkinModel gm{model, w, {}};
    switch (model) {
        case Model::Wave: {
            detail::require_same_size(w.rows(), 2 * grid.ssize(), "build_galerkin(wave)");
            const Matrix j = wave_hamiltonian_matrix(grid);
            gm.reduced = QuadraticODE::make(r, {}, w.transpose() * j * w);
            break;
        }
        case Model::Kdv: {
            detail::require_same_size(w.rows(), grid.ssize(), "build_galerkin(kdv)");
            const Stencil dx = central_stencil(grid);
            const Matrix dw = dx.apply_left(w);
            const double eta = params.kdv.eta;
            const double g2 = params.kdv.gamma * params.kdv.gamma;
            const Matrix b = -g2 * w.transpose() *
                             make_stencil(OperatorKind::ThirdDiff, grid.dx()).apply_left(w);
            auto t = [w, dw, eta](const Vector& a, const Vector& bb) -> Vector {
                const Vector wa = w * a, wb = w * bb;
                return -0.5 * eta * w.transpose() * (wa.cwiseProduct(dw * bb) + wb.cwiseProduct(dw * a));
            };
            gm.reduced = QuadraticODE::make(r, t, b);
            gm.reduced.partial = [w, dw, eta](const Vector& a) -> Matrix {
                return -0.5 * eta * (weighted_gram(w, w * a, dw) + weighted_gram(w, dw * a, w));
            };
            break;
        }
        case Model::Ch: {
            detail::require_same_size(w.rows(), grid.ssize(), "build_galerkin(ch)");
            const double h = grid.dx();
            const Matrix d1 = central_stencil(grid).apply_left(w);
            const Matrix d2 = make_stencil(OperatorKind::SecondDiff, h).apply_left(w);
            const Matrix d3 = make_stencil(OperatorKind::ThirdDiff, h).apply_left(w);
            auto t = [w, d1, d2, d3](const Vector& a, const Vector& b) -> Vector {
                const Vector wa = w * a, wb = w * b;
                const Vector da = d1 * a, db = d1 * b;
                const Vector full = -1.5 * (wa.cwiseProduct(db) + wb.cwiseProduct(da)) +
                                    (da.cwiseProduct(d2 * b) + db.cwiseProduct(d2 * a)) +
                                    0.5 * (wa.cwiseProduct(d3 * b) + wb.cwiseProduct(d3 * a));
                return w.transpose() * full;
            };
            gm.reduced = QuadraticODE::make(r, t);
            gm.reduced.partial = [w, d1, d2, d3](const Vector& a) -> Matrix {
                const Vector wa = w * a, da = d1 * a;
                return -1.5 * (weighted_gram(w, wa, d1) + weighted_gram(w, da, w)) +
                       (weighted_gram(w, da, d2) + weighted_gram(w, d2 * a, d1)) +
                       0.5 * (weighted_gram(w, wa, d3) + weighted_gram(w, d3 * a, w));
            };
            Matrix mass = -(w.transpose() * d2);
            mass.diagonal().array() += 1.0;
            gm.reduced.mass = std::move(mass);
            break;
        }
    }
    return gm;
}

inline Vector galerkin_step(const GalerkinModel& gm, const Vector& y, double dt,
                            std::optional<std::size_t> n = std::nullopt) {
    return kahan_step(gm.reduced, y, dt, n);
}

inline constexpr double kDivergenceNorm = 1e8;

struct GalerkinRun {
    Matrix y;                                ///< reduced states actually computed
    std::optional<std::size_t> diverged_at;  ///< first step whose state blew up or failed
    std::string failure;

    bool truncated() const noexcept { return diverged_at.has_value(); }
};

/// Integrate a Galerkin model, stopping at the first state whose norm exceeds
/// kDivergenceNorm, turns non-finite, or whose step matrix is singular.
inline GalerkinRun simulate_galerkin(const GalerkinModel& gm, const Vector& y0, double dt,
                                     std::size_t steps) {
    const KahanStepper stepper(gm.reduced, dt);
    GalerkinRun run;
    std::vector<Vector> states{y0};
    for (std::size_t n = 0; n < steps; ++n) {
        Vector next;
        try {
            next = stepper.step(states.back(), n);
        } catch (const SingularMatrixError& e) {
            run.diverged_at = n + 1;
            run.failure = e.what();
            break;
        }
        if (!next.allFinite() || next.norm() > kDivergenceNorm) {
            run.diverged_at = n + 1;
            run.failure = "state norm exceeded divergence threshold";
            break;
        }
        states.push_back(std::move(next));
    }
    run.y.resize(y0.size(), static_cast<Eigen::Index>(states.size()));
    for (std::size_t k = 0; k < states.size(); ++k) run.y.col(static_cast<Eigen::Index>(k)) = states[k];
    return run;
}

}  // namespace ligep
