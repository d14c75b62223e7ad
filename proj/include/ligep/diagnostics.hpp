#pragma once

// Error metrics and the two-level polarized discrete energies of the full-
// and reduced-order models.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ligep/errors.hpp"
#include "ligep/fom.hpp"
#include "ligep/grid.hpp"
#include "ligep/model.hpp"
#include "ligep/rom.hpp"

namespace ligep {

/// ‖u − û‖₂ / ‖u‖₂
inline double relative_state_error(const Vector& u_fom, const Vector& u_rom) {
    detail::require_same_size(u_fom.size(), u_rom.size(), "relative_state_error");
    const double denom = u_fom.norm();
    if (!(denom > 0.0)) throw std::domain_error("relative_state_error: reference state has zero norm");
    return (u_fom - u_rom).norm() / denom;
}

inline std::vector<double> relative_error_series(const Matrix& fom, const Matrix& rom) {
    detail::require_same_size(fom.rows(), rom.rows(), "relative_error_series");
    const Eigen::Index nt = std::min(fom.cols(), rom.cols());
    std::vector<double> out(static_cast<std::size_t>(nt));
    for (Eigen::Index n = 0; n < nt; ++n)
        out[static_cast<std::size_t>(n)] = relative_state_error(fom.col(n), rom.col(n));
    return out;
}

/// The quantities every energy formula reads off a pair of time levels:
/// u at both levels, its spatial derivative at both levels, and for the
/// wave the second derivative used to rebuild v.
struct EnergyInputs {
    Vector u0, u1, du0, du1, d2u0, d2u1;
};

namespace detail {

inline double wave_energy(const EnergyInputs& q, double dx, double dt) {
    const Vector mean_d2 = 0.5 * (q.d2u0 + q.d2u1);
    const Vector v0 = (q.u1 - q.u0) / dt - 0.5 * dt * mean_d2;
    const Vector v1 = v0 + dt * mean_d2;
    double s = 0.0;
    for (Eigen::Index j = 0; j < q.u0.size(); ++j)
        s += 2.0 * q.du0(j) * q.du1(j) + q.du0(j) * q.du0(j) + 2.0 * v0(j) * v1(j) + v0(j) * v0(j);
    return dx / 6.0 * s;
}

inline double kdv_energy(const EnergyInputs& q, double dx, const KdvParams& p) {
    const double g2 = p.gamma * p.gamma;
    double s = 0.0;
    for (Eigen::Index j = 0; j < q.u0.size(); ++j)
        s += -g2 * q.du0(j) * q.du0(j) - 2.0 * g2 * q.du0(j) * q.du1(j) +
             p.eta * q.u0(j) * q.u0(j) * q.u1(j);
    return dx / 6.0 * s;
}

inline double ch_energy(const EnergyInputs& q, double dx) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < q.u0.size(); ++j)
        s += -3.0 * q.u0(j) * q.u0(j) * q.u1(j) - q.du0(j) * q.du0(j) * q.u1(j) -
             2.0 * q.du0(j) * q.du1(j) * q.u0(j);
    return dx / 6.0 * s;
}

inline double energy_from_inputs(Model model, const EnergyInputs& q, const Grid1D& grid, double dt,
                                 const ModelParams& params) {
    switch (model) {
        case Model::Wave: return wave_energy(q, grid.dx(), dt);
        case Model::Kdv: return kdv_energy(q, grid.dx(), params.kdv);
        case Model::Ch: return ch_energy(q, grid.dx());
    }
    throw std::invalid_argument("polarized_energy: unknown model");
}

}  // namespace detail

/// Ēⁿ of the full-order scheme from uⁿ and uⁿ⁺¹.
inline double polarized_energy_fom(Model model, const Vector& u0, const Vector& u1,
                                   const Grid1D& grid, double dt, const ModelParams& params) {
    detail::require_same_size(u0.size(), grid.ssize(), "polarized_energy");
    detail::require_same_size(u1.size(), grid.ssize(), "polarized_energy");
    const Stencil d = central_stencil(grid);
    EnergyInputs q{u0, u1, d.apply(u0), d.apply(u1), {}, {}};
    if (model == Model::Wave) {
        q.d2u0 = d.apply(q.du0);
        q.d2u1 = d.apply(q.du1);
    }
    return detail::energy_from_inputs(model, q, grid, dt, params);
}

/// Ē_rⁿ of the LIGEP-ROM from ũⁿ and ũⁿ⁺¹: u ↦ Vũ, Du ↦ VD̃ũ, D²u ↦ VD̃²ũ.
inline double polarized_energy_rom(Model model, const Vector& a0, const Vector& a1,
                                   const ReducedOperators& ops, const Grid1D& grid, double dt,
                                   const ModelParams& params) {
    detail::require_same_size(a0.size(), ops.rank(), "polarized_energy(rom)");
    detail::require_same_size(a1.size(), ops.rank(), "polarized_energy(rom)");
    detail::require_same_size(ops.v.rows(), grid.ssize(), "polarized_energy(rom)");
    EnergyInputs q{ops.v * a0, ops.v * a1, ops.p * a0, ops.p * a1, {}, {}};
    if (model == Model::Wave) {
        q.d2u0 = ops.v * (ops.d2 * a0);
        q.d2u1 = ops.v * (ops.d2 * a1);
    }
    return detail::energy_from_inputs(model, q, grid, dt, params);
}

enum class EnergyLevel { Fom, Rom };

inline double polarized_energy(Model model, EnergyLevel level, const Vector& s0, const Vector& s1,
                               const Grid1D& grid, double dt, const ModelParams& params,
                               const ReducedOperators* ops = nullptr) {
    if (level == EnergyLevel::Fom) return polarized_energy_fom(model, s0, s1, grid, dt, params);
    if (ops == nullptr) throw std::invalid_argument("polarized_energy: reduced level needs a basis");
    return polarized_energy_rom(model, s0, s1, *ops, grid, dt, params);
}

/// Polarized energy of the Hamiltonian wave system y = (u, v):
/// (Δx/6) Σ (v₀² + 2v₀v₁ + (δx u₀)² + 2 δx u₀ δx u₁).
inline double wave_hamiltonian_energy(const Vector& y0, const Vector& y1, const Grid1D& grid) {
    const Eigen::Index n = grid.ssize();
    detail::require_same_size(y0.size(), 2 * n, "wave_hamiltonian_energy");
    detail::require_same_size(y1.size(), 2 * n, "wave_hamiltonian_energy");
    const Stencil fwd = make_stencil(OperatorKind::ForwardDiff, grid.dx());
    const Vector w0 = fwd.apply(y0.head(n));
    const Vector w1 = fwd.apply(y1.head(n));
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double v0 = y0(n + j), v1 = y1(n + j);
        s += v0 * v0 + 2.0 * v0 * v1 + w0(j) * w0(j) + 2.0 * w0(j) * w1(j);
    }
    return grid.dx() / 6.0 * s;
}

/// Δx Σ_m [S̄(zⁿ, zⁿ, zⁿ⁺¹) + ⅓((Dzⁿ)ᵀL₊zⁿ + (Dzⁿ)ᵀL₊zⁿ⁺¹ + (Dzⁿ⁺¹)ᵀL₊zⁿ)]
/// for the coupled scheme on stacked states.
inline double compact_energy(const MultiSymplecticSystem& sys, const Vector& z0, const Vector& z1,
                             const Grid1D& grid) {
    const Eigen::Index n = grid.ssize();
    const auto d = static_cast<Eigen::Index>(sys.d);
    detail::require_same_size(z0.size(), d * n, "compact_energy");
    detail::require_same_size(z1.size(), d * n, "compact_energy");
    const Stencil dx = central_stencil(grid);
    Matrix a0(d, n), a1(d, n), g0(d, n), g1(d, n);
    for (Eigen::Index i = 0; i < d; ++i) {
        a0.row(i) = z0.segment(i * n, n).transpose();
        a1.row(i) = z1.segment(i * n, n).transpose();
        g0.row(i) = dx.apply(z0.segment(i * n, n)).transpose();
        g1.row(i) = dx.apply(z1.segment(i * n, n)).transpose();
    }
    const Matrix lp = sys.l_plus();
    double s = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
        const Vector x0 = a0.col(m), x1 = a1.col(m);
        s += sys.hamiltonian.polarized(x0, x0, x1) +
             (g0.col(m).dot(lp * x0) + g0.col(m).dot(lp * x1) + g1.col(m).dot(lp * x0)) / 3.0;
    }
    return grid.dx() * s;
}

/// |Ē(t_n) − Ē(t₀)|
inline std::vector<double> drift_series(const std::vector<double>& energy) {
    if (energy.empty()) throw std::invalid_argument("drift_series: empty energy series");
    std::vector<double> out(energy.size());
    for (std::size_t n = 0; n < energy.size(); ++n) out[n] = std::abs(energy[n] - energy[0]);
    return out;
}

/// |Ē(t_n) − Ē_r(t_n)|
inline std::vector<double> gap_series(const std::vector<double>& fom, const std::vector<double>& rom) {
    if (fom.size() != rom.size()) {
        throw DimensionError("gap_series: length mismatch (" + std::to_string(fom.size()) + " vs " +
                             std::to_string(rom.size()) + ")");
    }
    std::vector<double> out(fom.size());
    for (std::size_t n = 0; n < fom.size(); ++n) out[n] = std::abs(fom[n] - rom[n]);
    return out;
}

/// max_n |Ēⁿ⁺¹ − Ēⁿ| over the first `limit` increments.
inline double max_increment(const std::vector<double>& energy, std::size_t limit = SIZE_MAX) {
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < energy.size() && n < limit; ++n)
        worst = std::max(worst, std::abs(energy[n + 1] - energy[n]));
    return worst;
}

inline double max_of(const std::vector<double>& s) {
    double worst = 0.0;
    for (double x : s) worst = std::max(worst, x);
    return worst;
}

/// Energy series of a full-order trajectory, one value per consecutive pair.
inline std::vector<double> fom_energy_series(Model model, const FomTrajectory& traj) {
    std::vector<double> e;
    e.reserve(traj.steps());
    for (Eigen::Index n = 0; n + 1 < traj.u.cols(); ++n)
        e.push_back(polarized_energy_fom(model, traj.u.col(n), traj.u.col(n + 1), traj.grid, traj.dt,
                                         traj.params));
    return e;
}

inline std::vector<double> rom_energy_series(Model model, const Matrix& a, const ReducedOperators& ops,
                                             const Grid1D& grid, double dt, const ModelParams& params) {
    std::vector<double> e;
    e.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(a.cols() - 1, 0)));
    for (Eigen::Index n = 0; n + 1 < a.cols(); ++n)
        e.push_back(polarized_energy_rom(model, a.col(n), a.col(n + 1), ops, grid, dt, params));
    return e;
}

/// Energy series of lifted states evaluated with the full-order formula.
inline std::vector<double> lifted_energy_series(Model model, const Matrix& u, const Grid1D& grid,
                                                double dt, const ModelParams& params) {
    std::vector<double> e;
    for (Eigen::Index n = 0; n + 1 < u.cols(); ++n) {
        if (model == Model::Wave) {
            e.push_back(wave_hamiltonian_energy(u.col(n), u.col(n + 1), grid));
        } else {
            e.push_back(polarized_energy_fom(model, u.col(n), u.col(n + 1), grid, dt, params));
        }
    }
    return e;
}

struct EnergyReport {
    Model model;
    std::string method;
    Eigen::Index rank = 0;
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> drift;
    std::optional<std::vector<double>> gap;

    static EnergyReport make(Model model, std::string method, Eigen::Index rank, double dt,
                             std::vector<double> energy,
                             const std::vector<double>* reference = nullptr) {
        EnergyReport r{model, std::move(method), rank, {}, std::move(energy), {}, std::nullopt};
        r.times.resize(r.energy.size());
        for (std::size_t n = 0; n < r.times.size(); ++n) r.times[n] = static_cast<double>(n) * dt;
        r.drift = drift_series(r.energy);
        if (reference) {
            std::vector<double> ref(reference->begin(),
                                    reference->begin() + static_cast<std::ptrdiff_t>(
                                                             std::min(reference->size(), r.energy.size())));
            if (ref.size() == r.energy.size()) r.gap = gap_series(ref, r.energy);
        }
        return r;
    }

    double max_drift() const { return max_of(drift); }
    double scale() const { return std::max(1.0, std::abs(energy.front())); }
};

}  // namespace ligep
