#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ligep/errors.hpp"
#include "ligep/grid.hpp"
#include "ligep/kahan.hpp"

namespace ligep {

enum class Model { Wave, Kdv, Ch };

inline std::string to_string(Model m) {
    switch (m) {
        case Model::Wave: return "wave";
        case Model::Kdv: return "kdv";
        case Model::Ch: return "ch";
    }
    return "unknown";
}

inline Model parse_model(std::string_view name) {
    if (name == "wave") return Model::Wave;
    if (name == "kdv") return Model::Kdv;
    if (name == "ch") return Model::Ch;
    throw std::invalid_argument("unknown model label '" + std::string(name) + "'");
}

/// u_t + η u u_x + γ² u_xxx = 0
struct KdvParams {
    double eta = 1.0;
    double gamma = 0.022;
};

/// Periodic peakon initial data: speed c, period a, crest offset x0.
struct ChParams {
    double c = 1.0;
    double a = 30.0;
    double x0 = 0.0;
};

struct ModelParams {
    KdvParams kdv;
    ChParams ch;
};

/// K z_t + L z_x = ∇S(z) with constant skew K, L.
struct MultiSymplecticSystem {
    Model label;
    std::size_t d;
    Matrix k;
    Matrix l;
    CubicHamiltonian hamiltonian;
    std::vector<std::string> components;

    /// L₊ with L = L₊ − L₊ᵀ (strict upper triangle of L).
    Matrix l_plus() const { return l.triangularView<Eigen::StrictlyUpper>(); }
    /// K₊ with K = K₊ − K₊ᵀ.
    Matrix k_plus() const { return k.triangularView<Eigen::StrictlyUpper>(); }

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < components.size(); ++i)
            if (components[i] == name) return i;
        throw std::invalid_argument("no component '" + std::string(name) + "'");
    }
};

namespace detail {

inline void require_skew(const Matrix& m, const char* what) {
    if ((m + m.transpose()).cwiseAbs().maxCoeff() != 0.0) {
        throw std::invalid_argument(std::string(what) + " must be exactly skew-symmetric");
    }
}

inline MultiSymplecticSystem make_system(Model label, Matrix k, Matrix l,
                                         CubicHamiltonian h, std::vector<std::string> names) {
    require_skew(k, "K");
    require_skew(l, "L");
    const auto d = static_cast<std::size_t>(k.rows());
    return {label, d, std::move(k), std::move(l), std::move(h), std::move(names)};
}

}  // namespace detail

/// z = (u, v, w), S = ½(v² − w²).
inline MultiSymplecticSystem wave_system() {
    Matrix k = Matrix::Zero(3, 3);
    k(0, 1) = -1.0;
    k(1, 0) = 1.0;
    Matrix l = Matrix::Zero(3, 3);
    l(0, 2) = 1.0;
    l(2, 0) = -1.0;
    Matrix b = Matrix::Zero(3, 3);
    b(1, 1) = 0.5;
    b(2, 2) = -0.5;
    CubicHamiltonian h(3, std::vector<double>(27, 0.0), b, Vector::Zero(3), 0.0);
    return detail::make_system(Model::Wave, k, l, std::move(h), {"u", "v", "w"});
}

/// z = (φ, u, v, w), S = v²/2 − uw + ηu³/6.
inline MultiSymplecticSystem kdv_system(const KdvParams& p) {
    Matrix k = Matrix::Zero(4, 4);
    k(0, 1) = 0.5;
    k(1, 0) = -0.5;
    Matrix l = Matrix::Zero(4, 4);
    l(0, 3) = 1.0;
    l(3, 0) = -1.0;
    l(1, 2) = -p.gamma;
    l(2, 1) = p.gamma;
    std::vector<double> cubic(64, 0.0);
    cubic[(1 * 4 + 1) * 4 + 1] = p.eta / 6.0;
    Matrix b = Matrix::Zero(4, 4);
    b(2, 2) = 0.5;
    b(1, 3) = -0.5;
    b(3, 1) = -0.5;
    CubicHamiltonian h(4, std::move(cubic), b, Vector::Zero(4), 0.0);
    return detail::make_system(Model::Kdv, k, l, std::move(h), {"phi", "u", "v", "w"});
}

/// z = (u, φ, w, v, ν), S = −wu − ½u³ − ½uν² + νv.
inline MultiSymplecticSystem ch_system() {
    Matrix k = Matrix::Zero(5, 5);
    k(0, 1) = 0.5;
    k(1, 0) = -0.5;
    k(0, 4) = -0.5;
    k(4, 0) = 0.5;
    Matrix l = Matrix::Zero(5, 5);
    l(0, 3) = -1.0;
    l(3, 0) = 1.0;
    l(1, 2) = 1.0;
    l(2, 1) = -1.0;
    // zᵀQ(z)z = −½u³ − ½uν²: C[u,u,u] = −1/2, and the three placements of (u,ν,ν) share −1/2.
    std::vector<double> cubic(125, 0.0);
    auto at = [&cubic](int i, int j, int m) -> double& { return cubic[static_cast<std::size_t>((i * 5 + j) * 5 + m)]; };
    at(0, 0, 0) = -0.5;
    at(0, 4, 4) = -1.0 / 6.0;
    at(4, 0, 4) = -1.0 / 6.0;
    at(4, 4, 0) = -1.0 / 6.0;
    Matrix b = Matrix::Zero(5, 5);
    b(0, 2) = -0.5;
    b(2, 0) = -0.5;
    b(3, 4) = 0.5;
    b(4, 3) = 0.5;
    CubicHamiltonian h(5, std::move(cubic), b, Vector::Zero(5), 0.0);
    return detail::make_system(Model::Ch, k, l, std::move(h), {"u", "phi", "w", "v", "nu"});
}

inline MultiSymplecticSystem system_for(Model m, const ModelParams& p) {
    switch (m) {
        case Model::Wave: return wave_system();
        case Model::Kdv: return kdv_system(p.kdv);
        case Model::Ch: return ch_system();
    }
    throw std::invalid_argument("system_for: unknown model");
}

}  // namespace ligep
