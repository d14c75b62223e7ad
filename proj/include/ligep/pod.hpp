#pragma once

// Snapshot assembly and proper orthogonal decomposition.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ligep/errors.hpp"
#include "ligep/fom.hpp"
#include "ligep/linalg.hpp"
#include "ligep/model.hpp"

namespace ligep {

enum class SnapshotLayout {
    Global,   ///< N × (d·Nt): components side by side
    Stacked,  ///< (d·N) × Nt: components on top of each other
};

struct SnapshotSet {
    SnapshotLayout layout;
    Matrix data;
    std::vector<std::string> labels;
    std::vector<double> times;

    Eigen::Index components() const noexcept { return static_cast<Eigen::Index>(labels.size()); }

    /// Snapshot block of one component (N × Nt) in either layout.
    Matrix block(std::size_t i) const {
        const auto nt = static_cast<Eigen::Index>(times.size());
        const auto idx = static_cast<Eigen::Index>(i);
        if (layout == SnapshotLayout::Global) return data.middleCols(idx * nt, nt);
        const Eigen::Index n = data.rows() / components();
        return data.middleRows(idx * n, n);
    }
};

/// Component order of the global snapshot matrix for each model.
inline std::vector<std::string> snapshot_order(Model model) {
    switch (model) {
        case Model::Wave: return {"u", "v", "w"};
        case Model::Kdv: return {"phi", "u", "v", "w"};
        case Model::Ch: return {"u", "phi", "v", "w", "nu"};
    }
    throw std::invalid_argument("snapshot_order: unknown model");
}

/// Lay out u and its auxiliary sequences in the model's component order.
inline SnapshotSet assemble_snapshots(Model model, const Matrix& u, const ComponentSet& aux,
                                      SnapshotLayout layout, double dt = 0.0) {
    const auto order = snapshot_order(model);
    const Eigen::Index n = u.rows();
    const Eigen::Index nt = u.cols();
    std::vector<const Matrix*> parts;
    for (const auto& name : order) {
        const Matrix& m = name == "u" ? u : aux.at(name);
        if (m.rows() != n || m.cols() != nt) {
            throw DimensionError("assemble_snapshots: component '" + name + "' is " +
                                 std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                 ", expected " + std::to_string(n) + "x" + std::to_string(nt));
        }
        parts.push_back(&m);
    }
    const auto d = static_cast<Eigen::Index>(order.size());
    SnapshotSet set{layout, Matrix(), order, {}};
    if (layout == SnapshotLayout::Global) {
        set.data.resize(n, d * nt);
        for (Eigen::Index i = 0; i < d; ++i) set.data.middleCols(i * nt, nt) = *parts[static_cast<std::size_t>(i)];
    } else {
        set.data.resize(d * n, nt);
        for (Eigen::Index i = 0; i < d; ++i) set.data.middleRows(i * n, n) = *parts[static_cast<std::size_t>(i)];
    }
    set.times.resize(static_cast<std::size_t>(nt));
    for (Eigen::Index k = 0; k < nt; ++k) set.times[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
    return set;
}

struct ReducedBasis {
    Matrix v;      ///< orthonormal columns
    Vector sigma;  ///< full singular spectrum of the snapshot matrix
    Eigen::Index r = 0;
    std::size_t d = 1;

    BlockDiagonalLift lift() const { return BlockDiagonalLift(v, d); }
};

/// Leading r left singular vectors of the snapshot matrix.
inline ReducedBasis compute_basis(const Matrix& z, Eigen::Index r, std::size_t blocks = 1) {
    const Eigen::Index kmax = std::min(z.rows(), z.cols());
    if (r < 1 || r > kmax) {
        throw std::invalid_argument("compute_basis: rank " + std::to_string(r) +
                                    " outside [1, " + std::to_string(kmax) + "]");
    }
    auto [u, sigma] = left_singular(z);
    return {u.leftCols(r), std::move(sigma), r, blocks};
}

inline ReducedBasis compute_basis(const SnapshotSet& z, Eigen::Index r) {
    const std::size_t blocks = z.layout == SnapshotLayout::Global ? z.labels.size() : 1;
    return compute_basis(z.data, r, blocks);
}

inline Vector project_state(const ReducedBasis& basis, const Vector& z) {
    return basis.lift().project(z);
}

inline Vector lift_state(const ReducedBasis& basis, const Vector& zt) {
    return basis.lift().apply(zt);
}

}  // namespace ligep
