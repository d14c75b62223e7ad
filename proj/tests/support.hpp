#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace testing_support {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Vector random_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    return v;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

inline Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, cols, seed));
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    if (scale == 0.0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Periodic matrix with entry `w` at (j, j + offset) for every row, built by direct indexing.
inline Matrix circulant(Eigen::Index n, std::initializer_list<std::pair<int, double>> entries) {
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (const auto& [off, w] : entries) m(j, ((j + off) % n + n) % n) += w;
    return m;
}

inline Matrix central_matrix(Eigen::Index n, double h) {
    return circulant(n, {{-1, -0.5 / h}, {1, 0.5 / h}});
}

}  // namespace testing_support
