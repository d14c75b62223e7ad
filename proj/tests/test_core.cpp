#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ligep/grid.hpp"
#include "ligep/kahan.hpp"
#include "ligep/linalg.hpp"
#include "support.hpp"

using namespace ligep;
using testing_support::central_matrix;
using testing_support::random_matrix;
using testing_support::random_orthonormal;
using testing_support::random_vector;
using testing_support::rel_diff;

// ---------------------------------------------------------------- grid

TEST(Grid, NodesAndSpacing) {
    const Grid1D g(0.0, 2.0, 8);
    EXPECT_DOUBLE_EQ(g.dx(), 0.25);
    EXPECT_DOUBLE_EQ(g.node(0), 0.0);
    EXPECT_DOUBLE_EQ(g.node(7), 1.75);
    EXPECT_EQ(g.wrap(-1), 7u);
    EXPECT_EQ(g.wrap(8), 0u);
    EXPECT_EQ(Grid1D::from_spacing(0.0, 2.0, 0.001).size(), 2000u);
    EXPECT_EQ(Grid1D::from_spacing(-10.0, 10.0, 0.02).size(), 1000u);
    EXPECT_EQ(Grid1D::from_spacing(0.0, 30.0, 0.03).size(), 1000u);
}

TEST(Grid, RejectsBadGrids) {
    EXPECT_THROW(Grid1D(0.0, 1.0, 2), std::invalid_argument);
    EXPECT_THROW(Grid1D(1.0, 1.0, 8), std::invalid_argument);
    EXPECT_THROW(Grid1D::from_spacing(0.0, 1.0, 0.3), std::invalid_argument);
    EXPECT_THROW(Grid1D::from_spacing(0.0, 1.0, -0.1), std::invalid_argument);
}

TEST(Operators, CentralOnFourNodeRing) {
    const Grid1D g(0.0, 4.0, 4);
    Matrix expected(4, 4);
    expected << 0, 1, 0, -1, -1, 0, 1, 0, 0, -1, 0, 1, 1, 0, -1, 0;
    expected *= 0.5;
    EXPECT_EQ(build_operator(g, OperatorKind::CentralDiff).matrix(), expected);
}

TEST(Operators, StencilsMatchDefinitions) {
    const Grid1D g(0.0, 1.0, 9);
    const double h = g.dx();
    using testing_support::circulant;
    EXPECT_LT(rel_diff(build_operator(g, OperatorKind::ForwardDiff).matrix(),
                       circulant(9, {{0, -1 / h}, {1, 1 / h}})), 1e-15);
    EXPECT_LT(rel_diff(build_operator(g, OperatorKind::Average).matrix(),
                       circulant(9, {{0, 0.5}, {1, 0.5}})), 1e-15);
    EXPECT_LT(rel_diff(build_operator(g, OperatorKind::SecondDiff).matrix(),
                       circulant(9, {{-1, 1 / (h * h)}, {0, -2 / (h * h)}, {1, 1 / (h * h)}})), 1e-15);
    const double h3 = h * h * h;
    EXPECT_LT(rel_diff(build_operator(g, OperatorKind::ThirdDiff).matrix(),
                       circulant(9, {{-2, -0.5 / h3}, {-1, 1 / h3}, {1, -1 / h3}, {2, 0.5 / h3}})), 1e-15);
}

TEST(Operators, ThirdDiffIsNotCubeOfCentral) {
    const Grid1D g(0.0, 1.0, 16);
    const Matrix d = build_operator(g, OperatorKind::CentralDiff).matrix();
    EXPECT_GT(rel_diff(d * d * d, build_operator(g, OperatorKind::ThirdDiff).matrix()), 0.1);
}

TEST(Operators, AnnihilateConstants) {
    const Grid1D g(-1.0, 3.0, 11);
    const Vector ones = Vector::Ones(11);
    for (auto kind : {OperatorKind::ForwardDiff, OperatorKind::CentralDiff, OperatorKind::SecondDiff,
                      OperatorKind::ThirdDiff}) {
        EXPECT_EQ(build_operator(g, kind).apply(ones).cwiseAbs().maxCoeff(), 0.0) << to_string(kind);
    }
    EXPECT_EQ(build_operator(g, OperatorKind::Average).apply(ones), ones);
}

TEST(Operators, ExactSkewAndSymmetry) {
    for (std::size_t n : {5u, 16u, 101u}) {
        const Grid1D g(0.0, 0.7, n);
        const Matrix d = build_operator(g, OperatorKind::CentralDiff).matrix();
        EXPECT_EQ(Matrix(d + d.transpose()).cwiseAbs().maxCoeff(), 0.0);
        const Matrix dxx = build_operator(g, OperatorKind::SecondDiff).matrix();
        EXPECT_EQ(Matrix(dxx - dxx.transpose()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Operators, RejectsGridNarrowerThanStencil) {
    const Grid1D g(0.0, 1.0, 4);
    EXPECT_THROW(build_operator(g, OperatorKind::ThirdDiff), std::invalid_argument);
    EXPECT_NO_THROW(build_operator(g, OperatorKind::CentralDiff));
}

TEST(Operators, ShiftInvariance) {
    const Grid1D g(0.0, 1.0, 13);
    const Vector u = random_vector(13, 3);
    Vector rolled(13);
    for (int j = 0; j < 13; ++j) rolled((j + 1) % 13) = u(j);
    for (auto kind : {OperatorKind::ForwardDiff, OperatorKind::CentralDiff, OperatorKind::Average,
                      OperatorKind::SecondDiff, OperatorKind::ThirdDiff}) {
        const StencilOperator op = build_operator(g, kind);
        const Vector a = op.apply(u);
        const Vector b = op.apply(rolled);
        for (int j = 0; j < 13; ++j) EXPECT_DOUBLE_EQ(b((j + 1) % 13), a(j));
    }
}

TEST(Operators, MatrixFreeAgreesWithDense) {
    const Grid1D g(0.0, 2.0, 17);
    const Vector u = random_vector(17, 5);
    const Matrix x = random_matrix(17, 4, 6);
    for (auto kind : {OperatorKind::CentralDiff, OperatorKind::SecondDiff, OperatorKind::ThirdDiff}) {
        const StencilOperator op = build_operator(g, kind);
        EXPECT_LT(rel_diff(op.apply(u), op.matrix() * u), 1e-15);
        EXPECT_LT(rel_diff(op.stencil().apply_left(x), op.matrix() * x), 1e-15);
        EXPECT_LT(rel_diff(op.stencil().apply_right(x.transpose()), x.transpose() * op.matrix()), 1e-15);
    }
}

TEST(Operators, StencilProductMatchesDenseProduct) {
    const Grid1D g(0.0, 1.0, 12);
    const Stencil d = make_stencil(OperatorKind::CentralDiff, g.dx());
    const Stencil d2 = power(d, 2);
    const Vector s = random_vector(12, 9);
    Matrix a = Matrix::Zero(12, 12);
    add_stencil_product(a, -0.5, d2, s, d);
    const Matrix dm = central_matrix(12, g.dx());
    EXPECT_LT(rel_diff(a, -0.5 * dm * dm * s.asDiagonal() * dm), 1e-14);
}

namespace {

double max_central_error(std::size_t n, OperatorKind kind) {
    const double period = 1.0;
    const Grid1D g(0.0, period, n);
    const double k = 2.0 * std::numbers::pi / period;
    const Vector x = g.nodes();
    const Vector u = x.unaryExpr([k](double s) { return std::sin(k * s); });
    Vector exact;
    switch (kind) {
        case OperatorKind::CentralDiff: exact = x.unaryExpr([k](double s) { return k * std::cos(k * s); }); break;
        case OperatorKind::SecondDiff: exact = x.unaryExpr([k](double s) { return -k * k * std::sin(k * s); }); break;
        default: exact = x.unaryExpr([k](double s) { return -k * k * k * std::cos(k * s); }); break;
    }
    return (build_operator(g, kind).apply(u) - exact).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Operators, SecondOrderConvergence) {
    for (auto kind : {OperatorKind::CentralDiff, OperatorKind::SecondDiff, OperatorKind::ThirdDiff}) {
        const double ratio = max_central_error(64, kind) / max_central_error(128, kind);
        EXPECT_NEAR(ratio, 4.0, 0.2) << to_string(kind);
    }
}

TEST(TimeOps, Definitions) {
    const Vector v = random_vector(7, 1);
    auto same = apply_time_ops(v, v, 0.3);
    EXPECT_EQ(same.delta, Vector::Zero(7));
    EXPECT_EQ(same.mean, v);
    auto from_zero = apply_time_ops(Vector::Zero(7), v, 1.0);
    EXPECT_EQ(from_zero.delta, v);
    EXPECT_EQ(from_zero.mean, v / 2.0);

    const Vector a = random_vector(9, 2), b = random_vector(9, 3);
    const double dt = 0.37;
    const auto ops = apply_time_ops(a, b, dt);
    for (int j = 0; j < 9; ++j) {
        EXPECT_EQ(ops.delta(j), (b(j) - a(j)) / dt);
        EXPECT_EQ(ops.mean(j), (b(j) + a(j)) / 2.0);
    }
    EXPECT_THROW(apply_time_ops(a, Vector::Zero(3), dt), DimensionError);
    EXPECT_THROW(apply_time_ops(a, b, 0.0), std::invalid_argument);
}

TEST(TimeOps, CommuteWithSpaceOperators) {
    // v(j, n): rows are nodes, columns are time levels.
    const Grid1D g(0.0, 1.0, 10);
    const Matrix v = random_matrix(10, 6, 11);
    const double dt = 0.1;
    const Stencil fwd = make_stencil(OperatorKind::ForwardDiff, g.dx());
    const Stencil avg = make_stencil(OperatorKind::Average, g.dx());
    const Stencil cen = make_stencil(OperatorKind::CentralDiff, g.dx());
    auto central_t = [dt](const Matrix& m) {
        Matrix out(m.rows(), m.cols() - 2);
        for (Eigen::Index n = 1; n + 1 < m.cols(); ++n) out.col(n - 1) = (m.col(n + 1) - m.col(n - 1)) / (2 * dt);
        return out;
    };
    auto delta_t = [dt](const Matrix& m) {
        Matrix out(m.rows(), m.cols() - 1);
        for (Eigen::Index n = 0; n + 1 < m.cols(); ++n) out.col(n) = (m.col(n + 1) - m.col(n)) / dt;
        return out;
    };
    auto mean_t = [](const Matrix& m) {
        Matrix out(m.rows(), m.cols() - 1);
        for (Eigen::Index n = 0; n + 1 < m.cols(); ++n) out.col(n) = (m.col(n + 1) + m.col(n)) / 2.0;
        return out;
    };
    EXPECT_LT(rel_diff(central_t(fwd.apply_left(v)), fwd.apply_left(central_t(v))), 1e-14);
    EXPECT_LT(rel_diff(delta_t(avg.apply_left(v)), avg.apply_left(delta_t(v))), 1e-14);
    EXPECT_LT(rel_diff(mean_t(cen.apply_left(v)), cen.apply_left(mean_t(v))), 1e-14);
}

TEST(TimeOps, DiscreteLeibnizRule) {
    const Vector u0 = random_vector(20, 21), u1 = random_vector(20, 22);
    const Vector v0 = random_vector(20, 23), v1 = random_vector(20, 24);
    const double dt = 0.013;
    const Vector lhs = (u1.cwiseProduct(v1) - u0.cwiseProduct(v0)) / dt;
    const Vector du = (u1 - u0) / dt, dv = (v1 - v0) / dt;
    for (double eps : {0.0, 0.5, 1.0}) {
        const Vector rhs = (eps * u1 + (1 - eps) * u0).cwiseProduct(dv) +
                           du.cwiseProduct((1 - eps) * v1 + eps * v0);
        EXPECT_LT(rel_diff(lhs, rhs), 1e-13) << "eps=" << eps;
    }
}

// ---------------------------------------------------------------- linalg

TEST(Lu, TrivialSystems) {
    const Vector v = random_vector(6, 1);
    EXPECT_EQ(lu_solve(Matrix::Identity(6, 6), v), v);
    Matrix a(2, 2);
    a << 2, 0, 0, 4;
    const Vector x = lu_solve(a, Vector((Vector(2) << 2, 8).finished()));
    EXPECT_DOUBLE_EQ(x(0), 1.0);
    EXPECT_DOUBLE_EQ(x(1), 2.0);
}

TEST(Lu, ResidualBound) {
    Matrix a = random_matrix(50, 50, 7);
    a.diagonal().array() += 10.0;
    const Vector b = random_vector(50, 8);
    const Vector x = lu_solve(a, b);
    const double inf_a = a.cwiseAbs().rowwise().sum().maxCoeff();
    EXPECT_LE((a * x - b).cwiseAbs().maxCoeff(),
              1e-10 * (inf_a * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff()));
}

TEST(Lu, SingularPivotReportsStep) {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 1.0;
    try {
        lu_solve(a, Vector::Ones(3), 42);
        FAIL() << "expected a singularity error";
    } catch (const SingularMatrixError& e) {
        ASSERT_TRUE(e.step().has_value());
        EXPECT_EQ(*e.step(), 42u);
        EXPECT_NE(std::string(e.what()).find("time step 42"), std::string::npos);
    }
    EXPECT_THROW(lu_solve(random_matrix(3, 4, 1), Vector::Ones(3)), DimensionError);
}

TEST(Svd, DiagonalAndRankOne) {
    Matrix z = Matrix::Zero(2, 2);
    z(0, 0) = 3.0;
    z(1, 1) = 1.0;
    const ThinSvd s = thin_svd(z);
    EXPECT_NEAR(s.sigma(0), 3.0, 1e-15);
    EXPECT_NEAR(s.sigma(1), 1.0, 1e-15);

    const Matrix r1 = random_vector(12, 1) * random_vector(7, 2).transpose();
    const ThinSvd t = thin_svd(r1);
    EXPECT_LE(t.sigma(1) / t.sigma(0), 1e-12);
}

TEST(Svd, ContractAndEckartYoung) {
    const Matrix z = random_matrix(40, 25, 31);
    const ThinSvd s = thin_svd(z);
    EXPECT_EQ(s.u.cols(), 25);
    EXPECT_LE((z - s.u * s.sigma.asDiagonal() * s.vt).norm(), 1e-10 * z.norm());
    EXPECT_LE((s.u.transpose() * s.u - Matrix::Identity(25, 25)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((s.vt * s.vt.transpose() - Matrix::Identity(25, 25)).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index k = 1; k < 25; ++k) EXPECT_GE(s.sigma(k - 1), s.sigma(k));
    for (Eigen::Index r : {1, 5, 12, 24}) {
        const Matrix best = s.u.leftCols(r) * s.sigma.head(r).asDiagonal() * s.vt.topRows(r);
        const double tail = s.sigma.tail(25 - r).norm();
        EXPECT_NEAR((z - best).norm() / tail, 1.0, 1e-10);
    }
    Matrix bad = z;
    bad(0, 0) = std::nan("");
    EXPECT_THROW(thin_svd(bad), std::invalid_argument);
}

TEST(Lift, IdentityBasisAndRoundTrip) {
    const BlockDiagonalLift id(Matrix::Identity(5, 5), 3);
    const Vector x = random_vector(15, 4);
    EXPECT_EQ(lift_apply(id, x), x);

    const Matrix v = random_orthonormal(20, 6, 8);
    const BlockDiagonalLift lift(v, 2);
    const Vector y = random_vector(12, 9);
    EXPECT_LE((lift_project(lift, lift_apply(lift, y)) - y).norm(), 1e-12);
    EXPECT_LT(rel_diff(lift.materialize() * y, lift_apply(lift, y)), 1e-14);
    EXPECT_THROW(lift_apply(lift, Vector::Zero(11)), DimensionError);
    EXPECT_THROW(lift_project(lift, Vector::Zero(39)), DimensionError);
}

TEST(Lift, KroneckerCongruence) {
    const Matrix v = random_orthonormal(10, 3, 12);
    Matrix k = random_matrix(4, 4, 13);
    k = k - k.transpose();
    const Matrix big = BlockDiagonalLift(v, 4).materialize();
    const Matrix lhs = big.transpose() * kron(k, Matrix::Identity(10, 10)) * big;
    EXPECT_LE((lhs - kron(k, Matrix::Identity(3, 3))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lift, KronMatchesDefinition) {
    const Matrix a = random_matrix(2, 3, 1), b = random_matrix(4, 2, 2);
    const Matrix k = kron(a, b);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j)
            for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 2; ++q) EXPECT_EQ(k(i * 4 + p, j * 2 + q), a(i, j) * b(p, q));
}

// ---------------------------------------------------------------- kahan

namespace {

QuadraticODE random_quadratic(Eigen::Index n, std::uint64_t seed, bool with_b = true) {
    const Matrix g = random_matrix(n * n, n, seed);
    auto t = [g, n](const Vector& a, const Vector& b) -> Vector {
        Vector out(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0;
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index k = 0; k < n; ++k)
                    s += 0.5 * (g(i + n * k, j) + g(i + n * j, k)) * a(j) * b(k);
            out(i) = s;
        }
        return out;
    };
    Matrix b = Matrix::Zero(n, n);
    if (with_b) {
        b = random_matrix(n, n, seed + 1);
        b = 0.5 * (b + b.transpose());
    }
    return QuadraticODE::make(n, t, b, with_b ? random_vector(n, seed + 2) : Vector::Zero(n));
}

QuadraticODE scalar_square() {
    return QuadraticODE::make(1, [](const Vector& a, const Vector& b) -> Vector { return a.cwiseProduct(b); });
}

}  // namespace

TEST(Kahan, PolarizationOfQuadratic) {
    const QuadraticODE sys = random_quadratic(5, 40);
    const Vector y = random_vector(5, 41), a = random_vector(5, 42), b = random_vector(5, 43);
    EXPECT_LT(rel_diff(polarize_quadratic(sys, y, y), sys.quadratic(y)), 1e-13);
    EXPECT_EQ(polarize_quadratic(sys, Vector::Zero(5), b).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT(rel_diff(polarize_quadratic(sys, a, b), sys.apply_bilinear(a, b)), 1e-13);
    EXPECT_LT(sys.bilinear_asymmetry(), 1e-13);
    EXPECT_THROW(polarize_quadratic(sys, a, Vector::Zero(4)), DimensionError);
}

TEST(Kahan, ScalarSquareIsExact) {
    const QuadraticODE sys = scalar_square();
    const Vector y1 = kahan_step(sys, Vector::Constant(1, 1.0), 0.1);
    EXPECT_NEAR(y1(0), 1.0 / 0.9, 1e-15);

    const double dt = 0.004, y0 = 1.0;
    Vector y = Vector::Constant(1, y0);
    const KahanStepper stepper(sys, dt);
    for (int n = 1; n <= 100; ++n) {
        y = stepper.step(y);
        const double exact = y0 / (1.0 - n * dt * y0);
        EXPECT_LE(std::abs(y(0) - exact) / exact, 1e-12) << "n=" << n;
    }
}

TEST(Kahan, LinearCaseIsMidpoint) {
    const Eigen::Index n = 6;
    Matrix b = random_matrix(n, n, 50);
    b = 0.5 * (b + b.transpose());
    const QuadraticODE sys = QuadraticODE::make(n, {}, b);
    const Vector y = random_vector(n, 51);
    const double dt = 0.05;
    const Matrix id = Matrix::Identity(n, n);
    const Vector midpoint = (id - 0.5 * dt * b).partialPivLu().solve((id + 0.5 * dt * b) * y);
    EXPECT_LT(rel_diff(kahan_step(sys, y, dt), midpoint), 1e-13);
    EXPECT_LT(rel_diff(KahanStepper(sys, dt).step(y), midpoint), 1e-13);
}

TEST(Kahan, EquilibriumAndTimeReversal) {
    const QuadraticODE sys = random_quadratic(4, 60, false);
    EXPECT_EQ(kahan_step(sys, Vector::Zero(4), 0.1), Vector::Zero(4));

    // Stepping with −dt is stepping the reversed field with +dt.
    QuadraticODE reversed = sys;
    reversed.bilinear = [t = sys.bilinear](const Vector& a, const Vector& b) -> Vector { return -t(a, b); };
    const Vector y = 0.3 * random_vector(4, 61);
    const Vector forward = kahan_step(sys, y, 0.01);
    const Vector back = kahan_step(reversed, forward, 0.01);
    EXPECT_LT(rel_diff(back, y), 1e-12);
}

TEST(Kahan, AffineInConstant) {
    QuadraticODE sys = random_quadratic(4, 70);
    const Vector y = 0.2 * random_vector(4, 71);
    const Vector c1 = random_vector(4, 72), c2 = random_vector(4, 73);
    auto step_with = [&](const Vector& c) {
        sys.constant = c;
        return kahan_step(sys, y, 0.02);
    };
    const Vector y1 = step_with(c1), y2 = step_with(c2), ymid = step_with(0.25 * c1 + 0.75 * c2);
    EXPECT_LT(rel_diff(ymid, 0.25 * y1 + 0.75 * y2), 1e-12);
}

TEST(Kahan, MassMatrixForm) {
    const Eigen::Index n = 4;
    QuadraticODE sys = random_quadratic(n, 80);
    Matrix m = random_matrix(n, n, 81);
    m = m * m.transpose() + Matrix::Identity(n, n);
    sys.mass = m;
    const Vector y = 0.2 * random_vector(n, 82);
    const double dt = 0.03;
    const Vector y1 = kahan_step(sys, y, dt);
    const Vector residual = m * (y1 - y) / dt - sys.apply_bilinear(y, y1) - 0.5 * sys.linear * (y + y1) - sys.constant;
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Kahan, StepRejectsBadInput) {
    const QuadraticODE sys = scalar_square();
    EXPECT_THROW(kahan_step(sys, Vector::Ones(2), 0.1), DimensionError);
    EXPECT_THROW(kahan_step(sys, Vector::Ones(1), 0.0), std::invalid_argument);
    // y = 1/dt makes the step matrix exactly zero.
    try {
        kahan_step(sys, Vector::Constant(1, 4.0), 0.25, 9);
        FAIL();
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.step().value_or(0), 9u);
    }
}

TEST(Tensor, ContractionAndSymmetry) {
    const Eigen::Index n = 5;
    BilinearTensor g(n);
    g.slab() = random_matrix(n * n, n, 90);
    const Vector a = random_vector(n, 91), b = random_vector(n, 92);
    Vector direct = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) direct(i) += g(i, j, k) * a(j) * b(k);
    EXPECT_LT(rel_diff(g.contract(a, b), direct), 1e-14);
    EXPECT_GT(g.max_asymmetry(), 0.0);
    g.symmetrize();
    EXPECT_EQ(g.max_asymmetry(), 0.0);
    EXPECT_EQ(g.contract(Vector::Zero(n), b), Vector::Zero(n));
}

namespace {

CubicHamiltonian random_cubic(std::size_t d, std::uint64_t seed) {
    const Vector raw = random_vector(static_cast<Eigen::Index>(d * d * d), seed);
    std::vector<double> c(raw.data(), raw.data() + raw.size());
    const Matrix b = random_matrix(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d), seed + 1);
    return CubicHamiltonian::from_cubic_terms(d, c, b, random_vector(static_cast<Eigen::Index>(d), seed + 2), 0.7);
}

}  // namespace

TEST(Cubic, PolarizationIdentityAndSymmetry) {
    const CubicHamiltonian h = random_cubic(8, 100);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector x = random_vector(8, 200 + trial);
        EXPECT_NEAR(polarize_cubic(h, x, x, x) / h.value(x), 1.0, 1e-12);
    }
    const Vector x = random_vector(8, 1), y = random_vector(8, 2), z = random_vector(8, 3);
    const double ref = polarize_cubic(h, x, y, z);
    for (double v : {polarize_cubic(h, x, z, y), polarize_cubic(h, y, x, z), polarize_cubic(h, y, z, x),
                     polarize_cubic(h, z, x, y), polarize_cubic(h, z, y, x)})
        EXPECT_NEAR(v, ref, 1e-12 * std::max(1.0, std::abs(ref)));
}

TEST(Cubic, GradientMatchesFiniteDifferences) {
    const CubicHamiltonian h = random_cubic(6, 300);
    const Vector x = random_vector(6, 301), y = random_vector(6, 302), z = random_vector(6, 303);
    const Vector g = grad_polarized(h, y, z);
    const double step = 1e-6;
    for (Eigen::Index i = 0; i < 6; ++i) {
        Vector xp = x, xm = x;
        xp(i) += step;
        xm(i) -= step;
        const double fd = (polarize_cubic(h, xp, y, z) - polarize_cubic(h, xm, y, z)) / (2 * step);
        EXPECT_LE(std::abs(fd - g(i)), 1e-6 * std::max(1.0, std::abs(g(i))));
    }
}

TEST(Cubic, HessianLinearPartIsSixQ) {
    const CubicHamiltonian h = random_cubic(5, 400);
    const Vector z = random_vector(5, 401);
    const double step = 1e-5;
    Matrix hess(5, 5);
    for (Eigen::Index k = 0; k < 5; ++k) {
        Vector zp = z, zm = z;
        zp(k) += step;
        zm(k) -= step;
        hess.col(k) = (h.gradient(zp) - h.gradient(zm)) / (2 * step);
    }
    EXPECT_LT(rel_diff(hess, 6.0 * h.q_matrix(z) + 2.0 * h.quadratic()), 1e-7);
}

TEST(Cubic, RejectsAsymmetricInput) {
    std::vector<double> c(8, 0.0);
    c[1] = 1.0;  // C[0,0,1] without its permutations
    EXPECT_THROW(CubicHamiltonian(2, c, Matrix::Zero(2, 2), Vector::Zero(2), 0.0), std::invalid_argument);
    EXPECT_THROW(CubicHamiltonian(2, std::vector<double>(7, 0.0), Matrix::Zero(2, 2), Vector::Zero(2), 0.0),
                 DimensionError);
}
