#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <simm/contour.hpp>
#include <simm/oracle.hpp>

#include "test_util.hpp"

using namespace simm;
using simm::test::diag;
using simm::test::random_vec;

namespace
{

constexpr double delta0 = 1.0 / 20.0;

// Trapezoid filter of the N-point rule for a diagonal pencil:
// sum_j w_j / (a - z_j b) = 1 / (b (t^N - 1)), t = (a / b - c) / rho.
Vector filtered(const std::vector<Complex>& a, const std::vector<Complex>& b, const Vector& f,
                Complex c, double rho, int n_points)
{
    Vector out(f.size());
    for (Index i = 0; i < f.size(); ++i)
    {
        const Complex bi = b.empty() ? Complex(1.0) : b[static_cast<std::size_t>(i)];
        const Complex t  = (a[static_cast<std::size_t>(i)] / bi - c) / rho;
        out[i]           = f[i] / (bi * (std::pow(t, n_points) - 1.0));
    }
    return out;
}

double direct_ratio(const MatrixPencil& p, const Square& sq, const Vector& f, int n0)
{
    return oracle::direct_projection(p, sq, f, 2 * n0).norm() /
           oracle::direct_projection(p, sq, f, n0).norm();
}

KrylovTable single(const ShiftData& sd)
{
    KrylovTable t;
    t.append(sd);
    return t;
}

std::vector<Complex> spread_spectrum(int n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> d;
    for (int i = 0; i < n; ++i)
        d.emplace_back(3.0 * u(gen), 3.0 * u(gen));
    return d;
}

} // namespace

TEST(Square, ChildrenTileParent)
{
    const Square s{Complex(1.0, -2.0), 4.0};
    const auto ch = s.children();
    EXPECT_EQ(ch[0].center, Complex(0.0, -3.0));
    EXPECT_EQ(ch[1].center, Complex(2.0, -3.0));
    EXPECT_EQ(ch[2].center, Complex(0.0, -1.0));
    EXPECT_EQ(ch[3].center, Complex(2.0, -1.0));
    for (const auto& c : ch)
        EXPECT_EQ(c.side, 2.0);
    EXPECT_TRUE(s.contains(Complex(3.0, 0.0)));
    EXPECT_FALSE(s.contains(Complex(3.1, 0.0)));
    EXPECT_DOUBLE_EQ(s.circumradius(), 2.0 * std::numbers::sqrt2);
}

TEST(Quadrature, UnitGeometry)
{
    const QuadratureSet q = quadrature(Square{0.0, 2.0}, 2);
    ASSERT_EQ(q.points.size(), 4u);
    const double r = std::numbers::sqrt2;
    EXPECT_DOUBLE_EQ(q.radius, r);
    const Complex expect[] = {{r, 0.0}, {0.0, r}, {-r, 0.0}, {0.0, -r}};
    for (int j = 0; j < 4; ++j)
        EXPECT_LE(std::abs(q.points[static_cast<std::size_t>(j)] - expect[j]), 1e-15);
    for (std::size_t j = 0; j < 4; ++j)
        EXPECT_LE(std::abs(q.coeffs[j] - (r / 4.0) * (q.points[j] / r)), 1e-15);
}

TEST(Quadrature, TranslationAndScaling)
{
    const QuadratureSet q0 = quadrature(Square{0.0, 2.0}, 8);
    const QuadratureSet q1 = quadrature(Square{Complex(1.0, 1.0), 2.0}, 8);
    const QuadratureSet q2 = quadrature(Square{0.0, 6.0}, 8);
    for (std::size_t j = 0; j < q0.points.size(); ++j)
    {
        EXPECT_LE(std::abs(q1.points[j] - (q0.points[j] + Complex(1.0, 1.0))), 1e-15);
        EXPECT_LE(std::abs(q2.points[j] - 3.0 * q0.points[j]), 1e-14);
        EXPECT_LE(std::abs(q2.coeffs[j] - 3.0 * q0.coeffs[j]), 1e-14);
    }
}

TEST(Quadrature, Nesting)
{
    const Square s{Complex(0.3, 0.2), 0.5};
    const QuadratureSet q8 = quadrature(s, 8);
    const QuadratureSet q4 = quadrature(s, 4);
    ASSERT_EQ(q8.points.size(), 16u);
    ASSERT_EQ(q4.points.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k)
        EXPECT_LE(std::abs(q8.points[2 * k] - q4.points[k]), 1e-15);
    EXPECT_THROW(quadrature(s, 1), std::invalid_argument);
}

TEST(Quadrature, IntegratesResolvent)
{
    // sum_j w_j / (z_j - a) = 1 inside, 0 outside (up to the filter error).
    const QuadratureSet q = circle_rule(0.0, 1.0, 32);
    Complex inside = 0.0, outside = 0.0;
    for (std::size_t j = 0; j < q.points.size(); ++j)
    {
        inside += q.coeffs[j] / (q.points[j] - 0.1);
        outside += q.coeffs[j] / (q.points[j] - 3.0);
    }
    EXPECT_NEAR(std::abs(inside - 1.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(outside), 0.0, 1e-14);
}

TEST(DirectProjection, ClosedFormFilterDiagonal)
{
    const std::vector<Complex> a = {0.5, 10.0, Complex(0.55, 0.02), Complex(-1.0, 0.3)};
    const MatrixPencil p(diag(a));
    const Vector f     = random_vec(4, 1);
    const Square sq{0.5, 0.2};
    for (const int n : {8, 16, 32})
    {
        const Vector got = oracle::direct_projection(p, sq, f, n);
        const Vector ref = filtered(a, {}, f, sq.center, sq.circumradius(), n);
        EXPECT_LE(simm::test::rel(got, ref), 1e-12) << "N = " << n;
    }
}

TEST(DirectProjection, ClosedFormFilterWithB)
{
    const std::vector<Complex> a = {1.0, 6.0, Complex(0.2, 0.4)};
    const std::vector<Complex> b = {2.0, Complex(1.0, 1.0), 0.5};
    const MatrixPencil p(diag(a), diag(b));
    const Vector f = random_vec(3, 2);
    const Square sq{Complex(0.5, 0.1), 0.3};
    const Vector got = oracle::direct_projection(p, sq, f, 16);
    EXPECT_LE(simm::test::rel(got, filtered(a, b, f, sq.center, sq.circumradius(), 16)), 1e-12);
}

TEST(DirectProjection, EmptySquareIsDamped)
{
    const MatrixPencil p(diag({0.5, 10.0}));
    const Vector f = random_vec(2, 3);
    EXPECT_LE(oracle::direct_projection(p, Square{5.0, 0.2}, f, 16).norm(), 1e-3 * f.norm());
}

TEST(Indicator, DiagonalPencilMatchesDirectSolves)
{
    const MatrixPencil p(diag({0.5, 10.0}));
    const Vector f = random_vec(2, 4);
    const KrylovTable t = single(build_shift(p, Complex(0.45, 0.05), f, 50, false));
    const IndicatorConfig cfg{1e-8, 8};

    const Square inside{0.5, 0.2};
    const IndicatorValue iv = indicator(inside, t, cfg);
    ASSERT_TRUE(iv.resolvable);
    EXPECT_EQ(iv.shift_used, 0u);
    EXPECT_EQ(iv.reduced_solves, 16u);
    EXPECT_NEAR(iv.value, direct_ratio(p, inside, f, 8), 1e-8 * iv.value);
    EXPECT_GT(iv.value, delta0);
    EXPECT_GE(iv.value, 0.5);
    EXPECT_LE(iv.value, 2.0);

    const Square empty{5.0, 0.2};
    const IndicatorValue ie = indicator(empty, t, cfg);
    ASSERT_TRUE(ie.resolvable);
    EXPECT_LT(ie.value, delta0);
    // Both sums sit at rounding level here, so only the decision is compared.
    EXPECT_LT(direct_ratio(p, empty, f, 8), delta0);
}

TEST(Indicator, LargerDiagonalPencilMatchesDirectSolves)
{
    std::vector<Complex> d = spread_spectrum(150, 5);
    d[0] = Complex(0.1, 0.1);
    d[1] = Complex(0.13, 0.08);
    const MatrixPencil p(diag(d));
    const Vector f = random_vec(150, 6);
    const KrylovTable t = single(build_shift(p, Complex(0.1, 0.11), f, 50, false));
    const IndicatorConfig cfg{1e-8, 8};
    int checked = 0;
    for (const Square sq : {Square{Complex(0.1, 0.1), 0.05}, Square{Complex(0.2, 0.2), 0.05},
                            Square{Complex(0.1, 0.1), 0.01}, Square{Complex(0.125, 0.085), 0.02}})
    {
        const IndicatorValue iv = indicator(sq, t, cfg);
        if (!iv.resolvable)
            continue;
        ++checked;
        const double ref = direct_ratio(p, sq, f, 8);
        EXPECT_NEAR(iv.value, ref, 1e-5 * std::max(ref, 1.0));
        EXPECT_EQ(iv.value > delta0, ref > delta0);
    }
    EXPECT_GE(checked, 2);
}

TEST(Indicator, EmptyRegionDecaysWithN0)
{
    const MatrixPencil p(diag({0.5, 10.0, Complex(0.0, 2.0)}));
    const Vector f = random_vec(3, 7);
    const KrylovTable t = single(build_shift(p, Complex(0.3, 0.4), f, 50, false));
    const Square empty{Complex(0.3, 0.4), 0.2};
    const IndicatorValue i8 = indicator(empty, t, IndicatorConfig{1e-8, 8});
    const IndicatorValue i4 = indicator(empty, t, IndicatorConfig{1e-8, 4});
    ASSERT_TRUE(i8.resolvable);
    ASSERT_TRUE(i4.resolvable);
    EXPECT_LT(i8.value, i4.value);
    EXPECT_LT(i4.value, delta0);
    EXPECT_LT(i8.value, delta0);
}

TEST(Indicator, FirstMatchInCreationOrder)
{
    const MatrixPencil p(diag({0.5, 10.0}));
    const Vector f = random_vec(2, 8);
    KrylovTable t;
    t.append(build_shift(p, Complex(0.4, 0.1), f, 50, false));
    t.append(build_shift(p, Complex(0.6, 0.1), f, 50, false));
    const IndicatorValue iv = indicator(Square{0.5, 0.2}, t, IndicatorConfig{});
    EXPECT_EQ(iv.shift_used, 0u);
    const IndicatorValue later = indicator(Square{0.5, 0.2}, t, IndicatorConfig{}, std::nullopt, 1);
    EXPECT_EQ(later.shift_used, 1u);
    const IndicatorValue none = indicator(Square{0.5, 0.2}, t, IndicatorConfig{}, 0);
    EXPECT_FALSE(none.resolvable);
}

TEST(Indicator, UnresolvableWhenFarFromEveryShift)
{
    const MatrixPencil p(diag(spread_spectrum(200, 9)));
    const Vector f = random_vec(200, 10);
    const KrylovTable t = single(build_shift(p, Complex(0.0, 0.0), f, 20, false));
    const IndicatorValue iv = indicator(Square{Complex(2.5, 2.5), 0.5}, t, IndicatorConfig{});
    EXPECT_FALSE(iv.resolvable);
    EXPECT_FALSE(iv.shift_used.has_value());
    EXPECT_EQ(iv.reduced_solves, 0u);
}

TEST(IndicatorRatio, BothSumsTinyGiveZero)
{
    ShiftData sd;
    sd.sigma       = 0.0;
    sd.m           = 2;
    sd.H           = DenseMatrix::Identity(2, 2);
    sd.beta        = 1.0;
    sd.eig_values  = Vector::Ones(2);
    sd.eig_vectors = DenseMatrix::Identity(2, 2);
    sd.c1          = Vector::Zero(2);
    sd.r_lambda    = Vector::Ones(2);
    EXPECT_EQ(indicator_ratio(sd, quadrature(Square{0.3, 0.1}, 8)), 0.0);
}

TEST(Resolvable, TinySquareAtShift)
{
    const MatrixPencil p(diag(spread_spectrum(100, 11)));
    const ShiftData sd = build_shift(p, Complex(0.01, 0.02), random_vec(100, 12), 20, false);
    EXPECT_TRUE(is_resolvable(Square{sd.sigma, 1e-9}, sd, 1e-8));
}

TEST(Resolvable, ExactSubspaceResolvesEverything)
{
    const MatrixPencil p(diag({1.0, 2.0, 3.0}));
    const ShiftData sd = build_shift(p, 0.0, random_vec(3, 13), 10, false);
    ASSERT_EQ(sd.h_next, 0.0);
    EXPECT_TRUE(is_resolvable(Square{Complex(5.0, 5.0), 1.0}, sd, 1e-12));
    EXPECT_TRUE(is_resolvable(Square{Complex(-3.0, 0.5), 0.1}, sd, 1e-12));
}

TEST(Resolvable, AgreesWithExplicitResiduals)
{
    const MatrixPencil p(simm::test::random_sparse(115, 0.04, 14));
    const Vector f = random_vec(115, 15);
    const Complex sigma(0.2, 0.0);
    const ShiftedOperator op(p, sigma);
    const ShiftData sd = build_shift(op, f, 50, true);
    const Vector b     = op.resolve(f);
    for (const Square sq : {Square{Complex(0.25, 0.0), 0.01}, Square{Complex(3.0, 1.0), 0.5}})
    {
        const QuadratureSet q = quadrature(sq, 8);
        bool all_ok           = true;
        for (const Complex z : q.points)
        {
            const Vector x  = lift(sd, reduced_solve(sd, z));
            const Vector r  = b - x - (sigma - z) * op.apply(x);
            const double rr = r.norm() / b.norm();
            EXPECT_NEAR(rr, residual_estimate(sd, z), 1e-6 * rr + 1e-14);
            all_ok = all_ok && rr <= 1e-8;
        }
        EXPECT_EQ(is_resolvable(sq, sd, 1e-8), all_ok);
    }
}

TEST(Resolvable, RitzPoleCollisionNudgesRadius)
{
    // Place a quadrature node exactly on the pole z = sigma + 1 / lambda_H.
    const MatrixPencil p(diag({1.0, 2.0}));
    const ShiftData sd = build_shift(p, 0.0, Vector::Ones(2), 2, false);
    const Complex pole = sd.sigma + 1.0 / sd.eig_values[0];
    const double side  = 0.2;
    const Square sq{pole - Complex(side * std::numbers::sqrt2 / 2.0, 0.0), side};
    const ResolveCheck rc = check_resolvable(sq, sd, 1e-8, 8);
    EXPECT_TRUE(rc.nudged);
    EXPECT_TRUE(rc.resolvable);
    const IndicatorValue iv = indicator(sq, single(sd), IndicatorConfig{});
    EXPECT_TRUE(iv.nudged);
    EXPECT_TRUE(std::isfinite(iv.value));
}

TEST(ProjectionVector, VFreeNormIdentity)
{
    const MatrixPencil p(simm::test::random_sparse(120, 0.05, 16));
    const ShiftData sd = build_shift(p, Complex(0.1, 0.1), random_vec(120, 17), 40, true);
    std::mt19937_64 gen(18);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int k = 0; k < 10; ++k)
    {
        const Square sq{sd.sigma + Complex(u(gen), u(gen)), 0.05 + 0.1 * (k % 3)};
        const QuadratureSet q = quadrature(sq, 8);
        Vector ysum           = Vector::Zero(sd.m);
        for (std::size_t j = 0; j < q.points.size(); ++j)
            ysum += q.coeffs[j] * reduced_solve(sd, q.points[j]);
        const double full = projection_vector(sq, sd, 16).norm();
        EXPECT_NEAR(full, ysum.norm(), 1e-10 * ysum.norm());
    }
}

TEST(ProjectionVector, AgreesWithDirectProjectionWhenResolvable)
{
    std::vector<Complex> d = spread_spectrum(120, 19);
    d[5]                   = Complex(0.05, -0.02);
    const MatrixPencil p(diag(d));
    const Vector f     = random_vec(120, 20);
    const ShiftData sd = build_shift(p, Complex(0.06, -0.01), f, 50, true);
    const Square sq{Complex(0.05, -0.02), 0.02};
    ASSERT_TRUE(is_resolvable(sq, sd, 1e-8));
    const Vector got = projection_vector(sq, sd, 16);
    const Vector ref = oracle::direct_projection(p, sq, f, 16);
    EXPECT_LE(simm::test::rel(got, ref), std::max(1e-8 * 10.0, 1e-6));
    // Isolating square: result is f_5 e_5 up to the filter factor.
    const Vector filt = filtered(d, {}, f, sq.center, sq.circumradius(), 16);
    EXPECT_LE(simm::test::rel(got, filt), 1e-6);
    EXPECT_NEAR(std::abs(got[5]), std::abs(f[5]), 1e-6 * std::abs(f[5]));
}

TEST(ProjectionVector, ConvergesWithMoreNodes)
{
    const std::vector<Complex> d = {0.5, Complex(0.9, 0.0), Complex(0.5, 0.6), 3.0};
    const MatrixPencil p(diag(d));
    const Vector f     = random_vec(4, 21);
    const ShiftData sd = build_shift(p, Complex(0.45, 0.05), f, 10, true);
    const Square sq{0.5, 0.4};
    Vector exact = Vector::Zero(4);
    exact[0]     = -f[0]; // (A - zI)^{-1} convention: residue -1 inside
    const double e8  = (projection_vector(sq, sd, 8) - exact).norm();
    const double e16 = (projection_vector(sq, sd, 16) - exact).norm();
    EXPECT_LE(e16 * 10.0, e8);
}

TEST(ProjectionVector, RequiresBasis)
{
    const MatrixPencil p(diag({1.0, 2.0}));
    const ShiftData sd = build_shift(p, 0.0, Vector::Ones(2), 2, false);
    EXPECT_THROW(projection_vector(Square{1.0, 0.1}, sd, 16), std::logic_error);
}

TEST(ReferenceIndicator, OneAndZero)
{
    const MatrixPencil p(diag({0.5, 10.0, Complex(-2.0, 1.0)}));
    const Vector f = random_vec(3, 22);
    EXPECT_NEAR(reference_indicator_rim(Square{0.5, 0.2}, p, f, 16), 1.0, 1e-3);
    EXPECT_LT(reference_indicator_rim(Square{5.0, 0.2}, p, f, 16), 1e-3);
}

TEST(ReferenceIndicator, AgreesWithMemoryEfficientIndicator)
{
    std::vector<Complex> d = spread_spectrum(60, 23);
    const MatrixPencil p(diag(d));
    const Vector f = random_vec(60, 24);
    std::mt19937_64 gen(25);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int agreed = 0;
    for (int k = 0; k < 20; ++k)
    {
        // Alternate squares around an eigenvalue and random (mostly empty) ones.
        const Complex c = k % 2 == 0 ? d[static_cast<std::size_t>(k)] + Complex(0.003, -0.002)
                                     : Complex(u(gen), u(gen));
        const Square sq{c, 0.02};
        const KrylovTable t = single(build_shift(p, c + Complex(1e-3, 1e-3), f, 50, false));
        const IndicatorValue iv = indicator(sq, t, IndicatorConfig{});
        ASSERT_TRUE(iv.resolvable) << k;
        const double rim = reference_indicator_rim(sq, p, f, 16);
        const bool a = iv.value > delta0;
        const bool b = rim > delta0;
        EXPECT_EQ(a, b) << "square " << k << " ratio " << iv.value << " rim " << rim;
        agreed += a == b;
    }
    EXPECT_EQ(agreed, 20);
}
