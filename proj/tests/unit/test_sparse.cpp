#include <gtest/gtest.h>

#include <simm/sparse.hpp>

#include "test_util.hpp"

using namespace simm;
using simm::test::diag;

TEST(MatrixPencil, RejectsNonSquareAndMismatchedSizes)
{
    EXPECT_THROW(MatrixPencil(SparseMatrix(2, 3)), DimensionError);
    EXPECT_THROW(MatrixPencil(diag({1.0, 2.0}), diag({1.0})), DimensionError);
}

TEST(MatrixPencil, AbsentBIsIdentity)
{
    const MatrixPencil p(diag({1.0, 2.0}));
    EXPECT_TRUE(p.has_identity_b());
    const Vector v = simm::test::random_vec(2, 1);
    EXPECT_EQ(p.apply_b(v), v);
}

TEST(ShiftedMatrix, DiagonalMinusOne)
{
    const MatrixPencil p(diag({1.0, 2.0}));
    const DenseMatrix s = to_dense(shifted_matrix(p, 1.0));
    EXPECT_EQ(s(0, 0), Complex(0.0));
    EXPECT_EQ(s(1, 1), Complex(1.0));
    EXPECT_EQ(s(0, 1), Complex(0.0));
    EXPECT_EQ(s(1, 0), Complex(0.0));
}

TEST(ShiftedMatrix, ZeroShiftCopiesA)
{
    const SparseMatrix a = simm::test::random_sparse(30, 0.1, 7);
    const MatrixPencil p(a, simm::test::random_sparse(30, 0.1, 8));
    EXPECT_EQ(to_dense(shifted_matrix(p, 0.0)), to_dense(a));
}

TEST(ShiftedMatrix, MatchesDenseArithmetic)
{
    const SparseMatrix a = simm::test::random_sparse(50, 0.05, 11);
    const SparseMatrix b = simm::test::random_sparse(50, 0.05, 12);
    const MatrixPencil p(a, b);
    const Complex sigma(0.3, 0.1);
    const DenseMatrix s = to_dense(shifted_matrix(p, sigma));
    const DenseMatrix expect = to_dense(a) - sigma * to_dense(b);
    EXPECT_LE((s - expect).cwiseAbs().maxCoeff(), 1e-15);
    // A is recovered by adding sigma B back.
    const DenseMatrix back = s + sigma * to_dense(b);
    EXPECT_LE((back - to_dense(a)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ShiftedMatrix, InputsUnmodified)
{
    const SparseMatrix a = simm::test::random_sparse(20, 0.1, 3);
    const MatrixPencil p(a);
    (void)shifted_matrix(p, Complex(2.0, -1.0));
    EXPECT_EQ(to_dense(p.a()), to_dense(a));
}

TEST(Spmv, IdentityAndDiagonal)
{
    const Vector v = simm::test::random_vec(4, 5);
    EXPECT_EQ(spmv(diag({1.0, 1.0, 1.0, 1.0}), v), v);
    Vector ones = Vector::Ones(2);
    const Vector r = spmv(diag({1.0, 2.0}), ones);
    EXPECT_EQ(r[0], Complex(1.0));
    EXPECT_EQ(r[1], Complex(2.0));
}

TEST(Spmv, MatchesDenseProduct)
{
    const SparseMatrix s = simm::test::random_sparse(80, 0.08, 21);
    const Vector v = simm::test::random_vec(80, 22);
    const Vector expect = to_dense(s) * v;
    EXPECT_LE(simm::test::rel(spmv(s, v), expect), 1e-14);
}

TEST(Spmv, DimensionMismatch)
{
    EXPECT_THROW(spmv(diag({1.0, 2.0}), Vector::Ones(3)), DimensionError);
}

TEST(Factorization, IdentitySolveReturnsRhs)
{
    const Factorization f = Factorization::factorize(diag({1.0, 1.0, 1.0}));
    Vector e1 = Vector::Zero(3);
    e1[0]     = 1.0;
    EXPECT_EQ(f.solve(e1), e1);
}

TEST(Factorization, DiagonalSolve)
{
    const Factorization f = Factorization::factorize(diag({2.0, 4.0}));
    Vector rhs(2);
    rhs << 2.0, 4.0;
    const Vector x = f.solve(rhs);
    EXPECT_NEAR(std::abs(x[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(x[1] - 1.0), 0.0, 1e-15);
}

TEST(Factorization, SingularDiagonalThrows)
{
    EXPECT_THROW(Factorization::factorize(diag({0.0, 1.0})), SingularMatrixError);
}

TEST(Factorization, StructurallySingularThrows)
{
    SparseMatrix s(3, 3);
    s.insert(0, 0) = 1.0;
    s.insert(1, 1) = 1.0;
    s.makeCompressed();
    EXPECT_THROW(Factorization::factorize(s), SingularMatrixError);
}

TEST(Factorization, NonSquareThrows)
{
    EXPECT_THROW(Factorization::factorize(SparseMatrix(3, 2)), DimensionError);
}

TEST(Factorization, SolveDimensionMismatch)
{
    const Factorization f = Factorization::factorize(diag({1.0, 2.0}));
    EXPECT_THROW(f.solve(Vector::Ones(3)), DimensionError);
}

TEST(Factorization, RandomSystemsSmallResidual)
{
    const SparseMatrix s = simm::test::random_sparse(100, 0.05, 31);
    const Factorization f = Factorization::factorize(s);
    EXPECT_GT(f.pivot_ratio(), 0.0);
    for (int k = 0; k < 5; ++k)
    {
        const Vector b = simm::test::random_vec(100, 100 + k);
        const Vector x = f.solve(b);
        EXPECT_LE((spmv(s, x) - b).norm() / b.norm(), 1e-10);
    }
}

TEST(Factorization, TwentyRandomMatrices)
{
    for (int k = 0; k < 20; ++k)
    {
        const Index n = 20 + 9 * k;
        const SparseMatrix s = simm::test::random_sparse(n, 4.0 / n, 500 + k);
        const Vector b = simm::test::random_vec(n, 900 + k);
        const Vector x = Factorization::factorize(s).solve(b);
        EXPECT_LE((spmv(s, x) - b).norm() / b.norm(), 1e-10) << "n = " << n;
    }
}

TEST(Factorization, AgreesWithDenseLu)
{
    const SparseMatrix s = simm::test::random_sparse(50, 0.1, 41);
    const Vector b = simm::test::random_vec(50, 42);
    const Vector x = Factorization::factorize(s).solve(b);
    const Vector ref = to_dense(s).fullPivLu().solve(b);
    for (Index i = 0; i < 50; ++i)
        EXPECT_LE(std::abs(x[i] - ref[i]), 1e-9 * std::abs(ref[i]) + 1e-14);
}

TEST(Factorization, SharedAcrossCopies)
{
    const Factorization f = Factorization::factorize(diag({2.0, 4.0}));
    const Factorization g = f;
    EXPECT_EQ(f.solve(Vector::Ones(2)), g.solve(Vector::Ones(2)));
    EXPECT_EQ(g.size(), 2);
}
