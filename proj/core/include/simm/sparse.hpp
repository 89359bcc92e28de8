#ifndef SIMM_SPARSE_HPP
#define SIMM_SPARSE_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <simm/types.hpp>

namespace simm
{

/// Thrown when an LU factorization meets a zero (or sub-1e-300) pivot. The
/// search driver catches it and perturbs the shift.
class SingularMatrixError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

///
/// The pair (A, B) of a generalized eigenproblem A x = lambda B x.
/// An absent B stands for the identity.
///
class MatrixPencil
{
public:
    explicit MatrixPencil(SparseMatrix a, std::optional<SparseMatrix> b = std::nullopt);

    Index size() const noexcept { return m_a.rows(); }
    const SparseMatrix& a() const noexcept { return m_a; }
    const std::optional<SparseMatrix>& b() const noexcept { return m_b; }
    bool has_identity_b() const noexcept { return !m_b.has_value(); }

    /// B v (or v when B is the identity).
    Vector apply_b(const Vector& v) const;

private:
    SparseMatrix m_a;
    std::optional<SparseMatrix> m_b;
};

/// A - sigma B over the union sparsity pattern. Inputs are left untouched.
SparseMatrix shifted_matrix(const MatrixPencil& pencil, Complex sigma);

Vector spmv(const SparseMatrix& s, const Vector& v);

///
/// Sparse LU factorization (partial pivoting, COLAMD column ordering) of a
/// square matrix. Immutable once built; solve() is safe from several threads.
///
class Factorization
{
public:
    /// Throws SingularMatrixError on a zero or sub-1e-300 pivot, or when
    /// pivot_ratio() < near_singular_pivot_ratio;
    /// DimensionError when the matrix is not square.
    static Factorization factorize(const SparseMatrix& s);

    Vector solve(const Vector& rhs) const;

    Index size() const noexcept { return m_size; }

    /// min |pivot| / max |pivot| of the U factor. Crude, but it is what the
    /// singularity check looks at.
    double pivot_ratio() const noexcept { return m_min_pivot / m_max_pivot; }
    double min_pivot() const noexcept { return m_min_pivot; }

private:
    struct Impl;
    Factorization() = default;

    std::shared_ptr<const Impl> m_impl;
    Index m_size       = 0;
    double m_min_pivot = 0.0;
    double m_max_pivot = 0.0;
};

inline constexpr double singular_pivot_threshold = 1e-300;

/// min |pivot| / max |pivot| below this is treated as singular too. A shift
/// that lands on an eigenvalue of a non-triangular pencil leaves a pivot of
/// order u |A| rather than an exact zero.
inline constexpr double near_singular_pivot_ratio = 1e-14;

} // namespace simm

#endif
