#ifndef SIMM_KRYLOV_HPP
#define SIMM_KRYLOV_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <simm/sparse.hpp>
#include <simm/types.hpp>

namespace simm
{

/// The reduced system I + (sigma - z) H is singular at z (z sits on the image
/// of a Ritz value). Callers nudge the quadrature radius.
class ReducedSystemSingular : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using LinearOperator = std::function<Vector(const Vector&)>;

struct ArnoldiResult
{
    DenseMatrix basis;     ///< n x m' orthonormal columns
    DenseMatrix hessenberg; ///< m' x m'
    double h_next = 0.0;   ///< h_{m'+1,m'}; zero on happy breakdown
    Vector next_vector;    ///< v_{m'+1} (zero vector on breakdown)
    bool breakdown = false;
};

///
/// Arnoldi iteration started at b / |b|, modified Gram-Schmidt with one full
/// reorthogonalization pass. Stops early once h_{j+1,j} < 1e-14 |H|_F.
///
ArnoldiResult arnoldi(const LinearOperator& apply_m, const Vector& b, int m);

///
/// M = (A - sigma B)^{-1} B for a fixed shift. Owns the factorization of
/// A - sigma B; immutable after construction.
///
class ShiftedOperator
{
public:
    /// Throws SingularMatrixError when sigma hits the spectrum.
    ShiftedOperator(const MatrixPencil& pencil, Complex sigma);

    Complex sigma() const noexcept { return m_sigma; }
    const MatrixPencil& pencil() const noexcept { return *m_pencil; }

    /// (A - sigma B)^{-1} v
    Vector resolve(const Vector& v) const { return m_factor.solve(v); }
    /// M v
    Vector apply(const Vector& v) const { return m_factor.solve(m_pencil->apply_b(v)); }

private:
    const MatrixPencil* m_pencil;
    Complex m_sigma;
    Factorization m_factor;
};

///
/// Compact per-shift Krylov record. Everything needed for reduced solves and
/// residual estimates at arbitrary z lives in O(m^2) storage; the n x m basis
/// is only kept on request (multiplicity mode, tests).
///
struct ShiftData
{
    Complex sigma;
    int m = 0;             ///< actual Krylov dimension (<= requested on breakdown)
    DenseMatrix H;
    double h_next = 0.0;
    double beta   = 0.0;   ///< |(A - sigma B)^{-1} f|_2

    Vector eig_values;     ///< D in H = P D P^{-1}
    DenseMatrix eig_vectors; ///< P
    Vector c1;             ///< first column of P^{-1}
    Vector r_lambda;       ///< last row of P
    double eig_condition = 0.0; ///< 2-norm condition number of P
    bool slow_path       = false;

    std::optional<DenseMatrix> basis;
    std::optional<Vector> next_vector;
};

/// Condition number of P above which reduced solves use the direct route.
inline constexpr double eig_condition_limit = 1e12;

/// Build Krylov data of dimension m for (op, f). f is the right-hand side of
/// (A - zB) x = f; b = (A - sigma B)^{-1} f seeds the Arnoldi run.
ShiftData build_shift(const ShiftedOperator& op, const Vector& f, int m, bool keep_basis);

/// Factorizes A - sigma B and builds the shift data in one go.
ShiftData build_shift(const MatrixPencil& pencil, Complex sigma, const Vector& f, int m,
                      bool keep_basis);

/// y solving (I + (sigma - z) H) y = beta e_1. Picks the eigendecomposition
/// route unless the shift is flagged slow_path.
Vector reduced_solve(const ShiftData& sd, Complex z);
Vector reduced_solve_fast(const ShiftData& sd, Complex z);
Vector reduced_solve_direct(const ShiftData& sd, Complex z);

/// Relative residual |sigma - z| h_next |e_m^T y| / beta of the Krylov
/// (Galerkin) solution of (I + (sigma - z) M) x = b.
double residual_estimate(const ShiftData& sd, Complex z);

/// x = V_m y. Requires a retained basis.
Vector lift(const ShiftData& sd, const Vector& y);

///
/// Shifts in creation order. Appends are serialized by the search driver;
/// readers take the current size as their snapshot.
///
class KrylovTable
{
public:
    using Entry = std::shared_ptr<const ShiftData>;

    /// Returns the index of the new entry. Throws std::invalid_argument on a
    /// repeated shift.
    std::size_t append(ShiftData sd);

    std::size_t size() const noexcept { return m_entries.size(); }
    bool empty() const noexcept { return m_entries.empty(); }
    const ShiftData& operator[](std::size_t i) const { return *m_entries[i]; }
    const Entry& entry(std::size_t i) const { return m_entries.at(i); }

private:
    std::vector<Entry> m_entries;
};

} // namespace simm

#endif
