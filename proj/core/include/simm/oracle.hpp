#ifndef SIMM_ORACLE_HPP
#define SIMM_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <simm/contour.hpp>
#include <simm/sparse.hpp>
#include <simm/types.hpp>

/// Reference solvers used to check the search. Dense and slow on purpose.
namespace simm::oracle
{

/// Full spectrum of the pencil through C = B^{-1} A (dense), Householder
/// Hessenberg reduction and shifted complex QR. B must be nonsingular.
std::vector<Complex> dense_eigs(const MatrixPencil& pencil);

struct SyntheticPencil
{
    MatrixPencil pencil;
    std::vector<Complex> true_eigenvalues;
};

struct SynthOptions
{
    /// Conjugate by L = I + N, N strictly lower with N^2 = 0 (rows odd,
    /// columns even), so that L^{-1} = I - N exactly.
    bool similarity = false;
    /// Nonzeros per row of the strictly upper fill (density fill_per_row / n).
    double fill_per_row = 5.0;
    double fill_scale   = 0.5;
    /// Diagonal entries beyond the prescribed ones are drawn uniformly from the
    /// annulus outer_min <= |z - outer_center| <= outer_max.
    Complex outer_center = {0.5, 0.0};
    double outer_min     = 3.0;
    double outer_max     = 6.0;
    /// B = diag(b_diagonal) when set (the spectrum is then eigs, with A's
    /// diagonal scaled accordingly); identity otherwise.
    std::optional<std::vector<Complex>> b_diagonal;
};

///
/// Upper-triangular pencil with the given eigenvalues on the diagonal (the
/// rest outside any test region), sparse random strictly-upper fill, and an
/// optional exact similarity transform.
///
SyntheticPencil synth_pencil(const std::vector<Complex>& eigs, Index n, std::uint64_t seed,
                             const SynthOptions& options = {});

/// Brute-force sum_j w_j (A - z_j B)^{-1} f over the n_points rule on the
/// square's circumscribing circle, one sparse factorization per node.
Vector direct_projection(const MatrixPencil& pencil, const Square& square, const Vector& f,
                         int n_points);

/// Greedy nearest-neighbour matching of two multisets. Returns the largest
/// matched distance, or nullopt when the sizes differ or some pair is
/// farther than cap.
std::optional<double> match_multisets(std::vector<Complex> a, std::vector<Complex> b,
                                      double cap);

/// Symmetric Hausdorff distance between two finite sets (inf if one is empty
/// and the other is not).
double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b);

} // namespace simm::oracle

#endif
