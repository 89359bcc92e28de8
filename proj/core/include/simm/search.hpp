#ifndef SIMM_SEARCH_HPP
#define SIMM_SEARCH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <simm/contour.hpp>
#include <simm/krylov.hpp>
#include <simm/sparse.hpp>
#include <simm/types.hpp>

namespace simm
{

/// Closed rectangle [re_min, re_max] x [im_min, im_max].
struct Region
{
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;

    Complex center() const noexcept
    {
        return {(re_min + re_max) / 2.0, (im_min + im_max) / 2.0};
    }
    bool contains(Complex z) const noexcept
    {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
               z.imag() <= im_max;
    }
};

struct SearchConfig
{
    Region region;
    double h0     = 1e-6;
    double eps    = 1e-8;
    double delta0 = 1.0 / 20.0;
    int m         = 50;
    int n0        = 8;
    int coarse_grid        = 0; ///< squares along the longer side; 0 = default (4)
    std::size_t max_shifts = 5000;
    std::uint64_t rng_seed = 0;
    int multiplicity_k     = 0; ///< 0 = off
    int threads            = 0; ///< 0 = serial

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;
};

enum class SquareStatus
{
    contains_eigenvalue,
    unresolvable,
    discarded
};

const char* to_string(SquareStatus s) noexcept;

struct MarkedSquare
{
    Square square;
    int level = 0;
    SquareStatus status = SquareStatus::discarded;
    std::optional<std::size_t> shift; ///< resolving shift (table index)
    double indicator = 0.0;
    /// Unresolvable at the finest level and kept as admissible.
    bool forced = false;
    /// Index of the parent in the visit log (none for coarse squares).
    std::optional<std::size_t> parent;
};

struct EigenvalueRecord
{
    Complex value;
    double box_size = 0.0;
    Complex shift;
    std::optional<int> multiplicity;
    std::optional<std::string> warning;
};

struct SearchStats
{
    std::size_t num_shifts          = 0;
    std::size_t num_factorizations  = 0;
    std::size_t num_shift_retries   = 0;
    std::size_t num_reduced_solves  = 0;
    std::size_t num_residual_checks = 0;
    std::size_t num_indicator_evals = 0;
    std::size_t num_multiplicity_factorizations = 0;
    int levels = 0; ///< K; squares are visited at levels 0..K
    std::vector<std::size_t> squares_per_level;
    std::size_t records_outside_region = 0;
    std::size_t unresolved_finest_squares = 0;
    double coarse_side = 0.0;
    double finest_side = 0.0;
    double wall_seconds = 0.0;

    std::size_t squares_visited() const noexcept;
};

struct SearchResult
{
    std::vector<EigenvalueRecord> records;
    SearchStats stats;
    std::vector<std::string> warnings;
    std::vector<MarkedSquare> visited; ///< every examined square, level order
    std::vector<Complex> shifts;       ///< creation order
    bool aborted = false;
    std::string diagnostic;
};

/// Thrown by sim_m internals when max_shifts would be exceeded. sim_m itself
/// turns it into SearchResult::aborted.
class ShiftLimitExceeded : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

///
/// Multilevel spectral-indicator search for all eigenvalues of the pencil in
/// config.region, located to within config.h0.
///
/// Coarse grid first (one shift at the region center, then one per coarse
/// square that no existing shift resolves), then levels 0..K with
/// K = ceil(log2(coarse_side / h0)). Resolvable squares are kept when their
/// indicator exceeds delta0. Unresolvable squares are split and deferred;
/// once smaller than coarse_side / 4 they get a shift at their own center.
/// Finest-level survivors are merged into records.
///
SearchResult sim_m(const MatrixPencil& pencil, const SearchConfig& config);

/// Standard complex normal vector (re, im ~ N(0, 1/2)), reproducible per seed.
Vector random_vector(Index n, std::uint64_t seed);

/// Side of the coarse squares and number of levels for a config.
double coarse_side(const SearchConfig& config);
int level_count(double coarse, double h0);

///
/// Merges 8-connected finest-level squares (equal side) into one record each,
/// at the centroid of the component's centers. Components wider than two
/// squares along an axis carry a warning, as do components with a forced
/// (unresolvable) square. `shifts` maps MarkedSquare::shift to a value.
///
std::vector<EigenvalueRecord> merge_marked(std::span<const MarkedSquare> finest,
                                           std::span<const Complex> shifts = {});

///
/// Search-side view of the shift table: first existing shift that resolves
/// the square, else a new one at the square center (perturbed by
/// (1+i) 1e-3 side on a singular factorization, up to 3 retries).
///
class ShiftPool
{
public:
    ShiftPool(const MatrixPencil& pencil, const Vector& f, const SearchConfig& config,
              SearchStats& stats);

    const KrylovTable& table() const noexcept { return m_table; }

    /// New shift at `sigma`; nullopt when every retry hit the spectrum.
    std::optional<std::size_t> create(Complex sigma, double side);

    /// First-match lookup starting at table index `first`, then creation.
    std::optional<std::size_t> shift_for_square(const Square& square, std::size_t first = 0);

private:
    const MatrixPencil& m_pencil;
    const Vector& m_f;
    const SearchConfig& m_config;
    SearchStats& m_stats;
    KrylovTable m_table;
};

///
/// Algebraic multiplicity of a located eigenvalue: builds k Krylov spaces at
/// the record's shift for fresh random vectors, projects each onto the
/// record's square and counts singular values above 1e-6 of the largest.
/// `warning` receives a note when the count saturates at k.
///
int multiplicity(const EigenvalueRecord& record, const MatrixPencil& pencil,
                 const SearchConfig& config, double finest_side,
                 std::optional<std::string>* warning = nullptr,
                 std::size_t* factorizations = nullptr);

} // namespace simm

#endif
