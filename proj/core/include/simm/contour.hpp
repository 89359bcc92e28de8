#ifndef SIMM_CONTOUR_HPP
#define SIMM_CONTOUR_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <simm/krylov.hpp>
#include <simm/sparse.hpp>
#include <simm/types.hpp>

namespace simm
{

/// Axis-aligned square, the unit of bisection.
struct Square
{
    Complex center;
    double side = 0.0;

    /// Quadrants: lower-left, lower-right, upper-left, upper-right.
    std::array<Square, 4> children() const;
    bool contains(Complex z) const noexcept;
    double circumradius() const noexcept;
};

///
/// Trapezoid rule on the circle circumscribing a square. `points` holds
/// N = 2 n0 nodes z_j = c + r exp(2 pi i j / N); `coeffs` holds
/// w_j = (r / N) exp(2 pi i j / N), so that sum_j w_j g(z_j) approximates
/// (1 / 2 pi i) of the contour integral of g. The even-indexed nodes form the
/// n0-point rule, whose coefficients are 2 w_{2k}.
///
struct QuadratureSet
{
    Complex center;
    double radius = 0.0;
    int n0        = 0;
    std::vector<Complex> points;
    std::vector<Complex> coeffs;
};

/// N-point trapezoid rule on an arbitrary circle.
QuadratureSet circle_rule(Complex center, double radius, int n_points);

/// Nested 2 n0-point rule on the circumscribing circle (radius scaled by
/// radius_scale, used for the collision nudge).
QuadratureSet quadrature(const Square& square, int n0, double radius_scale = 1.0);

/// Radius factor applied once when a node lands on a Ritz pole.
inline constexpr double radius_nudge = 1.001;

struct IndicatorConfig
{
    double eps = 1e-8;
    int n0     = 8;
};

struct IndicatorValue
{
    double value    = 0.0;
    bool resolvable = false;
    std::optional<std::size_t> shift_used; ///< index into the KrylovTable
    bool nudged            = false;        ///< radius was scaled by radius_nudge
    std::size_t reduced_solves  = 0;
    std::size_t residual_checks = 0;
};

/// Outcome of testing one shift against one square.
struct ResolveCheck
{
    bool resolvable = false;
    bool nudged     = false;
    std::size_t residual_checks = 0;
};

/// All 2 n0 nodes of the square's rule have residual_estimate <= eps. A
/// Ritz-pole collision triggers one radius nudge; a second collision means
/// "not resolvable by this shift".
ResolveCheck check_resolvable(const Square& square, const ShiftData& sd, double eps, int n0);

/// Same, with the nominal and nudged rules precomputed by the caller.
ResolveCheck check_resolvable(const QuadratureSet& nominal, const QuadratureSet& nudged,
                              const ShiftData& sd, double eps);

bool is_resolvable(const Square& square, const ShiftData& sd, double eps, int n0 = 8);

/// Ratio |sum_{2 n0} w_j y_j| / |sum_{n0} w_j y_j| for a fixed shift and rule.
/// Both sums below 1e-300 give 0; a tiny denominator alone gives +inf
/// (admissible).
double indicator_ratio(const ShiftData& sd, const QuadratureSet& rule);

///
/// Memory-efficient indicator: the first shift (creation order) among the
/// first `snapshot` entries of the table that resolves the square supplies all
/// 2 n0 reduced solves. `snapshot` defaults to the whole table.
///
IndicatorValue indicator(const Square& square, const KrylovTable& table,
                         const IndicatorConfig& config,
                         std::optional<std::size_t> snapshot = std::nullopt,
                         std::size_t first = 0);

/// sum_j w_j V_m y_j over the n_points rule. Requires a retained basis.
Vector projection_vector(const Square& square, const ShiftData& sd, int n_points);

/// Reference RIM indicator |P(Pf / |Pf|)| with direct sparse solves at every
/// node of the n0-point rule. Test reference for small pencils.
double reference_indicator_rim(const Square& square, const MatrixPencil& pencil, const Vector& f,
                               int n0);

} // namespace simm

#endif
