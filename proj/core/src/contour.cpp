#include <simm/contour.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace simm
{

namespace
{

constexpr double tiny_sum = 1e-300;
constexpr double pole_tol = 1e-14;

} // namespace

std::array<Square, 4> Square::children() const
{
    const double q = side / 4.0;
    const double h = side / 2.0;
    return {Square{center + Complex(-q, -q), h}, Square{center + Complex(q, -q), h},
            Square{center + Complex(-q, q), h}, Square{center + Complex(q, q), h}};
}

bool Square::contains(Complex z) const noexcept
{
    const double h = side / 2.0;
    return std::abs(z.real() - center.real()) <= h && std::abs(z.imag() - center.imag()) <= h;
}

double Square::circumradius() const noexcept
{
    return side * std::numbers::sqrt2 / 2.0;
}

QuadratureSet circle_rule(Complex center, double radius, int n_points)
{
    if (n_points < 1)
        throw std::invalid_argument("circle_rule: need at least one node");
    QuadratureSet q;
    q.center = center;
    q.radius = radius;
    q.n0     = n_points / 2;
    q.points.resize(static_cast<std::size_t>(n_points));
    q.coeffs.resize(static_cast<std::size_t>(n_points));
    for (int j = 0; j < n_points; ++j)
    {
        const double theta = 2.0 * std::numbers::pi * j / n_points;
        const Complex e    = std::polar(1.0, theta);
        q.points[static_cast<std::size_t>(j)] = center + radius * e;
        q.coeffs[static_cast<std::size_t>(j)] = (radius / n_points) * e;
    }
    return q;
}

QuadratureSet quadrature(const Square& square, int n0, double radius_scale)
{
    if (n0 < 2)
        throw std::invalid_argument("quadrature: n0 must be >= 2");
    if (!(square.side > 0.0))
        throw std::invalid_argument("quadrature: square side must be positive");
    return circle_rule(square.center, square.circumradius() * radius_scale, 2 * n0);
}

ResolveCheck check_resolvable(const QuadratureSet& nominal, const QuadratureSet& nudged,
                              const ShiftData& sd, double eps)
{
    ResolveCheck out;
    for (const QuadratureSet* rule : {&nominal, &nudged})
    {
        try
        {
            bool ok = true;
            for (const Complex z : rule->points)
            {
                ++out.residual_checks;
                if (!(residual_estimate(sd, z) <= eps))
                {
                    ok = false;
                    break;
                }
            }
            out.resolvable = ok;
            out.nudged     = rule == &nudged;
            return out;
        }
        catch (const ReducedSystemSingular&)
        {
            continue;
        }
    }
    out.resolvable = false;
    out.nudged     = true;
    return out;
}

ResolveCheck check_resolvable(const Square& square, const ShiftData& sd, double eps, int n0)
{
    return check_resolvable(quadrature(square, n0), quadrature(square, n0, radius_nudge), sd, eps);
}

bool is_resolvable(const Square& square, const ShiftData& sd, double eps, int n0)
{
    return check_resolvable(square, sd, eps, n0).resolvable;
}

double indicator_ratio(const ShiftData& sd, const QuadratureSet& rule)
{
    const std::size_t npts = rule.points.size();
    // Column 0: 2 n0-point sum, column 1: n0-point sum.
    DenseMatrix sums = DenseMatrix::Zero(sd.m, 2);
    if (sd.slow_path)
    {
        for (std::size_t j = 0; j < npts; ++j)
        {
            const Vector y = reduced_solve_direct(sd, rule.points[j]);
            sums.col(0) += rule.coeffs[j] * y;
            if (j % 2 == 0)
                sums.col(1) += (2.0 * rule.coeffs[j]) * y;
        }
    }
    else
    {
        // y_j = beta P (c1 ./ d_j); sum in eigen-coordinates, map back once.
        for (std::size_t j = 0; j < npts; ++j)
        {
            const Complex shift = sd.sigma - rule.points[j];
            const Complex w     = rule.coeffs[j];
            const bool even     = j % 2 == 0;
            for (int i = 0; i < sd.m; ++i)
            {
                const Complex t = shift * sd.eig_values[i];
                const Complex d = 1.0 + t;
                const double r  = pole_tol * (1.0 + std::sqrt(std::norm(t)));
                if (std::norm(d) <= r * r)
                    throw ReducedSystemSingular("indicator: node on a Ritz pole");
                const Complex g = w * (sd.c1[i] / d);
                sums(i, 0) += g;
                if (even)
                    sums(i, 1) += 2.0 * g;
            }
        }
        sums = sd.beta * (sd.eig_vectors * sums);
    }
    const double num = sums.col(0).norm();
    const double den = sums.col(1).norm();
    if (num < tiny_sum && den < tiny_sum)
        return 0.0;
    if (den < tiny_sum)
        return std::numeric_limits<double>::infinity();
    return num / den;
}

IndicatorValue indicator(const Square& square, const KrylovTable& table,
                         const IndicatorConfig& config, std::optional<std::size_t> snapshot,
                         std::size_t first)
{
    IndicatorValue out;
    const std::size_t limit = std::min(snapshot.value_or(table.size()), table.size());
    if (first >= limit)
        return out;
    const QuadratureSet nominal = quadrature(square, config.n0);
    const QuadratureSet nudged  = quadrature(square, config.n0, radius_nudge);
    for (std::size_t s = first; s < limit; ++s)
    {
        const ResolveCheck rc = check_resolvable(nominal, nudged, table[s], config.eps);
        out.residual_checks += rc.residual_checks;
        if (!rc.resolvable)
            continue;
        const QuadratureSet& rule = rc.nudged ? nudged : nominal;
        out.resolvable = true;
        out.shift_used = s;
        out.nudged     = rc.nudged;
        out.value      = indicator_ratio(table[s], rule);
        out.reduced_solves += rule.points.size();
        return out;
    }
    return out;
}

Vector projection_vector(const Square& square, const ShiftData& sd, int n_points)
{
    if (!sd.basis)
        throw std::logic_error("projection_vector: Krylov basis was not retained");
    const QuadratureSet rule = circle_rule(square.center, square.circumradius(), n_points);
    Vector acc               = Vector::Zero(sd.m);
    for (std::size_t j = 0; j < rule.points.size(); ++j)
        acc += rule.coeffs[j] * reduced_solve(sd, rule.points[j]);
    return lift(sd, acc);
}

double reference_indicator_rim(const Square& square, const MatrixPencil& pencil, const Vector& f,
                               int n0)
{
    const QuadratureSet rule = circle_rule(square.center, square.circumradius(), n0);
    std::vector<Factorization> factors;
    factors.reserve(rule.points.size());
    for (const Complex z : rule.points)
        factors.push_back(Factorization::factorize(shifted_matrix(pencil, z)));

    auto project = [&](const Vector& g) {
        Vector acc = Vector::Zero(g.size());
        for (std::size_t j = 0; j < factors.size(); ++j)
            acc += rule.coeffs[j] * factors[j].solve(g);
        return acc;
    };
    const Vector pf    = project(f);
    const double pnorm = pf.norm();
    if (!(pnorm > 0.0))
        return 0.0;
    return project(pf / pnorm).norm();
}

} // namespace simm
