#include <simm/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace simm::oracle
{

std::vector<Complex> dense_eigs(const MatrixPencil& pencil)
{
    const Index n = pencil.size();
    DenseMatrix c = to_dense(pencil.a());
    if (pencil.b())
    {
        const DenseMatrix b = to_dense(*pencil.b());
        Eigen::FullPivLU<DenseMatrix> check(b);
        if (!check.isInvertible())
            throw std::invalid_argument("dense_eigs: B is singular (QZ is not implemented)");
        c = b.partialPivLu().solve(c);
    }

    Eigen::ComplexEigenSolver<DenseMatrix> es;
    es.setMaxIterations(40 * std::max<Index>(n, 1));
    es.compute(c, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("dense_eigs: QR iteration did not converge");

    const Vector& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

SyntheticPencil synth_pencil(const std::vector<Complex>& eigs, Index n, std::uint64_t seed,
                             const SynthOptions& options)
{
    if (static_cast<Index>(eigs.size()) > n)
        throw std::invalid_argument("synth_pencil: more eigenvalues than rows");
    if (options.b_diagonal && static_cast<Index>(options.b_diagonal->size()) != n)
        throw std::invalid_argument("synth_pencil: b_diagonal must have n entries");

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<Complex> spectrum = eigs;
    while (static_cast<Index>(spectrum.size()) < n)
    {
        // Uniform in the annulus (area measure).
        const double r2lo = options.outer_min * options.outer_min;
        const double r2hi = options.outer_max * options.outer_max;
        const double r    = std::sqrt(r2lo + (r2hi - r2lo) * unit(gen));
        const double th   = 2.0 * std::numbers::pi * unit(gen);
        spectrum.push_back(options.outer_center + std::polar(r, th));
    }

    const double p = std::min(1.0, options.fill_per_row / static_cast<double>(n));
    std::vector<Eigen::Triplet<Complex, int>> trips;
    for (Index i = 0; i < n; ++i)
    {
        const Complex bii = options.b_diagonal ? (*options.b_diagonal)[static_cast<std::size_t>(i)]
                                               : Complex(1.0, 0.0);
        trips.emplace_back(static_cast<int>(i), static_cast<int>(i),
                           spectrum[static_cast<std::size_t>(i)] * bii);
        for (Index j = i + 1; j < n; ++j)
            if (unit(gen) < p)
                trips.emplace_back(static_cast<int>(i), static_cast<int>(j),
                                   options.fill_scale * Complex(normal(gen), normal(gen)));
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());

    std::optional<SparseMatrix> b;
    if (options.b_diagonal)
    {
        std::vector<Eigen::Triplet<Complex, int>> bt;
        for (Index i = 0; i < n; ++i)
            bt.emplace_back(static_cast<int>(i), static_cast<int>(i),
                            (*options.b_diagonal)[static_cast<std::size_t>(i)]);
        b.emplace(n, n);
        b->setFromTriplets(bt.begin(), bt.end());
    }

    if (options.similarity && n > 1)
    {
        // N has entries only at (odd row, even column), row > column, so
        // N^2 = 0 and (I + N)^{-1} = I - N.
        std::vector<Eigen::Triplet<Complex, int>> nt;
        for (Index i = 1; i < n; i += 2)
            for (Index j = 0; j < i; j += 2)
                if (unit(gen) < p)
                    nt.emplace_back(static_cast<int>(i), static_cast<int>(j),
                                    options.fill_scale * Complex(normal(gen), normal(gen)));
        SparseMatrix nmat(n, n);
        nmat.setFromTriplets(nt.begin(), nt.end());
        SparseMatrix eye(n, n);
        eye.setIdentity();
        const SparseMatrix l    = eye + nmat;
        const SparseMatrix linv = eye - nmat;
        a = (l * a * linv).pruned(0.0);
        if (b)
            *b = (l * (*b) * linv).pruned(0.0);
    }
    a.makeCompressed();

    return SyntheticPencil{MatrixPencil(std::move(a), std::move(b)), std::move(spectrum)};
}

Vector direct_projection(const MatrixPencil& pencil, const Square& square, const Vector& f,
                         int n_points)
{
    const QuadratureSet rule = circle_rule(square.center, square.circumradius(), n_points);
    Vector acc               = Vector::Zero(f.size());
    for (std::size_t j = 0; j < rule.points.size(); ++j)
    {
        const Factorization lu = Factorization::factorize(shifted_matrix(pencil, rule.points[j]));
        acc += rule.coeffs[j] * lu.solve(f);
    }
    return acc;
}

std::optional<double> match_multisets(std::vector<Complex> a, std::vector<Complex> b, double cap)
{
    if (a.size() != b.size())
        return std::nullopt;
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const Complex x : a)
    {
        std::size_t best = b.size();
        double dist      = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j)
        {
            if (used[j])
                continue;
            const double d = std::abs(x - b[j]);
            if (d < dist)
            {
                dist = d;
                best = j;
            }
        }
        if (best == b.size() || dist > cap)
            return std::nullopt;
        used[best] = true;
        worst      = std::max(worst, dist);
    }
    return worst;
}

double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    if (a.empty() && b.empty())
        return 0.0;
    if (a.empty() || b.empty())
        return std::numeric_limits<double>::infinity();
    auto one_sided = [](const std::vector<Complex>& x, const std::vector<Complex>& y) {
        double worst = 0.0;
        for (const Complex p : x)
        {
            double best = std::numeric_limits<double>::infinity();
            for (const Complex q : y)
                best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

} // namespace simm::oracle
