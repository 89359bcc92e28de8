#include <simm/krylov.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace simm
{

namespace
{

constexpr double breakdown_tol = 1e-14;
// |1 + (sigma - z) lambda_i| below this (relative) counts as an exact pole.
constexpr double pole_tol = 1e-14;
constexpr double direct_rcond_tol = 1e-15;

// |d| <= pole_tol (1 + |t|) without the hypot calls.
inline bool on_pole(Complex d, Complex t) noexcept
{
    const double r = pole_tol * (1.0 + std::sqrt(std::norm(t)));
    return std::norm(d) <= r * r;
}

Vector pole_factors(const ShiftData& sd, Complex z)
{
    const Complex shift = sd.sigma - z;
    Vector d(sd.m);
    for (int i = 0; i < sd.m; ++i)
    {
        const Complex t = shift * sd.eig_values[i];
        d[i]            = 1.0 + t;
        if (on_pole(d[i], t))
        {
            std::ostringstream msg;
            msg << "reduced system singular at z = " << z << " (Ritz pole)";
            throw ReducedSystemSingular(msg.str());
        }
    }
    return d;
}

void require_eigendecomposition(const ShiftData& sd)
{
    if (sd.eig_values.size() != sd.m || sd.c1.size() != sd.m)
        throw std::logic_error("reduced_solve_fast: no eigendecomposition of H");
}

} // namespace

ArnoldiResult arnoldi(const LinearOperator& apply_m, const Vector& b, int m)
{
    if (m < 1)
        throw std::invalid_argument("arnoldi: m must be >= 1");
    const double bnorm = b.norm();
    if (!(bnorm > 0.0))
        throw std::invalid_argument("arnoldi: zero starting vector");

    const Index n = b.size();
    DenseMatrix V(n, m + 1);
    DenseMatrix H = DenseMatrix::Zero(m + 1, m);
    V.col(0)      = b / bnorm;

    int dim        = m;
    bool breakdown = false;
    for (int j = 0; j < m; ++j)
    {
        Vector w = apply_m(V.col(j));
        if (w.size() != n)
            throw DimensionError("arnoldi: operator changed the vector size");
        // Two MGS sweeps; the second one mops up lost orthogonality.
        for (int pass = 0; pass < 2; ++pass)
        {
            for (int i = 0; i <= j; ++i)
            {
                const Complex h = V.col(i).dot(w);
                H(i, j) += h;
                w -= h * V.col(i);
            }
        }
        const double hn = w.norm();
        H(j + 1, j)     = hn;
        const double hnorm = H.topLeftCorner(j + 2, j + 1).norm();
        if (hn < breakdown_tol * hnorm)
        {
            H(j + 1, j) = 0.0;
            dim         = j + 1;
            breakdown   = true;
            break;
        }
        V.col(j + 1) = w / hn;
    }

    ArnoldiResult out;
    out.basis      = V.leftCols(dim);
    out.hessenberg = H.topLeftCorner(dim, dim);
    out.breakdown  = breakdown;
    if (breakdown)
    {
        out.h_next      = 0.0;
        out.next_vector = Vector::Zero(n);
    }
    else
    {
        out.h_next      = H(dim, dim - 1).real();
        out.next_vector = V.col(dim);
    }
    return out;
}

ShiftedOperator::ShiftedOperator(const MatrixPencil& pencil, Complex sigma)
    : m_pencil(&pencil), m_sigma(sigma),
      m_factor(Factorization::factorize(shifted_matrix(pencil, sigma)))
{
}

ShiftData build_shift(const ShiftedOperator& op, const Vector& f, int m, bool keep_basis)
{
    if (f.size() != op.pencil().size())
        throw DimensionError("build_shift: f has the wrong size");

    ShiftData sd;
    sd.sigma        = op.sigma();
    const Vector b  = op.resolve(f);
    sd.beta         = b.norm();
    if (!std::isfinite(sd.beta))
        throw SingularMatrixError("build_shift: non-finite (A - sigma B)^{-1} f");

    ArnoldiResult ar = arnoldi([&op](const Vector& v) { return op.apply(v); }, b, m);
    sd.m             = static_cast<int>(ar.hessenberg.rows());
    sd.H             = std::move(ar.hessenberg);
    sd.h_next        = ar.h_next;
    if (keep_basis)
    {
        sd.basis       = std::move(ar.basis);
        sd.next_vector = std::move(ar.next_vector);
    }

    Eigen::ComplexEigenSolver<DenseMatrix> es(sd.H, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
    {
        sd.slow_path     = true;
        sd.eig_condition = std::numeric_limits<double>::infinity();
        return sd;
    }
    sd.eig_values  = es.eigenvalues();
    sd.eig_vectors = es.eigenvectors();

    Eigen::JacobiSVD<DenseMatrix> svd(sd.eig_vectors);
    const auto& sv   = svd.singularValues();
    const double lo  = sv[sv.size() - 1];
    sd.eig_condition = lo > 0.0 ? sv[0] / lo : std::numeric_limits<double>::infinity();

    Vector e1       = Vector::Zero(sd.m);
    e1[0]           = 1.0;
    sd.c1           = sd.eig_vectors.partialPivLu().solve(e1);
    sd.r_lambda     = sd.eig_vectors.row(sd.m - 1).transpose();
    sd.slow_path    = !(sd.eig_condition <= eig_condition_limit) || !sd.c1.allFinite();
    return sd;
}

ShiftData build_shift(const MatrixPencil& pencil, Complex sigma, const Vector& f, int m,
                      bool keep_basis)
{
    const ShiftedOperator op(pencil, sigma);
    return build_shift(op, f, m, keep_basis);
}

Vector reduced_solve_fast(const ShiftData& sd, Complex z)
{
    require_eigendecomposition(sd);
    const Vector d = pole_factors(sd, z);
    return sd.beta * (sd.eig_vectors * sd.c1.cwiseQuotient(d));
}

Vector reduced_solve_direct(const ShiftData& sd, Complex z)
{
    DenseMatrix sys = (sd.sigma - z) * sd.H;
    sys.diagonal().array() += 1.0;
    Eigen::PartialPivLU<DenseMatrix> lu(sys);
    const double rc = lu.rcond();
    if (!(rc > direct_rcond_tol))
    {
        std::ostringstream msg;
        msg << "reduced system singular at z = " << z << " (rcond " << rc << ")";
        throw ReducedSystemSingular(msg.str());
    }
    Vector rhs = Vector::Zero(sd.m);
    rhs[0]     = sd.beta;
    return lu.solve(rhs);
}

Vector reduced_solve(const ShiftData& sd, Complex z)
{
    return sd.slow_path ? reduced_solve_direct(sd, z) : reduced_solve_fast(sd, z);
}

double residual_estimate(const ShiftData& sd, Complex z)
{
    const Complex shift = sd.sigma - z;
    if (shift == Complex(0.0, 0.0))
        return 0.0;
    if (sd.slow_path)
    {
        const Vector y = reduced_solve_direct(sd, z);
        return std::abs(shift) * sd.h_next * std::abs(y[sd.m - 1]) / sd.beta;
    }
    // e_m^T y / beta = r_m Lambda c_1, fused with the pole check.
    Complex em_y = 0.0;
    for (int i = 0; i < sd.m; ++i)
    {
        const Complex t = shift * sd.eig_values[i];
        const Complex d = 1.0 + t;
        if (on_pole(d, t))
        {
            std::ostringstream msg;
            msg << "reduced system singular at z = " << z << " (Ritz pole)";
            throw ReducedSystemSingular(msg.str());
        }
        em_y += sd.r_lambda[i] * sd.c1[i] / d;
    }
    return std::abs(shift) * sd.h_next * std::abs(em_y);
}

Vector lift(const ShiftData& sd, const Vector& y)
{
    if (!sd.basis)
        throw std::logic_error("lift: Krylov basis was not retained");
    if (y.size() != sd.m)
        throw DimensionError("lift: coefficient vector has the wrong size");
    return (*sd.basis) * y;
}

std::size_t KrylovTable::append(ShiftData sd)
{
    for (const auto& e : m_entries)
        if (e->sigma == sd.sigma)
            throw std::invalid_argument("KrylovTable: shift already present");
    m_entries.push_back(std::make_shared<const ShiftData>(std::move(sd)));
    return m_entries.size() - 1;
}

} // namespace simm
