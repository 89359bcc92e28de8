#include <simm/sparse.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace simm
{

namespace
{

using BaseLU = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

// The diagonal of U lives in the supernodes of the L store, which SparseLU
// keeps protected. Same traversal as SparseLU::absDeterminant().
class PivotAwareLU : public BaseLU
{
public:
    std::pair<double, double> pivot_range() const
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (Index j = 0; j < this->cols(); ++j)
        {
            double piv = 0.0;
            for (SCMatrix::InnerIterator it(this->m_Lstore, j); it; ++it)
            {
                if (it.index() == j)
                {
                    piv = std::abs(it.value());
                    break;
                }
            }
            lo = std::min(lo, piv);
            hi = std::max(hi, piv);
        }
        return {lo, hi};
    }
};

} // namespace

struct Factorization::Impl
{
    PivotAwareLU lu;
};

MatrixPencil::MatrixPencil(SparseMatrix a, std::optional<SparseMatrix> b)
    : m_a(std::move(a)), m_b(std::move(b))
{
    if (m_a.rows() != m_a.cols())
        throw DimensionError("pencil: A must be square");
    if (m_b && (m_b->rows() != m_b->cols() || m_b->rows() != m_a.rows()))
        throw DimensionError("pencil: B must be square with the size of A");
    m_a.makeCompressed();
    if (m_b)
        m_b->makeCompressed();
}

Vector MatrixPencil::apply_b(const Vector& v) const
{
    if (!m_b)
    {
        if (v.size() != size())
            throw DimensionError("pencil: vector size mismatch");
        return v;
    }
    return spmv(*m_b, v);
}

SparseMatrix shifted_matrix(const MatrixPencil& pencil, Complex sigma)
{
    SparseMatrix out;
    if (pencil.b())
    {
        out = pencil.a() - sigma * (*pencil.b());
    }
    else
    {
        SparseMatrix eye(pencil.size(), pencil.size());
        eye.setIdentity();
        out = pencil.a() - sigma * eye;
    }
    out.makeCompressed();
    return out;
}

Vector spmv(const SparseMatrix& s, const Vector& v)
{
    if (s.cols() != v.size())
    {
        std::ostringstream msg;
        msg << "spmv: matrix has " << s.cols() << " columns, vector has " << v.size();
        throw DimensionError(msg.str());
    }
    return s * v;
}

Factorization Factorization::factorize(const SparseMatrix& s)
{
    if (s.rows() != s.cols())
        throw DimensionError("factorize: matrix is not square");

    auto impl = std::make_shared<Impl>();
    SparseMatrix work = s;
    work.makeCompressed();
    impl->lu.analyzePattern(work);
    impl->lu.factorize(work);
    if (impl->lu.info() != Eigen::Success)
        throw SingularMatrixError("factorize: " + impl->lu.lastErrorMessage());

    const auto [lo, hi] = impl->lu.pivot_range();
    if (!(lo >= singular_pivot_threshold) || !(lo >= near_singular_pivot_ratio * hi) ||
        !std::isfinite(hi))
    {
        std::ostringstream msg;
        msg << "factorize: pivot of magnitude " << lo << " against largest " << hi
            << " (matrix is numerically singular)";
        throw SingularMatrixError(msg.str());
    }

    Factorization f;
    f.m_impl      = std::move(impl);
    f.m_size      = s.rows();
    f.m_min_pivot = lo;
    f.m_max_pivot = hi;
    return f;
}

Vector Factorization::solve(const Vector& rhs) const
{
    if (!m_impl)
        throw std::logic_error("solve: empty factorization");
    if (rhs.size() != m_size)
    {
        std::ostringstream msg;
        msg << "solve: factorization has size " << m_size << ", rhs has " << rhs.size();
        throw DimensionError(msg.str());
    }
    Vector x = m_impl->lu.solve(rhs);
    return x;
}

} // namespace simm
