#ifndef SIMM_TYPES_HPP
#define SIMM_TYPES_HPP

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace simm
{

using Complex      = std::complex<double>;
using Vector       = Eigen::VectorXcd;
using DenseMatrix  = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;
using Index        = Eigen::Index;

/// Dense upgrade of a sparse matrix. Intended for small sizes (tests, oracles).
inline DenseMatrix to_dense(const SparseMatrix& s)
{
    return DenseMatrix(s);
}

} // namespace simm

#endif
