#ifndef SIMM_MATRIX_MARKET_HPP
#define SIMM_MATRIX_MARKET_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <simm/types.hpp>

namespace simm
{

///
/// Parse failure in a Matrix Market stream. line() is 1-based; 0 means the
/// problem is not tied to a particular line (e.g. the file could not be opened).
///
class MatrixMarketError : public std::runtime_error
{
public:
    MatrixMarketError(std::size_t line, const std::string& what);

    std::size_t line() const noexcept { return m_line; }

private:
    std::size_t m_line;
};

///
/// Reads `%%MatrixMarket matrix <coordinate|array> <real|integer|complex>
/// <general|symmetric|skew-symmetric|hermitian>`. Symmetric storage is expanded
/// to general, indices become 0-based and duplicate coordinates are summed.
/// The `pattern` field is rejected.
///
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix load_matrix_market(const std::filesystem::path& path);

/// Writes coordinate/complex/general with 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void save_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);

} // namespace simm

#endif
