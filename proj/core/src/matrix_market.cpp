#include <simm/matrix_market.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace simm
{

namespace
{

enum class Format
{
    coordinate,
    array
};
enum class Field
{
    real,
    integer,
    complex
};
enum class Symmetry
{
    general,
    symmetric,
    skew,
    hermitian
};

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size())
    {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool blank(std::string_view line)
{
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

class Reader
{
public:
    explicit Reader(std::istream& in) : m_in(in) {}

    // Next line that is neither blank nor a comment. False at EOF.
    bool next_data_line(std::string& line)
    {
        while (std::getline(m_in, line))
        {
            ++m_line;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (blank(line) || line.front() == '%')
                continue;
            return true;
        }
        return false;
    }

    bool raw_line(std::string& line)
    {
        if (!std::getline(m_in, line))
            return false;
        ++m_line;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return true;
    }

    std::size_t line_number() const noexcept { return m_line; }

    [[noreturn]] void fail(const std::string& what) const { throw MatrixMarketError(m_line, what); }

    double to_double(std::string_view tok) const
    {
        double v   = 0.0;
        auto first = tok.data();
        if (!tok.empty() && tok.front() == '+')
            ++first;
        auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            fail("malformed number '" + std::string(tok) + "'");
        if (!std::isfinite(v))
            fail("non-finite value '" + std::string(tok) + "'");
        return v;
    }

    long long to_index(std::string_view tok) const
    {
        long long v    = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            fail("malformed integer '" + std::string(tok) + "'");
        return v;
    }

private:
    std::istream& m_in;
    std::size_t m_line = 0;
};

using Triplet = Eigen::Triplet<Complex, int>;

void push_entry(std::vector<Triplet>& trips, Symmetry sym, int i, int j, Complex v)
{
    trips.emplace_back(i, j, v);
    if (i == j)
        return;
    switch (sym)
    {
    case Symmetry::general:
        break;
    case Symmetry::symmetric:
        trips.emplace_back(j, i, v);
        break;
    case Symmetry::skew:
        trips.emplace_back(j, i, -v);
        break;
    case Symmetry::hermitian:
        trips.emplace_back(j, i, std::conj(v));
        break;
    }
}

} // namespace

MatrixMarketError::MatrixMarketError(std::size_t line, const std::string& what)
    : std::runtime_error(line ? "matrix market line " + std::to_string(line) + ": " + what
                              : "matrix market: " + what),
      m_line(line)
{
}

SparseMatrix read_matrix_market(std::istream& in)
{
    Reader rd(in);
    std::string line;
    if (!rd.raw_line(line))
        throw MatrixMarketError(1, "empty input, expected %%MatrixMarket banner");

    const auto banner = split(line);
    if (banner.size() != 5 || lower(std::string(banner[0])) != "%%matrixmarket")
        rd.fail("malformed header, expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
    if (lower(std::string(banner[1])) != "matrix")
        rd.fail("unsupported object '" + std::string(banner[1]) + "'");

    Format format{};
    const auto fmt = lower(std::string(banner[2]));
    if (fmt == "coordinate")
        format = Format::coordinate;
    else if (fmt == "array")
        format = Format::array;
    else
        rd.fail("unknown format '" + fmt + "'");

    Field field{};
    const auto fld = lower(std::string(banner[3]));
    if (fld == "real" || fld == "double")
        field = Field::real;
    else if (fld == "integer")
        field = Field::integer;
    else if (fld == "complex")
        field = Field::complex;
    else if (fld == "pattern")
        rd.fail("pattern matrices are not supported (no numerical values)");
    else
        rd.fail("unknown field '" + fld + "'");

    Symmetry sym{};
    const auto sy = lower(std::string(banner[4]));
    if (sy == "general")
        sym = Symmetry::general;
    else if (sy == "symmetric")
        sym = Symmetry::symmetric;
    else if (sy == "skew-symmetric")
        sym = Symmetry::skew;
    else if (sy == "hermitian")
        sym = Symmetry::hermitian;
    else
        rd.fail("unknown symmetry '" + sy + "'");

    if (!rd.next_data_line(line))
        rd.fail("missing size line");
    const auto size_tok = split(line);
    const std::size_t want = format == Format::coordinate ? 3 : 2;
    if (size_tok.size() != want)
        rd.fail("malformed size line");
    const long long nrows = rd.to_index(size_tok[0]);
    const long long ncols = rd.to_index(size_tok[1]);
    if (nrows < 0 || ncols < 0 || nrows > std::numeric_limits<int>::max() ||
        ncols > std::numeric_limits<int>::max())
        rd.fail("matrix dimensions out of range");
    if (sym != Symmetry::general && nrows != ncols)
        rd.fail("symmetric storage requires a square matrix");

    const std::size_t values_per_entry = field == Field::complex ? 2 : 1;
    auto read_value = [&](const std::vector<std::string_view>& tok, std::size_t at) {
        const double re = rd.to_double(tok[at]);
        const double im = field == Field::complex ? rd.to_double(tok[at + 1]) : 0.0;
        return Complex(re, im);
    };

    std::vector<Triplet> trips;
    if (format == Format::coordinate)
    {
        const long long nnz = rd.to_index(size_tok[2]);
        if (nnz < 0)
            rd.fail("negative entry count");
        trips.reserve(static_cast<std::size_t>(nnz) * (sym == Symmetry::general ? 1 : 2));
        for (long long k = 0; k < nnz; ++k)
        {
            if (!rd.next_data_line(line))
                rd.fail("unexpected end of file: expected " + std::to_string(nnz) +
                        " entries, got " + std::to_string(k));
            const auto tok = split(line);
            if (tok.size() != 2 + values_per_entry)
                rd.fail("expected " + std::to_string(2 + values_per_entry) + " fields per entry");
            const long long i = rd.to_index(tok[0]);
            const long long j = rd.to_index(tok[1]);
            if (i < 1 || i > nrows || j < 1 || j > ncols)
                rd.fail("index (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") out of bounds");
            if (sym != Symmetry::general && i < j)
                rd.fail("entry above the diagonal in symmetric storage");
            if (sym == Symmetry::skew && i == j)
                rd.fail("diagonal entry in skew-symmetric storage");
            push_entry(trips, sym, static_cast<int>(i - 1), static_cast<int>(j - 1),
                       read_value(tok, 2));
        }
    }
    else
    {
        for (long long j = 0; j < ncols; ++j)
        {
            long long i0 = 0;
            if (sym == Symmetry::symmetric || sym == Symmetry::hermitian)
                i0 = j;
            else if (sym == Symmetry::skew)
                i0 = j + 1;
            for (long long i = i0; i < nrows; ++i)
            {
                if (!rd.next_data_line(line))
                    rd.fail("unexpected end of file in array data");
                const auto tok = split(line);
                if (tok.size() != values_per_entry)
                    rd.fail("expected " + std::to_string(values_per_entry) + " fields per value");
                const Complex v = read_value(tok, 0);
                // Array storage is dense; zeros carry no structure.
                if (v != Complex(0.0, 0.0))
                    push_entry(trips, sym, static_cast<int>(i), static_cast<int>(j), v);
            }
        }
    }

    while (rd.next_data_line(line))
        rd.fail("trailing data after the declared entries");

    SparseMatrix m(static_cast<Index>(nrows), static_cast<Index>(ncols));
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

SparseMatrix load_matrix_market(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw MatrixMarketError(0, "cannot open '" + path.string() + "'");
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m)
{
    const auto old_flags = out.flags();
    const auto old_prec  = out.precision();
    out << "%%MatrixMarket matrix coordinate complex general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    out << std::setprecision(17);
    for (Index j = 0; j < m.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(m, j); it; ++it)
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
                << it.value().imag() << '\n';
    out.flags(old_flags);
    out.precision(old_prec);
}

void save_matrix_market(const std::filesystem::path& path, const SparseMatrix& m)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    write_matrix_market(out, m);
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

} // namespace simm
