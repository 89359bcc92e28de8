#include <simm/search.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/SVD>

namespace simm
{

namespace
{

constexpr int default_coarse_grid = 4;
constexpr int max_shift_retries   = 3;
constexpr double multiplicity_rel_tol = 1e-6;

std::string format_complex(Complex z)
{
    std::ostringstream os;
    os.precision(10);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

// Runs fn(i) for i in [0, count), on `threads` workers when threads > 0.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn)
{
    if (threads <= 0 || count < 2)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    if (!failed.exchange(true))
                        error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x5eedu};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct Pending
{
    Square square;
    std::optional<std::size_t> parent;
};

} // namespace

void SearchConfig::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument("search config: " + what); };
    if (!(region.re_max > region.re_min) || !(region.im_max > region.im_min))
        fail("region must have positive width and height");
    if (!(h0 > 0.0))
        fail("h0 must be positive");
    if (!(eps > 0.0))
        fail("eps must be positive");
    if (!(delta0 > 0.0 && delta0 < 1.0))
        fail("delta0 must lie in (0, 1)");
    if (m < 2)
        fail("m must be >= 2");
    if (n0 < 2)
        fail("n0 must be >= 2");
    if (coarse_grid < 0)
        fail("coarse grid must be >= 0");
    if (max_shifts < 1)
        fail("max_shifts must be >= 1");
    if (multiplicity_k < 0)
        fail("multiplicity k must be >= 0");
    if (threads < 0)
        fail("threads must be >= 0");
}

const char* to_string(SquareStatus s) noexcept
{
    switch (s)
    {
    case SquareStatus::contains_eigenvalue:
        return "contains-eigenvalue";
    case SquareStatus::unresolvable:
        return "unresolvable";
    case SquareStatus::discarded:
        return "discarded";
    }
    return "unknown";
}

std::size_t SearchStats::squares_visited() const noexcept
{
    return std::accumulate(squares_per_level.begin(), squares_per_level.end(), std::size_t{0});
}

Vector random_vector(Index n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Vector v(n);
    for (Index i = 0; i < n; ++i)
    {
        const double re = normal(gen);
        const double im = normal(gen);
        v[i]            = Complex(re, im);
    }
    return v;
}

double coarse_side(const SearchConfig& config)
{
    const int grid = config.coarse_grid > 0 ? config.coarse_grid : default_coarse_grid;
    const double width  = config.region.re_max - config.region.re_min;
    const double height = config.region.im_max - config.region.im_min;
    return std::max(width, height) / grid;
}

int level_count(double coarse, double h0)
{
    // Halving is exact in binary, so this is ceil(log2(coarse / h0)) without
    // log2 rounding at exact powers of two.
    int k    = 0;
    double s = coarse;
    while (s > h0)
    {
        s /= 2.0;
        ++k;
    }
    return k;
}

// ---------------------------------------------------------------------------
// ShiftPool

ShiftPool::ShiftPool(const MatrixPencil& pencil, const Vector& f, const SearchConfig& config,
                     SearchStats& stats)
    : m_pencil(pencil), m_f(f), m_config(config), m_stats(stats)
{
}

std::optional<std::size_t> ShiftPool::create(Complex sigma, double side)
{
    const Complex step = Complex(1.0, 1.0) * (1e-3 * side);
    for (int attempt = 0; attempt <= max_shift_retries; ++attempt)
    {
        for (std::size_t s = 0; s < m_table.size(); ++s)
            if (m_table[s].sigma == sigma)
                return s;
        if (m_table.size() >= m_config.max_shifts)
        {
            std::ostringstream msg;
            msg << "shift limit of " << m_config.max_shifts << " reached while placing a shift at "
                << format_complex(sigma);
            throw ShiftLimitExceeded(msg.str());
        }
        ++m_stats.num_factorizations;
        try
        {
            const ShiftedOperator op(m_pencil, sigma);
            ShiftData sd = build_shift(op, m_f, m_config.m, /*keep_basis=*/false);
            const std::size_t idx = m_table.append(std::move(sd));
            ++m_stats.num_shifts;
            return idx;
        }
        catch (const SingularMatrixError&)
        {
            ++m_stats.num_shift_retries;
            sigma += step;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> ShiftPool::shift_for_square(const Square& square, std::size_t first)
{
    for (std::size_t s = first; s < m_table.size(); ++s)
    {
        const ResolveCheck rc = check_resolvable(square, m_table[s], m_config.eps, m_config.n0);
        m_stats.num_residual_checks += rc.residual_checks;
        if (rc.resolvable)
            return s;
    }
    return create(square.center, square.side);
}

// ---------------------------------------------------------------------------
// merging

std::vector<EigenvalueRecord> merge_marked(std::span<const MarkedSquare> finest,
                                           std::span<const Complex> shifts)
{
    std::vector<EigenvalueRecord> out;
    if (finest.empty())
        return out;

    const double side = finest.front().square.side;
    const Complex ref  = finest.front().square.center;
    using Key          = std::pair<long long, long long>;
    std::vector<Key> keys(finest.size());
    std::map<Key, std::size_t> where;
    for (std::size_t i = 0; i < finest.size(); ++i)
    {
        const Complex d = (finest[i].square.center - ref) / side;
        keys[i]         = {std::llround(d.real()), std::llround(d.imag())};
        where.emplace(keys[i], i);
    }

    std::vector<std::size_t> parent(finest.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
        {
            parent[x] = parent[parent[x]];
            x         = parent[x];
        }
        return x;
    };
    for (std::size_t i = 0; i < finest.size(); ++i)
    {
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy)
            {
                if (dx == 0 && dy == 0)
                    continue;
                const auto it = where.find({keys[i].first + dx, keys[i].second + dy});
                if (it == where.end())
                    continue;
                const std::size_t a = find(i), b = find(it->second);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }
    }

    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < finest.size(); ++i)
        components[find(i)].push_back(i);

    for (const auto& [root, members] : components)
    {
        Complex sum = 0.0;
        long long xmin = keys[members.front()].first, xmax = xmin;
        long long ymin = keys[members.front()].second, ymax = ymin;
        bool forced = false;
        for (const std::size_t i : members)
        {
            sum += finest[i].square.center;
            xmin   = std::min(xmin, keys[i].first);
            xmax   = std::max(xmax, keys[i].first);
            ymin   = std::min(ymin, keys[i].second);
            ymax   = std::max(ymax, keys[i].second);
            forced = forced || finest[i].forced;
        }
        EigenvalueRecord rec;
        rec.value = sum / static_cast<double>(members.size());
        const long long span_x = xmax - xmin + 1;
        const long long span_y = ymax - ymin + 1;
        rec.box_size = static_cast<double>(std::max(span_x, span_y)) * side;

        // Resolving shift: that of the member nearest to the centroid.
        std::optional<std::size_t> best;
        double best_dist = 0.0;
        for (const std::size_t i : members)
        {
            if (!finest[i].shift)
                continue;
            const double d = std::abs(finest[i].square.center - rec.value);
            if (!best || d < best_dist)
            {
                best      = i;
                best_dist = d;
            }
        }
        if (best && *finest[*best].shift < shifts.size())
            rec.shift = shifts[*finest[*best].shift];
        else if (!shifts.empty())
            rec.shift = shifts.front();

        std::vector<std::string> notes;
        if (span_x > 2 || span_y > 2)
        {
            std::ostringstream os;
            os << "cluster larger than precision (" << span_x << " x " << span_y
               << " finest squares)";
            notes.push_back(os.str());
        }
        if (forced)
            notes.push_back("contains squares that no shift could resolve");
        if (!notes.empty())
        {
            std::string joined = notes.front();
            for (std::size_t i = 1; i < notes.size(); ++i)
                joined += "; " + notes[i];
            rec.warning = joined;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// multiplicity

int multiplicity(const EigenvalueRecord& record, const MatrixPencil& pencil,
                 const SearchConfig& config, double finest_side,
                 std::optional<std::string>* warning, std::size_t* factorizations)
{
    const int k = config.multiplicity_k;
    if (k < 1)
        throw std::invalid_argument("multiplicity: k must be >= 1");

    const ShiftedOperator op(pencil, record.shift);
    if (factorizations)
        ++*factorizations;

    const Square square{record.value, std::max(record.box_size, finest_side)};
    DenseMatrix projected(pencil.size(), k);
    bool all_resolved = true;
    for (int i = 0; i < k; ++i)
    {
        const Vector fi =
            random_vector(pencil.size(), derived_seed(config.rng_seed, static_cast<std::uint64_t>(i + 1)));
        const ShiftData sd = build_shift(op, fi, config.m, /*keep_basis=*/true);
        all_resolved = all_resolved && is_resolvable(square, sd, config.eps, config.n0);
        projected.col(i) = projection_vector(square, sd, 2 * config.n0);
    }

    const Eigen::JacobiSVD<DenseMatrix> svd(projected);
    const auto& sv = svd.singularValues();
    int count      = 0;
    if (sv.size() > 0 && sv[0] > 0.0)
        for (Index i = 0; i < sv.size(); ++i)
            if (sv[i] > multiplicity_rel_tol * sv[0])
                ++count;
    count = std::min(count, k);

    if (warning)
    {
        std::vector<std::string> notes;
        if (count == k)
            notes.push_back("multiplicity may be undercounted (increase k above " +
                            std::to_string(k) + ")");
        if (!all_resolved)
            notes.push_back("multiplicity projections exceed the residual tolerance");
        for (const auto& n : notes)
            *warning = warning->has_value() ? **warning + "; " + n : n;
    }
    return count;
}

// ---------------------------------------------------------------------------
// driver

SearchResult sim_m(const MatrixPencil& pencil, const SearchConfig& config)
{
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    SearchResult res;
    SearchStats& stats = res.stats;
    const Region& region = config.region;

    const Vector f       = random_vector(pencil.size(), config.rng_seed);
    const double coarse  = coarse_side(config);
    const int levels     = level_count(coarse, config.h0);
    stats.levels         = levels;
    stats.coarse_side    = coarse;
    stats.finest_side    = std::ldexp(coarse, -levels);
    const double local_shift_side = coarse / 4.0;

    ShiftPool pool(pencil, f, config, stats);
    const KrylovTable& table = pool.table();
    const IndicatorConfig icfg{config.eps, config.n0};

    std::vector<MarkedSquare> finest;
    try
    {
        // Step 1: a shift at the region center.
        if (!pool.create(region.center(), coarse))
            res.warnings.push_back("could not place the initial shift (singular at every retry)");

        // Step 2: coarse tiling anchored at the lower-left corner.
        const double width  = region.re_max - region.re_min;
        const double height = region.im_max - region.im_min;
        const auto nx = std::max<long long>(1, std::llround(std::ceil(width / coarse - 1e-9)));
        const auto ny = std::max<long long>(1, std::llround(std::ceil(height / coarse - 1e-9)));
        std::vector<Pending> current;
        for (long long iy = 0; iy < ny; ++iy)
            for (long long ix = 0; ix < nx; ++ix)
                current.push_back({Square{Complex(region.re_min + (ix + 0.5) * coarse,
                                                  region.im_min + (iy + 0.5) * coarse),
                                          coarse},
                                   std::nullopt});

        // Step 3: every coarse square gets an existing or a new shift.
        for (const auto& p : current)
            pool.shift_for_square(p.square);

        // Steps 4-5: levels 0..K.
        for (int level = 0; level <= levels && !current.empty(); ++level)
        {
            stats.squares_per_level.push_back(current.size());
            const std::size_t snapshot = table.size();

            std::vector<IndicatorValue> evals(current.size());
            parallel_for(current.size(), config.threads, [&](std::size_t i) {
                evals[i] = indicator(current[i].square, table, icfg, snapshot);
            });

            std::vector<Pending> next;
            for (std::size_t i = 0; i < current.size(); ++i)
            {
                const Square& sq  = current[i].square;
                IndicatorValue ev = evals[i];
                stats.num_residual_checks += ev.residual_checks;

                // Shifts created earlier in this level come after the snapshot
                // in creation order, so checking them now keeps first-match
                // semantics identical to a purely sequential sweep.
                if (!ev.resolvable && table.size() > snapshot)
                {
                    ev = indicator(sq, table, icfg, std::nullopt, snapshot);
                    stats.num_residual_checks += ev.residual_checks;
                }
                std::optional<std::size_t> attempted;
                const bool small = sq.side < local_shift_side;
                if (!ev.resolvable && (small || level == levels))
                {
                    attempted = pool.create(sq.center, sq.side);
                    if (attempted)
                    {
                        ev = indicator(sq, table, icfg, std::nullopt, *attempted);
                        stats.num_residual_checks += ev.residual_checks;
                    }
                }

                MarkedSquare ms;
                ms.square = sq;
                ms.level  = level;
                ms.parent = current[i].parent;
                if (ev.resolvable)
                {
                    ++stats.num_indicator_evals;
                    stats.num_reduced_solves += ev.reduced_solves;
                    ms.shift     = ev.shift_used;
                    ms.indicator = ev.value;
                    ms.status    = ev.value > config.delta0 ? SquareStatus::contains_eigenvalue
                                                            : SquareStatus::discarded;
                }
                else if (level < levels)
                {
                    ms.shift  = attempted;
                    ms.status = SquareStatus::unresolvable;
                }
                else
                {
                    // Too small to split further: keep it, flagged.
                    ms.shift  = attempted ? attempted : std::optional<std::size_t>{};
                    ms.status = SquareStatus::contains_eigenvalue;
                    ms.forced = true;
                    ++stats.unresolved_finest_squares;
                    res.warnings.push_back("unresolvable square at the finest level, center " +
                                           format_complex(sq.center));
                }

                const std::size_t vidx = res.visited.size();
                res.visited.push_back(ms);
                if (ms.status == SquareStatus::discarded)
                    continue;
                if (level < levels)
                {
                    for (const Square& child : sq.children())
                        next.push_back({child, vidx});
                }
                else
                {
                    finest.push_back(ms);
                }
            }
            current = std::move(next);
        }
    }
    catch (const ShiftLimitExceeded& e)
    {
        res.aborted    = true;
        res.diagnostic = e.what();
        res.warnings.push_back(std::string("search aborted: ") + e.what());
    }

    for (std::size_t s = 0; s < table.size(); ++s)
        res.shifts.push_back(table[s].sigma);

    // Steps 6-7: merge, filter, optional multiplicities, sort.
    std::vector<EigenvalueRecord> merged = merge_marked(finest, res.shifts);
    for (auto& rec : merged)
    {
        if (!region.contains(rec.value))
        {
            ++stats.records_outside_region;
            continue;
        }
        res.records.push_back(std::move(rec));
    }

    if (config.multiplicity_k > 0)
    {
        for (auto& rec : res.records)
        {
            try
            {
                rec.multiplicity = multiplicity(rec, pencil, config, stats.finest_side, &rec.warning,
                                                &stats.num_multiplicity_factorizations);
            }
            catch (const SingularMatrixError& e)
            {
                rec.warning = rec.warning ? *rec.warning + "; " + e.what() : std::string(e.what());
            }
        }
    }

    std::sort(res.records.begin(), res.records.end(),
              [](const EigenvalueRecord& a, const EigenvalueRecord& b) {
                  if (a.value.real() != b.value.real())
                      return a.value.real() < b.value.real();
                  return a.value.imag() < b.value.imag();
              });
    for (const auto& rec : res.records)
        if (rec.warning)
            res.warnings.push_back("eigenvalue near " + format_complex(rec.value) + ": " +
                                   *rec.warning);

    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace simm
