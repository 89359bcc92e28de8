#include <simm_cli/manifest.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace simm::cli
{

namespace
{

using ojson = nlohmann::ordered_json;

std::string format_double(double v)
{
    if (!std::isfinite(v))
        return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void dump_value(const ojson& j, std::string& out, int depth)
{
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type())
    {
    case ojson::value_t::object:
    {
        if (j.empty())
        {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            if (!first)
                out += ",\n";
            first = false;
            out += pad;
            out += ojson(it.key()).dump();
            out += ": ";
            dump_value(it.value(), out, depth + 1);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case ojson::value_t::array:
    {
        if (j.empty())
        {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& v : j)
        {
            if (!first)
                out += ",\n";
            first = false;
            out += pad;
            dump_value(v, out, depth + 1);
        }
        out += "\n" + close_pad + "]";
        return;
    }
    case ojson::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

ojson complex_json(Complex z)
{
    return ojson{{"re", z.real()}, {"im", z.imag()}};
}

Complex complex_from(const nlohmann::json& j)
{
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

// Numbers written as null (non-finite) read back as NaN.
double number_from(const nlohmann::json& j)
{
    return j.is_null() ? std::nan("") : j.get<double>();
}

template <class T>
ojson optional_json(const std::optional<T>& v)
{
    return v ? ojson(*v) : ojson(nullptr);
}

template <class T>
std::optional<T> optional_from(const nlohmann::json& j)
{
    if (j.is_null())
        return std::nullopt;
    return j.get<T>();
}

} // namespace

ojson to_json(const RunManifest& m)
{
    const SearchConfig& c = m.config;
    ojson j;
    j["tool"]   = ojson{{"name", "simm"}, {"version", m.tool_version}};
    j["inputs"] = ojson{{"a", m.a_path}, {"b", optional_json(m.b_path)}};
    j["config"] = ojson{
        {"region",
         ojson{{"re_min", c.region.re_min},
               {"re_max", c.region.re_max},
               {"im_min", c.region.im_min},
               {"im_max", c.region.im_max}}},
        {"h0", c.h0},
        {"eps", c.eps},
        {"delta0", c.delta0},
        {"m", c.m},
        {"n0", c.n0},
        {"coarse_grid", c.coarse_grid},
        {"max_shifts", c.max_shifts},
        {"rng_seed", c.rng_seed},
        {"multiplicity_k", c.multiplicity_k},
        {"threads", c.threads},
    };
    j["status"]     = m.status;
    j["diagnostic"] = optional_json(m.diagnostic);

    ojson recs = ojson::array();
    for (const auto& r : m.records)
    {
        recs.push_back(ojson{{"value", complex_json(r.value)},
                             {"box_size", r.box_size},
                             {"shift", complex_json(r.shift)},
                             {"multiplicity", optional_json(r.multiplicity)},
                             {"warning", optional_json(r.warning)}});
    }
    j["records"] = std::move(recs);

    const SearchStats& s = m.stats;
    ojson stats{
        {"num_shifts", s.num_shifts},
        {"num_factorizations", s.num_factorizations},
        {"num_shift_retries", s.num_shift_retries},
        {"num_reduced_solves", s.num_reduced_solves},
        {"num_residual_checks", s.num_residual_checks},
        {"num_indicator_evals", s.num_indicator_evals},
        {"num_multiplicity_factorizations", s.num_multiplicity_factorizations},
        {"levels", s.levels},
        {"squares_per_level", s.squares_per_level},
        {"squares_visited", s.squares_visited()},
        {"records_outside_region", s.records_outside_region},
        {"unresolved_finest_squares", s.unresolved_finest_squares},
        {"coarse_side", s.coarse_side},
        {"finest_side", s.finest_side},
    };
    if (m.include_timing)
        stats["wall_seconds"] = s.wall_seconds;
    j["stats"]    = std::move(stats);
    j["warnings"] = m.warnings;
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j)
{
    RunManifest m;
    m.tool_version = j.at("tool").at("version").get<std::string>();
    m.a_path       = j.at("inputs").at("a").get<std::string>();
    m.b_path       = optional_from<std::string>(j.at("inputs").at("b"));

    const auto& c  = j.at("config");
    const auto& rg = c.at("region");
    m.config.region = Region{rg.at("re_min").get<double>(), rg.at("re_max").get<double>(),
                             rg.at("im_min").get<double>(), rg.at("im_max").get<double>()};
    m.config.h0             = c.at("h0").get<double>();
    m.config.eps            = c.at("eps").get<double>();
    m.config.delta0         = c.at("delta0").get<double>();
    m.config.m              = c.at("m").get<int>();
    m.config.n0             = c.at("n0").get<int>();
    m.config.coarse_grid    = c.at("coarse_grid").get<int>();
    m.config.max_shifts     = c.at("max_shifts").get<std::size_t>();
    m.config.rng_seed       = c.at("rng_seed").get<std::uint64_t>();
    m.config.multiplicity_k = c.at("multiplicity_k").get<int>();
    m.config.threads        = c.at("threads").get<int>();

    m.status     = j.at("status").get<std::string>();
    m.diagnostic = optional_from<std::string>(j.at("diagnostic"));

    for (const auto& r : j.at("records"))
    {
        EigenvalueRecord rec;
        rec.value        = complex_from(r.at("value"));
        rec.box_size     = number_from(r.at("box_size"));
        rec.shift        = complex_from(r.at("shift"));
        rec.multiplicity = optional_from<int>(r.at("multiplicity"));
        rec.warning      = optional_from<std::string>(r.at("warning"));
        m.records.push_back(std::move(rec));
    }

    const auto& s = j.at("stats");
    SearchStats& st = m.stats;
    st.num_shifts          = s.at("num_shifts").get<std::size_t>();
    st.num_factorizations  = s.at("num_factorizations").get<std::size_t>();
    st.num_shift_retries   = s.at("num_shift_retries").get<std::size_t>();
    st.num_reduced_solves  = s.at("num_reduced_solves").get<std::size_t>();
    st.num_residual_checks = s.at("num_residual_checks").get<std::size_t>();
    st.num_indicator_evals = s.at("num_indicator_evals").get<std::size_t>();
    st.num_multiplicity_factorizations =
        s.at("num_multiplicity_factorizations").get<std::size_t>();
    st.levels                    = s.at("levels").get<int>();
    st.squares_per_level         = s.at("squares_per_level").get<std::vector<std::size_t>>();
    st.records_outside_region    = s.at("records_outside_region").get<std::size_t>();
    st.unresolved_finest_squares = s.at("unresolved_finest_squares").get<std::size_t>();
    st.coarse_side               = s.at("coarse_side").get<double>();
    st.finest_side               = s.at("finest_side").get<double>();
    if (s.contains("wall_seconds"))
    {
        m.include_timing = true;
        st.wall_seconds  = s.at("wall_seconds").get<double>();
    }
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

std::string dump_json(const ojson& j)
{
    std::string out;
    dump_value(j, out, 0);
    out += "\n";
    return out;
}

void write_csv(std::ostream& os, const std::vector<EigenvalueRecord>& records)
{
    os << "re,im,box_size,multiplicity\n";
    for (const auto& r : records)
    {
        os << format_double(r.value.real()) << ',' << format_double(r.value.imag()) << ','
           << format_double(r.box_size) << ',';
        if (r.multiplicity)
            os << *r.multiplicity;
        os << '\n';
    }
}

void write_tree(std::ostream& os, const std::vector<MarkedSquare>& visited)
{
    for (const auto& sq : visited)
    {
        os << sq.level << ',' << format_double(sq.square.center.real()) << ','
           << format_double(sq.square.center.imag()) << ',' << format_double(sq.square.side)
           << ',' << to_string(sq.status) << '\n';
    }
}

} // namespace simm::cli
