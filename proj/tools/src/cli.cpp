#include <simm_cli/cli.hpp>
#include <simm_cli/manifest.hpp>

#include <fstream>
#include <sstream>
#include <ostream>
#include <string>
#include <vector>

#include <simm/matrix_market.hpp>
#include <simm/search.hpp>

#include "CLI11.hpp"

#ifndef SIMM_VERSION
#define SIMM_VERSION "unknown"
#endif

namespace simm::cli
{

namespace
{

bool write_file(const std::string& path, const std::string& text, std::ostream& err)
{
    std::ofstream os(path, std::ios::binary);
    if (os)
        os << text;
    if (!os)
    {
        err << "simm: cannot write " << path << "\n";
        return false;
    }
    return true;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Locate all eigenvalues of A x = lambda B x inside a rectangle.", "simm"};
    app.set_version_flag("--version", SIMM_VERSION);

    SearchConfig cfg;
    std::string a_path;
    std::string b_path;
    std::vector<double> region;
    std::string out_path;
    std::string csv_path;
    std::string tree_path;
    bool timing = false;

    app.add_option("--a", a_path, "Matrix Market file for A")->required();
    app.add_option("--b", b_path, "Matrix Market file for B (default: identity)");
    app.add_option("--region", region, "RE_MIN RE_MAX IM_MIN IM_MAX")->required()->expected(4);
    app.add_option("--h0", cfg.h0, "Target precision")->capture_default_str();
    app.add_option("--eps", cfg.eps, "Residual tolerance for shift reuse")->capture_default_str();
    app.add_option("--delta0", cfg.delta0, "Indicator threshold")->capture_default_str();
    app.add_option("--m", cfg.m, "Krylov dimension")->capture_default_str();
    app.add_option("--n0", cfg.n0, "Quadrature points of the coarse rule")->capture_default_str();
    app.add_option("--coarse", cfg.coarse_grid,
                   "Coarse squares along the longer side (0: default)")
        ->capture_default_str();
    app.add_option("--max-shifts", cfg.max_shifts, "Abort after this many shifts")
        ->capture_default_str();
    app.add_option("--seed", cfg.rng_seed, "Seed of the random vector f")->capture_default_str();
    app.add_option("--multiplicity", cfg.multiplicity_k,
                   "Estimate multiplicities with K random vectors (0: off)")
        ->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads (0: serial, deterministic)")
        ->capture_default_str();
    app.add_option("--out", out_path, "Write the JSON manifest here instead of stdout");
    app.add_option("--csv", csv_path, "Write re,im,box_size,multiplicity rows");
    app.add_option("--dump-tree", tree_path, "Write every visited square");
    app.add_flag("--timing", timing, "Include wall time in the manifest");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    cfg.region = Region{region[0], region[1], region[2], region[3]};
    try
    {
        cfg.validate();
    }
    catch (const std::invalid_argument& e)
    {
        err << "simm: " << e.what() << "\n";
        return exit_usage;
    }

    RunManifest manifest;
    manifest.tool_version   = SIMM_VERSION;
    manifest.a_path         = a_path;
    manifest.config         = cfg;
    manifest.include_timing = timing;
    if (!b_path.empty())
        manifest.b_path = b_path;

    SearchResult result;
    try
    {
        SparseMatrix a = load_matrix_market(a_path);
        std::optional<SparseMatrix> b;
        if (!b_path.empty())
            b = load_matrix_market(b_path);
        const MatrixPencil pencil(std::move(a), std::move(b));
        result = sim_m(pencil, cfg);
    }
    catch (const std::exception& e)
    {
        err << "simm: " << e.what() << "\n";
        return exit_error;
    }

    manifest.records  = result.records;
    manifest.stats    = result.stats;
    manifest.warnings = result.warnings;
    if (result.aborted)
    {
        manifest.status     = "aborted";
        manifest.diagnostic = result.diagnostic;
    }
    else if (result.stats.unresolved_finest_squares > 0)
        manifest.status = "warnings";

    const std::string json = dump_json(to_json(manifest));
    if (out_path.empty())
        out << json;
    else if (!write_file(out_path, json, err))
        return exit_error;

    if (!csv_path.empty())
    {
        std::ostringstream os;
        write_csv(os, result.records);
        if (!write_file(csv_path, os.str(), err))
            return exit_error;
    }
    if (!tree_path.empty())
    {
        std::ostringstream os;
        write_tree(os, result.visited);
        if (!write_file(tree_path, os.str(), err))
            return exit_error;
    }

    for (const auto& w : result.warnings)
        err << "simm: warning: " << w << "\n";
    if (result.aborted)
    {
        err << "simm: " << result.diagnostic << "\n";
        return exit_error;
    }
    return manifest.status == "warnings" ? exit_warnings : exit_ok;
}

} // namespace simm::cli
