#ifndef SIMM_CLI_MANIFEST_HPP
#define SIMM_CLI_MANIFEST_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <simm/search.hpp>

#include "json.hpp"

namespace simm::cli
{

/// Everything a run produced, in the order it is written out.
struct RunManifest
{
    std::string tool_version;
    std::string a_path;
    std::optional<std::string> b_path;
    SearchConfig config;
    std::string status = "ok"; ///< ok | warnings | aborted
    std::optional<std::string> diagnostic;
    std::vector<EigenvalueRecord> records;
    SearchStats stats;
    /// wall_seconds is only written when set; it breaks byte-for-byte
    /// reproducibility.
    bool include_timing = false;
    std::vector<std::string> warnings;
};

nlohmann::ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

///
/// Pretty-prints with two-space indentation. Finite doubles use 17
/// significant digits, non-finite ones become null.
///
std::string dump_json(const nlohmann::ordered_json& j);

/// `re,im,box_size,multiplicity` rows, header first.
void write_csv(std::ostream& os, const std::vector<EigenvalueRecord>& records);

/// `level,center_re,center_im,side,status` for every visited square.
void write_tree(std::ostream& os, const std::vector<MarkedSquare>& visited);

} // namespace simm::cli

#endif
