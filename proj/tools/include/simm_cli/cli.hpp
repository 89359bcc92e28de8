#ifndef SIMM_CLI_CLI_HPP
#define SIMM_CLI_CLI_HPP

#include <iosfwd>

namespace simm::cli
{

inline constexpr int exit_ok       = 0;
inline constexpr int exit_error    = 1;
inline constexpr int exit_warnings = 2;  ///< unresolvable squares at the finest level
inline constexpr int exit_usage    = 64; ///< EX_USAGE from sysexits.h

///
/// Entry point of the `simm` tool. The manifest goes to `out` unless --out is
/// given; diagnostics go to `err`.
///
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace simm::cli

#endif
