#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dbound::cli {

inline constexpr int kExitCertified = 2;

/// Runs one subcommand; args excludes the program name. Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dbound::cli
