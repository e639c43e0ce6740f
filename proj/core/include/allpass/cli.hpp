#ifndef ALLPASS_CLI_HPP
#define ALLPASS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "allpass/mirror.hpp"
#include "allpass/types.hpp"

namespace allpass::cli {

struct CliConfig {
  Tolerances tol;
  int grid = 512;
  std::uint64_t regime_cap = 1u << 16;
  MirrorMethod method = MirrorMethod::qr;
};

/// Runs one CLI invocation. Exit codes: 0 success, 1 domain error (JSON error
/// body on `err`), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace allpass::cli

#endif  // ALLPASS_CLI_HPP
