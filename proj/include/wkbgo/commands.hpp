#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace wkbgo {

enum ExitCode : int { kExitOk = 0, kExitAssertion = 1, kExitUsage = 2, kExitRuntime = 3 };

struct CommandOptions {
  std::filesystem::path scenario;
  std::filesystem::path out = ".";
  std::optional<double> assert_order;
  std::optional<int> jobs;
  std::optional<std::string> oracle;
  bool seedless = false;  // every computation is deterministic; accepted and ignored
};

/// Dispatches closure | profiles | converge | instability | smalldiv. Reports go
/// to options.out; a short summary goes to `out`, diagnostics to `err`.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

}  // namespace wkbgo
