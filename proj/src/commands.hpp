#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace hwave::cli {

struct Request {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

/// Exit codes: 0 success, 2 configuration, 3 numeric failure, 4 certificate
/// violation.
int run_command(const Request& req, std::ostream& out, std::ostream& err);

}  // namespace hwave::cli
