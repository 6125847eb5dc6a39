#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace embedlab::cli {

enum class Format { Json, Csv, Human };

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;

struct CommandRequest {
  std::string subcommand;
  std::map<std::string, std::string> flags;  // only flags given on the command line
  Format format = Format::Json;
  int max_level = 20;
};

struct RunReport {
  std::string subcommand;
  nlohmann::json inputs;   // echo of the request flags
  nlohmann::json results;  // payload for json/human output
  std::string csv;         // payload for csv output, when the command has one
  std::string error;
  double wall_ms = 0.0;
  int exit_code = kExitOk;
};

RunReport dispatch(const CommandRequest& request);

// Writes the report payload to `out` (errors go to `err`).
void emit(const RunReport& report, Format format, std::ostream& out, std::ostream& err);

// Full command line: parse, dispatch, emit. Returns the process exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace embedlab::cli
