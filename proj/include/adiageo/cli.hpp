#pragma once

#include <map>
#include <string>

#include "json.hpp"

namespace adiageo::cli {

// A validated run configuration. Parsing rejects unknown keys, fills
// defaults, and round-trips losslessly through to_json().
class RunConfig {
  public:
    static RunConfig parse(const nlohmann::json& doc);

    const std::string& command() const { return command_; }
    const nlohmann::json& doc() const { return doc_; }
    nlohmann::json to_json() const { return doc_; }

  private:
    std::string command_;
    nlohmann::json doc_;
};

struct CommandResult {
    // file name (relative to the output directory) -> contents
    std::map<std::string, std::string> files;
    nlohmann::json summary;
    bool converged = true;
};

// Dispatch on config["command"]: metric | geodesic | propagate | fit | models.
CommandResult run_command(const RunConfig& config);

// Writes result files under out_dir (created if needed).
void write_outputs(const CommandResult& result, const std::string& out_dir);

}  // namespace adiageo::cli
