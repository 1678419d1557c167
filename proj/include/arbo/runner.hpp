#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arbo/io.hpp"
#include "arbo/params.hpp"
#include "arbo/sensitivity.hpp"
#include "arbo/simulate.hpp"

namespace arbo {

constexpr const char* kToolVersion = "1.0.0";

// Everything a subcommand needs; a manifest records exactly this.
struct Request {
    std::string command;  // thresholds, equilibria, bifurcation, simulate, strategy,
                          // sensitivity-local, sensitivity-global, selfcheck
    ModelParams params;
    ModelVariant variant;
    PulseSchedule schedule;
    std::vector<std::string> defaulted;
    std::vector<std::pair<std::string, std::string>> flags;  // name -> value, in order
    std::vector<ParamRange> ranges;                          // global sensitivity; empty = defaults

    void set_flag(const std::string& name, const std::string& value);
    const std::string* flag(const std::string& name) const;
};

struct Artifact {
    std::string name;
    std::string content;
};

struct RunOutput {
    std::vector<Artifact> files;  // files[0] is the primary CSV
    std::string summary;          // human-readable notes
    int failures = 0;             // selfcheck only
};

const std::vector<std::string>& command_names();

// Fills in defaulted flags so the request is fully explicit.
Request resolve(const Request& req);
RunOutput execute(const Request& req);

RunManifest make_manifest(const Request& resolved, const RunOutput& out);
Request request_from_manifest(const RunManifest& m);

// Writes every artifact plus manifest.txt into dir (created if missing).
void write_outputs(const std::string& dir, const Request& resolved, const RunOutput& out);

struct ReplayReport {
    bool identical = true;
    std::vector<std::string> mismatched;  // files whose digest differs
    Request request;
    RunOutput output;
};

ReplayReport replay(const std::string& manifest_path);

}  // namespace arbo
