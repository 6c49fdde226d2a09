// runner.hpp — executes a RunConfig end to end and writes the artifact files
// plus a manifest that pins (config hash, seed, version) for reproducibility.
#pragma once

#include <string>
#include <vector>

#include "qchaos/config.hpp"

namespace qchaos {

inline constexpr const char* kVersion = "0.1.0";

struct RunArtifacts {
    std::string manifest_path;
    std::vector<std::string> outputs;  // paths relative to the output directory
};

/** Runs the configured pipeline in config.output_dir.
 *
 *  Always writes config.json and manifest.json; the manifest records the
 *  config hash, seed, version, output list, and status, and is deterministic
 *  for a fixed (config, seed) except for its "timing" block.  On failure the
 *  manifest is still written with status = "error" and the partial output
 *  list, then the error propagates. */
RunArtifacts run(const RunConfig& config);

}  // namespace qchaos
