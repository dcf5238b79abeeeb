#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "embclf/synth.hpp"

namespace embclf::cli {

// Runs one subcommand. `args` excludes the program name. Returns the exit
// status: 0 on success, 1 on a failed run (one "error: ..." line on `err`),
// 2 on a command-line error (message and usage on `err`).
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv);

// Synthetic-store description. Either explicit clusters:
//   {"dimension": 4, "provenance": "...", "splits": {"train": .8, "val": .1, "test": .1},
//    "clusters": [{"mean": [..] | "mean_fill": x, "stddev": 1, "count": 10, "label": 1,
//                  "dataset_tag": "synth"}]}
// or a canned layout: {"layout": "two_cluster" | "xor" | "confounder" | "shifted", ...}
// with the parameters of the matching *_layout function.
SynthSpec synth_spec_from_json(const nlohmann::json& doc);

}  // namespace embclf::cli
