#pragma once

// Command line front end for the robustam library: experiment subcommands,
// config-file handling, seeding, and reproducibility manifests.

namespace robustam::cli {

// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 solver failure.
int run(int argc, const char* const* argv);

}  // namespace robustam::cli
