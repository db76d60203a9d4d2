#pragma once

// Batch commands. Each reads declared inputs, writes declared artifacts under
// the output directory and reports errors through the exception types of the
// core library (ValidationError -> exit 1, DataError -> exit 2).

#include <filesystem>
#include <string>
#include <vector>

#include "latent/cli/config.hpp"

namespace latent::cli {

void cmd_ingest(const RunConfig& config);
void cmd_entropy(const RunConfig& config);
void cmd_cluster(const RunConfig& config, WeightingScheme scheme);
void cmd_compare(const std::vector<std::filesystem::path>& partitions, const std::filesystem::path& out_dir);
// Empty `schemes`: every scheme with a latent network in the output directory.
void cmd_report(const RunConfig& config, std::vector<WeightingScheme> schemes = {});
void cmd_temporal(const RunConfig& config);

// Full command line (argv[0] included). Returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace latent::cli
