#pragma once

// Run configuration: INI file plus command-line overrides, and the digests
// that tie persisted artifacts to the settings and inputs that produced them.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "latent/evaluation.hpp"
#include "latent/ingestion.hpp"
#include "latent/latent_network.hpp"

namespace latent::cli {

enum class OutputFormat { Text, Binary };

struct RunConfig {
    std::filesystem::path events_path;
    std::filesystem::path ideology_path;  // empty: no ideology map
    char delimiter = ',';
    ColumnMapping columns = ColumnMapping::gtd_defaults();
    FilterPolicy filter;
    ModeConfig modes = default_modes();

    bool use_counts = false;
    bool asymmetric_binary = false;

    std::optional<std::uint64_t> seed;
    std::size_t restarts = 5;
    std::size_t null_samples = 1;
    NullModel null_model = NullModel::ErdosRenyi;
    bool weighted = false;

    CorrelationMethod correlation = CorrelationMethod::Pearson;

    std::filesystem::path out_dir = "latent_out";
    OutputFormat format = OutputFormat::Text;
    unsigned threads = 0;  // 0: all available cores
};

// Parses an INI file. Relative input paths resolve against the file's
// directory. Unknown sections or keys are ValidationErrors.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});

// Pipeline stages; each stage's digest covers only the settings it reads.
enum class Stage { Ingest, Entropy, Cluster, Report, Temporal };
std::string_view stage_name(Stage stage);

// Hex SHA-256 over a canonical rendering of the stage's settings. Paths,
// thread count, output directory, scheme, format and seed are excluded.
std::string stage_digest(const RunConfig& config, Stage stage);

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

std::string_view null_model_name(NullModel model);
NullModel parse_null_model(std::string_view text);

}  // namespace latent::cli
