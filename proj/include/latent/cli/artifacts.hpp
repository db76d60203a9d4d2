#pragma once

// Persisted artifact formats.
//
// Text artifacts start with "# key: value" header lines:
//   # latent-artifact: <kind>
//   # format-version: 1
//   # config-digest: <hex sha-256 of the producing stage's settings>
//   # input: <role> <hex sha-256>      (one per input, repeated)
//   # seed: <u64 or "none">
// followed by tab-separated body records. Reals use the shortest decimal form
// that round-trips to the same double.
//
// Binary matrices (.bin): 8-byte magic "LCMATRIX", u32 rows, u32 cols (both
// little-endian), then rows*cols little-endian IEEE-754 doubles in row-major
// order. The header lines and metadata live in a text ".meta" sidecar.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "latent/core_model.hpp"
#include "latent/evaluation.hpp"
#include "latent/spectral_entropy.hpp"
#include "latent/temporal.hpp"

namespace latent::cli {

inline constexpr int kFormatVersion = 1;

struct ArtifactHeader {
    std::string kind;
    int version = kFormatVersion;
    std::string config_digest;
    std::vector<std::pair<std::string, std::string>> inputs;  // role, sha-256
    std::optional<std::uint64_t> seed;
};

struct Artifact {
    ArtifactHeader header;
    std::vector<std::string> lines;  // body, header stripped
};

std::string render_header(const ArtifactHeader& header);

// Splits header and body; throws ValidationError on a kind or version mismatch.
Artifact parse_artifact(const std::string& text, std::string_view expected_kind);
Artifact read_artifact(const std::filesystem::path& path, std::string_view expected_kind);

// Writes through a temporary file and renames, so readers never see a
// partial artifact.
void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

std::string format_real(double value);
double parse_real(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

// Tab, newline, carriage return and backslash are escaped in text fields.
std::string escape_field(std::string_view text);
std::string unescape_field(std::string_view text);
std::vector<std::string> split_tabs(std::string_view line);

// Body serializers. Each parse_* accepts the body produced by its render_*.
std::string render_network(const MultiPartiteNetwork& network);
MultiPartiteNetwork parse_network(const std::vector<std::string>& body);

std::string render_profiles(const std::vector<GroupProfile>& profiles);
std::vector<GroupProfile> parse_profiles(const std::vector<std::string>& body);

std::string render_filter_report(const FilterReport& report, std::size_t n_rejected_rows);

std::string render_partition(const Partition& partition, const std::vector<GroupId>& groups);
// Returns the partition and the group names in row order.
std::pair<Partition, std::vector<std::string>> parse_partition(const std::vector<std::string>& body);

std::string render_entropies(const std::vector<ModeEntropy>& entropies);
std::vector<ModeEntropy> parse_entropies(const std::vector<std::string>& body);

// Both schemes' weights; entropy weights absent when every entropy is zero.
std::string render_weights(const ModeWeights& uniform, const std::optional<ModeWeights>& entropy);
ModeWeights parse_weights(const std::vector<std::string>& body, WeightingScheme scheme);

std::string render_affinity(const AffinityMatrix& affinity);
AffinityMatrix parse_affinity(const std::vector<std::string>& body);
std::string render_affinity_meta(const AffinityMatrix& affinity);
std::string encode_matrix(const Eigen::MatrixXd& matrix);
Eigen::MatrixXd decode_matrix(std::string_view bytes);
AffinityMatrix parse_affinity_binary(const std::vector<std::string>& meta_body, std::string_view bytes);

std::string render_latent(const LatentNetwork& latent);
LatentNetwork parse_latent(const std::vector<std::string>& body);

std::string render_sweep(const LatentNetwork& latent);

std::string render_stats(const NetworkStats& stats);
std::string render_node_metrics(const NodeMetrics& metrics, const std::vector<GroupId>& groups);
std::string render_cluster_profiles(const ClusterProfileTable& table);
std::string render_correlations(const CorrelationMatrix& matrix);
std::string render_mask(const std::vector<std::vector<int>>& mask);
std::string render_cluster_sizes(const Partition& partition);
std::string render_ami_matrix(const std::vector<std::string>& names, const std::vector<std::vector<double>>& ami);
std::string render_entropy_series(const EntropySeries& series);

}  // namespace latent::cli
