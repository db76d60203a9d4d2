#pragma once

// Weighted Gower similarity between groups.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latent/core_model.hpp"

namespace latent {

enum class VariableKind { Categorical, Binary, Numerical };

struct VariableSpec {
    std::string mode;
    std::string key;  // entity or attribute name within the mode
    VariableKind kind = VariableKind::Binary;
    double min = 0.0;    // numerical only
    double range = 0.0;  // numerical only: max - min over the observed data

    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

struct GowerOptions {
    // Binary double-zero pairs are excluded from numerator and denominator
    // (asymmetric binary treatment) instead of counted as matches.
    bool asymmetric_binary = false;
};

struct VariableSimilarity {
    double similarity = 0.0;
    bool comparable = false;
};

// Per-variable score; std::nullopt is a missing observation.
VariableSimilarity variable_similarity(std::optional<double> x_i, std::optional<double> x_j, const VariableSpec& spec,
                                       const GowerOptions& options = {});

// Raised when two groups share no comparable variable with positive weight.
class UndefinedPairError : public DataError {
public:
    UndefinedPairError(std::string what, std::vector<std::pair<std::size_t, std::size_t>> pairs)
        : DataError(std::move(what)), pairs_(std::move(pairs)) {}
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }

private:
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

// Group x variable observations packed for the SIMD kernels. Variables are
// regrouped by mode (first-appearance order) and, within a mode, into
// categorical, binary and numerical runs. Numerical ranges are frozen from
// the data; constant numerical variables are dropped.
class GowerTable {
public:
    // `values` is groups x variables; NaN marks a missing observation.
    // Categorical values must be integers in [0, 254], binary values 0 or 1.
    GowerTable(std::vector<VariableSpec> variables, const Eigen::MatrixXd& values);

    struct Block {
        std::size_t mode = 0;  // index into modes()
        VariableKind kind = VariableKind::Binary;
        std::size_t offset = 0;  // into the code row or the numeric row
        std::size_t length = 0;
    };

    std::size_t n_groups() const { return n_groups_; }
    const std::vector<std::string>& modes() const { return modes_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    // Retained variables in packed order (codes first, then numerics, per mode).
    const std::vector<VariableSpec>& variables() const { return variables_; }
    // "mode/key" labels of constant numerical variables left out of the table.
    const std::vector<std::string>& dropped_constant() const { return dropped_; }

    const std::uint8_t* codes(std::size_t group) const { return codes_.data() + group * code_stride_; }
    const double* numerics(std::size_t group) const { return numerics_.data() + group * numeric_stride_; }
    const double* ranges() const { return ranges_.data(); }

    // Observation of retained variable `packed_index` for a group.
    std::optional<double> value(std::size_t group, std::size_t packed_index) const;

private:
    std::size_t n_groups_ = 0;
    std::vector<std::string> modes_;
    std::vector<Block> blocks_;
    std::vector<VariableSpec> variables_;
    std::vector<std::size_t> packed_slot_;  // packed variable -> code or numeric column
    std::vector<std::string> dropped_;
    std::size_t code_stride_ = 0;
    std::size_t numeric_stride_ = 0;
    std::vector<std::uint8_t> codes_;
    std::vector<double> numerics_;
    std::vector<double> ranges_;
};

// S_ij = sum_k w_k S_ij^(k) / sum_k w_k over comparable variables. Throws
// UndefinedPairError when the denominator is zero.
double gower_pair(std::size_t i, std::size_t j, const GowerTable& table, const ModeWeights& weights,
                  const GowerOptions& options = {});

struct AffinityOptions {
    GowerOptions gower;
    bool use_counts = false;  // count-valued numerical variables instead of binarized columns
    unsigned threads = 1;
    std::optional<ModeWeights> custom_weights;
};

// Variables and observations the network contributes: one per (mode, entity).
GowerTable variables_from_network(const MultiPartiteNetwork& network, bool use_counts);

AffinityMatrix affinity_from_table(const GowerTable& table, const ModeWeights& weights, WeightingScheme scheme,
                                   const GowerOptions& options = {}, unsigned threads = 1);

AffinityMatrix affinity_matrix(const MultiPartiteNetwork& network, WeightingScheme scheme,
                               const AffinityOptions& options = {});

}  // namespace latent
