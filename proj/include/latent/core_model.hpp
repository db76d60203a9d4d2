#pragma once

// Domain types shared by every stage of the latent-cluster pipeline.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace latent {

// Shape-aware exact equality (Eigen's operator== asserts on shape mismatch).
bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Invalid arguments, configuration or schema. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data that cannot be processed. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Trim, collapse internal whitespace runs to one space and ASCII case-fold.
std::string canonical_name(std::string_view raw);

struct GroupId {
    std::size_t index = 0;
    std::string name;

    friend bool operator==(const GroupId&, const GroupId&) = default;
};

// One incident row. Categorical fields that feed modes live in `fields`,
// keyed by logical name ("target", "weapon", "tactic", "region", ...).
struct EventRecord {
    std::string event_id;
    int year = 0;
    std::string perpetrator;  // canonical
    bool doubtful = false;
    bool success = false;
    bool suicide = false;
    bool multiple = false;
    bool international = false;
    std::optional<double> killed;
    std::optional<double> wounded;
    std::string country;
    std::map<std::string, std::vector<std::string>> fields;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

class ModeGraph {
public:
    ModeGraph() = default;
    ModeGraph(std::string mode_name, std::vector<std::string> entity_labels, Eigen::MatrixXd incidence,
              bool binarized);

    const std::string& mode_name() const { return mode_name_; }
    const std::vector<std::string>& entity_labels() const { return entity_labels_; }
    const Eigen::MatrixXd& incidence() const { return incidence_; }
    bool binarized() const { return binarized_; }
    std::size_t n_groups() const { return static_cast<std::size_t>(incidence_.rows()); }
    std::size_t n_entities() const { return static_cast<std::size_t>(incidence_.cols()); }

    // Presence/absence view of the same relation.
    ModeGraph binarized_view() const;

    friend bool operator==(const ModeGraph& a, const ModeGraph& b);

private:
    std::string mode_name_;
    std::vector<std::string> entity_labels_;
    Eigen::MatrixXd incidence_;
    bool binarized_ = false;
};

struct FilterReport {
    std::size_t n_raw = 0;
    std::size_t n_after_doubt_filter = 0;
    std::size_t n_after_unknown_removal = 0;
    std::size_t n_after_year_filter = 0;
    std::size_t n_groups = 0;

    friend bool operator==(const FilterReport&, const FilterReport&) = default;
};

struct Provenance {
    std::string source_digest;
    FilterReport filter;
    int year_min = 0;
    int year_max = 0;
    std::size_t n_events = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

class MultiPartiteNetwork {
public:
    MultiPartiteNetwork() = default;
    MultiPartiteNetwork(std::vector<GroupId> groups, std::vector<ModeGraph> modes, Provenance provenance = {});

    const std::vector<GroupId>& groups() const { return groups_; }
    const std::vector<ModeGraph>& modes() const { return modes_; }
    const Provenance& provenance() const { return provenance_; }
    std::size_t n_groups() const { return groups_.size(); }

    const ModeGraph& mode(std::string_view name) const;

    friend bool operator==(const MultiPartiteNetwork&, const MultiPartiteNetwork&) = default;

private:
    std::vector<GroupId> groups_;
    std::vector<ModeGraph> modes_;
    Provenance provenance_;
};

enum class Ideology : std::uint8_t {
    Islamist = 0,
    FarLeft,
    EthnoNationalist,
    FarRight,
    OtherUnknown,
    Religious,
    AnimalEnvironmental,
};

inline constexpr std::size_t kIdeologyCount = 7;
inline constexpr std::array<Ideology, kIdeologyCount> kAllIdeologies = {
    Ideology::Islamist,     Ideology::FarLeft,   Ideology::EthnoNationalist,   Ideology::FarRight,
    Ideology::OtherUnknown, Ideology::Religious, Ideology::AnimalEnvironmental};

std::string_view ideology_name(Ideology ideology);
// Accepts the canonical names plus common short forms (FL, FR, Ethno, ...), case-insensitive.
std::optional<Ideology> parse_ideology(std::string_view text);

// Bit set over the seven categories.
class IdeologySet {
public:
    IdeologySet() = default;
    explicit IdeologySet(std::initializer_list<Ideology> items);

    void insert(Ideology i) { bits_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(i)); }
    bool contains(Ideology i) const { return (bits_ >> static_cast<unsigned>(i)) & 1u; }
    std::size_t size() const;
    bool empty() const { return bits_ == 0; }
    std::vector<Ideology> members() const;
    std::uint8_t bits() const { return bits_; }

    friend bool operator==(const IdeologySet&, const IdeologySet&) = default;

private:
    std::uint8_t bits_ = 0;
};

struct GroupProfile {
    GroupId group;
    std::size_t n_events = 0;
    double success_share = 0.0;
    double suicide_share = 0.0;
    double multiplot_share = 0.0;
    double international_share = 0.0;
    double fatality_ratio = 0.0;   // mean killed per attack
    double casualty_ratio = 0.0;   // mean killed + wounded per attack
    double casualty_missing_fraction = 0.0;
    std::size_t n_targeted_countries = 0;
    IdeologySet ideologies{Ideology::OtherUnknown};
    Ideology dominant_ideology = Ideology::OtherUnknown;

    // Throws ValidationError when an invariant does not hold.
    void validate() const;

    friend bool operator==(const GroupProfile&, const GroupProfile&) = default;
};

enum class WeightingScheme { Uniform, Entropy, Custom };
std::string_view scheme_name(WeightingScheme scheme);
WeightingScheme parse_scheme(std::string_view text);

using ModeWeights = std::map<std::string, double>;

class AffinityMatrix {
public:
    AffinityMatrix() = default;
    // Checks symmetry (1e-12), range [0,1] and squareness; never clamps.
    AffinityMatrix(Eigen::MatrixXd values, WeightingScheme scheme, ModeWeights mode_weights);

    const Eigen::MatrixXd& values() const { return values_; }
    double operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
    WeightingScheme scheme() const { return scheme_; }
    const ModeWeights& mode_weights() const { return mode_weights_; }

    friend bool operator==(const AffinityMatrix& a, const AffinityMatrix& b);

private:
    Eigen::MatrixXd values_;
    WeightingScheme scheme_ = WeightingScheme::Uniform;
    ModeWeights mode_weights_;
};

class Partition {
public:
    Partition() = default;
    // Requires labels contiguous 0..n_clusters-1.
    explicit Partition(std::vector<std::size_t> labels);
    // Relabels arbitrary cluster ids by order of first appearance.
    static Partition from_raw_labels(std::span<const std::size_t> raw);

    const std::vector<std::size_t>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    std::size_t n_clusters() const { return n_clusters_; }
    std::size_t operator[](std::size_t i) const { return labels_[i]; }
    std::vector<std::size_t> cluster_sizes() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::size_t> labels_;
    std::size_t n_clusters_ = 0;
};

struct Arc {
    std::uint32_t source = 0;
    std::uint32_t target = 0;

    friend auto operator<=>(const Arc&, const Arc&) = default;
};

struct SweepRecord {
    std::size_t k = 0;
    double raw_modularity = 0.0;
    double null_modularity = 0.0;
    double adjusted_modularity = 0.0;
    std::size_t n_clusters = 0;

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct LatentNetwork {
    std::size_t n_nodes = 0;
    std::vector<Arc> directed_edges;       // kNN arcs, sorted
    std::vector<Arc> undirected_collapse;  // source < target, sorted
    std::vector<double> edge_weights;      // parallel to undirected_collapse
    std::size_t best_k = 0;
    Partition partition;
    std::map<std::size_t, SweepRecord> modularity_curve;

    // Throws ValidationError when an invariant does not hold.
    void validate() const;

    friend bool operator==(const LatentNetwork&, const LatentNetwork&) = default;
};

}  // namespace latent
