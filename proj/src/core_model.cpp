#include "latent/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

namespace latent {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return a.size() == 0 || (a.array() == b.array()).all();
}

std::string canonical_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

ModeGraph::ModeGraph(std::string mode_name, std::vector<std::string> entity_labels, Eigen::MatrixXd incidence,
                     bool binarized)
    : mode_name_(std::move(mode_name)),
      entity_labels_(std::move(entity_labels)),
      incidence_(std::move(incidence)),
      binarized_(binarized) {
    if (mode_name_.empty()) throw ValidationError("mode graph needs a name");
    if (static_cast<std::size_t>(incidence_.cols()) != entity_labels_.size())
        throw ValidationError("mode '" + mode_name_ + "': entity label count does not match incidence columns");
    for (Eigen::Index c = 0; c < incidence_.cols(); ++c) {
        for (Eigen::Index r = 0; r < incidence_.rows(); ++r) {
            const double w = incidence_(r, c);
            if (!(w >= 0.0) || !std::isfinite(w))
                throw ValidationError("mode '" + mode_name_ + "': negative or non-finite edge weight");
            if (binarized_ && w != 0.0 && w != 1.0)
                throw ValidationError("mode '" + mode_name_ + "': binarized weights must be 0 or 1");
        }
    }
}

ModeGraph ModeGraph::binarized_view() const {
    if (binarized_) return *this;
    Eigen::MatrixXd bin = (incidence_.array() > 0.0).cast<double>().matrix();
    return ModeGraph(mode_name_, entity_labels_, std::move(bin), true);
}

bool operator==(const ModeGraph& a, const ModeGraph& b) {
    return a.mode_name_ == b.mode_name_ && a.entity_labels_ == b.entity_labels_ && a.binarized_ == b.binarized_ &&
           same_matrix(a.incidence_, b.incidence_);
}

MultiPartiteNetwork::MultiPartiteNetwork(std::vector<GroupId> groups, std::vector<ModeGraph> modes,
                                         Provenance provenance)
    : groups_(std::move(groups)), modes_(std::move(modes)), provenance_(std::move(provenance)) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        if (groups_[i].index != i) throw ValidationError("group indices must be contiguous from 0");
        if (!names.insert(canonical_name(groups_[i].name)).second)
            throw ValidationError("duplicate group name '" + groups_[i].name + "'");
    }
    std::set<std::string> mode_names;
    for (const auto& m : modes_) {
        if (m.n_groups() != groups_.size())
            throw ValidationError("mode '" + m.mode_name() + "' group axis does not match the group registry");
        if (!mode_names.insert(m.mode_name()).second)
            throw ValidationError("duplicate mode name '" + m.mode_name() + "'");
    }
}

const ModeGraph& MultiPartiteNetwork::mode(std::string_view name) const {
    for (const auto& m : modes_)
        if (m.mode_name() == name) return m;
    throw ValidationError("no mode named '" + std::string(name) + "'");
}

std::string_view ideology_name(Ideology ideology) {
    switch (ideology) {
        case Ideology::Islamist: return "islamist";
        case Ideology::FarLeft: return "far_left";
        case Ideology::EthnoNationalist: return "ethno_nationalist";
        case Ideology::FarRight: return "far_right";
        case Ideology::OtherUnknown: return "other_unknown";
        case Ideology::Religious: return "religious";
        case Ideology::AnimalEnvironmental: return "animal_environmental";
    }
    return "other_unknown";
}

std::optional<Ideology> parse_ideology(std::string_view text) {
    static const std::unordered_map<std::string, Ideology> table = {
        {"islamist", Ideology::Islamist},
        {"islamist/jihadist", Ideology::Islamist},
        {"islamist/jihadism", Ideology::Islamist},
        {"jihadist", Ideology::Islamist},
        {"far_left", Ideology::FarLeft},
        {"far left", Ideology::FarLeft},
        {"fl", Ideology::FarLeft},
        {"ethno_nationalist", Ideology::EthnoNationalist},
        {"ethno/nationalist", Ideology::EthnoNationalist},
        {"ethno", Ideology::EthnoNationalist},
        {"far_right", Ideology::FarRight},
        {"far right", Ideology::FarRight},
        {"fr", Ideology::FarRight},
        {"other_unknown", Ideology::OtherUnknown},
        {"other/unknown", Ideology::OtherUnknown},
        {"other", Ideology::OtherUnknown},
        {"religious", Ideology::Religious},
        {"religion", Ideology::Religious},
        {"religion (no islam)", Ideology::Religious},
        {"animal_environmental", Ideology::AnimalEnvironmental},
        {"animal/environmentalist", Ideology::AnimalEnvironmental},
        {"animal", Ideology::AnimalEnvironmental},
    };
    const auto it = table.find(canonical_name(text));
    if (it == table.end()) return std::nullopt;
    return it->second;
}

IdeologySet::IdeologySet(std::initializer_list<Ideology> items) {
    for (auto i : items) insert(i);
}

std::size_t IdeologySet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Ideology> IdeologySet::members() const {
    std::vector<Ideology> out;
    for (auto i : kAllIdeologies)
        if (contains(i)) out.push_back(i);
    return out;
}

void GroupProfile::validate() const {
    auto share_ok = [](double s) { return s >= 0.0 && s <= 1.0; };
    if (n_events == 0) throw ValidationError("profile '" + group.name + "' has zero events");
    if (!share_ok(success_share) || !share_ok(suicide_share) || !share_ok(multiplot_share) ||
        !share_ok(international_share) || !share_ok(casualty_missing_fraction))
        throw ValidationError("profile '" + group.name + "' has a share outside [0,1]");
    if (!(fatality_ratio >= 0.0) || !(casualty_ratio >= 0.0))
        throw ValidationError("profile '" + group.name + "' has a negative victim ratio");
    if (n_targeted_countries < 1) throw ValidationError("profile '" + group.name + "' targets no country");
    if (ideologies.size() < 1 || ideologies.size() > 3)
        throw ValidationError("profile '" + group.name + "' must carry 1 to 3 ideologies");
    if (!ideologies.contains(dominant_ideology))
        throw ValidationError("profile '" + group.name + "' dominant ideology is not among its ideologies");
}

std::string_view scheme_name(WeightingScheme scheme) {
    switch (scheme) {
        case WeightingScheme::Uniform: return "uniform";
        case WeightingScheme::Entropy: return "entropy";
        case WeightingScheme::Custom: return "custom";
    }
    return "custom";
}

WeightingScheme parse_scheme(std::string_view text) {
    if (text == "uniform") return WeightingScheme::Uniform;
    if (text == "entropy") return WeightingScheme::Entropy;
    if (text == "custom") return WeightingScheme::Custom;
    throw ValidationError("unknown weighting scheme '" + std::string(text) + "'");
}

AffinityMatrix::AffinityMatrix(Eigen::MatrixXd values, WeightingScheme scheme, ModeWeights mode_weights)
    : values_(std::move(values)), scheme_(scheme), mode_weights_(std::move(mode_weights)) {
    if (values_.rows() != values_.cols()) throw ValidationError("affinity matrix must be square");
    const Eigen::Index n = values_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = values_(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("affinity entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") outside [0,1]");
            if (j > i && std::abs(v - values_(j, i)) > 1e-12)
                throw ValidationError("affinity matrix is not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
        }
    }
    for (const auto& [mode, w] : mode_weights_)
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("mode weight for '" + mode + "' is invalid");
}

bool operator==(const AffinityMatrix& a, const AffinityMatrix& b) {
    return a.scheme_ == b.scheme_ && a.mode_weights_ == b.mode_weights_ && same_matrix(a.values_, b.values_);
}

Partition::Partition(std::vector<std::size_t> labels) : labels_(std::move(labels)) {
    std::size_t max_label = 0;
    for (auto l : labels_) max_label = std::max(max_label, l);
    n_clusters_ = labels_.empty() ? 0 : max_label + 1;
    std::vector<bool> seen(n_clusters_, false);
    for (auto l : labels_) seen[l] = true;
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ValidationError("partition labels must be contiguous from 0");
}

Partition Partition::from_raw_labels(std::span<const std::size_t> raw) {
    std::unordered_map<std::size_t, std::size_t> remap;
    std::vector<std::size_t> labels;
    labels.reserve(raw.size());
    for (auto r : raw) {
        auto [it, inserted] = remap.try_emplace(r, remap.size());
        labels.push_back(it->second);
    }
    return Partition(std::move(labels));
}

std::vector<std::size_t> Partition::cluster_sizes() const {
    std::vector<std::size_t> sizes(n_clusters_, 0);
    for (auto l : labels_) ++sizes[l];
    return sizes;
}

void LatentNetwork::validate() const {
    if (partition.size() != n_nodes) throw ValidationError("latent partition does not cover every node");
    if (best_k == 0) throw ValidationError("best k must be positive");
    std::vector<std::size_t> out_degree(n_nodes, 0);
    for (const auto& a : directed_edges) {
        if (a.source >= n_nodes || a.target >= n_nodes || a.source == a.target)
            throw ValidationError("invalid kNN arc");
        ++out_degree[a.source];
    }
    for (auto d : out_degree)
        if (d != best_k) throw ValidationError("every node must have out-degree best_k");
    std::set<std::pair<std::uint32_t, std::uint32_t>> collapse;
    for (const auto& a : directed_edges) collapse.emplace(std::min(a.source, a.target), std::max(a.source, a.target));
    if (collapse.size() != undirected_collapse.size()) throw ValidationError("undirected collapse is inconsistent");
    std::size_t idx = 0;
    for (const auto& [u, v] : collapse) {
        if (undirected_collapse[idx].source != u || undirected_collapse[idx].target != v)
            throw ValidationError("undirected collapse is inconsistent");
        ++idx;
    }
    if (edge_weights.size() != undirected_collapse.size()) throw ValidationError("edge weights misaligned");
    for (const auto& [k, rec] : modularity_curve)
        if (rec.adjusted_modularity != rec.raw_modularity - rec.null_modularity)
            throw ValidationError("adjusted modularity must equal raw minus null");
}

}  // namespace latent
