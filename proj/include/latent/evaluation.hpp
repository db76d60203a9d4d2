#pragma once

// Partition comparison, network statistics, node-level metrics and
// cluster-profile correlation analyses.

#include <optional>
#include <string>
#include <vector>

#include "latent/core_model.hpp"
#include "latent/latent_network.hpp"

namespace latent {

// (MI - E[MI]) / (max(H(U), H(V)) - E[MI]) with E[MI] under the
// hypergeometric permutation model; natural logarithms.
double adjusted_mutual_information(const Partition& u, const Partition& v);

double mutual_information(const Partition& u, const Partition& v);
double expected_mutual_information(const Partition& u, const Partition& v);
double partition_entropy(const Partition& p);

// One cluster per distinct dominant ideology, numbered in category order.
Partition ideology_heuristic_partition(const std::vector<GroupProfile>& profiles);

struct NetworkStats {
    std::size_t n_nodes = 0;
    std::size_t n_knn_arcs = 0;             // n * k
    std::size_t n_mutual_pairs = 0;         // pairs joined by arcs in both directions
    std::size_t n_directed_links = 0;       // 2 x undirected edges
    std::size_t n_bidirectional_links = 0;  // undirected edges
    std::size_t best_k = 0;
    std::size_t n_clusters = 0;
    double density = 0.0;
    double clustering_coefficient = 0.0;  // mean local transitivity, degree < 2 counts 0
    double global_transitivity = 0.0;
    double betweenness_centralization = 0.0;
    double eigenvector_centralization = 0.0;
    double degree_centralization = 0.0;
    double modularity = 0.0;
    bool connected = true;
    bool eigenvector_converged = true;
};

// Unnormalized undirected betweenness (each unordered pair counted once).
// Sources run in fixed-size blocks whose partial sums are combined in block
// order, so the result does not depend on `threads`.
std::vector<double> betweenness(const Graph& graph, unsigned threads = 1);

std::vector<double> local_clustering(const Graph& graph);
double global_transitivity(const Graph& graph);

struct EigenvectorResult {
    std::vector<double> scores;  // max-normalized to 1
    bool converged = false;
};
EigenvectorResult eigenvector_centrality(const Graph& graph, double tolerance = 1e-10,
                                         std::size_t max_iterations = 100000);

// Freeman centralizations normalized by the star-graph value of each index.
double degree_centralization(const Graph& graph);
double betweenness_centralization(const Graph& graph, const std::vector<double>& betweenness_scores);
double eigenvector_centralization(const Graph& graph, const std::vector<double>& eigen_scores);

bool is_connected(const Graph& graph);

NetworkStats network_statistics(const LatentNetwork& latent, unsigned threads = 1);

struct NodeMetrics {
    std::vector<std::size_t> total_degree;       // in + out kNN arcs
    std::vector<std::size_t> undirected_degree;  // degree in the collapse
    std::vector<double> betweenness;
    std::vector<double> local_clustering;
};

NodeMetrics node_metrics(const LatentNetwork& latent, unsigned threads = 1);

enum class CorrelationMethod { Pearson, Spearman };

// Names of the per-cluster aggregates, in matrix order.
const std::vector<std::string>& profile_aggregate_names();

struct ClusterProfileTable {
    std::vector<std::size_t> cluster_sizes;
    // cluster x aggregate: attribute means, then ideology shares.
    std::vector<std::vector<double>> values;
};

ClusterProfileTable cluster_profile_table(const Partition& partition, const std::vector<GroupProfile>& profiles);

// Square matrix over aggregates; std::nullopt where a zero-variance aggregate
// makes the coefficient undefined.
using CorrelationMatrix = std::vector<std::vector<std::optional<double>>>;

CorrelationMatrix cluster_profile_correlations(const Partition& partition, const std::vector<GroupProfile>& profiles,
                                               CorrelationMethod method = CorrelationMethod::Pearson);

std::optional<double> correlation(const std::vector<double>& x, const std::vector<double>& y,
                                  CorrelationMethod method = CorrelationMethod::Pearson);

// 1 where both entries are defined and share a sign, 0 elsewhere.
std::vector<std::vector<int>> stability_mask(const CorrelationMatrix& a, const CorrelationMatrix& b);

}  // namespace latent
