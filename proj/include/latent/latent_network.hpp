#pragma once

// Asymmetric kNN latent networks, null models, modularity and Louvain
// clustering, and the kNN modularity-maximization sweep over k.

#include <cstdint>
#include <span>
#include <vector>

#include "latent/core_model.hpp"

namespace latent {

// Undirected simple graph in CSR form. Edges are stored once with u < v.
class Graph {
public:
    Graph() = default;
    // Rejects self-loops, duplicates and out-of-range endpoints. `weights`
    // defaults to 1 for every edge.
    Graph(std::size_t n_nodes, std::vector<Arc> edges, std::vector<double> weights = {});

    std::size_t n_nodes() const { return n_nodes_; }
    std::size_t n_edges() const { return edges_.size(); }
    const std::vector<Arc>& edges() const { return edges_; }
    const std::vector<double>& weights() const { return weights_; }
    bool has_edge(std::uint32_t u, std::uint32_t v) const;

    std::span<const std::uint32_t> neighbors(std::size_t v) const {
        return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    std::span<const double> neighbor_weights(std::size_t v) const {
        return {neighbor_weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }
    double strength(std::size_t v) const;
    double total_weight() const { return total_weight_; }

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_nodes_ == b.n_nodes_ && a.edges_ == b.edges_ && a.weights_ == b.weights_;
    }

private:
    std::size_t n_nodes_ = 0;
    std::vector<Arc> edges_;
    std::vector<double> weights_;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> neighbors_;
    std::vector<double> neighbor_weights_;
    double total_weight_ = 0.0;
};

struct KnnGraph {
    std::size_t k = 0;
    std::vector<Arc> arcs;  // i -> each of its k nearest neighbours, sorted
    Graph graph;            // OR-union of the arcs
};

// Every node ranked by decreasing similarity to `node` (self excluded); ties
// go to the lower index.
std::vector<std::vector<std::uint32_t>> neighbor_rankings(const AffinityMatrix& affinity, unsigned threads = 1);

KnnGraph asymmetric_knn(const AffinityMatrix& affinity, std::size_t k, bool weighted = false);
KnnGraph asymmetric_knn(const std::vector<std::vector<std::uint32_t>>& rankings, const AffinityMatrix& affinity,
                        std::size_t k, bool weighted = false);

enum class NullModel { ErdosRenyi, DegreePreserving };

// G(n, m) sample with the input's vertex and edge counts, or a degree-preserving
// double-edge-swap randomization. Output edges carry unit weight.
Graph rewire_null(const Graph& graph, std::uint64_t seed, NullModel model = NullModel::ErdosRenyi);

// Newman modularity of `partition` on `graph`, honouring edge weights.
double modularity(const Graph& graph, const Partition& partition);

struct LouvainRun {
    Partition partition;
    double modularity = 0.0;
    // Modularity after each level's local-moving phase; non-decreasing.
    std::vector<double> level_modularity;
};

// One seeded Louvain run: local moving in a shuffled node order, then
// aggregation, repeated until a level makes no move.
LouvainRun louvain_run(const Graph& graph, std::uint64_t seed);

// Best of `restarts` seeded runs (first best kept on ties).
Partition louvain(const Graph& graph, std::uint64_t seed, std::size_t restarts = 5);

struct SweepOptions {
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t null_samples = 1;
    NullModel null_model = NullModel::ErdosRenyi;
    bool weighted = false;
    unsigned threads = 1;
};

// k = 2^i for i = 1..floor(log2 n), clamped to n - 1.
std::vector<std::size_t> candidate_ks(std::size_t n);

LatentNetwork knn_modularity_sweep(const AffinityMatrix& affinity, const SweepOptions& options);

// Undirected graph of a latent network (weights as stored).
Graph latent_graph(const LatentNetwork& latent);

// Deterministic 64-bit mixer used to derive per-task seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace latent
