#include "latent/latent_network.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

#include "latent/parallel.hpp"

namespace latent {

namespace {

std::uint64_t pair_key(std::uint32_t u, std::uint32_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Graph::Graph(std::size_t n_nodes, std::vector<Arc> edges, std::vector<double> weights)
    : n_nodes_(n_nodes), edges_(std::move(edges)), weights_(std::move(weights)) {
    if (weights_.empty()) weights_.assign(edges_.size(), 1.0);
    if (weights_.size() != edges_.size()) throw ValidationError("edge weights do not match edges");
    std::vector<std::size_t> order(edges_.size());
    for (auto& e : edges_) {
        if (e.source >= n_nodes_ || e.target >= n_nodes_) throw ValidationError("edge endpoint out of range");
        if (e.source == e.target) throw ValidationError("self-loops are not allowed");
        if (e.source > e.target) std::swap(e.source, e.target);
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges_[a] < edges_[b]; });
    std::vector<Arc> sorted_edges;
    std::vector<double> sorted_weights;
    sorted_edges.reserve(edges_.size());
    sorted_weights.reserve(edges_.size());
    for (auto idx : order) {
        if (!sorted_edges.empty() && sorted_edges.back() == edges_[idx])
            throw ValidationError("duplicate edge in simple graph");
        if (!(weights_[idx] > 0.0)) throw ValidationError("edge weights must be positive");
        sorted_edges.push_back(edges_[idx]);
        sorted_weights.push_back(weights_[idx]);
    }
    edges_ = std::move(sorted_edges);
    weights_ = std::move(sorted_weights);

    std::vector<std::size_t> deg(n_nodes_, 0);
    for (const auto& e : edges_) {
        ++deg[e.source];
        ++deg[e.target];
    }
    offsets_.assign(n_nodes_ + 1, 0);
    for (std::size_t v = 0; v < n_nodes_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
    neighbors_.resize(offsets_.back());
    neighbor_weights_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // Edges are sorted by (source, target), so each adjacency list ends up sorted.
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto [u, v] = edges_[e];
        neighbors_[fill[v]] = u;
        neighbor_weights_[fill[v]++] = weights_[e];
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto [u, v] = edges_[e];
        neighbors_[fill[u]] = v;
        neighbor_weights_[fill[u]++] = weights_[e];
    }
    total_weight_ = 0.0;
    for (double w : weights_) total_weight_ += w;
}

bool Graph::has_edge(std::uint32_t u, std::uint32_t v) const {
    if (u >= n_nodes_ || v >= n_nodes_) return false;
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

double Graph::strength(std::size_t v) const {
    double s = 0.0;
    for (double w : neighbor_weights(v)) s += w;
    return s;
}

std::vector<std::vector<std::uint32_t>> neighbor_rankings(const AffinityMatrix& affinity, unsigned threads) {
    const std::size_t n = affinity.size();
    std::vector<std::vector<std::uint32_t>> out(n);
    parallel_for(n, threads, [&](std::size_t i) {
        auto& row = out[i];
        row.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) row.push_back(static_cast<std::uint32_t>(j));
        std::stable_sort(row.begin(), row.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return affinity(i, a) > affinity(i, b); });
    });
    return out;
}

KnnGraph asymmetric_knn(const std::vector<std::vector<std::uint32_t>>& rankings, const AffinityMatrix& affinity,
                        std::size_t k, bool weighted) {
    const std::size_t n = rankings.size();
    if (k < 1 || k >= n) throw ValidationError("kNN requires 1 <= k < n");
    KnnGraph out;
    out.k = k;
    out.arcs.reserve(n * k);
    std::unordered_set<std::uint64_t> seen;
    std::vector<Arc> edges;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < k; ++r) {
            const auto j = rankings[i][r];
            out.arcs.push_back({static_cast<std::uint32_t>(i), j});
            if (seen.insert(pair_key(static_cast<std::uint32_t>(i), j)).second) {
                edges.push_back({static_cast<std::uint32_t>(i), j});
                // Zero-similarity neighbours still need a positive weight in the weighted variant.
                weights.push_back(weighted ? std::max(affinity(i, j), 1e-12) : 1.0);
            }
        }
    }
    std::sort(out.arcs.begin(), out.arcs.end());
    out.graph = Graph(n, std::move(edges), std::move(weights));
    return out;
}

KnnGraph asymmetric_knn(const AffinityMatrix& affinity, std::size_t k, bool weighted) {
    return asymmetric_knn(neighbor_rankings(affinity), affinity, k, weighted);
}

Graph rewire_null(const Graph& graph, std::uint64_t seed, NullModel model) {
    const std::size_t n = graph.n_nodes();
    const std::size_t m = graph.n_edges();
    const std::size_t max_edges = n * (n - 1) / 2;
    if (m > max_edges) throw ValidationError("edge count exceeds n(n-1)/2");
    std::mt19937_64 rng(seed);

    if (model == NullModel::DegreePreserving) {
        std::vector<Arc> edges = graph.edges();
        std::unordered_set<std::uint64_t> present;
        for (const auto& e : edges) present.insert(pair_key(e.source, e.target));
        if (m >= 2) {
            std::uniform_int_distribution<std::size_t> pick(0, m - 1);
            std::bernoulli_distribution flip(0.5);
            for (std::size_t attempt = 0; attempt < 10 * m; ++attempt) {
                const std::size_t x = pick(rng), y = pick(rng);
                if (x == y) continue;
                auto [a, b] = edges[x];
                auto [c, d] = edges[y];
                if (flip(rng)) std::swap(c, d);
                if (a == d || c == b || a == c || b == d) continue;
                if (present.contains(pair_key(a, d)) || present.contains(pair_key(c, b))) continue;
                present.erase(pair_key(a, b));
                present.erase(pair_key(c, d));
                present.insert(pair_key(a, d));
                present.insert(pair_key(c, b));
                edges[x] = {std::min(a, d), std::max(a, d)};
                edges[y] = {std::min(c, b), std::max(c, b)};
            }
        }
        return Graph(n, std::move(edges));
    }

    // Uniform G(n, m): draw distinct unordered pairs; when m is more than half
    // of all pairs, draw the complement instead.
    const bool complement = m > max_edges / 2;
    const std::size_t draws = complement ? max_edges - m : m;
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(draws * 2);
    std::vector<std::uint64_t> order;
    order.reserve(draws);
    if (n >= 2) {
        std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
        while (order.size() < draws) {
            const auto u = node(rng), v = node(rng);
            if (u == v) continue;
            const auto key = pair_key(u, v);
            if (chosen.insert(key).second) order.push_back(key);
        }
    }
    std::vector<Arc> edges;
    edges.reserve(m);
    if (complement) {
        for (std::uint32_t u = 0; u < n; ++u)
            for (std::uint32_t v = u + 1; v < n; ++v)
                if (!chosen.contains(pair_key(u, v))) edges.push_back({u, v});
    } else {
        for (auto key : order)
            edges.push_back({static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key & 0xFFFFFFFFu)});
    }
    return Graph(n, std::move(edges));
}

double modularity(const Graph& graph, const Partition& partition) {
    if (partition.size() != graph.n_nodes()) throw ValidationError("partition does not cover the graph");
    if (graph.n_edges() == 0) throw ValidationError("modularity is undefined on an empty graph");
    const double m = graph.total_weight();
    std::vector<double> internal(partition.n_clusters(), 0.0), total(partition.n_clusters(), 0.0);
    for (std::size_t e = 0; e < graph.n_edges(); ++e) {
        const auto [u, v] = graph.edges()[e];
        const double w = graph.weights()[e];
        total[partition[u]] += w;
        total[partition[v]] += w;
        if (partition[u] == partition[v]) internal[partition[u]] += w;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < partition.n_clusters(); ++c) {
        const double frac = total[c] / (2.0 * m);
        q += internal[c] / m - frac * frac;
    }
    return q;
}

std::vector<std::size_t> candidate_ks(std::size_t n) {
    if (n < 4) throw ValidationError("the kNN sweep needs at least 4 groups");
    std::vector<std::size_t> ks;
    for (std::size_t k = 2; k <= n; k *= 2) {
        const std::size_t clamped = std::min(k, n - 1);
        if (ks.empty() || ks.back() != clamped) ks.push_back(clamped);
    }
    return ks;
}

namespace {

struct SweepPoint {
    KnnGraph knn;
    Partition partition;
    SweepRecord record;
};

SweepPoint evaluate_k(const std::vector<std::vector<std::uint32_t>>& rankings, const AffinityMatrix& affinity,
                      std::size_t k, const SweepOptions& options) {
    const std::uint64_t base = mix_seed(options.seed ^ static_cast<std::uint64_t>(k));
    SweepPoint p;
    p.knn = asymmetric_knn(rankings, affinity, k, options.weighted);
    p.partition = louvain(p.knn.graph, mix_seed(base ^ 1u), options.restarts);
    p.record.k = k;
    p.record.raw_modularity = modularity(p.knn.graph, p.partition);
    p.record.n_clusters = p.partition.n_clusters();

    const std::size_t samples = std::max<std::size_t>(1, options.null_samples);
    double null_sum = 0.0;
    for (std::size_t r = 0; r < samples; ++r) {
        Graph null = rewire_null(p.knn.graph, mix_seed(base ^ (2u + 2u * r)), options.null_model);
        if (options.weighted) {
            std::vector<double> w;
            w.reserve(null.n_edges());
            for (const auto& e : null.edges()) w.push_back(std::max(affinity(e.source, e.target), 1e-12));
            null = Graph(null.n_nodes(), null.edges(), std::move(w));
        }
        const Partition null_partition = louvain(null, mix_seed(base ^ (3u + 2u * r)), options.restarts);
        null_sum += modularity(null, null_partition);
    }
    p.record.null_modularity = null_sum / static_cast<double>(samples);
    p.record.adjusted_modularity = p.record.raw_modularity - p.record.null_modularity;
    return p;
}

}  // namespace

LatentNetwork knn_modularity_sweep(const AffinityMatrix& affinity, const SweepOptions& options) {
    const std::size_t n = affinity.size();
    const auto ks = candidate_ks(n);
    const auto rankings = neighbor_rankings(affinity, options.threads);

    std::vector<SweepPoint> points(ks.size());
    parallel_for(ks.size(), options.threads,
                 [&](std::size_t i) { points[i] = evaluate_k(rankings, affinity, ks[i], options); });

    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].record.adjusted_modularity > points[best].record.adjusted_modularity) best = i;

    LatentNetwork out;
    out.n_nodes = n;
    out.best_k = ks[best];
    out.directed_edges = points[best].knn.arcs;
    out.undirected_collapse = points[best].knn.graph.edges();
    out.edge_weights = points[best].knn.graph.weights();
    out.partition = points[best].partition;
    for (const auto& p : points) out.modularity_curve[p.record.k] = p.record;
    return out;
}

Graph latent_graph(const LatentNetwork& latent) {
    return Graph(latent.n_nodes, latent.undirected_collapse, latent.edge_weights);
}

}  // namespace latent
