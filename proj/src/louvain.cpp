#include <algorithm>
#include <numeric>
#include <random>

#include "latent/latent_network.hpp"

namespace latent {

namespace {

// Weighted graph in adjacency-matrix convention: self_loop[i] is A_ii, so an
// aggregated community with internal weight w has A_ii = 2w.
struct LevelGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
    std::vector<double> self_loop;
    std::vector<double> degree;
    double two_m = 0.0;

    std::size_t size() const { return adj.size(); }
};

LevelGraph from_graph(const Graph& g) {
    LevelGraph lg;
    const std::size_t n = g.n_nodes();
    lg.adj.resize(n);
    lg.self_loop.assign(n, 0.0);
    lg.degree.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto nb = g.neighbors(v);
        const auto w = g.neighbor_weights(v);
        lg.adj[v].reserve(nb.size());
        for (std::size_t i = 0; i < nb.size(); ++i) {
            lg.adj[v].emplace_back(nb[i], w[i]);
            lg.degree[v] += w[i];
        }
        lg.two_m += lg.degree[v];
    }
    return lg;
}

double level_modularity(const LevelGraph& lg, const std::vector<std::uint32_t>& comm, std::size_t n_comm) {
    std::vector<double> in(n_comm, 0.0), tot(n_comm, 0.0);
    for (std::size_t i = 0; i < lg.size(); ++i) {
        tot[comm[i]] += lg.degree[i];
        in[comm[i]] += lg.self_loop[i];
        for (const auto& [j, w] : lg.adj[i])
            if (comm[j] == comm[i]) in[comm[i]] += w;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < n_comm; ++c) {
        const double frac = tot[c] / lg.two_m;
        q += in[c] / lg.two_m - frac * frac;
    }
    return q;
}

// Local moving phase. Returns true when at least one node changed community.
bool local_moving(const LevelGraph& lg, std::vector<std::uint32_t>& comm, std::mt19937_64& rng) {
    const std::size_t n = lg.size();
    comm.resize(n);
    std::iota(comm.begin(), comm.end(), 0u);
    std::vector<double> tot(lg.degree);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> link_to(n, 0.0);
    std::vector<std::uint32_t> touched;
    bool any_move = false;
    constexpr double kMinGain = 1e-12;
    while (true) {
        std::size_t moves = 0;
        for (const auto i : order) {
            const std::uint32_t home = comm[i];
            const double k_i = lg.degree[i];
            touched.clear();
            link_to[home] = 0.0;
            touched.push_back(home);
            for (const auto& [j, w] : lg.adj[i]) {
                const auto c = comm[j];
                if (link_to[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end())
                    touched.push_back(c);
                link_to[c] += w;
            }
            tot[home] -= k_i;
            std::uint32_t best = home;
            double best_gain = link_to[home] - tot[home] * k_i / lg.two_m;
            for (const auto c : touched) {
                const double gain = link_to[c] - tot[c] * k_i / lg.two_m;
                if (gain > best_gain + kMinGain) {
                    best = c;
                    best_gain = gain;
                }
            }
            tot[best] += k_i;
            comm[i] = best;
            if (best != home) ++moves;
            for (const auto c : touched) link_to[c] = 0.0;
        }
        if (moves == 0) break;
        any_move = true;
    }
    return any_move;
}

// Renumbers communities by first appearance; returns the community count.
std::size_t compact(std::vector<std::uint32_t>& comm) {
    std::vector<std::uint32_t> remap(comm.size(), UINT32_MAX);
    std::uint32_t next = 0;
    for (auto& c : comm) {
        if (remap[c] == UINT32_MAX) remap[c] = next++;
        c = remap[c];
    }
    return next;
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<std::uint32_t>& comm, std::size_t n_comm) {
    LevelGraph out;
    out.adj.resize(n_comm);
    out.self_loop.assign(n_comm, 0.0);
    out.degree.assign(n_comm, 0.0);
    out.two_m = lg.two_m;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> raw(n_comm);
    for (std::size_t i = 0; i < lg.size(); ++i) {
        const auto ci = comm[i];
        out.self_loop[ci] += lg.self_loop[i];
        out.degree[ci] += lg.degree[i];
        for (const auto& [j, w] : lg.adj[i]) {
            if (comm[j] == ci)
                out.self_loop[ci] += w;
            else
                raw[ci].emplace_back(comm[j], w);
        }
    }
    for (std::size_t c = 0; c < n_comm; ++c) {
        auto& r = raw[c];
        std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [d, w] : r) {
            if (!out.adj[c].empty() && out.adj[c].back().first == d)
                out.adj[c].back().second += w;
            else
                out.adj[c].emplace_back(d, w);
        }
    }
    return out;
}

}  // namespace

LouvainRun louvain_run(const Graph& graph, std::uint64_t seed) {
    if (graph.n_edges() == 0) throw ValidationError("Louvain needs at least one edge");
    std::mt19937_64 rng(seed);
    LevelGraph level = from_graph(graph);
    std::vector<std::uint32_t> membership(graph.n_nodes());
    std::iota(membership.begin(), membership.end(), 0u);

    LouvainRun run;
    std::vector<std::uint32_t> comm;
    while (true) {
        const bool moved = local_moving(level, comm, rng);
        const std::size_t n_comm = compact(comm);
        if (!moved) break;
        for (auto& m : membership) m = comm[m];
        run.level_modularity.push_back(level_modularity(level, comm, n_comm));
        if (n_comm == level.size()) break;
        level = aggregate(level, comm, n_comm);
    }
    std::vector<std::size_t> labels(membership.begin(), membership.end());
    run.partition = Partition::from_raw_labels(labels);
    run.modularity = modularity(graph, run.partition);
    return run;
}

Partition louvain(const Graph& graph, std::uint64_t seed, std::size_t restarts) {
    LouvainRun best;
    bool have = false;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, restarts); ++r) {
        LouvainRun run = louvain_run(graph, mix_seed(seed + r));
        if (!have || run.modularity > best.modularity) {
            best = std::move(run);
            have = true;
        }
    }
    return best.partition;
}

}  // namespace latent
