#include "latent/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

#include "latent/parallel.hpp"

namespace latent {

namespace {

Partition canonical(const Partition& p) { return Partition::from_raw_labels(p.labels()); }

struct Contingency {
    std::vector<double> row_sums, col_sums;
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>> cells;  // sorted nonzero cells
    double n = 0.0;
};

Contingency contingency(const Partition& u, const Partition& v) {
    if (u.size() != v.size()) throw ValidationError("partitions differ in element count");
    Contingency c;
    c.n = static_cast<double>(u.size());
    c.row_sums.assign(u.n_clusters(), 0.0);
    c.col_sums.assign(v.n_clusters(), 0.0);
    std::map<std::pair<std::size_t, std::size_t>, double> cells;
    for (std::size_t i = 0; i < u.size(); ++i) {
        c.row_sums[u[i]] += 1.0;
        c.col_sums[v[i]] += 1.0;
        cells[{u[i], v[i]}] += 1.0;
    }
    c.cells.assign(cells.begin(), cells.end());
    return c;
}

double entropy_of(const std::vector<double>& sums, double n) {
    double h = 0.0;
    for (double s : sums)
        if (s > 0.0) h -= (s / n) * std::log(s / n);
    return h;
}

double mi_of(const Contingency& c) {
    double mi = 0.0;
    for (const auto& [ij, nij] : c.cells)
        mi += (nij / c.n) * std::log(c.n * nij / (c.row_sums[ij.first] * c.col_sums[ij.second]));
    return std::max(mi, 0.0);
}

double emi_of(const Contingency& c) {
    const double n = c.n;
    const double lg_n = std::lgamma(n + 1.0);
    double emi = 0.0;
    for (double a : c.row_sums) {
        const double lg_a = std::lgamma(a + 1.0) + std::lgamma(n - a + 1.0);
        for (double b : c.col_sums) {
            const double lg_b = std::lgamma(b + 1.0) + std::lgamma(n - b + 1.0);
            const double lo = std::max(1.0, a + b - n);
            const double hi = std::min(a, b);
            for (double nij = lo; nij <= hi; nij += 1.0) {
                const double log_p = lg_a + lg_b - lg_n - std::lgamma(nij + 1.0) - std::lgamma(a - nij + 1.0) -
                                     std::lgamma(b - nij + 1.0) - std::lgamma(n - a - b + nij + 1.0);
                emi += (nij / n) * std::log(n * nij / (a * b)) * std::exp(log_p);
            }
        }
    }
    return emi;
}

std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
        i = j + 1;
    }
    return r;
}

// Unit-weight copy: structural statistics ignore similarity weights.
Graph structural(const LatentNetwork& latent) { return Graph(latent.n_nodes, latent.undirected_collapse); }

}  // namespace

double partition_entropy(const Partition& p) {
    std::vector<double> sums(p.n_clusters(), 0.0);
    for (auto l : p.labels()) sums[l] += 1.0;
    return entropy_of(sums, static_cast<double>(p.size()));
}

double mutual_information(const Partition& u, const Partition& v) {
    return mi_of(contingency(canonical(u), canonical(v)));
}

double expected_mutual_information(const Partition& u, const Partition& v) {
    return emi_of(contingency(canonical(u), canonical(v)));
}

double adjusted_mutual_information(const Partition& u, const Partition& v) {
    if (u.size() != v.size()) throw ValidationError("partitions differ in element count");
    const Partition cu = canonical(u), cv = canonical(v);
    if (cu == cv) return 1.0;
    const Contingency c = contingency(cu, cv);
    const double mi = mi_of(c);
    const double emi = emi_of(c);
    const double h = std::max(entropy_of(c.row_sums, c.n), entropy_of(c.col_sums, c.n));
    double denominator = h - emi;
    constexpr double kEps = 2.220446049250313e-16;
    denominator = denominator < 0.0 ? std::min(denominator, -kEps) : std::max(denominator, kEps);
    return (mi - emi) / denominator;
}

Partition ideology_heuristic_partition(const std::vector<GroupProfile>& profiles) {
    std::vector<bool> present(kIdeologyCount, false);
    for (const auto& p : profiles) present[static_cast<std::size_t>(p.dominant_ideology)] = true;
    std::vector<std::size_t> cluster_of(kIdeologyCount, 0);
    std::size_t next = 0;
    for (std::size_t c = 0; c < kIdeologyCount; ++c)
        if (present[c]) cluster_of[c] = next++;
    std::vector<std::size_t> labels;
    labels.reserve(profiles.size());
    for (const auto& p : profiles) labels.push_back(cluster_of[static_cast<std::size_t>(p.dominant_ideology)]);
    return Partition(std::move(labels));
}

std::vector<double> betweenness(const Graph& graph, unsigned threads) {
    const std::size_t n = graph.n_nodes();
    constexpr std::size_t kBlock = 32;
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> partial(n_blocks);
    parallel_for(n_blocks, threads, [&](std::size_t b) {
        std::vector<double> acc(n, 0.0), sigma(n), delta(n);
        std::vector<long long> dist(n);
        std::vector<std::uint32_t> stack;
        stack.reserve(n);
        std::queue<std::uint32_t> bfs;
        for (std::size_t s = b * kBlock; s < std::min(n, (b + 1) * kBlock); ++s) {
            std::fill(sigma.begin(), sigma.end(), 0.0);
            std::fill(delta.begin(), delta.end(), 0.0);
            std::fill(dist.begin(), dist.end(), -1);
            stack.clear();
            sigma[s] = 1.0;
            dist[s] = 0;
            bfs.push(static_cast<std::uint32_t>(s));
            while (!bfs.empty()) {
                const auto v = bfs.front();
                bfs.pop();
                stack.push_back(v);
                for (const auto w : graph.neighbors(v)) {
                    if (dist[w] < 0) {
                        dist[w] = dist[v] + 1;
                        bfs.push(w);
                    }
                    if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
                }
            }
            for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
                const auto w = *it;
                for (const auto v : graph.neighbors(w))
                    if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                if (w != s) acc[w] += delta[w];
            }
        }
        partial[b] = std::move(acc);
    });
    std::vector<double> out(n, 0.0);
    for (const auto& p : partial)
        for (std::size_t v = 0; v < n; ++v) out[v] += p[v];
    for (auto& x : out) x /= 2.0;
    return out;
}

std::vector<double> local_clustering(const Graph& graph) {
    const std::size_t n = graph.n_nodes();
    std::vector<double> out(n, 0.0);
    std::vector<char> mark(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto nb = graph.neighbors(v);
        const std::size_t d = nb.size();
        if (d < 2) continue;
        for (auto u : nb) mark[u] = 1;
        std::size_t links = 0;
        for (auto u : nb)
            for (auto w : graph.neighbors(u))
                if (w > u && mark[w]) ++links;
        for (auto u : nb) mark[u] = 0;
        out[v] = static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
    }
    return out;
}

double global_transitivity(const Graph& graph) {
    const std::size_t n = graph.n_nodes();
    std::vector<char> mark(n, 0);
    double closed = 0.0, triples = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        const auto nb = graph.neighbors(v);
        const double d = static_cast<double>(nb.size());
        triples += d * (d - 1.0) / 2.0;
        for (auto u : nb) mark[u] = 1;
        for (auto u : nb)
            for (auto w : graph.neighbors(u))
                if (w > u && mark[w]) closed += 1.0;
        for (auto u : nb) mark[u] = 0;
    }
    return triples > 0.0 ? closed / triples : 0.0;
}

EigenvectorResult eigenvector_centrality(const Graph& graph, double tolerance, std::size_t max_iterations) {
    const std::size_t n = graph.n_nodes();
    EigenvectorResult out;
    if (n == 0) return out;
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
    // Iterating on A + I keeps the dominant eigenvector and avoids the
    // oscillation plain power iteration shows on bipartite graphs.
    for (std::size_t it = 0; it < max_iterations; ++it) {
        for (std::size_t v = 0; v < n; ++v) {
            double s = x[v];
            for (auto u : graph.neighbors(v)) s += x[u];
            y[v] = s;
        }
        double norm = 0.0;
        for (double val : y) norm += val * val;
        norm = std::sqrt(norm);
        double change = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            y[v] /= norm;
            change = std::max(change, std::abs(y[v] - x[v]));
        }
        std::swap(x, y);
        if (change < tolerance) {
            out.converged = true;
            break;
        }
    }
    const double top = *std::max_element(x.begin(), x.end());
    for (auto& val : x) val = top > 0.0 ? val / top : 0.0;
    out.scores = std::move(x);
    return out;
}

double degree_centralization(const Graph& graph) {
    const std::size_t n = graph.n_nodes();
    if (n < 3) return 0.0;
    std::size_t dmax = 0;
    for (std::size_t v = 0; v < n; ++v) dmax = std::max(dmax, graph.degree(v));
    double sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) sum += static_cast<double>(dmax - graph.degree(v));
    const double nn = static_cast<double>(n);
    return sum / ((nn - 1.0) * (nn - 2.0));
}

double betweenness_centralization(const Graph& graph, const std::vector<double>& scores) {
    const std::size_t n = graph.n_nodes();
    if (n < 3) return 0.0;
    const double bmax = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double b : scores) sum += bmax - b;
    const double nn = static_cast<double>(n);
    return sum / ((nn - 1.0) * (nn - 1.0) * (nn - 2.0) / 2.0);
}

double eigenvector_centralization(const Graph& graph, const std::vector<double>& scores) {
    const std::size_t n = graph.n_nodes();
    if (n < 3) return 0.0;
    const double smax = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += smax - s;
    const double nn = static_cast<double>(n);
    return sum / ((nn - 1.0) - std::sqrt(nn - 1.0));
}

bool is_connected(const Graph& graph) {
    const std::size_t n = graph.n_nodes();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto u : graph.neighbors(v))
            if (!seen[u]) {
                seen[u] = 1;
                ++count;
                stack.push_back(u);
            }
    }
    return count == n;
}

NetworkStats network_statistics(const LatentNetwork& latent, unsigned threads) {
    const Graph g = structural(latent);
    NetworkStats s;
    s.n_nodes = latent.n_nodes;
    s.n_knn_arcs = latent.directed_edges.size();
    s.n_bidirectional_links = g.n_edges();
    s.n_directed_links = 2 * g.n_edges();
    s.best_k = latent.best_k;
    s.n_clusters = latent.partition.n_clusters();
    std::size_t mutual = 0;
    for (const auto& a : latent.directed_edges)
        if (std::binary_search(latent.directed_edges.begin(), latent.directed_edges.end(), Arc{a.target, a.source}))
            ++mutual;
    s.n_mutual_pairs = mutual / 2;
    const double n = static_cast<double>(s.n_nodes);
    s.density = s.n_nodes > 1 ? 2.0 * static_cast<double>(g.n_edges()) / (n * (n - 1.0)) : 0.0;
    const auto lc = local_clustering(g);
    s.clustering_coefficient = lc.empty() ? 0.0 : std::accumulate(lc.begin(), lc.end(), 0.0) / n;
    s.global_transitivity = global_transitivity(g);
    s.betweenness_centralization = betweenness_centralization(g, betweenness(g, threads));
    const auto eig = eigenvector_centrality(g);
    s.eigenvector_converged = eig.converged;
    s.eigenvector_centralization = eigenvector_centralization(g, eig.scores);
    s.degree_centralization = degree_centralization(g);
    s.connected = is_connected(g);
    if (const auto it = latent.modularity_curve.find(latent.best_k); it != latent.modularity_curve.end())
        s.modularity = it->second.raw_modularity;
    else if (g.n_edges() > 0)
        s.modularity = modularity(latent_graph(latent), latent.partition);
    return s;
}

NodeMetrics node_metrics(const LatentNetwork& latent, unsigned threads) {
    const Graph g = structural(latent);
    NodeMetrics m;
    m.total_degree.assign(latent.n_nodes, 0);
    for (const auto& a : latent.directed_edges) {
        ++m.total_degree[a.source];
        ++m.total_degree[a.target];
    }
    m.undirected_degree.resize(latent.n_nodes);
    for (std::size_t v = 0; v < latent.n_nodes; ++v) m.undirected_degree[v] = g.degree(v);
    m.betweenness = betweenness(g, threads);
    m.local_clustering = local_clustering(g);
    return m;
}

const std::vector<std::string>& profile_aggregate_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v = {"n_events",      "success_share",   "suicide_share",
                                      "fatality_ratio", "casualty_ratio", "multiplot_share",
                                      "international_share", "n_targeted_countries"};
        for (auto i : kAllIdeologies) v.push_back("share_" + std::string(ideology_name(i)));
        return v;
    }();
    return names;
}

ClusterProfileTable cluster_profile_table(const Partition& partition, const std::vector<GroupProfile>& profiles) {
    if (partition.size() != profiles.size()) throw ValidationError("partition and profiles differ in group count");
    const std::size_t width = profile_aggregate_names().size();
    ClusterProfileTable t;
    t.cluster_sizes = partition.cluster_sizes();
    t.values.assign(partition.n_clusters(), std::vector<double>(width, 0.0));
    for (std::size_t g = 0; g < profiles.size(); ++g) {
        const auto& p = profiles[g];
        auto& row = t.values[partition[g]];
        const double attrs[] = {static_cast<double>(p.n_events), p.success_share,   p.suicide_share,
                                p.fatality_ratio,                p.casualty_ratio,  p.multiplot_share,
                                p.international_share,           static_cast<double>(p.n_targeted_countries)};
        std::size_t col = 0;
        for (double a : attrs) row[col++] += a;
        for (auto i : kAllIdeologies) row[col++] += p.ideologies.contains(i) ? 1.0 : 0.0;
    }
    for (std::size_t c = 0; c < t.values.size(); ++c)
        for (auto& v : t.values[c]) v /= static_cast<double>(t.cluster_sizes[c]);
    return t;
}

std::optional<double> correlation(const std::vector<double>& x, const std::vector<double>& y,
                                  CorrelationMethod method) {
    if (x.size() != y.size() || x.size() < 2) return std::nullopt;
    if (method == CorrelationMethod::Spearman) return correlation(ranks(x), ranks(y), CorrelationMethod::Pearson);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
    if (x == y) return 1.0;
    return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

CorrelationMatrix cluster_profile_correlations(const Partition& partition, const std::vector<GroupProfile>& profiles,
                                               CorrelationMethod method) {
    if (partition.n_clusters() < 3) throw ValidationError("cluster-profile correlations need at least 3 clusters");
    const auto table = cluster_profile_table(partition, profiles);
    const std::size_t width = profile_aggregate_names().size();
    std::vector<std::vector<double>> columns(width, std::vector<double>(table.values.size()));
    for (std::size_t c = 0; c < table.values.size(); ++c)
        for (std::size_t a = 0; a < width; ++a) columns[a][c] = table.values[c][a];
    CorrelationMatrix out(width, std::vector<std::optional<double>>(width));
    for (std::size_t a = 0; a < width; ++a)
        for (std::size_t b = a; b < width; ++b) out[a][b] = out[b][a] = correlation(columns[a], columns[b], method);
    return out;
}

std::vector<std::vector<int>> stability_mask(const CorrelationMatrix& a, const CorrelationMatrix& b) {
    if (a.size() != b.size()) throw ValidationError("correlation matrices differ in shape");
    std::vector<std::vector<int>> mask(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) throw ValidationError("correlation matrices differ in shape");
        mask[i].resize(a[i].size(), 0);
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            if (!a[i][j] || !b[i][j]) continue;
            const auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
            mask[i][j] = sign(*a[i][j]) == sign(*b[i][j]) ? 1 : 0;
        }
    }
    return mask;
}

}  // namespace latent
