#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "latent/latent_network.hpp"
#include "support/oracles.hpp"

using namespace latent;

namespace {

std::vector<Arc> arcs_of(const std::vector<std::pair<std::size_t, std::size_t>>& e) {
    std::vector<Arc> out;
    for (auto [u, v] : e) out.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
    return out;
}

Graph two_triangles() { return Graph(6, arcs_of({{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})); }

Graph complete(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return Graph(n, arcs_of(e));
}

AffinityMatrix affinity_from(const Eigen::MatrixXd& m) { return AffinityMatrix(m, WeightingScheme::Uniform, {}); }

// Noisy block-structured similarities.
AffinityMatrix block_affinity(oracle::Rng& rng, std::size_t n, std::size_t blocks, std::vector<std::size_t>& truth) {
    truth.resize(n);
    for (std::size_t i = 0; i < n; ++i) truth[i] = i % blocks;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double base = truth[i] == truth[j] ? 0.7 : 0.3;
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = base + rng.uniform(-0.1, 0.1);
        }
    return affinity_from(m);
}

}  // namespace

TEST_CASE("graph construction rejects self-loops and duplicates") {
    CHECK_THROWS_AS(Graph(3, {{0, 0}}), ValidationError);
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), ValidationError);
    CHECK_THROWS_AS(Graph(3, {{0, 1}}, {0.0}), ValidationError);
    const Graph g(3, {{2, 1}, {0, 1}});
    CHECK(g.edges() == std::vector<Arc>{{0, 1}, {1, 2}});
    CHECK(g.has_edge(2, 1));
    CHECK(g.degree(1) == 2);
}

TEST_CASE("kNN worked example and tie-breaking") {
    Eigen::MatrixXd m(3, 3);
    m << 1, 0.9, 0.1, 0.9, 1, 0.8, 0.1, 0.8, 1;
    const auto knn = asymmetric_knn(affinity_from(m), 1);
    CHECK(knn.arcs == std::vector<Arc>{{0, 1}, {1, 0}, {2, 1}});
    CHECK(knn.graph.edges() == std::vector<Arc>{{0, 1}, {1, 2}});

    Eigen::MatrixXd tie = Eigen::MatrixXd::Constant(4, 4, 0.5);
    tie.diagonal().setOnes();
    const auto t = asymmetric_knn(affinity_from(tie), 1);
    CHECK(t.arcs == std::vector<Arc>{{0, 1}, {1, 0}, {2, 0}, {3, 0}});

    CHECK_THROWS_AS(asymmetric_knn(affinity_from(m), 3), ValidationError);
    CHECK_THROWS_AS(asymmetric_knn(affinity_from(m), 0), ValidationError);
}

TEST_CASE("k = n - 1 yields the complete graph and out-degrees equal k") {
    oracle::Rng rng(41);
    std::vector<std::size_t> truth;
    const auto a = block_affinity(rng, 9, 3, truth);
    CHECK(asymmetric_knn(a, 8).graph.n_edges() == 36);
    for (std::size_t k = 1; k < 9; ++k) {
        const auto knn = asymmetric_knn(a, k);
        std::vector<std::size_t> out(9, 0);
        for (const auto& arc : knn.arcs) {
            CHECK(arc.source != arc.target);
            ++out[arc.source];
        }
        for (auto d : out) CHECK(d == k);
    }
}

TEST_CASE("kNN edge sets grow monotonically with k") {
    oracle::Rng rng(42);
    std::vector<std::size_t> truth;
    const auto a = block_affinity(rng, 30, 3, truth);
    std::set<Arc> prev;
    for (std::size_t k = 1; k < 30; ++k) {
        const auto e = asymmetric_knn(a, k).graph.edges();
        const std::set<Arc> cur(e.begin(), e.end());
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = cur;
    }
}

TEST_CASE("null model keeps vertex and edge counts") {
    const auto k4 = complete(4);
    for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(rewire_null(k4, seed).edges() == k4.edges());

    oracle::Rng rng(43);
    const auto e = oracle::random_graph_edges(rng, 100, 0.0404);
    std::vector<std::pair<std::size_t, std::size_t>> first200(e.begin(), e.begin() + std::min<std::size_t>(200, e.size()));
    REQUIRE(first200.size() == 200);
    const Graph g(100, arcs_of(first200));
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto r = rewire_null(g, seed);
        CHECK(r.n_nodes() == 100);
        REQUIRE(r.n_edges() == 200);
        CHECK(2.0 * static_cast<double>(r.n_edges()) / 100.0 == 4.0);
    }
    CHECK(rewire_null(g, 9) == rewire_null(g, 9));
    CHECK_FALSE(rewire_null(g, 9) == rewire_null(g, 10));
}

TEST_CASE("degree-preserving null keeps every degree") {
    oracle::Rng rng(44);
    const Graph g(40, arcs_of(oracle::random_graph_edges(rng, 40, 0.15)));
    const auto r = rewire_null(g, 5, NullModel::DegreePreserving);
    for (std::size_t v = 0; v < 40; ++v) CHECK(r.degree(v) == g.degree(v));
    CHECK(r.n_edges() == g.n_edges());
}

TEST_CASE("modularity ground truths") {
    CHECK(modularity(two_triangles(), Partition({0, 0, 0, 1, 1, 1})) == 0.5);
    CHECK(modularity(complete(4), Partition({0, 1, 2, 3})) < 0.0);
    CHECK_THROWS_AS(modularity(Graph(3, {}), Partition({0, 0, 0})), ValidationError);
    oracle::Rng rng(45);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = rng.index(5, 30);
        auto e = oracle::random_graph_edges(rng, n, 0.3);
        if (e.empty()) e.emplace_back(0, 1);
        const Graph g(n, arcs_of(e));
        CHECK(std::abs(modularity(g, Partition(std::vector<std::size_t>(n, 0)))) < 1e-12);
        std::vector<std::size_t> raw(n);
        for (auto& l : raw) l = rng.index(0, 3);
        const auto p = Partition::from_raw_labels(raw);
        const double q = modularity(g, p);
        CHECK(std::abs(q - oracle::modularity(n, e, p.labels())) < 1e-12);
        CHECK(q >= -0.5);
        CHECK(q <= 1.0);
    }
}

TEST_CASE("Louvain recovers triangles and keeps complete graphs whole") {
    const auto run = louvain_run(two_triangles(), 1);
    CHECK(run.partition == Partition({0, 0, 0, 1, 1, 1}));
    CHECK(run.modularity == 0.5);

    const auto k5 = complete(5);
    double best = -1.0;
    std::vector<std::size_t> best_labels;
    oracle::for_each_partition(5, [&](const std::vector<std::size_t>& labels) {
        const double q = modularity(k5, Partition(labels));
        if (q > best + 1e-12) {
            best = q;
            best_labels = labels;
        }
    });
    CHECK(best_labels == std::vector<std::size_t>(5, 0));
    for (std::uint64_t seed = 0; seed < 10; ++seed) CHECK(louvain(k5, seed).n_clusters() == 1);
}

TEST_CASE("Louvain level modularity is non-decreasing and deterministic") {
    oracle::Rng rng(46);
    for (int t = 0; t < 10; ++t) {
        const Graph g(60, arcs_of(oracle::random_graph_edges(rng, 60, 0.08)));
        if (g.n_edges() == 0) continue;
        const auto run = louvain_run(g, static_cast<std::uint64_t>(t));
        for (std::size_t i = 1; i < run.level_modularity.size(); ++i)
            CHECK(run.level_modularity[i] >= run.level_modularity[i - 1] - 1e-12);
        if (!run.level_modularity.empty()) CHECK(run.modularity >= run.level_modularity.front() - 1e-12);
        CHECK(run.modularity >= 0.0);
        CHECK(louvain_run(g, static_cast<std::uint64_t>(t)).partition == run.partition);
    }
}

TEST_CASE("candidate k values") {
    CHECK(candidate_ks(8) == std::vector<std::size_t>{2, 4, 7});
    CHECK(candidate_ks(16) == std::vector<std::size_t>{2, 4, 8, 15});
    CHECK(candidate_ks(10) == std::vector<std::size_t>{2, 4, 8});
    CHECK_THROWS_AS(candidate_ks(3), ValidationError);
}

TEST_CASE("sweep on block similarities is consistent and deterministic") {
    oracle::Rng rng(47);
    std::vector<std::size_t> truth;
    const auto a = block_affinity(rng, 60, 3, truth);
    SweepOptions opt;
    opt.seed = 99;
    opt.threads = 1;
    const auto l1 = knn_modularity_sweep(a, opt);
    CHECK_NOTHROW(l1.validate());
    opt.threads = 4;
    const auto l4 = knn_modularity_sweep(a, opt);
    CHECK(l1 == l4);
    CHECK(l1.partition.n_clusters() == 3);
    for (const auto& [k, r] : l1.modularity_curve) {
        CHECK(r.adjusted_modularity == r.raw_modularity - r.null_modularity);
        CHECK(r.adjusted_modularity <= l1.modularity_curve.at(l1.best_k).adjusted_modularity);
    }
}

TEST_CASE("constant similarities give an index-ordered hub graph that never beats its null") {
    const std::size_t n = 32;
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, 0.5);
    m.diagonal().setOnes();
    const auto a = affinity_from(m);
    for (const std::size_t k : candidate_ks(n)) {
        std::vector<Arc> expected;
        for (std::uint32_t i = 0; i < n; ++i) {
            std::vector<std::uint32_t> targets;
            for (std::uint32_t j = 0; targets.size() < k; ++j)
                if (j != i) targets.push_back(j);
            for (const auto j : targets) expected.push_back({i, j});
        }
        CHECK(asymmetric_knn(a, k).arcs == expected);
    }
    for (std::uint64_t s = 0; s < 100; ++s) {
        SweepOptions opt;
        opt.seed = s;
        opt.restarts = 1;
        const auto l = knn_modularity_sweep(a, opt);
        for (const auto& [k, r] : l.modularity_curve) {
            CAPTURE(k);
            CHECK(r.raw_modularity <= 1e-12);
            CHECK(r.adjusted_modularity <= 1e-12);
        }
        CHECK(l.modularity_curve.at(n - 1).adjusted_modularity == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(l.best_k == n - 1);
    }
}
