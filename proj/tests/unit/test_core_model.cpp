#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latent/core_model.hpp"

using namespace latent;

TEST_CASE("canonical names trim, collapse whitespace and fold case") {
    CHECK(canonical_name("  Islamic  State of\tIraq ") == "islamic state of iraq");
    CHECK(canonical_name("FARC") == "farc");
    CHECK(canonical_name("") == "");
}

TEST_CASE("ModeGraph rejects invalid incidence") {
    Eigen::MatrixXd inc(2, 2);
    inc << 1, 0, 2, 1;
    CHECK_NOTHROW(ModeGraph("Targets", {"a", "b"}, inc, false));
    CHECK_THROWS_AS(ModeGraph("Targets", {"a"}, inc, false), ValidationError);
    CHECK_THROWS_AS(ModeGraph("Targets", {"a", "b"}, inc, true), ValidationError);
    Eigen::MatrixXd neg = inc;
    neg(0, 1) = -1;
    CHECK_THROWS_AS(ModeGraph("Targets", {"a", "b"}, neg, false), ValidationError);
}

TEST_CASE("binarized view keeps presence only") {
    Eigen::MatrixXd inc(1, 3);
    inc << 3, 0, 1;
    const ModeGraph m("Weapons", {"x", "y", "z"}, inc, false);
    const ModeGraph b = m.binarized_view();
    CHECK(b.binarized());
    CHECK(b.incidence()(0, 0) == 1.0);
    CHECK(b.incidence()(0, 1) == 0.0);
    CHECK(b.incidence()(0, 2) == 1.0);
}

TEST_CASE("MultiPartiteNetwork validates group axes and names") {
    Eigen::MatrixXd two = Eigen::MatrixXd::Ones(2, 1);
    Eigen::MatrixXd three = Eigen::MatrixXd::Ones(3, 1);
    std::vector<GroupId> groups = {{0, "a"}, {1, "b"}};
    CHECK_NOTHROW(MultiPartiteNetwork(groups, {ModeGraph("T", {"t"}, two, true)}));
    CHECK_THROWS_AS(MultiPartiteNetwork(groups, {ModeGraph("T", {"t"}, three, true)}), ValidationError);
    CHECK_THROWS_AS(MultiPartiteNetwork(groups, {ModeGraph("T", {"t"}, two, true), ModeGraph("T", {"u"}, two, true)}),
                    ValidationError);
    CHECK_THROWS_AS(MultiPartiteNetwork({{0, "a"}, {2, "b"}}, {}), ValidationError);
    CHECK_THROWS_AS(MultiPartiteNetwork({{0, "a"}, {1, "a"}}, {}), ValidationError);
    const MultiPartiteNetwork net(groups, {ModeGraph("T", {"t"}, two, true)});
    CHECK(net.mode("T").n_entities() == 1);
    CHECK_THROWS_AS(net.mode("W"), ValidationError);
}

TEST_CASE("ideology parsing and sets") {
    CHECK(parse_ideology("Islamist/jihadist") == Ideology::Islamist);
    CHECK(parse_ideology("FL") == Ideology::FarLeft);
    CHECK(parse_ideology("ethno") == Ideology::EthnoNationalist);
    CHECK_FALSE(parse_ideology("monarchist").has_value());
    IdeologySet s{Ideology::FarLeft, Ideology::EthnoNationalist};
    CHECK(s.size() == 2);
    CHECK(s.contains(Ideology::FarLeft));
    CHECK_FALSE(s.contains(Ideology::Islamist));
    for (auto i : kAllIdeologies) CHECK(parse_ideology(ideology_name(i)) == i);
}

TEST_CASE("GroupProfile invariants") {
    GroupProfile p;
    p.group = {0, "g"};
    p.n_events = 3;
    p.n_targeted_countries = 1;
    CHECK_NOTHROW(p.validate());
    p.success_share = 1.2;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.success_share = 0.5;
    p.ideologies = IdeologySet{Ideology::Islamist};
    p.dominant_ideology = Ideology::FarLeft;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.ideologies = IdeologySet{Ideology::Islamist, Ideology::FarLeft, Ideology::FarRight, Ideology::Religious};
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("AffinityMatrix checks symmetry and range without clamping") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 0.5, 0.5, 1;
    CHECK_NOTHROW(AffinityMatrix(m, WeightingScheme::Uniform, {{"T", 1.0}}));
    Eigen::MatrixXd asym = m;
    asym(0, 1) = 0.5 + 1e-9;
    CHECK_THROWS_AS(AffinityMatrix(asym, WeightingScheme::Uniform, {}), ValidationError);
    Eigen::MatrixXd big = m;
    big(0, 1) = big(1, 0) = 1.0 + 1e-15;
    CHECK_THROWS_AS(AffinityMatrix(big, WeightingScheme::Uniform, {}), ValidationError);
    CHECK_THROWS_AS(AffinityMatrix(Eigen::MatrixXd::Ones(2, 3), WeightingScheme::Uniform, {}), ValidationError);
    CHECK_THROWS_AS(AffinityMatrix(m, WeightingScheme::Entropy, {{"T", -1.0}}), ValidationError);
}

TEST_CASE("Partition labels") {
    CHECK_THROWS_AS(Partition({0, 2}), ValidationError);
    const std::vector<std::size_t> raw = {7, 7, 3, 9, 3};
    const Partition p = Partition::from_raw_labels(raw);
    CHECK(p.labels() == std::vector<std::size_t>{0, 0, 1, 2, 1});
    CHECK(p.n_clusters() == 3);
    CHECK(p.cluster_sizes() == std::vector<std::size_t>{2, 2, 1});
}

TEST_CASE("weighting scheme names round-trip") {
    for (auto s : {WeightingScheme::Uniform, WeightingScheme::Entropy, WeightingScheme::Custom})
        CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK_THROWS_AS(parse_scheme("tfidf"), ValidationError);
}

TEST_CASE("LatentNetwork invariants") {
    LatentNetwork l;
    l.n_nodes = 3;
    l.best_k = 1;
    l.directed_edges = {{0, 1}, {1, 2}, {2, 1}};
    l.undirected_collapse = {{0, 1}, {1, 2}};
    l.edge_weights = {1.0, 1.0};
    l.partition = Partition({0, 0, 0});
    l.modularity_curve[1] = SweepRecord{1, 0.25, 0.1, 0.25 - 0.1, 1};
    CHECK_NOTHROW(l.validate());

    auto bad = l;
    bad.directed_edges.push_back({0, 2});
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = l;
    bad.undirected_collapse = {{0, 1}};
    bad.edge_weights = {1.0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = l;
    bad.modularity_curve[1].adjusted_modularity = 0.2;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
