#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latent/similarity.hpp"
#include "support/oracles.hpp"

using namespace latent;

namespace {

struct Mixed {
    std::vector<VariableSpec> specs;
    std::vector<oracle::Variable> vars;
    oracle::Matrix x;
};

// Random mixed table over three modes; ~5% missing cells.
Mixed random_mixed(oracle::Rng& rng, std::size_t n, std::size_t p) {
    Mixed m;
    const char* modes[] = {"Targets", "Weapons", "Regions"};
    for (std::size_t k = 0; k < p; ++k) {
        const std::string mode = modes[rng.index(0, 2)];
        const auto kind = static_cast<oracle::Kind>(rng.index(0, 2));
        m.vars.push_back({mode, kind});
        VariableSpec s;
        s.mode = mode;
        s.key = "v" + std::to_string(k);
        s.kind = kind == oracle::Kind::Categorical ? VariableKind::Categorical
                 : kind == oracle::Kind::Binary    ? VariableKind::Binary
                                                   : VariableKind::Numerical;
        m.specs.push_back(s);
    }
    m.x.assign(n, std::vector<double>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k) {
            double v = 0.0;
            switch (m.vars[k].kind) {
                case oracle::Kind::Categorical: v = static_cast<double>(rng.index(0, 4)); break;
                case oracle::Kind::Binary: v = rng.coin(0.4) ? 1.0 : 0.0; break;
                case oracle::Kind::Numerical: v = rng.uniform(-3.0, 10.0); break;
            }
            m.x[i][k] = rng.coin(0.05) ? NAN : v;
        }
    return m;
}

double weight_of(const std::string& mode) { return mode == "Targets" ? 1.3 : mode == "Weapons" ? 0.4 : 2.0; }

ModeWeights weights_map() { return {{"Targets", 1.3}, {"Weapons", 0.4}, {"Regions", 2.0}}; }

}  // namespace

TEST_CASE("variable similarity examples") {
    VariableSpec bin;
    bin.kind = VariableKind::Binary;
    auto s = variable_similarity(1.0, 1.0, bin);
    CHECK(s.similarity == 1.0);
    CHECK(s.comparable);
    s = variable_similarity(1.0, std::nullopt, bin);
    CHECK(s.similarity == 0.0);
    CHECK_FALSE(s.comparable);
    CHECK(variable_similarity(0.0, 0.0, bin).comparable);
    CHECK_FALSE(variable_similarity(0.0, 0.0, bin, {true}).comparable);

    VariableSpec num;
    num.kind = VariableKind::Numerical;
    num.min = 0.0;
    num.range = 10.0;
    s = variable_similarity(2.0, 5.0, num);
    CHECK(s.similarity == doctest::Approx(0.7));
    CHECK(s.comparable);
    CHECK_THROWS_AS(variable_similarity(2.0, 11.0, num), ValidationError);
    num.range = 0.0;
    CHECK_THROWS_AS(variable_similarity(2.0, 2.0, num), ValidationError);

    VariableSpec cat;
    cat.kind = VariableKind::Categorical;
    CHECK(variable_similarity(3.0, 4.0, cat).similarity == 0.0);
    CHECK(variable_similarity(3.0, 3.0, cat).similarity == 1.0);
}

TEST_CASE("hand-evaluated weighted pair") {
    std::vector<VariableSpec> specs = {{"m1", "a", VariableKind::Binary, 0, 0},
                                       {"m1", "b", VariableKind::Binary, 0, 0},
                                       {"m2", "a", VariableKind::Binary, 0, 0}};
    Eigen::MatrixXd x(2, 3);
    x << 1, 0, 1, 1, 1, 0;
    const GowerTable t(specs, x);
    CHECK(gower_pair(0, 1, t, {{"m1", 1.0}, {"m2", 0.5}}) == doctest::Approx(0.4));
    CHECK(gower_pair(0, 0, t, {{"m1", 1.0}, {"m2", 0.5}}) == 1.0);
}

TEST_CASE("disjoint binary profiles score 0") {
    std::vector<VariableSpec> specs = {{"m", "a", VariableKind::Binary, 0, 0}, {"m", "b", VariableKind::Binary, 0, 0}};
    Eigen::MatrixXd x(2, 2);
    x << 1, 0, 0, 1;
    const GowerTable t(specs, x);
    CHECK(gower_pair(0, 1, t, {{"m", 1.0}}) == 0.0);
}

TEST_CASE("pairs with nothing comparable raise with the pair list") {
    std::vector<VariableSpec> specs = {{"m", "a", VariableKind::Binary, 0, 0}, {"m", "b", VariableKind::Binary, 0, 0}};
    Eigen::MatrixXd x(3, 2);
    x << 1, NAN, NAN, 0, 1, 1;
    const GowerTable t(specs, x);
    CHECK_THROWS_AS(gower_pair(0, 1, t, {{"m", 1.0}}), UndefinedPairError);
    try {
        affinity_from_table(t, {{"m", 1.0}}, WeightingScheme::Uniform);
        FAIL("expected UndefinedPairError");
    } catch (const UndefinedPairError& e) {
        REQUIRE(e.pairs().size() == 1);
        CHECK(e.pairs()[0] == std::make_pair<std::size_t, std::size_t>(0, 1));
    }
}

TEST_CASE("constant numerical variables are dropped") {
    std::vector<VariableSpec> specs = {{"m", "c", VariableKind::Numerical, 0, 0}, {"m", "b", VariableKind::Binary, 0, 0}};
    Eigen::MatrixXd x(2, 2);
    x << 4, 1, 4, 0;
    const GowerTable t(specs, x);
    CHECK(t.dropped_constant() == std::vector<std::string>{"m/c"});
    CHECK(gower_pair(0, 1, t, {{"m", 1.0}}) == 0.0);
}

TEST_CASE("affinity matches the naive oracle under both double-zero conventions") {
    oracle::Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = random_mixed(rng, 30, 25);
        const GowerTable t(m.specs, oracle::to_eigen(m.x));
        for (bool asym : {false, true}) {
            const auto ref = oracle::naive_gower(m.x, m.vars, weight_of, asym);
            const auto a = affinity_from_table(t, weights_map(), WeightingScheme::Custom, {asym}, 2);
            for (std::size_t i = 0; i < 30; ++i)
                for (std::size_t j = 0; j < 30; ++j) {
                    if (i == j) continue;
                    CHECK(std::abs(a(i, j) - ref[i][j]) < 1e-12);
                }
        }
    }
}

TEST_CASE("symmetry, range and diagonal") {
    oracle::Rng rng(22);
    const auto m = random_mixed(rng, 25, 30);
    const GowerTable t(m.specs, oracle::to_eigen(m.x));
    const auto a = affinity_from_table(t, weights_map(), WeightingScheme::Custom);
    for (std::size_t i = 0; i < 25; ++i) {
        CHECK(a(i, i) == 1.0);
        for (std::size_t j = 0; j < 25; ++j) {
            CHECK(a(i, j) == a(j, i));
            CHECK(a(i, j) >= 0.0);
            CHECK(a(i, j) <= 1.0);
            CHECK(gower_pair(i, j, t, weights_map()) == gower_pair(j, i, t, weights_map()));
        }
    }
}

TEST_CASE("scaling every mode weight leaves similarities unchanged") {
    oracle::Rng rng(23);
    const auto m = random_mixed(rng, 20, 20);
    const GowerTable t(m.specs, oracle::to_eigen(m.x));
    const auto base = affinity_from_table(t, weights_map(), WeightingScheme::Custom);
    for (double c : {0.25, 3.7, 1000.0}) {
        ModeWeights w = weights_map();
        for (auto& [k, v] : w) v *= c;
        const auto scaled = affinity_from_table(t, w, WeightingScheme::Custom);
        CHECK((scaled.values() - base.values()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("single-mode binary uniform case is simple matching") {
    oracle::Rng rng(24);
    const std::size_t n = 15, p = 12;
    std::vector<VariableSpec> specs;
    for (std::size_t k = 0; k < p; ++k) specs.push_back({"m", "v" + std::to_string(k), VariableKind::Binary, 0, 0});
    const auto x = oracle::random_incidence(rng, n, p, 0.5);
    const GowerTable t(specs, oracle::to_eigen(x));
    const auto a = affinity_from_table(t, {{"m", 1.0}}, WeightingScheme::Uniform);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t agree = 0;
            for (std::size_t k = 0; k < p; ++k) agree += x[i][k] == x[j][k];
            CHECK(std::abs(a(i, j) - static_cast<double>(agree) / static_cast<double>(p)) < 1e-15);
        }
}

TEST_CASE("affinity from a network") {
    Eigen::MatrixXd inc(2, 3);
    inc << 1, 0, 1, 1, 0, 1;
    const MultiPartiteNetwork same({{0, "a"}, {1, "b"}}, {ModeGraph("T", {"x", "y", "z"}, inc, false)});
    const auto a = affinity_matrix(same, WeightingScheme::Uniform);
    CHECK(a.values() == Eigen::MatrixXd::Ones(2, 2));

    oracle::Rng rng(25);
    std::vector<ModeGraph> modes;
    for (int m = 0; m < 3; ++m) {
        const auto x = oracle::random_incidence(rng, 12, 5, 0.4);
        modes.emplace_back("m" + std::to_string(m), std::vector<std::string>{"a", "b", "c", "d", "e"},
                           oracle::to_eigen(x), true);
    }
    std::vector<GroupId> groups;
    for (std::size_t i = 0; i < 12; ++i) groups.push_back({i, "g" + std::to_string(i)});
    const MultiPartiteNetwork net(groups, modes);
    AffinityOptions one, four;
    one.threads = 1;
    four.threads = 4;
    CHECK(affinity_matrix(net, WeightingScheme::Entropy, one) == affinity_matrix(net, WeightingScheme::Entropy, four));
    AffinityOptions equal;
    equal.custom_weights = ModeWeights{{"m0", 2.5}, {"m1", 2.5}, {"m2", 2.5}};
    const auto eq = affinity_matrix(net, WeightingScheme::Custom, equal);
    const auto uni = affinity_matrix(net, WeightingScheme::Uniform);
    CHECK((eq.values() - uni.values()).cwiseAbs().maxCoeff() < 1e-15);
}
