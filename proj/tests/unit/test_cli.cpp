#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "latent/cli/artifacts.hpp"
#include "latent/cli/commands.hpp"
#include "latent/cli/config.hpp"
#include "latent/similarity.hpp"
#include "support/oracles.hpp"

using namespace latent;
using namespace latent::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kData = fs::path(LATENT_SOURCE_DIR) / "tests" / "data";
const fs::path kGolden = fs::path(LATENT_SOURCE_DIR) / "tests" / "golden";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("latent-test-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "latent");
    return run(args);
}

void pipeline(const fs::path& out, const std::string& threads = "1") {
    const std::string cfg = (kData / "fixture.ini").string();
    for (std::vector<std::string> cmd : {std::vector<std::string>{"ingest"}, {"entropy"}, {"cluster", "--scheme", "uniform"},
                                          {"cluster", "--scheme", "entropy"}, {"report"}, {"temporal"}}) {
        cmd.insert(cmd.end(), {"--config", cfg, "--out", out.string(), "--threads", threads});
        REQUIRE(invoke(cmd) == 0);
    }
    REQUIRE(invoke({"compare", (out / "partition_uniform.tsv").string(), (out / "partition_entropy.tsv").string(),
                 (out / "ideology_partition.tsv").string(), "--out", out.string()}) == 0);
}

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(
        "[input]\nevents = e.csv\ndelimiter = tab\n[filter]\nyear_min = 2000\n[modes]\nB = weapon\nA = target\n"
        "[cluster]\nseed = 12\nnull_model = degree_preserving\n");
    const auto cfg = parse_config(in, "/base");
    CHECK(cfg.events_path == fs::path("/base/e.csv"));
    CHECK(cfg.delimiter == '\t');
    CHECK(cfg.filter.year_min == 2000);
    REQUIRE(cfg.modes.size() == 2);
    CHECK(cfg.modes[0].name == "B");
    CHECK(cfg.seed == 12u);
    CHECK(cfg.null_model == NullModel::DegreePreserving);

    std::istringstream bad_key("[filter]\nyear = 2000\n");
    CHECK_THROWS_AS(parse_config(bad_key), ValidationError);
    std::istringstream bad_section("[plots]\nx = 1\n");
    CHECK_THROWS_AS(parse_config(bad_section), ValidationError);
    std::istringstream bad_value("[similarity]\nuse_counts = maybe\n");
    CHECK_THROWS_AS(parse_config(bad_value), ValidationError);
}

TEST_CASE("stage digests ignore seed, threads and output location") {
    RunConfig a, b;
    b.seed = 5;
    b.threads = 8;
    b.out_dir = "/elsewhere";
    b.events_path = "/other/events.csv";
    for (auto s : {Stage::Ingest, Stage::Entropy, Stage::Cluster, Stage::Report, Stage::Temporal})
        CHECK(stage_digest(a, s) == stage_digest(b, s));
    b.restarts = 9;
    CHECK(stage_digest(a, Stage::Ingest) == stage_digest(b, Stage::Ingest));
    CHECK(stage_digest(a, Stage::Cluster) != stage_digest(b, Stage::Cluster));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("reals round-trip through their text form") {
    oracle::Rng rng(71);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, static_cast<double>(rng.index(0, 20)) - 10.0);
        CHECK(parse_real(format_real(v)) == v);
    }
    CHECK(escape_field("a\tb\\c\nd") == "a\\tb\\\\c\\nd");
    CHECK(unescape_field(escape_field("a\tb\\c\nd\r")) == "a\tb\\c\nd\r");
}

TEST_CASE("artifact round trips are lossless") {
    oracle::Rng rng(72);
    std::vector<GroupId> groups;
    for (std::size_t i = 0; i < 9; ++i) groups.push_back({i, "group\t" + std::to_string(i)});
    std::vector<ModeGraph> modes;
    for (int m = 0; m < 2; ++m) {
        auto x = oracle::random_incidence(rng, 9, 4, 0.5);
        for (auto& r : x)
            for (auto& v : r) v *= static_cast<double>(rng.index(1, 3));
        modes.emplace_back("m" + std::to_string(m), std::vector<std::string>{"a", "b c", "Unknown", "d"},
                           oracle::to_eigen(x), false);
    }
    Provenance prov;
    prov.source_digest = "abc";
    prov.year_min = 1997;
    prov.year_max = 2016;
    prov.n_events = 40;
    prov.filter = {50, 45, 44, 40, 9};
    const MultiPartiteNetwork net(groups, modes, prov);
    const ArtifactHeader h{"network", kFormatVersion, "d", {{"events", "e"}}, 3};
    const auto back = parse_artifact(render_header(h) + render_network(net), "network");
    CHECK(back.header.seed == 3u);
    CHECK(back.header.inputs == h.inputs);
    CHECK(parse_network(back.lines) == net);
    CHECK_THROWS_AS(parse_artifact(render_header(h) + render_network(net), "profiles"), ValidationError);

    std::vector<GroupProfile> profiles;
    for (const auto& g : groups) {
        GroupProfile p;
        p.group = g;
        p.n_events = rng.index(1, 50);
        p.success_share = rng.uniform();
        p.fatality_ratio = rng.uniform(0, 20);
        p.n_targeted_countries = 2;
        p.ideologies = IdeologySet{Ideology::FarLeft, Ideology::Religious};
        p.dominant_ideology = Ideology::Religious;
        profiles.push_back(p);
    }
    CHECK(parse_profiles(parse_artifact(render_header({"profiles"}) + render_profiles(profiles), "profiles").lines) ==
          profiles);

    const Partition part({0, 1, 1, 2, 0, 2, 1, 0, 0});
    const auto [p2, names] = parse_partition(parse_artifact(render_header({"partition"}) +
                                                                render_partition(part, groups), "partition").lines);
    CHECK(p2 == part);
    CHECK(names[3] == groups[3].name);

    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(9, 9);
    for (int i = 0; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j) m(i, j) = m(j, i) = rng.uniform();
    const AffinityMatrix aff(m, WeightingScheme::Entropy, {{"m0", 0.123456789}, {"m1", 2.0}});
    CHECK(parse_affinity(parse_artifact(render_header({"affinity"}) + render_affinity(aff), "affinity").lines) == aff);
    const auto bytes = encode_matrix(aff.values());
    CHECK(bytes.size() == 16 + 8 * 81);
    CHECK(bytes.substr(0, 8) == "LCMATRIX");
    CHECK(parse_affinity_binary(
              parse_artifact(render_header({"affinity-meta"}) + render_affinity_meta(aff), "affinity-meta").lines,
              bytes) == aff);

    std::vector<ModeEntropy> es(1);
    es[0].mode_name = "Targets";
    es[0].n_vertices = 4;
    es[0].eigenvalues = {0.0, 1.0, 1.0, 2.0};
    es[0].entropy = 1.0397207708399179;
    CHECK(parse_entropies(parse_artifact(render_header({"mode-entropy"}) + render_entropies(es), "mode-entropy").lines) ==
          es);
    const ModeWeights w = {{"Targets", 1.0397207708399179}, {"Weapons", 0.3}};
    CHECK(parse_weights(parse_artifact(render_header({"mode-weights"}) + render_weights({{"Targets", 1.0}}, w),
                                       "mode-weights").lines, WeightingScheme::Entropy) == w);

    LatentNetwork l;
    l.n_nodes = 3;
    l.best_k = 1;
    l.directed_edges = {{0, 1}, {1, 0}, {2, 1}};
    l.undirected_collapse = {{0, 1}, {1, 2}};
    l.edge_weights = {0.75, 0.5};
    l.partition = Partition({0, 0, 1});
    l.modularity_curve[1] = {1, 0.1, 0.05, 0.1 - 0.05, 2};
    CHECK(parse_latent(parse_artifact(render_header({"latent-network"}) + render_latent(l), "latent-network").lines) == l);
}

TEST_CASE("unsupported format versions are rejected") {
    ArtifactHeader h{"partition"};
    h.version = 2;
    CHECK_THROWS_AS(parse_artifact(render_header(h), "partition"), ValidationError);
}

TEST_CASE("fixture pipeline reproduces the committed goldens") {
    TempDir tmp("golden");
    pipeline(tmp.path);
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(kGolden)) {
        const auto name = entry.path().filename();
        CAPTURE(name.string());
        REQUIRE(fs::exists(tmp.path / name));
        CHECK(read_file(tmp.path / name) == read_file(entry.path()));
        ++compared;
    }
    CHECK(compared >= 20);
}

TEST_CASE("golden entropies and uniform affinities agree with the oracles") {
    const auto net = parse_network(read_artifact(kGolden / "network.txt", "network").lines);
    const auto es = parse_entropies(read_artifact(kGolden / "mode_entropy.txt", "mode-entropy").lines);
    REQUIRE(es.size() == net.modes().size());
    for (std::size_t m = 0; m < es.size(); ++m) {
        const auto& inc = net.modes()[m].incidence();
        oracle::Matrix rows(static_cast<std::size_t>(inc.rows()), std::vector<double>(static_cast<std::size_t>(inc.cols())));
        for (Eigen::Index i = 0; i < inc.rows(); ++i)
            for (Eigen::Index j = 0; j < inc.cols(); ++j) rows[i][j] = inc(i, j);
        CHECK(std::abs(es[m].entropy - oracle::bipartite_entropy(rows)) < 1e-8);
    }

    const auto aff = parse_affinity(read_artifact(kGolden / "affinity_uniform.txt", "affinity").lines);
    oracle::Matrix x(net.n_groups());
    std::vector<oracle::Variable> vars;
    for (const auto& mode : net.modes())
        for (std::size_t j = 0; j < mode.n_entities(); ++j) {
            vars.push_back({mode.mode_name(), oracle::Kind::Binary});
            for (std::size_t i = 0; i < net.n_groups(); ++i)
                x[i].push_back(mode.incidence()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0 ? 1.0 : 0.0);
        }
    const auto ref = oracle::naive_gower(x, vars, [](const std::string&) { return 1.0; }, false);
    for (std::size_t i = 0; i < net.n_groups(); ++i)
        for (std::size_t j = 0; j < net.n_groups(); ++j) CHECK(std::abs(aff(i, j) - ref[i][j]) < 1e-12);
}

TEST_CASE("compare puts 1 on the diagonal") {
    TempDir tmp("compare");
    const auto p = kGolden / "partition_uniform.tsv";
    REQUIRE(invoke({"compare", p.string(), p.string(), "--out", tmp.path.string()}) == 0);
    const auto a = read_artifact(tmp.path / "ami_matrix.tsv", "ami-matrix");
    REQUIRE(a.lines.size() == 3);
    CHECK(split_tabs(a.lines[1])[1] == "1");
    CHECK(split_tabs(a.lines[2])[2] == "1");
}

TEST_CASE("exit codes") {
    TempDir tmp("exit");
    const std::string cfg = (kData / "fixture.ini").string();
    CHECK(invoke({"ingest", "--config", cfg, "--out", tmp.path.string()}) == 0);
    std::ofstream(tmp.path / "noseed.ini") << "[input]\nevents = " << (kData / "events.csv").string() << "\n";
    CHECK(invoke({"cluster", "--config", (tmp.path / "noseed.ini").string(), "--out", tmp.path.string()}) == 1);
    std::ofstream(tmp.path / "missing.ini") << "[input]\nevents = nowhere.csv\n";
    CHECK(invoke({"ingest", "--config", (tmp.path / "missing.ini").string(), "--out", tmp.path.string()}) == 2);
    CHECK(invoke({"frobnicate"}) == 1);
    CHECK(invoke({"report", "--out", (tmp.path / "empty").string()}) == 1);

    const auto dir = tmp.path / "collide";
    fs::create_directories(dir);
    fs::copy_file(kData / "events.csv", dir / "network.txt");
    std::ofstream(dir / "collide.ini") << "[input]\nevents = network.txt\n[output]\ndir = .\n";
    CHECK(invoke({"ingest", "--config", (dir / "collide.ini").string()}) == 1);
    CHECK(read_file(dir / "network.txt") == read_file(kData / "events.csv"));
}

TEST_CASE("stale artifacts are detected") {
    TempDir tmp("stale");
    fs::copy_file(kData / "events.csv", tmp.path / "events.csv");
    std::ofstream(tmp.path / "run.ini") << "[input]\nevents = events.csv\n[cluster]\nseed = 1\nrestarts = 1\n";
    const std::string cfg = (tmp.path / "run.ini").string(), out = (tmp.path / "out").string();
    REQUIRE(invoke({"ingest", "--config", cfg, "--out", out}) == 0);
    REQUIRE(invoke({"cluster", "--config", cfg, "--out", out}) == 0);
    std::ofstream(tmp.path / "events.csv", std::ios::app) << "\n";
    CHECK(invoke({"cluster", "--config", cfg, "--out", out}) == 1);
    REQUIRE(invoke({"ingest", "--config", cfg, "--out", out}) == 0);
    std::ofstream(tmp.path / "run2.ini") << "[input]\nevents = events.csv\n[cluster]\nseed = 1\nrestarts = 2\n";
    CHECK(invoke({"report", "--config", (tmp.path / "run2.ini").string(), "--out", out}) == 1);
}

TEST_CASE("binary affinity output") {
    TempDir tmp("binary");
    const std::string cfg = (kData / "fixture.ini").string();
    REQUIRE(invoke({"ingest", "--config", cfg, "--out", tmp.path.string()}) == 0);
    REQUIRE(invoke({"cluster", "--config", cfg, "--out", tmp.path.string(), "--format", "binary"}) == 0);
    const auto meta = read_artifact(tmp.path / "affinity_uniform.meta", "affinity-meta");
    std::vector<std::string> body(meta.lines.begin(), meta.lines.end() - 1);
    const auto aff = parse_affinity_binary(body, read_file(tmp.path / "affinity_uniform.bin"));
    const auto text = parse_affinity(read_artifact(kGolden / "affinity_uniform.txt", "affinity").lines);
    CHECK(aff == text);
}
