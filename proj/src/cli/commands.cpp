#include "latent/cli/commands.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <mutex>

#include "latent/cli/artifacts.hpp"
#include "latent/parallel.hpp"
#include "latent/similarity.hpp"
#include "latent/simd/gower_kernels.hpp"
#include "latent/spectral_entropy.hpp"
#include "latent/temporal.hpp"

namespace latent::cli {

namespace fs = std::filesystem;

namespace {

void log(const std::string& msg) { std::cerr << "latent: " << msg << '\n'; }

constexpr std::string_view kNetwork = "network.txt";
constexpr std::string_view kProfiles = "profiles.tsv";
constexpr std::string_view kWeights = "mode_weights.txt";

std::string scheme_file(std::string_view stem, WeightingScheme s, std::string_view ext) {
    return std::string(stem) + "_" + std::string(scheme_name(s)) + std::string(ext);
}

// Memoized content digests; inputs can be large.
std::string digest_of(const fs::path& p) {
    static std::mutex mu;
    static std::map<std::pair<std::string, fs::file_time_type>, std::string> cache;
    const auto key = std::make_pair(fs::absolute(p).string(), fs::last_write_time(p));
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto d = file_sha256(p);
    std::lock_guard lock(mu);
    cache[key] = d;
    return d;
}

fs::path resolve_role(const RunConfig& cfg, const std::string& role) {
    if (role == "events") return cfg.events_path;
    if (role == "ideology") return cfg.ideology_path;
    return cfg.out_dir / role;
}

// Reads an upstream artifact and rejects it when its settings or inputs no
// longer match the current configuration.
Artifact load_upstream(const RunConfig& cfg, Stage producer, std::string_view file, std::string_view kind) {
    const fs::path path = cfg.out_dir / file;
    if (!fs::exists(path))
        throw ValidationError("missing artifact " + path.string() + "; run `latent " +
                              std::string(stage_name(producer)) + "` first");
    Artifact a = read_artifact(path, kind);
    if (a.header.config_digest != stage_digest(cfg, producer))
        throw ValidationError("stale artifact " + path.string() + ": produced under different settings; rerun `latent " +
                              std::string(stage_name(producer)) + "`");
    for (const auto& [role, digest] : a.header.inputs) {
        const fs::path in = resolve_role(cfg, role);
        if (in.empty() || !fs::exists(in) || digest_of(in) != digest)
            throw ValidationError("stale artifact " + path.string() + ": input '" + role + "' changed; rerun `latent " +
                                  std::string(stage_name(producer)) + "`");
    }
    return a;
}

fs::path normalized(const fs::path& p) { return fs::weakly_canonical(fs::absolute(p)); }

void check_collisions(const std::vector<fs::path>& outputs, const std::vector<fs::path>& inputs) {
    std::map<fs::path, fs::path> seen;
    for (const auto& in : inputs)
        if (!in.empty()) seen.emplace(normalized(in), in);
    for (const auto& out : outputs) {
        const auto n = normalized(out);
        if (auto it = seen.find(n); it != seen.end())
            throw ValidationError("path collision: output " + out.string() + " would overwrite " + it->second.string());
        seen.emplace(n, out);
    }
}

struct Writer {
    const RunConfig& cfg;
    ArtifactHeader base;

    void text(std::string_view file, std::string_view kind, const std::string& body) const {
        ArtifactHeader h = base;
        h.kind = std::string(kind);
        write_file(cfg.out_dir / file, render_header(h) + body);
    }
};

ArtifactHeader header_for(const RunConfig& cfg, Stage stage,
                          std::vector<std::pair<std::string, std::string>> inputs,
                          std::optional<std::uint64_t> seed = std::nullopt) {
    ArtifactHeader h;
    h.config_digest = stage_digest(cfg, stage);
    h.inputs = std::move(inputs);
    h.seed = seed;
    return h;
}

std::pair<std::string, std::string> upstream_input(const RunConfig& cfg, std::string_view file) {
    return {std::string(file), digest_of(cfg.out_dir / file)};
}

char delimiter_for(const fs::path& p, char fallback) {
    const auto ext = p.extension().string();
    if (ext == ".tsv" || ext == ".tab") return '\t';
    if (ext == ".csv") return ',';
    return fallback;
}

FilteredEvents load_filtered_events(const RunConfig& cfg, std::size_t* n_rejected = nullptr) {
    if (cfg.events_path.empty()) throw ValidationError("no events file configured ([input] events)");
    if (!fs::exists(cfg.events_path)) throw DataError("events file not found: " + cfg.events_path.string());
    const ParseResult parsed = parse_events(cfg.events_path, cfg.columns, cfg.delimiter);
    if (!parsed.rejects.empty())
        log(std::to_string(parsed.rejects.size()) + " malformed rows skipped (first at line " +
            std::to_string(parsed.rejects.front().line) + ": " + parsed.rejects.front().reason + ")");
    if (n_rejected) *n_rejected = parsed.rejects.size();
    return filter_events(parsed.events, cfg.filter);
}

}  // namespace

void cmd_ingest(const RunConfig& cfg) {
    std::vector<fs::path> outputs = {cfg.out_dir / kNetwork, cfg.out_dir / kProfiles, cfg.out_dir / "filter_report.txt"};
    if (!cfg.ideology_path.empty()) outputs.push_back(cfg.out_dir / "ideology_partition.tsv");
    check_collisions(outputs, {cfg.events_path, cfg.ideology_path});

    std::size_t n_rejected = 0;
    const FilteredEvents filtered = load_filtered_events(cfg, &n_rejected);
    const std::string events_digest = digest_of(cfg.events_path);
    Provenance prov;
    prov.source_digest = events_digest;
    prov.filter = filtered.report;
    prov.year_min = cfg.filter.year_min;
    prov.year_max = cfg.filter.year_max;
    const MultiPartiteNetwork net = build_multipartite(filtered.events, cfg.modes, prov);

    std::vector<std::pair<std::string, std::string>> inputs = {{"events", events_digest}};
    IdeologyMap ideologies;
    if (!cfg.ideology_path.empty()) {
        if (!fs::exists(cfg.ideology_path)) throw DataError("ideology map not found: " + cfg.ideology_path.string());
        ideologies = load_ideology_map(cfg.ideology_path, delimiter_for(cfg.ideology_path, ','));
        inputs.emplace_back("ideology", digest_of(cfg.ideology_path));
    }
    const auto profiles = derive_profiles(filtered.events, net.groups(), ideologies);

    const Writer w{cfg, header_for(cfg, Stage::Ingest, inputs)};
    w.text(kNetwork, "network", render_network(net));
    w.text(kProfiles, "profiles", render_profiles(profiles));
    w.text("filter_report.txt", "filter-report", render_filter_report(net.provenance().filter, n_rejected));
    if (!cfg.ideology_path.empty())
        w.text("ideology_partition.tsv", "partition",
               render_partition(ideology_heuristic_partition(profiles), net.groups()));
    log("ingest: " + std::to_string(filtered.report.n_after_year_filter) + " events, " +
        std::to_string(net.n_groups()) + " groups, " + std::to_string(net.modes().size()) + " modes");
}

void cmd_entropy(const RunConfig& cfg) {
    check_collisions({cfg.out_dir / "mode_entropy.txt", cfg.out_dir / kWeights}, {cfg.events_path, cfg.ideology_path});
    const Artifact a = load_upstream(cfg, Stage::Ingest, kNetwork, "network");
    const MultiPartiteNetwork net = parse_network(a.lines);
    const auto entropies = mode_entropies(net, cfg.use_counts, cfg.threads);
    const ModeWeights uniform = mode_weights(entropies, WeightingScheme::Uniform);
    std::optional<ModeWeights> entropy;
    try {
        entropy = mode_weights(entropies, WeightingScheme::Entropy);
    } catch (const DataError& e) {
        log(std::string("entropy weights unavailable: ") + e.what());
    }
    const Writer w{cfg, header_for(cfg, Stage::Entropy, {upstream_input(cfg, kNetwork)})};
    w.text("mode_entropy.txt", "mode-entropy", render_entropies(entropies));
    w.text(kWeights, "mode-weights", render_weights(uniform, entropy));
    for (const auto& e : entropies) log("entropy " + e.mode_name + " = " + format_real(e.entropy));
}

void cmd_cluster(const RunConfig& cfg, WeightingScheme scheme) {
    if (!cfg.seed) throw ValidationError("cluster requires a seed (--seed or [cluster] seed)");
    if (scheme == WeightingScheme::Custom) throw ValidationError("cluster supports the uniform and entropy schemes");
    const bool binary = cfg.format == OutputFormat::Binary;
    const std::string aff_file = scheme_file("affinity", scheme, binary ? ".bin" : ".txt");
    const std::string latent_file = scheme_file("latent", scheme, ".txt");
    const std::string part_file = scheme_file("partition", scheme, ".tsv");
    const std::string sweep_file = scheme_file("sweep", scheme, ".tsv");
    std::vector<fs::path> outputs = {cfg.out_dir / aff_file, cfg.out_dir / latent_file, cfg.out_dir / part_file,
                                     cfg.out_dir / sweep_file};
    if (binary) outputs.push_back(cfg.out_dir / scheme_file("affinity", scheme, ".meta"));
    check_collisions(outputs, {cfg.events_path, cfg.ideology_path});

    const Artifact a = load_upstream(cfg, Stage::Ingest, kNetwork, "network");
    const MultiPartiteNetwork net = parse_network(a.lines);
    std::vector<std::pair<std::string, std::string>> inputs = {upstream_input(cfg, kNetwork)};
    ModeWeights weights;
    if (scheme == WeightingScheme::Entropy) {
        const Artifact wa = load_upstream(cfg, Stage::Entropy, kWeights, "mode-weights");
        weights = parse_weights(wa.lines, WeightingScheme::Entropy);
        inputs.push_back(upstream_input(cfg, kWeights));
    } else {
        weights = mode_weights(net, WeightingScheme::Uniform);
    }

    GowerOptions gower;
    gower.asymmetric_binary = cfg.asymmetric_binary;
    const GowerTable table = variables_from_network(net, cfg.use_counts);
    const AffinityMatrix affinity = affinity_from_table(table, weights, scheme, gower, cfg.threads);

    SweepOptions sweep;
    sweep.seed = *cfg.seed;
    sweep.restarts = cfg.restarts;
    sweep.null_samples = cfg.null_samples;
    sweep.null_model = cfg.null_model;
    sweep.weighted = cfg.weighted;
    sweep.threads = cfg.threads;
    const LatentNetwork latent = knn_modularity_sweep(affinity, sweep);

    const Writer w{cfg, header_for(cfg, Stage::Cluster, inputs, cfg.seed)};
    if (binary) {
        const std::string bytes = encode_matrix(affinity.values());
        write_file(cfg.out_dir / aff_file, bytes);
        w.text(scheme_file("affinity", scheme, ".meta"), "affinity-meta",
               render_affinity_meta(affinity) + "data\t" + aff_file + "\t" + sha256_hex(bytes) + "\n");
    } else {
        w.text(aff_file, "affinity", render_affinity(affinity));
    }
    w.text(latent_file, "latent-network", render_latent(latent));
    w.text(part_file, "partition", render_partition(latent.partition, net.groups()));
    w.text(sweep_file, "sweep", render_sweep(latent));
    log(std::string(scheme_name(scheme)) + ": best k = " + std::to_string(latent.best_k) + ", " +
        std::to_string(latent.partition.n_clusters()) + " clusters, modularity " +
        format_real(latent.modularity_curve.at(latent.best_k).raw_modularity));
}

void cmd_compare(const std::vector<fs::path>& partitions, const fs::path& out_dir) {
    if (partitions.empty()) throw ValidationError("compare needs at least one partition file");
    const fs::path out = out_dir / "ami_matrix.tsv";
    check_collisions({out}, partitions);
    std::vector<Partition> parts;
    std::vector<std::string> names;
    std::vector<std::string> groups_ref;
    ArtifactHeader h;
    for (const auto& p : partitions) {
        const Artifact a = read_artifact(p, "partition");
        auto [part, groups] = parse_partition(a.lines);
        if (parts.empty())
            groups_ref = groups;
        else if (groups != groups_ref)
            throw ValidationError("partition " + p.string() + " covers a different group list");
        parts.push_back(std::move(part));
        names.push_back(p.stem().string());
        h.inputs.emplace_back(p.filename().string(), digest_of(p));
    }
    std::vector<std::vector<double>> ami(parts.size(), std::vector<double>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i; j < parts.size(); ++j)
            ami[i][j] = ami[j][i] = adjusted_mutual_information(parts[i], parts[j]);
    h.kind = "ami-matrix";
    write_file(out, render_header(h) + render_ami_matrix(names, ami));
}

void cmd_report(const RunConfig& cfg, std::vector<WeightingScheme> schemes) {
    const std::vector<WeightingScheme> all = {WeightingScheme::Uniform, WeightingScheme::Entropy};
    const bool explicit_schemes = !schemes.empty();
    if (!explicit_schemes)
        for (auto s : all)
            if (fs::exists(cfg.out_dir / scheme_file("latent", s, ".txt"))) schemes.push_back(s);
    if (schemes.empty()) throw ValidationError("no latent network found; run `latent cluster` first");

    std::vector<fs::path> outputs;
    for (auto s : schemes)
        for (const char* stem : {"stats", "node_metrics", "cluster_profiles", "correlations", "cluster_sizes"})
            outputs.push_back(cfg.out_dir / scheme_file(stem, s, std::string(stem) == "stats" ? ".txt" : ".tsv"));
    outputs.push_back(cfg.out_dir / "stability_mask.tsv");
    check_collisions(outputs, {cfg.events_path, cfg.ideology_path});

    const Artifact na = load_upstream(cfg, Stage::Ingest, kNetwork, "network");
    const MultiPartiteNetwork net = parse_network(na.lines);
    const auto profiles = parse_profiles(load_upstream(cfg, Stage::Ingest, kProfiles, "profiles").lines);
    if (profiles.size() != net.n_groups()) throw ValidationError("profiles and network differ in group count");

    std::map<WeightingScheme, CorrelationMatrix> correlations;
    std::map<WeightingScheme, std::pair<std::string, std::string>> latent_inputs;
    std::optional<std::uint64_t> seed;
    auto load_latent = [&](WeightingScheme s) {
        const std::string file = scheme_file("latent", s, ".txt");
        const Artifact la = load_upstream(cfg, Stage::Cluster, file, "latent-network");
        latent_inputs[s] = upstream_input(cfg, file);
        if (!seed) seed = la.header.seed;
        LatentNetwork l = parse_latent(la.lines);
        if (l.n_nodes != net.n_groups()) throw ValidationError(file + " does not match the network's group count");
        return l;
    };

    for (auto s : schemes) {
        const LatentNetwork latent = load_latent(s);
        const Writer w{cfg, header_for(cfg, Stage::Report,
                                       {upstream_input(cfg, kNetwork), upstream_input(cfg, kProfiles), latent_inputs[s]},
                                       seed)};
        w.text(scheme_file("stats", s, ".txt"), "network-stats", render_stats(network_statistics(latent, cfg.threads)));
        w.text(scheme_file("node_metrics", s, ".tsv"), "node-metrics",
               render_node_metrics(node_metrics(latent, cfg.threads), net.groups()));
        w.text(scheme_file("cluster_profiles", s, ".tsv"), "cluster-profiles",
               render_cluster_profiles(cluster_profile_table(latent.partition, profiles)));
        w.text(scheme_file("cluster_sizes", s, ".tsv"), "cluster-sizes", render_cluster_sizes(latent.partition));
        if (latent.partition.n_clusters() >= 3) {
            correlations[s] = cluster_profile_correlations(latent.partition, profiles, cfg.correlation);
            w.text(scheme_file("correlations", s, ".tsv"), "correlations", render_correlations(correlations[s]));
        } else {
            log(std::string(scheme_name(s)) + ": fewer than 3 clusters, correlations skipped");
        }
    }

    for (auto s : all)
        if (!correlations.contains(s) && fs::exists(cfg.out_dir / scheme_file("latent", s, ".txt"))) {
            const LatentNetwork latent = load_latent(s);
            if (latent.partition.n_clusters() >= 3)
                correlations[s] = cluster_profile_correlations(latent.partition, profiles, cfg.correlation);
        }
    if (correlations.size() == 2) {
        const Writer w{cfg, header_for(cfg, Stage::Report,
                                       {upstream_input(cfg, kNetwork), upstream_input(cfg, kProfiles),
                                        latent_inputs[WeightingScheme::Uniform],
                                        latent_inputs[WeightingScheme::Entropy]},
                                       seed)};
        w.text("stability_mask.tsv", "stability-mask",
               render_mask(stability_mask(correlations[WeightingScheme::Uniform],
                                          correlations[WeightingScheme::Entropy])));
    }
}

void cmd_temporal(const RunConfig& cfg) {
    check_collisions({cfg.out_dir / "entropy_series.tsv"}, {cfg.events_path, cfg.ideology_path});
    const FilteredEvents filtered = load_filtered_events(cfg);
    const auto slices = slice_by_year(filtered.events, {cfg.filter.year_min, cfg.filter.year_max}, cfg.modes,
                                      cfg.threads);
    const EntropySeries series = entropy_series(slices, cfg.use_counts, cfg.threads);
    const Writer w{cfg, header_for(cfg, Stage::Temporal, {{"events", digest_of(cfg.events_path)}})};
    w.text("entropy_series.tsv", "entropy-series", render_entropy_series(series));
    log("temporal: " + std::to_string(series.years.size()) + " yearly slices");
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Latent multi-partite network clustering of group behaviour"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out, scheme_text, format_text, simd = "auto";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed (u64)");
    auto* out_opt = app.add_option("--out", out, "Output directory");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads (0: all cores)");
    app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    auto* scheme_opt =
        app.add_option("--scheme", scheme_text, "Weighting scheme")->check(CLI::IsMember({"uniform", "entropy"}));
    auto* format_opt =
        app.add_option("--format", format_text, "Matrix output format")->check(CLI::IsMember({"text", "binary"}));
    app.add_option("--simd", simd, "Gower kernel selection")->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

    auto* ingest = app.add_subcommand("ingest", "Parse, filter and aggregate events into the multi-partite network");
    auto* entropy = app.add_subcommand("entropy", "Mode entropies and weights");
    auto* cluster = app.add_subcommand("cluster", "Affinity matrix, kNN sweep and partition");
    auto* compare = app.add_subcommand("compare", "AMI between partition files");
    std::vector<std::string> partition_paths;
    compare->add_option("partitions", partition_paths, "Partition files")->required()->check(CLI::ExistingFile);
    auto* report = app.add_subcommand("report", "Network statistics, node metrics and cluster-profile analyses");
    auto* temporal = app.add_subcommand("temporal", "Yearly mode-entropy series");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (*seed_opt) cfg.seed = seed;
        if (*out_opt) cfg.out_dir = out;
        if (*threads_opt) cfg.threads = threads;
        if (*format_opt) cfg.format = format_text == "binary" ? OutputFormat::Binary : OutputFormat::Text;
        cfg.threads = resolve_threads(cfg.threads);
        if (simd != "auto") {
            const simd::Isa isa = simd == "scalar" ? simd::Isa::Scalar
                                  : simd == "avx2" ? simd::Isa::Avx2
                                                   : simd::Isa::Neon;
            if (!simd::isa_available(isa)) throw ValidationError("requested SIMD kernels are not available: " + simd);
            simd::set_active_isa(isa);
        }
        const WeightingScheme scheme = *scheme_opt ? parse_scheme(scheme_text) : WeightingScheme::Uniform;

        if (*ingest) cmd_ingest(cfg);
        if (*entropy) cmd_entropy(cfg);
        if (*cluster) cmd_cluster(cfg, scheme);
        if (*compare) {
            std::vector<fs::path> paths(partition_paths.begin(), partition_paths.end());
            cmd_compare(paths, cfg.out_dir);
        }
        if (*report) cmd_report(cfg, *scheme_opt ? std::vector<WeightingScheme>{scheme} : std::vector<WeightingScheme>{});
        if (*temporal) cmd_temporal(cfg);
    } catch (const ValidationError& e) {
        log(std::string("error: ") + e.what());
        return 1;
    } catch (const DataError& e) {
        log(std::string("data error: ") + e.what());
        return 2;
    } catch (const fs::filesystem_error& e) {
        log(std::string("data error: ") + e.what());
        return 2;
    }
    return 0;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace latent::cli
