#include "latent/cli/config.hpp"

#include <openssl/evp.h>

#include <array>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace latent::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string v = lower(trim(raw));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ValidationError("config key '" + key + "': expected a boolean, got '" + raw + "'");
}

template <class T>
T parse_integer(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ValidationError("config key '" + key + "': expected an integer, got '" + raw + "'");
    return out;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& raw) {
    std::filesystem::path p(trim(raw));
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

char parse_delimiter(const std::string& raw) {
    const std::string v = lower(trim(raw));
    if (v == "tab" || v == "\\t") return '\t';
    if (v == "comma" || v == ",") return ',';
    if (v == "semicolon" || v == ";") return ';';
    if (v.size() == 1) return v[0];
    throw ValidationError("config key 'input.delimiter': unsupported delimiter '" + raw + "'");
}

void require_keys(const pt::ptree& section, const std::string& name, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : section)
        if (!allowed.contains(key)) throw ValidationError("unknown config key '" + name + "." + key + "'");
}

}  // namespace

std::string_view null_model_name(NullModel model) {
    return model == NullModel::ErdosRenyi ? "erdos_renyi" : "degree_preserving";
}

NullModel parse_null_model(std::string_view text) {
    const std::string v = lower(trim(text));
    if (v == "erdos_renyi" || v == "gnm" || v == "er") return NullModel::ErdosRenyi;
    if (v == "degree_preserving" || v == "configuration") return NullModel::DegreePreserving;
    throw ValidationError("unknown null model '" + std::string(text) + "'");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    RunConfig cfg;
    static const std::set<std::string> sections = {"input",   "columns", "filter", "modes",
                                                   "similarity", "cluster", "output", "report"};
    for (const auto& [name, section] : tree) {
        if (!sections.contains(name)) throw ValidationError("unknown config section '" + name + "'");
        const std::string sec = name;
        if (sec == "input") {
            require_keys(section, sec, {"events", "ideology", "delimiter"});
            if (auto v = section.get_optional<std::string>("events")) cfg.events_path = resolve(base_dir, *v);
            if (auto v = section.get_optional<std::string>("ideology")) cfg.ideology_path = resolve(base_dir, *v);
            if (auto v = section.get_optional<std::string>("delimiter")) cfg.delimiter = parse_delimiter(*v);
        } else if (sec == "columns") {
            for (const auto& [key, value] : section) {
                auto headers = split_list(value.data());
                if (headers.empty()) throw ValidationError("config key 'columns." + key + "' lists no header");
                cfg.columns.columns[key] = std::move(headers);
            }
        } else if (sec == "filter") {
            require_keys(section, sec, {"year_min", "year_max", "exclude_doubtful", "exclude_unknown"});
            for (const auto& [key, value] : section) {
                const std::string full = "filter." + key;
                if (key == "year_min") cfg.filter.year_min = parse_integer<int>(full, value.data());
                if (key == "year_max") cfg.filter.year_max = parse_integer<int>(full, value.data());
                if (key == "exclude_doubtful") cfg.filter.exclude_doubtful = parse_bool(full, value.data());
                if (key == "exclude_unknown") cfg.filter.exclude_unknown = parse_bool(full, value.data());
            }
            if (cfg.filter.year_max < cfg.filter.year_min) throw ValidationError("filter.year_max < filter.year_min");
        } else if (sec == "modes") {
            cfg.modes.clear();
            for (const auto& [key, value] : section) {
                const std::string field = trim(value.data());
                if (field.empty()) throw ValidationError("config key 'modes." + key + "' names no field");
                cfg.modes.push_back({key, field});
            }
            if (cfg.modes.empty()) throw ValidationError("config section 'modes' is empty");
        } else if (sec == "similarity") {
            require_keys(section, sec, {"use_counts", "asymmetric_binary"});
            for (const auto& [key, value] : section) {
                if (key == "use_counts") cfg.use_counts = parse_bool("similarity." + key, value.data());
                if (key == "asymmetric_binary") cfg.asymmetric_binary = parse_bool("similarity." + key, value.data());
            }
        } else if (sec == "cluster") {
            require_keys(section, sec, {"seed", "restarts", "null_samples", "null_model", "weighted"});
            for (const auto& [key, value] : section) {
                const std::string full = "cluster." + key;
                if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(full, value.data());
                if (key == "restarts") cfg.restarts = parse_integer<std::size_t>(full, value.data());
                if (key == "null_samples") cfg.null_samples = parse_integer<std::size_t>(full, value.data());
                if (key == "null_model") cfg.null_model = parse_null_model(value.data());
                if (key == "weighted") cfg.weighted = parse_bool(full, value.data());
            }
            if (cfg.restarts == 0) throw ValidationError("cluster.restarts must be positive");
            if (cfg.null_samples == 0) throw ValidationError("cluster.null_samples must be positive");
        } else if (sec == "output") {
            require_keys(section, sec, {"dir", "format"});
            if (auto v = section.get_optional<std::string>("dir")) cfg.out_dir = resolve(base_dir, *v);
            if (auto v = section.get_optional<std::string>("format")) {
                const std::string f = lower(trim(*v));
                if (f == "text")
                    cfg.format = OutputFormat::Text;
                else if (f == "binary")
                    cfg.format = OutputFormat::Binary;
                else
                    throw ValidationError("output.format must be text or binary");
            }
        } else if (sec == "report") {
            require_keys(section, sec, {"correlation"});
            if (auto v = section.get_optional<std::string>("correlation")) {
                const std::string c = lower(trim(*v));
                if (c == "pearson")
                    cfg.correlation = CorrelationMethod::Pearson;
                else if (c == "spearman")
                    cfg.correlation = CorrelationMethod::Spearman;
                else
                    throw ValidationError("report.correlation must be pearson or spearman");
            }
        }
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    return parse_config(in, path.parent_path());
}

std::string_view stage_name(Stage stage) {
    switch (stage) {
        case Stage::Ingest: return "ingest";
        case Stage::Entropy: return "entropy";
        case Stage::Cluster: return "cluster";
        case Stage::Report: return "report";
        case Stage::Temporal: return "temporal";
    }
    return "?";
}

std::string stage_digest(const RunConfig& c, Stage stage) {
    std::ostringstream s;
    s << "stage=" << stage_name(stage) << '\n';
    s << "delimiter=" << static_cast<int>(c.delimiter) << '\n';
    for (const auto& [logical, headers] : c.columns.columns) {
        s << "column." << logical << '=';
        for (const auto& h : headers) s << h << ',';
        s << '\n';
    }
    s << "filter=" << c.filter.year_min << ',' << c.filter.year_max << ',' << c.filter.exclude_doubtful << ','
      << c.filter.exclude_unknown << '\n';
    for (const auto& m : c.modes) s << "mode=" << m.name << ':' << m.field << '\n';
    if (stage != Stage::Ingest) s << "use_counts=" << c.use_counts << '\n';
    if (stage == Stage::Cluster || stage == Stage::Report) {
        s << "asymmetric_binary=" << c.asymmetric_binary << '\n';
        s << "restarts=" << c.restarts << '\n';
        s << "null_samples=" << c.null_samples << '\n';
        s << "null_model=" << null_model_name(c.null_model) << '\n';
        s << "weighted=" << c.weighted << '\n';
    }
    if (stage == Stage::Report)
        s << "correlation=" << (c.correlation == CorrelationMethod::Pearson ? "pearson" : "spearman") << '\n';
    return sha256_hex(s.str());
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw DataError("SHA-256 computation failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xF]);
    }
    return out;
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

}  // namespace latent::cli
