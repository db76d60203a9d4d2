#include "latent/cli/artifacts.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace latent::cli {

namespace {

constexpr std::string_view kMagic = "LCMATRIX";

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

[[noreturn]] void malformed(std::string_view what) {
    throw ValidationError("malformed artifact: " + std::string(what));
}

std::size_t parse_size(std::string_view text) {
    const auto v = parse_u64(text);
    return static_cast<std::size_t>(v);
}

std::string join_reals(const std::vector<double>& values, char sep = ' ') {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(sep);
        out += format_real(values[i]);
    }
    return out;
}

std::vector<double> split_reals(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find(' ', pos);
        if (end == std::string_view::npos) end = text.size();
        if (end > pos) out.push_back(parse_real(text.substr(pos, end - pos)));
        pos = end + 1;
    }
    return out;
}

std::vector<std::string> expect(const std::string& line, std::string_view tag, std::size_t n_fields) {
    auto f = split_tabs(line);
    if (f.empty() || f[0] != tag || f.size() != n_fields)
        malformed("expected '" + std::string(tag) + "' record, got '" + line + "'");
    return f;
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view s, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + i])) << (8 * i);
    return v;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : "NA"; }

std::string header_row(std::string_view first, const std::vector<std::string>& names) {
    std::string out(first);
    for (const auto& n : names) out += "\t" + n;
    return out + "\n";
}

}  // namespace

std::string render_header(const ArtifactHeader& h) {
    std::string out = "# latent-artifact: " + h.kind + "\n";
    out += "# format-version: " + std::to_string(h.version) + "\n";
    out += "# config-digest: " + (h.config_digest.empty() ? std::string("none") : h.config_digest) + "\n";
    for (const auto& [role, digest] : h.inputs) out += "# input: " + role + " " + digest + "\n";
    out += "# seed: " + (h.seed ? std::to_string(*h.seed) : std::string("none")) + "\n";
    return out;
}

Artifact parse_artifact(const std::string& text, std::string_view expected_kind) {
    Artifact a;
    std::istringstream in(text);
    std::string line;
    bool have_kind = false, have_version = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (starts_with(line, "# ")) {
            const std::string_view body = std::string_view(line).substr(2);
            const auto colon = body.find(": ");
            if (colon == std::string_view::npos) malformed("header line '" + line + "'");
            const std::string key(body.substr(0, colon));
            const std::string value(body.substr(colon + 2));
            if (key == "latent-artifact") {
                a.header.kind = value;
                have_kind = true;
            } else if (key == "format-version") {
                a.header.version = static_cast<int>(parse_u64(value));
                have_version = true;
            } else if (key == "config-digest") {
                a.header.config_digest = value == "none" ? "" : value;
            } else if (key == "input") {
                const auto sp = value.rfind(' ');
                if (sp == std::string::npos) malformed("input line '" + line + "'");
                a.header.inputs.emplace_back(value.substr(0, sp), value.substr(sp + 1));
            } else if (key == "seed") {
                if (value != "none") a.header.seed = parse_u64(value);
            }
            continue;
        }
        a.lines.push_back(line);
    }
    if (!have_kind || !have_version) malformed("missing artifact header");
    if (a.header.kind != expected_kind)
        throw ValidationError("artifact kind '" + a.header.kind + "' where '" + std::string(expected_kind) +
                              "' was expected");
    if (a.header.version != kFormatVersion)
        throw ValidationError("unsupported artifact format version " + std::to_string(a.header.version));
    return a;
}

Artifact read_artifact(const std::filesystem::path& path, std::string_view expected_kind) {
    if (!std::filesystem::exists(path)) throw ValidationError("missing artifact " + path.string());
    return parse_artifact(read_file(path), expected_kind);
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw DataError("cannot format real");
    return std::string(buf, ptr);
}

double parse_real(std::string_view text) {
    if (text == "nan") return std::nan("");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        malformed("real '" + std::string(text) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        malformed("integer '" + std::string(text) + "'");
    return v;
}

std::string escape_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\' || i + 1 == text.size()) {
            out.push_back(text[i]);
            continue;
        }
        const char n = text[++i];
        out.push_back(n == 't' ? '\t' : n == 'n' ? '\n' : n == 'r' ? '\r' : n);
    }
    return out;
}

std::vector<std::string> split_tabs(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto end = line.find('\t', pos);
        out.emplace_back(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
        if (end == std::string_view::npos) break;
        pos = end + 1;
    }
    return out;
}

// ---- network ----

std::string render_network(const MultiPartiteNetwork& net) {
    std::ostringstream s;
    const auto& p = net.provenance();
    s << "provenance\tsource_digest\t" << (p.source_digest.empty() ? "none" : p.source_digest) << '\n';
    s << "provenance\tyear_min\t" << p.year_min << '\n';
    s << "provenance\tyear_max\t" << p.year_max << '\n';
    s << "provenance\tn_events\t" << p.n_events << '\n';
    s << "filter\tn_raw\t" << p.filter.n_raw << '\n';
    s << "filter\tn_after_doubt_filter\t" << p.filter.n_after_doubt_filter << '\n';
    s << "filter\tn_after_unknown_removal\t" << p.filter.n_after_unknown_removal << '\n';
    s << "filter\tn_after_year_filter\t" << p.filter.n_after_year_filter << '\n';
    s << "filter\tn_groups\t" << p.filter.n_groups << '\n';
    s << "groups\t" << net.n_groups() << '\n';
    for (const auto& g : net.groups()) s << "group\t" << g.index << '\t' << escape_field(g.name) << '\n';
    s << "modes\t" << net.modes().size() << '\n';
    for (const auto& m : net.modes()) {
        s << "mode\t" << escape_field(m.mode_name()) << '\t' << m.n_entities() << '\t' << (m.binarized() ? 1 : 0)
          << '\n';
        for (std::size_t j = 0; j < m.n_entities(); ++j)
            s << "entity\t" << j << '\t' << escape_field(m.entity_labels()[j]) << '\n';
        for (std::size_t i = 0; i < m.n_groups(); ++i) {
            s << "row\t" << i << '\t';
            for (std::size_t j = 0; j < m.n_entities(); ++j) {
                if (j) s << ' ';
                s << format_real(m.incidence()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
            s << '\n';
        }
    }
    return s.str();
}

MultiPartiteNetwork parse_network(const std::vector<std::string>& body) {
    Provenance prov;
    std::size_t at = 0;
    auto next = [&]() -> const std::string& {
        if (at >= body.size()) malformed("network body ends early");
        return body[at++];
    };
    while (at < body.size() && (starts_with(body[at], "provenance\t") || starts_with(body[at], "filter\t"))) {
        const auto f = split_tabs(body[at++]);
        if (f.size() != 3) malformed("provenance record");
        const std::string& key = f[1];
        const std::string& val = f[2];
        if (f[0] == "provenance") {
            if (key == "source_digest")
                prov.source_digest = val == "none" ? "" : val;
            else if (key == "year_min")
                prov.year_min = std::stoi(val);
            else if (key == "year_max")
                prov.year_max = std::stoi(val);
            else if (key == "n_events")
                prov.n_events = parse_size(val);
        } else {
            const std::size_t v = parse_size(val);
            if (key == "n_raw") prov.filter.n_raw = v;
            if (key == "n_after_doubt_filter") prov.filter.n_after_doubt_filter = v;
            if (key == "n_after_unknown_removal") prov.filter.n_after_unknown_removal = v;
            if (key == "n_after_year_filter") prov.filter.n_after_year_filter = v;
            if (key == "n_groups") prov.filter.n_groups = v;
        }
    }
    const std::size_t n_groups = parse_size(expect(next(), "groups", 2)[1]);
    std::vector<GroupId> groups;
    for (std::size_t i = 0; i < n_groups; ++i) {
        const auto f = expect(next(), "group", 3);
        groups.push_back({parse_size(f[1]), unescape_field(f[2])});
    }
    const std::size_t n_modes = parse_size(expect(next(), "modes", 2)[1]);
    std::vector<ModeGraph> modes;
    for (std::size_t m = 0; m < n_modes; ++m) {
        const auto f = expect(next(), "mode", 4);
        const std::size_t n_entities = parse_size(f[2]);
        std::vector<std::string> labels;
        for (std::size_t j = 0; j < n_entities; ++j) labels.push_back(unescape_field(expect(next(), "entity", 3)[2]));
        Eigen::MatrixXd inc(static_cast<Eigen::Index>(n_groups), static_cast<Eigen::Index>(n_entities));
        for (std::size_t i = 0; i < n_groups; ++i) {
            const auto r = expect(next(), "row", 3);
            if (parse_size(r[1]) != i) malformed("row index out of order");
            const auto values = split_reals(r[2]);
            if (values.size() != n_entities) malformed("row width");
            for (std::size_t j = 0; j < n_entities; ++j)
                inc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[j];
        }
        modes.emplace_back(unescape_field(f[1]), std::move(labels), std::move(inc), f[3] == "1");
    }
    if (at != body.size()) malformed("trailing records in network");
    return MultiPartiteNetwork(std::move(groups), std::move(modes), std::move(prov));
}

// ---- profiles ----

namespace {
const char* kProfileHeader =
    "group_index\tgroup\tn_events\tsuccess_share\tsuicide_share\tmultiplot_share\tinternational_share\t"
    "fatality_ratio\tcasualty_ratio\tcasualty_missing_fraction\tn_targeted_countries\tideologies\tdominant";
}

std::string render_profiles(const std::vector<GroupProfile>& profiles) {
    std::ostringstream s;
    s << kProfileHeader << '\n';
    for (const auto& p : profiles) {
        std::string ideologies;
        for (auto i : p.ideologies.members()) {
            if (!ideologies.empty()) ideologies += ',';
            ideologies += ideology_name(i);
        }
        s << p.group.index << '\t' << escape_field(p.group.name) << '\t' << p.n_events << '\t'
          << format_real(p.success_share) << '\t' << format_real(p.suicide_share) << '\t'
          << format_real(p.multiplot_share) << '\t' << format_real(p.international_share) << '\t'
          << format_real(p.fatality_ratio) << '\t' << format_real(p.casualty_ratio) << '\t'
          << format_real(p.casualty_missing_fraction) << '\t' << p.n_targeted_countries << '\t' << ideologies << '\t'
          << ideology_name(p.dominant_ideology) << '\n';
    }
    return s.str();
}

std::vector<GroupProfile> parse_profiles(const std::vector<std::string>& body) {
    if (body.empty() || body[0] != kProfileHeader) malformed("profiles header");
    std::vector<GroupProfile> out;
    for (std::size_t r = 1; r < body.size(); ++r) {
        const auto f = split_tabs(body[r]);
        if (f.size() != 13) malformed("profiles row width");
        GroupProfile p;
        p.group = {parse_size(f[0]), unescape_field(f[1])};
        p.n_events = parse_size(f[2]);
        p.success_share = parse_real(f[3]);
        p.suicide_share = parse_real(f[4]);
        p.multiplot_share = parse_real(f[5]);
        p.international_share = parse_real(f[6]);
        p.fatality_ratio = parse_real(f[7]);
        p.casualty_ratio = parse_real(f[8]);
        p.casualty_missing_fraction = parse_real(f[9]);
        p.n_targeted_countries = parse_size(f[10]);
        p.ideologies = IdeologySet{};
        std::stringstream ss(f[11]);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto i = parse_ideology(item);
            if (!i) malformed("ideology '" + item + "'");
            p.ideologies.insert(*i);
        }
        const auto d = parse_ideology(f[12]);
        if (!d) malformed("dominant ideology '" + f[12] + "'");
        p.dominant_ideology = *d;
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

std::string render_filter_report(const FilterReport& r, std::size_t n_rejected_rows) {
    std::ostringstream s;
    s << "n_rejected_rows\t" << n_rejected_rows << '\n';
    s << "n_raw\t" << r.n_raw << '\n';
    s << "n_after_doubt_filter\t" << r.n_after_doubt_filter << '\n';
    s << "n_after_unknown_removal\t" << r.n_after_unknown_removal << '\n';
    s << "n_after_year_filter\t" << r.n_after_year_filter << '\n';
    s << "n_groups\t" << r.n_groups << '\n';
    return s.str();
}

// ---- partitions ----

std::string render_partition(const Partition& partition, const std::vector<GroupId>& groups) {
    if (groups.size() != partition.size()) throw ValidationError("partition and group list differ in length");
    std::ostringstream s;
    s << "group_index\tgroup\tcluster\n";
    for (std::size_t i = 0; i < groups.size(); ++i)
        s << groups[i].index << '\t' << escape_field(groups[i].name) << '\t' << partition[i] << '\n';
    return s.str();
}

std::pair<Partition, std::vector<std::string>> parse_partition(const std::vector<std::string>& body) {
    if (body.empty() || body[0] != "group_index\tgroup\tcluster") malformed("partition header");
    std::vector<std::size_t> labels;
    std::vector<std::string> names;
    for (std::size_t r = 1; r < body.size(); ++r) {
        const auto f = split_tabs(body[r]);
        if (f.size() != 3) malformed("partition row width");
        if (parse_size(f[0]) != r - 1) malformed("partition rows out of order");
        names.push_back(unescape_field(f[1]));
        labels.push_back(parse_size(f[2]));
    }
    return {Partition::from_raw_labels(labels), std::move(names)};
}

// ---- entropies and weights ----

std::string render_entropies(const std::vector<ModeEntropy>& entropies) {
    std::ostringstream s;
    for (const auto& e : entropies) {
        s << "mode\t" << escape_field(e.mode_name) << '\t' << e.n_vertices << '\t' << format_real(e.entropy) << '\n';
        s << "eigenvalues\t" << escape_field(e.mode_name) << '\t' << join_reals(e.eigenvalues) << '\n';
    }
    return s.str();
}

std::vector<ModeEntropy> parse_entropies(const std::vector<std::string>& body) {
    if (body.size() % 2 != 0) malformed("entropy body");
    std::vector<ModeEntropy> out;
    for (std::size_t r = 0; r < body.size(); r += 2) {
        const auto f = expect(body[r], "mode", 4);
        const auto e = expect(body[r + 1], "eigenvalues", 3);
        ModeEntropy m;
        m.mode_name = unescape_field(f[1]);
        m.n_vertices = parse_size(f[2]);
        m.entropy = parse_real(f[3]);
        m.eigenvalues = split_reals(e[2]);
        out.push_back(std::move(m));
    }
    return out;
}

std::string render_weights(const ModeWeights& uniform, const std::optional<ModeWeights>& entropy) {
    std::ostringstream s;
    s << "scheme\tmode\tweight\n";
    for (const auto& [m, w] : uniform) s << "uniform\t" << escape_field(m) << '\t' << format_real(w) << '\n';
    if (entropy)
        for (const auto& [m, w] : *entropy) s << "entropy\t" << escape_field(m) << '\t' << format_real(w) << '\n';
    return s.str();
}

ModeWeights parse_weights(const std::vector<std::string>& body, WeightingScheme scheme) {
    if (body.empty() || body[0] != "scheme\tmode\tweight") malformed("weights header");
    ModeWeights out;
    const std::string wanted(scheme_name(scheme));
    for (std::size_t r = 1; r < body.size(); ++r) {
        const auto f = split_tabs(body[r]);
        if (f.size() != 3) malformed("weights row width");
        if (f[0] == wanted) out[unescape_field(f[1])] = parse_real(f[2]);
    }
    if (out.empty()) throw DataError("no " + wanted + " weights recorded");
    return out;
}

// ---- affinity ----

namespace {
std::string affinity_preamble(const AffinityMatrix& a) {
    std::ostringstream s;
    s << "scheme\t" << scheme_name(a.scheme()) << '\n';
    for (const auto& [m, w] : a.mode_weights()) s << "weight\t" << escape_field(m) << '\t' << format_real(w) << '\n';
    s << "rows\t" << a.size() << '\n' << "cols\t" << a.size() << '\n';
    return s.str();
}

std::pair<WeightingScheme, ModeWeights> parse_preamble(const std::vector<std::string>& body, std::size_t& at,
                                                       std::size_t& n) {
    const auto scheme = parse_scheme(expect(body.at(at++), "scheme", 2)[1]);
    ModeWeights w;
    while (at < body.size() && starts_with(body[at], "weight\t")) {
        const auto f = expect(body[at++], "weight", 3);
        w[unescape_field(f[1])] = parse_real(f[2]);
    }
    if (at + 2 > body.size()) malformed("affinity dimensions");
    n = parse_size(expect(body[at++], "rows", 2)[1]);
    if (parse_size(expect(body[at++], "cols", 2)[1]) != n) malformed("affinity matrix is not square");
    return {scheme, std::move(w)};
}
}  // namespace

std::string render_affinity(const AffinityMatrix& a) {
    std::string out = affinity_preamble(a);
    std::vector<double> row(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) row[j] = a(i, j);
        out += "row\t" + std::to_string(i) + "\t" + join_reals(row) + "\n";
    }
    return out;
}

AffinityMatrix parse_affinity(const std::vector<std::string>& body) {
    std::size_t at = 0, n = 0;
    if (body.empty()) malformed("empty affinity");
    auto [scheme, w] = parse_preamble(body, at, n);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (at >= body.size()) malformed("affinity rows");
        const auto f = expect(body[at++], "row", 3);
        const auto v = split_reals(f[2]);
        if (v.size() != n) malformed("affinity row width");
        for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
    }
    return AffinityMatrix(std::move(m), scheme, std::move(w));
}

std::string render_affinity_meta(const AffinityMatrix& a) { return affinity_preamble(a); }

std::string encode_matrix(const Eigen::MatrixXd& m) {
    std::string out(kMagic);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    out.reserve(out.size() + 8 * static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const auto bits = std::bit_cast<std::uint64_t>(m(i, j));
            for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
        }
    return out;
}

Eigen::MatrixXd decode_matrix(std::string_view bytes) {
    if (bytes.size() < 16 || bytes.substr(0, 8) != kMagic) malformed("binary matrix header");
    const std::uint32_t rows = get_u32(bytes, 8), cols = get_u32(bytes, 12);
    if (bytes.size() != 16 + 8ull * rows * cols) malformed("binary matrix size");
    Eigen::MatrixXd m(rows, cols);
    std::size_t at = 16;
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + b])) << (8 * b);
            at += 8;
            m(i, j) = std::bit_cast<double>(bits);
        }
    return m;
}

AffinityMatrix parse_affinity_binary(const std::vector<std::string>& meta_body, std::string_view bytes) {
    std::size_t at = 0, n = 0;
    if (meta_body.empty()) malformed("empty affinity metadata");
    auto [scheme, w] = parse_preamble(meta_body, at, n);
    Eigen::MatrixXd m = decode_matrix(bytes);
    if (static_cast<std::size_t>(m.rows()) != n || static_cast<std::size_t>(m.cols()) != n)
        malformed("binary matrix dimensions disagree with metadata");
    return AffinityMatrix(std::move(m), scheme, std::move(w));
}

// ---- latent network ----

std::string render_latent(const LatentNetwork& l) {
    std::ostringstream s;
    s << "n_nodes\t" << l.n_nodes << '\n' << "best_k\t" << l.best_k << '\n';
    s << "arcs\t" << l.directed_edges.size() << '\n';
    for (const auto& a : l.directed_edges) s << "arc\t" << a.source << '\t' << a.target << '\n';
    s << "edges\t" << l.undirected_collapse.size() << '\n';
    for (std::size_t e = 0; e < l.undirected_collapse.size(); ++e)
        s << "edge\t" << l.undirected_collapse[e].source << '\t' << l.undirected_collapse[e].target << '\t'
          << format_real(l.edge_weights[e]) << '\n';
    s << "labels\t" << l.partition.size() << '\n';
    for (std::size_t i = 0; i < l.partition.size(); ++i) s << "label\t" << i << '\t' << l.partition[i] << '\n';
    for (const auto& [k, r] : l.modularity_curve)
        s << "sweep\t" << k << '\t' << format_real(r.raw_modularity) << '\t' << format_real(r.null_modularity) << '\t'
          << format_real(r.adjusted_modularity) << '\t' << r.n_clusters << '\n';
    return s.str();
}

LatentNetwork parse_latent(const std::vector<std::string>& body) {
    LatentNetwork l;
    std::size_t at = 0;
    auto next = [&]() -> const std::string& {
        if (at >= body.size()) malformed("latent body ends early");
        return body[at++];
    };
    l.n_nodes = parse_size(expect(next(), "n_nodes", 2)[1]);
    l.best_k = parse_size(expect(next(), "best_k", 2)[1]);
    const std::size_t n_arcs = parse_size(expect(next(), "arcs", 2)[1]);
    for (std::size_t i = 0; i < n_arcs; ++i) {
        const auto f = expect(next(), "arc", 3);
        l.directed_edges.push_back({static_cast<std::uint32_t>(parse_u64(f[1])),
                                    static_cast<std::uint32_t>(parse_u64(f[2]))});
    }
    const std::size_t n_edges = parse_size(expect(next(), "edges", 2)[1]);
    for (std::size_t i = 0; i < n_edges; ++i) {
        const auto f = expect(next(), "edge", 4);
        l.undirected_collapse.push_back({static_cast<std::uint32_t>(parse_u64(f[1])),
                                         static_cast<std::uint32_t>(parse_u64(f[2]))});
        l.edge_weights.push_back(parse_real(f[3]));
    }
    const std::size_t n_labels = parse_size(expect(next(), "labels", 2)[1]);
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < n_labels; ++i) labels.push_back(parse_size(expect(next(), "label", 3)[2]));
    l.partition = Partition(std::move(labels));
    while (at < body.size()) {
        const auto f = expect(next(), "sweep", 6);
        SweepRecord r;
        r.k = parse_size(f[1]);
        r.raw_modularity = parse_real(f[2]);
        r.null_modularity = parse_real(f[3]);
        r.adjusted_modularity = parse_real(f[4]);
        r.n_clusters = parse_size(f[5]);
        l.modularity_curve[r.k] = r;
    }
    l.validate();
    return l;
}

std::string render_sweep(const LatentNetwork& l) {
    std::ostringstream s;
    s << "k\traw_modularity\tnull_modularity\tadjusted_modularity\tn_clusters\tselected\n";
    for (const auto& [k, r] : l.modularity_curve)
        s << k << '\t' << format_real(r.raw_modularity) << '\t' << format_real(r.null_modularity) << '\t'
          << format_real(r.adjusted_modularity) << '\t' << r.n_clusters << '\t' << (k == l.best_k ? 1 : 0) << '\n';
    return s.str();
}

// ---- reports ----

std::string render_stats(const NetworkStats& st) {
    std::ostringstream s;
    s << "n_nodes\t" << st.n_nodes << '\n';
    s << "best_k\t" << st.best_k << '\n';
    s << "n_knn_arcs\t" << st.n_knn_arcs << '\n';
    s << "n_mutual_pairs\t" << st.n_mutual_pairs << '\n';
    s << "n_directed_links\t" << st.n_directed_links << '\n';
    s << "n_bidirectional_links\t" << st.n_bidirectional_links << '\n';
    s << "n_clusters\t" << st.n_clusters << '\n';
    s << "density\t" << format_real(st.density) << '\n';
    s << "clustering_coefficient\t" << format_real(st.clustering_coefficient) << '\n';
    s << "global_transitivity\t" << format_real(st.global_transitivity) << '\n';
    s << "betweenness_centralization\t" << format_real(st.betweenness_centralization) << '\n';
    s << "eigenvector_centralization\t" << format_real(st.eigenvector_centralization) << '\n';
    s << "degree_centralization\t" << format_real(st.degree_centralization) << '\n';
    s << "modularity\t" << format_real(st.modularity) << '\n';
    s << "connected\t" << (st.connected ? 1 : 0) << '\n';
    s << "eigenvector_converged\t" << (st.eigenvector_converged ? 1 : 0) << '\n';
    return s.str();
}

std::string render_node_metrics(const NodeMetrics& m, const std::vector<GroupId>& groups) {
    std::ostringstream s;
    s << "group_index\tgroup\ttotal_degree\tundirected_degree\tbetweenness\tlocal_clustering\tlog_total_degree\t"
         "log_betweenness\n";
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const double deg = static_cast<double>(m.total_degree[i]);
        // Zero betweenness is reported as 0.001 before taking the log.
        const double b = m.betweenness[i] > 0.0 ? m.betweenness[i] : 0.001;
        s << groups[i].index << '\t' << escape_field(groups[i].name) << '\t' << m.total_degree[i] << '\t'
          << m.undirected_degree[i] << '\t' << format_real(m.betweenness[i]) << '\t'
          << format_real(m.local_clustering[i]) << '\t' << format_real(deg > 0.0 ? std::log(deg) : std::log(0.001))
          << '\t' << format_real(std::log(b)) << '\n';
    }
    return s.str();
}

std::string render_cluster_profiles(const ClusterProfileTable& t) {
    std::string out = header_row("cluster\tsize", profile_aggregate_names());
    for (std::size_t c = 0; c < t.values.size(); ++c) {
        out += std::to_string(c) + "\t" + std::to_string(t.cluster_sizes[c]);
        for (double v : t.values[c]) out += "\t" + format_real(v);
        out += "\n";
    }
    return out;
}

std::string render_correlations(const CorrelationMatrix& m) {
    const auto& names = profile_aggregate_names();
    std::string out = header_row("aggregate", names);
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += names[i];
        for (const auto& v : m[i]) out += "\t" + format_optional(v);
        out += "\n";
    }
    return out;
}

std::string render_mask(const std::vector<std::vector<int>>& mask) {
    const auto& names = profile_aggregate_names();
    std::string out = header_row("aggregate", names);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out += names[i];
        for (int v : mask[i]) out += "\t" + std::to_string(v);
        out += "\n";
    }
    return out;
}

std::string render_cluster_sizes(const Partition& p) {
    std::string out = "cluster\tsize\n";
    const auto sizes = p.cluster_sizes();
    for (std::size_t c = 0; c < sizes.size(); ++c) out += std::to_string(c) + "\t" + std::to_string(sizes[c]) + "\n";
    return out;
}

std::string render_ami_matrix(const std::vector<std::string>& names, const std::vector<std::vector<double>>& ami) {
    std::vector<std::string> escaped;
    for (const auto& n : names) escaped.push_back(escape_field(n));
    std::string out = header_row("partition", escaped);
    for (std::size_t i = 0; i < ami.size(); ++i) {
        out += escaped[i];
        for (double v : ami[i]) out += "\t" + format_real(v);
        out += "\n";
    }
    return out;
}

std::string render_entropy_series(const EntropySeries& s) {
    std::string out = "year\tn_events\tn_active_groups";
    for (const auto& m : s.mode_names) out += "\t" + escape_field(m) + "_entropy\t" + escape_field(m) + "_empty";
    out += "\n";
    for (std::size_t t = 0; t < s.years.size(); ++t) {
        out += std::to_string(s.years[t]) + "\t" + std::to_string(s.n_events[t]) + "\t" +
               std::to_string(s.n_active_groups[t]);
        for (std::size_t m = 0; m < s.mode_names.size(); ++m)
            out += "\t" + format_real(s.entropy[m][t]) + "\t" + (s.empty[m][t] ? "1" : "0");
        out += "\n";
    }
    return out;
}

}  // namespace latent::cli
