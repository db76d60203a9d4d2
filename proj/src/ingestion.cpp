#include "latent/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace latent {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<long long> parse_int(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    long long v = 0;
    const char* first = t.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        // GTD exports sometimes write integral columns as "1.0".
        double d = 0.0;
        auto [p2, e2] = std::from_chars(first, t.data() + t.size(), d);
        if (e2 != std::errc() || p2 != t.data() + t.size() || d != std::floor(d)) throw std::invalid_argument(t);
        return static_cast<long long>(d);
    }
    return v;
}

std::optional<double> parse_real(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
    return v;
}

// GTD flags: 1 = yes, 0 = no, -9 = unknown. Only 1 counts as set.
bool parse_flag(std::string_view s) {
    const auto v = parse_int(s);
    return v && *v == 1;
}

const std::set<std::string>& fixed_columns() {
    static const std::set<std::string> cols = {"event_id", "year",    "perpetrator", "doubt",
                                               "success",  "suicide", "multiple",    "international",
                                               "killed",   "wounded"};
    return cols;
}

}  // namespace

CsvReader::CsvReader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

bool CsvReader::next(std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    if (in_.peek() == std::char_traits<char>::eof()) return false;
    line = line_;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    char c = 0;
    if (first_) {
        first_ = false;
        if (in_.peek() == 0xEF) {
            char bom[3];
            in_.read(bom, 3);
            if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
                field.append(bom, 3);
                field_started = true;
            }
        }
    }
    while (in_.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter_) {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\r') {
            if (in_.peek() == '\n') continue;
            ++line_;
            break;
        } else if (c == '\n') {
            ++line_;
            break;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    fields.push_back(std::move(field));
    return true;
}

ColumnMapping ColumnMapping::gtd_defaults() {
    ColumnMapping m;
    m.columns = {
        {"event_id", {"eventid"}},
        {"year", {"iyear"}},
        {"perpetrator", {"gname"}},
        {"doubt", {"doubtterr"}},
        {"target", {"targtype1_txt", "targtype2_txt", "targtype3_txt"}},
        {"weapon", {"weaptype1_txt", "weaptype2_txt", "weaptype3_txt", "weaptype4_txt"}},
        {"tactic", {"attacktype1_txt", "attacktype2_txt", "attacktype3_txt"}},
        {"region", {"region_txt"}},
        {"country", {"country_txt"}},
        {"success", {"success"}},
        {"suicide", {"suicide"}},
        {"multiple", {"multiple"}},
        {"international", {"INT_ANY"}},
        {"killed", {"nkill"}},
        {"wounded", {"nwound"}},
    };
    return m;
}

const std::vector<std::string>& required_logical_columns() {
    static const std::vector<std::string> cols = {
        "event_id", "year",    "perpetrator", "doubt",    "target",        "weapon", "tactic", "region",
        "country",  "success", "suicide",     "multiple", "international", "killed", "wounded"};
    return cols;
}

ParseResult parse_events(std::istream& in, const ColumnMapping& schema, char delimiter) {
    for (const auto& req : required_logical_columns()) {
        const auto it = schema.columns.find(req);
        if (it == schema.columns.end() || it->second.empty())
            throw ValidationError("column mapping lacks logical column '" + req + "'");
    }

    CsvReader reader(in, delimiter);
    std::vector<std::string> row;
    std::size_t line = 0;
    if (!reader.next(row, line)) throw DataError("event file is empty (no header row)");

    std::unordered_map<std::string, std::size_t> header_index;
    for (std::size_t i = 0; i < row.size(); ++i) header_index.emplace(trim(row[i]), i);

    std::map<std::string, std::vector<std::size_t>> resolved;
    for (const auto& [logical, headers] : schema.columns) {
        auto& idx = resolved[logical];
        for (const auto& h : headers) {
            const auto it = header_index.find(h);
            if (it == header_index.end())
                throw DataError("mapped column '" + h + "' (logical '" + logical + "') not in header");
            idx.push_back(it->second);
        }
    }
    auto cell = [&](const std::vector<std::string>& r, std::size_t idx) -> std::string_view {
        return idx < r.size() ? std::string_view(r[idx]) : std::string_view();
    };
    auto first = [&](const std::vector<std::string>& r, const std::string& logical) {
        return cell(r, resolved.at(logical).front());
    };

    ParseResult result;
    std::size_t n_rows = 0;
    while (reader.next(row, line)) {
        if (row.size() == 1 && trim(row[0]).empty()) continue;
        ++n_rows;
        try {
            EventRecord ev;
            ev.event_id = trim(first(row, "event_id"));
            if (ev.event_id.empty()) throw std::invalid_argument("empty event id");
            const auto year = parse_int(first(row, "year"));
            if (!year) throw std::invalid_argument("empty year");
            ev.year = static_cast<int>(*year);
            ev.perpetrator = canonical_name(first(row, "perpetrator"));
            if (ev.perpetrator.empty()) throw std::invalid_argument("empty perpetrator name");
            ev.doubtful = parse_flag(first(row, "doubt"));
            ev.success = parse_flag(first(row, "success"));
            ev.suicide = parse_flag(first(row, "suicide"));
            ev.multiple = parse_flag(first(row, "multiple"));
            ev.international = parse_flag(first(row, "international"));
            ev.killed = parse_real(first(row, "killed"));
            ev.wounded = parse_real(first(row, "wounded"));
            if ((ev.killed && *ev.killed < 0) || (ev.wounded && *ev.wounded < 0))
                throw std::invalid_argument("negative victim count");
            ev.country = trim(first(row, "country"));
            if (ev.country.empty()) throw std::invalid_argument("empty country");
            for (const auto& [logical, idxs] : resolved) {
                if (fixed_columns().contains(logical)) continue;
                auto& values = ev.fields[logical];
                for (auto idx : idxs) {
                    std::string v = trim(cell(row, idx));
                    if (!v.empty() && v != "." && std::find(values.begin(), values.end(), v) == values.end())
                        values.push_back(std::move(v));
                }
            }
            result.events.push_back(std::move(ev));
        } catch (const std::invalid_argument& e) {
            result.rejects.push_back({line, std::string("unparseable mandatory field: ") + e.what()});
        }
    }

    if (n_rows > 0 && static_cast<double>(result.rejects.size()) > kMaxRejectRate * static_cast<double>(n_rows)) {
        std::ostringstream msg;
        msg << "reject rate " << result.rejects.size() << "/" << n_rows << " exceeds 5%; first rejects:";
        for (std::size_t i = 0; i < std::min<std::size_t>(5, result.rejects.size()); ++i)
            msg << " [line " << result.rejects[i].line << ": " << result.rejects[i].reason << "]";
        throw DataError(msg.str());
    }
    return result;
}

ParseResult parse_events(const std::filesystem::path& path, const ColumnMapping& schema, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open event file '" + path.string() + "'");
    return parse_events(in, schema, delimiter);
}

FilteredEvents filter_events(const std::vector<EventRecord>& events, const FilterPolicy& policy) {
    if (policy.year_min > policy.year_max) throw ValidationError("filter year window is empty");
    FilteredEvents out;
    out.report.n_raw = events.size();
    std::size_t after_doubt = 0, after_unknown = 0;
    std::set<std::string> groups;
    for (const auto& ev : events) {
        if (policy.exclude_doubtful && ev.doubtful) continue;
        ++after_doubt;
        if (policy.exclude_unknown && ev.perpetrator == "unknown") continue;
        ++after_unknown;
        if (ev.year < policy.year_min || ev.year > policy.year_max) continue;
        out.events.push_back(ev);
        groups.insert(ev.perpetrator);
    }
    out.report.n_after_doubt_filter = after_doubt;
    out.report.n_after_unknown_removal = after_unknown;
    out.report.n_after_year_filter = out.events.size();
    out.report.n_groups = groups.size();
    if (out.events.empty()) throw DataError("no events survive the filters");
    return out;
}

ModeConfig default_modes() {
    return {{"Targets", "target"}, {"Weapons", "weapon"}, {"Tactics", "tactic"}, {"Regions", "region"}};
}

MultiPartiteNetwork build_multipartite(const std::vector<EventRecord>& events, const ModeConfig& modes,
                                       Provenance provenance) {
    std::set<std::string> group_names;
    for (const auto& ev : events) group_names.insert(ev.perpetrator);
    std::vector<GroupId> groups;
    std::unordered_map<std::string, std::size_t> group_index;
    for (const auto& name : group_names) {
        group_index.emplace(name, groups.size());
        groups.push_back({groups.size(), name});
    }

    std::vector<ModeGraph> graphs;
    for (const auto& spec : modes) {
        auto field_of = [&](const EventRecord& ev) -> const std::vector<std::string>& {
            const auto it = ev.fields.find(spec.field);
            if (it == ev.fields.end())
                throw ValidationError("mode '" + spec.name + "' field '" + spec.field + "' absent from records");
            return it->second;
        };
        std::set<std::string> labels;
        for (const auto& ev : events)
            for (const auto& v : field_of(ev)) labels.insert(v);
        std::vector<std::string> entity_labels(labels.begin(), labels.end());
        std::unordered_map<std::string, Eigen::Index> entity_index;
        for (std::size_t i = 0; i < entity_labels.size(); ++i)
            entity_index.emplace(entity_labels[i], static_cast<Eigen::Index>(i));

        Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups.size()),
                                                       static_cast<Eigen::Index>(entity_labels.size()));
        for (const auto& ev : events) {
            const auto g = static_cast<Eigen::Index>(group_index.at(ev.perpetrator));
            for (const auto& v : field_of(ev)) counts(g, entity_index.at(v)) += 1.0;
        }
        graphs.emplace_back(spec.name, std::move(entity_labels), std::move(counts), false);
    }
    provenance.n_events = events.size();
    provenance.filter.n_groups = groups.size();
    return MultiPartiteNetwork(std::move(groups), std::move(graphs), std::move(provenance));
}

IdeologyMap load_ideology_map(std::istream& in, char delimiter) {
    CsvReader reader(in, delimiter);
    std::vector<std::string> row;
    std::size_t line = 0;
    if (!reader.next(row, line)) throw DataError("ideology map is empty");
    if (row.size() < 2) throw DataError("ideology map needs a group column and at least one category column");

    std::vector<std::optional<Ideology>> column_category(row.size());
    std::optional<std::size_t> dominant_col;
    for (std::size_t i = 1; i < row.size(); ++i) {
        const std::string name = trim(row[i]);
        if (canonical_name(name) == "dominant") {
            dominant_col = i;
            continue;
        }
        column_category[i] = parse_ideology(name);
        if (!column_category[i]) throw DataError("unknown ideology category '" + name + "'");
    }

    IdeologyMap out;
    while (reader.next(row, line)) {
        if (row.size() == 1 && trim(row[0]).empty()) continue;
        const std::string group = canonical_name(row[0]);
        if (group.empty()) throw DataError("ideology map line " + std::to_string(line) + ": empty group name");
        IdeologyAssignment a;
        for (std::size_t i = 1; i < row.size() && i < column_category.size(); ++i) {
            if (!column_category[i]) continue;
            std::optional<long long> flag;
            try {
                flag = parse_int(row[i]);
            } catch (const std::invalid_argument&) {
                throw DataError("ideology map line " + std::to_string(line) + ": flag is not 0/1");
            }
            if (flag && *flag != 0 && *flag != 1)
                throw DataError("ideology map line " + std::to_string(line) + ": flag is not 0/1");
            if (flag && *flag == 1) a.ideologies.insert(*column_category[i]);
        }
        if (a.ideologies.empty())
            throw DataError("group '" + group + "' is mapped to zero ideology categories");
        if (a.ideologies.size() > 3) throw DataError("group '" + group + "' is mapped to more than 3 categories");
        a.dominant = a.ideologies.members().front();
        if (dominant_col && *dominant_col < row.size() && !trim(row[*dominant_col]).empty()) {
            const auto d = parse_ideology(row[*dominant_col]);
            if (!d) throw DataError("unknown dominant ideology '" + row[*dominant_col] + "'");
            if (!a.ideologies.contains(*d))
                throw DataError("dominant ideology of '" + group + "' is not among its flagged categories");
            a.dominant = *d;
        }
        if (!out.emplace(group, a).second) throw DataError("group '" + group + "' appears twice in ideology map");
    }
    return out;
}

IdeologyMap load_ideology_map(const std::filesystem::path& path, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open ideology map '" + path.string() + "'");
    return load_ideology_map(in, delimiter);
}

std::vector<GroupProfile> derive_profiles(const std::vector<EventRecord>& events, const std::vector<GroupId>& groups,
                                          const IdeologyMap& ideologies) {
    struct Acc {
        std::size_t n = 0, success = 0, suicide = 0, multiple = 0, international = 0, casualty_missing = 0;
        double killed = 0.0, casualties = 0.0;
        std::set<std::string> countries;
    };
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& g : groups) index.emplace(g.name, g.index);
    std::vector<Acc> acc(groups.size());
    for (const auto& ev : events) {
        const auto it = index.find(ev.perpetrator);
        if (it == index.end()) throw ValidationError("event perpetrator '" + ev.perpetrator + "' is not registered");
        Acc& a = acc[it->second];
        ++a.n;
        a.success += ev.success;
        a.suicide += ev.suicide;
        a.multiple += ev.multiple;
        a.international += ev.international;
        if (!ev.killed || !ev.wounded) ++a.casualty_missing;
        a.killed += ev.killed.value_or(0.0);
        a.casualties += ev.killed.value_or(0.0) + ev.wounded.value_or(0.0);
        a.countries.insert(ev.country);
    }

    std::vector<GroupProfile> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        const Acc& a = acc[g.index];
        if (a.n == 0) throw ValidationError("group '" + g.name + "' has zero events");
        const double n = static_cast<double>(a.n);
        GroupProfile p;
        p.group = g;
        p.n_events = a.n;
        p.success_share = static_cast<double>(a.success) / n;
        p.suicide_share = static_cast<double>(a.suicide) / n;
        p.multiplot_share = static_cast<double>(a.multiple) / n;
        p.international_share = static_cast<double>(a.international) / n;
        p.fatality_ratio = a.killed / n;
        p.casualty_ratio = a.casualties / n;
        p.casualty_missing_fraction = static_cast<double>(a.casualty_missing) / n;
        p.n_targeted_countries = a.countries.size();
        if (const auto it = ideologies.find(g.name); it != ideologies.end()) {
            p.ideologies = it->second.ideologies;
            p.dominant_ideology = it->second.dominant;
        }
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace latent
