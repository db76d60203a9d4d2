#pragma once

// Event-file parsing, filtering and aggregation into the multi-partite network.

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "latent/core_model.hpp"

namespace latent {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF.
class CsvReader {
public:
    CsvReader(std::istream& in, char delimiter = ',');

    // Reads the next record; returns false at end of input. `line` receives the
    // 1-based physical line on which the record starts.
    bool next(std::vector<std::string>& fields, std::size_t& line);

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 1;
    bool first_ = true;
};

// Logical column name -> one or more header names. Multi-valued logical
// columns (target types 1..3, ...) list several headers.
struct ColumnMapping {
    std::map<std::string, std::vector<std::string>> columns;

    static ColumnMapping gtd_defaults();
};

// Logical columns every mapping must provide.
const std::vector<std::string>& required_logical_columns();

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
};

struct ParseResult {
    std::vector<EventRecord> events;
    std::vector<RejectedRow> rejects;
};

inline constexpr double kMaxRejectRate = 0.05;

ParseResult parse_events(std::istream& in, const ColumnMapping& schema, char delimiter = ',');
ParseResult parse_events(const std::filesystem::path& path, const ColumnMapping& schema, char delimiter = ',');

struct FilterPolicy {
    int year_min = 1997;
    int year_max = 2016;
    bool exclude_doubtful = true;
    bool exclude_unknown = true;
};

struct FilteredEvents {
    std::vector<EventRecord> events;
    FilterReport report;
};

FilteredEvents filter_events(const std::vector<EventRecord>& events, const FilterPolicy& policy);

struct ModeSpec {
    std::string name;
    std::string field;  // logical event field feeding the mode
};

using ModeConfig = std::vector<ModeSpec>;

ModeConfig default_modes();

MultiPartiteNetwork build_multipartite(const std::vector<EventRecord>& events, const ModeConfig& modes,
                                       Provenance provenance = {});

struct IdeologyAssignment {
    IdeologySet ideologies;
    Ideology dominant = Ideology::OtherUnknown;
};

// Canonical group name -> assignment.
using IdeologyMap = std::map<std::string, IdeologyAssignment>;

IdeologyMap load_ideology_map(std::istream& in, char delimiter = ',');
IdeologyMap load_ideology_map(const std::filesystem::path& path, char delimiter = ',');

std::vector<GroupProfile> derive_profiles(const std::vector<EventRecord>& events, const std::vector<GroupId>& groups,
                                          const IdeologyMap& ideologies = {});

}  // namespace latent
