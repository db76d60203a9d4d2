#pragma once

// Per-year multi-partite slices and mode-entropy time series.

#include <map>
#include <string>
#include <vector>

#include "latent/core_model.hpp"
#include "latent/ingestion.hpp"

namespace latent {

struct YearRange {
    int first = 0;
    int last = 0;
};

// One network per year in `window` that has events; each holds only that
// year's events, its active groups and the entities they touch.
std::map<int, MultiPartiteNetwork> slice_by_year(const std::vector<EventRecord>& events, YearRange window,
                                                 const ModeConfig& modes = default_modes(), unsigned threads = 1);

struct EntropySeries {
    std::vector<int> years;  // strictly increasing
    std::vector<std::string> mode_names;
    // entropy[m][t] for mode m in years[t]
    std::vector<std::vector<double>> entropy;
    // true where no event of that year touches the mode
    std::vector<std::vector<bool>> empty;
    std::vector<std::size_t> n_active_groups;
    std::vector<std::size_t> n_events;
};

EntropySeries entropy_series(const std::map<int, MultiPartiteNetwork>& slices, bool use_counts = false,
                             unsigned threads = 1);

}  // namespace latent
