#include "latent/temporal.hpp"

#include "latent/parallel.hpp"
#include "latent/spectral_entropy.hpp"

namespace latent {

std::map<int, MultiPartiteNetwork> slice_by_year(const std::vector<EventRecord>& events, YearRange window,
                                                 const ModeConfig& modes, unsigned threads) {
    if (window.last < window.first) throw ValidationError("empty year range");
    std::map<int, std::vector<EventRecord>> by_year;
    for (const auto& ev : events)
        if (ev.year >= window.first && ev.year <= window.last) by_year[ev.year].push_back(ev);
    if (by_year.empty()) throw DataError("no events fall inside the year range");

    std::vector<int> years;
    for (const auto& [y, _] : by_year) years.push_back(y);
    std::vector<MultiPartiteNetwork> built(years.size());
    parallel_for(years.size(), threads, [&](std::size_t i) {
        Provenance prov;
        prov.year_min = years[i];
        prov.year_max = years[i];
        built[i] = build_multipartite(by_year.at(years[i]), modes, prov);
    });
    std::map<int, MultiPartiteNetwork> out;
    for (std::size_t i = 0; i < years.size(); ++i) out.emplace(years[i], std::move(built[i]));
    return out;
}

EntropySeries entropy_series(const std::map<int, MultiPartiteNetwork>& slices, bool use_counts, unsigned threads) {
    if (slices.empty()) throw ValidationError("entropy series needs at least one slice");
    EntropySeries s;
    std::vector<const MultiPartiteNetwork*> nets;
    for (const auto& [year, net] : slices) {
        s.years.push_back(year);
        nets.push_back(&net);
        s.n_active_groups.push_back(net.n_groups());
        s.n_events.push_back(net.provenance().n_events);
    }
    for (const auto& m : nets.front()->modes()) s.mode_names.push_back(m.mode_name());
    const std::size_t t_count = nets.size(), m_count = s.mode_names.size();
    s.entropy.assign(m_count, std::vector<double>(t_count, 0.0));
    s.empty.assign(m_count, std::vector<bool>(t_count, false));

    std::vector<std::vector<ModeEntropy>> per_year(t_count);
    parallel_for(t_count, threads, [&](std::size_t t) {
        per_year[t].resize(m_count);
        for (std::size_t m = 0; m < m_count; ++m)
            per_year[t][m] = von_neumann_entropy(nets[t]->mode(s.mode_names[m]), use_counts);
    });
    for (std::size_t t = 0; t < t_count; ++t)
        for (std::size_t m = 0; m < m_count; ++m) {
            const auto& mode = nets[t]->mode(s.mode_names[m]);
            s.empty[m][t] = mode.n_entities() == 0 || mode.incidence().sum() == 0.0;
            s.entropy[m][t] = per_year[t][m].entropy;
        }
    return s;
}

}  // namespace latent
