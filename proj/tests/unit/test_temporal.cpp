#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "latent/spectral_entropy.hpp"
#include "latent/temporal.hpp"
#include "support/oracles.hpp"

using namespace latent;

namespace {

EventRecord event(int year, const std::string& group, std::vector<std::string> targets,
                  std::vector<std::string> weapons) {
    EventRecord e;
    e.event_id = group + std::to_string(year) + targets.front();
    e.year = year;
    e.perpetrator = group;
    e.country = "x";
    e.fields["target"] = std::move(targets);
    e.fields["weapon"] = std::move(weapons);
    return e;
}

const ModeConfig kModes = {{"Targets", "target"}, {"Weapons", "weapon"}};

oracle::Matrix to_rows(const Eigen::MatrixXd& m) {
    oracle::Matrix out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

}  // namespace

TEST_CASE("one year of events gives one slice") {
    const std::vector<EventRecord> ev = {event(2001, "a", {"t1"}, {"w1"}), event(2001, "b", {"t2"}, {"w1"})};
    const auto s = slice_by_year(ev, {1997, 2016}, kModes);
    REQUIRE(s.size() == 1);
    CHECK(s.begin()->first == 2001);
    CHECK(s.begin()->second.n_groups() == 2);
}

TEST_CASE("empty year range is an error") {
    const std::vector<EventRecord> ev = {event(2001, "a", {"t1"}, {"w1"})};
    CHECK_THROWS_AS(slice_by_year(ev, {2005, 2001}, kModes), ValidationError);
    CHECK_THROWS_AS(slice_by_year(ev, {2005, 2010}, kModes), DataError);
    CHECK_THROWS_AS(entropy_series({}), ValidationError);
}

TEST_CASE("yearly slices partition events and groups") {
    oracle::Rng rng(61);
    std::vector<EventRecord> ev;
    for (int i = 0; i < 300; ++i)
        ev.push_back(event(static_cast<int>(rng.index(1997, 2016)), "g" + std::to_string(rng.index(0, 29)),
                           {"t" + std::to_string(rng.index(0, 7))}, {"w" + std::to_string(rng.index(0, 4))}));
    const auto slices = slice_by_year(ev, {1997, 2016}, kModes, 4);
    CHECK(slices.size() == 20);
    std::set<std::string> all, yearly;
    std::size_t with_multiplicity = 0, n_events = 0;
    for (const auto& e : ev) all.insert(e.perpetrator);
    for (const auto& [y, net] : slices) {
        for (const auto& g : net.groups()) yearly.insert(g.name);
        with_multiplicity += net.n_groups();
        n_events += net.provenance().n_events;
        CHECK(net.mode("Targets").incidence().sum() == static_cast<double>(net.provenance().n_events));
    }
    CHECK(yearly == all);
    CHECK(with_multiplicity >= all.size());
    CHECK(n_events == ev.size());

    const auto series = entropy_series(slices, false, 3);
    CHECK(series.years.size() == 20);
    for (std::size_t t = 1; t < series.years.size(); ++t) CHECK(series.years[t] > series.years[t - 1]);
    for (std::size_t m = 0; m < series.mode_names.size(); ++m) {
        CHECK(series.entropy[m].size() == series.years.size());
        for (std::size_t t = 0; t < series.years.size(); ++t) {
            const auto& mode = slices.at(series.years[t]).mode(series.mode_names[m]);
            CHECK(series.entropy[m][t] == von_neumann_entropy(mode).entropy);
        }
    }
    CHECK(entropy_series(slices, false, 1).entropy == series.entropy);
}

TEST_CASE("a mode untouched in a year reports 0 with a flag") {
    const std::vector<EventRecord> ev = {event(2001, "a", {"t1"}, {"w1"}), event(2002, "a", {"t1"}, {}),
                                         event(2002, "b", {"t2"}, {})};
    const auto s = entropy_series(slice_by_year(ev, {1997, 2016}, kModes));
    const std::size_t w = s.mode_names[1] == "Weapons" ? 1 : 0;
    CHECK(s.entropy[w][1] == 0.0);
    CHECK(s.empty[w][1]);
    CHECK_FALSE(s.empty[w][0]);
    CHECK(s.n_active_groups == std::vector<std::size_t>{1, 2});
    CHECK(s.n_events == std::vector<std::size_t>{1, 2});
}

TEST_CASE("replicated data gives a flat series") {
    std::vector<EventRecord> ev;
    for (int y = 2000; y < 2005; ++y) {
        ev.push_back(event(y, "a", {"t1", "t2"}, {"w1"}));
        ev.push_back(event(y, "b", {"t2"}, {"w2"}));
        ev.push_back(event(y, "c", {"t3"}, {"w1"}));
    }
    const auto s = entropy_series(slice_by_year(ev, {1997, 2016}, kModes));
    for (const auto& row : s.entropy)
        for (double h : row) CHECK(h == row.front());
}

TEST_CASE("hub versus spread years follow the oracle") {
    std::vector<EventRecord> ev;
    for (int g = 0; g < 6; ++g) ev.push_back(event(2003, "g" + std::to_string(g), {"hub"}, {"w"}));
    for (int g = 0; g < 6; ++g) ev.push_back(event(2004, "g" + std::to_string(g), {"t" + std::to_string(g)}, {"w"}));
    const auto slices = slice_by_year(ev, {1997, 2016}, kModes);
    const auto s = entropy_series(slices);
    const std::size_t t = s.mode_names[0] == "Targets" ? 0 : 1;
    for (std::size_t y = 0; y < 2; ++y) {
        const auto& mode = slices.at(s.years[y]).mode("Targets");
        CHECK(std::abs(s.entropy[t][y] - oracle::bipartite_entropy(to_rows(mode.incidence()))) < 1e-8);
    }
    CHECK(s.entropy[t][0] != s.entropy[t][1]);
}
