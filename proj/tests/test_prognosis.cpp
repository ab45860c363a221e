#include "ddp/errors.hpp"
#include "ddp/prognosis.hpp"

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <numeric>

using namespace ddp;

namespace {

std::vector<double> ascending(std::size_t n) {
    std::vector<double> r(n);
    std::iota(r.begin(), r.end(), 0.0);
    return r;
}

std::vector<int> with_votes(std::size_t unstable, std::size_t total = 16) {
    std::vector<int> c(total, 1);
    for (std::size_t i = 0; i < unstable; ++i) c[i] = 5;
    return c;
}

PrognosisState replay(std::size_t onset, std::initializer_list<std::size_t> chains,
                      std::initializer_list<std::size_t> energy, std::size_t last) {
    PrognosisState s;
    for (std::size_t t = 1; t <= last; ++t) {
        record_path_dependency(s, t >= onset, t);
        const bool c = std::find(chains.begin(), chains.end(), t) != chains.end();
        const bool e = std::find(energy.begin(), energy.end(), t) != energy.end();
        s = update_gti(s, c, e, t);
    }
    return s;
}

}  // namespace

TEST_CASE("chain lengths") {
    const std::vector<int> cats{1, 5, 5, 5, 1};
    const auto e = chain_lengths(cats, ascending(5), 0, 0, 100, 100);
    CHECK(e.maxChainLength == 3);
    CHECK(e.members == std::vector<std::size_t>{1, 2, 3});
    CHECK_FALSE(e.triggeredLong);

    const std::vector<int> none{1, 2, 3, 4, 1};
    CHECK(chain_lengths(none, ascending(5), 0, 0, 0.5, 0.5).maxChainLength == 0);
    CHECK_FALSE(chain_lengths(none, ascending(5), 0, 0, 0.5, 0.5).triggeredShort);

    // rank order, not index order, defines contiguity
    const std::vector<int> shuffled{5, 1, 5, 5};
    const std::vector<double> R{0.0, 3.0, 1.0, 2.0};
    CHECK(chain_lengths(shuffled, R, 0, 0, 10, 10).maxChainLength == 3);

    std::vector<int> thirty(40, 1);
    for (std::size_t i = 5; i < 35; ++i) thirty[i] = 6;
    const auto t = chain_lengths(thirty, ascending(40), 1, 2, 100, 27);
    CHECK(t.maxChainLength == 30);
    CHECK(t.triggeredLong);
    CHECK_FALSE(t.triggeredShort);
    for (auto p : t.members) CHECK(thirty[p] >= 5);

    // invalid points drop out of the order
    const std::vector<int> gap{5, 0, 5};
    CHECK(chain_lengths(gap, ascending(3), 0, 0, 10, 10).maxChainLength == 2);
}

TEST_CASE("root votes") {
    CHECK(point_path_dependent(with_votes(8)));
    CHECK_FALSE(point_path_dependent(with_votes(7)));
    CHECK(point_path_dependent(with_votes(16)));
    CHECK_FALSE(point_path_dependent(with_votes(0)));
}

TEST_CASE("energy trigger") {
    auto drops = [](std::size_t over) {
        std::vector<std::optional<double>> d(64, 0.1);
        for (std::size_t i = 0; i < over; ++i) d[i] = 0.85;
        return d;
    };
    CHECK(energy_trigger(drops(13), 64));
    CHECK_FALSE(energy_trigger(drops(12), 64));
    CHECK_FALSE(energy_trigger(drops(0), 64));
    std::vector<std::optional<double>> fresh(64);
    CHECK_FALSE(energy_trigger(fresh, 64));
    // exactly 0.80 is not a drop beyond the threshold
    std::vector<std::optional<double>> edge(64, 0.80);
    CHECK_FALSE(energy_trigger(edge, 64));
}

TEST_CASE("composite prediction") {
    SUBCASE("balloon replay") {
        const auto s = replay(4, {20, 21, 23, 24, 25}, {2, 17, 22}, 30);
        CHECK(s.pdiOnsetIndex == 4u);
        CHECK(composite_prediction(s) == 20u);
        CHECK(s.predictedFailureIndex == 20u);
        CHECK(s.gti > 0.0);
    }
    SUBCASE("gti rises only at the chain trigger") {
        auto s = replay(4, {}, {2, 17}, 19);
        CHECK(s.gti == 0.0);
        s = update_gti(s, true, false, 20);
        CHECK(s.gti > 0.0);
        CHECK(s.predictedFailureIndex == 20u);
    }
    SUBCASE("energy before onset is ignored") {
        const auto s = replay(4, {10}, {2}, 12);
        CHECK(s.gti == 0.0);
        CHECK_FALSE(composite_prediction(s).has_value());
    }
    SUBCASE("late energy sets the prediction") {
        const auto s = replay(4, {10}, {30}, 31);
        CHECK(composite_prediction(s) == 30u);
    }
    SUBCASE("no chain means no prediction") {
        const auto s = replay(4, {}, {5, 6, 7}, 20);
        CHECK(s.gti == 0.0);
        CHECK_FALSE(s.predictedFailureIndex.has_value());
    }
    SUBCASE("prediction latches") {
        auto s = replay(4, {20}, {17}, 20);
        s = update_gti(s, true, true, 21);
        s = update_gti(s, true, true, 22);
        CHECK(s.predictedFailureIndex == 20u);
        CHECK(s.chainTriggerIndices.size() == 3);
    }
    SUBCASE("no onset means no prediction") {
        const auto s = replay(100, {5}, {6}, 10);
        CHECK_FALSE(composite_prediction(s).has_value());
    }
}

TEST_CASE("lead percentage") {
    CHECK(*lead_percentage(2099, 2382) == doctest::Approx(11.88).epsilon(0.01 / 11.88));
    CHECK(*lead_percentage(2382, 2382) == 0.0);
    CHECK_FALSE(lead_percentage(2400, 2382).has_value());
    CHECK_THROWS_AS(lead_percentage(1, 0), RangeError);
    const double actual = 2249 / (1 - 0.055835);
    CHECK(std::round(actual) == 2382.0);
    CHECK(*lead_percentage(2249, 2382) == doctest::Approx(5.5835).epsilon(1e-3));
}

TEST_CASE("category promotion") {
    CurvatureField f;
    f.dims = 2;
    f.points = 2;
    f.roots = 4;
    f.values.resize(16);
    f.unstableDim.assign(4, 0);
    f.validPoint.assign(2, 1);
    // point 0: unstable in dimension 0 only; point 1: unstable in both
    for (std::size_t k = 0; k < 2; ++k) f.at(0, 0, k).category = 5;
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t k = 0; k < 3; ++k) f.at(1, d, k).category = 6;
    f.at(0, 1, 0).category = 2;

    const auto same = promote_categories(f, 0.0);
    for (std::size_t i = 0; i < 16; ++i) CHECK(same[i] == f.values[i].category);

    const auto up = promote_categories(f, 1.0);
    auto at = [&](std::size_t p, std::size_t d, std::size_t k) { return up[(d * 2 + p) * 4 + k]; };
    CHECK(at(0, 0, 0) == 8);
    CHECK(at(0, 0, 2) == 1);
    CHECK(at(0, 1, 0) == 2);
    CHECK(at(1, 0, 0) == 9);
    CHECK(at(1, 1, 2) == 9);
    CHECK(at(1, 1, 3) == 1);
}

TEST_CASE("event format") {
    CHECK(format_event({20, EventKind::Prediction, -1, -1, 2099}).find("event=prediction") != std::string::npos);
    CHECK(format_event({4, EventKind::PdiOnset}).rfind("t=4 ", 0) == 0);
}
