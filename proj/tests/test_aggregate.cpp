#include "ddp/aggregate.hpp"
#include "ddp/errors.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

using namespace ddp;

namespace {

PairAnalysisConfig lenient() {
    PairAnalysisConfig cfg;
    cfg.datum.fallbackToZero = true;
    return cfg;
}

ZoomOutProfile profile(std::vector<std::pair<double, double>> factorAndKappa, double kLong, double kShort,
                       std::size_t coarsestPoints = 9) {
    ZoomOutProfile p;
    for (auto [f, k] : factorAndKappa) p.levels.push_back({f, 0, k, kShort, kLong});
    p.levels.back().points = coarsestPoints;
    return p;
}

// Linear crossing of the profile with a horizontal line, walking from the raw level.
double oracle_length(const ZoomOutProfile& p, double threshold, std::size_t total) {
    for (std::size_t i = 0; i + 1 < p.levels.size(); ++i) {
        const double x0 = std::log(p.levels[i].aggregationFactor), x1 = std::log(p.levels[i + 1].aggregationFactor);
        const double y0 = p.levels[i].meanAbsKappa, y1 = p.levels[i + 1].meanAbsKappa;
        if ((y0 - threshold) * (y1 - threshold) <= 0 && y0 != y1) {
            const double x = x0 + (threshold - y0) / (y1 - y0) * (x1 - x0);
            return std::clamp(static_cast<double>(total) / std::exp(x), 1.0, static_cast<double>(total));
        }
    }
    return NAN;
}

}  // namespace

TEST_CASE("partitions") {
    CHECK(halve_partition({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) == Partition{0, 2, 4, 6, 8, 10});
    CHECK(halve_partition({0, 2, 4, 6, 8, 10}) == Partition{0, 4, 10});
    CHECK(thirds_partition(10) == Partition{0, 3, 6, 10});
    CHECK(thirds_partition(3) == Partition{0, 1, 2, 3});
    CHECK_THROWS_AS(thirds_partition(2), ZoomOutUnavailableError);
}

TEST_CASE("10x10 pyramid") {
    std::mt19937_64 rng(41);
    const auto a = testing::random_frame(10, 10, rng), b = testing::random_frame(10, 10, rng);
    const auto pyr = build_pyramid(a, b, lenient());
    REQUIRE(pyr.levels.size() == 3);
    CHECK(pyr.totalPoints == 100);
    CHECK(pyr.levels[0].points() == 100);
    CHECK(pyr.levels[1].points() == 25);
    CHECK(pyr.levels[2].points() == 9);
    CHECK(pyr.levels[2].rowBlocks == Partition{0, 3, 6, 10});
    CHECK(pyr.levels[1].factor == 4.0);
    CHECK(pyr.levels[2].factor == doctest::Approx(100.0 / 9.0));

    // block means weighted by block sizes recover the window mean
    for (const auto& lvl : pyr.levels)
        for (std::size_t d = 0; d < 4; ++d) {
            double raw = 0, agg = 0;
            for (std::size_t p = 0; p < 100; ++p) raw += b.value(p, d);
            for (std::size_t r = 0; r < lvl.rows(); ++r)
                for (std::size_t c = 0; c < lvl.cols(); ++c) {
                    const double n = static_cast<double>((lvl.rowBlocks[r + 1] - lvl.rowBlocks[r]) *
                                                         (lvl.colBlocks[c + 1] - lvl.colBlocks[c]));
                    agg += n * lvl.later.value(lvl.later.index(r, c), d);
                }
            CHECK(agg == doctest::Approx(raw).epsilon(1e-12));
        }

    const auto again = build_pyramid(a, b, lenient());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t d = 0; d < 4; ++d)
            for (std::size_t k = 0; k < 16; k += 5) {
                const auto x = level_statistics(pyr.levels[i].analysis, d, k, pyr.levels[i].factor);
                const auto y = level_statistics(again.levels[i].analysis, d, k, again.levels[i].factor);
                CHECK(std::memcmp(&x.meanAbsKappa, &y.meanAbsKappa, sizeof(double)) == 0);
                CHECK(std::memcmp(&x.meanKappaLong, &y.meanKappaLong, sizeof(double)) == 0);
            }
}

TEST_CASE("mean preservation with invalid points") {
    std::mt19937_64 rng(43);
    auto f = testing::random_frame(7, 6, rng);
    f.setValid(3, false);
    f.setValid(20, false);
    const Partition rows{0, 2, 4, 6}, cols{0, 2, 4, 7};
    const auto g = aggregate_frame(f, rows, cols);
    for (std::size_t d = 0; d < 4; ++d) {
        double raw = 0, agg = 0;
        for (std::size_t p = 0; p < f.points(); ++p)
            if (f.valid(p)) raw += f.value(p, d);
        for (std::size_t br = 0; br < 3; ++br)
            for (std::size_t bc = 0; bc < 3; ++bc) {
                double n = 0;
                for (std::size_t r = rows[br]; r < rows[br + 1]; ++r)
                    for (std::size_t c = cols[bc]; c < cols[bc + 1]; ++c) n += f.valid(f.index(r, c));
                agg += n * g.value(g.index(br, bc), d);
            }
        CHECK(agg == doctest::Approx(raw).epsilon(1e-12));
    }
}

TEST_CASE("small windows") {
    std::mt19937_64 rng(47);
    const auto a = testing::random_frame(3, 3, rng), b = testing::random_frame(3, 3, rng);
    const auto pyr = build_pyramid(a, b, lenient());
    CHECK(pyr.levels.size() == 1);
    CHECK(pyr.levels[0].points() == 9);
    const auto prof = zoom_out_profile(pyr, 0, 0);
    CHECK_THROWS_AS(critical_chain_length(prof, 9, ChainVariant::Long), ZoomOutUnavailableError);
    const auto c = testing::random_frame(2, 5, rng), e = testing::random_frame(2, 5, rng);
    CHECK_THROWS_AS(build_pyramid(c, e, lenient()), ZoomOutUnavailableError);
}

TEST_CASE("constant pair has zero residual") {
    const auto f = testing::ramp_frame(6, 6);
    const auto pyr = build_pyramid(f, f, lenient());
    for (std::size_t d = 0; d < 4; ++d) {
        const auto prof = zoom_out_profile(pyr, d, 3);
        for (const auto& l : prof.levels) CHECK(l.meanAbsKappa == 0.0);
        CHECK(residual_curvature(prof) == 0.0);
        // thresholds vanish on a quiescent pair
        CHECK(critical_chain_length(prof, 36, ChainVariant::Long) == 36.0);
    }
}

TEST_CASE("residual curvature reads the coarsest level") {
    const auto p = profile({{1, 2.0}, {4, 1.1}, {11, 0.8}}, 1, 1);
    CHECK(residual_curvature(p) == 0.8);
}

TEST_CASE("critical chain length") {
    SUBCASE("midpoint crossing") {
        const auto p = profile({{1, 1.0}, {2, 0.5}}, 0.75, 0.0);
        const double len = critical_chain_length(p, 100, ChainVariant::Long);
        CHECK(len == doctest::Approx(100.0 / std::sqrt(2.0)));
        CHECK(len == doctest::Approx(oracle_length(p, 0.75, 100)));
        // short threshold of zero never crosses
        CHECK(critical_chain_length(p, 100, ChainVariant::Short) == 100.0);
    }
    SUBCASE("hand profiles") {
        const auto a = profile({{1, 0.9}, {4, 0.4}, {100.0 / 9, 0.1}}, 0.3, 0.6);
        CHECK(critical_chain_length(a, 100, ChainVariant::Long) == doctest::Approx(oracle_length(a, 0.3, 100)));
        CHECK(critical_chain_length(a, 100, ChainVariant::Short) == doctest::Approx(oracle_length(a, 0.6, 100)));
        const auto b = profile({{1, 0.2}, {4, 0.6}, {100.0 / 9, 0.9}}, 0.7, 0.3);
        CHECK(critical_chain_length(b, 100, ChainVariant::Long) == doctest::Approx(oracle_length(b, 0.7, 100)));
        const auto c = profile({{1, 5.0}, {4, 3.0}, {100.0 / 9, 2.0}}, 4.0, 2.5);
        CHECK(critical_chain_length(c, 100, ChainVariant::Long) == doctest::Approx(oracle_length(c, 4.0, 100)));
        CHECK(critical_chain_length(c, 100, ChainVariant::Short) == doctest::Approx(oracle_length(c, 2.5, 100)));
    }
    SUBCASE("boundaries") {
        const auto above = profile({{1, 0.2}, {4, 0.1}}, 5.0, 0.0);
        CHECK(critical_chain_length(above, 100, ChainVariant::Long) == 100.0);
        const auto below = profile({{1, 0.9}, {4, 0.8}}, 0.1, 0.0);
        CHECK(critical_chain_length(below, 100, ChainVariant::Long) == 1.0);
        const auto nan = profile({{1, 0.9}, {4, 0.8}}, NAN, 0.0);
        CHECK(critical_chain_length(nan, 100, ChainVariant::Long) == 100.0);
    }
    SUBCASE("non-decreasing in the threshold") {
        std::mt19937_64 rng(53);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            // decreasing profile, as the zoom-out usually yields
            double k0 = 0.5 + u(rng), k1 = k0 * u(rng), k2 = k1 * u(rng);
            double prev = 0;
            for (double t = 0.001; t < 2.0; t += 0.01) {
                const auto p = profile({{1, k0}, {4, k1}, {100.0 / 9, k2}}, t, 0);
                const double len = critical_chain_length(p, 100, ChainVariant::Long);
                CHECK(len >= prev);
                prev = len;
            }
        }
    }
    SUBCASE("log base does not matter") {
        std::mt19937_64 rng(59);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            const auto p = profile({{1, u(rng)}, {4, u(rng)}, {100.0 / 9, u(rng)}}, u(rng), u(rng));
            for (auto v : {ChainVariant::Long, ChainVariant::Short})
                CHECK(critical_chain_length(p, 100, v, 10.0) ==
                      doctest::Approx(critical_chain_length(p, 100, v)).epsilon(1e-9));
        }
    }
}

TEST_CASE("residual drop") {
    CHECK(*residual_drop(10, 1.5) == doctest::Approx(0.85));
    CHECK(*residual_drop(10, 1.5) > 0.80);
    CHECK(*residual_drop(10, 9) == doctest::Approx(0.10));
    CHECK(*residual_drop(10, 12) == doctest::Approx(-0.2));
    CHECK(*residual_drop(3.5, 3.5) == 0.0);
    CHECK(*residual_drop(3.5, 0) == 1.0);
    CHECK_FALSE(residual_drop(0.0, 1.0).has_value());
}
