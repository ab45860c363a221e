#include "ddp/curvature.hpp"
#include "ddp/pair_analysis.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ddp;

TEST_CASE("composite curvature examples") {
    CHECK(composite_kappa(0, 0, 1, 1) == 0.0);
    CHECK(composite_kappa(1, 2, 2, 4) == 0.0);
    CHECK(composite_kappa(0, 1, 1, 1) == 1.0);
    const auto q = composite_curvature(1, 1, 0, 2);
    CHECK(q.quiescent);
    CHECK(q.kappa == 0.0);
    CHECK(composite_curvature(1, 1, 2, 0).quiescent);
}

TEST_CASE("curvature vanishes exactly when the gradient is unchanged") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-10.0, 10.0), pos(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double H = u(rng), L = pos(rng) * (u(rng) < 0 ? -1 : 1), c = pos(rng);
        // R/L~ = H/L with L~ = c L, R = c H
        CHECK(std::abs(composite_kappa(H, c * H, L, c * L)) < 1e-12);
        const double R = u(rng), Lt = pos(rng), Lp = pos(rng);
        const double k = composite_kappa(H, R, Lp, Lt);
        if (R / Lt != H / Lp) CHECK((k > 0) == (R / Lt > H / Lp));
        // the printed formula, evaluated independently
        const double g = H / Lp;
        CHECK(k == doctest::Approx((R / Lt - g) / (Lp * std::pow(1 + g * g, 1.5))).epsilon(1e-12));
    }
}

TEST_CASE("categories") {
    CHECK(categorize_pdi(0.5, 1, 2, false, 1) == 1);
    CHECK(categorize_pdi(1.5, 1, 2, false, 1) == 2);
    CHECK(categorize_pdi(1.5, 2, 1, false, 1) == 3);
    CHECK(categorize_pdi(3, 1, 2, false, 1) == 5);
    CHECK(categorize_pdi(3, 1, 2, true, 1) == 4);
    CHECK(categorize_pdi(3, 1, 2, false, 2) == 6);
    CHECK(categorize_pdi(3, 1, 2, false, 3) == 7);
    // a ratio of exactly one is not exceeding
    CHECK(categorize_pdi(1, 1, 1, false, 1) == 1);
    CHECK(categorize_pdi(2, 1, 2, false, 1) == 2);
    CHECK(both_unstable(3, 1, 2));
    CHECK_FALSE(both_unstable(2, 1, 2));
}

TEST_CASE("categories are monotone in |kappa|") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> t(0.01, 5.0);
    const int rank[] = {0, 0, 1, 1, 0, 2};  // 1 < 2,3 < 5
    for (int i = 0; i < 300; ++i) {
        const double s = t(rng), l = t(rng);
        int prev = 0;
        for (double k = 0; k < 12; k += 0.01) {
            const int c = categorize_pdi(k, s, l, false, 1);
            REQUIRE((c == 1 || c == 2 || c == 3 || c == 5));
            CHECK(rank[c] >= prev);
            prev = rank[c];
            if (c == 5) CHECK((k / s > 1 && k / l > 1));
        }
    }
}

TEST_CASE("evaluated field") {
    std::mt19937_64 rng(29);
    const auto a = testing::random_frame(4, 4, rng), b = testing::random_frame(4, 4, rng);
    PairAnalysisConfig cfg;
    cfg.datum.fallbackToZero = true;
    const auto res = analyze_pair(a, b, cfg);
    const auto& f = res.curvature;
    REQUIRE(f.roots == 16);
    for (std::size_t d = 0; d < 4; ++d)
        for (std::size_t p = 0; p < 16; ++p) {
            const auto& pr = res.roots.at(p, d);
            for (std::size_t k = 0; k < 16; ++k) {
                const auto& rc = f.at(p, d, k);
                CHECK(rc.category >= 1);
                CHECK(rc.category <= 7);
                if (pr.quiescent || pr.failed) {
                    CHECK(rc.category == 1);
                    CHECK(rc.kappa == 0.0);
                    continue;
                }
                CHECK(std::isfinite(rc.kappa));
                const double L = pr.rootsShort[k], Lt = pr.rootsLong[k];
                const double ks = L == 0.0 ? INFINITY : 1.0 / L, kl = Lt == 0.0 ? INFINITY : 1.0 / Lt;
                CHECK((std::isinf(ks) ? rc.kappaShort == ks : rc.kappaShort == doctest::Approx(ks)));
                CHECK((std::isinf(kl) ? rc.kappaLong == kl : rc.kappaLong == doctest::Approx(kl)));
                if (rc.category == 5) CHECK(both_unstable(std::abs(rc.kappa), rc.kappaShort, rc.kappaLong));
            }
        }
    const auto hist = pdi_histogram(f, 0);
    double total = 0;
    for (double h : hist) total += h;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("quiescent pair is fully stable") {
    const auto f = testing::ramp_frame(3, 3);
    PairAnalysisConfig cfg;
    cfg.datum.fallbackToZero = true;
    const auto res = analyze_pair(f, f, cfg);
    for (const auto& v : res.curvature.values) {
        CHECK(v.category == 1);
        CHECK(v.kappa == 0.0);
    }
    CHECK(pdi_histogram(res.curvature, 2)[1] == doctest::Approx(1.0));
}
