#include "ddp/curvature.hpp"

#include "ddp/errors.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace ddp {

namespace {

double ratio(double absKappa, double threshold) noexcept {
    const double t = std::abs(threshold);
    if (t == 0.0) return absKappa > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return absKappa / t;
}

}  // namespace

CurvatureValue composite_curvature(double H, double R, double L, double Ltilde) noexcept {
    if (L == 0.0 || Ltilde == 0.0) return {0.0, true};
    const double slopeShort = H / L;
    const double slopeLong = R / Ltilde;
    const double num = slopeLong - slopeShort;
    if (num == 0.0) return {0.0, false};
    const double den = L * std::pow(1.0 + slopeShort * slopeShort, 1.5);
    return {num / den, false};
}

double composite_kappa(double H, double R, double L, double Ltilde) noexcept {
    return composite_curvature(H, R, L, Ltilde).kappa;
}

bool both_unstable(double absKappa, double kappaShort, double kappaLong) noexcept {
    return ratio(absKappa, kappaShort) > 1.0 && ratio(absKappa, kappaLong) > 1.0;
}

int categorize_pdi(double absKappa, double kappaShort, double kappaLong, bool mixityRescue,
                   std::size_t crossDimCount) {
    const bool shortBad = ratio(absKappa, kappaShort) > 1.0;
    const bool longBad = ratio(absKappa, kappaLong) > 1.0;
    if (!shortBad && !longBad) return 1;
    if (shortBad && !longBad) return 2;
    if (!shortBad && longBad) return 3;
    if (mixityRescue) return 4;
    if (crossDimCount > 2) return 7;
    if (crossDimCount > 1) return 6;
    return 5;
}

bool mixity_rescue(double H, double R, double deltaH, std::size_t d, std::size_t /*dims*/, std::size_t k,
                   const MixityConfig& cfg) {
    const double sign = root_sign(k, d);
    for (double phi : cfg.phiGrid) {
        const double e = effective_modulus(phi, cfg);
        std::optional<double> ls, ll;
        try {
            ls = root_magnitude(H, deltaH, e, cfg.epsDeltaH);
            ll = root_magnitude(R, deltaH, e, cfg.epsDeltaH);
        } catch (const RootSolveError&) {
            continue;
        }
        if (!ls || !ll) return true;  // quiescent under this mixity
        const double L = sign * *ls, Lt = sign * *ll;
        const double kappa = std::abs(composite_kappa(H, R, L, Lt));
        if (!std::isfinite(kappa)) continue;
        if (kappa * std::abs(L) < 1.0 && kappa * std::abs(Lt) < 1.0) return true;
    }
    return false;
}

CurvatureField evaluate_curvature(std::span<const RankTable> tables, const LengthScaleRoots& roots,
                                  const MixityConfig& cfg) {
    CurvatureField field;
    field.dims = roots.dims;
    field.points = roots.points;
    field.roots = root_count(roots.dims);
    field.values.assign(field.dims * field.points * field.roots, RootCurvature{});
    field.unstableDim.assign(field.dims * field.points, 0);
    field.validPoint.assign(field.points, 0);
    if (!tables.empty())
        for (std::size_t p = 0; p < field.points; ++p) field.validPoint[p] = std::isnan(tables[0].H[p]) ? 0 : 1;

    // Pass 1: per-root kappa, thresholds and base condition (5 stands for
    // "both unstable, not rescued" until the cross-dimension count is known).
    for (std::size_t d = 0; d < field.dims; ++d) {
        const auto& t = tables[d];
        for (std::size_t p = 0; p < field.points; ++p) {
            const auto& pr = roots.at(p, d);
            if (pr.quiescent || pr.failed) continue;
            std::size_t fiveCount = 0;
            for (std::size_t k = 0; k < field.roots; ++k) {
                auto& rc = field.at(p, d, k);
                const double L = pr.rootsShort[k], Lt = pr.rootsLong[k];
                const auto cv = composite_curvature(t.H[p], t.R[p], L, Lt);
                rc.kappa = cv.kappa;
                rc.quiescent = cv.quiescent;
                rc.kappaShort = L == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / L;
                rc.kappaLong = Lt == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / Lt;
                if (cv.quiescent) {
                    rc.category = 1;
                    continue;
                }
                const double ak = std::abs(rc.kappa);
                if (both_unstable(ak, rc.kappaShort, rc.kappaLong)) {
                    const bool rescued = mixity_rescue(t.H[p], t.R[p], t.deltaH[p], d, field.dims, k, cfg);
                    rc.category = rescued ? 4 : 5;
                    if (!rescued) ++fiveCount;
                } else {
                    rc.category = categorize_pdi(ak, rc.kappaShort, rc.kappaLong, false, 0);
                }
            }
            field.unstableDim[d * field.points + p] = 2 * fiveCount >= field.roots && fiveCount > 0 ? 1 : 0;
        }
    }

    // Pass 2: promote category-5 roots by the number of unstable dimensions.
    for (std::size_t p = 0; p < field.points; ++p) {
        std::size_t count = 0;
        for (std::size_t d = 0; d < field.dims; ++d) count += field.unstableDim[d * field.points + p];
        if (count < 2) continue;
        for (std::size_t d = 0; d < field.dims; ++d)
            for (std::size_t k = 0; k < field.roots; ++k) {
                auto& rc = field.at(p, d, k);
                if (rc.category == 5) rc.category = count > 2 ? 7 : 6;
            }
    }
    return field;
}

std::array<double, 10> pdi_histogram(const CurvatureField& field, std::size_t d, std::span<const int> categories) {
    std::array<double, 10> h{};
    std::size_t valid = 0;
    for (std::size_t p = 0; p < field.points; ++p) valid += field.validPoint[p];
    if (valid == 0) return h;
    const double w = 1.0 / (static_cast<double>(valid) * static_cast<double>(field.roots));
    for (std::size_t p = 0; p < field.points; ++p) {
        if (!field.validPoint[p]) continue;
        for (std::size_t k = 0; k < field.roots; ++k) {
            const std::size_t idx = (d * field.points + p) * field.roots + k;
            const int c = categories.empty() ? field.values[idx].category : categories[idx];
            h[static_cast<std::size_t>(c)] += w;
        }
    }
    return h;
}

void write_pdi_csv_header(std::ostream& out) {
    out << "t,dimension";
    for (int c = 1; c <= 9; ++c) out << ",cat" << c;
    out << '\n';
}

void write_pdi_csv_rows(std::ostream& out, std::size_t timeIndex, const CurvatureField& field,
                        std::span<const int> categories) {
    for (std::size_t d = 0; d < field.dims; ++d) {
        const auto h = pdi_histogram(field, d, categories);
        out << timeIndex << ',' << d;
        for (int c = 1; c <= 9; ++c) out << ',' << h[static_cast<std::size_t>(c)];
        out << '\n';
    }
}

}  // namespace ddp
