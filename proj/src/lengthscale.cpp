#include "ddp/lengthscale.hpp"

#include "ddp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ddp {

std::vector<double> default_phi_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
}

void MixityConfig::validate() const {
    if (phiGrid.empty()) throw ConfigError("phi grid must not be empty");
    for (double p : phiGrid)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("phi grid values must lie in [0,1]");
    if (!(epsDeltaH >= 0.0)) throw ConfigError("epsDeltaH must be non-negative");
}

double effective_modulus(double phi, const MixityConfig& cfg) {
    if (cfg.modulusOverride) return *cfg.modulusOverride;
    const double shear = 1.0 / (2.0 * (1.0 + cfg.nuShear));
    const double bulk = 1.0 / (3.0 * (1.0 - 2.0 * cfg.nuVolumetric));
    return phi * shear + (1.0 - phi) * bulk;
}

std::size_t root_count(std::size_t dims) { return std::size_t{1} << dims; }

double root_sign(std::size_t k, std::size_t d) noexcept { return ((k >> d) & 1U) ? -1.0 : 1.0; }

std::optional<double> root_magnitude(double value, double deltaH, double modulus, double epsDeltaH) {
    if (!(std::abs(deltaH) > epsDeltaH)) return std::nullopt;
    const double ratio = modulus * value / deltaH;
    if (!std::isfinite(ratio)) throw RootSolveError("value/deltaH ratio is not finite");
    return std::sqrt(std::abs(ratio));
}

RootSolution solve_roots(double value, double deltaH, std::size_t d, std::size_t dims, double phi,
                         const MixityConfig& cfg) {
    if (d >= dims) throw RangeError("dimension index out of range");
    if (!std::isfinite(value)) throw RootSolveError("rank value is not finite");
    RootSolution out;
    const auto mag = root_magnitude(value, deltaH, effective_modulus(phi, cfg), cfg.epsDeltaH);
    if (!mag) {
        out.quiescent = true;
        return out;
    }
    out.magnitude = *mag;
    const std::size_t n = root_count(dims);
    out.roots.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.roots[k] = root_sign(k, d) * *mag;
    return out;
}

double select_mixity(std::span<const double> phiGrid, const std::function<double(double)>& score) {
    std::optional<double> best;
    double bestScore = std::numeric_limits<double>::infinity();
    for (double phi : phiGrid) {
        const double s = score(phi);
        if (!std::isfinite(s)) continue;
        if (!best || s < bestScore || (s == bestScore && phi < *best)) {
            best = phi;
            bestScore = s;
        }
    }
    if (!best) throw MixityUnavailableError("no mixity candidate produced a finite curvature");
    return *best;
}

double median_abs_kappa(double H, double R, double deltaH, std::size_t d, std::size_t dims, double phi,
                        const MixityConfig& cfg, const KappaFn& kappa) {
    const auto shortRoots = solve_roots(H, deltaH, d, dims, phi, cfg);
    const auto longRoots = solve_roots(R, deltaH, d, dims, phi, cfg);
    if (shortRoots.quiescent) return 0.0;
    std::vector<double> mags(shortRoots.roots.size());
    for (std::size_t k = 0; k < mags.size(); ++k) {
        const double v = kappa(H, R, shortRoots.roots[k], longRoots.roots[k]);
        if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
        mags[k] = std::abs(v);
    }
    std::sort(mags.begin(), mags.end());
    const std::size_t n = mags.size();
    return n % 2 ? mags[n / 2] : 0.5 * (mags[n / 2 - 1] + mags[n / 2]);
}

LengthScaleRoots build_roots(std::span<const RankTable> tables, const MixityConfig& cfg, const KappaFn& kappa) {
    cfg.validate();
    LengthScaleRoots out;
    out.dims = tables.size();
    out.points = tables.empty() ? 0 : tables.front().H.size();
    out.entries.resize(out.dims * out.points);

    for (std::size_t d = 0; d < out.dims; ++d) {
        const auto& t = tables[d];
        for (std::size_t p = 0; p < out.points; ++p) {
            auto& e = out.at(p, d);
            const double H = t.H[p], R = t.R[p], dH = t.deltaH[p];
            if (std::isnan(H)) continue;  // invalid point
            if (!(std::abs(dH) > cfg.epsDeltaH)) continue;
            try {
                e.phiSelected = select_mixity(cfg.phiGrid, [&](double phi) {
                    return median_abs_kappa(H, R, dH, d, out.dims, phi, cfg, kappa);
                });
                e.rootsShort = solve_roots(H, dH, d, out.dims, e.phiSelected, cfg).roots;
                e.rootsLong = solve_roots(R, dH, d, out.dims, e.phiSelected, cfg).roots;
                e.quiescent = false;
            } catch (const Error&) {
                e = PointRoots{};
                e.failed = true;
            }
        }
    }
    return out;
}

}  // namespace ddp
