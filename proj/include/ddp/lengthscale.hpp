#pragma once

#include "ddp/rank.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ddp {

inline constexpr double kDefaultEpsDeltaH = 1e-9;

std::vector<double> default_phi_grid();

/// Mode mixity between pure dilatation and pure shear.
struct MixityConfig {
    double nuVolumetric = -1.0;
    double nuShear = 0.5;
    std::vector<double> phiGrid = default_phi_grid();
    /// Pins the effective modulus regardless of phi (used to isolate the root solve).
    std::optional<double> modulusOverride;
    double epsDeltaH = kDefaultEpsDeltaH;

    void validate() const;
};

/// E(phi) = phi / (2(1 + nu_s)) + (1 - phi) / (3(1 - 2 nu_v)); with the default
/// Poisson ratios this is phi/3 + (1 - phi)/9.
double effective_modulus(double phi, const MixityConfig& cfg);

/// 2^dims.
std::size_t root_count(std::size_t dims);

/// Sign of root `k` in dimension `d`: bit d of the sign pattern k.
double root_sign(std::size_t k, std::size_t d) noexcept;

struct RootSolution {
    bool quiescent = false;
    double magnitude = 0.0;
    std::vector<double> roots;  // 2^dims signed values, empty when quiescent
};

/// Reduced conservation relation E * value / L^2 = deltaH (time step = 1):
/// |L| = sqrt(|E * value / deltaH|), stamped with every sign pattern over the
/// dims. |deltaH| <= epsDeltaH is quiescent; a non-finite ratio throws RootSolveError.
RootSolution solve_roots(double value, double deltaH, std::size_t d, std::size_t dims, double phi,
                         const MixityConfig& cfg);

/// Magnitude-only form of solve_roots; nullopt when quiescent.
std::optional<double> root_magnitude(double value, double deltaH, double modulus, double epsDeltaH);

struct PointRoots {
    bool quiescent = true;
    bool failed = false;  // root solve or mixity selection failed; treated as quiescent downstream
    double phiSelected = 0.0;
    std::vector<double> rootsShort;  // L, from H
    std::vector<double> rootsLong;   // L~, from R
};

struct LengthScaleRoots {
    std::size_t dims = 0;
    std::size_t points = 0;
    std::vector<PointRoots> entries;  // [d * points + p]

    const PointRoots& at(std::size_t p, std::size_t d) const { return entries[d * points + p]; }
    PointRoots& at(std::size_t p, std::size_t d) { return entries[d * points + p]; }
};

/// kappa(H, R, L, L~). Supplied by the curvature stage.
using KappaFn = std::function<double(double H, double R, double L, double Ltilde)>;

/// Grid phi minimising `score(phi)` (median |kappa|); ties resolve to the
/// smaller phi. Non-finite scores are skipped; MixityUnavailableError when
/// every candidate is non-finite.
double select_mixity(std::span<const double> phiGrid, const std::function<double(double)>& score);

/// Median |kappa| across the roots produced with modulus E(phi).
double median_abs_kappa(double H, double R, double deltaH, std::size_t d, std::size_t dims, double phi,
                        const MixityConfig& cfg, const KappaFn& kappa);

/// Short roots from H, long roots from R, sharing sign-pattern indexing;
/// phi chosen per (point, dimension) by select_mixity.
LengthScaleRoots build_roots(std::span<const RankTable> tables, const MixityConfig& cfg, const KappaFn& kappa);

}  // namespace ddp
