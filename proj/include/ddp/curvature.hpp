#pragma once

#include "ddp/lengthscale.hpp"
#include "ddp/rank.hpp"

#include <array>
#include <cstdint>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ddp {

struct CurvatureValue {
    double kappa = 0.0;
    bool quiescent = false;
};

/// Change of gradient from H/L to R/L~ over the planar-curvature denominator:
///   kappa = (R/L~ - H/L) / (L * (1 + (H/L)^2)^1.5)
/// A zero L or L~ yields a quiescent zero.
CurvatureValue composite_curvature(double H, double R, double L, double Ltilde) noexcept;

/// Plain kappa for use as a KappaFn.
double composite_kappa(double H, double R, double L, double Ltilde) noexcept;

/// Ratio tests against the thresholds (strict: a ratio of exactly 1 is stable).
///   1: both < 1      2: short only    3: long only
///   both: 4 if a mixity change rescues the root, else 5 / 6 / 7 when the
///   unstable condition holds in 1 / 2 / >2 dimensions at the point.
int categorize_pdi(double absKappa, double kappaShort, double kappaLong, bool mixityRescue,
                   std::size_t crossDimCount);

/// True when both ratios exceed 1 (the category 4-7 region).
bool both_unstable(double absKappa, double kappaShort, double kappaLong) noexcept;

struct RootCurvature {
    double kappa = 0.0;
    double kappaShort = 0.0;  // 1/L
    double kappaLong = 0.0;   // 1/L~
    int category = 1;
    bool quiescent = true;
};

struct CurvatureField {
    std::size_t dims = 0;
    std::size_t points = 0;
    std::size_t roots = 0;
    std::vector<RootCurvature> values;      // [(d * points + p) * roots + k]
    std::vector<std::uint8_t> unstableDim;  // [d * points + p]: >= half the roots in category-5 condition
    std::vector<std::uint8_t> validPoint;   // [p]

    const RootCurvature& at(std::size_t p, std::size_t d, std::size_t k) const {
        return values[(d * points + p) * roots + k];
    }
    RootCurvature& at(std::size_t p, std::size_t d, std::size_t k) { return values[(d * points + p) * roots + k]; }

    std::span<const RootCurvature> rootsAt(std::size_t p, std::size_t d) const {
        return {values.data() + (d * points + p) * roots, roots};
    }
};

/// Evaluates kappa and thresholds for every root and assigns categories 1-7.
CurvatureField evaluate_curvature(std::span<const RankTable> tables, const LengthScaleRoots& roots,
                                  const MixityConfig& cfg);

/// Whether some phi in the grid brings both ratios of root k below 1.
bool mixity_rescue(double H, double R, double deltaH, std::size_t d, std::size_t dims, std::size_t k,
                   const MixityConfig& cfg);

/// Category histogram (categories 1..9) for one dimension, as point fractions
/// where each root contributes 1/roots of its point.
std::array<double, 10> pdi_histogram(const CurvatureField& field, std::size_t d, std::span<const int> categories = {});

void write_pdi_csv_header(std::ostream& out);
void write_pdi_csv_rows(std::ostream& out, std::size_t timeIndex, const CurvatureField& field,
                        std::span<const int> categories = {});

}  // namespace ddp
