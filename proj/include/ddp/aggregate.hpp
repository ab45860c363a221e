#pragma once

#include "ddp/frame_io.hpp"
#include "ddp/pair_analysis.hpp"

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <vector>

namespace ddp {

/// Block boundaries along one axis, [b0 = 0, b1, ..., bk = extent].
using Partition = std::vector<std::size_t>;

/// Merges neighbouring blocks pairwise; an odd trailing block joins the last pair.
Partition halve_partition(const Partition& blocks);

/// Splits [0, extent) into three blocks of extent/3, the remainder joining the last.
Partition thirds_partition(std::size_t extent);

/// Channel means over the valid points of each block; a block with no valid
/// point is invalid.
Frame aggregate_frame(const Frame& f, const Partition& rows, const Partition& cols);

struct PyramidLevel {
    Partition rowBlocks;
    Partition colBlocks;
    double factor = 1.0;  // raw points per aggregated point
    Frame earlier;
    Frame later;
    PairAnalysis analysis;

    std::size_t rows() const { return rowBlocks.size() - 1; }
    std::size_t cols() const { return colBlocks.size() - 1; }
    std::size_t points() const { return rows() * cols(); }
};

struct Pyramid {
    std::size_t totalPoints = 0;
    std::vector<PyramidLevel> levels;
};

/// Zoom-out pyramid: the raw window, successive 2x2 block means while both
/// axes keep at least 3 blocks, then a forced 3x3 partition of the window.
/// The pair pipeline is re-run at every level. `level0` may carry an
/// analysis of the raw pair that was already computed.
Pyramid build_pyramid(const Frame& earlier, const Frame& later, const PairAnalysisConfig& cfg,
                      std::optional<PairAnalysis> level0 = std::nullopt);

struct ZoomOutLevel {
    double aggregationFactor = 1.0;
    std::size_t points = 0;
    double meanAbsKappa = 0.0;
    double meanKappaShort = 0.0;  // mean |1/L| over valid points, 0 where quiescent; NaN if none
    double meanKappaLong = 0.0;   // mean |1/L~|
};

struct ZoomOutProfile {
    std::size_t dim = 0;
    std::size_t root = 0;
    std::vector<ZoomOutLevel> levels;
};

ZoomOutLevel level_statistics(const PairAnalysis& analysis, std::size_t d, std::size_t root, double factor);

ZoomOutProfile zoom_out_profile(const Pyramid& pyramid, std::size_t d, std::size_t root);

/// |mean |kappa|| at the coarsest level.
double residual_curvature(const ZoomOutProfile& profile);

enum class ChainVariant { Short, Long };

/// Critical chain length (in raw points) from the mirrored zoom-out construction.
///
/// The mean |kappa| polyline over log(factor) is mirrored to the left of the
/// raw level; the level-0 threshold (Kappa-long or Kappa-short) is extended
/// leftwards as a horizontal line and the first crossing, walking away from
/// the raw level, is interpolated linearly. The crossing factor f* becomes a
/// fractional point count coarsestPoints / f* of the aggregated frame, scaled
/// by totalPoints / coarsestPoints and clamped to [1, totalPoints].
///
/// Threshold above the whole curve (or non-positive / non-finite): totalPoints.
/// Threshold below the whole curve: 1.
/// Throws ZoomOutUnavailableError with fewer than two levels.
double critical_chain_length(const ZoomOutProfile& profile, std::size_t totalPoints, ChainVariant variant,
                             double logBase = std::numbers::e);

/// (prev - cur) / prev; nullopt when prev <= eps.
std::optional<double> residual_drop(double prev, double cur, double eps = 1e-12);

void write_profile_csv_header(std::ostream& out);
void write_profile_csv_rows(std::ostream& out, std::size_t timeIndex, const ZoomOutProfile& profile);

}  // namespace ddp
