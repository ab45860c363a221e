#pragma once

#include "ddp/curvature.hpp"
#include "ddp/frame_io.hpp"
#include "ddp/lengthscale.hpp"
#include "ddp/normalize.hpp"
#include "ddp/rank.hpp"

#include <vector>

namespace ddp {

struct PairAnalysisConfig {
    MixityConfig mixity;
    DatumOptions datum{.fallbackToZero = false, .keepPerPair = false};
    double epsDenominator = kDefaultEpsDenominator;
};

/// Datum, ranks, length-scale roots and curvature for one (earlier, later) pair.
struct PairAnalysis {
    std::size_t width = 0;
    std::size_t height = 0;
    DatumFit datum;  // of the later frame
    std::vector<RankTable> ranks;
    LengthScaleRoots roots;
    CurvatureField curvature;

    std::size_t rootFailures() const;
};

PairAnalysis analyze_pair(const Frame& earlier, const Frame& later, const PairAnalysisConfig& cfg);

}  // namespace ddp
