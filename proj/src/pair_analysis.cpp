#include "ddp/pair_analysis.hpp"

#include "ddp/errors.hpp"

namespace ddp {

std::size_t PairAnalysis::rootFailures() const {
    std::size_t n = 0;
    for (const auto& e : roots.entries) n += e.failed ? 1 : 0;
    return n;
}

PairAnalysis analyze_pair(const Frame& earlier, const Frame& later, const PairAnalysisConfig& cfg) {
    if (earlier.width() != later.width() || earlier.height() != later.height() || earlier.dims() != later.dims())
        throw AlignmentError("frame pair shapes differ");
    PairAnalysis a;
    a.width = later.width();
    a.height = later.height();
    a.datum = fit_datum(later, cfg.datum);
    a.ranks = build_rank_tables(earlier, later, a.datum, cfg.epsDenominator);
    a.roots = build_roots(a.ranks, cfg.mixity, composite_kappa);
    a.curvature = evaluate_curvature(a.ranks, a.roots, cfg.mixity);
    return a;
}

}  // namespace ddp
