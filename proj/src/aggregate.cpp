#include "ddp/aggregate.hpp"

#include "ddp/errors.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

namespace ddp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Partition unit_partition(std::size_t extent) {
    Partition p(extent + 1);
    for (std::size_t i = 0; i <= extent; ++i) p[i] = i;
    return p;
}
}  // namespace

Partition halve_partition(const Partition& blocks) {
    const std::size_t n = blocks.size() - 1;
    Partition out{blocks.front()};
    const std::size_t merged = n / 2;
    for (std::size_t j = 1; j < merged; ++j) out.push_back(blocks[2 * j]);
    out.push_back(blocks.back());
    return out;
}

Partition thirds_partition(std::size_t extent) {
    if (extent < 3) throw ZoomOutUnavailableError("cannot split an extent below 3 into three blocks");
    const std::size_t step = extent / 3;
    return {0, step, 2 * step, extent};
}

Frame aggregate_frame(const Frame& f, const Partition& rows, const Partition& cols) {
    if (rows.back() != f.height() || cols.back() != f.width())
        throw RangeError("partition does not cover the frame");
    Frame out(cols.size() - 1, rows.size() - 1, f.dims(), f.timeIndex());
    std::vector<double> sum(f.dims());
    for (std::size_t br = 0; br + 1 < rows.size(); ++br)
        for (std::size_t bc = 0; bc + 1 < cols.size(); ++bc) {
            std::fill(sum.begin(), sum.end(), 0.0);
            std::size_t count = 0;
            for (std::size_t r = rows[br]; r < rows[br + 1]; ++r)
                for (std::size_t c = cols[bc]; c < cols[bc + 1]; ++c) {
                    const std::size_t p = f.index(r, c);
                    if (!f.valid(p)) continue;
                    ++count;
                    for (std::size_t d = 0; d < f.dims(); ++d) sum[d] += f.value(p, d);
                }
            const std::size_t q = out.index(br, bc);
            out.setValid(q, count > 0);
            for (std::size_t d = 0; d < f.dims(); ++d)
                out.setValue(q, d, count ? sum[d] / static_cast<double>(count) : kNaN);
        }
    return out;
}

Pyramid build_pyramid(const Frame& earlier, const Frame& later, const PairAnalysisConfig& cfg,
                      std::optional<PairAnalysis> level0) {
    if (later.width() < 3 || later.height() < 3)
        throw ZoomOutUnavailableError("zoom-out needs a window of at least 3x3");

    Pyramid pyr;
    pyr.totalPoints = later.points();

    std::vector<std::pair<Partition, Partition>> grids;
    Partition rows = unit_partition(later.height());
    Partition cols = unit_partition(later.width());
    grids.emplace_back(rows, cols);
    while ((rows.size() - 1) / 2 >= 3 && (cols.size() - 1) / 2 >= 3) {
        rows = halve_partition(rows);
        cols = halve_partition(cols);
        grids.emplace_back(rows, cols);
    }
    if (rows.size() - 1 != 3 || cols.size() - 1 != 3)
        grids.emplace_back(thirds_partition(later.height()), thirds_partition(later.width()));

    for (std::size_t i = 0; i < grids.size(); ++i) {
        PyramidLevel lvl;
        lvl.rowBlocks = grids[i].first;
        lvl.colBlocks = grids[i].second;
        lvl.factor = static_cast<double>(pyr.totalPoints) / static_cast<double>(lvl.points());
        if (i == 0) {
            lvl.earlier = earlier;
            lvl.later = later;
            lvl.analysis = level0 ? std::move(*level0) : analyze_pair(earlier, later, cfg);
        } else {
            lvl.earlier = aggregate_frame(earlier, lvl.rowBlocks, lvl.colBlocks);
            lvl.later = aggregate_frame(later, lvl.rowBlocks, lvl.colBlocks);
            lvl.analysis = analyze_pair(lvl.earlier, lvl.later, cfg);
        }
        pyr.levels.push_back(std::move(lvl));
    }
    return pyr;
}

ZoomOutLevel level_statistics(const PairAnalysis& analysis, std::size_t d, std::size_t root, double factor) {
    const auto& field = analysis.curvature;
    ZoomOutLevel lvl;
    lvl.aggregationFactor = factor;
    lvl.points = field.points;
    double sumK = 0.0, sumS = 0.0, sumL = 0.0;
    std::size_t nK = 0, nS = 0, nL = 0;
    for (std::size_t p = 0; p < field.points; ++p) {
        if (!field.validPoint[p]) continue;
        const auto& rc = field.at(p, d, root);
        sumK += std::abs(rc.kappa);
        ++nK;
        if (rc.quiescent) {
            // dH = 0 sends L to infinity, so both thresholds vanish
            ++nS;
            ++nL;
            continue;
        }
        if (std::isfinite(rc.kappaShort)) {
            sumS += std::abs(rc.kappaShort);
            ++nS;
        }
        if (std::isfinite(rc.kappaLong)) {
            sumL += std::abs(rc.kappaLong);
            ++nL;
        }
    }
    lvl.meanAbsKappa = nK ? sumK / static_cast<double>(nK) : 0.0;
    lvl.meanKappaShort = nS ? sumS / static_cast<double>(nS) : kNaN;
    lvl.meanKappaLong = nL ? sumL / static_cast<double>(nL) : kNaN;
    return lvl;
}

ZoomOutProfile zoom_out_profile(const Pyramid& pyramid, std::size_t d, std::size_t root) {
    ZoomOutProfile prof;
    prof.dim = d;
    prof.root = root;
    for (const auto& lvl : pyramid.levels) prof.levels.push_back(level_statistics(lvl.analysis, d, root, lvl.factor));
    return prof;
}

double residual_curvature(const ZoomOutProfile& profile) {
    if (profile.levels.empty()) throw ZoomOutUnavailableError("profile has no levels");
    return std::abs(profile.levels.back().meanAbsKappa);
}

double critical_chain_length(const ZoomOutProfile& profile, std::size_t totalPoints, ChainVariant variant,
                             double logBase) {
    if (profile.levels.size() < 2) throw ZoomOutUnavailableError("critical chain length needs at least two levels");
    const double total = static_cast<double>(totalPoints);
    const auto& first = profile.levels.front();
    const double threshold = variant == ChainVariant::Long ? first.meanKappaLong : first.meanKappaShort;
    if (!std::isfinite(threshold) || threshold <= 0.0) return total;

    const double lnBase = std::log(logBase);
    const std::size_t n = profile.levels.size();
    std::vector<double> xs(n), gap(n);
    for (std::size_t i = 0; i < n; ++i) {
        // mirrored position: the raw level sits at 0, coarser levels to the left
        xs[i] = -std::log(profile.levels[i].aggregationFactor) / lnBase;
        gap[i] = profile.levels[i].meanAbsKappa - threshold;
    }

    std::optional<double> crossing;
    if (gap[0] == 0.0) crossing = xs[0];
    for (std::size_t i = 0; !crossing && i + 1 < n; ++i) {
        if (gap[i + 1] == 0.0) {
            crossing = xs[i + 1];
        } else if ((gap[i] < 0.0) != (gap[i + 1] < 0.0)) {
            crossing = xs[i] + (xs[i + 1] - xs[i]) * gap[i] / (gap[i] - gap[i + 1]);
        }
    }
    if (!crossing) {
        const bool above = std::all_of(gap.begin(), gap.end(), [](double g) { return g > 0.0; });
        return above ? 1.0 : total;
    }

    const double factor = std::pow(logBase, -*crossing);
    const double coarsest = static_cast<double>(profile.levels.back().points);
    const double fractional = coarsest / factor;
    return std::clamp(fractional * (total / coarsest), 1.0, total);
}

std::optional<double> residual_drop(double prev, double cur, double eps) {
    if (!(prev > eps)) return std::nullopt;
    return (prev - cur) / prev;
}

void write_profile_csv_header(std::ostream& out) {
    out << "t,dimension,root,level,factor,points,mean_abs_kappa,kappa_short,kappa_long\n";
}

void write_profile_csv_rows(std::ostream& out, std::size_t timeIndex, const ZoomOutProfile& profile) {
    for (std::size_t i = 0; i < profile.levels.size(); ++i) {
        const auto& l = profile.levels[i];
        out << timeIndex << ',' << profile.dim << ',' << profile.root << ',' << i << ',' << l.aggregationFactor << ','
            << l.points << ',' << l.meanAbsKappa << ',' << l.meanKappaShort << ',' << l.meanKappaLong << '\n';
    }
}

}  // namespace ddp
