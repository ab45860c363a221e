#include "ddp/rank.hpp"

#include "ddp/errors.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace ddp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t require_pairs(const Frame& f) {
    const std::size_t n = f.validCount();
    if (n < 2) throw DegenerateInputError("ranking needs at least two valid points, have " + std::to_string(n));
    return n;
}
}  // namespace

std::vector<double> borda_count(const Frame& f, std::size_t d) {
    require_pairs(f);
    const std::size_t n = f.points();
    std::vector<double> h(n, kNaN);
    for (std::size_t a = 0; a < n; ++a) {
        if (!f.valid(a)) continue;
        const double ua = f.value(a, d);
        // Half-points are exact in binary, so the sum is exact.
        double score = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a || !f.valid(b)) continue;
            const double ub = f.value(b, d);
            if (ua > ub)
                score += 1.0;
            else if (ua == ub)
                score += 0.5;
        }
        h[a] = score;
    }
    return h;
}

std::vector<double> objective_rank(const Frame& f, std::size_t d, double mBar, double epsDen) {
    const std::size_t valid = require_pairs(f);
    const std::size_t n = f.points();
    const double centre = 0.5 * static_cast<double>(valid - 1);
    std::vector<double> r(n, kNaN);
    std::size_t used = 0;
    for (std::size_t a = 0; a < n; ++a) {
        if (!f.valid(a)) continue;
        const double ua = f.value(a, d);
        double net = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a || !f.valid(b)) continue;
            if (auto alpha = try_pair_alpha(ua, f.value(b, d), mBar, epsDen)) {
                net += *alpha;
                ++used;
            }
        }
        r[a] = centre + 0.5 * net;
    }
    if (used == 0) throw RankUnavailableError("every pair in dimension " + std::to_string(d) + " is degenerate");
    return r;
}

std::vector<double> delta_borda(std::span<const double> prevH, std::span<const double> curH) {
    if (prevH.size() != curH.size()) throw AlignmentError("frames have different point counts");
    std::vector<double> out(curH.size(), kNaN);
    for (std::size_t p = 0; p < curH.size(); ++p) {
        const bool a = std::isnan(prevH[p]), b = std::isnan(curH[p]);
        if (a != b) throw AlignmentError("valid point sets differ at point " + std::to_string(p));
        if (!a) out[p] = curH[p] - prevH[p];
    }
    return out;
}

std::vector<RankTable> build_rank_tables(const Frame& prev, const Frame& cur, const DatumFit& curDatum,
                                         double epsDen) {
    if (prev.points() != cur.points() || prev.dims() != cur.dims())
        throw AlignmentError("frame pair shapes differ");
    std::vector<RankTable> tables(cur.dims());
    for (std::size_t d = 0; d < cur.dims(); ++d) {
        auto& t = tables[d];
        t.dim = d;
        t.prevH = borda_count(prev, d);
        t.H = borda_count(cur, d);
        t.deltaH = delta_borda(t.prevH, t.H);
        t.R = objective_rank(cur, d, curDatum.mBar(d), epsDen);
    }
    return tables;
}

void write_rank_csv_header(std::ostream& out) { out << "t,dimension,point,H,R,delta_H\n"; }

void write_rank_csv_rows(std::ostream& out, std::size_t timeIndex, std::span<const RankTable> tables) {
    for (const auto& t : tables)
        for (std::size_t p = 0; p < t.H.size(); ++p)
            out << timeIndex << ',' << t.dim << ',' << p << ',' << t.H[p] << ',' << t.R[p] << ',' << t.deltaH[p]
                << '\n';
}

}  // namespace ddp
