#include "ddp/normalize.hpp"

#include "ddp/errors.hpp"

#include <cmath>
#include <ostream>

namespace ddp {

std::optional<double> try_pair_alpha(double uA, double uB, double mBar, double epsDen) noexcept {
    const double den = uA + uB + 2.0 * mBar;
    if (!(std::abs(den) > epsDen)) return std::nullopt;
    return (uA - uB) / den;
}

double pair_alpha(double uA, double uB, double mBar, double epsDen) {
    if (auto a = try_pair_alpha(uA, uB, mBar, epsDen)) return *a;
    throw DegeneratePairError("alpha denominator uA + uB + 2*mBar vanishes");
}

double alpha_sensitivity(double uA, double uB, double mBar) noexcept {
    const double den = uA + uB + 2.0 * mBar;
    return (2.0 * uB + 2.0 * mBar) / (den * den);
}

std::optional<double> solve_pair_datum(double uA, double uB) noexcept {
    const double s = uA + uB;
    const double a = 4.0;
    const double b = 4.0 * s - 2.0;
    const double c = s * s - 2.0 * uB;
    // b^2 - 16c simplifies exactly to 4(1 - 4(uA - uB)); the short form avoids
    // cancellation between the two O(s^2) terms.
    const double disc = 4.0 * (1.0 - 4.0 * (uA - uB));
    if (!(disc >= 0.0)) return std::nullopt;
    const double root = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(root, b));
    double m;
    if (q == 0.0) {
        m = -b / (2.0 * a);
    } else {
        const double r1 = q / a;
        const double r2 = c / q;
        m = std::abs(r2) < std::abs(r1) ? r2 : r1;
    }
    if (!std::isfinite(m)) return std::nullopt;
    return m;
}

bool has_gradient_support(const Frame& f, std::size_t a, std::size_t d) {
    if (!f.valid(a)) return false;
    const std::size_t row = a / f.width();
    const std::size_t col = a % f.width();
    const double u = f.value(a, d);
    bool differs = false;

    auto axis = [&](bool hasLow, std::size_t low, bool hasHigh, std::size_t high) {
        bool any = false;
        for (auto [ok, q] : {std::pair{hasLow, low}, std::pair{hasHigh, high}}) {
            if (!ok || !f.valid(q)) continue;
            any = true;
            if (f.value(q, d) != u) differs = true;
        }
        return any;
    };

    if (f.width() > 1) {
        const bool ok = axis(col > 0, a - (col > 0 ? 1 : 0), col + 1 < f.width(), a + 1);
        if (!ok) return false;
    }
    if (f.height() > 1) {
        const bool ok = axis(row > 0, row > 0 ? a - f.width() : a, row + 1 < f.height(), a + f.width());
        if (!ok) return false;
    }
    return differs;
}

double fit_pair_datum(const Frame& f, std::size_t a, std::size_t b, std::size_t d) {
    if (a == b) throw DegenerateInputError("pair datum needs two distinct points");
    if (!f.valid(b)) throw DegenerateInputError("pair partner is an invalid point");
    if (!has_gradient_support(f, a, d)) throw DegenerateInputError("anchor point has no usable spatial gradient");
    if (auto m = solve_pair_datum(f.value(a, d), f.value(b, d))) return *m;
    throw NoRealDatumError("gradient-match quadratic has no real root");
}

DimensionDatum fit_global_datum(const Frame& f, std::size_t d, const DatumOptions& opts) {
    DimensionDatum out;
    out.dim = d;
    const std::size_t n = f.points();

    std::vector<std::uint8_t> anchor(n);
    for (std::size_t a = 0; a < n; ++a) anchor[a] = has_gradient_support(f, a, d) ? 1 : 0;

    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        if (!f.valid(a)) continue;
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a || !f.valid(b)) continue;
            std::optional<double> m;
            if (anchor[a]) m = solve_pair_datum(f.value(a, d), f.value(b, d));
            if (!m) {
                ++out.dropped;
                continue;
            }
            ++out.retained;
            sum += *m;
            if (opts.keepPerPair) out.perPair.push_back({a, b, *m});
        }
    }

    if (out.retained == 0) {
        if (!opts.fallbackToZero)
            throw DatumUnavailableError("no pair datum retained for dimension " + std::to_string(d));
        out.fallback = true;
        out.mBar = 0.0;
        out.rmsResidual = 0.0;
        return out;
    }
    out.mBar = sum / static_cast<double>(out.retained);

    // Residual pass repeats the same traversal so it works without perPair.
    double sq = 0.0;
    std::size_t counted = 0;
    for (std::size_t a = 0; a < n; ++a) {
        if (!f.valid(a) || !anchor[a]) continue;
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a || !f.valid(b)) continue;
            const double uA = f.value(a, d), uB = f.value(b, d);
            if (!solve_pair_datum(uA, uB)) continue;
            if (!try_pair_alpha(uA, uB, out.mBar)) continue;
            const double r = alpha_sensitivity(uA, uB, out.mBar) - 1.0;
            sq += r * r;
            ++counted;
        }
    }
    out.rmsResidual = counted ? std::sqrt(sq / static_cast<double>(counted)) : 0.0;
    return out;
}

DatumFit fit_datum(const Frame& f, const DatumOptions& opts) {
    DatumFit fit;
    fit.dims.reserve(f.dims());
    for (std::size_t d = 0; d < f.dims(); ++d) fit.dims.push_back(fit_global_datum(f, d, opts));
    return fit;
}

void write_datum_csv_header(std::ostream& out) {
    out << "t,dimension,retained,dropped,m_bar,rms_residual,fallback\n";
}

void write_datum_csv_rows(std::ostream& out, std::size_t timeIndex, const DatumFit& fit) {
    for (const auto& d : fit.dims)
        out << timeIndex << ',' << d.dim << ',' << d.retained << ',' << d.dropped << ',' << d.mBar << ','
            << d.rmsResidual << ',' << (d.fallback ? 1 : 0) << '\n';
}

}  // namespace ddp
