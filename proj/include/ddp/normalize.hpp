#pragma once

#include "ddp/frame_io.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace ddp {

inline constexpr double kDefaultEpsDenominator = 1e-12;

/// Normalized pairwise relationship
///   alpha = (uA - uB) / (uA + uB + 2 mBar).
/// Throws DegeneratePairError when |denominator| <= epsDen.
double pair_alpha(double uA, double uB, double mBar, double epsDen = kDefaultEpsDenominator);

/// Non-throwing variant for hot loops; nullopt on a degenerate denominator.
std::optional<double> try_pair_alpha(double uA, double uB, double mBar,
                                     double epsDen = kDefaultEpsDenominator) noexcept;

/// d alpha / d uA with uB held fixed.
double alpha_sensitivity(double uA, double uB, double mBar) noexcept;

/// Smaller-magnitude real root m of 4m^2 + (4s-2)m + (s^2 - 2uB) = 0, s = uA + uB.
/// That root makes d alpha / d uA == 1 at A. nullopt when no real root exists.
std::optional<double> solve_pair_datum(double uA, double uB) noexcept;

/// True when point `a` can anchor a gradient match in dimension `d`: it is
/// valid, has a valid grid neighbour along every axis of extent > 1, and at
/// least one neighbour differs from it in that channel.
bool has_gradient_support(const Frame& f, std::size_t a, std::size_t d);

/// Per-pair datum m for the ordered pair (A, B) in dimension d.
/// Throws DegenerateInputError when A lacks gradient support or B is invalid,
/// NoRealDatumError when the quadratic has no real root.
double fit_pair_datum(const Frame& f, std::size_t a, std::size_t b, std::size_t d);

struct PairDatum {
    std::size_t a = 0;
    std::size_t b = 0;
    double m = 0.0;
};

struct DimensionDatum {
    std::size_t dim = 0;
    double mBar = 0.0;
    double rmsResidual = 0.0;
    std::size_t retained = 0;
    std::size_t dropped = 0;
    bool fallback = false;  // mBar defaulted to 0 because no pair qualified
    std::vector<PairDatum> perPair;
};

struct DatumOptions {
    bool fallbackToZero = false;
    bool keepPerPair = true;
};

/// Least-squares constant over every retained per-pair datum of dimension d
/// (the arithmetic mean, summed in a fixed order), plus the RMS of
/// (d alpha/d uA - 1) over the retained pairs when alpha uses that constant.
/// Throws DatumUnavailableError when nothing is retained and fallback is off.
DimensionDatum fit_global_datum(const Frame& f, std::size_t d, const DatumOptions& opts = {});

struct DatumFit {
    std::vector<DimensionDatum> dims;

    double mBar(std::size_t d) const { return dims.at(d).mBar; }
};

DatumFit fit_datum(const Frame& f, const DatumOptions& opts = {});

/// CSV: dimension,retained,dropped,m_bar,rms_residual,fallback
void write_datum_csv_header(std::ostream& out);
void write_datum_csv_rows(std::ostream& out, std::size_t timeIndex, const DatumFit& fit);

}  // namespace ddp
