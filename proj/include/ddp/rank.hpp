#pragma once

#include "ddp/frame_io.hpp"
#include "ddp/normalize.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ddp {

// Per-point vectors below are indexed by point; invalid points hold NaN.

/// Pairwise-victory Borda count: H_A = sum over valid B != A of
/// 1 (u_A > u_B), 0.5 (tie), 0 (loss). Sums to N(N-1)/2.
std::vector<double> borda_count(const Frame& f, std::size_t d);

/// Net-alpha score placed on the Borda range:
///   R_A = (N-1)/2 + 1/2 * sum_B alpha(u_A, u_B, mBar)
/// Degenerate pairs are skipped; RankUnavailableError if every pair is.
std::vector<double> objective_rank(const Frame& f, std::size_t d, double mBar,
                                   double epsDen = kDefaultEpsDenominator);

/// curH - prevH; AlignmentError if the valid point sets differ.
std::vector<double> delta_borda(std::span<const double> prevH, std::span<const double> curH);

struct RankTable {
    std::size_t dim = 0;
    std::vector<double> prevH;
    std::vector<double> H;
    std::vector<double> R;
    std::vector<double> deltaH;
};

/// Rank tables for every dimension of a frame pair; R uses the later frame's datum.
std::vector<RankTable> build_rank_tables(const Frame& prev, const Frame& cur, const DatumFit& curDatum,
                                         double epsDen = kDefaultEpsDenominator);

void write_rank_csv_header(std::ostream& out);
void write_rank_csv_rows(std::ostream& out, std::size_t timeIndex, std::span<const RankTable> tables);

}  // namespace ddp
