#pragma once

#include "ddp/curvature.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ddp {

/// Longest rank-contiguous run of points whose root-level PDI is >= 5, for one
/// (dimension, root).
struct ChainEntry {
    std::size_t dim = 0;
    std::size_t root = 0;
    std::size_t maxChainLength = 0;
    std::vector<std::size_t> members;  // in rank order
    bool triggeredShort = false;
    bool triggeredLong = false;
};

/// `categories[p]` is the PDI of (p, dim, root); values <= 0 mark invalid points
/// and are left out of the rank order. Points are ordered by R (ties by index).
ChainEntry chain_lengths(std::span<const int> categories, std::span<const double> R, std::size_t dim,
                         std::size_t root, double criticalShort, double criticalLong);

/// Gathers root `root` of dimension `d` out of a curvature field.
std::vector<int> root_categories(const CurvatureField& field, std::size_t d, std::size_t root);

/// At least `voteFraction` (default half) of the roots carry PDI >= 5.
bool point_path_dependent(std::span<const int> rootCategories, double voteFraction = 0.5);
bool point_path_dependent(std::span<const RootCurvature> roots, double voteFraction = 0.5);

/// Any valid point path dependent in any dimension.
bool system_path_dependent(const CurvatureField& field, double voteFraction = 0.5);

/// Number of roots (across every dimension) whose residual drop exceeds
/// dropThreshold is strictly greater than voteFraction * totalRoots. Roots
/// without history (nullopt) never vote.
bool energy_trigger(std::span<const std::optional<double>> drops, std::size_t totalRoots, double dropThreshold = 0.80,
                    double voteFraction = 0.20);

struct PrognosisState {
    std::optional<std::size_t> pdiOnsetIndex;
    std::set<std::size_t> chainTriggerIndices;
    std::set<std::size_t> energyTriggerIndices;
    double gti = 0.0;  // 1.0 once both trigger kinds occurred at/after onset
    std::optional<std::size_t> predictedFailureIndex;
    std::vector<std::optional<double>> previousResidual;  // [d * roots + k]
};

/// Sets the onset the first time the system is path dependent.
void record_path_dependency(PrognosisState& state, bool systemPathDependent, std::size_t t);

/// Records the triggers seen at t, recomputes GTI and latches the first prediction.
PrognosisState update_gti(PrognosisState state, bool chainTriggered, bool energyTriggered, std::size_t t);

/// max(first chain trigger >= onset, first energy trigger >= onset), when both exist.
std::optional<std::size_t> composite_prediction(const PrognosisState& state);

/// (1 - predicted/actual) * 100; nullopt when the prediction came after the
/// failure (a false negative). RangeError when actual <= 0.
std::optional<double> lead_percentage(double predictedFrame, double actualFrame);

/// Categories 1-7 plus 8 (PDI >= 5, GTI > 0, unstable in one dimension at the
/// point) and 9 (unstable in several). Same indexing as CurvatureField::values.
std::vector<int> promote_categories(const CurvatureField& field, double gti, double voteFraction = 0.5);

enum class EventKind { PdiOnset, Chain, Energy, Prediction };

struct TriggerEvent {
    std::size_t t = 0;
    EventKind kind = EventKind::PdiOnset;
    long dim = -1;
    long root = -1;
    double value = 0.0;
};

std::string to_string(EventKind kind);

/// `t=<index> event=<kind> dim=<d> root=<r> value=<x>`
std::string format_event(const TriggerEvent& e);

}  // namespace ddp
