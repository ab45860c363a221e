#include "ddp/prognosis.hpp"

#include "ddp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ddp {

ChainEntry chain_lengths(std::span<const int> categories, std::span<const double> R, std::size_t dim,
                         std::size_t root, double criticalShort, double criticalLong) {
    if (categories.size() != R.size()) throw AlignmentError("category and rank vectors differ in length");
    std::vector<std::size_t> order;
    for (std::size_t p = 0; p < R.size(); ++p)
        if (categories[p] > 0 && !std::isnan(R[p])) order.push_back(p);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return R[a] < R[b]; });

    ChainEntry out;
    out.dim = dim;
    out.root = root;
    std::size_t runStart = 0, runLen = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (categories[order[i]] >= 5) {
            if (runLen == 0) runStart = i;
            ++runLen;
            if (runLen > out.maxChainLength) {
                out.maxChainLength = runLen;
                out.members.assign(order.begin() + static_cast<long>(runStart),
                                   order.begin() + static_cast<long>(i + 1));
            }
        } else {
            runLen = 0;
        }
    }
    const double len = static_cast<double>(out.maxChainLength);
    out.triggeredShort = out.maxChainLength > 0 && len > criticalShort;
    out.triggeredLong = out.maxChainLength > 0 && len > criticalLong;
    return out;
}

std::vector<int> root_categories(const CurvatureField& field, std::size_t d, std::size_t root) {
    std::vector<int> out(field.points, 0);
    for (std::size_t p = 0; p < field.points; ++p)
        if (field.validPoint[p]) out[p] = field.at(p, d, root).category;
    return out;
}

bool point_path_dependent(std::span<const int> rootCategories, double voteFraction) {
    if (rootCategories.empty()) return false;
    const auto hits = std::count_if(rootCategories.begin(), rootCategories.end(), [](int c) { return c >= 5; });
    return hits > 0 && static_cast<double>(hits) >= voteFraction * static_cast<double>(rootCategories.size());
}

bool point_path_dependent(std::span<const RootCurvature> roots, double voteFraction) {
    std::vector<int> cats(roots.size());
    std::transform(roots.begin(), roots.end(), cats.begin(), [](const RootCurvature& r) { return r.category; });
    return point_path_dependent(cats, voteFraction);
}

bool system_path_dependent(const CurvatureField& field, double voteFraction) {
    for (std::size_t d = 0; d < field.dims; ++d)
        for (std::size_t p = 0; p < field.points; ++p)
            if (field.validPoint[p] && point_path_dependent(field.rootsAt(p, d), voteFraction)) return true;
    return false;
}

bool energy_trigger(std::span<const std::optional<double>> drops, std::size_t totalRoots, double dropThreshold,
                    double voteFraction) {
    if (totalRoots == 0) return false;
    const auto votes = std::count_if(drops.begin(), drops.end(),
                                     [&](const std::optional<double>& d) { return d && *d > dropThreshold; });
    return static_cast<double>(votes) > voteFraction * static_cast<double>(totalRoots);
}

void record_path_dependency(PrognosisState& state, bool systemPathDependent, std::size_t t) {
    if (systemPathDependent && !state.pdiOnsetIndex) state.pdiOnsetIndex = t;
}

namespace {
std::optional<std::size_t> first_at_or_after(const std::set<std::size_t>& s, std::size_t from) {
    auto it = s.lower_bound(from);
    if (it == s.end()) return std::nullopt;
    return *it;
}
}  // namespace

std::optional<std::size_t> composite_prediction(const PrognosisState& state) {
    if (!state.pdiOnsetIndex) return std::nullopt;
    const auto chain = first_at_or_after(state.chainTriggerIndices, *state.pdiOnsetIndex);
    const auto energy = first_at_or_after(state.energyTriggerIndices, *state.pdiOnsetIndex);
    if (!chain || !energy) return std::nullopt;
    return std::max(*chain, *energy);
}

PrognosisState update_gti(PrognosisState state, bool chainTriggered, bool energyTriggered, std::size_t t) {
    if (chainTriggered) state.chainTriggerIndices.insert(t);
    if (energyTriggered) state.energyTriggerIndices.insert(t);
    const auto composite = composite_prediction(state);
    state.gti = composite ? 1.0 : 0.0;
    if (composite && !state.predictedFailureIndex) state.predictedFailureIndex = composite;
    return state;
}

std::optional<double> lead_percentage(double predictedFrame, double actualFrame) {
    if (!(actualFrame > 0.0)) throw RangeError("actual failure frame must be positive");
    if (predictedFrame > actualFrame) return std::nullopt;
    return (1.0 - predictedFrame / actualFrame) * 100.0;
}

std::vector<int> promote_categories(const CurvatureField& field, double gti, double voteFraction) {
    std::vector<int> out(field.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = field.values[i].category;
    if (!(gti > 0.0)) return out;
    for (std::size_t p = 0; p < field.points; ++p) {
        if (!field.validPoint[p]) continue;
        std::size_t unstable = 0;
        for (std::size_t d = 0; d < field.dims; ++d) unstable += point_path_dependent(field.rootsAt(p, d), voteFraction) ? 1 : 0;
        if (unstable == 0) continue;
        const int promoted = unstable > 1 ? 9 : 8;
        for (std::size_t d = 0; d < field.dims; ++d)
            for (std::size_t k = 0; k < field.roots; ++k) {
                const std::size_t idx = (d * field.points + p) * field.roots + k;
                if (out[idx] >= 5) out[idx] = promoted;
            }
    }
    return out;
}

std::string to_string(EventKind kind) {
    switch (kind) {
        case EventKind::PdiOnset: return "pdi_onset";
        case EventKind::Chain: return "chain";
        case EventKind::Energy: return "energy";
        case EventKind::Prediction: return "prediction";
    }
    return "unknown";
}

std::string format_event(const TriggerEvent& e) {
    std::ostringstream out;
    out << "t=" << e.t << " event=" << to_string(e.kind) << " dim=" << e.dim << " root=" << e.root
        << " value=" << e.value;
    return out.str();
}

}  // namespace ddp
