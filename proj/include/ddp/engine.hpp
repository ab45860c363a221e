#pragma once

#include "ddp/aggregate.hpp"
#include "ddp/config.hpp"
#include "ddp/frame_io.hpp"
#include "ddp/pair_analysis.hpp"
#include "ddp/prognosis.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ddp {

enum class ChainRecalc { Every, Once };
enum class ChainTrigger { Long, Short, Either };

struct EngineConfig {
    std::size_t stride = 1;
    std::optional<WindowSpec> window;
    std::size_t frameOffset = 0;       // added to file indices when reporting frames
    double dropThreshold = 0.80;
    double rootVoteFraction = 0.5;
    double systemDropVoteFraction = 0.20;
    ChainRecalc chainRecalc = ChainRecalc::Every;
    ChainTrigger chainTrigger = ChainTrigger::Long;
    std::size_t dims = 4;
    PairAnalysisConfig analysis;

    void validate() const;

    /// Applies recognised keys; unknown keys raise ConfigError.
    void apply(const KeyValues& kv);
    /// Every setting, in the form `apply` accepts.
    std::vector<std::pair<std::string, std::string>> describe() const;
};

std::string to_string(ChainRecalc c);
std::string to_string(ChainTrigger c);
ChainRecalc parse_chain_recalc(const std::string& s);
ChainTrigger parse_chain_trigger(const std::string& s);

/// Per-root zoom-out outcome of one pair.
struct RootOutcome {
    std::size_t dim = 0;
    std::size_t root = 0;
    double residual = 0.0;
    std::optional<double> drop;
    double criticalShort = 0.0;
    double criticalLong = 0.0;
    std::size_t maxChainLength = 0;
    bool chainTriggered = false;
};

struct PairOutcome {
    std::size_t t = 0;      // 1-based pair index
    std::size_t frame = 0;  // frame number of the later frame
    bool analyzed = false;
    std::string skipReason;
    bool pathDependent = false;
    bool chainTriggered = false;
    std::size_t energyVotes = 0;
    bool energyTriggered = false;
    double gti = 0.0;
    bool predictionIssued = false;  // the prediction latched on this pair
    std::size_t pathDependentPoints = 0;
    std::vector<RootOutcome> roots;
    std::optional<PairAnalysis> analysis;  // raw-level analysis
    std::vector<int> categories;           // with 8/9 promotion, CurvatureField layout
};

/// Sequential fold of the pair pipeline over time.
class Engine {
public:
    explicit Engine(EngineConfig cfg);

    /// Runs one strided pair; `earlier` and `later` are full frames (the window
    /// is applied here).
    PairOutcome process_pair(const Frame& earlier, const Frame& later);

    const EngineConfig& config() const { return cfg_; }
    const PrognosisState& state() const { return state_; }
    const std::vector<TriggerEvent>& events() const { return events_; }
    std::size_t pairs() const { return t_; }
    std::size_t skipped() const { return skipped_; }
    std::optional<std::size_t> predictedFrame() const;
    std::optional<std::size_t> frameOf(std::size_t t) const;

private:
    EngineConfig cfg_;
    PrognosisState state_;
    std::vector<TriggerEvent> events_;
    std::vector<std::size_t> frames_;  // frames_[t-1]
    std::optional<std::array<std::vector<double>, 2>> frozenCritical_;
    std::size_t t_ = 0;
    std::size_t skipped_ = 0;
};

struct AnalyzeResult {
    std::string runId;
    std::size_t pairs = 0;
    std::size_t skipped = 0;
    PrognosisState state;
    std::vector<TriggerEvent> events;
    std::optional<std::size_t> predictedFrame;
    std::string report;  // contents of report.txt
};

/// Analyses a frame directory. When `outDir` is set, pairs.csv, roots.csv,
/// pdi_histogram.csv, datum.csv, triggers.log and report.txt are written there.
/// A manifest.txt next to the frames adds ground truth to the report.
/// Throws InsufficientFramesError when fewer than stride+1 frames exist.
AnalyzeResult run_analyze(const std::filesystem::path& frameDir, const EngineConfig& cfg,
                          const std::optional<std::filesystem::path>& outDir = std::nullopt);

/// Same, over in-memory frames.
AnalyzeResult run_analyze(std::span<const Frame> frames, const EngineConfig& cfg, const std::string& runId,
                          const std::optional<std::filesystem::path>& outDir = std::nullopt,
                          const std::optional<std::size_t>& actualFailureFrame = std::nullopt);

enum class Outcome { Lead, Early, Miss, FalsePositive, TrueNegative };

std::string to_string(Outcome o);

struct ScoreResult {
    std::string runId;
    Outcome outcome = Outcome::TrueNegative;
    std::optional<std::size_t> predictedFrame;
    std::optional<std::size_t> actualFrame;
    std::optional<double> leadPercent;
};

/// Lead within [0, maxLeadPercent] is a Lead, beyond it Early; a prediction
/// after the burst or none at all is a Miss.
ScoreResult score(std::optional<std::size_t> predictedFrame, bool failure, std::optional<std::size_t> actualFrame,
                  double maxLeadPercent = 30.0);

/// Reads report.txt and manifest.txt; throws RunMismatchError when run ids differ.
ScoreResult run_score(const std::filesystem::path& report, const std::filesystem::path& manifest);

std::string format_score(const ScoreResult& s);

/// Shortest round-trip decimal form.
std::string format_real(double v);

}  // namespace ddp
