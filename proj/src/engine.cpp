#include "ddp/engine.hpp"

#include "ddp/errors.hpp"
#include "ddp/synth.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ddp {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_string(ChainRecalc c) { return c == ChainRecalc::Every ? "every" : "once"; }

std::string to_string(ChainTrigger c) {
    switch (c) {
        case ChainTrigger::Long: return "long";
        case ChainTrigger::Short: return "short";
        case ChainTrigger::Either: return "either";
    }
    return "long";
}

ChainRecalc parse_chain_recalc(const std::string& s) {
    if (s == "every") return ChainRecalc::Every;
    if (s == "once") return ChainRecalc::Once;
    throw ConfigError("chain_recalc must be every or once, got '" + s + "'");
}

ChainTrigger parse_chain_trigger(const std::string& s) {
    if (s == "long") return ChainTrigger::Long;
    if (s == "short") return ChainTrigger::Short;
    if (s == "either") return ChainTrigger::Either;
    throw ConfigError("chain_trigger must be long, short or either, got '" + s + "'");
}

void EngineConfig::validate() const {
    if (stride == 0) throw ConfigError("stride must be at least 1");
    if (dims < 2) throw ConfigError("dims must be at least 2");
    auto unit = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " must lie in (0,1)");
    };
    unit(dropThreshold, "drop_threshold");
    unit(rootVoteFraction, "root_vote_fraction");
    unit(systemDropVoteFraction, "system_drop_vote_fraction");
    if (!(analysis.epsDenominator > 0.0)) throw ConfigError("eps_denominator must be positive");
    analysis.mixity.validate();
}

void EngineConfig::apply(const KeyValues& kv) {
    kv.rejectUnknown({"stride", "window", "frame_offset", "drop_threshold", "root_vote_fraction",
                      "system_drop_vote_fraction", "chain_recalc", "chain_trigger", "dims", "phi_grid",
                      "eps_denominator", "eps_delta_h", "nu_volumetric", "nu_shear", "datum_fallback"});
    if (auto v = kv.getSize("stride")) stride = *v;
    if (auto v = kv.get("window")) window = *v == "full" ? std::nullopt : std::optional(WindowSpec::parse(*v));
    if (auto v = kv.getSize("frame_offset")) frameOffset = *v;
    if (auto v = kv.getReal("drop_threshold")) dropThreshold = *v;
    if (auto v = kv.getReal("root_vote_fraction")) rootVoteFraction = *v;
    if (auto v = kv.getReal("system_drop_vote_fraction")) systemDropVoteFraction = *v;
    if (auto v = kv.get("chain_recalc")) chainRecalc = parse_chain_recalc(*v);
    if (auto v = kv.get("chain_trigger")) chainTrigger = parse_chain_trigger(*v);
    if (auto v = kv.getSize("dims")) dims = *v;
    if (auto v = kv.get("phi_grid")) analysis.mixity.phiGrid = parse_real_list(*v);
    if (auto v = kv.getReal("eps_denominator")) analysis.epsDenominator = *v;
    if (auto v = kv.getReal("eps_delta_h")) analysis.mixity.epsDeltaH = *v;
    if (auto v = kv.getReal("nu_volumetric")) analysis.mixity.nuVolumetric = *v;
    if (auto v = kv.getReal("nu_shear")) analysis.mixity.nuShear = *v;
    if (auto v = kv.getBool("datum_fallback")) analysis.datum.fallbackToZero = *v;
}

std::vector<std::pair<std::string, std::string>> EngineConfig::describe() const {
    std::string grid;
    for (std::size_t i = 0; i < analysis.mixity.phiGrid.size(); ++i)
        grid += (i ? "," : "") + format_real(analysis.mixity.phiGrid[i]);
    return {
        {"stride", std::to_string(stride)},
        {"window", window ? window->toString() : "full"},
        {"frame_offset", std::to_string(frameOffset)},
        {"drop_threshold", format_real(dropThreshold)},
        {"root_vote_fraction", format_real(rootVoteFraction)},
        {"system_drop_vote_fraction", format_real(systemDropVoteFraction)},
        {"chain_recalc", to_string(chainRecalc)},
        {"chain_trigger", to_string(chainTrigger)},
        {"dims", std::to_string(dims)},
        {"phi_grid", grid},
        {"eps_denominator", format_real(analysis.epsDenominator)},
        {"eps_delta_h", format_real(analysis.mixity.epsDeltaH)},
        {"nu_volumetric", format_real(analysis.mixity.nuVolumetric)},
        {"nu_shear", format_real(analysis.mixity.nuShear)},
        {"datum_fallback", analysis.datum.fallbackToZero ? "true" : "false"},
    };
}

Engine::Engine(EngineConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    state_.previousResidual.assign(cfg_.dims * root_count(cfg_.dims), std::nullopt);
}

std::optional<std::size_t> Engine::frameOf(std::size_t t) const {
    if (t == 0 || t > frames_.size()) return std::nullopt;
    return frames_[t - 1];
}

std::optional<std::size_t> Engine::predictedFrame() const {
    if (!state_.predictedFailureIndex) return std::nullopt;
    return frameOf(*state_.predictedFailureIndex);
}

namespace {

// Numerical conditions that make one pair unusable without invalidating the run.
template <class Fn>
bool guarded(Fn&& fn, std::string& reason) {
    try {
        fn();
        return true;
    } catch (const DegenerateInputError& e) {
        reason = e.what();
    } catch (const NoRealDatumError& e) {
        reason = e.what();
    } catch (const DatumUnavailableError& e) {
        reason = e.what();
    } catch (const RankUnavailableError& e) {
        reason = e.what();
    } catch (const MixityUnavailableError& e) {
        reason = e.what();
    } catch (const ZoomOutUnavailableError& e) {
        reason = e.what();
    }
    return false;
}

}  // namespace

PairOutcome Engine::process_pair(const Frame& earlierFull, const Frame& laterFull) {
    PairOutcome out;
    out.t = ++t_;
    out.frame = cfg_.frameOffset + laterFull.timeIndex();
    frames_.push_back(out.frame);

    if (laterFull.dims() != cfg_.dims || earlierFull.dims() != cfg_.dims)
        throw FormatError("frames carry " + std::to_string(laterFull.dims()) + " channels, configured for " +
                          std::to_string(cfg_.dims));
    const Frame earlier = cfg_.window ? extract_window(earlierFull, *cfg_.window) : earlierFull;
    const Frame later = cfg_.window ? extract_window(laterFull, *cfg_.window) : laterFull;

    PairAnalysis analysis;
    if (!guarded([&] { analysis = analyze_pair(earlier, later, cfg_.analysis); }, out.skipReason)) {
        ++skipped_;
        out.gti = state_.gti;
        return out;
    }
    out.analyzed = true;
    const auto& field = analysis.curvature;
    const std::size_t roots = root_count(cfg_.dims);

    for (std::size_t p = 0; p < field.points; ++p) {
        if (!field.validPoint[p]) continue;
        for (std::size_t d = 0; d < field.dims; ++d)
            if (point_path_dependent(field.rootsAt(p, d), cfg_.rootVoteFraction)) {
                ++out.pathDependentPoints;
                break;
            }
    }
    out.pathDependent = out.pathDependentPoints > 0;
    const bool hadOnset = state_.pdiOnsetIndex.has_value();
    record_path_dependency(state_, out.pathDependent, out.t);
    if (!hadOnset && state_.pdiOnsetIndex)
        events_.push_back({out.t, EventKind::PdiOnset, -1, -1, static_cast<double>(out.pathDependentPoints)});

    Pyramid pyramid;
    std::string zoomReason;
    const bool zoomed = guarded([&] { pyramid = build_pyramid(earlier, later, cfg_.analysis, analysis); }, zoomReason);
    if (zoomed) analysis = pyramid.levels.front().analysis;

    std::vector<std::optional<double>> drops(cfg_.dims * roots);
    const RootOutcome* best = nullptr;
    if (zoomed) {
        const bool freeze = cfg_.chainRecalc == ChainRecalc::Once && !frozenCritical_;
        if (freeze) frozenCritical_.emplace();
        out.roots.reserve(cfg_.dims * roots);
        for (std::size_t d = 0; d < cfg_.dims; ++d)
            for (std::size_t k = 0; k < roots; ++k) {
                const std::size_t idx = d * roots + k;
                const auto profile = zoom_out_profile(pyramid, d, k);
                RootOutcome ro;
                ro.dim = d;
                ro.root = k;
                ro.residual = residual_curvature(profile);
                if (cfg_.chainRecalc == ChainRecalc::Every || freeze) {
                    ro.criticalShort = critical_chain_length(profile, pyramid.totalPoints, ChainVariant::Short);
                    ro.criticalLong = critical_chain_length(profile, pyramid.totalPoints, ChainVariant::Long);
                    if (freeze) {
                        (*frozenCritical_)[0].push_back(ro.criticalShort);
                        (*frozenCritical_)[1].push_back(ro.criticalLong);
                    }
                } else {
                    ro.criticalShort = (*frozenCritical_)[0][idx];
                    ro.criticalLong = (*frozenCritical_)[1][idx];
                }
                const auto chain = chain_lengths(root_categories(field, d, k), analysis.ranks[d].R, d, k,
                                                 ro.criticalShort, ro.criticalLong);
                ro.maxChainLength = chain.maxChainLength;
                switch (cfg_.chainTrigger) {
                    case ChainTrigger::Long: ro.chainTriggered = chain.triggeredLong; break;
                    case ChainTrigger::Short: ro.chainTriggered = chain.triggeredShort; break;
                    case ChainTrigger::Either: ro.chainTriggered = chain.triggeredLong || chain.triggeredShort; break;
                }
                auto& prev = state_.previousResidual[idx];
                if (prev) ro.drop = residual_drop(*prev, ro.residual);
                prev = ro.residual;
                drops[idx] = ro.drop;
                out.roots.push_back(ro);
            }
        for (const auto& ro : out.roots)
            if (ro.chainTriggered && (!best || ro.maxChainLength > best->maxChainLength)) best = &ro;
        out.chainTriggered = best != nullptr;
        out.energyVotes = static_cast<std::size_t>(std::count_if(drops.begin(), drops.end(), [&](const auto& d) {
            return d && *d > cfg_.dropThreshold;
        }));
        out.energyTriggered = energy_trigger(drops, drops.size(), cfg_.dropThreshold, cfg_.systemDropVoteFraction);
    }

    if (best)
        events_.push_back({out.t, EventKind::Chain, static_cast<long>(best->dim), static_cast<long>(best->root),
                           static_cast<double>(best->maxChainLength)});
    if (out.energyTriggered)
        events_.push_back({out.t, EventKind::Energy, -1, -1,
                           static_cast<double>(out.energyVotes) / static_cast<double>(drops.size())});

    const bool hadPrediction = state_.predictedFailureIndex.has_value();
    state_ = update_gti(std::move(state_), out.chainTriggered, out.energyTriggered, out.t);
    out.gti = state_.gti;
    if (!hadPrediction && state_.predictedFailureIndex) {
        out.predictionIssued = true;
        const auto frame = frameOf(*state_.predictedFailureIndex);
        events_.push_back({out.t, EventKind::Prediction, -1, -1, static_cast<double>(frame.value_or(0))});
    }
    out.categories = promote_categories(field, state_.gti, cfg_.rootVoteFraction);
    out.analysis = std::move(analysis);
    return out;
}

namespace {

std::string join_indices(const std::set<std::size_t>& s) {
    if (s.empty()) return "none";
    std::string out;
    for (auto v : s) out += (out.empty() ? "" : ",") + std::to_string(v);
    return out;
}

template <class T>
std::string opt_str(const std::optional<T>& v) {
    if (!v) return "none";
    if constexpr (std::is_floating_point_v<T>)
        return format_real(*v);
    else
        return std::to_string(*v);
}

struct Outputs {
    std::ofstream pairs, roots, pdi, datum, triggers;

    explicit Outputs(const std::filesystem::path& dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        open(pairs, dir / "pairs.csv");
        open(roots, dir / "roots.csv");
        open(pdi, dir / "pdi_histogram.csv");
        open(datum, dir / "datum.csv");
        open(triggers, dir / "triggers.log");
        pairs << "t,frame,status,path_dependent_points,chain_triggered,energy_votes,energy_triggered,gti,"
                 "prediction\n";
        roots << "t,dimension,root,residual,drop,critical_short,critical_long,max_chain,chain_triggered\n";
        write_pdi_csv_header(pdi);
        write_datum_csv_header(datum);
    }

    static void open(std::ofstream& f, const std::filesystem::path& p) {
        f.open(p);
        if (!f) throw IoError("cannot write " + p.string());
    }

    void record(const PairOutcome& o, const std::vector<TriggerEvent>& events, std::size_t firstNewEvent) {
        pairs << o.t << ',' << o.frame << ',' << (o.analyzed ? "ok" : "skipped") << ',' << o.pathDependentPoints
              << ',' << o.chainTriggered << ',' << o.energyVotes << ',' << o.energyTriggered << ','
              << format_real(o.gti) << ',' << o.predictionIssued << '\n';
        for (const auto& r : o.roots)
            roots << o.t << ',' << r.dim << ',' << r.root << ',' << format_real(r.residual) << ','
                  << (r.drop ? format_real(*r.drop) : "") << ',' << format_real(r.criticalShort) << ','
                  << format_real(r.criticalLong) << ',' << r.maxChainLength << ',' << r.chainTriggered << '\n';
        if (o.analysis) {
            write_pdi_csv_rows(pdi, o.t, o.analysis->curvature, o.categories);
            write_datum_csv_rows(datum, o.t, o.analysis->datum);
        }
        for (std::size_t i = firstNewEvent; i < events.size(); ++i) triggers << format_event(events[i]) << '\n';
    }
};

AnalyzeResult analyze_source(FrameSource& source, const EngineConfig& cfg, const std::string& runId,
                             const std::optional<std::filesystem::path>& outDir,
                             const std::optional<Manifest>& manifest) {
    cfg.validate();
    if (source.size() < cfg.stride + 1)
        throw InsufficientFramesError("insufficient frames: " + std::to_string(source.size()) +
                                      " found, stride " + std::to_string(cfg.stride) + " needs at least " +
                                      std::to_string(cfg.stride + 1));
    Engine engine(cfg);
    std::optional<Outputs> outputs;
    if (outDir) outputs.emplace(*outDir);

    for_each_stride_pair(source, cfg.stride, [&](const Frame& a, const Frame& b, std::size_t) {
        const std::size_t before = engine.events().size();
        const auto outcome = engine.process_pair(a, b);
        if (outputs) outputs->record(outcome, engine.events(), before);
    });

    AnalyzeResult res;
    res.runId = runId;
    res.pairs = engine.pairs();
    res.skipped = engine.skipped();
    res.state = engine.state();
    res.events = engine.events();
    res.predictedFrame = engine.predictedFrame();

    std::ostringstream rep;
    rep << "# prognosis report\n";
    rep << "run_id = " << runId << '\n';
    for (const auto& [k, v] : cfg.describe()) rep << k << " = " << v << '\n';
    rep << "pairs = " << res.pairs << '\n';
    rep << "skipped_pairs = " << res.skipped << '\n';
    rep << "pdi_onset = " << opt_str(res.state.pdiOnsetIndex) << '\n';
    rep << "chain_triggers = " << join_indices(res.state.chainTriggerIndices) << '\n';
    rep << "energy_triggers = " << join_indices(res.state.energyTriggerIndices) << '\n';
    rep << "gti = " << format_real(res.state.gti) << '\n';
    rep << "predicted_index = " << opt_str(res.state.predictedFailureIndex) << '\n';
    rep << "predicted_frame = " << opt_str(res.predictedFrame) << '\n';
    rep << "prediction = " << (res.predictedFrame ? "yes" : "no prediction") << '\n';
    if (manifest) {
        const auto s = score(res.predictedFrame, manifest->failure, manifest->burstFrame);
        rep << "actual_failure_frame = " << opt_str(manifest->burstFrame) << '\n';
        rep << "lead_percent = " << opt_str(s.leadPercent) << '\n';
        rep << "outcome = " << to_string(s.outcome) << '\n';
    }
    res.report = rep.str();
    if (outDir) {
        std::ofstream f(*outDir / "report.txt");
        if (!f) throw IoError("cannot write report.txt");
        f << res.report;
    }
    return res;
}

}  // namespace

AnalyzeResult run_analyze(const std::filesystem::path& frameDir, const EngineConfig& cfg,
                          const std::optional<std::filesystem::path>& outDir) {
    DirectoryFrameSource source(frameDir);
    std::optional<Manifest> manifest;
    if (std::filesystem::exists(frameDir / kManifestName)) manifest = Manifest::read(frameDir / kManifestName);
    std::string runId = manifest ? manifest->runId : std::filesystem::weakly_canonical(frameDir).filename().string();
    return analyze_source(source, cfg, runId, outDir, manifest);
}

AnalyzeResult run_analyze(std::span<const Frame> frames, const EngineConfig& cfg, const std::string& runId,
                          const std::optional<std::filesystem::path>& outDir,
                          const std::optional<std::size_t>& actualFailureFrame) {
    VectorFrameSource source(frames);
    std::optional<Manifest> manifest;
    if (actualFailureFrame) {
        manifest.emplace();
        manifest->runId = runId;
        manifest->failure = true;
        manifest->burstFrame = actualFailureFrame;
    }
    return analyze_source(source, cfg, runId, outDir, manifest);
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Lead: return "lead";
        case Outcome::Early: return "early";
        case Outcome::Miss: return "miss";
        case Outcome::FalsePositive: return "false_positive";
        case Outcome::TrueNegative: return "true_negative";
    }
    return "unknown";
}

ScoreResult score(std::optional<std::size_t> predictedFrame, bool failure, std::optional<std::size_t> actualFrame,
                  double maxLeadPercent) {
    ScoreResult s;
    s.predictedFrame = predictedFrame;
    s.actualFrame = actualFrame;
    if (!failure) {
        s.outcome = predictedFrame ? Outcome::FalsePositive : Outcome::TrueNegative;
        return s;
    }
    if (!actualFrame) throw ConfigError("burst run without an actual failure frame");
    if (!predictedFrame) {
        s.outcome = Outcome::Miss;
        return s;
    }
    s.leadPercent = lead_percentage(static_cast<double>(*predictedFrame), static_cast<double>(*actualFrame));
    if (!s.leadPercent)
        s.outcome = Outcome::Miss;
    else
        s.outcome = *s.leadPercent <= maxLeadPercent ? Outcome::Lead : Outcome::Early;
    return s;
}

ScoreResult run_score(const std::filesystem::path& reportPath, const std::filesystem::path& manifestPath) {
    const auto report = KeyValues::read(reportPath);
    const auto manifest = Manifest::read(manifestPath);
    const std::string runId = report.require("run_id");
    if (runId != manifest.runId)
        throw RunMismatchError("report run '" + runId + "' does not match manifest run '" + manifest.runId + "'");
    std::optional<std::size_t> predicted;
    const std::string p = report.require("predicted_frame");
    if (p != "none") predicted = report.getSize("predicted_frame");
    auto s = score(predicted, manifest.failure, manifest.burstFrame);
    s.runId = runId;
    return s;
}

std::string format_score(const ScoreResult& s) {
    std::ostringstream out;
    out << "run_id = " << s.runId << '\n';
    out << "predicted_frame = " << opt_str(s.predictedFrame) << '\n';
    out << "actual_failure_frame = " << opt_str(s.actualFrame) << '\n';
    out << "lead_percent = " << opt_str(s.leadPercent) << '\n';
    out << "outcome = " << to_string(s.outcome) << '\n';
    return out.str();
}

}  // namespace ddp
