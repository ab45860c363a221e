// Command-line front end: analyze, synth, score.

#include "ddp/engine.hpp"
#include "ddp/errors.hpp"
#include "ddp/synth.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Path-dependency prognosis over XYZM frame sequences"};
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "Analyse a frame directory");
    std::string frameDir;
    std::optional<std::string> configPath, window, chainRecalc, chainTrigger, phiGrid, outDir;
    std::optional<std::size_t> stride, frameOffset;
    std::optional<double> dropThreshold, rootVote, systemVote;
    analyze->add_option("dir", frameDir, "Directory of frame_<n>.xyzm files")->required();
    analyze->add_option("--config", configPath, "key = value configuration file");
    analyze->add_option("--stride", stride, "Frames between analysed pairs");
    analyze->add_option("--window", window, "Observation window r0:r1,c0:c1 (inclusive)");
    analyze->add_option("--frame-offset", frameOffset, "Added to file indices when reporting frames");
    analyze->add_option("--drop-threshold", dropThreshold, "Residual-curvature drop that votes for the energy trigger");
    analyze->add_option("--root-vote", rootVote, "Fraction of roots that marks a point path dependent");
    analyze->add_option("--system-vote", systemVote, "Fraction of roots whose drop fires the energy trigger");
    analyze->add_option("--chain-recalc", chainRecalc, "Critical chain cadence")
        ->check(CLI::IsMember({"every", "once"}));
    analyze->add_option("--chain-trigger", chainTrigger, "Critical length compared against chains")
        ->check(CLI::IsMember({"long", "short", "either"}));
    analyze->add_option("--phi-grid", phiGrid, "Comma separated mixity grid");
    analyze->add_option("--out", outDir, "Directory for CSV output, triggers.log and report.txt");

    auto* synth = app.add_subcommand("synth", "Write a synthetic balloon sequence");
    std::string scenarioPath, synthOut;
    synth->add_option("scenario", scenarioPath, "Scenario file")->required();
    synth->add_option("outdir", synthOut, "Output directory")->required();

    auto* scoreCmd = app.add_subcommand("score", "Score a report against a manifest");
    std::string reportPath, manifestPath;
    scoreCmd->add_option("report", reportPath, "report.txt from analyze")->required();
    scoreCmd->add_option("manifest", manifestPath, "manifest.txt from synth")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (analyze->parsed()) {
        ddp::EngineConfig cfg;
        if (configPath) cfg.apply(ddp::KeyValues::read(*configPath));
        ddp::KeyValues flags;
        if (stride) flags.set("stride", std::to_string(*stride));
        if (window) flags.set("window", *window);
        if (frameOffset) flags.set("frame_offset", std::to_string(*frameOffset));
        if (dropThreshold) flags.set("drop_threshold", ddp::format_real(*dropThreshold));
        if (rootVote) flags.set("root_vote_fraction", ddp::format_real(*rootVote));
        if (systemVote) flags.set("system_drop_vote_fraction", ddp::format_real(*systemVote));
        if (chainRecalc) flags.set("chain_recalc", *chainRecalc);
        if (chainTrigger) flags.set("chain_trigger", *chainTrigger);
        if (phiGrid) flags.set("phi_grid", *phiGrid);
        cfg.apply(flags);
        std::optional<std::filesystem::path> out;
        if (outDir) out = *outDir;
        const auto res = ddp::run_analyze(frameDir, cfg, out);
        std::cout << res.report;
        for (const auto& e : res.events) std::cout << ddp::format_event(e) << '\n';
        return 0;
    }
    if (synth->parsed()) {
        const auto scenario = ddp::BalloonScenario::read(scenarioPath);
        const auto manifest = ddp::write_sequence(scenario, synthOut);
        std::cout << "wrote " << manifest.frames << " frames to " << synthOut << " ("
                  << (manifest.failure ? "burst at frame " + std::to_string(*manifest.burstFrame) : "no-failure")
                  << ")\n";
        return 0;
    }
    std::cout << ddp::format_score(ddp::run_score(reportPath, manifestPath));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ddp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
