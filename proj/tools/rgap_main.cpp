// rgap: analyze and mitigate multilingual reasoning gaps in reasoning models.
//
// Commands form a DAG over one experiment config:
//   generate -> score -> {attribute, label} -> signals -> {train-detector,
//   calibrate} -> eval-detector -> selective ; langdist, quality, report.
//
// Exit codes: 0 success, 1 user/config error, 2 missing upstream artifact,
// 3 backend failure.

#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "rgap/common.hpp"
#include "rgap/pipeline.hpp"

namespace {

int exit_code_for(rgap::ErrorKind kind) {
    switch (kind) {
        case rgap::ErrorKind::Backend:
            return 3;
        case rgap::ErrorKind::Upstream:
        case rgap::ErrorKind::Incomplete:
        case rgap::ErrorKind::Corruption:
            return 2;
        default:
            return 1;
    }
}

struct CliOverrides {
    std::string output_dir;
    std::string cache_dir;
    std::string cutoff;
    std::string variant;
    std::string detector;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> modes;
};

void apply_overrides(rgap::PipelineConfig& config, const CliOverrides& o) {
    auto note = [&](const std::string& text) { config.overrides.push_back(text); };
    if (!o.output_dir.empty()) {
        config.output_dir = o.output_dir;
        note("output_dir=" + o.output_dir);
    }
    if (!o.cache_dir.empty()) {
        config.cache_dir = o.cache_dir;
        note("cache_dir=" + o.cache_dir);
    }
    if (!o.cutoff.empty()) {
        config.cutoff = rgap::cutoff_from_json(o.cutoff == "full" ? rgap::json("full")
                                                                  : rgap::json(std::stoll(o.cutoff)));
        note("cutoff=" + o.cutoff);
    }
    if (!o.variant.empty()) {
        config.prefix_variant = rgap::prefix_variant_from_name(o.variant);
        note("prefix_variant=" + o.variant);
    }
    if (!o.detector.empty()) {
        config.detector.type = o.detector;
        note("detector=" + o.detector);
    }
    if (!o.seeds.empty()) {
        config.seeds = o.seeds;
        note("seeds overridden");
    }
    if (!o.modes.empty()) {
        config.modes.clear();
        for (const auto& m : o.modes) config.modes.push_back(rgap::mode_from_name(m));
        note("modes overridden");
    }
    config.validate();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multilingual reasoning gap analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides overrides;
    app.add_option("-c,--config", config_path, "experiment config JSON")->required();
    app.add_option("--output-dir", overrides.output_dir, "override output directory");
    app.add_option("--cache-dir", overrides.cache_dir, "override cache directory");
    app.add_option("--cutoff", overrides.cutoff, "trace cutoff in tokens, or 'full'");
    app.add_option("--variant", overrides.variant,
                   "understanding prefix variant (original|v1|v2|v3)");
    app.add_option("--detector", overrides.detector, "detector type override");
    app.add_option("--seed", overrides.seeds, "seed list override");
    app.add_option("--mode", overrides.modes, "mode list override (base|U|T|UT)");

    const char* commands[] = {"generate", "score",          "attribute", "label",
                              "signals",  "train-detector", "calibrate", "eval-detector",
                              "selective", "langdist",      "quality",   "report"};
    const char* descriptions[] = {
        "run generations for every (sample, mode, seed)",
        "extract and verify answers; per-(language, seed) accuracy",
        "headroom, stage decomposition, weighted shares, performance ratios",
        "build understanding-failure labels from Base and intervention runs",
        "extract detector signals (confidences, input NLL, hidden states)",
        "train the supervised detector on the calibration set",
        "calibrate thresholds for the confidence/NLL detectors",
        "evaluate the configured detector on the eval set",
        "run base / selective / full translation strategies",
        "language distributions over traces and responses",
        "judge-scored translation quality vs reasoning performance",
        "assemble the markdown report and plot-data files",
    };
    for (std::size_t i = 0; i < std::size(commands); ++i)
        app.add_subcommand(commands[i], descriptions[i]);

    CLI11_PARSE(app, argc, argv);

    try {
        rgap::PipelineConfig config = rgap::PipelineConfig::load(config_path);
        apply_overrides(config, overrides);
        rgap::Pipeline pipeline(std::move(config));

        for (auto* sub : app.get_subcommands()) {
            const std::string& name = sub->get_name();
            if (name == "generate") pipeline.generate();
            else if (name == "score") pipeline.score();
            else if (name == "attribute") pipeline.attribute();
            else if (name == "label") pipeline.label();
            else if (name == "signals") pipeline.signals();
            else if (name == "train-detector") pipeline.train_detector();
            else if (name == "calibrate") pipeline.calibrate();
            else if (name == "eval-detector") pipeline.eval_detector();
            else if (name == "selective") pipeline.selective();
            else if (name == "langdist") pipeline.langdist();
            else if (name == "quality") pipeline.quality();
            else if (name == "report") pipeline.report();
        }
    } catch (const rgap::Error& e) {
        std::fprintf(stderr, "rgap: %s error: %s\n", rgap::error_kind_name(e.kind()), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rgap: %s\n", e.what());
        return 1;
    }
    return 0;
}
