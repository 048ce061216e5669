#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "stratanet/pipeline.hpp"

namespace {

using namespace stratanet;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("stratanet");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("STRATANET_LOG")) {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to "off"; only honour it when asked for.
        if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    }
}

std::string_view state_name(StageStatus::State s) {
    switch (s) {
        case StageStatus::State::Ok: return "ok";
        case StageStatus::State::Warning: return "warning";
        case StageStatus::State::Failed: return "failed";
        case StageStatus::State::Skipped: return "skipped";
    }
    return "";
}

void report(const StageStatus& s) {
    std::cout << to_string(s.stage) << ": " << state_name(s.state) << '\n';
    for (const auto& m : s.messages) std::cout << "  " << m << '\n';
}

int exit_code(const StageStatus& s, bool strict) {
    if (s.state == StageStatus::State::Failed)
        return s.failure == StageStatus::Failure::Degenerate ? 2 : 1;
    if (s.state == StageStatus::State::Warning && strict) return 2;
    return 0;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::optional<std::size_t> bootstrap_n;
    std::optional<std::string> fix_size_to;
    std::optional<std::string> level;
    std::optional<std::string> out_dir;
};

void apply(PipelineConfig& c, const Overrides& o) {
    if (o.seed) c.seed = *o.seed;
    if (o.alpha) {
        if (!(*o.alpha > 0.0 && *o.alpha <= 1.0)) throw InputError("--alpha must lie in (0, 1]");
        c.alpha = *o.alpha;
    }
    if (o.bootstrap_n) {
        if (*o.bootstrap_n == 0) throw InputError("--bootstrap-n must be positive");
        c.bootstrap_n = *o.bootstrap_n;
    }
    if (o.fix_size_to) c.fix_size_to = parse_level(*o.fix_size_to);
    if (o.level) c.levels = {parse_level(*o.level)};
    if (o.out_dir) c.out_dir = *o.out_dir;
}

int run(const std::string& command, const std::string& config_path, const Overrides& overrides, bool strict) {
    PipelineConfig config = PipelineConfig::load(config_path);
    apply(config, overrides);
    spdlog::debug("config hash {}", config.hash());
    Pipeline pipeline(config);

    if (command == "pipeline") {
        const auto statuses = pipeline.run_all();
        int code = 0;
        for (const auto& s : statuses) {
            report(s);
            const int c = exit_code(s, strict);
            // Input problems outrank degenerate-analysis results.
            if (c == 1 || (c == 2 && code == 0)) code = c;
        }
        if (!strict && code == 2) code = 0;
        return code;
    }

    const Stage stage = parse_stage(command);
    const auto status = pipeline.run(stage);
    report(status);
    if (stage == Stage::Sbm && status.state != StageStatus::State::Failed) {
        for (Level level : config.levels) {
            const auto& fit = pipeline.sbm(level);
            std::cout << "  " << to_string(level) << ": B = " << fit.partition.block_count()
                      << (fit.sparse ? " (sparse: mean degree below 2)" : "") << '\n';
        }
    }
    return exit_code(status, strict);
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Level-stratified retweet network analysis"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    bool strict = false;
    app.add_option("--config", config_path, "Pipeline config (JSON)")->required();
    app.add_option("--seed", overrides.seed, "Master random seed");
    app.add_option("--alpha", overrides.alpha, "Backbone significance level");
    app.add_option("--bootstrap-n", overrides.bootstrap_n, "Bootstrap samples per level");
    app.add_option("--fix-size-to", overrides.fix_size_to, "Resample every level to this level's total weight");
    app.add_option("--level", overrides.level, "Restrict the run to one level");
    app.add_option("--out-dir", overrides.out_dir, "Output directory (overrides the config)");
    app.add_flag("--strict", strict, "Exit with status 2 when a stage reports a degenerate-analysis warning");

    for (const char* name : {"ingest", "activity", "burstiness", "mixing", "density", "overlap", "backbone",
                             "collapse", "bootstrap", "sbm", "rmi", "ergm", "pipeline"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, config_path, overrides, strict);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DegenerateError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
