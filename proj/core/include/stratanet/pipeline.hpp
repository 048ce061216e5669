#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stratanet/backbone.hpp"
#include "stratanet/blockmodel.hpp"
#include "stratanet/ergm.hpp"
#include "stratanet/graph.hpp"
#include "stratanet/temporal.hpp"
#include "stratanet/types.hpp"

namespace stratanet {

struct PipelineConfig {
    // Inputs. Relative paths resolve against base_dir (the config file's directory).
    std::vector<std::string> events;
    std::string roster;
    std::optional<std::string> keywords_file;
    std::string out_dir = "out";
    std::filesystem::path base_dir;  // not serialized

    // Filter.
    std::vector<std::string> keywords;
    std::optional<std::string> start;  // ISO-8601
    std::optional<std::string> end;
    std::set<EventKind> kinds{EventKind::Retweet};
    bool roster_only = true;

    std::vector<Level> levels{kAllLevels.begin(), kAllLevels.end()};
    std::uint64_t seed = 0;
    std::string timezone = "Europe/Helsinki";
    Binning activity_binning = Binning::HourOfWeek;
    std::size_t min_events = kDefaultMinEvents;

    double alpha = 0.1;
    std::size_t bootstrap_n = 300;
    std::optional<Level> fix_size_to;

    int sbm_sweeps = 10000;
    double sbm_greedy_after = 0.8;
    std::size_t rmi_samples = 10;
    int rmi_sweeps = 1000;

    std::optional<std::vector<std::string>> ergm_terms;  // default: see default_terms()
    double ergm_width_threshold = 10.0;

    struct Modules {
        bool temporal = true;
        bool metrics = true;
        bool backbone = true;
        bool bootstrap = true;
        bool sbm = true;
        bool rmi = true;
        bool ergm = true;

        friend bool operator==(const Modules&, const Modules&) = default;
    } modules;

    /// Throws InputError on unknown keys, bad values or a missing roster/events entry.
    static PipelineConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// Reads a JSON config file and sets base_dir to its directory.
    static PipelineConfig load(const std::filesystem::path& path);

    /// FNV-1a over the canonical JSON with out_dir removed, as 16 hex digits.
    std::string hash() const;

    std::filesystem::path resolve(const std::string& path) const;
    std::filesystem::path output_path(const std::string& file) const;

    friend bool operator==(const PipelineConfig& a, const PipelineConfig& b) { return a.to_json() == b.to_json(); }
};

enum class Stage {
    Ingest,
    Activity,
    Burstiness,
    Mixing,
    Density,
    Overlap,
    Backbone,
    Collapse,
    Bootstrap,
    Sbm,
    Rmi,
    Ergm,
};

inline constexpr std::array kPipelineStages{Stage::Ingest,   Stage::Activity, Stage::Burstiness, Stage::Mixing,
                                            Stage::Density,  Stage::Overlap,  Stage::Backbone,   Stage::Collapse,
                                            Stage::Bootstrap, Stage::Sbm,     Stage::Rmi,        Stage::Ergm};

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view name);

struct StageStatus {
    Stage stage = Stage::Ingest;
    enum class State { Ok, Warning, Failed, Skipped } state = State::Ok;
    enum class Failure { None, Input, Degenerate, Internal } failure = Failure::None;
    std::vector<std::string> messages;
    std::vector<std::string> artifacts;
};

/// Lazily evaluated analysis over one config. Every intermediate result is computed
/// at most once; stage writers emit their artifacts into config.out_dir.
class Pipeline {
public:
    explicit Pipeline(PipelineConfig config);
    ~Pipeline();
    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    const PipelineConfig& config() const { return config_; }

    const Roster& roster();
    /// Filtered events of the configured kinds (retweets by default).
    const std::vector<Event>& retweets();
    /// Same filter with every event kind, used for activity and burstiness.
    const std::vector<Event>& activity_events();
    const WeightedDigraph& account_graph();
    const WeightedDigraph& level_graph(Level level);
    const std::vector<EdgeScore>& scores(Level level);
    const WeightedDigraph& backbone(Level level);
    const CollapsedGraph& collapsed(Level level);
    std::vector<Sector> organization_sectors();
    /// Bootstrap sample size: W of fix_size_to if set, else W of the level itself.
    Weight bootstrap_size(Level level);
    /// Resampled level graphs, each backboned and collapsed. Throws DegenerateError for
    /// a level without edges.
    const std::vector<SimpleGraph>& bootstrap_collapsed(Level level);
    const SbmFit& sbm(Level level);
    std::vector<ErgmTerm> ergm_terms();

    /// Runs one stage and writes its artifacts. Errors become a Failed status unless
    /// `rethrow` is set.
    StageStatus run(Stage stage, bool rethrow = false);
    /// Every enabled stage in order, then status.json.
    std::vector<StageStatus> run_all();

private:
    struct Cache;

    void write_text(const std::string& file, const std::string& body, StageStatus& status);
    std::string csv_header_comment() const;

    void stage_ingest(StageStatus& status);
    void stage_activity(StageStatus& status);
    void stage_burstiness(StageStatus& status);
    void stage_mixing(StageStatus& status);
    void stage_density(StageStatus& status);
    void stage_overlap(StageStatus& status);
    void stage_backbone(StageStatus& status);
    void stage_collapse(StageStatus& status);
    void stage_bootstrap(StageStatus& status);
    void stage_sbm(StageStatus& status);
    void stage_rmi(StageStatus& status);
    void stage_ergm(StageStatus& status);

    PipelineConfig config_;
    std::unique_ptr<Cache> cache_;
};

}  // namespace stratanet
