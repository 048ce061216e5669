#include "stratanet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>
#include <tbb/parallel_for.h>

#include "stratanet/bootstrap.hpp"
#include "stratanet/csv.hpp"
#include "stratanet/format.hpp"
#include "stratanet/ingest.hpp"
#include "stratanet/metrics.hpp"
#include "stratanet/random.hpp"
#include "stratanet/timeutil.hpp"

namespace stratanet {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) throw InputError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw InputError("unknown config key '" + std::string(where) + "." + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw InputError("config key '" + std::string(where) + "." + key + "' has the wrong type");
    }
}

std::string_view binning_name(Binning b) { return b == Binning::HourOfWeek ? "hour_of_week" : "week_of_year"; }

Binning parse_binning(std::string_view name) {
    if (name == "hour_of_week") return Binning::HourOfWeek;
    if (name == "week_of_year") return Binning::WeekOfYear;
    throw InputError("unknown activity binning '" + std::string(name) + "'");
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j) {
    reject_unknown(j,
                   {"paths", "filter", "levels", "seed", "timezone", "activity", "alpha", "bootstrap", "sbm", "rmi",
                    "ergm", "modules"},
                   "config");
    PipelineConfig c;

    const json paths = j.value("paths", json::object());
    reject_unknown(paths, {"events", "roster", "keywords", "out_dir"}, "paths");
    if (auto it = paths.find("events"); it != paths.end()) {
        if (it->is_string())
            c.events = {it->get<std::string>()};
        else
            read(paths, "events", c.events, "paths");
    }
    read(paths, "roster", c.roster, "paths");
    if (paths.contains("keywords") && !paths["keywords"].is_null()) {
        std::string k;
        read(paths, "keywords", k, "paths");
        c.keywords_file = k;
    }
    read(paths, "out_dir", c.out_dir, "paths");
    if (c.events.empty()) throw InputError("config needs paths.events");
    if (c.roster.empty()) throw InputError("config needs paths.roster");

    const json filter = j.value("filter", json::object());
    reject_unknown(filter, {"keywords", "start", "end", "kinds", "roster_only"}, "filter");
    read(filter, "keywords", c.keywords, "filter");
    std::string start, end;
    read(filter, "start", start, "filter");
    read(filter, "end", end, "filter");
    if (!start.empty()) c.start = format_iso8601(parse_iso8601(start));
    if (!end.empty()) c.end = format_iso8601(parse_iso8601(end));
    if (c.start && c.end && parse_iso8601(*c.start) >= parse_iso8601(*c.end))
        throw InputError("filter.start must precede filter.end");
    if (filter.contains("kinds")) {
        std::vector<std::string> kinds;
        read(filter, "kinds", kinds, "filter");
        c.kinds.clear();
        for (const auto& k : kinds) c.kinds.insert(parse_event_kind(k));
        if (c.kinds.empty()) throw InputError("filter.kinds must not be empty");
    }
    read(filter, "roster_only", c.roster_only, "filter");

    if (j.contains("levels")) {
        std::vector<std::string> levels;
        read(j, "levels", levels, "config");
        c.levels.clear();
        for (const auto& l : levels) {
            const Level level = parse_level(l);
            if (std::find(c.levels.begin(), c.levels.end(), level) != c.levels.end())
                throw InputError("level listed twice: " + l);
            c.levels.push_back(level);
        }
        if (c.levels.empty()) throw InputError("config.levels must not be empty");
    }
    read(j, "seed", c.seed, "config");
    read(j, "timezone", c.timezone, "config");
    (void)TimeZone::named(c.timezone);

    const json activity = j.value("activity", json::object());
    reject_unknown(activity, {"binning", "min_events"}, "activity");
    std::string binning(binning_name(c.activity_binning));
    read(activity, "binning", binning, "activity");
    c.activity_binning = parse_binning(binning);
    read(activity, "min_events", c.min_events, "activity");

    read(j, "alpha", c.alpha, "config");
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]");

    const json boot = j.value("bootstrap", json::object());
    reject_unknown(boot, {"n", "fix_size_to"}, "bootstrap");
    read(boot, "n", c.bootstrap_n, "bootstrap");
    if (c.bootstrap_n == 0) throw InputError("bootstrap.n must be positive");
    if (boot.contains("fix_size_to") && !boot["fix_size_to"].is_null()) {
        std::string level;
        read(boot, "fix_size_to", level, "bootstrap");
        c.fix_size_to = parse_level(level);
    }

    const json sbm = j.value("sbm", json::object());
    reject_unknown(sbm, {"sweeps", "greedy_after"}, "sbm");
    read(sbm, "sweeps", c.sbm_sweeps, "sbm");
    read(sbm, "greedy_after", c.sbm_greedy_after, "sbm");
    if (c.sbm_sweeps < 1) throw InputError("sbm.sweeps must be positive");
    if (!(c.sbm_greedy_after >= 0.0 && c.sbm_greedy_after <= 1.0))
        throw InputError("sbm.greedy_after must lie in [0, 1]");

    const json rmi = j.value("rmi", json::object());
    reject_unknown(rmi, {"samples", "sweeps"}, "rmi");
    read(rmi, "samples", c.rmi_samples, "rmi");
    read(rmi, "sweeps", c.rmi_sweeps, "rmi");
    if (c.rmi_sweeps < 1) throw InputError("rmi.sweeps must be positive");

    const json ergm = j.value("ergm", json::object());
    reject_unknown(ergm, {"terms", "width_threshold"}, "ergm");
    if (ergm.contains("terms") && !ergm["terms"].is_null()) {
        std::vector<std::string> terms;
        read(ergm, "terms", terms, "ergm");
        if (terms.empty()) throw InputError("ergm.terms must not be empty");
        for (const auto& t : terms) (void)parse_term(t);
        c.ergm_terms = terms;
    }
    read(ergm, "width_threshold", c.ergm_width_threshold, "ergm");

    const json modules = j.value("modules", json::object());
    reject_unknown(modules, {"temporal", "metrics", "backbone", "bootstrap", "sbm", "rmi", "ergm"}, "modules");
    read(modules, "temporal", c.modules.temporal, "modules");
    read(modules, "metrics", c.modules.metrics, "modules");
    read(modules, "backbone", c.modules.backbone, "modules");
    read(modules, "bootstrap", c.modules.bootstrap, "modules");
    read(modules, "sbm", c.modules.sbm, "modules");
    read(modules, "rmi", c.modules.rmi, "modules");
    read(modules, "ergm", c.modules.ergm, "modules");
    return c;
}

json PipelineConfig::to_json() const {
    json j;
    j["paths"] = {{"events", events},
                  {"roster", roster},
                  {"keywords", keywords_file ? json(*keywords_file) : json(nullptr)},
                  {"out_dir", out_dir}};
    std::vector<std::string> kind_names;
    for (auto k : kinds) kind_names.emplace_back(to_string(k));
    j["filter"] = {{"keywords", keywords},
                   {"start", start ? json(*start) : json(nullptr)},
                   {"end", end ? json(*end) : json(nullptr)},
                   {"kinds", kind_names},
                   {"roster_only", roster_only}};
    std::vector<std::string> level_names;
    for (auto l : levels) level_names.emplace_back(to_string(l));
    j["levels"] = level_names;
    j["seed"] = seed;
    j["timezone"] = timezone;
    j["activity"] = {{"binning", binning_name(activity_binning)}, {"min_events", min_events}};
    j["alpha"] = alpha;
    j["bootstrap"] = {{"n", bootstrap_n},
                      {"fix_size_to", fix_size_to ? json(to_string(*fix_size_to)) : json(nullptr)}};
    j["sbm"] = {{"sweeps", sbm_sweeps}, {"greedy_after", sbm_greedy_after}};
    j["rmi"] = {{"samples", rmi_samples}, {"sweeps", rmi_sweeps}};
    j["ergm"] = {{"terms", ergm_terms ? json(*ergm_terms) : json(nullptr)}, {"width_threshold", ergm_width_threshold}};
    j["modules"] = {{"temporal", modules.temporal}, {"metrics", modules.metrics}, {"backbone", modules.backbone},
                    {"bootstrap", modules.bootstrap}, {"sbm", modules.sbm},         {"rmi", modules.rmi},
                    {"ergm", modules.ergm}};
    return j;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("missing config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    auto c = from_json(j);
    c.base_dir = path.parent_path();
    return c;
}

std::string PipelineConfig::hash() const {
    json j = to_json();
    j["paths"].erase("out_dir");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

std::filesystem::path PipelineConfig::resolve(const std::string& path) const {
    const std::filesystem::path p(path);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

std::filesystem::path PipelineConfig::output_path(const std::string& file) const { return resolve(out_dir) / file; }

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Ingest: return "ingest";
        case Stage::Activity: return "activity";
        case Stage::Burstiness: return "burstiness";
        case Stage::Mixing: return "mixing";
        case Stage::Density: return "density";
        case Stage::Overlap: return "overlap";
        case Stage::Backbone: return "backbone";
        case Stage::Collapse: return "collapse";
        case Stage::Bootstrap: return "bootstrap";
        case Stage::Sbm: return "sbm";
        case Stage::Rmi: return "rmi";
        case Stage::Ergm: return "ergm";
    }
    return "";
}

Stage parse_stage(std::string_view name) {
    for (auto s : kPipelineStages)
        if (to_string(s) == name) return s;
    throw InputError("unknown stage '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Cached intermediate results

namespace {

struct BootstrapLevel {
    Weight size = 0;
    std::vector<Weight> total_weight;
    std::vector<std::size_t> edges;
    std::vector<std::size_t> backbone_edges;
    std::vector<std::optional<double>> density;
    std::vector<SimpleGraph> collapsed;
};

std::string level_label(std::string_view prefix, Level level) {
    return std::string(prefix) + "/" + std::string(to_string(level));
}

}  // namespace

struct Pipeline::Cache {
    std::optional<Roster> roster;
    std::optional<std::vector<Event>> parsed;
    std::optional<FilterSpec> filter;
    std::optional<std::vector<Event>> retweets;
    std::optional<std::vector<Event>> activity;
    std::optional<WeightedDigraph> account_graph;
    std::map<Level, WeightedDigraph> level_graphs;
    std::map<Level, std::vector<EdgeScore>> scores;
    std::map<Level, WeightedDigraph> backbones;
    std::map<Level, CollapsedGraph> collapsed;
    std::map<Level, BootstrapLevel> bootstrap;
    std::map<Level, SbmFit> sbm;
};

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)), cache_(std::make_unique<Cache>()) {}
Pipeline::~Pipeline() = default;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("missing input file: " + path.string());
    return in;
}

}  // namespace

const Roster& Pipeline::roster() {
    if (!cache_->roster) {
        auto in = open_input(config_.resolve(config_.roster));
        cache_->roster = parse_roster(in);
    }
    return *cache_->roster;
}

namespace {

FilterSpec make_filter(const PipelineConfig& c, const std::vector<std::string>& file_keywords) {
    FilterSpec spec = unbounded_filter();
    spec.keywords = c.keywords;
    spec.keywords.insert(spec.keywords.end(), file_keywords.begin(), file_keywords.end());
    if (c.start) spec.start = parse_iso8601(*c.start);
    if (c.end) spec.end = parse_iso8601(*c.end);
    spec.kinds = c.kinds;
    spec.roster_only = c.roster_only;
    spec.validate();
    return spec;
}

}  // namespace

const std::vector<Event>& Pipeline::retweets() {
    if (!cache_->retweets) {
        if (!cache_->parsed) {
            // Check every input exists before parsing any of them.
            for (const auto& path : config_.events) (void)open_input(config_.resolve(path));
            std::vector<std::vector<Event>> files;
            for (const auto& path : config_.events) {
                auto in = open_input(config_.resolve(path));
                try {
                    files.push_back(parse_events(in, event_format_for(path)));
                } catch (const InputError& e) {
                    throw InputError(config_.resolve(path).string() + ": " + e.what());
                }
            }
            cache_->parsed = merge_event_streams(std::move(files));
        }
        std::vector<std::string> file_keywords;
        if (config_.keywords_file) {
            auto in = open_input(config_.resolve(*config_.keywords_file));
            file_keywords = parse_keywords(in);
        }
        cache_->filter = make_filter(config_, file_keywords);
        cache_->retweets = filter_events(*cache_->parsed, *cache_->filter, roster());
        spdlog::debug("kept {} of {} events", cache_->retweets->size(), cache_->parsed->size());
    }
    return *cache_->retweets;
}

const std::vector<Event>& Pipeline::activity_events() {
    if (!cache_->activity) {
        (void)retweets();
        FilterSpec all = *cache_->filter;
        all.kinds = {EventKind::Tweet, EventKind::Retweet, EventKind::Reply, EventKind::Quote};
        cache_->activity = filter_events(*cache_->parsed, all, roster());
    }
    return *cache_->activity;
}

namespace {

GraphMetadata metadata_for(const FilterSpec& spec, std::optional<Level> level) {
    GraphMetadata m;
    m.level = level;
    m.window = std::pair{spec.start, spec.end};
    m.keyword_hash = spec.keyword_hash();
    return m;
}

}  // namespace

const WeightedDigraph& Pipeline::account_graph() {
    if (!cache_->account_graph) {
        const auto& events = retweets();
        cache_->account_graph =
            build_account_graph(events, roster(), std::nullopt, metadata_for(*cache_->filter, std::nullopt));
    }
    return *cache_->account_graph;
}

const WeightedDigraph& Pipeline::level_graph(Level level) {
    auto it = cache_->level_graphs.find(level);
    if (it == cache_->level_graphs.end()) {
        const auto& events = retweets();
        it = cache_->level_graphs
                 .emplace(level, build_account_graph(events, roster(), level, metadata_for(*cache_->filter, level)))
                 .first;
    }
    return it->second;
}

const std::vector<EdgeScore>& Pipeline::scores(Level level) {
    auto it = cache_->scores.find(level);
    if (it == cache_->scores.end()) it = cache_->scores.emplace(level, score_edges(level_graph(level))).first;
    return it->second;
}

const WeightedDigraph& Pipeline::backbone(Level level) {
    auto it = cache_->backbones.find(level);
    if (it == cache_->backbones.end())
        it = cache_->backbones.emplace(level, extract_backbone(level_graph(level), scores(level), config_.alpha)).first;
    return it->second;
}

const CollapsedGraph& Pipeline::collapsed(Level level) {
    auto it = cache_->collapsed.find(level);
    if (it == cache_->collapsed.end()) it = cache_->collapsed.emplace(level, collapse(backbone(level), roster())).first;
    return it->second;
}

std::vector<Sector> Pipeline::organization_sectors() {
    const auto& r = roster();
    std::vector<Sector> sectors(r.organizations().size());
    for (std::size_t o = 0; o < sectors.size(); ++o) sectors[o] = r.organization_sector(o);
    return sectors;
}

Weight Pipeline::bootstrap_size(Level level) {
    return level_graph(config_.fix_size_to.value_or(level)).total_weight();
}

const std::vector<SimpleGraph>& Pipeline::bootstrap_collapsed(Level level) {
    auto it = cache_->bootstrap.find(level);
    if (it != cache_->bootstrap.end()) return it->second.collapsed;

    const auto& g = level_graph(level);
    if (g.total_weight() == 0)
        throw DegenerateError("no retweets at level " + std::string(to_string(level)) + ": nothing to resample");
    const EdgeDistribution dist(g);
    const Roster& r = roster();
    BootstrapLevel b;
    b.size = bootstrap_size(level);
    const std::size_t n = config_.bootstrap_n;
    b.total_weight.resize(n);
    b.edges.resize(n);
    b.backbone_edges.resize(n);
    b.density.resize(n);
    b.collapsed.resize(n);
    const auto label = level_label("bootstrap", level);
    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) {
        Rng rng = ensemble_stream(config_.seed, label, i);
        const auto sample = sample_graph(dist, b.size, rng);
        const auto bb = extract_backbone(sample, score_edges(sample), config_.alpha);
        b.total_weight[i] = sample.total_weight();
        b.edges[i] = sample.edge_count();
        b.backbone_edges[i] = bb.edge_count();
        try {
            b.density[i] = org_density(sample, r, level).mean;
        } catch (const DegenerateError&) {
        }
        b.collapsed[i] = collapse(bb, r).to_simple();
    });
    return cache_->bootstrap.emplace(level, std::move(b)).first->second.collapsed;
}

const SbmFit& Pipeline::sbm(Level level) {
    auto it = cache_->sbm.find(level);
    if (it == cache_->sbm.end()) {
        SbmConfig sc;
        sc.n_sweeps = config_.sbm_sweeps;
        sc.greedy_after = config_.sbm_greedy_after;
        sc.seed = derive_key(config_.seed, level_label("sbm", level));
        it = cache_->sbm.emplace(level, fit_sbm(collapsed(level).to_simple(), sc)).first;
    }
    return it->second;
}

std::vector<ErgmTerm> Pipeline::ergm_terms() {
    if (!config_.ergm_terms) return default_terms(organization_sectors());
    std::vector<ErgmTerm> terms;
    for (const auto& t : *config_.ergm_terms) terms.push_back(parse_term(t));
    return terms;
}

// ---------------------------------------------------------------------------
// Stage runners

std::string Pipeline::csv_header_comment() const {
    return "# config_hash=" + config_.hash() + ",seed=" + std::to_string(config_.seed) + "\n";
}

void Pipeline::write_text(const std::string& file, const std::string& body, StageStatus& status) {
    const auto path = config_.output_path(file);
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << body;
    status.artifacts.push_back(file);
}

namespace {

json stamp(const PipelineConfig& c) { return {{"config_hash", c.hash()}, {"seed", c.seed}}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string level_name(Level l) { return std::string(to_string(l)); }

void warn(StageStatus& status, std::string message) {
    spdlog::warn("{}: {}", to_string(status.stage), message);
    status.messages.push_back(std::move(message));
    if (status.state == StageStatus::State::Ok) status.state = StageStatus::State::Warning;
}

}  // namespace

void Pipeline::stage_ingest(StageStatus& status) {
    const auto& events = retweets();
    json summary = stamp(config_);
    summary["events_read"] = cache_->parsed->size();
    summary["events_kept"] = events.size();
    summary["activity_events"] = activity_events().size();
    for (Level level : config_.levels) {
        const auto& g = level_graph(level);
        std::ostringstream csv_out, graphml;
        csv_out << csv_header_comment();
        write_edge_csv(csv_out, g);
        write_text("graph_" + level_name(level) + ".csv", csv_out.str(), status);
        write_graphml(graphml, g);
        std::string xml = graphml.str();
        const auto eol = xml.find('\n');
        xml.insert(eol + 1, "<!-- config_hash=" + config_.hash() + ",seed=" + std::to_string(config_.seed) + " -->\n");
        write_text("graph_" + level_name(level) + ".graphml", xml, status);
        summary["levels"][level_name(level)] = {
            {"vertices", g.vertex_count()}, {"edges", g.edge_count()}, {"total_weight", g.total_weight()}};
        if (g.edge_count() == 0) warn(status, "no retweets at level " + level_name(level));
    }
    write_text("ingest_summary.json", dump(summary), status);
}

void Pipeline::stage_activity(StageStatus& status) {
    const auto& events = activity_events();
    const auto tz = TimeZone::named(config_.timezone);
    const Roster& r = roster();
    for (Level level : config_.levels) {
        const auto profile = activity_profile(events, config_.activity_binning, tz, [&](const Event& e) {
            const auto* entry = r.find(e.account_id);
            return entry && entry->level == level;
        });
        std::ostringstream out;
        out << csv_header_comment() << "bin,count,fraction\n";
        for (std::size_t b = 0; b < profile.counts.size(); ++b) {
            out << b << ',' << profile.counts[b] << ',';
            if (profile.normalized) out << fmt_double((*profile.normalized)[b]);
            out << '\n';
        }
        write_text("activity_" + level_name(level) + ".csv", out.str(), status);
        if (!profile.normalized) warn(status, "no events at level " + level_name(level));
    }
}

void Pipeline::stage_burstiness(StageStatus& status) {
    const Roster& r = roster();
    const auto records = burstiness_by_account(activity_events(), config_.min_events);
    std::ostringstream out;
    out << csv_header_comment() << "account,level,org_type,n,B\n";
    std::map<Level, std::vector<double>> by_level;
    std::vector<AccountValue> values;
    for (const auto& rec : records) {
        const auto& entry = r.at(rec.account_id);
        if (std::find(config_.levels.begin(), config_.levels.end(), entry.level) == config_.levels.end()) continue;
        out << csv::quote(rec.account_id) << ',' << to_string(entry.level) << ',' << to_string(entry.org_type) << ','
            << rec.n_events << ',' << fmt_double(rec.coefficient) << '\n';
        by_level[entry.level].push_back(rec.coefficient);
        values.push_back({rec.account_id, entry.level, entry.org_type, rec.coefficient});
    }
    write_text("burstiness.csv", out.str(), status);

    std::vector<NamedSample> groups;
    for (Level level : config_.levels) {
        auto it = by_level.find(level);
        if (it == by_level.end() || it->second.size() < 2) {
            warn(status, "fewer than two burstiness values at level " + level_name(level) + "; left out of HSD");
            continue;
        }
        groups.emplace_back(level_name(level), it->second);
    }
    std::ostringstream hsd;
    hsd << csv_header_comment() << "group1,group2,mean_diff,ci_low,ci_high,p_adj\n";
    if (groups.size() >= 2) {
        for (const auto& row : tukey_hsd(groups))
            hsd << row.group1 << ',' << row.group2 << ',' << fmt_double(row.mean_diff) << ','
                << fmt_double(row.ci_low) << ',' << fmt_double(row.ci_high) << ',' << fmt_double(row.p_adj) << '\n';
    } else {
        warn(status, "HSD needs at least two levels with burstiness values");
    }
    write_text("hsd.csv", hsd.str(), status);

    std::ostringstream cmp;
    cmp << csv_header_comment() << "metric,first,second,org_type,diff,ci_low,ci_high,n\n";
    for (const auto& [first, second] : {std::pair{official_levels(), personal_levels()},
                                        std::pair{main_levels(), side_levels()}}) {
        for (const auto& row : compare_aggregations(values, first, second)) {
            cmp << "burstiness," << first.name << ',' << second.name << ',' << row.org_type << ',';
            if (row.difference)
                cmp << fmt_double(row.difference->diff) << ',' << fmt_double(row.difference->ci_low) << ','
                    << fmt_double(row.difference->ci_high) << ',' << row.difference->n;
            else
                cmp << ",,,";
            cmp << '\n';
        }
    }
    write_text("comparisons.csv", cmp.str(), status);
}

void Pipeline::stage_mixing(StageStatus& status) {
    const auto m = mixing_matrix(account_graph(), roster());
    std::ostringstream out;
    out << csv_header_comment() << "from_level,to_level,count,probability,from_accounts,to_accounts\n";
    for (Level a : kAllLevels)
        for (Level b : kAllLevels)
            out << to_string(a) << ',' << to_string(b) << ',' << m.counts[index_of(a)][index_of(b)] << ','
                << fmt_double(m.probability[index_of(a)][index_of(b)]) << ',' << m.accounts[index_of(a)] << ','
                << m.accounts[index_of(b)] << '\n';
    write_text("mixing.csv", out.str(), status);
    if (m.has_undefined_cells()) warn(status, "mixing matrix has undefined cells (levels without two accounts)");
}

void Pipeline::stage_density(StageStatus& status) {
    std::ostringstream summary;
    summary << csv_header_comment() << "level,organizations,mean\n";
    std::size_t defined = 0;
    std::string last_error;
    for (Level level : config_.levels) {
        try {
            const auto d = org_density(level_graph(level), roster(), level);
            std::ostringstream out;
            out << csv_header_comment() << "organization_id,accounts,density\n";
            for (const auto& v : d.per_org)
                out << csv::quote(v.organization_id) << ',' << v.accounts << ',' << fmt_double(v.value) << '\n';
            write_text("density_" + level_name(level) + ".csv", out.str(), status);
            summary << level_name(level) << ',' << d.per_org.size() << ',' << fmt_double(d.mean) << '\n';
            ++defined;
        } catch (const DegenerateError& e) {
            summary << level_name(level) << ",0,\n";
            last_error = e.what();
            warn(status, e.what());
        }
    }
    write_text("density_summary.csv", summary.str(), status);
    if (defined == 0) throw DegenerateError(last_error);
}

void Pipeline::stage_overlap(StageStatus& status) {
    std::size_t defined = 0;
    std::string last_error;
    for (Level level : config_.levels) {
        for (auto mode : {OverlapMode::Weighted, OverlapMode::Unweighted}) {
            const std::string mode_name = mode == OverlapMode::Weighted ? "weighted" : "unweighted";
            try {
                const auto o = org_mean_overlap(level_graph(level), roster(), level, mode);
                std::ostringstream out;
                out << csv_header_comment() << "organization_id,accounts,overlap\n";
                for (const auto& v : o.per_org)
                    out << csv::quote(v.organization_id) << ',' << v.accounts << ',' << fmt_double(v.value) << '\n';
                out << "mean,," << fmt_double(o.mean) << '\n';
                write_text("overlap_" + level_name(level) + "_" + mode_name + ".csv", out.str(), status);
                ++defined;
            } catch (const DegenerateError& e) {
                last_error = e.what();
                if (mode == OverlapMode::Weighted) warn(status, e.what());
            }
        }
    }
    if (defined == 0) throw DegenerateError(last_error);
}

void Pipeline::stage_backbone(StageStatus& status) {
    for (Level level : config_.levels) {
        const auto& g = level_graph(level);
        std::ostringstream scores_out, kept;
        scores_out << csv_header_comment();
        write_scores_csv(scores_out, g, scores(level));
        write_text("backbone_scores_" + level_name(level) + ".csv", scores_out.str(), status);
        kept << csv_header_comment();
        write_edge_csv(kept, backbone(level));
        write_text("backbone_" + level_name(level) + ".csv", kept.str(), status);
        spdlog::debug("backbone {}: kept {} of {} edges", level_name(level), backbone(level).edge_count(),
                     g.edge_count());
    }
}

void Pipeline::stage_collapse(StageStatus& status) {
    for (Level level : config_.levels) {
        std::ostringstream out;
        out << csv_header_comment();
        write_collapsed_csv(out, collapsed(level));
        write_text("collapsed_" + level_name(level) + ".csv", out.str(), status);
    }
}

void Pipeline::stage_bootstrap(StageStatus& status) {
    std::size_t ok = 0;
    std::string last_error;
    for (Level level : config_.levels) {
        try {
            (void)bootstrap_collapsed(level);
        } catch (const DegenerateError& e) {
            last_error = e.what();
            warn(status, e.what());
            continue;
        }
        ++ok;
        const auto& b = cache_->bootstrap.at(level);
        std::ostringstream out;
        out << csv_header_comment() << "sample_id,total_weight,edges,backbone_edges,collapsed_edges,mean_density\n";
        for (std::size_t i = 0; i < b.collapsed.size(); ++i)
            out << i << ',' << b.total_weight[i] << ',' << b.edges[i] << ',' << b.backbone_edges[i] << ','
                << b.collapsed[i].edge_count() << ',' << fmt_double(b.density[i]) << '\n';
        write_text("bootstrap_" + level_name(level) + ".csv", out.str(), status);
    }
    if (ok == 0) throw DegenerateError(last_error);
}

void Pipeline::stage_sbm(StageStatus& status) {
    json report = stamp(config_);
    for (Level level : config_.levels) {
        const auto& fit = sbm(level);
        const auto& c = collapsed(level);
        std::ostringstream out;
        out << csv_header_comment() << "org_id,block\n";
        for (std::size_t v = 0; v < c.vertex_count(); ++v)
            out << csv::quote(c.organizations[v]) << ',' << fit.partition[v] << '\n';
        write_text("partition_" + level_name(level) + ".csv", out.str(), status);
        json entry = {{"B", fit.partition.block_count()},
                      {"DL", fit.description_length},
                      {"sweeps", fit.sweeps},
                      {"seed", derive_key(config_.seed, level_label("sbm", level))},
                      {"vertices", c.vertex_count()},
                      {"edges", c.edge_count()},
                      {"sparse", fit.sparse},
                      {"warnings", json::array()}};
        if (fit.sparse) {
            const std::string msg = "sparse graph at level " + level_name(level) +
                                    " (mean degree below 2): block structure is poorly identified";
            entry["warnings"].push_back(msg);
            warn(status, msg);
        }
        report["levels"][level_name(level)] = entry;
        spdlog::debug("sbm {}: B = {}, DL = {}", level_name(level), fit.partition.block_count(),
                     fit.description_length);
    }
    write_text("sbm_report.json", dump(report), status);
}

void Pipeline::stage_rmi(StageStatus& status) {
    // Observed partitions, compared pairwise across levels.
    std::map<Level, std::vector<Partition>> samples;
    for (Level level : config_.levels) {
        std::vector<SimpleGraph> const* graphs = nullptr;
        try {
            graphs = &bootstrap_collapsed(level);
        } catch (const DegenerateError& e) {
            warn(status, e.what());
            continue;
        }
        const std::size_t k = std::min(config_.rmi_samples, graphs->size());
        std::vector<Partition> parts(k);
        const auto key = derive_key(config_.seed, level_label("rmi", level));
        tbb::parallel_for(std::size_t{0}, k, [&](std::size_t i) {
            SbmConfig sc;
            sc.n_sweeps = config_.rmi_sweeps;
            sc.greedy_after = config_.sbm_greedy_after;
            sc.seed = mix64(key + i);
            parts[i] = fit_sbm((*graphs)[i], sc).partition;
        });
        samples.emplace(level, std::move(parts));
    }

    std::ostringstream out;
    out << csv_header_comment() << "level_a,level_b,observed,bootstrap_mean,bootstrap_sd,pairs\n";
    for (std::size_t x = 0; x < config_.levels.size(); ++x) {
        for (std::size_t y = x; y < config_.levels.size(); ++y) {
            const Level a = config_.levels[x];
            const Level b = config_.levels[y];
            const double observed = rmi(sbm(a).partition, sbm(b).partition).normalized;
            std::vector<double> values;
            if (samples.contains(a) && samples.contains(b)) {
                const auto& pa = samples.at(a);
                const auto& pb = samples.at(b);
                for (std::size_t i = 0; i < pa.size(); ++i)
                    for (std::size_t j = a == b ? i + 1 : 0; j < pb.size(); ++j)
                        values.push_back(rmi(pa[i], pb[j]).normalized);
            }
            out << level_name(a) << ',' << level_name(b) << ',' << fmt_double(observed) << ',';
            if (!values.empty()) {
                double mean = 0;
                for (double v : values) mean += v;
                mean /= static_cast<double>(values.size());
                double ss = 0;
                for (double v : values) ss += (v - mean) * (v - mean);
                const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
                out << fmt_double(mean) << ',' << fmt_double(sd);
            } else {
                out << ',';
            }
            out << ',' << values.size() << '\n';
        }
    }
    write_text("rmi_matrix.csv", out.str(), status);
}

namespace {

json fit_json(const ErgmFit& fit) {
    json j = {{"converged", fit.converged},
              {"log_pseudolikelihood", fit.log_pseudolikelihood},
              {"iterations", fit.iterations}};
    for (std::size_t t = 0; t < fit.terms.size(); ++t) {
        json term = {{"estimate", fit.theta[t]}, {"se", fit.standard_errors[t]}};
        if (!fit.converged && !fit.divergence.empty()) term["divergence"] = fit.divergence[t];
        j["terms"][term_name(fit.terms[t])] = term;
    }
    if (!fit.message.empty()) j["message"] = fit.message;
    return j;
}

}  // namespace

void Pipeline::stage_ergm(StageStatus& status) {
    const auto terms = ergm_terms();
    const auto sectors = organization_sectors();
    json summary = stamp(config_);
    std::vector<std::string> names;
    for (const auto& t : terms) names.push_back(term_name(t));
    summary["terms"] = names;
    summary["bootstrap_size_fixed_to"] = config_.fix_size_to ? json(level_name(*config_.fix_size_to)) : json(nullptr);
    std::size_t ok = 0;
    std::string last_error;
    for (Level level : config_.levels) {
        json entry;
        const auto observed = collapsed(level).to_simple();
        if (auto reason = degeneracy(observed, terms, sectors))
            entry["observed"] = {{"degenerate", *reason}};
        else
            entry["observed"] = fit_json(fit_mple(observed, terms, sectors));

        entry["bootstrap_size"] = bootstrap_size(level);
        std::ostringstream out;
        out << csv_header_comment() << "sample_id,term,estimate,se,converged,status\n";
        try {
            const auto& graphs = bootstrap_collapsed(level);
            ErgmBootstrapOptions options;
            options.width_threshold = config_.ergm_width_threshold;
            std::optional<ErgmEnsemble> ensemble;
            std::string error;
            try {
                ensemble = bootstrap_ergm(graphs, terms, sectors, options);
            } catch (const DegenerateError& e) {
                error = e.what();
            }
            // Per-sample rows are written even when the whole level is too sparse.
            std::vector<ErgmSample> rows;
            if (ensemble) {
                rows = ensemble->samples;
            } else {
                rows.resize(graphs.size());
                tbb::parallel_for(std::size_t{0}, graphs.size(), [&](std::size_t i) {
                    rows[i].index = i;
                    if (auto reason = degeneracy(graphs[i], terms, sectors))
                        rows[i].degenerate_reason = *reason;
                    else
                        rows[i].fit = fit_mple(graphs[i], terms, sectors);
                });
            }
            for (const auto& s : rows) {
                for (std::size_t t = 0; t < terms.size(); ++t) {
                    out << s.index << ',' << names[t] << ',';
                    if (s.fit)
                        out << fmt_double(s.fit->theta[t]) << ',' << fmt_double(s.fit->standard_errors[t]) << ','
                            << (s.fit->converged ? "true" : "false") << ','
                            << (s.fit->converged ? "ok" : "non_converged");
                    else
                        out << ",,false,degenerate";
                    out << '\n';
                }
            }
            if (ensemble) {
                ++ok;
                entry["samples"] = graphs.size();
                entry["degenerate"] = ensemble->degenerate;
                entry["non_converged"] = ensemble->non_converged;
                entry["wide"] = ensemble->wide;
                entry["mean_width"] = ensemble->mean_width();
                for (const auto& s : ensemble->summary)
                    entry["quantiles"][term_name(s.term)] = {{"n", s.count},     {"mean", s.mean}, {"sd", s.sd},
                                                             {"q025", s.q025},   {"q25", s.q25},   {"q50", s.q50},
                                                             {"q75", s.q75},     {"q975", s.q975}};
                if (ensemble->wide)
                    warn(status, "ERGM coefficient distributions at level " + level_name(level) +
                                     " are flat and wide");
            } else {
                entry["error"] = error;
                last_error = error;
                warn(status, level_name(level) + ": " + error);
            }
        } catch (const DegenerateError& e) {
            entry["error"] = e.what();
            last_error = e.what();
            warn(status, e.what());
        }
        write_text("ergm_" + level_name(level) + ".csv", out.str(), status);
        summary["levels"][level_name(level)] = entry;
    }
    write_text("ergm_summary.json", dump(summary), status);
    if (ok == 0) throw DegenerateError(last_error);
}

StageStatus Pipeline::run(Stage stage, bool rethrow) {
    StageStatus status;
    status.stage = stage;
    spdlog::debug("stage {}", to_string(stage));
    try {
        switch (stage) {
            case Stage::Ingest: stage_ingest(status); break;
            case Stage::Activity: stage_activity(status); break;
            case Stage::Burstiness: stage_burstiness(status); break;
            case Stage::Mixing: stage_mixing(status); break;
            case Stage::Density: stage_density(status); break;
            case Stage::Overlap: stage_overlap(status); break;
            case Stage::Backbone: stage_backbone(status); break;
            case Stage::Collapse: stage_collapse(status); break;
            case Stage::Bootstrap: stage_bootstrap(status); break;
            case Stage::Sbm: stage_sbm(status); break;
            case Stage::Rmi: stage_rmi(status); break;
            case Stage::Ergm: stage_ergm(status); break;
        }
    } catch (const InputError& e) {
        if (rethrow) throw;
        status.state = StageStatus::State::Failed;
        status.failure = StageStatus::Failure::Input;
        status.messages.emplace_back(e.what());
    } catch (const DegenerateError& e) {
        if (rethrow) throw;
        status.state = StageStatus::State::Failed;
        status.failure = StageStatus::Failure::Degenerate;
        // A stage that already recorded this as a per-level warning keeps one copy.
        if (std::find(status.messages.begin(), status.messages.end(), e.what()) == status.messages.end())
            status.messages.emplace_back(e.what());
    } catch (const std::exception& e) {
        if (rethrow) throw;
        status.state = StageStatus::State::Failed;
        status.failure = StageStatus::Failure::Internal;
        status.messages.emplace_back(e.what());
    }
    if (status.state == StageStatus::State::Failed)
        spdlog::error("stage {} failed: {}", to_string(stage), status.messages.back());
    return status;
}

namespace {

bool enabled(const PipelineConfig::Modules& m, Stage stage) {
    switch (stage) {
        case Stage::Ingest: return true;
        case Stage::Activity:
        case Stage::Burstiness: return m.temporal;
        case Stage::Mixing:
        case Stage::Density:
        case Stage::Overlap: return m.metrics;
        case Stage::Backbone:
        case Stage::Collapse: return m.backbone;
        case Stage::Bootstrap: return m.bootstrap;
        case Stage::Sbm: return m.sbm;
        case Stage::Rmi: return m.rmi && m.sbm && m.bootstrap;
        case Stage::Ergm: return m.ergm && m.bootstrap;
    }
    return false;
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

}  // namespace

std::vector<StageStatus> Pipeline::run_all() {
    std::vector<StageStatus> statuses;
    bool ingest_failed = false;
    for (Stage stage : kPipelineStages) {
        if (!enabled(config_.modules, stage) || ingest_failed) {
            StageStatus skipped;
            skipped.stage = stage;
            skipped.state = StageStatus::State::Skipped;
            if (ingest_failed) skipped.messages.emplace_back("inputs could not be read");
            statuses.push_back(std::move(skipped));
            continue;
        }
        statuses.push_back(run(stage));
        if (stage == Stage::Ingest && statuses.back().state == StageStatus::State::Failed) ingest_failed = true;
    }
    json report = stamp(config_);
    report["stages"] = json::array();
    for (const auto& s : statuses)
        report["stages"].push_back({{"stage", to_string(s.stage)},
                                    {"status", state_name(s.state)},
                                    {"messages", s.messages},
                                    {"artifacts", s.artifacts}});
    StageStatus sink;
    try {
        write_text("status.json", dump(report), sink);
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
    }
    return statuses;
}

}  // namespace stratanet
