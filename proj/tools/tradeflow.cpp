// tradeflow CLI: mine trade associations, cluster countries, train and score
// boosted trade-flow models, and validate series with flags and MAD screens.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tradeflow/clustering.hpp"
#include "tradeflow/common.hpp"
#include "tradeflow/csv.hpp"
#include "tradeflow/eml.hpp"
#include "tradeflow/ingest.hpp"
#include "tradeflow/model_io.hpp"
#include "tradeflow/rules.hpp"
#include "tradeflow/sentinel.hpp"
#include "tradeflow/trees.hpp"

namespace fs = std::filesystem;
using namespace tradeflow;

namespace {

/// Minimal INI reader: [section] headers, key = value lines, '#' or ';'
/// comments.
class IniConfig {
public:
    void load(const fs::path& path) {
        std::ifstream in(path);
        require(in.good(), "cannot open config file: " + path.string());
        std::string line, section;
        while (std::getline(in, line)) {
            const auto text = std::string(csv::trim(line));
            if (text.empty() || text[0] == '#' || text[0] == ';') continue;
            if (text.front() == '[' && text.back() == ']') {
                section = text.substr(1, text.size() - 2);
                continue;
            }
            const auto eq = text.find('=');
            require(eq != std::string::npos, "bad config line: " + line);
            const auto key = std::string(csv::trim(std::string_view(text).substr(0, eq)));
            const auto value = std::string(csv::trim(std::string_view(text).substr(eq + 1)));
            values_[section + "." + key] = value;
        }
    }

    std::optional<std::string> get(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        const auto parsed = csv::to_double(*v);
        require(parsed.has_value(), "config " + section + "." + key + " is not a number: " + *v);
        return *parsed;
    }

    long long get_int(const std::string& section, const std::string& key, long long fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        const auto parsed = csv::to_int(*v);
        require(parsed.has_value(), "config " + section + "." + key + " is not an integer: " + *v);
        return *parsed;
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const auto v = get(section, key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw Error("config " + section + "." + key + " is not a boolean: " + *v);
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        return get(section, key).value_or(fallback);
    }

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Shared state for one subcommand run: output directory, master seed, the
/// loaded config, and the canonical parameter dump feeding the config hash.
struct RunContext {
    fs::path out_dir = ".";
    std::uint64_t seed = 0;
    IniConfig config;
    std::ostringstream canonical;

    template <typename T>
    void note(const std::string& key, const T& value) {
        canonical << key << "=" << value << "\n";
    }

    std::vector<std::string> meta_lines() const {
        return {std::string("tradeflow ") + kVersion,
                "config_hash=" + hex64(fnv1a64(canonical.str())),
                "seed=" + std::to_string(seed)};
    }

    std::ofstream open_output(const std::string& filename) const {
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / filename);
        require(out.good(), "cannot write output: " + (out_dir / filename).string());
        return out;
    }

    void warn(const std::string& message) const { std::cerr << "warning: " << message << "\n"; }
};

void report_row_diagnostics(const RunContext& ctx,
                            const std::vector<ingest::RowDiagnostic>& diagnostics,
                            const std::string& source) {
    for (const auto& d : diagnostics) {
        ctx.warn(source + ":" + std::to_string(d.line_number) + ": " + d.message);
    }
}

long long elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start)
        .count();
}

// ---- mine -------------------------------------------------------------------

struct MineArgs {
    std::string trade_path;
    double min_support = -1.0; // negative: take the config value
    int max_antecedent = -1;
    std::string scope;
    double min_value = -1.0;
};

int cmd_mine(RunContext& ctx, const MineArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    rules::MiningConfig config;
    config.min_support = args.min_support >= 0.0
                             ? args.min_support
                             : ctx.config.get_double("mining", "min_support", 0.35);
    config.max_antecedent_size =
        args.max_antecedent >= 0
            ? args.max_antecedent
            : static_cast<int>(ctx.config.get_int("mining", "max_antecedent_size", 3));
    const std::string scope_text =
        !args.scope.empty() ? args.scope : ctx.config.get_string("mining", "scope", "global");
    if (scope_text == "global") config.scope = rules::MiningConfig::Scope::Global;
    else if (scope_text == "per-reporter") config.scope = rules::MiningConfig::Scope::PerReporter;
    else if (scope_text == "per-pair") config.scope = rules::MiningConfig::Scope::PerPair;
    else throw Error("unknown mining scope: " + scope_text);
    require(config.min_support > 0.0 && config.min_support <= 1.0,
            "min_support must lie in (0, 1]");
    const double min_value =
        args.min_value >= 0.0 ? args.min_value : ctx.config.get_double("ingest", "min_value", 0.0);

    ctx.note("command", "mine");
    ctx.note("trade", args.trade_path);
    ctx.note("min_support", config.min_support);
    ctx.note("max_antecedent_size", config.max_antecedent_size);
    ctx.note("scope", scope_text);
    ctx.note("min_value", min_value);

    const auto loaded = ingest::load_trade_csv(args.trade_path);
    report_row_diagnostics(ctx, loaded.diagnostics, args.trade_path);
    const auto transactions = ingest::build_transactions(loaded.records, min_value);
    require(!transactions.empty(), "no transactions after thresholding");

    std::vector<rules::ScopeStats> stats;
    const auto scoped = rules::mine_scoped_rules(transactions, config, &stats);
    std::vector<rules::Rule> all_rules;
    for (const auto& [scope, rule_set] : scoped) {
        (void)scope;
        all_rules.insert(all_rules.end(), rule_set.begin(), rule_set.end());
    }
    rules::sort_rules(all_rules);
    const auto aggregated = rules::aggregate_rules(scoped);

    const auto meta = ctx.meta_lines();
    {
        auto out = ctx.open_output("rules.csv");
        rules::write_rules_csv(out, all_rules, meta);
    }
    {
        auto out = ctx.open_output("aggregated.csv");
        for (const auto& line : meta) out << "# " << line << "\n";
        out << "Antecedent,Consequent,Sum_of_Confidence\n";
        for (const auto& a : aggregated) {
            out << csv::escape(a.antecedent_names) << "," << csv::escape(a.consequent_name) << ","
                << csv::fixed(a.sum_confidence, 6) << "\n";
        }
    }
    {
        // Scatter data, one point per rule.
        auto out = ctx.open_output("rule_scatter.csv");
        for (const auto& line : meta) out << "# " << line << "\n";
        out << "support,confidence,lift\n";
        for (const auto& r : all_rules) {
            out << csv::fixed(r.support, 6) << "," << csv::fixed(r.confidence, 6) << ","
                << csv::fixed(r.lift, 6) << "\n";
        }
    }
    {
        std::size_t frequent_total = 0;
        nlohmann::json scope_stats = nlohmann::json::array();
        for (const auto& s : stats) {
            frequent_total += s.frequent_itemsets;
            scope_stats.push_back({{"scope", s.scope},
                                   {"transactions", s.transactions},
                                   {"frequent_itemsets", s.frequent_itemsets}});
        }
        nlohmann::json doc;
        doc["transactions"] = transactions.size();
        doc["frequent_itemsets"] = frequent_total;
        doc["rules"] = all_rules.size();
        doc["aggregated_rules"] = aggregated.size();
        doc["rejected_rows"] = loaded.diagnostics.size();
        doc["scopes"] = std::move(scope_stats);
        auto out = ctx.open_output("mine_summary.json");
        for (const auto& line : meta) out << "// " << line << "\n";
        out << doc.dump(2) << "\n";
    }
    // Timing stays on stderr so reruns are byte-identical.
    std::cerr << "mine: " << transactions.size() << " transactions, " << all_rules.size()
              << " rules in " << elapsed_ms(start) << " ms\n";
    return 0;
}

// ---- cluster ------------------------------------------------------------------

struct ClusterArgs {
    std::string trade_path;
    int k_min = -1;
    int k_max = -1;
    int seeds_per_k = -1;
};

int cmd_cluster(RunContext& ctx, const ClusterArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    const int k_min =
        args.k_min > 0 ? args.k_min : static_cast<int>(ctx.config.get_int("cluster", "k_min", 2));
    int k_max =
        args.k_max > 0 ? args.k_max : static_cast<int>(ctx.config.get_int("cluster", "k_max", 20));
    const int seeds_per_k = args.seeds_per_k > 0
                                ? args.seeds_per_k
                                : static_cast<int>(ctx.config.get_int("cluster", "seeds_per_k", 5));

    ctx.note("command", "cluster");
    ctx.note("trade", args.trade_path);
    ctx.note("k_min", k_min);
    ctx.note("k_max", k_max);
    ctx.note("seeds_per_k", seeds_per_k);

    const auto loaded = ingest::load_trade_csv(args.trade_path);
    report_row_diagnostics(ctx, loaded.diagnostics, args.trade_path);
    const auto matrix = ingest::build_country_vectors(loaded.records);
    require(matrix.vectors.size() >= 3, "clustering needs at least 3 countries");
    if (k_max >= static_cast<int>(matrix.vectors.size())) {
        k_max = static_cast<int>(matrix.vectors.size()) - 1;
        ctx.warn("k_max clamped to " + std::to_string(k_max) +
                 " (needs more countries than clusters)");
    }
    require(k_min <= k_max, "empty k range after clamping");

    std::vector<cluster::ClusterModel> models;
    const auto report =
        cluster::select_k(matrix.vectors, k_min, k_max, seeds_per_k, ctx.seed, &models);

    const auto meta = ctx.meta_lines();
    {
        auto out = ctx.open_output("clusters.csv");
        cluster::write_clusters_csv(out, matrix.vectors, models, meta);
    }
    {
        auto out = ctx.open_output("kselect.csv");
        cluster::write_kselect_csv(out, report, meta);
    }
    std::cerr << "cluster: " << matrix.vectors.size() << " countries, chosen_k=" << report.chosen_k
              << " in " << elapsed_ms(start) << " ms\n";
    return 0;
}

// ---- train / predict ----------------------------------------------------------

trees::BoostConfig boost_from_config(const RunContext& ctx) {
    trees::BoostConfig boost;
    boost.learning_rate = ctx.config.get_double("boost", "learning_rate", boost.learning_rate);
    boost.feature_fraction =
        ctx.config.get_double("boost", "feature_fraction", boost.feature_fraction);
    boost.max_depth = static_cast<int>(ctx.config.get_int("boost", "max_depth", boost.max_depth));
    boost.num_leaves = static_cast<int>(ctx.config.get_int("boost", "num_leaves", boost.num_leaves));
    boost.early_stopping_rounds = static_cast<int>(
        ctx.config.get_int("boost", "early_stopping_rounds", boost.early_stopping_rounds));
    boost.max_rounds = static_cast<int>(ctx.config.get_int("boost", "max_rounds", boost.max_rounds));
    boost.validation_fraction =
        ctx.config.get_double("boost", "validation_fraction", boost.validation_fraction);
    boost.min_leaf = static_cast<int>(ctx.config.get_int("boost", "min_leaf", boost.min_leaf));
    return boost;
}

struct TrainArgs {
    std::string trade_path;
    std::string features_path;
    std::string commodity;
};

int cmd_train(RunContext& ctx, const TrainArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    eml::EmlConfig config;
    config.boost = boost_from_config(ctx);
    config.seed = ctx.seed;
    config.holdout_fraction = ctx.config.get_double("eml", "holdout_fraction", 0.2);
    config.k_min = static_cast<int>(ctx.config.get_int("cluster", "k_min", 2));
    config.k_max = static_cast<int>(ctx.config.get_int("cluster", "k_max", 20));
    config.seeds_per_k = static_cast<int>(ctx.config.get_int("cluster", "seeds_per_k", 5));
    const std::string cluster_k = ctx.config.get_string("eml", "cluster_k", "auto");
    if (cluster_k == "auto") {
        config.cluster_k = 0;
    } else {
        const auto parsed = csv::to_int(cluster_k);
        require(parsed.has_value(), "eml.cluster_k must be 'auto' or an integer");
        config.cluster_k = static_cast<int>(*parsed);
    }
    const std::string training = ctx.config.get_string("eml", "training_cluster", "auto");
    if (training == "auto") {
        config.training_cluster = eml::TrainingClusterMode::Auto;
    } else if (training == "all") {
        config.training_cluster = eml::TrainingClusterMode::All;
    } else {
        const auto parsed = csv::to_int(training);
        require(parsed.has_value(), "eml.training_cluster must be 'auto', 'all', or a cluster id");
        config.training_cluster = eml::TrainingClusterMode::Fixed;
        config.fixed_cluster_id = static_cast<int>(*parsed);
    }
    config.commodity =
        !args.commodity.empty() ? args.commodity : ctx.config.get_string("eml", "commodity", "");

    ctx.note("command", "train");
    ctx.note("trade", args.trade_path);
    ctx.note("features", args.features_path);
    ctx.note("cluster_k", cluster_k);
    ctx.note("training_cluster", training);
    ctx.note("commodity", config.commodity);
    ctx.note("holdout_fraction", config.holdout_fraction);
    ctx.note("k_min", config.k_min);
    ctx.note("k_max", config.k_max);
    ctx.note("seeds_per_k", config.seeds_per_k);
    ctx.note("learning_rate", config.boost.learning_rate);
    ctx.note("feature_fraction", config.boost.feature_fraction);
    ctx.note("max_depth", config.boost.max_depth);
    ctx.note("num_leaves", config.boost.num_leaves);
    ctx.note("early_stopping_rounds", config.boost.early_stopping_rounds);
    ctx.note("max_rounds", config.boost.max_rounds);
    ctx.note("validation_fraction", config.boost.validation_fraction);
    ctx.note("min_leaf", config.boost.min_leaf);

    const auto loaded = ingest::load_trade_csv(args.trade_path);
    report_row_diagnostics(ctx, loaded.diagnostics, args.trade_path);
    const auto features = ingest::load_feature_csv(args.features_path);
    report_row_diagnostics(ctx, features.diagnostics, args.features_path);
    for (std::size_t f = 0; f < features.feature_names.size(); ++f) {
        if (features.imputed_counts[f] > 0) {
            ctx.warn("imputed " + std::to_string(features.imputed_counts[f]) +
                     " missing values in column " + features.feature_names[f]);
        }
    }

    const auto result = eml::run_eml(loaded.records, features, config);

    const auto meta = ctx.meta_lines();
    {
        auto out = ctx.open_output("model.json");
        trees::save_model_json(out, result.model, meta);
    }
    {
        auto out = ctx.open_output("predictions.csv");
        eml::write_predictions_csv(out, features, result.used_rows, result.predictions_all, meta);
    }
    {
        auto out = ctx.open_output("importance.csv");
        trees::write_importance_csv(out, result.model, meta);
    }
    {
        auto out = ctx.open_output("eml_report.json");
        eml::write_eml_report_json(out, result, meta);
    }
    std::cerr << "train: r2_filtered=" << result.r2_filtered
              << " r2_all_data_baseline=" << result.r2_all_data_baseline << " in "
              << elapsed_ms(start) << " ms\n";
    return 0;
}

struct PredictArgs {
    std::string model_path;
    std::string features_path;
};

int cmd_predict(RunContext& ctx, const PredictArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    ctx.note("command", "predict");
    ctx.note("model", args.model_path);
    ctx.note("features", args.features_path);

    const auto model = trees::load_model_json(args.model_path);
    const auto features = ingest::load_feature_csv(args.features_path);
    report_row_diagnostics(ctx, features.diagnostics, args.features_path);

    // The feature columns must match the training layout, by name when the
    // model carries names.
    if (!model.feature_names.empty()) {
        for (const auto& name : model.feature_names) {
            if (std::find(features.feature_names.begin(), features.feature_names.end(), name) ==
                features.feature_names.end()) {
                throw Error("feature column missing from input: " + name);
            }
        }
        for (const auto& name : features.feature_names) {
            if (std::find(model.feature_names.begin(), model.feature_names.end(), name) ==
                model.feature_names.end()) {
                throw Error("feature column unknown to the model: " + name);
            }
        }
        require(model.feature_names == features.feature_names,
                "feature columns are ordered differently than the model expects");
    } else {
        require(features.feature_names.size() == model.n_features,
                "feature count mismatch: model expects " + std::to_string(model.n_features) +
                    " columns");
    }

    trees::Matrix rows;
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        rows.push_back(features.rows[i].features);
        indices.push_back(i);
    }
    const auto predictions = trees::predict(model, rows);
    {
        auto out = ctx.open_output("predictions.csv");
        eml::write_predictions_csv(out, features, indices, predictions, ctx.meta_lines());
    }
    std::cerr << "predict: scored " << predictions.size() << " rows in " << elapsed_ms(start)
              << " ms\n";
    return 0;
}

// ---- validate -------------------------------------------------------------------

struct ValidateArgs {
    std::string series_path;
};

int cmd_validate(RunContext& ctx, const ValidateArgs& args) {
    const auto start = std::chrono::steady_clock::now();
    sentinel::MadConfig mad;
    mad.threshold = ctx.config.get_double("mad", "threshold", mad.threshold);
    mad.consistency_constant =
        ctx.config.get_double("mad", "consistency_constant", mad.consistency_constant);
    mad.linear_detrend = ctx.config.get_bool("mad", "linear_detrend", mad.linear_detrend);
    sentinel::FlagConfig flag_config;
    flag_config.calendar_windows =
        ctx.config.get_bool("flags", "calendar_windows", flag_config.calendar_windows);

    ctx.note("command", "validate");
    ctx.note("series", args.series_path);
    ctx.note("threshold", mad.threshold);
    ctx.note("consistency_constant", mad.consistency_constant);
    ctx.note("linear_detrend", mad.linear_detrend);
    ctx.note("calendar_windows", flag_config.calendar_windows);

    const csv::File file = csv::read_file(args.series_path);
    require(csv::split("series,statistical_type,unit,date,value") == file.header,
            "series CSV header must be series,statistical_type,unit,date,value");

    struct Series {
        std::string statistical_type;
        std::string unit;
        std::vector<sentinel::SeriesPoint> points;
    };
    std::map<std::string, Series> by_name;
    for (const auto& row : file.rows) {
        if (row.fields.size() != 5) {
            ctx.warn(args.series_path + ":" + std::to_string(row.line_number) + ": malformed row");
            continue;
        }
        const auto value = csv::to_double(row.fields[4]);
        if (!value) {
            ctx.warn(args.series_path + ":" + std::to_string(row.line_number) +
                     ": unparsable value");
            continue;
        }
        auto& series = by_name[row.fields[0]];
        if (series.points.empty()) {
            series.statistical_type = row.fields[1];
            series.unit = row.fields[2];
        }
        series.points.push_back({sentinel::Date::parse(row.fields[3]), *value});
    }
    if (by_name.empty()) ctx.warn("no series found in " + args.series_path);

    std::vector<sentinel::FlagRow> flags;
    std::vector<sentinel::OutlierReport::Row> outliers;
    std::vector<std::string> skipped;
    for (auto& [name, series] : by_name) {
        std::sort(series.points.begin(), series.points.end(),
                  [](const sentinel::SeriesPoint& a, const sentinel::SeriesPoint& b) {
                      return a.date < b.date;
                  });
        bool duplicate_dates = false;
        for (std::size_t i = 1; i < series.points.size(); ++i) {
            if (series.points[i - 1].date == series.points[i].date) duplicate_dates = true;
        }
        if (duplicate_dates) {
            skipped.push_back("skipped series=" + name + " reason=duplicate-timestamps");
            ctx.warn("series '" + name + "' has duplicate timestamps");
            continue;
        }

        if (series.points.size() >= 2) {
            const std::vector<sentinel::SeriesPoint> history(series.points.begin(),
                                                             series.points.end() - 1);
            const auto flag =
                sentinel::flag_value(name, history, series.points.back().value, flag_config);
            flags.push_back({name, series.statistical_type, series.unit, flag.value, flag.color});
        } else {
            skipped.push_back("skipped series=" + name + " reason=too-short-for-flag");
            ctx.warn("series '" + name + "' too short for a flag (needs 2 points)");
        }

        if (series.points.size() >= 3) {
            const auto report = sentinel::detect_series_outliers(name, series.points, mad);
            outliers.insert(outliers.end(), report.rows.begin(), report.rows.end());
        } else {
            skipped.push_back("skipped series=" + name + " reason=too-short-for-outliers");
            ctx.warn("series '" + name + "' too short for outlier detection (needs 3 points)");
        }
    }

    auto meta = ctx.meta_lines();
    meta.insert(meta.end(), skipped.begin(), skipped.end());
    {
        auto out = ctx.open_output("flags.csv");
        sentinel::write_flags_csv(out, flags, meta);
    }
    {
        auto out = ctx.open_output("outliers.csv");
        sentinel::write_outliers_csv(out, outliers, meta);
    }
    std::cerr << "validate: " << by_name.size() << " series, " << outliers.size() << " outliers in "
              << elapsed_ms(start) << " ms\n";
    return 0;
}

// ---- query ----------------------------------------------------------------------

struct QueryArgs {
    std::string rules_path;
    double min_confidence = -1.0;
    double min_lift = -1.0;
    std::vector<int> antecedent_contains;
    int consequent = 0;
    std::string origin;
    std::string destination;
};

int cmd_query(RunContext& ctx, const QueryArgs& args) {
    ctx.note("command", "query");
    ctx.note("rules", args.rules_path);
    ctx.note("min_confidence", args.min_confidence);
    ctx.note("min_lift", args.min_lift);
    ctx.note("consequent", args.consequent);
    ctx.note("origin", args.origin);
    ctx.note("destination", args.destination);

    rules::RuleFilter filter;
    if (args.min_confidence >= 0.0) filter.min_confidence = args.min_confidence;
    if (args.min_lift >= 0.0) filter.min_lift = args.min_lift;
    filter.antecedent_contains = args.antecedent_contains;
    if (args.consequent > 0) filter.consequent = args.consequent;
    if (!args.origin.empty()) filter.origin = args.origin;
    if (!args.destination.empty()) filter.destination = args.destination;

    const auto store = rules::load_rules_csv(args.rules_path);
    const auto selected = rules::query_rules(store, filter);
    {
        auto out = ctx.open_output("query.csv");
        rules::write_rules_csv(out, selected, ctx.meta_lines());
    }
    std::cerr << "query: " << selected.size() << " of " << store.size() << " rules matched\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tradeflow: trade association mining, prediction, and validation"};
    app.require_subcommand(1);
    app.fallthrough();

    RunContext ctx;
    std::string config_path;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--seed", ctx.seed, "master seed recorded in every output");
    app.add_option("--out", out_dir, "output directory");

    MineArgs mine_args;
    auto* mine = app.add_subcommand("mine", "mine association rules from a trade CSV");
    mine->add_option("--trade", mine_args.trade_path, "trade CSV path")->required();
    mine->add_option("--min-support", mine_args.min_support, "minimum support in (0, 1]");
    mine->add_option("--max-antecedent", mine_args.max_antecedent, "maximum antecedent size");
    mine->add_option("--scope", mine_args.scope, "global | per-reporter | per-pair");
    mine->add_option("--min-value", mine_args.min_value, "trade value threshold for baskets");

    ClusterArgs cluster_args;
    auto* clusterc = app.add_subcommand("cluster", "cluster countries on trade vectors");
    clusterc->add_option("--trade", cluster_args.trade_path, "trade CSV path")->required();
    clusterc->add_option("--k-min", cluster_args.k_min, "smallest k to try");
    clusterc->add_option("--k-max", cluster_args.k_max, "largest k to try");
    clusterc->add_option("--seeds-per-k", cluster_args.seeds_per_k, "restarts per k");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "run the cluster-filtered boosting pipeline");
    train->add_option("--trade", train_args.trade_path, "trade CSV path")->required();
    train->add_option("--features", train_args.features_path, "feature CSV path")->required();
    train->add_option("--commodity", train_args.commodity, "restrict to one commodity code");

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "score new rows with a saved model");
    predict->add_option("--model", predict_args.model_path, "model JSON path")->required();
    predict->add_option("--features", predict_args.features_path, "feature CSV path")->required();

    ValidateArgs validate_args;
    auto* validate = app.add_subcommand("validate", "flag colors and MAD outliers per series");
    validate->add_option("--series", validate_args.series_path, "series CSV path")->required();

    QueryArgs query_args;
    auto* query = app.add_subcommand("query", "filter a rule CSV store");
    query->add_option("--rules", query_args.rules_path, "rules CSV path")->required();
    query->add_option("--min-confidence", query_args.min_confidence, "minimum confidence");
    query->add_option("--min-lift", query_args.min_lift, "minimum lift");
    query->add_option("--antecedent-contains", query_args.antecedent_contains,
                      "chapter codes the antecedent must contain");
    query->add_option("--consequent", query_args.consequent, "exact consequent chapter");
    query->add_option("--origin", query_args.origin, "Country_O scope label");
    query->add_option("--destination", query_args.destination, "Country_D scope label");

    CLI11_PARSE(app, argc, argv);

    try {
        ctx.out_dir = out_dir;
        if (!config_path.empty()) ctx.config.load(config_path);
        ctx.note("seed", ctx.seed);

        if (mine->parsed()) return cmd_mine(ctx, mine_args);
        if (clusterc->parsed()) return cmd_cluster(ctx, cluster_args);
        if (train->parsed()) return cmd_train(ctx, train_args);
        if (predict->parsed()) return cmd_predict(ctx, predict_args);
        if (validate->parsed()) return cmd_validate(ctx, validate_args);
        if (query->parsed()) return cmd_query(ctx, query_args);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
