#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tradeflow/clustering.hpp"
#include "tradeflow/common.hpp"
#include "tradeflow/csv.hpp"
#include "tradeflow/ingest.hpp"
#include "tradeflow/rng.hpp"
#include "tradeflow/trees.hpp"

namespace tradeflow::eml {

/// Which cluster supplies the training rows.
enum class TrainingClusterMode {
    Auto,  // the cluster whose members carry the largest summed trade value
    All,   // skip the filter entirely (training set = every country)
    Fixed, // an explicit cluster id
};

struct EmlConfig {
    int cluster_k = 0; // 0 = choose k automatically over [k_min, k_max]
    int k_min = 2;
    int k_max = 20;
    int seeds_per_k = 5;
    TrainingClusterMode training_cluster = TrainingClusterMode::Auto;
    int fixed_cluster_id = 0;
    trees::BoostConfig boost;
    std::string commodity;        // empty = use every feature row
    double holdout_fraction = 0.2; // per-origin share held out for scoring
    std::uint64_t seed = 0;
};

struct PerCountryScore {
    std::string country;
    std::size_t rows = 0;
    double mean_actual = 0.0;
    double mean_predicted = 0.0;
    double r2 = std::numeric_limits<double>::quiet_NaN(); // NaN when undefined
};

struct EmlResult {
    cluster::KSelectionReport cluster_report;
    cluster::ClusterModel cluster_model;
    std::vector<ingest::CountryVector> country_vectors;
    std::vector<std::string> training_countries;
    trees::BoostedModel model;          // trained on the filtered rows
    trees::BoostedModel baseline_model; // trained on all rows, same config/seed
    double r2_filtered = 0.0;
    double r2_all_data_baseline = 0.0;
    std::vector<std::size_t> holdout_indices;        // into the feature table rows
    std::vector<std::size_t> filtered_train_indices;
    std::vector<std::size_t> baseline_train_indices;
    std::vector<std::size_t> used_rows;              // rows after the commodity filter
    std::vector<double> predictions_all;             // filtered model over used_rows
    std::vector<PerCountryScore> per_country;
};

namespace detail {

inline std::vector<double> gather_targets(const ingest::FeatureTable& features,
                                          const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(features.rows[i].target);
    return out;
}

inline trees::Matrix gather_rows(const ingest::FeatureTable& features,
                                 const std::vector<std::size_t>& idx) {
    trees::Matrix out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(features.rows[i].features);
    return out;
}

} // namespace detail

/// The full pipeline: cluster the countries on their trade vectors, restrict
/// training to the chosen cluster's origins, fit boosting there, fit an
/// all-data baseline with the identical configuration, and score both on one
/// holdout stratified by origin so every country is represented.
inline EmlResult run_eml(const std::vector<ingest::TradeRecord>& records,
                         const ingest::FeatureTable& features, const EmlConfig& config) {
    require(config.cluster_k != 1, "clustering requires k >= 2");
    require(config.holdout_fraction > 0.0 && config.holdout_fraction < 1.0,
            "holdout_fraction must lie in (0, 1)");
    config.boost.validate();

    EmlResult result;

    // 1. Cluster countries on their standardized trade vectors.
    ingest::CountryMatrix matrix = ingest::build_country_vectors(records);
    result.country_vectors = matrix.vectors;
    const int n_countries = static_cast<int>(matrix.vectors.size());
    if (config.cluster_k == 0) {
        const int k_max = std::min(config.k_max, n_countries - 1);
        require(config.k_min <= k_max, "too few countries for the requested k range");
        std::vector<cluster::ClusterModel> models;
        result.cluster_report =
            cluster::select_k(matrix.vectors, config.k_min, k_max, config.seeds_per_k,
                              mix_seed(config.seed, 0xC1), &models);
        for (auto& m : models) {
            if (m.k == result.cluster_report.chosen_k) {
                result.cluster_model = std::move(m);
                break;
            }
        }
    } else {
        require(config.cluster_k >= 2 && config.cluster_k <= n_countries,
                "cluster_k out of range for this dataset");
        result.cluster_model =
            cluster::kmeans(matrix.vectors, config.cluster_k, mix_seed(config.seed, 0xC1));
        result.cluster_model.silhouette = cluster::silhouette(matrix.vectors, result.cluster_model);
        result.cluster_report.entries.push_back(
            {config.cluster_k, result.cluster_model.sse, result.cluster_model.silhouette});
        result.cluster_report.chosen_k = config.cluster_k;
        result.cluster_report.elbow_k = config.cluster_k;
    }

    // 2. Pick the training countries.
    std::set<std::string> training_set;
    if (config.training_cluster == TrainingClusterMode::All) {
        for (const auto& v : matrix.vectors) training_set.insert(v.country);
    } else {
        int cluster_id = config.fixed_cluster_id;
        if (config.training_cluster == TrainingClusterMode::Auto) {
            // Largest summed trade value across member countries.
            std::map<std::string, double> totals;
            for (const auto& rec : records) {
                totals[rec.reporter] += rec.value;
                totals[rec.partner] += rec.value;
            }
            std::vector<double> cluster_trade(result.cluster_model.k, 0.0);
            for (std::size_t i = 0; i < matrix.vectors.size(); ++i) {
                cluster_trade[result.cluster_model.assignments[i]] +=
                    totals[matrix.vectors[i].country];
            }
            cluster_id = 0;
            for (int c = 1; c < result.cluster_model.k; ++c) {
                if (cluster_trade[c] > cluster_trade[cluster_id]) cluster_id = c;
            }
        } else {
            require(cluster_id >= 0 && cluster_id < result.cluster_model.k,
                    "fixed training cluster id out of range");
        }
        for (std::size_t i = 0; i < matrix.vectors.size(); ++i) {
            if (result.cluster_model.assignments[i] == cluster_id) {
                training_set.insert(matrix.vectors[i].country);
            }
        }
    }
    result.training_countries.assign(training_set.begin(), training_set.end());

    // 3. Commodity filter, then the origin-stratified holdout.
    for (std::size_t i = 0; i < features.rows.size(); ++i) {
        if (config.commodity.empty() || features.rows[i].commodity == config.commodity) {
            result.used_rows.push_back(i);
        }
    }
    require(!result.used_rows.empty(), "no feature rows match the commodity filter");

    std::map<std::string, std::vector<std::size_t>> by_origin;
    for (std::size_t i : result.used_rows) by_origin[features.rows[i].origin].push_back(i);
    Rng holdout_rng(mix_seed(config.seed, 0xD7)); // holdout split stream
    std::set<std::size_t> holdout;
    for (auto& [origin, idx] : by_origin) {
        holdout_rng.shuffle(idx);
        const auto take = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::llround(config.holdout_fraction * static_cast<double>(idx.size()))));
        for (std::size_t i = 0; i < take && i < idx.size(); ++i) holdout.insert(idx[i]);
    }
    result.holdout_indices.assign(holdout.begin(), holdout.end());

    for (std::size_t i : result.used_rows) {
        if (holdout.count(i)) continue;
        result.baseline_train_indices.push_back(i);
        if (training_set.count(features.rows[i].origin)) {
            result.filtered_train_indices.push_back(i);
        }
    }
    require(result.filtered_train_indices.size() >= 10, "insufficient filtered data");
    require(result.baseline_train_indices.size() >= 10, "insufficient training data");

    // 4. Fit both models with the identical configuration and seed.
    trees::BoostConfig boost = config.boost;
    boost.seed = mix_seed(config.seed, 0xB0);
    result.model = trees::fit_boosted(detail::gather_rows(features, result.filtered_train_indices),
                                      detail::gather_targets(features, result.filtered_train_indices),
                                      boost, features.feature_names);
    result.baseline_model =
        trees::fit_boosted(detail::gather_rows(features, result.baseline_train_indices),
                           detail::gather_targets(features, result.baseline_train_indices), boost,
                           features.feature_names);

    // 5. Score both on the common holdout.
    const trees::Matrix holdout_rows = detail::gather_rows(features, result.holdout_indices);
    const std::vector<double> holdout_y = detail::gather_targets(features, result.holdout_indices);
    const std::vector<double> pred_filtered = trees::predict(result.model, holdout_rows);
    const std::vector<double> pred_baseline = trees::predict(result.baseline_model, holdout_rows);
    result.r2_filtered = trees::r_squared(pred_filtered, holdout_y);
    result.r2_all_data_baseline = trees::r_squared(pred_baseline, holdout_y);

    // 6. Score everything with the filtered model; per-country breakdown.
    result.predictions_all =
        trees::predict(result.model, detail::gather_rows(features, result.used_rows));
    std::map<std::string, std::vector<std::pair<double, double>>> per_country; // (actual, pred)
    for (std::size_t j = 0; j < result.used_rows.size(); ++j) {
        const auto& row = features.rows[result.used_rows[j]];
        per_country[row.origin].push_back({row.target, result.predictions_all[j]});
    }
    for (const auto& [country, pairs] : per_country) {
        PerCountryScore score;
        score.country = country;
        score.rows = pairs.size();
        std::vector<double> actual, predicted;
        for (const auto& [a, p] : pairs) {
            score.mean_actual += a;
            score.mean_predicted += p;
            actual.push_back(a);
            predicted.push_back(p);
        }
        score.mean_actual /= static_cast<double>(pairs.size());
        score.mean_predicted /= static_cast<double>(pairs.size());
        double variance = 0.0;
        for (double a : actual) variance += (a - score.mean_actual) * (a - score.mean_actual);
        if (actual.size() >= 2 && variance > 0.0) {
            score.r2 = trees::r_squared(predicted, actual);
        }
        result.per_country.push_back(std::move(score));
    }
    return result;
}

struct CommodityReportRow {
    std::string commodity;
    double r2 = 0.0;
    std::vector<std::string> top_features; // by split count
};

/// Per-commodity R-squared with the top-N driver features, ranked by R².
inline std::vector<CommodityReportRow> commodity_report(
    const std::vector<std::pair<std::string, EmlResult>>& results, std::size_t top_n = 5) {
    require(!results.empty(), "commodity_report needs at least one result");
    std::vector<CommodityReportRow> rows;
    for (const auto& [commodity, result] : results) {
        CommodityReportRow row;
        row.commodity = commodity;
        row.r2 = result.r2_filtered;
        const auto ranked = trees::feature_importance(result.model);
        for (std::size_t i = 0; i < ranked.size() && i < top_n; ++i) {
            const std::size_t f = ranked[i].feature;
            row.top_features.push_back(f < result.model.feature_names.size()
                                           ? result.model.feature_names[f]
                                           : "f" + std::to_string(f));
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const CommodityReportRow& a, const CommodityReportRow& b) {
        if (a.r2 != b.r2) return a.r2 > b.r2;
        return a.commodity < b.commodity;
    });
    return rows;
}

/// eml_report.json: cluster diagnostics, both scores, per-country summaries.
inline void write_eml_report_json(std::ostream& out, const EmlResult& result,
                                  const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "// " << line << "\n";
    nlohmann::json doc;
    doc["chosen_k"] = result.cluster_report.chosen_k;
    doc["elbow_k"] = result.cluster_report.elbow_k;
    nlohmann::json per_k = nlohmann::json::array();
    for (const auto& e : result.cluster_report.entries) {
        per_k.push_back({{"k", e.k}, {"sse", e.sse}, {"silhouette", e.silhouette}});
    }
    doc["k_selection"] = std::move(per_k);
    doc["training_countries"] = result.training_countries;
    doc["r2_filtered"] = result.r2_filtered;
    doc["r2_all_data_baseline"] = result.r2_all_data_baseline;
    doc["holdout_rows"] = result.holdout_indices.size();
    doc["filtered_train_rows"] = result.filtered_train_indices.size();
    doc["baseline_train_rows"] = result.baseline_train_indices.size();
    nlohmann::json per_country = nlohmann::json::array();
    for (const auto& score : result.per_country) {
        nlohmann::json entry = {{"country", score.country},
                                {"rows", score.rows},
                                {"mean_actual", score.mean_actual},
                                {"mean_predicted", score.mean_predicted}};
        if (std::isnan(score.r2)) entry["r2"] = nullptr;
        else entry["r2"] = score.r2;
        per_country.push_back(std::move(entry));
    }
    doc["per_country"] = std::move(per_country);
    out << doc.dump(2) << "\n";
}

/// predictions.csv over the rows the pipeline scored.
inline void write_predictions_csv(std::ostream& out, const ingest::FeatureTable& features,
                                  const std::vector<std::size_t>& row_indices,
                                  const std::vector<double>& predictions,
                                  const std::vector<std::string>& comment_lines = {}) {
    require(row_indices.size() == predictions.size(), "predictions do not align with rows");
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << "origin,destination,year,commodity,actual,predicted\n";
    for (std::size_t j = 0; j < row_indices.size(); ++j) {
        const auto& row = features.rows[row_indices[j]];
        out << csv::escape(row.origin) << "," << csv::escape(row.destination) << "," << row.year
            << "," << csv::escape(row.commodity) << "," << csv::fixed(row.target, 6) << ","
            << csv::fixed(predictions[j], 6) << "\n";
    }
}

} // namespace tradeflow::eml
