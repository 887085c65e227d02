#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tradeflow/common.hpp"
#include "tradeflow/csv.hpp"
#include "tradeflow/trees.hpp"

namespace tradeflow::trees {

/// Self-describing model document. Leading "//" comment lines carry the run
/// metadata; load_model_json strips them before parsing.
inline void save_model_json(std::ostream& out, const BoostedModel& model,
                            const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "// " << line << "\n";
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["base_prediction"] = model.base_prediction;
    doc["learning_rate"] = model.learning_rate;
    doc["best_round"] = model.best_round;
    doc["degenerate"] = model.degenerate;
    doc["n_features"] = model.n_features;
    doc["feature_names"] = model.feature_names;
    doc["config"] = {
        {"learning_rate", model.config.learning_rate},
        {"feature_fraction", model.config.feature_fraction},
        {"max_depth", model.config.max_depth},
        {"num_leaves", model.config.num_leaves},
        {"early_stopping_rounds", model.config.early_stopping_rounds},
        {"max_rounds", model.config.max_rounds},
        {"validation_fraction", model.config.validation_fraction},
        {"min_leaf", model.config.min_leaf},
        {"seed", model.config.seed},
    };
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes) {
            nodes.push_back({{"f", n.feature},
                             {"t", n.threshold},
                             {"l", n.left},
                             {"r", n.right},
                             {"v", n.value},
                             {"s", n.sse},
                             {"n", n.rows},
                             {"g", n.gain}});
        }
        trees.push_back(std::move(nodes));
    }
    doc["trees"] = std::move(trees);
    nlohmann::json importances = nlohmann::json::array();
    for (const auto& imp : model.importances) {
        importances.push_back({{"split", imp.split_count}, {"gain", imp.total_gain}});
    }
    doc["importances"] = std::move(importances);
    out << doc.dump(2) << "\n";
}

inline void save_model_json(const std::filesystem::path& path, const BoostedModel& model,
                            const std::vector<std::string>& comment_lines = {}) {
    std::ofstream out(path);
    require(out.good(), "cannot write model file: " + path.string());
    save_model_json(out, model, comment_lines);
}

inline BoostedModel load_model_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open model file: " + path.string());
    std::string body, line;
    while (std::getline(in, line)) {
        if (line.rfind("//", 0) == 0) continue;
        body += line;
        body += "\n";
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error("model file is not valid JSON: " + std::string(e.what()));
    }
    require(doc.value("format_version", 0) == 1, "unsupported model format version");

    BoostedModel model;
    model.base_prediction = doc.at("base_prediction").get<double>();
    model.learning_rate = doc.at("learning_rate").get<double>();
    model.best_round = doc.at("best_round").get<int>();
    model.degenerate = doc.at("degenerate").get<bool>();
    model.n_features = doc.at("n_features").get<std::size_t>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& cfg = doc.at("config");
    model.config.learning_rate = cfg.at("learning_rate").get<double>();
    model.config.feature_fraction = cfg.at("feature_fraction").get<double>();
    model.config.max_depth = cfg.at("max_depth").get<int>();
    model.config.num_leaves = cfg.at("num_leaves").get<int>();
    model.config.early_stopping_rounds = cfg.at("early_stopping_rounds").get<int>();
    model.config.max_rounds = cfg.at("max_rounds").get<int>();
    model.config.validation_fraction = cfg.at("validation_fraction").get<double>();
    model.config.min_leaf = cfg.at("min_leaf").get<int>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    for (const auto& tree_doc : doc.at("trees")) {
        RegressionTree tree;
        for (const auto& n : tree_doc) {
            TreeNode node;
            node.feature = n.at("f").get<int>();
            node.threshold = n.at("t").get<double>();
            node.left = n.at("l").get<int>();
            node.right = n.at("r").get<int>();
            node.value = n.at("v").get<double>();
            node.sse = n.at("s").get<double>();
            node.rows = n.at("n").get<int>();
            node.gain = n.at("g").get<double>();
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    for (const auto& imp : doc.at("importances")) {
        model.importances.push_back({imp.at("split").get<long>(), imp.at("gain").get<double>()});
    }
    return model;
}

/// importance.csv: feature,split,gain ranked by split count.
inline void write_importance_csv(std::ostream& out, const BoostedModel& model,
                                 const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << "feature,split,gain\n";
    for (const auto& rf : feature_importance(model)) {
        const std::string name = rf.feature < model.feature_names.size()
                                     ? model.feature_names[rf.feature]
                                     : "f" + std::to_string(rf.feature);
        out << csv::escape(name) << "," << rf.split_count << "," << csv::fixed(rf.total_gain, 6)
            << "\n";
    }
}

} // namespace tradeflow::trees
