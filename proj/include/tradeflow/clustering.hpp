#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "tradeflow/common.hpp"
#include "tradeflow/csv.hpp"
#include "tradeflow/ingest.hpp"
#include "tradeflow/rng.hpp"

namespace tradeflow::cluster {

struct ClusterModel {
    int k = 0;
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignments;      // aligned with the input vector order
    double sse = 0.0;                  // within-cluster sum of squared deviations
    double silhouette = std::numeric_limits<double>::quiet_NaN();
    int iterations_run = 0;
    std::vector<double> sse_history;   // one entry per Lloyd iteration
};

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Within-cluster sum of squared deviations, computed per cluster and
/// coordinate as sum(t^2) - (sum(t))^2 / n. Tiny negative cancellation
/// residue is clamped to zero.
inline double sse(const std::vector<ingest::CountryVector>& vectors, const ClusterModel& model) {
    require(model.assignments.size() == vectors.size(), "model does not cover all vectors");
    if (vectors.empty()) return 0.0;
    const std::size_t dims = vectors.front().features.size();
    std::vector<std::vector<double>> sums(model.k, std::vector<double>(dims, 0.0));
    std::vector<std::vector<double>> sq_sums(model.k, std::vector<double>(dims, 0.0));
    std::vector<long> counts(model.k, 0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const int c = model.assignments[i];
        ++counts[c];
        for (std::size_t d = 0; d < dims; ++d) {
            const double v = vectors[i].features[d];
            sums[c][d] += v;
            sq_sums[c][d] += v * v;
        }
    }
    double total = 0.0;
    for (int c = 0; c < model.k; ++c) {
        if (counts[c] == 0) continue;
        double cluster_sse = 0.0;
        for (std::size_t d = 0; d < dims; ++d) {
            cluster_sse += sq_sums[c][d] - sums[c][d] * sums[c][d] / static_cast<double>(counts[c]);
        }
        total += std::max(cluster_sse, 0.0);
    }
    return total;
}

namespace detail {

inline double deviation_sse(const std::vector<ingest::CountryVector>& vectors,
                            const std::vector<std::vector<double>>& centroids,
                            const std::vector<int>& assignments) {
    double total = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        total += squared_distance(vectors[i].features, centroids[assignments[i]]);
    }
    return total;
}

} // namespace detail

/// Lloyd's algorithm with Euclidean distance. Seeding is farthest-point: the
/// first centroid is a seeded random pick, each next one is the point
/// farthest from its nearest chosen centroid. Runs until assignments are
/// stable or max_iterations; an emptied cluster is reseeded with the point
/// farthest from its own centroid.
inline ClusterModel kmeans(const std::vector<ingest::CountryVector>& vectors, int k,
                           std::uint64_t seed, int max_iterations = 300) {
    require(k >= 2, "k must be >= 2");
    require(static_cast<std::size_t>(k) <= vectors.size(), "k exceeds the number of vectors");
    const std::size_t n = vectors.size();
    const std::size_t dims = vectors.front().features.size();
    for (const auto& v : vectors) {
        require(v.features.size() == dims, "vectors have mixed dimensions");
    }

    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.centroids.assign(k, std::vector<double>(dims, 0.0));

    // Farthest-point seeding.
    std::vector<std::size_t> chosen;
    chosen.push_back(static_cast<std::size_t>(rng.below(n)));
    std::vector<double> nearest(n, std::numeric_limits<double>::max());
    while (chosen.size() < static_cast<std::size_t>(k)) {
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i],
                                  squared_distance(vectors[i].features, vectors[chosen.back()].features));
        }
        std::size_t farthest = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (nearest[i] > best) {
                best = nearest[i];
                farthest = i;
            }
        }
        chosen.push_back(farthest);
    }
    for (int c = 0; c < k; ++c) model.centroids[c] = vectors[chosen[c]].features;

    model.assignments.assign(n, -1);
    std::vector<long> counts(k, 0);

    for (int iteration = 0; iteration < max_iterations; ++iteration) {
        // Assignment step; ties go to the lower cluster id.
        bool changed = false;
        std::fill(counts.begin(), counts.end(), 0L);
        for (std::size_t i = 0; i < n; ++i) {
            int best_c = 0;
            double best_d = squared_distance(vectors[i].features, model.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = squared_distance(vectors[i].features, model.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            if (model.assignments[i] != best_c) {
                model.assignments[i] = best_c;
                changed = true;
            }
            ++counts[best_c];
        }

        // Repair empty clusters with the point farthest from its centroid.
        for (int c = 0; c < k; ++c) {
            while (counts[c] == 0) {
                std::size_t farthest = n;
                double best = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (counts[model.assignments[i]] <= 1) continue; // never empty another cluster
                    const double d = squared_distance(vectors[i].features,
                                                      model.centroids[model.assignments[i]]);
                    if (d > best) {
                        best = d;
                        farthest = i;
                    }
                }
                require(farthest < n, "cannot repair empty cluster");
                --counts[model.assignments[farthest]];
                model.assignments[farthest] = c;
                ++counts[c];
                model.centroids[c] = vectors[farthest].features;
                changed = true;
            }
        }

        // Update step: centroids become member means.
        for (auto& centroid : model.centroids) std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = model.assignments[i];
            for (std::size_t d = 0; d < dims; ++d) model.centroids[c][d] += vectors[i].features[d];
        }
        for (int c = 0; c < k; ++c) {
            for (std::size_t d = 0; d < dims; ++d) {
                model.centroids[c][d] /= static_cast<double>(counts[c]);
            }
        }

        model.iterations_run = iteration + 1;
        model.sse_history.push_back(detail::deviation_sse(vectors, model.centroids, model.assignments));
        if (!changed) break;
    }

    model.sse = sse(vectors, model);
    return model;
}

/// Mean silhouette s(i) = (b - a) / max(a, b) over all points; singleton
/// clusters (and identical-point ties with a = b = 0) contribute 0.
inline double silhouette(const std::vector<ingest::CountryVector>& vectors, const ClusterModel& model) {
    require(model.k >= 2, "silhouette requires k >= 2");
    require(model.assignments.size() == vectors.size(), "model does not cover all vectors");
    const std::size_t n = vectors.size();
    std::vector<long> counts(model.k, 0);
    for (int a : model.assignments) ++counts[a];

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int own = model.assignments[i];
        if (counts[own] <= 1) continue; // singleton: s(i) = 0
        std::vector<double> sum_dist(model.k, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::sqrt(squared_distance(vectors[i].features, vectors[j].features));
            sum_dist[model.assignments[j]] += d;
        }
        const double a = sum_dist[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::max();
        for (int c = 0; c < model.k; ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, sum_dist[c] / static_cast<double>(counts[c]));
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

struct KSelectionReport {
    struct Entry {
        int k = 0;
        double sse = 0.0;
        double silhouette = 0.0;
    };
    std::vector<Entry> entries;
    int chosen_k = 0; // argmax silhouette, ties to the smaller k
    int elbow_k = 0;  // argmax discrete second difference of SSE(k)
};

/// Fits best-of-seeds k-means for each k in [k_min, k_max] (best = lowest
/// SSE), scores each with the silhouette, and picks the k maximizing it.
inline KSelectionReport select_k(const std::vector<ingest::CountryVector>& vectors, int k_min,
                                 int k_max, int seeds_per_k, std::uint64_t seed,
                                 std::vector<ClusterModel>* best_models = nullptr) {
    require(k_min >= 2 && k_max >= k_min, "empty or invalid k range");
    require(vectors.size() > static_cast<std::size_t>(k_max),
            "need more vectors than the largest k");
    require(seeds_per_k >= 1, "seeds_per_k must be >= 1");

    KSelectionReport report;
    for (int k = k_min; k <= k_max; ++k) {
        ClusterModel best;
        bool have_best = false;
        for (int s = 0; s < seeds_per_k; ++s) {
            ClusterModel m = kmeans(vectors, k, mix_seed(seed, static_cast<std::uint64_t>(k) * 1000 + s));
            if (!have_best || m.sse < best.sse) {
                best = std::move(m);
                have_best = true;
            }
        }
        best.silhouette = silhouette(vectors, best);
        report.entries.push_back({k, best.sse, best.silhouette});
        if (best_models) best_models->push_back(std::move(best));
    }

    const auto& entries = report.entries;
    std::size_t chosen = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].silhouette > entries[chosen].silhouette) chosen = i;
    }
    report.chosen_k = entries[chosen].k;

    // Elbow: largest discrete second difference of SSE(k) over interior ks.
    report.elbow_k = entries.front().k;
    double best_curvature = -std::numeric_limits<double>::max();
    for (std::size_t i = 1; i + 1 < entries.size(); ++i) {
        const double curvature = entries[i - 1].sse - 2.0 * entries[i].sse + entries[i + 1].sse;
        if (curvature > best_curvature) {
            best_curvature = curvature;
            report.elbow_k = entries[i].k;
        }
    }
    return report;
}

/// clusters.csv: one row per (country, k) with the assigned cluster id.
inline void write_clusters_csv(std::ostream& out,
                               const std::vector<ingest::CountryVector>& vectors,
                               const std::vector<ClusterModel>& models,
                               const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << "country,k,cluster\n";
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (const auto& model : models) {
            out << csv::escape(vectors[i].country) << "," << model.k << ","
                << model.assignments[i] << "\n";
        }
    }
}

/// kselect.csv: per-k diagnostics plus the chosen/elbow picks as metadata.
inline void write_kselect_csv(std::ostream& out, const KSelectionReport& report,
                              const std::vector<std::string>& comment_lines = {}) {
    for (const auto& line : comment_lines) out << "# " << line << "\n";
    out << "# chosen_k=" << report.chosen_k << " elbow_k=" << report.elbow_k << "\n";
    out << "k,sse,silhouette\n";
    for (const auto& e : report.entries) {
        out << e.k << "," << csv::fixed(e.sse, 6) << "," << csv::fixed(e.silhouette, 6) << "\n";
    }
}

} // namespace tradeflow::cluster
