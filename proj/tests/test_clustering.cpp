#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <sstream>

#include "tradeflow/clustering.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace tradeflow;

namespace {

std::vector<ingest::CountryVector> points(const std::vector<std::vector<double>>& coords) {
    std::vector<ingest::CountryVector> out;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        out.push_back({"p" + std::to_string(i), coords[i]});
    }
    return out;
}

/// Fraction of points whose cluster matches the generator label up to the
/// best relabeling (majority vote per cluster).
double label_agreement(const std::vector<int>& assignments, const std::vector<int>& labels, int k) {
    std::map<int, std::map<int, int>> votes;
    for (std::size_t i = 0; i < assignments.size(); ++i) ++votes[assignments[i]][labels[i]];
    int matched = 0;
    for (int c = 0; c < k; ++c) {
        int best = 0;
        for (const auto& [label, n] : votes[c]) {
            (void)label;
            best = std::max(best, n);
        }
        matched += best;
    }
    return static_cast<double>(matched) / static_cast<double>(assignments.size());
}

} // namespace

TEST_CASE("two distinct points with k=2 separate perfectly") {
    const auto vectors = points({{0.0, 0.0}, {4.0, 4.0}});
    const auto model = cluster::kmeans(vectors, 2, 1);
    CHECK(model.assignments[0] != model.assignments[1]);
    CHECK(model.sse == 0.0);
}

TEST_CASE("identical points with k=2 settle at zero SSE after repair") {
    const auto vectors = points({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
    const auto model = cluster::kmeans(vectors, 2, 7);
    CHECK(model.sse == 0.0);
    std::set<int> used(model.assignments.begin(), model.assignments.end());
    CHECK(used.size() == 2); // no empty cluster in the returned model
}

TEST_CASE("kmeans recovers well-separated blobs") {
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = generators::six_blobs(seed);
        const auto model = cluster::kmeans(data.vectors, 6, mix_seed(seed, 1));
        if (label_agreement(model.assignments, data.labels, 6) == 1.0) ++recovered;
    }
    CHECK(recovered >= 19);
}

TEST_CASE("kmeans validates k against the input") {
    const auto vectors = points({{0.0}, {1.0}, {2.0}});
    CHECK_THROWS_AS(cluster::kmeans(vectors, 4, 1), Error);
    CHECK_THROWS_AS(cluster::kmeans(vectors, 1, 1), Error);
}

TEST_CASE("sse matches the hand-computed {1,3} cluster") {
    // One cluster holding 1 and 3: 1^2 + 3^2 - 4^2/2 = 2, same as (1-2)^2 + (3-2)^2.
    const auto vectors = points({{1.0}, {3.0}});
    cluster::ClusterModel model;
    model.k = 2;
    model.assignments = {0, 0};
    model.centroids = {{2.0}, {0.0}};
    CHECK(cluster::sse(vectors, model) == Catch::Approx(2.0));

    cluster::ClusterModel singleton;
    singleton.k = 2;
    singleton.assignments = {0, 1};
    singleton.centroids = {{1.0}, {3.0}};
    CHECK(cluster::sse(vectors, singleton) == 0.0);
}

TEST_CASE("computational-form SSE equals the deviation form on random data") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> coords;
        std::vector<int> assignments;
        const int k = 2 + static_cast<int>(rng.below(4));
        for (int i = 0; i < 40; ++i) {
            coords.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
            assignments.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(k))));
        }
        cluster::ClusterModel model;
        model.k = k;
        model.assignments = assignments;
        const double expanded = cluster::sse(points(coords), model);
        const double deviation = oracles::sse_by_deviation(coords, assignments, k);
        CHECK(expanded == Catch::Approx(deviation).epsilon(1e-9));
    }
}

TEST_CASE("silhouette is high for two tight far-apart pairs") {
    const auto vectors = points({{0.0, 0.0}, {0.1, 0.0}, {10.0, 0.0}, {10.1, 0.0}});
    cluster::ClusterModel model;
    model.k = 2;
    model.assignments = {0, 0, 1, 1};
    const double s = cluster::silhouette(vectors, model);
    CHECK(s > 0.9);

    // Hand computation: a(i) = 0.1 everywhere; b(i) is the mean distance to
    // the two points of the other pair.
    const double a = 0.1;
    const double b_outer = 0.5 * (10.0 + 10.1); // for points 0 and 3
    const double b_inner = 0.5 * (9.9 + 10.0);  // for points 1 and 2
    const double expected = 0.5 * ((b_outer - a) / b_outer + (b_inner - a) / b_inner);
    CHECK(s == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("all-singleton clustering scores zero silhouette") {
    const auto vectors = points({{0.0}, {5.0}, {9.0}});
    cluster::ClusterModel model;
    model.k = 3;
    model.assignments = {0, 1, 2};
    CHECK(cluster::silhouette(vectors, model) == 0.0);
}

TEST_CASE("silhouette requires at least two clusters") {
    const auto vectors = points({{0.0}, {1.0}});
    cluster::ClusterModel model;
    model.k = 1;
    model.assignments = {0, 0};
    CHECK_THROWS_AS(cluster::silhouette(vectors, model), Error);
}

TEST_CASE("random labels score below the fitted labels") {
    const auto data = generators::six_blobs(5);
    const auto fitted = cluster::kmeans(data.vectors, 6, 3);
    const double fitted_s = cluster::silhouette(data.vectors, fitted);

    Rng rng(17);
    cluster::ClusterModel random;
    random.k = 6;
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        random.assignments.push_back(static_cast<int>(rng.below(6)));
    }
    const double random_s = cluster::silhouette(data.vectors, random);
    CHECK(fitted_s > random_s);
}

TEST_CASE("SSE never increases across Lloyd iterations") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = generators::six_blobs(seed + 100);
        const auto model = cluster::kmeans(data.vectors, 4, seed);
        REQUIRE_FALSE(model.sse_history.empty());
        for (std::size_t i = 1; i < model.sse_history.size(); ++i) {
            CHECK(model.sse_history[i] <= model.sse_history[i - 1]);
        }
    }
}

TEST_CASE("relabeling clusters changes neither SSE nor silhouette") {
    const auto data = generators::six_blobs(8);
    const auto model = cluster::kmeans(data.vectors, 4, 9);
    cluster::ClusterModel relabeled = model;
    const std::vector<int> permutation = {2, 3, 0, 1};
    for (auto& a : relabeled.assignments) a = permutation[static_cast<std::size_t>(a)];
    std::vector<std::vector<double>> new_centroids(4);
    for (int c = 0; c < 4; ++c) {
        new_centroids[static_cast<std::size_t>(permutation[static_cast<std::size_t>(c)])] =
            model.centroids[static_cast<std::size_t>(c)];
    }
    relabeled.centroids = new_centroids;

    CHECK(cluster::sse(data.vectors, relabeled) ==
          Catch::Approx(cluster::sse(data.vectors, model)).margin(1e-12));
    CHECK(cluster::silhouette(data.vectors, relabeled) ==
          Catch::Approx(cluster::silhouette(data.vectors, model)).margin(1e-12));
}

TEST_CASE("select_k finds the six-blob structure") {
    const auto data = generators::six_blobs(12);
    const auto report = cluster::select_k(data.vectors, 2, 12, 3, 12);
    CHECK(report.chosen_k == 6);
    for (const auto& e : report.entries) CHECK(e.sse >= 0.0);
}

TEST_CASE("select_k picks two for a line with two clumps") {
    std::vector<std::vector<double>> coords;
    for (int i = 0; i < 8; ++i) coords.push_back({0.0 + 0.01 * i});
    for (int i = 0; i < 8; ++i) coords.push_back({50.0 + 0.01 * i});
    const auto report = cluster::select_k(points(coords), 2, 8, 3, 4);
    CHECK(report.chosen_k == 2);
}

TEST_CASE("select_k reports a weakly decreasing SSE trend") {
    const auto data = generators::six_blobs(21);
    const auto report = cluster::select_k(data.vectors, 2, 10, 4, 7);
    // Best-of-seeds SSE should trend down with k; tolerate seed noise only.
    for (std::size_t i = 1; i < report.entries.size(); ++i) {
        CHECK(report.entries[i].sse <= report.entries[i - 1].sse * 1.05 + 1e-9);
    }
    CHECK(report.entries.front().sse > 0.0);
}

TEST_CASE("select_k validates its range") {
    const auto vectors = points({{0.0}, {1.0}, {2.0}});
    CHECK_THROWS_AS(cluster::select_k(vectors, 2, 5, 1, 0), Error);
    CHECK_THROWS_AS(cluster::select_k(vectors, 3, 2, 1, 0), Error);
}

TEST_CASE("cluster CSV outputs are stable and carry the chosen k") {
    const auto data = generators::six_blobs(2);
    std::vector<cluster::ClusterModel> models;
    const auto report = cluster::select_k(data.vectors, 2, 4, 2, 5, &models);

    std::ostringstream clusters_a, clusters_b, kselect;
    cluster::write_clusters_csv(clusters_a, data.vectors, models, {"seed=5"});
    cluster::write_clusters_csv(clusters_b, data.vectors, models, {"seed=5"});
    CHECK(clusters_a.str() == clusters_b.str());

    cluster::write_kselect_csv(kselect, report);
    CHECK(kselect.str().find("# chosen_k=") != std::string::npos);
    CHECK(kselect.str().find("k,sse,silhouette") != std::string::npos);
}
