#pragma once

// Seeded synthetic data shared across the test suites.

#include <string>
#include <vector>

#include "tradeflow/ingest.hpp"
#include "tradeflow/rng.hpp"
#include "tradeflow/trees.hpp"

namespace generators {

struct BlobData {
    std::vector<tradeflow::ingest::CountryVector> vectors;
    std::vector<int> labels;
};

/// Gaussian blobs on a 2-D grid with centers at least 2 apart.
inline BlobData make_blobs(int n_blobs, int points_per_blob, double sigma, std::uint64_t seed) {
    tradeflow::Rng rng(seed);
    BlobData data;
    for (int b = 0; b < n_blobs; ++b) {
        const double cx = static_cast<double>(b % 3) * 2.0;
        const double cy = static_cast<double>(b / 3) * 2.0;
        for (int p = 0; p < points_per_blob; ++p) {
            tradeflow::ingest::CountryVector v;
            v.country = "P" + std::to_string(b) + "_" + std::to_string(p);
            v.features = {cx + rng.normal(0.0, sigma), cy + rng.normal(0.0, sigma)};
            data.vectors.push_back(std::move(v));
            data.labels.push_back(b);
        }
    }
    return data;
}

/// The 6-blob configuration used throughout: 30-60 points total, sigma 0.05.
inline BlobData six_blobs(std::uint64_t seed) {
    tradeflow::Rng rng(seed ^ 0x5eedULL);
    const int per_blob = 5 + static_cast<int>(rng.below(6)); // 5..10 -> 30..60 points
    return make_blobs(6, per_blob, 0.05, seed);
}

/// Random transaction baskets over a small item universe.
inline std::vector<tradeflow::ingest::Transaction> random_transactions(int n_transactions,
                                                                       int n_items,
                                                                       std::uint64_t seed) {
    tradeflow::Rng rng(seed);
    std::vector<tradeflow::ingest::Transaction> out;
    for (int t = 0; t < n_transactions; ++t) {
        tradeflow::ingest::Transaction txn;
        txn.id = "t" + std::to_string(t);
        txn.reporter = "R";
        txn.partner = "P";
        txn.year = 2000 + t;
        for (int item = 1; item <= n_items; ++item) {
            if (rng.uniform01() < 0.45) txn.items.push_back(item);
        }
        if (txn.items.empty()) txn.items.push_back(1 + static_cast<int>(rng.below(n_items)));
        out.push_back(std::move(txn));
    }
    return out;
}

struct Regression {
    tradeflow::trees::Matrix rows;
    std::vector<double> targets;
    std::vector<std::string> feature_names;
};

/// Gravity-style regression problem: a known smooth target over economic
/// feature columns plus bounded noise.
inline Regression gravity_world(int n_rows, double noise_sigma, std::uint64_t seed) {
    tradeflow::Rng rng(seed);
    Regression data;
    data.feature_names = {"gdp_o", "gdp_d", "distance", "pop_o", "pop_d", "tariff"};
    for (int i = 0; i < n_rows; ++i) {
        const double gdp_o = rng.uniform(1.0, 10.0);
        const double gdp_d = rng.uniform(1.0, 10.0);
        const double distance = rng.uniform(1.0, 20.0);
        const double pop_o = rng.uniform(0.5, 5.0);
        const double pop_d = rng.uniform(0.5, 5.0);
        const double tariff = rng.uniform(0.0, 0.3);
        const double signal =
            2.0 * gdp_o + 1.5 * gdp_d - 0.8 * distance + 0.5 * pop_o * pop_d - 10.0 * tariff;
        data.rows.push_back({gdp_o, gdp_d, distance, pop_o, pop_d, tariff});
        data.targets.push_back(signal + rng.normal(0.0, noise_sigma));
    }
    return data;
}

struct TradeWorld {
    std::vector<tradeflow::ingest::TradeRecord> records;
    tradeflow::ingest::FeatureTable features;
    std::vector<std::string> big_countries;
};

/// The big-trader/noisy-small-trader world: a handful of heavyweight
/// exporters follow y = 2 * gdp_o with small noise, the remaining minnows
/// follow the same law with noise inflated by noise_factor. Trade records
/// give the big countries much larger totals so they cluster together.
inline TradeWorld big_small_world(int n_big, int n_small, int rows_per_country,
                                  double noise_factor, std::uint64_t seed) {
    tradeflow::Rng rng(seed);
    TradeWorld world;
    world.features.feature_names = {"gdp_o", "gdp_d", "distance"};

    std::vector<std::string> countries;
    for (int i = 0; i < n_big; ++i) {
        world.big_countries.push_back("BIG" + std::to_string(i));
        countries.push_back(world.big_countries.back());
    }
    for (int i = 0; i < n_small; ++i) countries.push_back("SML" + std::to_string(i));

    // Trade records: totals ~100x larger for the big countries. Partners stay
    // within each block so the totals separate cleanly.
    for (std::size_t c = 0; c < countries.size(); ++c) {
        const bool big = c < static_cast<std::size_t>(n_big);
        const std::size_t block_start = big ? 0 : static_cast<std::size_t>(n_big);
        const std::size_t block_size = big ? static_cast<std::size_t>(n_big)
                                           : static_cast<std::size_t>(n_small);
        const std::string& partner = countries[block_start + (c - block_start + 1) % block_size];
        for (int year = 2015; year <= 2018; ++year) {
            tradeflow::ingest::TradeRecord rec;
            rec.reporter = countries[c];
            rec.partner = partner;
            rec.year = year;
            rec.hs_chapter = 10;
            rec.value = (big ? 1000.0 : 10.0) * (1.0 + 0.05 * rng.uniform01());
            world.records.push_back(std::move(rec));
        }
    }

    const double base_sigma = 0.3;
    for (std::size_t c = 0; c < countries.size(); ++c) {
        const bool big = c < static_cast<std::size_t>(n_big);
        for (int r = 0; r < rows_per_country; ++r) {
            tradeflow::ingest::FeatureRow row;
            row.origin = countries[c];
            row.destination = countries[(c + 1 + r % 3) % countries.size()];
            if (row.destination == row.origin) row.destination = countries[(c + 4) % countries.size()];
            row.year = 2015 + r % 4;
            row.commodity = "10";
            const double gdp_o = rng.uniform(1.0, 10.0);
            const double gdp_d = rng.uniform(1.0, 10.0);
            const double distance = rng.uniform(1.0, 20.0);
            row.features = {gdp_o, gdp_d, distance};
            const double sigma = big ? base_sigma : base_sigma * noise_factor;
            row.target = std::max(0.0, 2.0 * gdp_o + rng.normal(0.0, sigma));
            world.features.rows.push_back(std::move(row));
        }
    }
    world.features.imputed_counts.assign(world.features.feature_names.size(), 0);
    return world;
}

} // namespace generators
