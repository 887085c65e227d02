#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tradeflow/ingest.hpp"
#include "tradeflow/rng.hpp"
#include "support/oracles.hpp"

using namespace tradeflow;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

ingest::TradeRecord rec(const std::string& reporter, const std::string& partner, int year,
                        int chapter, double value) {
    return {reporter, partner, year, chapter, value};
}

} // namespace

TEST_CASE("load_trade_csv parses well-formed rows in file order") {
    const auto path = write_temp("tf_trade_ok.csv",
                                 "reporter,partner,year,hs_chapter,value\n"
                                 "USA,MEX,2017,10,120000.5\n"
                                 "USA,CAN,2018,15,33.25\n");
    const auto result = ingest::load_trade_csv(path);
    REQUIRE(result.records.size() == 2);
    CHECK(result.diagnostics.empty());
    CHECK(result.records[0].reporter == "USA");
    CHECK(result.records[0].partner == "MEX");
    CHECK(result.records[0].year == 2017);
    CHECK(result.records[0].hs_chapter == 10);
    CHECK(result.records[0].value == 120000.5);
    CHECK(result.records[1].hs_chapter == 15);
}

TEST_CASE("load_trade_csv rejects out-of-range chapters with a diagnostic") {
    const auto path = write_temp("tf_trade_ch97.csv",
                                 "reporter,partner,year,hs_chapter,value\n"
                                 "USA,MEX,2017,97,5\n");
    const auto result = ingest::load_trade_csv(path);
    CHECK(result.records.empty());
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].line_number == 2);
    CHECK(result.diagnostics[0].message.find("97") != std::string::npos);
}

TEST_CASE("load_trade_csv keeps good rows and reports the malformed one") {
    const auto path = write_temp("tf_trade_mixed.csv",
                                 "reporter,partner,year,hs_chapter,value\n"
                                 "USA,MEX,2017,10,5\n"
                                 "USA,MEX,not_a_year,10,5\n"
                                 "USA,CAN,2018,12,7.5\n");
    const auto result = ingest::load_trade_csv(path);
    CHECK(result.records.size() == 2);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].line_number == 3);
}

TEST_CASE("load_trade_csv enforces reporter != partner and value >= 0") {
    const auto path = write_temp("tf_trade_invalid.csv",
                                 "reporter,partner,year,hs_chapter,value\n"
                                 "USA,USA,2017,10,5\n"
                                 "USA,MEX,2017,10,-1\n");
    const auto result = ingest::load_trade_csv(path);
    CHECK(result.records.empty());
    CHECK(result.diagnostics.size() == 2);
}

TEST_CASE("load_trade_csv rejects a header that misses schema columns") {
    const auto path = write_temp("tf_trade_hdr.csv", "reporter,partner,year,value\n");
    CHECK_THROWS_AS(ingest::load_trade_csv(path), Error);
}

TEST_CASE("load_trade_csv respects a custom column schema and widened range") {
    const auto path = write_temp("tf_trade_schema.csv",
                                 "dst,src,yr,chapter,v\n"
                                 "USA,MEX,2017,98,5\n");
    ingest::TradeCsvSchema schema;
    schema.reporter = "dst";
    schema.partner = "src";
    schema.year = "yr";
    schema.hs_chapter = "chapter";
    schema.value = "v";
    schema.max_chapter = 99;
    const auto result = ingest::load_trade_csv(path, schema);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].hs_chapter == 98);
}

TEST_CASE("build_transactions aggregates duplicate chapters") {
    const auto txns = ingest::build_transactions(
        {rec("USA", "MEX", 2017, 10, 5), rec("USA", "MEX", 2017, 10, 7)}, 0.0);
    REQUIRE(txns.size() == 1);
    CHECK(txns[0].items == std::vector<int>{10});
    CHECK(txns[0].reporter == "USA");
    CHECK(txns[0].partner == "MEX");
    CHECK(txns[0].year == 2017);
}

TEST_CASE("build_transactions uses a strict threshold") {
    const auto txns = ingest::build_transactions({rec("USA", "MEX", 2017, 10, 0.0)}, 0.0);
    CHECK(txns.empty()); // 0 > 0 fails, empty basket dropped

    const auto above = ingest::build_transactions(
        {rec("USA", "MEX", 2017, 10, 3.0), rec("USA", "MEX", 2017, 11, 5.0)}, 3.0);
    REQUIRE(above.size() == 1);
    CHECK(above[0].items == std::vector<int>{11}); // 3 is not > 3
}

TEST_CASE("build_transactions groups by pair and year like the hand grouping") {
    const std::vector<ingest::TradeRecord> records = {
        rec("USA", "MEX", 2017, 10, 5),
        rec("USA", "MEX", 2018, 11, 2),
        rec("CAN", "MEX", 2017, 12, 9),
        rec("CAN", "MEX", 2017, 13, 4),
    };
    const auto txns = ingest::build_transactions(records, 0.0);
    REQUIRE(txns.size() == 3);
    // Sorted by (reporter, partner, year).
    CHECK(txns[0].reporter == "CAN");
    CHECK(txns[0].items == std::vector<int>{12, 13});
    CHECK(txns[1].id == "USA|MEX|2017");
    CHECK(txns[2].id == "USA|MEX|2018");
}

TEST_CASE("build_transactions is idempotent over its flattened output") {
    Rng rng(42);
    std::vector<ingest::TradeRecord> records;
    const std::vector<std::string> countries = {"USA", "MEX", "CAN", "DEU"};
    for (int i = 0; i < 200; ++i) {
        const std::size_t ia = rng.below(countries.size());
        const std::size_t ib = (ia + 1 + rng.below(countries.size() - 1)) % countries.size();
        records.push_back(rec(countries[ia], countries[ib], 2015 + static_cast<int>(rng.below(4)),
                              1 + static_cast<int>(rng.below(20)), rng.uniform(0.0, 100.0)));
    }
    const auto first = ingest::build_transactions(records, 1.0);

    std::vector<ingest::TradeRecord> flattened;
    for (const auto& t : first) {
        for (int item : t.items) flattened.push_back(rec(t.reporter, t.partner, t.year, item, 1.0));
    }
    const auto second = ingest::build_transactions(flattened, 0.0);

    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(second[i].id == first[i].id);
        CHECK(second[i].items == first[i].items);
    }
}

TEST_CASE("chapter aggregation conserves the total traded value") {
    Rng rng(7);
    std::vector<ingest::TradeRecord> records;
    double total_in = 0.0;
    for (int i = 0; i < 500; ++i) {
        const double value = rng.uniform(0.0, 1e6);
        total_in += value;
        records.push_back(rec(i % 2 ? "USA" : "CHN", i % 3 ? "MEX" : "JPN",
                              2000 + static_cast<int>(rng.below(20)),
                              1 + static_cast<int>(rng.below(96)), value));
    }
    double total_out = 0.0;
    for (const auto& [key, chapters] : ingest::aggregate_chapter_values(records)) {
        (void)key;
        for (const auto& [chapter, sum] : chapters) {
            (void)chapter;
            total_out += sum;
        }
    }
    CHECK(total_out == Catch::Approx(total_in).epsilon(1e-9));
}

TEST_CASE("transaction baskets stay within the chapter universe") {
    const auto txns = ingest::build_transactions(
        {rec("USA", "MEX", 2017, 1, 5), rec("USA", "MEX", 2017, 96, 5)}, 0.0);
    REQUIRE(txns.size() == 1);
    CHECK(txns[0].items.size() <= 96);
    for (int item : txns[0].items) {
        CHECK(item >= 1);
        CHECK(item <= 96);
    }
}

TEST_CASE("standardize_columns maps a two-point column to -1/+1") {
    std::vector<ingest::CountryVector> vectors = {{"A", {10.0}}, {"B", {30.0}}};
    ingest::standardize_columns(vectors);
    CHECK(vectors[0].features[0] == Catch::Approx(-1.0));
    CHECK(vectors[1].features[0] == Catch::Approx(1.0));
}

TEST_CASE("standardize_columns zeroes a zero-variance dimension") {
    std::vector<ingest::CountryVector> vectors = {{"A", {5.0, 1.0}}, {"B", {5.0, 2.0}}, {"C", {5.0, 3.0}}};
    ingest::standardize_columns(vectors);
    for (const auto& v : vectors) CHECK(v.features[0] == 0.0);
    CHECK(vectors[0].features[1] < 0.0);
    CHECK(vectors[2].features[1] > 0.0);
}

TEST_CASE("build_country_vectors matches the independent z-score oracle") {
    const std::vector<ingest::TradeRecord> records = {
        rec("USA", "MEX", 2017, 10, 100), rec("USA", "MEX", 2018, 10, 50),
        rec("MEX", "CAN", 2017, 11, 30),  rec("CAN", "USA", 2018, 12, 70),
    };
    const auto matrix = ingest::build_country_vectors(records);
    REQUIRE(matrix.vectors.size() == 3);
    REQUIRE(matrix.years == std::vector<int>{2017, 2018});

    // Raw totals per country and year, both directions credited.
    const std::map<std::string, std::vector<double>> raw = {
        {"CAN", {30.0, 70.0}},
        {"MEX", {130.0, 50.0}},
        {"USA", {100.0, 120.0}},
    };
    for (std::size_t d = 0; d < 2; ++d) {
        std::vector<double> column;
        for (const auto& [country, totals] : raw) column.push_back(totals[d]);
        const double mean = oracles::mean_of(column);
        const double sd = oracles::population_std(column);
        for (const auto& v : matrix.vectors) {
            const double expected = (raw.at(v.country)[d] - mean) / sd;
            CHECK(v.features[d] == Catch::Approx(expected).margin(1e-12));
        }
    }

    // Standardization leaves each dimension with mean ~ 0.
    for (std::size_t d = 0; d < 2; ++d) {
        double sum = 0.0;
        for (const auto& v : matrix.vectors) sum += v.features[d];
        CHECK(std::abs(sum / 3.0) < 1e-9);
    }
}

TEST_CASE("build_country_vectors rejects single-country input") {
    CHECK_THROWS_AS(ingest::build_country_vectors({}), Error);
    // A record always carries two distinct countries, so the degenerate case
    // is an empty record list.
}

TEST_CASE("load_feature_csv imputes missing cells with the column median") {
    const auto path = write_temp("tf_features.csv",
                                 "origin,destination,year,commodity,gdp,dist,target\n"
                                 "USA,MEX,2017,10,5.0,2.0,100\n"
                                 "USA,CAN,2017,10,,4.0,50\n"
                                 "MEX,CAN,2017,10,7.0,6.0,25\n"
                                 "CAN,USA,2017,10,9.0,NA,75\n");
    const auto table = ingest::load_feature_csv(path);
    REQUIRE(table.feature_names == std::vector<std::string>{"gdp", "dist"});
    REQUIRE(table.rows.size() == 4);
    CHECK(table.diagnostics.empty());
    CHECK(table.imputed_counts == std::vector<std::size_t>{1, 1});
    CHECK(table.rows[1].features[0] == Catch::Approx(7.0)); // median of 5,7,9
    CHECK(table.rows[3].features[1] == Catch::Approx(4.0)); // median of 2,4,6
    for (const auto& row : table.rows) {
        for (double f : row.features) CHECK(std::isfinite(f));
    }
}

TEST_CASE("load_feature_csv rejects rows with missing or negative targets") {
    const auto path = write_temp("tf_features_bad.csv",
                                 "origin,destination,year,commodity,gdp,target\n"
                                 "USA,MEX,2017,10,5.0,\n"
                                 "USA,CAN,2017,10,5.0,-3\n"
                                 "MEX,CAN,2017,10,5.0,10\n");
    const auto table = ingest::load_feature_csv(path);
    CHECK(table.rows.size() == 1);
    CHECK(table.diagnostics.size() == 2);
}

TEST_CASE("load_feature_csv validates the header shape") {
    const auto path = write_temp("tf_features_hdr.csv", "origin,destination,year,target\n");
    CHECK_THROWS_AS(ingest::load_feature_csv(path), Error);
}
