#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "cafs/carbon.hpp"
#include "cafs/csv.hpp"
#include "cafs/serialize.hpp"
#include "test_support.hpp"

using namespace cafs;

namespace {

GenerationMixSeries one_period(const std::vector<std::string>& sources,
                               const std::vector<double>& quantities) {
    GenerationMixSeries mix;
    mix.sources = sources;
    mix.quantities = {quantities};
    return mix;
}

// independent re-statement of the weighted-sum rule, long-double accumulation
double naive_intensity(const GenerationMixSeries& mix, const EmissionFactorTable& factors,
                       int period) {
    long double total = 0.0L;
    for (double q : mix.quantities[static_cast<std::size_t>(period)]) total += q;
    long double c = 0.0L;
    for (std::size_t g = 0; g < mix.sources.size(); ++g)
        c += static_cast<long double>(mix.quantities[static_cast<std::size_t>(period)][g]) /
             total * static_cast<long double>(factors.median_of(mix.sources[g]));
    return static_cast<double>(c);
}

std::string temp_file(const std::string& name, const std::string& content) {
    const std::string path = (std::filesystem::temp_directory_path() / name).string();
    write_text_file(path, content);
    return path;
}

}  // namespace

TEST_CASE("default factor table carries the ten standard sources") {
    const EmissionFactorTable table = EmissionFactorTable::defaults();
    CHECK(table.size() == 10);
    CHECK(table.median_of("coal") == 820);
    CHECK(table.median_of("gas-cc") == 490);
    CHECK(table.median_of("biomass-cofiring") == 740);
    CHECK(table.median_of("biomass-dedicated") == 230);
    CHECK(table.median_of("geothermal") == 38);
    CHECK(table.median_of("hydro") == 24);
    CHECK(table.median_of("nuclear") == 12);
    CHECK(table.median_of("solar-pv") == 41);
    CHECK(table.median_of("wind-onshore") == 11);
    CHECK(table.median_of("wind-offshore") == 12);
    CHECK(table.factor_of("hydro").max == 2200);
}

TEST_CASE("worked intensity values") {
    const EmissionFactorTable table = EmissionFactorTable::defaults();
    CHECK(carbon_intensity(one_period({"nuclear"}, {5500.0}), table)[0] == 12.0);
    CHECK(carbon_intensity(one_period({"coal", "nuclear"}, {700.0, 700.0}), table)[0] == 416.0);
    CHECK(carbon_intensity(one_period({"gas-cc", "nuclear", "solar-pv"}, {50.0, 30.0, 20.0}),
                           table)[0] == 256.8);
}

TEST_CASE("unknown source and zero-total period are rejected") {
    const EmissionFactorTable table = EmissionFactorTable::defaults();
    CHECK_THROWS_WITH_AS(carbon_intensity(one_period({"lignite"}, {1.0}), table),
                         doctest::Contains("lignite"), ValidationError);
    CHECK_THROWS_WITH_AS(carbon_intensity(one_period({"nuclear"}, {0.0}), table),
                         doctest::Contains("zero total"), ValidationError);
}

TEST_CASE("intensity stays inside the factor hull and matches the naive loop") {
    const EmissionFactorTable table = EmissionFactorTable::defaults();
    std::vector<std::string> sources;
    for (const auto& [name, factor] : table.entries()) sources.push_back(name);
    Rng rng(123);
    std::uniform_real_distribution<double> quantity(0.0, 5000.0);
    for (int trial = 0; trial < 200; ++trial) {
        GenerationMixSeries mix;
        mix.sources = sources;
        std::vector<double> row(sources.size());
        double total = 0.0;
        for (double& q : row) {
            q = quantity(rng);
            total += q;
        }
        if (total == 0.0) row[0] = 1.0;
        mix.quantities.push_back(row);
        const double c = carbon_intensity(mix, table)[0];
        CHECK(c >= 11.0);
        CHECK(c <= 820.0);
        const double reference = naive_intensity(mix, table, 0);
        CHECK(std::abs(c - reference) <= 1e-12 * std::max(1.0, std::abs(reference)));
    }
}

TEST_CASE("shares are scale-invariant") {
    const EmissionFactorTable table = EmissionFactorTable::defaults();
    Rng rng(5);
    std::uniform_real_distribution<double> quantity(0.1, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> row{quantity(rng), quantity(rng), quantity(rng)};
        const auto base =
            carbon_intensity(one_period({"coal", "gas-cc", "hydro"}, row), table)[0];
        // powers of two rescale exactly
        std::vector<double> doubled{row[0] * 4, row[1] * 4, row[2] * 4};
        CHECK(carbon_intensity(one_period({"coal", "gas-cc", "hydro"}, doubled), table)[0] == base);
        std::uniform_real_distribution<double> factor(0.01, 50.0);
        const double lambda = factor(rng);
        std::vector<double> scaled{row[0] * lambda, row[1] * lambda, row[2] * lambda};
        const auto rescaled =
            carbon_intensity(one_period({"coal", "gas-cc", "hydro"}, scaled), table)[0];
        CHECK(std::abs(rescaled - base) <= 1e-12 * base);
    }
}

TEST_CASE("emission window bounds and hand values") {
    Instance inst;
    inst.machines = 1;
    inst.horizon = 2;
    inst.period_hours = 0.25;
    inst.jobs = {Job{{OperationSpec{2, {2.0, 3.0}}}}};
    inst.carbon_intensity = {1.0, 1.0};
    inst.onsite_available = {0.0, 0.0};
    const EmissionMatrix m = emission_matrix(inst);
    CHECK(m.window(0, 0).first_start == 1);
    CHECK(m.window(0, 0).values.size() == 1);  // S=1, F=1
    CHECK(m.at(0, 0, 1) == doctest::Approx(1.25).epsilon(1e-12));

    Instance ramp;
    ramp.machines = 1;
    ramp.horizon = 3;
    ramp.period_hours = 0.25;
    ramp.jobs = {Job{{OperationSpec{2, {1.0, 1.0}}}}};
    ramp.carbon_intensity = {100.0, 200.0, 300.0};
    ramp.onsite_available = {0.0, 0.0, 0.0};
    const EmissionMatrix r = emission_matrix(ramp);
    CHECK(r.at(0, 0, 2) == doctest::Approx(125.0).epsilon(1e-12));

    Instance dummy;
    dummy.machines = 2;
    dummy.horizon = 4;
    dummy.jobs = {Job{{OperationSpec{0, {}}, OperationSpec{2, {1.0, 1.0}}}}};
    dummy.carbon_intensity = {1, 2, 3, 4};
    dummy.onsite_available = {0, 0, 0, 0};
    const EmissionMatrix d = emission_matrix(dummy);
    const auto& w = d.window(0, 0);
    CHECK(w.first_start == 1);
    CHECK(w.values.size() == 3);  // F = 4 + 1 - 2 = 3
    for (double v : w.values) CHECK(v == 0.0);
}

TEST_CASE("infeasible windows are rejected") {
    Instance inst;
    inst.machines = 1;
    inst.horizon = 3;
    inst.jobs = {Job{{OperationSpec{4, {1, 1, 1, 1}}}}};
    inst.carbon_intensity = {1, 1, 1};
    inst.onsite_available = {0, 0, 0};
    CHECK_THROWS_WITH_AS(emission_matrix(inst), doctest::Contains("cannot fit"), ValidationError);
}

TEST_CASE("emission matrix equals a direct rescan of every window") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const Instance inst = test::random_instance(rng);
        const EmissionMatrix matrix = emission_matrix(inst);
        for (int i = 0; i < inst.job_count(); ++i) {
            for (int m = 0; m < inst.machines; ++m) {
                const StartWindow w = start_window(inst, i, m);
                for (int t = w.earliest; t <= w.latest; ++t) {
                    double grams = 0.0;
                    const OperationSpec& op = inst.op(i, m);
                    for (int k = 1; k <= op.duration; ++k)
                        grams += op.power[static_cast<std::size_t>(k - 1)] * inst.period_hours *
                                 inst.carbon_intensity[static_cast<std::size_t>(t + k - 2)];
                    CHECK(matrix.at(i, m, t) == grams);
                }
            }
        }
    }
}

TEST_CASE("grid-mix ingestion reads the sample day") {
    IngestStats stats;
    const auto column_map = load_column_map(test::data_path("fixtures/column_map_sample.conf"));
    const GenerationMixSeries mix = ingest_grid_mix(test::data_path("fixtures/gridmix_sample.csv"),
                                                    EmissionFactorTable::defaults(), column_map,
                                                    &stats);
    CHECK(mix.period_count() == 96);
    CHECK(stats.rows == 96);
    CHECK(stats.gaps_filled == 0);
    const auto intensity = carbon_intensity(mix, EmissionFactorTable::defaults());
    CHECK(intensity.size() == 96);
    for (double c : intensity) {
        CHECK(c >= 11.0);
        CHECK(c <= 820.0);
    }
}

TEST_CASE("unmapped column names the offender") {
    const std::string path = temp_file("cafs_mix_bad.csv",
                                       "timestamp,Lignite\n"
                                       "t0,100\n");
    CHECK_THROWS_WITH_AS(
        ingest_grid_mix(path, EmissionFactorTable::defaults(), {}, nullptr),
        doctest::Contains("Lignite"), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("missing cells carry the previous value forward") {
    const std::string path = temp_file("cafs_mix_gap.csv",
                                       "timestamp,nuclear,gas-cc\n"
                                       "t0,100,50\n"
                                       "t1,,60\n"
                                       "t2,120,70\n");
    IngestStats stats;
    const GenerationMixSeries mix =
        ingest_grid_mix(path, EmissionFactorTable::defaults(), {}, &stats);
    CHECK(stats.gaps_filled == 1);
    CHECK(mix.quantities[1][0] == 100.0);
    CHECK(mix.quantities[1][1] == 60.0);
    std::remove(path.c_str());
}

TEST_CASE("non-numeric cell is rejected") {
    const std::string path = temp_file("cafs_mix_nan.csv",
                                       "timestamp,nuclear\n"
                                       "t0,abc\n");
    CHECK_THROWS_AS(ingest_grid_mix(path, EmissionFactorTable::defaults(), {}, nullptr),
                    ParseError);
    std::remove(path.c_str());
}

TEST_CASE("on-site ingestion scales and clips") {
    const std::string path = temp_file("cafs_onsite.csv",
                                       "timestamp,kw\n"
                                       "t0,10000\n"
                                       "t1,-3\n"
                                       "t2,0\n");
    const auto series = ingest_onsite(path);
    CHECK(series == std::vector<double>{50.0, 0.0, 0.0});
    const auto zeros = ingest_onsite(path, 0.0);
    CHECK(zeros == std::vector<double>{0.0, 0.0, 0.0});
    std::remove(path.c_str());
}

TEST_CASE("price ingestion replicates hours and converts units") {
    const auto prices = ingest_prices(test::data_path("fixtures/prices_sample.csv"));
    CHECK(prices.size() == 96);
    for (std::size_t hour = 0; hour < 24; ++hour)
        for (std::size_t q = 1; q < 4; ++q) CHECK(prices[hour * 4 + q] == prices[hour * 4]);

    const std::string path = temp_file("cafs_prices.csv",
                                       "timestamp,eur_per_mwh\n"
                                       "h0,100\n" + [] {
                                           std::string rows;
                                           for (int h = 1; h < 24; ++h)
                                               rows += "h" + std::to_string(h) + ",50\n";
                                           return rows;
                                       }());
    const auto day = ingest_prices(path);
    CHECK(day[0] == 0.1);  // 100 EUR/MWh -> 0.1 EUR/kWh
    std::remove(path.c_str());
}

TEST_CASE("a 23-row price day is rejected") {
    std::string rows = "timestamp,eur_per_mwh\n";
    for (int h = 0; h < 23; ++h) rows += "h" + std::to_string(h) + ",50\n";
    const std::string path = temp_file("cafs_prices_dst.csv", rows);
    CHECK_THROWS_WITH_AS(ingest_prices(path), doctest::Contains("whole number of days"),
                         ValidationError);
    std::remove(path.c_str());
}
