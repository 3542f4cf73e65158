#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "demandcast/data_pipeline.hpp"
#include "demandcast/error.hpp"

using namespace demandcast;

namespace {

const std::string kHeader =
    "Date,Max.Demand met during the day (MW),Shortage during maximum Demand (MW),Energy Met (MU),"
    "Drawal Schedule (MU),OD(+)/UD(-) (MU),Max OD (MW),Energy Shortage (MU)\n";

std::vector<RawRecord> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_records(in);
}

TimeSeries series_of(std::vector<double> v) { return TimeSeries::from_values(std::move(v)); }

std::vector<double> values_of(const TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

}  // namespace

TEST_CASE("a report row maps to a record", "[pipeline]") {
    const auto r = parse(kHeader + "01/04/2013, 4500, 10, 1, 2, 3, 4, 5\n");
    REQUIRE(r.size() == 1);
    CHECK(format_date(r[0].date) == "2013-04-01");
    REQUIRE(r[0].max_demand_mw);
    CHECK(*r[0].max_demand_mw == 4500.0);
    CHECK(r[0].energy_shortage_mu == 5.0);
    CHECK(r[0].row == 1);
}

TEST_CASE("empty or unparseable demand becomes absent", "[pipeline]") {
    const auto r = parse(kHeader + "01/04/2013,,1,1,1,1,1,1\n02/04/2013,-5,1,1,1,1,1,1\n03/04/2013,abc,1,1,1,1,1,1\n");
    REQUIRE(r.size() == 3);
    CHECK_FALSE(r[0].max_demand_mw);
    CHECK_FALSE(r[1].max_demand_mw);
    CHECK_FALSE(r[2].max_demand_mw);
}

TEST_CASE("ten-row fixture has two absent values", "[pipeline]") {
    const auto r = parse_records_file(DEMANDCAST_TEST_DATA "/ten_rows.csv");
    CHECK(r.size() == 10);
    CHECK(std::count_if(r.begin(), r.end(), [](const RawRecord& x) { return !x.max_demand_mw; }) == 2);
    CHECK(*r[8].max_demand_mw == 4590.0);
}

TEST_CASE("header and date errors", "[pipeline]") {
    CHECK_THROWS_AS(parse("Day,Demand\n01/04/2013,1\n"), InputError);
    CHECK_THROWS_AS(parse("Date,Date,max_demand_mw\n"), InputError);
    CHECK_THROWS_AS(parse(""), InputError);
    try {
        parse(kHeader + "01/04/2013,1,1,1,1,1,1,1\n2013.04.02,1,1,1,1,1,1,1\n");
        FAIL("expected an input error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_records_file("/nonexistent/demand.csv"), InputError);
}

TEST_CASE("two-column exports and a BOM are accepted", "[pipeline]") {
    const auto r = parse("\xEF\xBB\xBF" "date,max_demand_mw\n2013-04-01,100\n2013-04-02,101.5\n");
    REQUIRE(r.size() == 2);
    CHECK(*r[1].max_demand_mw == 101.5);
}

TEST_CASE("assemble fills calendar gaps", "[pipeline]") {
    const auto r = parse("date,max_demand_mw\n2013-04-01,1\n2013-04-02,2\n2013-04-04,4\n");
    const auto s = assemble(r);
    CHECK(s.size() == 4);
    CHECK(s.is_missing(2));
    CHECK(s.missing_count() == 1);

    const auto single = assemble(parse("date,max_demand_mw\n2013-04-01,7\n"));
    CHECK(single.size() == 1);

    CHECK_THROWS_AS(assemble(parse("date,max_demand_mw\n2013-04-01,1\n2013-04-01,2\n")), InputError);
    CHECK_THROWS_AS(assemble(parse("date,max_demand_mw\n2013-04-01,\n")), InsufficientData);
    CHECK_THROWS_AS(assemble(std::vector<RawRecord>{}), InsufficientData);
}

TEST_CASE("assemble on the full calendar span", "[pipeline]") {
    // 3713 days with 73 gaps spread over the span.
    std::ostringstream text;
    text << "date,max_demand_mw\n";
    const Date first = parse_date("2013-04-01");
    std::size_t written = 0;
    for (int i = 0; i < 3713; ++i) {
        if (i % 50 == 7 && i / 50 < 73) continue;
        text << format_date(first + std::chrono::days{i}) << ',' << 100000 + i << '\n';
        ++written;
    }
    const auto s = assemble(parse(text.str()));
    CHECK(written == 3640);
    CHECK(s.size() == 3713);
    CHECK(s.missing_count() == 73);
    const auto gaps = summarize_gaps(s);
    CHECK(gaps.calendar_days == 3713);
    CHECK(gaps.observed_days == 3640);
    CHECK(gaps.missing_dates.size() == 73);
    CHECK(format_date(s.end_date()) == "2023-05-31");
}

TEST_CASE("imputation examples", "[pipeline]") {
    CHECK(values_of(impute(series_of({1, kMissing, 3}), ImputationStrategy::Mean).series) == std::vector<double>{1, 2, 3});
    CHECK(values_of(impute(series_of({1, kMissing, kMissing, 4}), ImputationStrategy::LinearInterpolation).series) ==
          std::vector<double>{1, 2, 3, 4});
    CHECK(values_of(impute(series_of({2, 2, kMissing, 5}), ImputationStrategy::Mode).series) ==
          std::vector<double>{2, 2, 2, 5});
    const auto dropped = impute(series_of({1, kMissing, 3}), ImputationStrategy::Drop);
    CHECK(values_of(dropped.series) == std::vector<double>{1, 3});
    CHECK(dropped.dates.size() == 2);
    CHECK((dropped.dates[1] - dropped.dates[0]).count() == 2);
    CHECK(values_of(impute(series_of({1, kMissing, 4, 10}), ImputationStrategy::Median).series) ==
          std::vector<double>{1, 4, 4, 10});
    CHECK(values_of(impute(series_of({kMissing, 2, kMissing, 6, kMissing}), ImputationStrategy::LinearInterpolation).series) ==
          std::vector<double>{2, 2, 4, 6, 6});
    CHECK(values_of(impute(series_of({3, 1, kMissing, 3, 1}), ImputationStrategy::Mode).series) ==
          std::vector<double>{3, 1, 1, 3, 1});
    CHECK_THROWS_AS(impute(series_of({kMissing, kMissing}), ImputationStrategy::Mean), InsufficientData);
    CHECK_THROWS_AS(impute(series_of({1, kMissing}), ImputationStrategy::Mean), InsufficientData);
}

TEST_CASE("imputation properties", "[pipeline]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(100.0, 200.0);
    std::bernoulli_distribution gap(0.2);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> v(60);
        for (auto& x : v) x = gap(rng) ? kMissing : std::round(u(rng));
        v[5] = 150.0;
        v[40] = 160.0;
        const auto s = series_of(v);
        const auto obs = s.observed();
        const double lo = *std::min_element(obs.begin(), obs.end());
        const double hi = *std::max_element(obs.begin(), obs.end());
        for (auto strategy : kAllStrategies) {
            const auto b = impute(s, strategy);
            CHECK_FALSE(b.series.has_missing());
            if (strategy == ImputationStrategy::Drop) {
                CHECK(values_of(b.series) == obs);
                continue;
            }
            REQUIRE(b.series.size() == s.size());
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!std::isnan(v[i])) CHECK(b.series[i] == v[i]);
                CHECK(b.series[i] >= lo);
                CHECK(b.series[i] <= hi);
            }
        }
    }
}

TEST_CASE("interpolation is exact on affine data", "[pipeline]") {
    std::vector<double> v(40);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 3.25 * static_cast<double>(i) + 17.0;
    auto gappy = v;
    for (std::size_t i : {3u, 4u, 5u, 17u, 30u, 31u}) gappy[i] = kMissing;
    const auto b = impute(series_of(gappy), ImputationStrategy::LinearInterpolation);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(b.series[i] - v[i]) <= 1e-12);
}

TEST_CASE("build_all produces the five datasets", "[pipeline]") {
    const auto r = parse_records_file(DEMANDCAST_TEST_DATA "/ten_rows.csv");
    const auto bundles = build_all(r);
    REQUIRE(bundles.size() == 5);
    CHECK(bundles[0].name == "dropna");
    CHECK(bundles[0].series.size() == 8);
    for (std::size_t i = 1; i < 5; ++i) {
        CHECK(bundles[i].series.size() == 10);
        CHECK_FALSE(bundles[i].series.has_missing());
    }
    CHECK(dataset_label(ImputationStrategy::Drop) == "dropna-dataset");
    CHECK(short_name(ImputationStrategy::LinearInterpolation) == "interp");
    CHECK(parse_strategy("interp") == ImputationStrategy::LinearInterpolation);
    CHECK(parse_strategy("drop") == ImputationStrategy::Drop);
    CHECK_THROWS_AS(parse_strategy("knn"), InvalidArgument);
}

TEST_CASE("gap-free input makes every dataset identical", "[pipeline]") {
    const auto r = parse("date,max_demand_mw\n2013-04-01,5\n2013-04-02,6\n2013-04-03,8\n2013-04-04,7\n");
    const auto bundles = build_all(r);
    for (const auto& b : bundles) CHECK(values_of(b.series) == std::vector<double>{5, 6, 8, 7});
}

TEST_CASE("bundle export", "[pipeline]") {
    const auto r = parse("date,max_demand_mw\n2013-04-01,5\n2013-04-03,8.5\n");
    const auto s = assemble(r);
    std::ostringstream a, b;
    write_bundle_csv(impute(s, ImputationStrategy::Drop), a);
    write_bundle_csv(impute(s, ImputationStrategy::LinearInterpolation), b);
    CHECK(a.str() == "date,max_demand_mw\n2013-04-01,5\n2013-04-03,8.5\n");
    CHECK(b.str() == "date,max_demand_mw\n2013-04-01,5\n2013-04-02,6.75\n2013-04-03,8.5\n");
}
