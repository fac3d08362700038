#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "oracles.hpp"
#include "zscreen/error.hpp"
#include "zscreen/screening.hpp"

using namespace zscreen;

namespace {

std::string date_of(std::size_t k) {
  // Monthly sampling starting 2014-01-05.
  const std::size_t y = 2014 + k / 12, m = 1 + k % 12;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu-%02zu-05", y, m);
  return buf;
}

struct CohortBuilder {
  std::string text = "individual_id,biomarker,value,date,status,discipline\n";
  void add(const std::string& id, const std::string& biomarker, const std::vector<double>& values,
           const std::string& status = "amateur", const std::string& discipline = "cycling") {
    for (std::size_t k = 0; k < values.size(); ++k) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", values[k]);
      text += id + "," + biomarker + "," + buf + "," + date_of(k) + "," + status + "," + discipline + "\n";
    }
  }
  Cohort build() const {
    auto parsed = parse_cohort(text);
    REQUIRE(parsed.rejects.empty());
    return parsed.cohort;
  }
};

ScreenConfig config_for(StatKind kind, std::vector<std::string> biomarkers, std::uint64_t seed = 1) {
  ScreenConfig c;
  c.kind = kind;
  c.transformations.assign(biomarkers.size(), Transformation::identity());
  c.biomarkers = std::move(biomarkers);
  c.tabulation = {20000, seed, 1};
  return c;
}

Sequence season_seq(int summers, int winters) {
  Sequence s{"a", "x", {}, {}};
  int year = 2000;
  for (int k = 0; k < summers; ++k) {
    s.values.push_back(k);
    s.times.emplace_back(SeasonCode{year++, Season::summer});
  }
  for (int k = 0; k < winters; ++k) {
    s.values.push_back(k + 0.5);
    s.times.emplace_back(SeasonCode{year++, Season::winter});
  }
  return s;
}

}  // namespace

TEST_CASE("eligibility rules") {
  const Sequence three{"a", "x", {1, 2, 3}, {}};
  CHECK_FALSE(eligible(StatKind::T2, three));
  CHECK(eligible(StatKind::T1, three));
  CHECK(eligible(StatKind::T0, three));
  CHECK(eligible_multivariate(5, 3));
  CHECK_FALSE(eligible_multivariate(4, 3));
  CHECK_FALSE(eligible(StatKind::T4B, season_seq(3, 1)));
  CHECK(eligible(StatKind::T4B, season_seq(2, 2)));
  CHECK_FALSE(eligible(StatKind::T4C, season_seq(3, 3)));
}

TEST_CASE("null cohort: flagged proportion near alpha") {
  std::mt19937_64 gen(1234);
  CohortBuilder b;
  for (int i = 0; i < 1000; ++i) b.add("p" + std::to_string(i), "hb", oracle::gaussian(gen, 10, 14.0, 1.0));
  const auto out = screen(b.build(), config_for(StatKind::T1, {"hb"}, 99));
  CHECK(out.summary.eligible == 1000);
  CHECK(out.summary.proportion >= 0.03);
  CHECK(out.summary.proportion <= 0.07);
}

TEST_CASE("a large shift in the final point is flagged at the last index") {
  std::mt19937_64 gen(4321);
  auto x = oracle::gaussian(gen, 10, 14.0, 1.0);
  x.back() += 10.0;
  CohortBuilder b;
  b.add("p", "hb", x);
  const auto out = screen(b.build(), config_for(StatKind::T1, {"hb"}));
  REQUIRE(out.results.size() == 1);
  CHECK(out.results[0].flagged);
  CHECK(out.results[0].stat->first == 10);
}

TEST_CASE("nothing eligible yields 0/0 with a note") {
  CohortBuilder b;
  b.add("p", "hb", {1, 2, 3});
  b.add("q", "hb", {1, 5, 3});
  const auto out = screen(b.build(), config_for(StatKind::T2, {"hb"}));
  CHECK(out.summary.eligible == 0);
  CHECK(format_cell(out.summary.flagged, out.summary.eligible) == "0/0");
  CHECK_FALSE(out.summary.note.empty());
}

TEST_CASE("T4A screening equals T1 value for value") {
  std::mt19937_64 gen(5);
  CohortBuilder b;
  for (int i = 0; i < 30; ++i) b.add("p" + std::to_string(i), "hb", oracle::gaussian(gen, 4 + i % 9));
  const auto cohort = b.build();
  const auto t1 = screen(cohort, config_for(StatKind::T1, {"hb"}));
  const auto t4 = screen(cohort, config_for(StatKind::T4A, {"hb"}));
  REQUIRE(t1.results.size() == t4.results.size());
  for (std::size_t i = 0; i < t1.results.size(); ++i)
    CHECK(std::abs(t1.results[i].stat->value - t4.results[i].stat->value) <= 1e-10);
}

TEST_CASE("domain failures stay on the sequence") {
  CohortBuilder b;
  b.add("p", "hb", {1, 2, 3, -4});
  b.add("q", "hb", {1, 2, 3, 4.5});
  auto c = config_for(StatKind::T1, {"hb"});
  c.transformations = {Transformation::log()};
  const auto out = screen(b.build(), c);
  CHECK(out.summary.errors == 1);
  CHECK_FALSE(out.results[0].error.empty());
  CHECK(out.results[1].error.empty());
}

TEST_CASE("model C needs dates") {
  const auto parsed = parse_cohort(
      "individual_id,biomarker,value,season,year\n"
      "a,hb,1,summer,2015\na,hb,2,winter,2016\na,hb,3,summer,2016\na,hb,4,winter,2017\n");
  CHECK_THROWS_AS(screen(parsed.cohort, config_for(StatKind::T4C, {"hb"})), IneligibleError);
}

TEST_CASE("assemble_tuples keeps only fully measured time points") {
  const auto parsed = parse_cohort(
      "individual_id,biomarker,value,date\n"
      "a,fe,1,2015-01-01\na,si,10,2015-01-01\n"
      "a,fe,2,2015-02-01\n"
      "a,fe,3,2015-03-01\na,si,30,2015-03-01\na,si,31,2015-03-01\n");
  const auto tuples = assemble_tuples(parsed.cohort, {"fe", "si"});
  REQUIRE(tuples.size() == 1);
  REQUIRE(tuples[0].size() == 2);
  CHECK(tuples[0].values(1, 0) == 3.0);
  CHECK(tuples[0].values(1, 1) == 30.0);
  CHECK_THROWS_AS(assemble_tuples(parsed.cohort, {"fe"}), std::invalid_argument);
  CHECK_THROWS_AS(assemble_tuples(parsed.cohort, {"fe", "fe"}), std::invalid_argument);
}

TEST_CASE("T3 screening over a tuple") {
  std::mt19937_64 gen(77);
  CohortBuilder b;
  for (int i = 0; i < 20; ++i) {
    const auto id = "p" + std::to_string(i);
    b.add(id, "fe", oracle::gaussian(gen, 8, 50, 5));
    b.add(id, "si", oracle::gaussian(gen, 8, 20, 2));
  }
  const auto out = screen(b.build(), config_for(StatKind::T3, {"fe", "si"}));
  CHECK(out.summary.eligible == 20);
  for (const auto& r : out.results) CHECK(r.stat->cols == 2);
}

TEST_CASE("group cells") {
  CHECK(format_cell(30, 75) == "30/75 (40.00)");
  CHECK(format_cell(0, 0) == "0/0");
  CHECK(format_cell(1, 3) == "1/3 (33.33)");
  CHECK(format_cell(2, 3) == "2/3 (66.67)");
}

TEST_CASE("group report partitions the eligible results") {
  std::mt19937_64 gen(9);
  CohortBuilder b;
  for (int i = 0; i < 40; ++i) {
    auto x = oracle::gaussian(gen, 10);
    if (i % 2 == 0 && i < 10) x[4] += 20.0;
    b.add("p" + std::to_string(i), "hb", x, i % 2 ? "professional" : "amateur");
  }
  const auto cohort = b.build();
  const auto out = screen(cohort, config_for(StatKind::T1, {"hb"}));
  const auto cells = group_report(out.results, cohort, Grouping::status);
  REQUIRE(cells.size() == 2);
  std::size_t flagged = 0, eligible = 0;
  for (const auto& c : cells) {
    flagged += c.flagged;
    eligible += c.eligible;
  }
  CHECK(flagged == out.summary.flagged);
  CHECK(eligible == out.summary.eligible);
  CHECK(cells[0].group == "amateur");
  CHECK(cells[0].flagged >= 5);

  auto shuffled = out.results;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto again = group_report(shuffled, cohort, Grouping::status);
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(again[i].cell() == cells[i].cell());
}

TEST_CASE("groups without flags still report their denominator") {
  CohortBuilder b;
  b.add("a1", "hb", {0, 0.1, 0.2, 0.1, 0.05, 0.15, 0.1, 0.12, 0.08, 40}, "amateur");
  b.add("b1", "hb", {1, 2, 1.5, 1.7, 1.2, 1.9, 1.1, 1.4, 1.6, 1.3}, "professional");
  const auto cohort = b.build();
  const auto cells = group_report(screen(cohort, config_for(StatKind::T1, {"hb"})).results, cohort,
                                  Grouping::status);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].cell() == "1/1 (100.00)");
  CHECK(cells[1].cell() == "0/1 (0.00)");
}

TEST_CASE("correlation histograms") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> nd;
  CohortBuilder b;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x, y;
    for (int k = 0; k < 20; ++k) {
      const double z = nd(gen);
      x.push_back(z);
      y.push_back(0.9 * z + std::sqrt(1 - 0.81) * nd(gen));
    }
    b.add("p" + std::to_string(i), "u", x);
    b.add("p" + std::to_string(i), "v", y);
    std::vector<double> w;
    for (double v : x) w.push_back(2.0 * v);
    b.add("p" + std::to_string(i), "w", w);
  }
  const auto cohort = b.build();
  const auto h = correlation_report(cohort, {{"u", "v"}, {"u", "w"}, {"u", "absent"}}, 10, 20);
  REQUIRE(h.size() == 3);
  std::size_t above = 0, total = 0;
  for (std::size_t k = 0; k < 20; ++k) {
    total += h[0].counts[k];
    if (h[0].bin_lower(k) >= 0.5) above += h[0].counts[k];
  }
  CHECK(total == 50);
  CHECK(above >= 48);
  CHECK(h[1].counts.back() == 50);
  CHECK(std::count(h[1].counts.begin(), h[1].counts.end(), 0u) == 19);
  CHECK_FALSE(h[2].note.empty());
  CHECK(std::all_of(h[2].counts.begin(), h[2].counts.end(), [](std::size_t c) { return c == 0; }));
}

TEST_CASE("grouping tokens") {
  CHECK(parse_grouping("status") == Grouping::status);
  CHECK_FALSE(parse_grouping("sport"));
  Individual ind{"x", Status::mixed, {"a", "b"}};
  CHECK(group_of(ind, Grouping::status) == "multiple");
  CHECK(group_of(ind, Grouping::discipline) == "multiple");
  CHECK(group_of(ind, Grouping::all) == "all");
}
