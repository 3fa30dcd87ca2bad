#include "epiwave/csv.hpp"

#include <gtest/gtest.h>

#include <cstdio>

#include "epiwave/rng.hpp"

using namespace epiwave;

namespace {

const char* kWideToy =
    "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20\n"
    ",Freedonia,10,20,10,12,15\n"
    ",Sylvania,30,40,5,5,6\n";

// Integer-valued SIR generator: flows floored so every compartment stays a
// whole count and s + i + r = N holds without rounding slack.
struct IntSir {
  double s, i, r;
};

std::vector<IntSir> int_sir_path(double n, double i0, double r0, double beta, double gamma,
                                 int days, Rng& rng) {
  std::vector<IntSir> path{{n - i0 - r0, i0, r0}};
  for (int d = 0; d < days; ++d) {
    IntSir cur = path.back();
    double fi = std::floor(beta * cur.s * cur.i / n + rng.uniform());
    fi = std::min(fi, cur.s);
    double fr = std::floor(gamma * cur.i + rng.uniform());
    fr = std::min(fr, cur.i + fi);
    path.push_back({cur.s - fi, cur.i + fi - fr, cur.r + fr});
  }
  return path;
}

std::string long_csv_from(const std::vector<IntSir>& path) {
  std::string text = "date,confirmed,recovered,deaths\n";
  Date d0(2020, 3, 1);
  for (std::size_t k = 0; k < path.size(); ++k) {
    double conf = path[k].i + path[k].r;
    double deaths = std::floor(path[k].r / 10);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", (d0 + static_cast<int>(k)).iso().c_str(),
                  conf, path[k].r - deaths, deaths);
    text += buf;
  }
  return text;
}

}  // namespace

TEST(ParseWide, Toy) {
  ParseResult got = parse_jhu_csv(kWideToy, "Freedonia");
  std::vector<double> want{10, 12, 15};
  EXPECT_EQ(got.series.confirmed_cum, want);
  EXPECT_EQ(got.series.dates.front().iso(), "2020-01-22");
  EXPECT_EQ(got.series.dates.back().iso(), "2020-01-24");
  EXPECT_EQ(got.log.size(), 0u);
  for (double v : got.series.recovered_cum) EXPECT_EQ(v, 0.0);
}

TEST(ParseWide, SumsProvinceRows) {
  std::string text =
      "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20\n"
      "North,Freedonia,1,2,3,5\n"
      "South,Freedonia,3,4,4,6\n";
  ParseResult got = parse_jhu_csv(text, "Freedonia");
  std::vector<double> want{7, 11};
  EXPECT_EQ(got.series.confirmed_cum, want);
}

TEST(ParseWide, QuotedRegionWithComma) {
  std::string text =
      "Province/State,Country/Region,Lat,Long,1/22/20\n"
      ",\"Korea, South\",36,128,7\n";
  ParseResult got = parse_jhu_csv(text, "Korea, South");
  ASSERT_EQ(got.series.size(), 1u);
  EXPECT_EQ(got.series.confirmed_cum[0], 7.0);
}

TEST(ParseWide, RegionNotFound) {
  try {
    parse_jhu_csv(kWideToy, "Atlantis");
    FAIL() << "expected region-not-found";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
    EXPECT_NE(std::string(e.what()).find("region-not-found"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("Atlantis"), std::string::npos);
  }
}

TEST(ParseWide, MeasureSelectsColumn) {
  ParseResult got = parse_jhu_csv(kWideToy, "Sylvania", "deaths");
  std::vector<double> want{5, 5, 6};
  EXPECT_EQ(got.series.deaths_cum, want);
  for (double v : got.series.confirmed_cum) EXPECT_EQ(v, 0.0);
}

TEST(ParseLong, DefaultColumns) {
  std::string text =
      "date,confirmed,recovered,deaths\n"
      "2020-03-01,10,1,0\n"
      "2020-03-02,12,2,0\n"
      "2020-03-03,15,3,1\n";
  ParseResult got = parse_jhu_csv(text, "");
  std::vector<double> conf{10, 12, 15}, rec{1, 2, 3}, dth{0, 0, 1};
  EXPECT_EQ(got.series.confirmed_cum, conf);
  EXPECT_EQ(got.series.recovered_cum, rec);
  EXPECT_EQ(got.series.deaths_cum, dth);
}

TEST(ParseLong, CustomColumnsAndRegionFilter) {
  std::string text =
      "giorno,zona,casi\n"
      "2020-03-01,nord,4\n"
      "2020-03-01,sud,9\n"
      "2020-03-02,nord,6\n";
  LongColumns cols;
  cols.date = "giorno";
  cols.confirmed = "casi";
  cols.region = "zona";
  ParseResult got = parse_jhu_csv(text, "nord", "confirmed", cols);
  std::vector<double> want{4, 6};
  EXPECT_EQ(got.series.confirmed_cum, want);
  EXPECT_THROW(parse_jhu_csv(text, "ovest", "confirmed", cols), Error);
}

TEST(ParseLong, MissingOptionalColumnsDefaultZero) {
  std::string text =
      "date,confirmed\n"
      "2020-03-01,10\n"
      "2020-03-02,12\n";
  ParseResult got = parse_jhu_csv(text, "");
  std::vector<double> zeros{0, 0};
  EXPECT_EQ(got.series.recovered_cum, zeros);
  EXPECT_EQ(got.series.deaths_cum, zeros);
}

TEST(ParseLong, SortsRowsByDate) {
  std::string text =
      "date,confirmed\n"
      "2020-03-02,12\n"
      "2020-03-01,10\n";
  ParseResult got = parse_jhu_csv(text, "");
  std::vector<double> want{10, 12};
  EXPECT_EQ(got.series.confirmed_cum, want);
}

TEST(ParseErrors, CorruptNumberNamesRowAndColumn) {
  std::string text =
      "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20\n"
      ",Freedonia,10,20,10,twelve\n";
  try {
    parse_jhu_csv(text, "Freedonia");
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("parse error"), std::string::npos);
    EXPECT_NE(what.find("'twelve'"), std::string::npos);
    EXPECT_NE(what.find("row 2"), std::string::npos);
    EXPECT_NE(what.find("column 6"), std::string::npos);
  }
}

TEST(ParseErrors, EmptyTable) {
  EXPECT_THROW(parse_jhu_csv("", ""), Error);
  try {
    parse_jhu_csv("date,confirmed\n", "");
    FAIL() << "expected empty-input";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("empty-input"), std::string::npos);
  }
}

TEST(ParseErrors, ShortRow) {
  std::string text =
      "date,confirmed\n"
      "2020-03-01\n";
  EXPECT_THROW(parse_jhu_csv(text, ""), Error);
}

TEST(ParseClean, FillsDateGaps) {
  std::string text =
      "date,confirmed\n"
      "2020-03-01,10\n"
      "2020-03-02,12\n"
      "2020-03-05,20\n";
  ParseResult got = parse_jhu_csv(text, "");
  ASSERT_EQ(got.series.size(), 5u);
  std::vector<double> want{10, 12, 12, 12, 20};
  EXPECT_EQ(got.series.confirmed_cum, want);
  EXPECT_EQ(got.log.size(), 2u);
  EXPECT_EQ(got.log[0].action, "gap-fill");
}

TEST(ParseClean, RepairsCumulativeDip) {
  std::string text =
      "date,confirmed\n"
      "2020-03-01,10\n"
      "2020-03-02,9\n"
      "2020-03-03,15\n";
  ParseResult got = parse_jhu_csv(text, "");
  std::vector<double> want{10, 10, 15};
  EXPECT_EQ(got.series.confirmed_cum, want);
  ASSERT_EQ(got.log.size(), 1u);
  EXPECT_EQ(got.log[0].action, "monotone-repair");
  EXPECT_EQ(got.log[0].field, "confirmed");
}

TEST(ParseTriple, MergesOnCommonDates) {
  std::string conf =
      "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20,1/25/20\n"
      ",Freedonia,0,0,10,12,15,18\n";
  std::string rec =
      "Province/State,Country/Region,Lat,Long,1/23/20,1/24/20,1/25/20\n"
      ",Freedonia,0,0,1,2,3\n";
  std::string dth =
      "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20\n"
      ",Freedonia,0,0,0,0,1\n";
  ParseResult got = parse_jhu_triple(conf, rec, dth, "Freedonia");
  ASSERT_EQ(got.series.size(), 2u);
  EXPECT_EQ(got.series.dates.front().iso(), "2020-01-23");
  std::vector<double> wc{12, 15}, wr{1, 2}, wd{0, 1};
  EXPECT_EQ(got.series.confirmed_cum, wc);
  EXPECT_EQ(got.series.recovered_cum, wr);
  EXPECT_EQ(got.series.deaths_cum, wd);
}

TEST(ParseTriple, DisjointSpansThrow) {
  std::string conf =
      "Province/State,Country/Region,Lat,Long,1/22/20\n"
      ",Freedonia,0,0,10\n";
  std::string rec =
      "Province/State,Country/Region,Lat,Long,3/22/20\n"
      ",Freedonia,0,0,1\n";
  try {
    parse_jhu_triple(conf, rec, rec, "Freedonia");
    FAIL() << "expected empty-input";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("share no dates"), std::string::npos);
  }
}

TEST(RoundTrip, SirTrajectoryThroughPipeline) {
  Rng rng(905);
  for (int rep = 0; rep < 20; ++rep) {
    const double n = 1e6;
    auto path = int_sir_path(n, 900, 100, rng.uniform(0.15, 0.4), 0.1, 60, rng);
    ParseResult parsed = parse_jhu_csv(long_csv_from(path), "");
    EXPECT_EQ(parsed.log.size(), 0u);
    EpidemicSeries s = build_epidemic_series(parsed.series, n);
    ASSERT_EQ(s.size(), path.size());
    for (std::size_t k = 0; k < path.size(); ++k) {
      EXPECT_EQ(s.infected[k], path[k].i);
      EXPECT_EQ(s.removed[k], path[k].r);
      double prev = k == 0 ? 0.0 : path[k - 1].i + path[k - 1].r;
      EXPECT_EQ(s.new_positives[k], path[k].i + path[k].r - prev);
    }
  }
}

TEST(RoundTrip, SeriesCsv) {
  EpidemicSeries s;
  s.population = 1000;
  Date d0(2020, 3, 1);
  for (int k = 0; k < 5; ++k) {
    s.dates.push_back(d0 + k);
    s.infected.push_back(9 + k);
    s.removed.push_back(1 + 2 * k);
    s.new_positives.push_back(k == 0 ? 10 : static_cast<double>(k));
  }
  EpidemicSeries back = series_from_csv(series_to_csv(s), 1000);
  EXPECT_EQ(back.dates, s.dates);
  EXPECT_EQ(back.infected, s.infected);
  EXPECT_EQ(back.removed, s.removed);
  EXPECT_EQ(back.new_positives, s.new_positives);
}

TEST(Slice, InclusiveWindow) {
  EpidemicSeries s;
  s.population = 100;
  Date d0(2020, 3, 1);
  for (int k = 0; k < 6; ++k) {
    s.dates.push_back(d0 + k);
    s.infected.push_back(k);
    s.removed.push_back(0);
    s.new_positives.push_back(0);
  }
  EpidemicSeries cut = slice(s, d0 + 2, d0 + 4);
  ASSERT_EQ(cut.size(), 3u);
  EXPECT_EQ(cut.infected[0], 2.0);
  EXPECT_EQ(cut.infected[2], 4.0);
  EXPECT_EQ(cut.population, 100.0);
}

TEST(SplitLine, EscapedQuote) {
  auto cells = split_csv_line("a,\"x\"\"y\",b");
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[1], "x\"y");
}

TEST(Dates, ParseFormats) {
  EXPECT_EQ(parse_date("2020-06-22").iso(), "2020-06-22");
  EXPECT_EQ(parse_date("6/22/20").iso(), "2020-06-22");
  EXPECT_EQ(parse_date("6/22/2020").iso(), "2020-06-22");
  EXPECT_THROW(parse_date("yesterday"), Error);
  EXPECT_THROW(parse_date("2020-13-01"), Error);
  EXPECT_EQ(Date(2020, 3, 1) + 3, Date(2020, 3, 4));
  EXPECT_EQ(Date(2020, 3, 4) - Date(2020, 2, 28), 5);
}
