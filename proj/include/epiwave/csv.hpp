#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epiwave/dates.hpp"
#include "epiwave/errors.hpp"
#include "epiwave/series.hpp"

namespace epiwave {

// Splits one CSV line, honoring double-quoted fields ("Korea, South").
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

inline double parse_count(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty()) return 0.0;
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error::data("parse error: bad number '" + cell + "' at row " + std::to_string(row + 1) +
                      ", column " + std::to_string(col + 1));
  }
}

// Column names for long-format tables; recovered/deaths are optional and
// default to zero when the column is absent.
struct LongColumns {
  std::string date = "date";
  std::string confirmed = "confirmed";
  std::string recovered = "recovered";
  std::string deaths = "deaths";
  std::string region = "region";  // optional filter column
};

struct ParseResult {
  RawSeries series;
  RepairLog log;
};

namespace detail {

struct DatedRow {
  Date date;
  double confirmed = 0.0;
  double recovered = 0.0;
  double deaths = 0.0;
};

inline RawSeries from_rows(std::vector<DatedRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const DatedRow& a, const DatedRow& b) { return a.date < b.date; });
  RawSeries raw;
  for (const auto& r : rows) {
    raw.dates.push_back(r.date);
    raw.confirmed_cum.push_back(r.confirmed);
    raw.recovered_cum.push_back(r.recovered);
    raw.deaths_cum.push_back(r.deaths);
  }
  return raw;
}

// JHU wide layout: Province/State,Country/Region,Lat,Long,<date...>. Rows
// whose Country/Region matches are summed (a country may be split across
// province rows; there is no sub-national logic beyond that sum).
inline RawSeries parse_wide(const std::vector<std::vector<std::string>>& rows,
                            const std::string& region, const std::string& measure) {
  const auto& header = rows[0];
  std::size_t first_date_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (looks_like_date(header[c])) {
      first_date_col = c;
      break;
    }
  }
  if (first_date_col == header.size())
    throw Error::data("parse error: wide table has no date columns");
  std::size_t region_col = first_date_col >= 2 ? 1 : 0;

  std::vector<Date> dates;
  for (std::size_t c = first_date_col; c < header.size(); ++c) dates.push_back(parse_date(header[c]));

  std::vector<double> totals(dates.size(), 0.0);
  bool found = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() <= region_col) continue;
    if (rows[r][region_col] != region) continue;
    found = true;
    for (std::size_t c = first_date_col; c < header.size() && c < rows[r].size(); ++c)
      totals[c - first_date_col] += parse_count(rows[r][c], r, c);
  }
  if (!found) throw Error::data("region-not-found: '" + region + "' has no rows in the table");

  std::vector<DatedRow> out(dates.size());
  for (std::size_t k = 0; k < dates.size(); ++k) {
    out[k].date = dates[k];
    if (measure == "confirmed") out[k].confirmed = totals[k];
    else if (measure == "recovered") out[k].recovered = totals[k];
    else if (measure == "deaths") out[k].deaths = totals[k];
    else throw Error::config("unknown measure '" + measure + "'");
  }
  return from_rows(std::move(out));
}

inline RawSeries parse_long(const std::vector<std::vector<std::string>>& rows,
                            const std::string& region, const LongColumns& cols) {
  const auto& header = rows[0];
  auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    return std::nullopt;
  };
  auto date_col = find_col(cols.date);
  auto conf_col = find_col(cols.confirmed);
  if (!date_col || !conf_col)
    throw Error::data("parse error: long table needs '" + cols.date + "' and '" + cols.confirmed +
                      "' columns");
  auto rec_col = find_col(cols.recovered);
  auto dth_col = find_col(cols.deaths);
  auto reg_col = find_col(cols.region);

  std::vector<DatedRow> out;
  bool region_seen = false;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (reg_col) {
      if (row.size() <= *reg_col || row[*reg_col] != region) continue;
      region_seen = true;
    }
    if (row.size() <= *conf_col)
      throw Error::data("parse error: short row at row " + std::to_string(r + 1));
    DatedRow d;
    d.date = parse_date(row[*date_col]);
    d.confirmed = parse_count(row[*conf_col], r, *conf_col);
    if (rec_col && row.size() > *rec_col) d.recovered = parse_count(row[*rec_col], r, *rec_col);
    if (dth_col && row.size() > *dth_col) d.deaths = parse_count(row[*dth_col], r, *dth_col);
    out.push_back(d);
  }
  if (reg_col && !region_seen)
    throw Error::data("region-not-found: '" + region + "' has no rows in the table");
  return from_rows(std::move(out));
}

}  // namespace detail

// Parses a cumulative report table into a cleaned RawSeries. Accepts the JHU
// wide layout (one row per region, one column per day; `measure` names the
// quantity the document carries) and a long layout with one row per day.
// Missing days are carried forward and cumulative decreases repaired; the
// repairs are returned alongside the series.
inline ParseResult parse_jhu_csv(const std::string& text, const std::string& region,
                                 const std::string& measure = "confirmed",
                                 const LongColumns& cols = {}) {
  auto rows = parse_csv(text);
  if (rows.size() < 2) throw Error::data("empty-input: table has no data rows");
  bool wide = false;
  for (const auto& cell : rows[0])
    if (looks_like_date(cell)) wide = true;
  RawSeries raw = wide ? detail::parse_wide(rows, region, measure)
                       : detail::parse_long(rows, region, cols);
  ParseResult result;
  result.series = clean_raw_series(raw, result.log);
  return result;
}

// Merges the three JHU wide documents (confirmed, recovered, deaths) for one
// region into a single cleaned RawSeries on the intersection of their dates.
inline ParseResult parse_jhu_triple(const std::string& confirmed_text,
                                    const std::string& recovered_text,
                                    const std::string& deaths_text, const std::string& region) {
  ParseResult conf = parse_jhu_csv(confirmed_text, region, "confirmed");
  ParseResult rec = parse_jhu_csv(recovered_text, region, "recovered");
  ParseResult dth = parse_jhu_csv(deaths_text, region, "deaths");

  // Cleaned series are contiguous, so the common span is an index shift.
  Date lo = std::max({conf.series.dates.front(), rec.series.dates.front(), dth.series.dates.front()});
  Date hi = std::min({conf.series.dates.back(), rec.series.dates.back(), dth.series.dates.back()});
  if (hi < lo) throw Error::data("empty-input: report documents share no dates");

  ParseResult result;
  for (Date d = lo; d <= hi; d = d + 1) {
    result.series.dates.push_back(d);
    result.series.confirmed_cum.push_back(conf.series.confirmed_cum[d - conf.series.dates.front()]);
    result.series.recovered_cum.push_back(rec.series.recovered_cum[d - rec.series.dates.front()]);
    result.series.deaths_cum.push_back(dth.series.deaths_cum[d - dth.series.dates.front()]);
  }
  result.log = std::move(conf.log);
  result.log.insert(result.log.end(), rec.log.begin(), rec.log.end());
  result.log.insert(result.log.end(), dth.log.begin(), dth.log.end());
  return result;
}

// Restricts a series to [first, last] inclusive.
inline EpidemicSeries slice(const EpidemicSeries& s, Date first, Date last) {
  EpidemicSeries out;
  out.population = s.population;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.dates[k] < first || last < s.dates[k]) continue;
    out.dates.push_back(s.dates[k]);
    out.infected.push_back(s.infected[k]);
    out.removed.push_back(s.removed[k]);
    out.new_positives.push_back(s.new_positives[k]);
  }
  return out;
}

inline std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::string series_to_csv(const EpidemicSeries& s) {
  std::string out = "date,infected,removed,new_positives\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out += s.dates[k].iso();
    out += ',' + format_num(s.infected[k]);
    out += ',' + format_num(s.removed[k]);
    out += ',' + format_num(s.new_positives[k]);
    out += '\n';
  }
  return out;
}

inline EpidemicSeries series_from_csv(const std::string& text, double population) {
  auto rows = parse_csv(text);
  if (rows.size() < 2) throw Error::data("empty-input: series csv has no data rows");
  EpidemicSeries s;
  s.population = population;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 4) throw Error::data("parse error: short row at row " + std::to_string(r + 1));
    s.dates.push_back(parse_date(rows[r][0]));
    s.infected.push_back(parse_count(rows[r][1], r, 1));
    s.removed.push_back(parse_count(rows[r][2], r, 2));
    s.new_positives.push_back(parse_count(rows[r][3], r, 3));
  }
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error::data("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error::data("cannot write file: " + path);
  out << content;
}

}  // namespace epiwave
