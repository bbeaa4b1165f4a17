#include "paneltrend/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace paneltrend {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

int column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw std::runtime_error("missing column: " + name);
}

bool parse_count(const std::string& tok, long long* out) {
  if (tok.empty()) {
    *out = 0; // some feeds leave the count blank on quiet days
    return true;
  }
  try {
    std::size_t pos = 0;
    *out = std::stoll(tok, &pos);
    return pos == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::optional<Region> continent_to_region(const std::string& continent) {
  if (continent == "Europe") return Region::EU;
  if (continent == "Africa") return Region::AF;
  if (continent == "America") return Region::AM;
  if (continent == "Asia" || continent == "Oceania") return Region::AO;
  return std::nullopt;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.empty()) throw std::runtime_error("empty file: " + path);
  return lines;
}

} // namespace

FeedSchema detect_schema(const std::string& path) {
  const std::vector<std::string> header = split_csv_line(read_lines(path).front());
  for (const std::string& f : header) {
    if (f == "dateRep") return FeedSchema::ecdc;
  }
  return FeedSchema::canonical;
}

LoadResult load_feed(const std::string& path, FeedSchema schema) {
  const std::vector<std::string> lines = read_lines(path);
  const std::vector<std::string> header = split_csv_line(lines.front());

  LoadResult out;
  auto warn = [&out](int line_no, const std::string& msg) {
    out.warnings.push_back("line " + std::to_string(line_no) + ": " + msg);
    ++out.n_dropped_rows;
  };

  if (schema == FeedSchema::canonical) {
    const int c_date = column_index(header, "date");
    const int c_code = column_index(header, "country_code");
    const int c_region = column_index(header, "region");
    const int c_cases = column_index(header, "new_cases");
    const int c_deaths = column_index(header, "new_deaths");
    for (std::size_t k = 1; k < lines.size(); ++k) {
      if (lines[k].empty()) continue;
      const std::vector<std::string> f = split_csv_line(lines[k]);
      const int line_no = static_cast<int>(k) + 1;
      if (static_cast<int>(f.size()) <= std::max({c_date, c_code, c_region, c_cases, c_deaths})) {
        warn(line_no, "too few fields");
        continue;
      }
      RawRecord rec;
      try {
        rec.date = parse_iso_date(f[c_date]);
      } catch (const std::exception& e) {
        warn(line_no, e.what());
        continue;
      }
      try {
        rec.region = region_from_string(f[c_region]);
      } catch (const std::exception& e) {
        warn(line_no, e.what());
        continue;
      }
      rec.country_code = f[c_code];
      if (rec.country_code.empty()) {
        warn(line_no, "empty country code");
        continue;
      }
      if (!parse_count(f[c_cases], &rec.new_cases) ||
          !parse_count(f[c_deaths], &rec.new_deaths)) {
        warn(line_no, "malformed count");
        continue;
      }
      out.records.push_back(std::move(rec));
    }
    return out;
  }

  const int c_date = column_index(header, "dateRep");
  const int c_cases = column_index(header, "cases");
  const int c_deaths = column_index(header, "deaths");
  const int c_code = column_index(header, "countryterritoryCode");
  const int c_continent = column_index(header, "continentExp");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const std::vector<std::string> f = split_csv_line(lines[k]);
    const int line_no = static_cast<int>(k) + 1;
    if (static_cast<int>(f.size()) <= std::max({c_date, c_cases, c_deaths, c_code, c_continent})) {
      warn(line_no, "too few fields");
      continue;
    }
    RawRecord rec;
    try {
      rec.date = parse_dmy_date(f[c_date]);
    } catch (const std::exception& e) {
      warn(line_no, e.what());
      continue;
    }
    const std::optional<Region> region = continent_to_region(f[c_continent]);
    if (!region) {
      warn(line_no, "unmappable continent: " + f[c_continent]);
      continue;
    }
    rec.region = *region;
    rec.country_code = f[c_code];
    if (rec.country_code.empty()) {
      warn(line_no, "empty country code");
      continue;
    }
    if (!parse_count(f[c_cases], &rec.new_cases) ||
        !parse_count(f[c_deaths], &rec.new_deaths)) {
      warn(line_no, "malformed count");
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<DensityRecord> load_densities(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  const std::vector<std::string> header = split_csv_line(lines.front());
  const int c_code = column_index(header, "country_code");
  const int c_density = column_index(header, "density");

  std::vector<DensityRecord> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const std::vector<std::string> f = split_csv_line(lines[k]);
    if (static_cast<int>(f.size()) <= std::max(c_code, c_density)) continue;
    DensityRecord rec;
    rec.country_code = f[c_code];
    try {
      rec.density = std::stod(f[c_density]);
    } catch (const std::exception&) {
      continue;
    }
    if (rec.country_code.empty() || !(rec.density > 0.0)) continue;
    out.push_back(std::move(rec));
  }
  return out;
}

PreparedRegion prepare_region(const std::vector<RawRecord>& records,
                              const std::vector<DensityRecord>* densities,
                              Region region, Measure measure, int trim_days,
                              int death_threshold,
                              std::optional<CivilDate> cutoff_date) {
  if (trim_days < 0 || death_threshold < 0) {
    throw std::invalid_argument("prepare_region: trim_days and death_threshold must be nonnegative");
  }

  std::unordered_map<std::string, double> density_by_code;
  if (densities) {
    for (const DensityRecord& d : *densities) density_by_code[d.country_code] = d.density;
  }

  PreparedRegion out;
  out.region = region;

  // country -> day -> (cases, deaths); later duplicates overwrite earlier ones
  std::map<std::string, std::map<long long, std::pair<long long, long long>>> by_country;
  for (const RawRecord& rec : records) {
    if (rec.region != region) continue;
    const long long day = days_from_civil(rec.date);
    auto [it, inserted] = by_country[rec.country_code].try_emplace(
        day, std::make_pair(rec.new_cases, rec.new_deaths));
    if (!inserted) {
      it->second = {rec.new_cases, rec.new_deaths};
      ++out.n_duplicate_rows;
    }
  }
  if (by_country.empty()) {
    throw std::runtime_error("no units survive filters");
  }

  const auto measure_count = [measure](const std::pair<long long, long long>& c) {
    return measure == Measure::infection ? c.first : c.second;
  };

  long long first_active = 0;
  long long last_day = 0;
  bool any_active = false;
  bool any_day = false;
  for (const auto& [code, days] : by_country) {
    for (const auto& [day, counts] : days) {
      if (!any_day || day > last_day) last_day = day;
      any_day = true;
      if (measure_count(counts) > 0 && (!any_active || day < first_active)) {
        first_active = day;
        any_active = true;
      }
    }
  }
  if (!any_active) {
    throw std::runtime_error("no units survive filters");
  }

  const long long span_start = first_active + trim_days;
  const long long span_end = cutoff_date ? days_from_civil(*cutoff_date) : last_day;
  const long long t_count = span_end - span_start + 1;
  if (t_count < 2) {
    throw std::runtime_error("no units survive filters");
  }

  out.time_labels.resize(static_cast<std::size_t>(t_count));
  for (long long k = 0; k < t_count; ++k) {
    out.time_labels[static_cast<std::size_t>(k)] = to_iso_string(civil_from_days(span_start + k));
  }

  for (const auto& [code, days] : by_country) {
    std::optional<double> density;
    if (densities) {
      const auto it = density_by_code.find(code);
      if (it == density_by_code.end()) {
        out.dropped_units.push_back(code);
        continue;
      }
      density = it->second;
    }

    long long first_positive = 0;
    bool started = false;
    long long cumulative_deaths = 0;
    for (const auto& [day, counts] : days) {
      if (day <= span_end) cumulative_deaths += std::max(0LL, counts.second);
      if (!started && measure_count(counts) > 0) {
        first_positive = day;
        started = true;
      }
    }
    if (!started || first_positive > span_end) {
      out.dropped_units.push_back(code);
      continue;
    }
    if (measure == Measure::death && cumulative_deaths < death_threshold) {
      out.dropped_units.push_back(code);
      continue;
    }

    UnitSeries unit;
    unit.unit_id = code;
    unit.counts.assign(static_cast<std::size_t>(t_count), 0.0);
    for (const auto& [day, counts] : days) {
      if (day < span_start || day > span_end) continue;
      unit.counts[static_cast<std::size_t>(day - span_start)] =
          static_cast<double>(measure_count(counts));
    }
    unit.start = static_cast<int>(std::max(1LL, first_positive - span_start + 1));
    out.series.push_back(std::move(unit));
    out.densities.push_back(density);
  }

  if (out.series.empty()) {
    throw std::runtime_error("no units survive filters");
  }
  return out;
}

} // namespace paneltrend
