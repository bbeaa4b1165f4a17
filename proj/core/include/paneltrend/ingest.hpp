#ifndef PANELTREND_INGEST_HPP
#define PANELTREND_INGEST_HPP

#include <optional>
#include <string>
#include <vector>

#include "paneltrend/date.hpp"
#include "paneltrend/panel.hpp"

namespace paneltrend {

struct RawRecord {
  CivilDate date;
  std::string country_code; // ISO 3166-1 alpha-3
  Region region = Region::Custom;
  long long new_cases = 0;
  long long new_deaths = 0;
};

struct DensityRecord {
  std::string country_code;
  double density = 0.0; // people per km^2
};

enum class FeedSchema { canonical, ecdc };
enum class Measure { infection, death };

/// Parsed feed plus row-level diagnostics. Malformed rows and rows from
/// unmappable continents are skipped, never fatal; a missing column is.
struct LoadResult {
  std::vector<RawRecord> records;
  std::vector<std::string> warnings;
  int n_dropped_rows = 0;
};

/// Reads a case/death feed.
///  canonical: header `date,country_code,region,new_cases,new_deaths`,
///             ISO-8601 dates.
///  ecdc:      legacy layout with `dateRep` (DD/MM/YYYY), `cases`, `deaths`,
///             `countryterritoryCode`, `continentExp`; Asia and Oceania are
///             merged into the AO region.
/// Throws std::runtime_error naming the column when a required header field
/// is absent.
LoadResult load_feed(const std::string& path, FeedSchema schema);

/// Sniffs the schema from the header row.
FeedSchema detect_schema(const std::string& path);

/// Reads `country_code,density`; non-positive densities are rejected rows.
std::vector<DensityRecord> load_densities(const std::string& path);

/// One region's per-unit daily series on a common calendar span, ready for
/// build_panel. Counts are raw (negatives preserved; the log transform
/// clamps them later).
struct PreparedRegion {
  std::vector<UnitSeries> series;
  std::vector<std::string> time_labels;
  std::vector<std::optional<double>> densities; // aligned with series
  Region region = Region::Custom;
  int n_duplicate_rows = 0;
  std::vector<std::string> dropped_units; // excluded by the filters below
};

/// Applies the sample-construction rules for one (region, measure) pair:
/// the span starts at the region's first day with a positive measure count,
/// the first trim_days days are then removed, and the span ends at
/// cutoff_date (default: last date present for the region). Units are
/// excluded when they lack a density record (if a table is supplied), never
/// record a positive count inside the span, or - for deaths - have
/// cumulative deaths below death_threshold at the cutoff. Duplicate
/// (date, country) rows keep the last occurrence with a counted warning.
/// Throws std::runtime_error("no units survive filters") when nothing
/// remains.
PreparedRegion prepare_region(const std::vector<RawRecord>& records,
                              const std::vector<DensityRecord>* densities,
                              Region region, Measure measure, int trim_days,
                              int death_threshold,
                              std::optional<CivilDate> cutoff_date = std::nullopt);

} // namespace paneltrend

#endif // PANELTREND_INGEST_HPP
