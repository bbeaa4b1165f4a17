// Command-line front end: ingest -> estimate -> figure-ready CSV tables plus
// a JSON report carrying the full provenance of each estimate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paneltrend/bandwidth.hpp"
#include "paneltrend/date.hpp"
#include "paneltrend/estimators.hpp"
#include "paneltrend/ingest.hpp"
#include "paneltrend/kernel.hpp"
#include "paneltrend/panel.hpp"
#include "paneltrend/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace paneltrend;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

struct RunConfig {
  std::string feed_path;
  std::string density_path;
  std::string synthetic_path;
  std::string region = "EU";
  std::string measure = "infection";
  int transform_case = 1;
  int model = 1;
  std::string h = "auto";
  std::string c_rule = "quarter";
  int trim_days = -1; // resolved after parsing: 30, or 40 when rolling
  int death_threshold = 20;
  std::string cutoff;
  bool rolling = false;
  int window = 30;
  std::string out_dir;
  long long seed = 0;
  std::string reference;
};

struct PanelBundle {
  Panel panel;
  std::vector<double> final_day_counts; // raw daily increase on the last day
  std::vector<std::string> warnings;
  std::optional<GroundTruth> truth;
};

EvalRule parse_c_rule(const std::string& s, std::optional<int>* margin) {
  if (s == "quarter") return EvalRule::quarter_trim;
  if (s == "logn") return EvalRule::log_n_count;
  if (s.rfind("explicit:", 0) == 0) {
    *margin = std::stoi(s.substr(9));
    return EvalRule::explicit_margin;
  }
  throw std::runtime_error("bad --c-rule value: " + s + " (expected quarter|logn|explicit:K)");
}

PanelBundle acquire_panel(const RunConfig& cfg) {
  PanelBundle bundle;
  if (!cfg.synthetic_path.empty()) {
    std::ifstream in(cfg.synthetic_path);
    if (!in) throw std::runtime_error("cannot open spec: " + cfg.synthetic_path);
    std::stringstream ss;
    ss << in.rdbuf();
    SyntheticSpec spec = parse_spec_config(ss.str(), cfg.synthetic_path);
    if (cfg.seed != 0) spec.seed = static_cast<std::uint64_t>(cfg.seed);
    auto [panel, truth] = generate(spec);
    bundle.panel = std::move(panel);
    bundle.truth = std::move(truth);
    const int t_count = bundle.panel.n_periods();
    bundle.final_day_counts.resize(bundle.panel.n_units());
    for (int i = 0; i < bundle.panel.n_units(); ++i) {
      bundle.final_day_counts[i] = bundle.panel.values(i, t_count - 1);
    }
    return bundle;
  }

  if (cfg.feed_path.empty()) {
    throw std::runtime_error("either --feed or --synthetic is required");
  }
  const FeedSchema schema = detect_schema(cfg.feed_path);
  LoadResult feed = load_feed(cfg.feed_path, schema);
  bundle.warnings = feed.warnings;

  std::vector<DensityRecord> densities;
  const bool have_density = !cfg.density_path.empty();
  if (have_density) {
    densities = load_densities(cfg.density_path);
  } else if (cfg.transform_case == 2) {
    throw std::runtime_error("case 2 requires --density; refusing to fall back to case 1");
  }

  std::optional<CivilDate> cutoff;
  if (!cfg.cutoff.empty()) cutoff = parse_iso_date(cfg.cutoff);

  PreparedRegion prepared = prepare_region(
      feed.records, have_density ? &densities : nullptr, region_from_string(cfg.region),
      cfg.measure == "death" ? Measure::death : Measure::infection, cfg.trim_days,
      cfg.death_threshold, cutoff);
  if (prepared.n_duplicate_rows > 0) {
    bundle.warnings.push_back("duplicate (date,country) rows: " +
                              std::to_string(prepared.n_duplicate_rows) + " (last kept)");
  }
  for (const std::string& u : prepared.dropped_units) {
    bundle.warnings.push_back("unit excluded by filters: " + u);
  }

  bundle.final_day_counts.resize(prepared.series.size());
  for (std::size_t i = 0; i < prepared.series.size(); ++i) {
    bundle.final_day_counts[i] = prepared.series[i].counts.back();
  }
  bundle.panel = build_panel(prepared.series, prepared.time_labels,
                             cfg.transform_case == 2 ? Transform::case2 : Transform::case1,
                             prepared.densities, prepared.region);
  return bundle;
}

json curve_to_json(const LambdaCurve& curve, const Panel& panel) {
  json arr = json::array();
  for (const LambdaPoint& p : curve.entries) {
    json e;
    e["t"] = p.t;
    e["u"] = p.u;
    e["date"] = panel.time_labels.empty() ? "" : panel.time_labels[p.t - 1];
    e["lambda"] = p.lambda;
    e["degenerate"] = p.degenerate;
    json loadings = json::array();
    for (int i = 0; i < p.vector.size(); ++i) loadings.push_back(p.vector(i));
    e["loadings"] = loadings;
    arr.push_back(std::move(e));
  }
  return arr;
}

int run_estimate(const RunConfig& cfg) {
  PanelBundle bundle = acquire_panel(cfg);
  Panel panel = bundle.panel;

  std::optional<int> margin;
  const EvalRule rule = parse_c_rule(cfg.c_rule, &margin);
  const EvaluationSet c_set = eval_set(panel, rule, margin);

  // Bandwidth first: with model 2 the same bandwidth drives the peak
  // smoother and the estimation on the transformed panel.
  std::optional<CvResult> cv;
  double h_hat;
  if (cfg.h == "auto") {
    cv = select_bandwidth(panel, default_grid(panel.n_periods()), c_set);
    h_hat = cv->h_hat;
  } else {
    h_hat = std::stod(cfg.h);
  }

  KernelSpec spec{KernelFamily::epanechnikov, h_hat, BoundaryRule::right_adjusted};
  std::optional<PeakEstimate> peaks;
  if (cfg.model == 2) {
    auto [transformed, peak] = peak_transform(panel, spec);
    panel = std::move(transformed);
    peaks = std::move(peak);
  }

  int reference = 0;
  if (!cfg.reference.empty()) {
    const auto it = std::find(panel.unit_ids.begin(), panel.unit_ids.end(), cfg.reference);
    if (it == panel.unit_ids.end()) {
      throw std::runtime_error("--reference unit not in panel: " + cfg.reference);
    }
    reference = static_cast<int>(it - panel.unit_ids.begin());
  } else {
    reference = select_reference(bundle.final_day_counts, panel.unit_ids);
  }

  const EstimationReport est =
      estimate(panel, spec, c_set, reference,
               cfg.model == 2 ? TrendModel::model2 : TrendModel::model1);
  const double a_main = est.a_hat;
  const double h_l = 0.8 * h_hat;
  const double h_r = 1.2 * h_hat;
  const KernelSpec spec_l{KernelFamily::epanechnikov, h_l, BoundaryRule::right_adjusted};
  const KernelSpec spec_r{KernelFamily::epanechnikov, h_r, BoundaryRule::right_adjusted};
  const double a_l = a_hat(lambda_curve(panel, spec_l, c_set), panel.n_periods());
  const double a_r = a_hat(lambda_curve(panel, spec_r, c_set), panel.n_periods());
  const LambdaCurve& curve = est.curve;
  const RSeries& r = est.r;
  const QSeries& q = est.q;

  // ---- a_hat.csv ----
  std::ostringstream a_csv;
  a_csv << "region,case,h_label,h,a_hat\n";
  const std::string region = region_name(panel.region);
  const std::string case_label = "case" + std::to_string(cfg.transform_case);
  a_csv << region << "," << case_label << ",h_hat," << fmt17(h_hat) << "," << fmt17(a_main) << "\n";
  a_csv << region << "," << case_label << ",h_l," << fmt17(h_l) << "," << fmt17(a_l) << "\n";
  a_csv << region << "," << case_label << ",h_r," << fmt17(h_r) << "," << fmt17(a_r) << "\n";

  // ---- r_series.csv ----
  std::ostringstream r_csv;
  r_csv << "t,date,r\n";
  for (const RSample& s : r.entries) {
    const std::string date = panel.time_labels.empty() ? "" : panel.time_labels[s.t - 1];
    r_csv << s.t << "," << date << "," << fmt17(s.value) << "\n";
  }

  // ---- q_series.csv ----
  std::ostringstream q_csv;
  q_csv << "u,date,unit,q\n";
  for (const QColumn& col : q.columns) {
    if (!col.defined) continue;
    const std::string date = panel.time_labels.empty() ? "" : panel.time_labels[col.t - 1];
    for (int i = 0; i < panel.n_units(); ++i) {
      q_csv << fmt17(col.u) << "," << date << "," << panel.unit_ids[i] << ","
            << fmt17(col.q[i]) << "\n";
    }
  }

  // ---- report.json ----
  json report;
  report["model"] = cfg.model == 2 ? "model2" : "model1";
  report["region"] = region;
  report["measure"] = cfg.measure;
  report["case"] = cfg.transform_case;
  report["n_units"] = panel.n_units();
  report["n_periods"] = panel.n_periods();
  report["unit_ids"] = panel.unit_ids;
  json c_json;
  c_json["rule"] = cfg.c_rule;
  c_json["indices"] = c_set.indices;
  report["c_set"] = c_json;
  json h_json;
  h_json["mode"] = cfg.h == "auto" ? "auto" : "fixed";
  h_json["h_hat"] = h_hat;
  h_json["h_l"] = h_l;
  h_json["h_r"] = h_r;
  report["h"] = h_json;
  if (cv) {
    json cv_json;
    cv_json["grid"] = cv->h_grid;
    cv_json["scores"] = cv->cv_values;
    cv_json["a_per_h"] = cv->a_per_h;
    cv_json["n_warnings"] = cv->n_warnings;
    report["cv"] = cv_json;
  }
  json a_json;
  a_json["h_hat"] = a_main;
  a_json["h_l"] = a_l;
  a_json["h_r"] = a_r;
  report["a_hat"] = a_json;
  report["lambda_curve"] = curve_to_json(curve, panel);
  json r_json = json::array();
  for (const RSample& s : r.entries) {
    r_json.push_back(json{{"t", s.t}, {"r", s.value}});
  }
  report["r_series"] = r_json;
  report["r_undefined"] = r.n_undefined;
  json q_json;
  q_json["reference"] = panel.unit_ids[reference];
  json q_cols = json::array();
  for (const QColumn& col : q.columns) {
    json cj;
    cj["t"] = col.t;
    cj["u"] = col.u;
    cj["defined"] = col.defined;
    if (col.defined) cj["q"] = col.q;
    q_cols.push_back(std::move(cj));
  }
  q_json["columns"] = q_cols;
  report["q"] = q_json;
  if (peaks) {
    json pk;
    pk["gamma_hat"] = peaks->gamma_hat;
    pk["argmax_t"] = peaks->argmax_t;
    report["peak"] = pk;
  }
  if (bundle.truth) {
    json truth;
    truth["a_true"] = bundle.truth->a_true;
    truth["starts"] = bundle.truth->starts;
    if (!bundle.truth->gamma.empty()) truth["gamma"] = bundle.truth->gamma;
    report["synthetic_truth"] = truth;
  }
  report["seed"] = cfg.seed;
  report["warnings"] = bundle.warnings;

  fs::create_directories(cfg.out_dir);
  write_file_atomic(fs::path(cfg.out_dir) / "a_hat.csv", a_csv.str());
  write_file_atomic(fs::path(cfg.out_dir) / "r_series.csv", r_csv.str());
  write_file_atomic(fs::path(cfg.out_dir) / "q_series.csv", q_csv.str());
  write_file_atomic(fs::path(cfg.out_dir) / "report.json", report.dump(2) + "\n");
  return 0;
}

int run_rolling(const RunConfig& cfg) {
  PanelBundle bundle = acquire_panel(cfg);
  Panel panel = bundle.panel;

  double h_hat;
  if (cfg.h == "auto") {
    std::optional<int> margin;
    const EvalRule rule = parse_c_rule(cfg.c_rule, &margin);
    const EvaluationSet c_set = eval_set(panel, rule, margin);
    h_hat = select_bandwidth(panel, default_grid(panel.n_periods()), c_set).h_hat;
  } else {
    h_hat = std::stod(cfg.h);
  }
  const KernelSpec spec{KernelFamily::epanechnikov, h_hat, BoundaryRule::right_adjusted};

  if (cfg.model == 2) {
    panel = peak_transform(panel, spec).first;
  }
  const std::vector<RollingRow> rows =
      rolling_windows(panel, cfg.window, spec, BandwidthPolicy::fixed_h);

  std::ostringstream csv;
  csv << "end_t,end_date,a_hat,r_bar,status\n";
  for (const RollingRow& row : rows) {
    csv << row.end_t << "," << row.end_date << ",";
    if (row.degenerate) {
      csv << "nan,nan,degenerate\n";
    } else {
      csv << fmt17(row.a_hat) << "," << fmt17(row.r_bar) << ",ok\n";
    }
  }

  fs::create_directories(cfg.out_dir);
  write_file_atomic(fs::path(cfg.out_dir) / "rolling.csv", csv.str());
  return 0;
}

int run_simulate(const std::string& spec_path, const std::string& out_dir) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open spec: " + spec_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const SyntheticSpec spec = parse_spec_config(ss.str(), spec_path);
  auto [panel, truth] = generate(spec);
  const Eigen::MatrixXd counts = to_counts(panel);

  std::ostringstream feed;
  feed << "date,country_code,region,new_cases,new_deaths\n";
  for (int i = 0; i < panel.n_units(); ++i) {
    for (int t = panel.starts[i]; t <= panel.n_periods(); ++t) {
      feed << panel.time_labels[t - 1] << "," << panel.unit_ids[i] << ",custom,"
           << static_cast<long long>(counts(i, t - 1)) << ",0\n";
    }
  }

  json truth_json;
  truth_json["a_true"] = truth.a_true;
  truth_json["model"] = spec.model == Model::model2 ? "model2" : "model1";
  truth_json["n_units"] = spec.n_units;
  truth_json["n_periods"] = spec.n_periods;
  truth_json["seed"] = spec.seed;
  truth_json["starts"] = truth.starts;
  if (!truth.gamma.empty()) truth_json["gamma"] = truth.gamma;
  truth_json["spec"] = spec_to_config(spec);

  fs::create_directories(out_dir);
  write_file_atomic(fs::path(out_dir) / "feed.csv", feed.str());
  write_file_atomic(fs::path(out_dir) / "truth.json", truth_json.dump(2) + "\n");
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-weighted local-PCA trend estimation for unbalanced panels"};
  app.set_help_flag("--help", "Print this help message and exit"); // frees -h for --h
  app.require_subcommand(0, 1);

  RunConfig cfg;
  app.add_option("--feed", cfg.feed_path, "Case/death feed CSV (canonical or legacy schema)");
  app.add_option("--density", cfg.density_path, "Population density CSV");
  app.add_option("--synthetic", cfg.synthetic_path, "Generator spec; replaces --feed");
  app.add_option("--region", cfg.region, "AF|AM|AO|EU|custom")->default_val("EU");
  app.add_option("--measure", cfg.measure, "infection|death")
      ->check(CLI::IsMember({"infection", "death"}))
      ->default_val("infection");
  app.add_option("--case", cfg.transform_case, "1: ln(count+1); 2: ln((count+1)/density)")
      ->check(CLI::IsMember({1, 2}))
      ->default_val(1);
  app.add_option("--model", cfg.model, "1: trend model; 2: peaked model")
      ->check(CLI::IsMember({1, 2}))
      ->default_val(1);
  app.add_option("--h", cfg.h, "Bandwidth: auto (leave-one-out CV) or a value in (0,1)")
      ->default_val("auto");
  app.add_option("--c-rule", cfg.c_rule, "quarter|logn|explicit:K")->default_val("quarter");
  app.add_option("--trim", cfg.trim_days, "Days removed from the span start (default 30; 40 when rolling)");
  app.add_option("--death-threshold", cfg.death_threshold,
                 "Exclude units with fewer cumulative deaths at the cutoff")
      ->default_val(20);
  app.add_option("--cutoff", cfg.cutoff, "Last date of the span, YYYY-MM-DD (default: last in feed)");
  app.add_flag("--rolling", cfg.rolling, "Rolling-window re-estimation instead of a single fit");
  app.add_option("--window", cfg.window, "Rolling window length in days")->default_val(30);
  app.add_option("--out", cfg.out_dir, "Output directory");
  app.add_option("--seed", cfg.seed, "Seed override for --synthetic panels")->default_val(0);
  app.add_option("--reference", cfg.reference,
                 "Reference unit for Q ratios (default: largest final-day increase)");

  CLI::App* sim = app.add_subcommand("simulate", "Write a synthetic feed plus its ground truth");
  std::string sim_spec, sim_out;
  sim->add_option("spec", sim_spec, "Generator spec file")->required();
  sim->add_option("--out", sim_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return run_simulate(sim_spec, sim_out);
    }
    if (cfg.out_dir.empty()) throw std::runtime_error("--out is required");
    if (cfg.trim_days < 0) cfg.trim_days = cfg.rolling ? 40 : 30;
    return cfg.rolling ? run_rolling(cfg) : run_estimate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
