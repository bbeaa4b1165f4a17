#include "paneltrend/synthetic.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "paneltrend/date.hpp"
#include "paneltrend/spectral.hpp"

namespace paneltrend {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Unit-indexed noise stream: every unit draws from its own engine, so the
// panel is identical no matter which order units are generated in.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, int unit) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(unit + 1)};
    engine_.seed(seq);
  }

  double next() {
    // Box-Muller on two 53-bit uniforms; avoids stdlib-dependent
    // normal_distribution state
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(kTwoPi * u2);
  }

 private:
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53; // [0, 1)
  }
  std::mt19937_64 engine_;
};

std::string synthetic_unit_id(int i) {
  std::string id = "AAA";
  id[2] = static_cast<char>('A' + i % 26);
  id[1] = static_cast<char>('A' + (i / 26) % 26);
  id[0] = static_cast<char>('A' + (i / 676) % 26);
  return id;
}

} // namespace

double GProfile::operator()(double tau) const {
  switch (kind) {
    case Kind::constant: return p0;
    case Kind::linear: return p0 * tau + p1;
    case Kind::sinusoid: return p2 + p0 * std::sin(kTwoPi * tau / p1);
    case Kind::vee: return p1 + p2 * std::abs(tau - p0);
  }
  return p0;
}

void GProfile::validate() const {
  switch (kind) {
    case Kind::constant:
      if (!(p0 > 0.0)) throw std::invalid_argument("constant profile must be positive");
      return;
    case Kind::linear:
      if (!(p1 > 0.0) || !(p0 + p1 > 0.0)) {
        throw std::invalid_argument("linear profile must stay positive on [0,1]");
      }
      return;
    case Kind::sinusoid:
      if (!(p1 > 0.0)) throw std::invalid_argument("sinusoid period must be positive");
      if (!(p2 - std::abs(p0) > 0.0)) {
        throw std::invalid_argument("sinusoid offset must exceed the amplitude");
      }
      return;
    case Kind::vee:
      if (!(p1 > 0.0) || p2 < 0.0) {
        throw std::invalid_argument("vee profile needs a positive floor and nonnegative slope");
      }
      return;
  }
}

void SyntheticSpec::validate() const {
  if (n_units < 1) throw std::invalid_argument("spec: n_units must be positive");
  if (n_periods < 2) throw std::invalid_argument("spec: n_periods must be at least 2");
  if (!(a_true > 0.0) || !(a_true < 1.0)) {
    throw std::invalid_argument("spec: a must lie in (0, 1)");
  }
  if (noise_sd < 0.0) throw std::invalid_argument("spec: noise_sd must be nonnegative");
  auto check_len = [this](std::size_t len, const char* what) {
    if (len != 1 && static_cast<int>(len) != n_units) {
      throw std::invalid_argument(std::string("spec: ") + what +
                                  " must have one entry or one per unit");
    }
  };
  if (g_profiles.empty()) throw std::invalid_argument("spec: no g profile given");
  check_len(g_profiles.size(), "profiles");
  for (const GProfile& p : g_profiles) p.validate();
  if (start_fractions.empty()) throw std::invalid_argument("spec: no start fraction given");
  check_len(start_fractions.size(), "starts");
  for (double f : start_fractions) {
    if (f < 0.0 || f >= 1.0) {
      throw std::invalid_argument("spec: start fractions must lie in [0, 1)");
    }
  }
  if (model == Model::model2) {
    if (gamma.empty()) throw std::invalid_argument("spec: model 2 requires gamma");
    check_len(gamma.size(), "gamma");
  }
}

GProfile SyntheticSpec::profile(int unit) const {
  return g_profiles.size() == 1 ? g_profiles[0] : g_profiles[unit];
}

double SyntheticSpec::start_fraction(int unit) const {
  return start_fractions.size() == 1 ? start_fractions[0] : start_fractions[unit];
}

double SyntheticSpec::gamma_of(int unit) const {
  return gamma.size() == 1 ? gamma[0] : gamma[unit];
}

std::pair<Panel, GroundTruth> generate(const SyntheticSpec& spec) {
  spec.validate();
  const int n = spec.n_units;
  const int t_count = spec.n_periods;

  Panel panel;
  panel.values = Eigen::MatrixXd::Zero(n, t_count);
  panel.starts.resize(n);
  panel.unit_ids.resize(n);
  panel.region = Region::Custom;
  panel.time_labels.resize(t_count);
  const CivilDate base{2020, 1, 1};
  for (int t = 1; t <= t_count; ++t) {
    panel.time_labels[t - 1] = to_iso_string(add_days(base, t - 1));
  }

  GroundTruth truth;
  truth.a_true = spec.a_true;
  truth.starts.resize(n);
  truth.g_values = Eigen::MatrixXd::Zero(n, t_count);
  truth.trend = Eigen::MatrixXd::Zero(n, t_count);
  if (spec.model == Model::model2) truth.gamma.resize(n);

  for (int i = 0; i < n; ++i) {
    const GProfile g = spec.profile(i);
    const int start = std::min(
        static_cast<int>(std::floor(spec.start_fraction(i) * t_count)) + 1, t_count);
    panel.starts[i] = start;
    truth.starts[i] = start;
    panel.unit_ids[i] = synthetic_unit_id(i);

    const double beta = static_cast<double>(start - 1);
    GaussianStream noise(spec.seed, i);
    const bool noisy = spec.noise_law == NoiseLaw::gaussian && spec.noise_sd > 0.0;

    for (int t = 1; t <= t_count; ++t) {
      const double tau = static_cast<double>(t) / t_count;
      truth.g_values(i, t - 1) = g(tau);
      if (t < start) continue;
      double signal = g(tau) * std::pow(std::abs(t - beta), spec.a_true);
      if (spec.model == Model::model2) {
        signal = spec.gamma_of(i) - signal;
        truth.gamma[i] = spec.gamma_of(i);
      }
      truth.trend(i, t - 1) = signal;
      panel.values(i, t - 1) = noisy ? signal + spec.noise_sd * noise.next() : signal;
    }
  }
  panel.validate();
  return {std::move(panel), std::move(truth)};
}

double oracle_lambda(const SyntheticSpec& spec, double h, double u) {
  spec.validate();
  if (spec.noise_law == NoiseLaw::gaussian && spec.noise_sd > 0.0) {
    throw std::invalid_argument("oracle is noiseless-only");
  }
  if (!(h > 0.0) || h > 1.0 || !(u > 0.0) || u > 1.0) {
    throw std::invalid_argument("oracle_lambda: bad h or u");
  }

  const int n = spec.n_units;
  const int t_count = spec.n_periods;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd y(n);

  for (int t = 1; t <= t_count; ++t) {
    const double tau = static_cast<double>(t) / t_count;
    const double z = (tau - u) / h;
    if (std::abs(z) > 1.0) continue;
    double w = 0.75 * (1.0 - z * z);
    if (u > 1.0 - h) {
      const double zb = (1.0 - u) / h;
      w /= 0.75 * (zb - zb * zb * zb / 3.0) + 0.5;
    }
    w /= h;
    if (w == 0.0) continue;

    for (int i = 0; i < n; ++i) {
      const int start =
          std::min(static_cast<int>(std::floor(spec.start_fraction(i) * t_count)) + 1,
                   t_count);
      if (t < start) {
        y(i) = 0.0;
        continue;
      }
      const double beta = static_cast<double>(start - 1);
      double signal = spec.profile(i)(tau) * std::pow(std::abs(t - beta), spec.a_true);
      if (spec.model == Model::model2) signal = spec.gamma_of(i) - signal;
      y(i) = signal;
    }
    m += (w / (static_cast<double>(n) * t_count)) * y * y.transpose();
  }
  return full_spectrum_oracle(m).back();
}

Eigen::MatrixXd to_counts(const Panel& panel) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(panel.n_units(), panel.n_periods());
  for (int i = 0; i < panel.n_units(); ++i) {
    for (int t = panel.starts[i]; t <= panel.n_periods(); ++t) {
      const double c = std::llround(std::exp(panel.values(i, t - 1)) - 1.0);
      counts(i, t - 1) = std::max(0.0, c);
    }
  }
  return counts;
}

Panel quantize_to_counts(const Panel& panel) {
  const Eigen::MatrixXd counts = to_counts(panel);
  Panel out = panel;
  for (int i = 0; i < panel.n_units(); ++i) {
    for (int t = panel.starts[i]; t <= panel.n_periods(); ++t) {
      out.values(i, t - 1) = std::log(counts(i, t - 1) + 1.0);
    }
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(const std::string& name, int line, const std::string& msg) {
  std::ostringstream os;
  os << name << ":" << line << ": " << msg;
  throw std::runtime_error(os.str());
}

double parse_num(const std::string& name, int line, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) fail_at(name, line, "trailing characters in number '" + tok + "'");
    return v;
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception&) {
    fail_at(name, line, "not a number: '" + tok + "'");
  }
}

GProfile parse_profile(const std::string& name, int line, const std::string& item) {
  const std::vector<std::string> f = split(trim(item), ':');
  const std::string& kind = f[0];
  auto need = [&](std::size_t n_params) {
    if (f.size() != n_params + 1) {
      fail_at(name, line, "profile '" + kind + "' expects " + std::to_string(n_params) +
                              " parameters");
    }
  };
  if (kind == "constant") {
    need(1);
    return GProfile::constant(parse_num(name, line, f[1]));
  }
  if (kind == "linear") {
    need(2);
    return GProfile::linear(parse_num(name, line, f[1]), parse_num(name, line, f[2]));
  }
  if (kind == "sinusoid") {
    need(3);
    return GProfile::sinusoid(parse_num(name, line, f[1]), parse_num(name, line, f[2]),
                              parse_num(name, line, f[3]));
  }
  if (kind == "vee") {
    need(3);
    return GProfile::vee(parse_num(name, line, f[1]), parse_num(name, line, f[2]),
                         parse_num(name, line, f[3]));
  }
  fail_at(name, line, "unknown profile kind '" + kind + "'");
}

} // namespace

SyntheticSpec parse_spec_config(const std::string& text, const std::string& name) {
  SyntheticSpec spec;
  spec.g_profiles.clear();
  spec.start_fractions.clear();

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail_at(name, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (value.empty()) fail_at(name, line, "empty value for '" + key + "'");

    if (key == "n_units") {
      spec.n_units = static_cast<int>(parse_num(name, line, value));
    } else if (key == "n_periods") {
      spec.n_periods = static_cast<int>(parse_num(name, line, value));
    } else if (key == "a") {
      spec.a_true = parse_num(name, line, value);
    } else if (key == "noise_sd") {
      spec.noise_sd = parse_num(name, line, value);
    } else if (key == "noise_law") {
      if (value == "gaussian") spec.noise_law = NoiseLaw::gaussian;
      else if (value == "none") spec.noise_law = NoiseLaw::none;
      else fail_at(name, line, "noise_law must be 'gaussian' or 'none'");
    } else if (key == "model") {
      if (value == "1") spec.model = Model::model1;
      else if (value == "2") spec.model = Model::model2;
      else fail_at(name, line, "model must be 1 or 2");
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_num(name, line, value));
    } else if (key == "starts") {
      if (value == "balanced") {
        spec.start_fractions = {0.0};
      } else {
        for (const std::string& tok : split(value, ',')) {
          spec.start_fractions.push_back(parse_num(name, line, trim(tok)));
        }
      }
    } else if (key == "profiles") {
      for (const std::string& item : split(value, ';')) {
        spec.g_profiles.push_back(parse_profile(name, line, item));
      }
    } else if (key == "gamma") {
      for (const std::string& tok : split(value, ',')) {
        spec.gamma.push_back(parse_num(name, line, trim(tok)));
      }
    } else {
      fail_at(name, line, "unknown key '" + key + "'");
    }
  }
  if (spec.g_profiles.empty()) spec.g_profiles = {GProfile::constant(1.0)};
  if (spec.start_fractions.empty()) spec.start_fractions = {0.0};
  spec.validate();
  return spec;
}

std::string spec_to_config(const SyntheticSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << "n_units = " << spec.n_units << "\n";
  os << "n_periods = " << spec.n_periods << "\n";
  os << "a = " << spec.a_true << "\n";
  os << "noise_sd = " << spec.noise_sd << "\n";
  os << "noise_law = " << (spec.noise_law == NoiseLaw::gaussian ? "gaussian" : "none") << "\n";
  os << "model = " << (spec.model == Model::model2 ? 2 : 1) << "\n";
  os << "seed = " << spec.seed << "\n";
  os << "starts = ";
  for (std::size_t i = 0; i < spec.start_fractions.size(); ++i) {
    if (i) os << ",";
    os << spec.start_fractions[i];
  }
  os << "\n";
  os << "profiles = ";
  for (std::size_t i = 0; i < spec.g_profiles.size(); ++i) {
    if (i) os << ";";
    const GProfile& p = spec.g_profiles[i];
    switch (p.kind) {
      case GProfile::Kind::constant: os << "constant:" << p.p0; break;
      case GProfile::Kind::linear: os << "linear:" << p.p0 << ":" << p.p1; break;
      case GProfile::Kind::sinusoid:
        os << "sinusoid:" << p.p0 << ":" << p.p1 << ":" << p.p2;
        break;
      case GProfile::Kind::vee: os << "vee:" << p.p0 << ":" << p.p1 << ":" << p.p2; break;
    }
  }
  os << "\n";
  if (!spec.gamma.empty()) {
    os << "gamma = ";
    for (std::size_t i = 0; i < spec.gamma.size(); ++i) {
      if (i) os << ",";
      os << spec.gamma[i];
    }
    os << "\n";
  }
  return os.str();
}

} // namespace paneltrend
