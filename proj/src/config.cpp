// SPDX-License-Identifier: Apache-2.0
#include "ilac/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ilac {

namespace {

class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) throw ConfigError(label() + ": expected a mapping");
  }

  bool has(const std::string& key) const { return node_[key].IsDefined() && !node_[key].IsNull(); }

  YAML::Node get(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError(child(key) + ": required key is missing");
    return node_[key];
  }

  template <typename T>
  T scalar(const std::string& key) {
    YAML::Node n = get(key);
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(child(key) + ": invalid value");
    }
  }

  template <typename T>
  T scalar_or(const std::string& key, T fallback) {
    seen_.insert(key);
    return has(key) ? scalar<T>(key) : fallback;
  }

  template <typename T>
  std::vector<T> list(const std::string& key) {
    YAML::Node n = get(key);
    if (!n.IsSequence()) throw ConfigError(child(key) + ": expected a list");
    std::vector<T> out;
    try {
      for (const auto& e : n) out.push_back(e.as<T>());
    } catch (const YAML::Exception&) {
      throw ConfigError(child(key) + ": invalid list entry");
    }
    return out;
  }

  template <typename T>
  std::vector<T> list_or(const std::string& key, std::vector<T> fallback) {
    seen_.insert(key);
    return has(key) ? list<T>(key) : fallback;
  }

  template <typename T, std::size_t N>
  std::array<T, N> fixed(const std::string& key) {
    auto v = list<T>(key);
    if (v.size() != N)
      throw ConfigError(child(key) + ": expected " + std::to_string(N) + " entries");
    std::array<T, N> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return a;
  }

  void finish() const {
    for (const auto& kv : node_) {
      auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(child(key) + ": unknown key");
    }
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string label() const { return path_.empty() ? "<root>" : path_; }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

std::array<std::array<double, 3>, 3> parse_orientation(Section& s, const std::string& path) {
  YAML::Node n = s.get("orientation");
  std::array<std::array<double, 3>, 3> o{};
  if (!n.IsSequence() || n.size() != 3) throw ConfigError(path + ".orientation: expected 3 rows");
  for (std::size_t r = 0; r < 3; ++r) {
    if (!n[r].IsSequence() || n[r].size() != 3)
      throw ConfigError(path + ".orientation: expected 3 columns per row");
    for (std::size_t c = 0; c < 3; ++c) {
      try {
        o[r][c] = n[r][c].as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError(path + ".orientation: invalid entry");
      }
    }
  }
  Pose p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.orientation(r, c) = o[r][c];
  try {
    p.validate(1e-9);
  } catch (const InvalidArgument& e) {
    throw ConfigError(path + ".orientation: not a rotation matrix (" + e.what() + ")");
  }
  return o;
}

void parse_node(const YAML::Node& n, const std::string& path, NodeConfig& out,
                std::vector<double>* kappa = nullptr) {
  Section s(n, path);
  out.position = s.fixed<double, 3>("position");
  out.orientation = parse_orientation(s, path);
  out.array = s.fixed<int, 2>("array");
  require(out.array[0] >= 1 && out.array[1] >= 1, path + ".array: dimensions must be >= 1");
  if (kappa) *kappa = s.list<double>("kappa");
  s.finish();
}

Pose to_pose(const NodeConfig& n) {
  Pose p;
  p.position = Vec3(n.position[0], n.position[1], n.position[2]);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.orientation(r, c) = n.orientation[r][c];
  return p;
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

template <typename T>
std::string seq(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>)
      s += num(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s + "]";
}

template <typename T, std::size_t N>
std::string seq(const std::array<T, N>& a) {
  return seq(std::vector<T>(a.begin(), a.end()));
}

void emit_node(std::ostringstream& os, const NodeConfig& n, const std::string& indent, bool item) {
  os << indent << (item ? "- " : "  ") << "position: " << seq(n.position) << "\n";
  std::string in = indent + "  ";
  os << in << "orientation: [" << seq(n.orientation[0]) << ", " << seq(n.orientation[1]) << ", "
     << seq(n.orientation[2]) << "]\n";
  os << in << "array: " << seq(n.array) << "\n";
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed scenario file: ") + e.what());
  }
  static const char* kRequired[] = {"schema_version", "rf",     "power",  "bs",
                                    "ris",            "ue",     "direct_link", "timing",
                                    "uncertainty"};
  if (!root.IsDefined() || root.IsNull() || (root.IsMap() && root.size() == 0)) {
    std::string msg = "scenario file is empty; required keys:";
    for (const char* k : kRequired) msg += std::string(" ") + k;
    throw ConfigError(msg);
  }
  Section top(root, "");
  std::string missing;
  for (const char* k : kRequired)
    if (!top.has(k)) missing += std::string(" ") + k;
  if (!missing.empty()) throw ConfigError("missing required keys:" + missing);

  ScenarioConfig c;
  c.schema_version = top.scalar<int>("schema_version");
  require(c.schema_version == 1, "schema_version: unsupported version " +
                                     std::to_string(c.schema_version));
  {
    Section s(top.get("rf"), "rf");
    c.carrier_hz = s.scalar<double>("carrier_hz");
    c.tx_gain = s.scalar<double>("tx_gain");
    c.rx_gain = s.scalar<double>("rx_gain");
    c.cell_gain = s.scalar<double>("cell_gain");
    c.pattern_q = s.scalar<double>("pattern_q");
    c.pathloss_alpha = s.scalar<double>("pathloss_alpha");
    c.noise_figure_db = s.scalar<double>("noise_figure_db");
    c.noise_density_dbm_hz = s.scalar<double>("noise_density_dbm_hz");
    c.bandwidth_hz = s.scalar<double>("bandwidth_hz");
    c.spacing_wavelengths = s.scalar_or<double>("spacing_wavelengths", 0.5);
    s.finish();
    require(c.carrier_hz > 0, "rf.carrier_hz: must be positive");
    require(c.tx_gain > 0 && c.rx_gain > 0 && c.cell_gain > 0, "rf: gains must be positive");
    require(c.pattern_q > 0, "rf.pattern_q: must be positive");
    require(c.pathloss_alpha >= 2, "rf.pathloss_alpha: must be >= 2");
    require(c.bandwidth_hz > 0, "rf.bandwidth_hz: must be positive");
    require(c.spacing_wavelengths > 0, "rf.spacing_wavelengths: must be positive");
  }
  {
    Section s(top.get("power"), "power");
    c.total_power_w = s.scalar<double>("total_w");
    s.finish();
    require(c.total_power_w > 0, "power.total_w: must be positive");
  }
  parse_node(top.get("bs"), "bs", c.bs);
  {
    YAML::Node n = top.get("ris");
    require(n.IsSequence(), "ris: expected a list");
    for (std::size_t k = 0; k < n.size(); ++k) {
      NodeConfig r;
      parse_node(n[k], "ris[" + std::to_string(k) + "]", r);
      c.ris.push_back(r);
    }
  }
  {
    YAML::Node n = top.get("ue");
    require(n.IsSequence() && n.size() > 0, "ue: expected a non-empty list");
    for (std::size_t i = 0; i < n.size(); ++i) {
      UeConfig u;
      std::string path = "ue[" + std::to_string(i) + "]";
      parse_node(n[i], path, u, &u.kappa);
      require(u.kappa.size() == c.ris.size(), path + ".kappa: one Rician factor per RIS required");
      for (double k : u.kappa) require(k >= 0, path + ".kappa: must be non-negative");
      c.ue.push_back(u);
    }
  }
  {
    Section s(top.get("direct_link"), "direct_link");
    c.direct_nlos_pathloss_db = s.scalar<double>("nlos_pathloss_db");
    s.finish();
  }
  {
    Section s(top.get("timing"), "timing");
    c.location_interval_s = s.scalar<double>("location_interval_s");
    c.coherence_time_s = s.scalar<double>("coherence_time_s");
    s.finish();
    require(c.coherence_time_s > 0 && c.location_interval_s >= c.coherence_time_s,
            "timing: need 0 < coherence_time_s <= location_interval_s");
  }
  {
    Section s(top.get("uncertainty"), "uncertainty");
    c.planar = s.scalar<bool>("planar");
    c.prior_variance = s.fixed<double, 3>("prior_variance");
    c.step_std = s.fixed<double, 3>("step_std_m");
    s.finish();
    for (int d = 0; d < 3; ++d) {
      require(c.prior_variance[d] >= 0, "uncertainty.prior_variance: must be non-negative");
      require(c.step_std[d] >= 0, "uncertainty.step_std_m: must be non-negative");
    }
    if (c.planar)
      require(c.step_std[2] == 0 && c.prior_variance[2] == 0,
              "uncertainty: planar scenarios need zero z variance");
  }
  if (top.has("algorithms")) {
    Section s(top.get("algorithms"), "algorithms");
    c.marginal_samples = s.scalar_or<int>("marginal_samples", c.marginal_samples);
    c.ensemble_positions = s.scalar_or<int>("ensemble_positions", c.ensemble_positions);
    c.ensemble_nlos = s.scalar_or<int>("ensemble_nlos", c.ensemble_nlos);
    c.phase1_pool_slots = s.scalar_or<int>("phase1_pool_slots", c.phase1_pool_slots);
    c.ris_max_iterations = s.scalar_or<int>("ris_max_iterations", c.ris_max_iterations);
    c.ris_rel_tol = s.scalar_or<double>("ris_rel_tol", c.ris_rel_tol);
    c.wmmse_max_iterations = s.scalar_or<int>("wmmse_max_iterations", c.wmmse_max_iterations);
    c.wmmse_rel_tol = s.scalar_or<double>("wmmse_rel_tol", c.wmmse_rel_tol);
    s.finish();
    require(c.marginal_samples >= 1 && c.ensemble_positions >= 1 && c.ensemble_nlos >= 1,
            "algorithms: sample counts must be >= 1");
    require(c.phase1_pool_slots >= 2 && c.phase1_pool_slots % 2 == 0,
            "algorithms.phase1_pool_slots: must be even and >= 2");
    require(c.ris_max_iterations >= 1 && c.wmmse_max_iterations >= 1,
            "algorithms: iteration limits must be >= 1");
  }
  if (top.has("experiments")) {
    Section s(top.get("experiments"), "experiments");
    ExperimentSettings& e = c.experiments;
    e.runs = s.scalar_or<int>("runs", e.runs);
    e.kappas = s.list_or<double>("kappas", e.kappas);
    e.peb_pilots = s.list_or<int>("peb_pilots", e.peb_pilots);
    e.scheme_pilots = s.list_or<int>("scheme_pilots", e.scheme_pilots);
    e.outage_probability = s.scalar_or<double>("outage_probability", e.outage_probability);
    e.mobility_pilots = s.scalar_or<int>("mobility_pilots", e.mobility_pilots);
    e.mobility_times = s.list_or<double>("mobility_times_s", e.mobility_times);
    e.chest_phase1_pilots = s.scalar_or<int>("chest_phase1_pilots", e.chest_phase1_pilots);
    e.chest_phase2_pilots = s.list_or<int>("chest_phase2_pilots", e.chest_phase2_pilots);
    e.effective_phase1_pilots =
        s.scalar_or<int>("effective_phase1_pilots", e.effective_phase1_pilots);
    e.effective_phase2_pilots = s.list_or<int>("effective_phase2_pilots", e.effective_phase2_pilots);
    e.effective_kappas = s.list_or<double>("effective_kappas", e.effective_kappas);
    s.finish();
    require(e.runs >= 1, "experiments.runs: must be >= 1");
    require(e.outage_probability > 0 && e.outage_probability < 1,
            "experiments.outage_probability: must be in (0, 1)");
    auto even = [](const std::vector<int>& v) {
      for (int x : v)
        if (x <= 0 || x % 2) return false;
      return true;
    };
    require(even(e.peb_pilots) && even(e.scheme_pilots) && e.mobility_pilots > 0 &&
                e.mobility_pilots % 2 == 0 && e.chest_phase1_pilots > 0 &&
                e.chest_phase1_pilots % 2 == 0 && e.effective_phase1_pilots > 0 &&
                e.effective_phase1_pilots % 2 == 0,
            "experiments: phase-1 pilot counts must be positive and even");
    for (int x : e.chest_phase2_pilots) require(x >= 1, "experiments.chest_phase2_pilots: must be >= 1");
    for (int x : e.effective_phase2_pilots)
      require(x >= 1, "experiments.effective_phase2_pilots: must be >= 1");
  }
  top.finish();
  // Cross-checks that need the derived scenario.
  try {
    c.build_scenario().validate();
    c.timing().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  return c;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

Scenario ScenarioConfig::build_scenario() const {
  Scenario sc;
  sc.rf.carrier_hz = carrier_hz;
  sc.rf.wavelength = 299792458.0 / carrier_hz;
  sc.rf.tx_gain = tx_gain;
  sc.rf.rx_gain = rx_gain;
  sc.rf.cell_gain = cell_gain;
  sc.rf.pattern_q = pattern_q;
  sc.rf.pathloss_alpha = pathloss_alpha;
  sc.rf.noise_variance = noise_variance_watts(noise_figure_db, noise_density_dbm_hz, bandwidth_hz);
  sc.bandwidth_hz = bandwidth_hz;
  sc.total_power = total_power_w;
  sc.planar = planar;
  const double d = spacing_wavelengths * sc.rf.wavelength;
  sc.bs = to_pose(bs);
  sc.bs_layout = ArrayLayout(bs.array[0], bs.array[1], d);
  for (const auto& r : ris) sc.ris.push_back({to_pose(r), ArrayLayout(r.array[0], r.array[1], d)});
  const double direct = std::pow(10.0, -direct_nlos_pathloss_db / 10.0);
  for (const auto& u : ue) {
    UeNode n;
    n.pose = to_pose(u);
    n.layout = ArrayLayout(u.array[0], u.array[1], d);
    n.kappa = u.kappa;
    n.direct_nlos_variance = direct;
    n.power_budget = total_power_w / static_cast<double>(ue.size());
    sc.ue.push_back(n);
  }
  return sc;
}

FrameTiming ScenarioConfig::timing() const {
  FrameTiming t;
  t.location_interval = location_interval_s;
  t.coherence_time = coherence_time_s;
  t.bandwidth = bandwidth_hz;
  t.phase1_slots = experiments.effective_phase1_pilots;
  t.phase2_slots = 0;
  return t;
}

PipelineOptions ScenarioConfig::pipeline(int workers) const {
  PipelineOptions o;
  o.marginal_samples = marginal_samples;
  o.ensemble_positions = ensemble_positions;
  o.ensemble_nlos = ensemble_nlos;
  o.phase1_pool_slots = phase1_pool_slots;
  o.prior_cov = Vec3(prior_variance[0], prior_variance[1], prior_variance[2]).asDiagonal();
  o.step_cov = Vec3(step_std[0] * step_std[0], step_std[1] * step_std[1],
                    step_std[2] * step_std[2]).asDiagonal();
  o.ris.max_iterations = ris_max_iterations;
  o.ris.rel_tol = ris_rel_tol;
  o.ris.workers = workers;
  o.wmmse.max_iterations = wmmse_max_iterations;
  o.wmmse.rel_tol = wmmse_rel_tol;
  return o;
}

std::string effective_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "schema_version: " << c.schema_version << "\n";
  os << "rf:\n"
     << "  carrier_hz: " << num(c.carrier_hz) << "\n"
     << "  tx_gain: " << num(c.tx_gain) << "\n"
     << "  rx_gain: " << num(c.rx_gain) << "\n"
     << "  cell_gain: " << num(c.cell_gain) << "\n"
     << "  pattern_q: " << num(c.pattern_q) << "\n"
     << "  pathloss_alpha: " << num(c.pathloss_alpha) << "\n"
     << "  noise_figure_db: " << num(c.noise_figure_db) << "\n"
     << "  noise_density_dbm_hz: " << num(c.noise_density_dbm_hz) << "\n"
     << "  bandwidth_hz: " << num(c.bandwidth_hz) << "\n"
     << "  spacing_wavelengths: " << num(c.spacing_wavelengths) << "\n";
  os << "power:\n  total_w: " << num(c.total_power_w) << "\n";
  os << "bs:\n";
  emit_node(os, c.bs, "", false);
  os << "ris:\n";
  for (const auto& r : c.ris) emit_node(os, r, "  ", true);
  os << "ue:\n";
  for (const auto& u : c.ue) {
    emit_node(os, u, "  ", true);
    os << "    kappa: " << seq(u.kappa) << "\n";
  }
  os << "direct_link:\n  nlos_pathloss_db: " << num(c.direct_nlos_pathloss_db) << "\n";
  os << "timing:\n"
     << "  location_interval_s: " << num(c.location_interval_s) << "\n"
     << "  coherence_time_s: " << num(c.coherence_time_s) << "\n";
  os << "uncertainty:\n"
     << "  planar: " << (c.planar ? "true" : "false") << "\n"
     << "  prior_variance: " << seq(c.prior_variance) << "\n"
     << "  step_std_m: " << seq(c.step_std) << "\n";
  os << "algorithms:\n"
     << "  marginal_samples: " << c.marginal_samples << "\n"
     << "  ensemble_positions: " << c.ensemble_positions << "\n"
     << "  ensemble_nlos: " << c.ensemble_nlos << "\n"
     << "  phase1_pool_slots: " << c.phase1_pool_slots << "\n"
     << "  ris_max_iterations: " << c.ris_max_iterations << "\n"
     << "  ris_rel_tol: " << num(c.ris_rel_tol) << "\n"
     << "  wmmse_max_iterations: " << c.wmmse_max_iterations << "\n"
     << "  wmmse_rel_tol: " << num(c.wmmse_rel_tol) << "\n";
  const ExperimentSettings& e = c.experiments;
  os << "experiments:\n"
     << "  runs: " << e.runs << "\n"
     << "  kappas: " << seq(e.kappas) << "\n"
     << "  peb_pilots: " << seq(e.peb_pilots) << "\n"
     << "  scheme_pilots: " << seq(e.scheme_pilots) << "\n"
     << "  outage_probability: " << num(e.outage_probability) << "\n"
     << "  mobility_pilots: " << e.mobility_pilots << "\n"
     << "  mobility_times_s: " << seq(e.mobility_times) << "\n"
     << "  chest_phase1_pilots: " << e.chest_phase1_pilots << "\n"
     << "  chest_phase2_pilots: " << seq(e.chest_phase2_pilots) << "\n"
     << "  effective_phase1_pilots: " << e.effective_phase1_pilots << "\n"
     << "  effective_phase2_pilots: " << seq(e.effective_phase2_pilots) << "\n"
     << "  effective_kappas: " << seq(e.effective_kappas) << "\n";
  return os.str();
}

}  // namespace ilac
