#include "yieldopt/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "yieldopt/errors.hpp"

namespace yieldopt {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) {
    parts.push_back(trim(part));
  }
  return parts;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::string source, std::map<std::string, Entry> entries)
      : source_(std::move(source)), entries_(std::move(entries)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const auto it = entries_.find(key);
    std::string where = source_;
    if (it != entries_.end()) {
      where += ":" + std::to_string(it->second.line);
    }
    throw ConfigError(where + ": " + key + ": " + why);
  }

  const Entry* find(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  double real(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? parse_real(key, e->value) : fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    const Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    const double v = parse_real(key, e->value);
    if (v < 0.0 || v != std::floor(v)) {
      fail(key, "expected a nonnegative integer, got '" + e->value + "'");
    }
    return static_cast<std::size_t>(v);
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    const Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    try {
      std::size_t used = 0;
      const auto v = std::stoull(e->value, &used);
      if (used != e->value.size() || e->value.front() == '-') {
        throw std::invalid_argument("trailing");
      }
      return v;
    } catch (const std::exception&) {
      fail(key, "expected an unsigned integer, got '" + e->value + "'");
    }
  }

  bool boolean(const std::string& key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) {
      return fallback;
    }
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(key, "expected true or false, got '" + e->value + "'");
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? unquote(e->value) : fallback;
  }

  Vector vector(const std::string& key, const Vector& fallback) const {
    const Entry* e = find(key);
    return e ? parse_vector(key, e->value) : fallback;
  }

  double parse_real(const std::string& key, const std::string& text) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) {
        throw std::invalid_argument("trailing");
      }
      return v;
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + text + "'");
    }
  }

  /// "[a, b, c]" or a bare scalar.
  Vector parse_vector(const std::string& key, const std::string& text) const {
    std::string body = trim(text);
    if (!body.empty() && body.front() == '[') {
      if (body.back() != ']') {
        fail(key, "unterminated list '" + text + "'");
      }
      body = body.substr(1, body.size() - 2);
    }
    if (trim(body).empty()) {
      return Vector();
    }
    const auto parts = split(body, ',');
    Vector v(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = parse_real(key, parts[i]);
    }
    return v;
  }

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"problem",
       {"kind", "width_mm", "chi_e", "chi_m", "db_floor", "deterministic", "normal", "offset",
        "deterministic_weights"}},
      {"uncertain", {"mean", "covariance", "truncation"}},
      {"spec", {"threshold", "grid"}},
      {"optimizer",
       {"sigma_max", "n_initial", "n_max", "max_iterations", "gradient_tolerance", "step_tolerance",
        "armijo_c1", "backtrack_factor", "max_backtracks", "angle_threshold", "max_step_norm", "fd_steps",
        "hybrid_gamma", "hybrid_initial_design", "hybrid_max_training",
        "hybrid_length_floor_uncertain", "hybrid_length_floor_deterministic",
        "nm_max_evaluations", "nm_diameter_tolerance", "seed", "strategies"}},
      {"output", {"dir", "plot"}},
  };
  return keys;
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::waveguide: return "waveguide";
    case ProblemKind::halfspace_oracle: return "halfspace-oracle";
    case ProblemKind::shifted_oracle: return "shifted-oracle";
  }
  return "unknown";
}

std::vector<double> parse_grid(const std::string& text) {
  std::string body = trim(unquote(trim(text)));
  double scale = 1.0;
  const auto space = body.find_first_of(" \t");
  if (space != std::string::npos) {
    const std::string unit = trim(body.substr(space));
    body = trim(body.substr(0, space));
    const double two_pi = 2.0 * std::numbers::pi;
    if (unit == "GHz") scale = two_pi * 1e9;
    else if (unit == "MHz") scale = two_pi * 1e6;
    else if (unit == "Hz") scale = two_pi;
    else if (unit == "rad/s") scale = 1.0;
    else throw ConfigurationError("unknown grid unit '" + unit + "'");
  }
  const auto parts = split(body, ':');
  if (parts.size() != 3) {
    throw ConfigurationError("grid must look like first:last:count [unit]");
  }
  const double first = std::stod(parts[0]);
  const double last = std::stod(parts[1]);
  const double count = std::stod(parts[2]);
  if (count < 1.0 || count != std::floor(count)) {
    throw ConfigurationError("grid point count must be a positive integer");
  }
  if (count > 1.0 && !(last > first)) {
    throw ConfigurationError("grid must be increasing");
  }
  return RangeGrid::equidistant(first * scale, last * scale, static_cast<std::size_t>(count)).points();
}

HarnessConfig parse_config(const std::string& text, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  const auto& keys = known_keys();
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(where + ": malformed section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!keys.contains(section)) {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError(where + ": key outside of any section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& allowed = keys.at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": " + section + "." + key + ": unknown key");
    }
    const std::string full = section + "." + key;
    if (entries.contains(full)) {
      throw ConfigError(where + ": " + full + ": duplicate key");
    }
    entries[full] = Entry{value, line_no};
  }

  Reader r(source, std::move(entries));
  HarnessConfig c;

  const std::string kind = r.text("problem.kind", "waveguide");
  if (kind == "waveguide") c.problem = ProblemKind::waveguide;
  else if (kind == "halfspace-oracle") c.problem = ProblemKind::halfspace_oracle;
  else if (kind == "shifted-oracle") c.problem = ProblemKind::shifted_oracle;
  else r.fail("problem.kind", "expected waveguide, halfspace-oracle or shifted-oracle");

  c.waveguide.width_mm = r.real("problem.width_mm", c.waveguide.width_mm);
  c.waveguide.chi_e = r.real("problem.chi_e", c.waveguide.chi_e);
  c.waveguide.chi_m = r.real("problem.chi_m", c.waveguide.chi_m);
  c.waveguide.db_floor = r.real("problem.db_floor", c.waveguide.db_floor);
  if (!(c.waveguide.width_mm > 0.0)) r.fail("problem.width_mm", "must be positive");

  const bool oracle = c.problem != ProblemKind::waveguide;
  Vector default_mean(2);
  default_mean << 9.0, 5.0;
  Vector default_det(2);
  default_det << 1.0, 1.0;
  c.mean = r.vector("uncertain.mean", oracle ? Vector::Zero(1) : default_mean);
  const auto np = c.mean.size();
  if (np == 0) r.fail("uncertain.mean", "must not be empty");

  c.initial_deterministic = r.vector("problem.deterministic",
                                     c.problem == ProblemKind::waveguide        ? default_det
                                     : c.problem == ProblemKind::shifted_oracle ? Vector::Zero(1)
                                                                                : Vector());
  c.oracle_normal = r.vector("problem.normal", Vector::Unit(np, 0));
  c.oracle_offset = r.real("problem.offset", 0.0);
  c.oracle_weights = r.vector("problem.deterministic_weights",
                              c.problem == ProblemKind::shifted_oracle ? Vector::Ones(c.initial_deterministic.size())
                                                                       : Vector());
  if (c.problem == ProblemKind::waveguide) {
    if (np != 2) r.fail("uncertain.mean", "waveguide expects two uncertain parameters");
    if (c.initial_deterministic.size() != 2) r.fail("problem.deterministic", "waveguide expects two entries");
  } else {
    if (c.oracle_normal.size() != np) r.fail("problem.normal", "must match uncertain.mean in length");
    if (std::abs(c.oracle_normal.norm() - 1.0) > 1e-12) r.fail("problem.normal", "must be a unit vector");
    if (c.problem == ProblemKind::halfspace_oracle && c.initial_deterministic.size() != 0) {
      r.fail("problem.deterministic", "halfspace-oracle has no deterministic variables");
    }
    if (c.problem == ProblemKind::shifted_oracle &&
        (c.initial_deterministic.size() == 0 || c.oracle_weights.size() != c.initial_deterministic.size())) {
      r.fail("problem.deterministic_weights", "need one weight per deterministic variable");
    }
  }

  if (const Entry* e = r.find("uncertain.covariance")) {
    std::string v = trim(e->value);
    if (v.rfind("diag(", 0) == 0 && v.back() == ')') {
      const Vector diag = r.parse_vector("uncertain.covariance", v.substr(5, v.size() - 6));
      if (diag.size() != np) r.fail("uncertain.covariance", "diag needs one entry per uncertain parameter");
      c.covariance = diag.asDiagonal();
    } else {
      const Vector flat = r.parse_vector("uncertain.covariance", v);
      if (flat.size() != np * np) r.fail("uncertain.covariance", "expected diag(...) or a row-major list of n*n entries");
      c.covariance = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), np, np);
    }
  } else {
    c.covariance = oracle ? Matrix::Identity(np, np) : Matrix(Vector::Constant(np, 0.81).asDiagonal());
  }
  const Vector trunc = r.vector("uncertain.truncation", Vector::Constant(1, oracle ? 8.0 : 3.0));
  if (trunc.size() == 1) c.truncation = Vector::Constant(np, trunc[0]);
  else if (trunc.size() == np) c.truncation = trunc;
  else r.fail("uncertain.truncation", "expected a scalar or one entry per uncertain parameter");
  try {
    UncertainSpec check(c.mean, c.covariance, c.truncation);
  } catch (const ConfigurationError& e) {
    r.fail(r.find("uncertain.covariance") ? "uncertain.covariance" : "uncertain.truncation", e.what());
  }

  c.threshold = r.real("spec.threshold", oracle ? c.oracle_offset : -24.0);
  if (const Entry* e = r.find("spec.grid")) {
    try {
      c.grid = parse_grid(e->value);
    } catch (const std::exception& ex) {
      r.fail("spec.grid", ex.what());
    }
  } else {
    c.grid = oracle ? std::vector<double>{0.0} : parse_grid("6.5:7.5:11 GHz");
  }

  OptimizerConfig& o = c.optimizer;
  o.sigma_max = r.real("optimizer.sigma_max", o.sigma_max);
  o.n_initial = r.count("optimizer.n_initial", o.n_initial);
  o.n_max = r.count("optimizer.n_max", o.n_max);
  o.max_iterations = r.count("optimizer.max_iterations", o.max_iterations);
  o.gradient_tolerance = r.real("optimizer.gradient_tolerance", o.gradient_tolerance);
  o.step_tolerance = r.real("optimizer.step_tolerance", o.step_tolerance);
  o.armijo_c1 = r.real("optimizer.armijo_c1", o.armijo_c1);
  o.backtrack_factor = r.real("optimizer.backtrack_factor", o.backtrack_factor);
  o.max_backtracks = r.count("optimizer.max_backtracks", o.max_backtracks);
  o.angle_threshold = r.real("optimizer.angle_threshold", o.angle_threshold);
  o.max_step_norm = r.real("optimizer.max_step_norm", o.max_step_norm);
  o.fd_steps = r.vector("optimizer.fd_steps", o.fd_steps);
  if (o.fd_steps.size() == 1 && c.initial_deterministic.size() > 1) {
    o.fd_steps = Vector::Constant(c.initial_deterministic.size(), o.fd_steps[0]);
  }
  if (o.fd_steps.size() > 0 && o.fd_steps.size() != c.initial_deterministic.size()) {
    r.fail("optimizer.fd_steps", "need a scalar or one step per deterministic variable");
  }
  o.hybrid.gamma = r.real("optimizer.hybrid_gamma", o.hybrid.gamma);
  o.hybrid.initial_design_size = r.count("optimizer.hybrid_initial_design", o.hybrid.initial_design_size);
  o.hybrid.max_training = r.count("optimizer.hybrid_max_training", o.hybrid.max_training);
  o.hybrid.uncertain_length_floor = r.real("optimizer.hybrid_length_floor_uncertain", o.hybrid.uncertain_length_floor);
  o.hybrid.deterministic_length_floor =
      r.real("optimizer.hybrid_length_floor_deterministic", o.hybrid.deterministic_length_floor);
  o.nm_max_evaluations = r.count("optimizer.nm_max_evaluations", o.nm_max_evaluations);
  o.nm_diameter_tolerance = r.real("optimizer.nm_diameter_tolerance", o.nm_diameter_tolerance);
  o.seed = r.unsigned64("optimizer.seed", o.seed);
  try {
    o.validate();
  } catch (const ConfigurationError& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    std::string field = msg.substr(0, colon);
    if (r.find(field)) {
      r.fail(field, msg.substr(colon + 2));
    }
    throw ConfigError(source + ": " + msg);
  }

  const std::string strategies = r.text("optimizer.strategies", "v1,v2,v3,v4");
  try {
    for (const auto& s : split(strategies, ',')) {
      c.strategies.push_back(parse_strategy(s));
    }
  } catch (const ConfigurationError& e) {
    r.fail("optimizer.strategies", e.what());
  }
  if (c.strategies.empty()) r.fail("optimizer.strategies", "must name at least one strategy");

  c.output_dir = r.text("output.dir", c.output_dir);
  c.write_plot = r.boolean("output.plot", c.write_plot);
  return c;
}

HarnessConfig validate_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path + ": cannot open config file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

YieldProblem HarnessConfig::build_problem() const {
  std::shared_ptr<const QoiModel> model;
  switch (problem) {
    case ProblemKind::waveguide:
      model = std::make_shared<WaveguideModel>(waveguide);
      break;
    case ProblemKind::halfspace_oracle:
      model = std::make_shared<HalfspaceOracle>(oracle_normal, oracle_offset);
      break;
    case ProblemKind::shifted_oracle:
      model = std::make_shared<HalfspaceOracle>(oracle_normal, oracle_offset, oracle_weights);
      break;
  }
  return YieldProblem{model, PerformanceSpec{threshold, RangeGrid(grid)},
                      UncertainSpec(mean, covariance, truncation), initial_deterministic};
}

std::string describe(const HarnessConfig& c) {
  std::ostringstream out;
  auto vec = [](const Vector& v) {
    std::ostringstream s;
    s << "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      s << (i ? ", " : "") << v[i];
    }
    s << "]";
    return s.str();
  };
  auto row = [&](const std::string& key, const std::string& value) {
    out << "  " << key << std::string(key.size() < 34 ? 34 - key.size() : 1, ' ') << value << "\n";
  };
  const OptimizerConfig& o = c.optimizer;
  out << "resolved configuration\n";
  row("problem.kind", to_string(c.problem));
  if (c.problem == ProblemKind::waveguide) {
    row("problem.width_mm", std::to_string(c.waveguide.width_mm));
    row("problem.chi_e", std::to_string(c.waveguide.chi_e));
    row("problem.chi_m", std::to_string(c.waveguide.chi_m));
    row("problem.db_floor", std::to_string(c.waveguide.db_floor));
  } else {
    row("problem.normal", vec(c.oracle_normal));
    row("problem.offset", std::to_string(c.oracle_offset));
    row("problem.deterministic_weights", vec(c.oracle_weights));
  }
  row("problem.deterministic", vec(c.initial_deterministic));
  row("uncertain.mean", vec(c.mean));
  row("uncertain.covariance (diag)", vec(c.covariance.diagonal()));
  row("uncertain.truncation", vec(c.truncation));
  row("spec.threshold", std::to_string(c.threshold));
  {
    std::ostringstream g;
    g << c.grid.size() << " points, " << c.grid.front() << " .. " << c.grid.back() << " rad/s";
    row("spec.grid", g.str());
  }
  row("optimizer.sigma_max", std::to_string(o.sigma_max));
  row("optimizer.n_initial", std::to_string(o.n_initial));
  row("optimizer.n_max", std::to_string(o.n_max));
  row("non-adaptive sample size N", std::to_string(non_adaptive_sample_size(o)));
  row("optimizer.max_iterations", std::to_string(o.max_iterations));
  row("optimizer.gradient_tolerance", std::to_string(o.gradient_tolerance));
  row("optimizer.step_tolerance", std::to_string(o.step_tolerance));
  row("optimizer.armijo_c1", std::to_string(o.armijo_c1));
  row("optimizer.backtrack_factor", std::to_string(o.backtrack_factor));
  row("optimizer.max_backtracks", std::to_string(o.max_backtracks));
  row("optimizer.angle_threshold", std::to_string(o.angle_threshold));
  row("optimizer.max_step_norm", std::to_string(o.max_step_norm));
  row("optimizer.fd_steps", o.fd_steps.size() ? vec(o.fd_steps) : "max(1e-3 |d|, 1e-3)");
  row("optimizer.hybrid_gamma", std::to_string(o.hybrid.gamma));
  row("optimizer.hybrid_initial_design", std::to_string(o.hybrid.initial_design_size));
  row("optimizer.hybrid_max_training", std::to_string(o.hybrid.max_training));
  row("optimizer.hybrid_length_floor_uncertain", std::to_string(o.hybrid.uncertain_length_floor));
  row("optimizer.hybrid_length_floor_deterministic", std::to_string(o.hybrid.deterministic_length_floor));
  row("optimizer.nm_max_evaluations", std::to_string(o.nm_max_evaluations));
  row("optimizer.nm_diameter_tolerance", std::to_string(o.nm_diameter_tolerance));
  row("optimizer.seed", std::to_string(o.seed));
  std::string names;
  for (Strategy s : c.strategies) {
    names += (names.empty() ? "" : ",") + strategy_name(s);
  }
  row("optimizer.strategies", names);
  row("output.dir", c.output_dir);
  row("output.plot", c.write_plot ? "true" : "false");
  return out.str();
}

}  // namespace yieldopt
