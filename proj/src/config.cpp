#include "imdp/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace imdp {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double to_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Vector to_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = to_double(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix to_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const Vector row = to_vector(j[static_cast<std::size_t>(r)], rp);
    if (r == 0) m.resize(rows, row.size());
    if (row.size() != m.cols() || row.size() == 0) fail(rp, "rows must have equal, nonzero length");
    m.row(r) = row.transpose();
  }
  return m;
}

template <typename T>
T to_unsigned(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
  return j.get<T>();
}

Box to_box(const json& j, const std::string& path) {
  return {to_vector(field(j, "lo", path), join(path, "lo")),
          to_vector(field(j, "hi", path), join(path, "hi"))};
}

NoiseSpec parse_noise(const json& j, const std::string& path) {
  NoiseSpec spec;
  const auto& kind = field(j, "kind", path);
  if (!kind.is_string()) fail(join(path, "kind"), "expected a string");
  spec.kind = kind.get<std::string>();
  if (spec.kind == "gaussian") {
    spec.mean = to_vector(field(j, "mean", path), join(path, "mean"));
    spec.covariance = to_matrix(field(j, "covariance", path), join(path, "covariance"));
  } else if (spec.kind == "uniform_box") {
    spec.lo = to_vector(field(j, "lo", path), join(path, "lo"));
    spec.hi = to_vector(field(j, "hi", path), join(path, "hi"));
  } else if (spec.kind == "triangular") {
    spec.lo = to_vector(field(j, "lo", path), join(path, "lo"));
    spec.mode = to_vector(field(j, "mode", path), join(path, "mode"));
    spec.hi = to_vector(field(j, "hi", path), join(path, "hi"));
  } else if (spec.kind == "mixture") {
    const auto& comps = field(j, "components", path);
    const std::string cp = join(path, "components");
    if (!comps.is_array() || comps.empty()) fail(cp, "expected a non-empty array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string ip = cp + "[" + std::to_string(i) + "]";
      spec.components.emplace_back(to_double(field(comps[i], "weight", ip), join(ip, "weight")),
                                   parse_noise(field(comps[i], "noise", ip), join(ip, "noise")));
    }
  } else {
    fail(join(path, "kind"), "unknown noise kind '" + spec.kind + "'");
  }
  return spec;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

json box_json(const Box& b) { return {{"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}}; }

json noise_json(const NoiseSpec& spec) {
  json j;
  j["kind"] = spec.kind;
  if (spec.kind == "gaussian") {
    j["mean"] = vector_json(spec.mean);
    j["covariance"] = matrix_json(spec.covariance);
  } else if (spec.kind == "uniform_box") {
    j["lo"] = vector_json(spec.lo);
    j["hi"] = vector_json(spec.hi);
  } else if (spec.kind == "triangular") {
    j["lo"] = vector_json(spec.lo);
    j["mode"] = vector_json(spec.mode);
    j["hi"] = vector_json(spec.hi);
  } else if (spec.kind == "mixture") {
    j["components"] = json::array();
    for (const auto& [w, c] : spec.components) {
      j["components"].push_back({{"weight", w}, {"noise", noise_json(c)}});
    }
  }
  return j;
}

void check_dim(Eigen::Index got, Eigen::Index want, const std::string& path) {
  if (got != want) {
    fail(path, "expected dimension " + std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace

NoiseModel make_noise(const NoiseSpec& spec) {
  if (spec.kind == "gaussian") return NoiseModel::gaussian(spec.mean, spec.covariance);
  if (spec.kind == "uniform_box") return NoiseModel::uniform_box(spec.lo, spec.hi);
  if (spec.kind == "triangular") return NoiseModel::triangular(spec.lo, spec.mode, spec.hi);
  if (spec.kind == "mixture") {
    std::vector<std::pair<double, NoiseModel>> comps;
    for (const auto& [w, c] : spec.components) comps.emplace_back(w, make_noise(c));
    return NoiseModel::mixture(std::move(comps));
  }
  throw InvalidArgument("unknown noise kind '" + spec.kind + "'");
}

LinearSystem make_system(const SystemSpec& spec) {
  return LinearSystem(spec.A, spec.B, spec.q, Box{spec.u_lo, spec.u_hi}, make_noise(spec.noise));
}

void validate_config(const ExperimentConfig& c) {
  const auto& s = c.system;
  const auto n = s.A.rows();
  if (n == 0 || s.A.cols() != n) fail("system.A", "must be a non-empty square matrix");
  check_dim(s.B.rows(), n, "system.B");
  if (s.B.cols() == 0) fail("system.B", "needs at least one column");
  check_dim(s.q.size(), n, "system.q");
  check_dim(s.u_lo.size(), s.B.cols(), "system.u_lo");
  check_dim(s.u_hi.size(), s.B.cols(), "system.u_hi");
  if ((s.u_lo.array() > s.u_hi.array()).any()) fail("system.u_lo", "must be <= u_hi");
  if (s.lift_steps < 1) fail("system.lift_steps", "must be >= 1");
  try {
    const NoiseModel noise = make_noise(s.noise);
    check_dim(noise.dim(), n, "system.noise");
  } catch (const InvalidArgument& e) {
    fail("system.noise", e.what());
  }

  const auto& p = c.partition;
  check_dim(p.lo.size(), n, "partition.lo");
  check_dim(p.hi.size(), n, "partition.hi");
  if ((p.lo.array() >= p.hi.array()).any()) fail("partition.lo", "must be < hi componentwise");
  check_dim(static_cast<Eigen::Index>(p.counts.size()), n, "partition.counts");
  for (std::size_t i = 0; i < p.counts.size(); ++i) {
    if (p.counts[i] == 0) fail("partition.counts[" + std::to_string(i) + "]", "must be positive");
  }
  for (const auto* list : {&p.goal, &p.critical}) {
    const std::string name = list == &p.goal ? "partition.goal" : "partition.critical";
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string bp = name + "[" + std::to_string(i) + "]";
      check_dim((*list)[i].lo.size(), n, bp + ".lo");
      check_dim((*list)[i].hi.size(), n, bp + ".hi");
      if (((*list)[i].lo.array() > (*list)[i].hi.array()).any()) fail(bp, "lo must be <= hi");
    }
  }
  for (std::size_t i = 0; i < p.goal.size(); ++i) {
    for (std::size_t k = 0; k < p.critical.size(); ++k) {
      if (p.goal[i].interior_intersects(p.critical[k])) {
        fail("partition.goal[" + std::to_string(i) + "]",
             "overlaps partition.critical[" + std::to_string(k) + "]");
      }
    }
  }

  const auto& a = c.abstraction;
  if (a.samples == 0) fail("abstraction.samples", "must be >= 1");
  if (!(a.beta > 0.0 && a.beta < 1.0)) fail("abstraction.beta", "must lie in (0, 1)");
  for (std::size_t i = 0; i < a.sweep.size(); ++i) {
    if (a.sweep[i] == 0) fail("abstraction.sweep[" + std::to_string(i) + "]", "must be >= 1");
    if (i > 0 && a.sweep[i] <= a.sweep[i - 1]) {
      fail("abstraction.sweep[" + std::to_string(i) + "]", "sweep must be strictly increasing");
    }
  }

  if (c.objective.horizon < 1) fail("objective.horizon", "must be >= 1");
  check_dim(c.objective.x0.size(), n, "objective.x0");
  if (c.validation.runs == 0) fail("validation.runs", "must be >= 1");
  if (c.validation.repetitions == 0) fail("validation.repetitions", "must be >= 1");
  if (c.workers == 0) fail("workers", "must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  if (auto it = root.find("name"); it != root.end() && it->is_string()) c.name = *it;

  const auto& sys = field(root, "system", "");
  c.system.A = to_matrix(field(sys, "A", "system"), "system.A");
  c.system.B = to_matrix(field(sys, "B", "system"), "system.B");
  c.system.q = sys.contains("q") ? to_vector(sys["q"], "system.q")
                                 : Vector::Zero(c.system.A.rows());
  c.system.u_lo = to_vector(field(sys, "u_lo", "system"), "system.u_lo");
  c.system.u_hi = to_vector(field(sys, "u_hi", "system"), "system.u_hi");
  if (sys.contains("lift_steps")) {
    c.system.lift_steps = static_cast<int>(to_unsigned<unsigned>(sys["lift_steps"], "system.lift_steps"));
  }
  c.system.noise = parse_noise(field(sys, "noise", "system"), "system.noise");

  const auto& part = field(root, "partition", "");
  c.partition.lo = to_vector(field(part, "lo", "partition"), "partition.lo");
  c.partition.hi = to_vector(field(part, "hi", "partition"), "partition.hi");
  const auto& counts = field(part, "counts", "partition");
  if (!counts.is_array()) fail("partition.counts", "expected an array");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    c.partition.counts.push_back(
        to_unsigned<std::size_t>(counts[i], "partition.counts[" + std::to_string(i) + "]"));
  }
  for (const char* key : {"goal", "critical"}) {
    const std::string base = std::string("partition.") + key;
    auto& list = std::string(key) == "goal" ? c.partition.goal : c.partition.critical;
    if (!part.contains(key)) continue;
    const auto& boxes = part[key];
    if (!boxes.is_array()) fail(base, "expected an array of boxes");
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      list.push_back(to_box(boxes[i], base + "[" + std::to_string(i) + "]"));
    }
  }

  const auto& abs = field(root, "abstraction", "");
  c.abstraction.samples = to_unsigned<std::size_t>(field(abs, "samples", "abstraction"),
                                                   "abstraction.samples");
  c.abstraction.beta = to_double(field(abs, "beta", "abstraction"), "abstraction.beta");
  if (abs.contains("seed")) c.abstraction.seed = to_unsigned<std::uint64_t>(abs["seed"], "abstraction.seed");
  if (abs.contains("sweep")) {
    const auto& sweep = abs["sweep"];
    if (!sweep.is_array()) fail("abstraction.sweep", "expected an array");
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      c.abstraction.sweep.push_back(
          to_unsigned<std::size_t>(sweep[i], "abstraction.sweep[" + std::to_string(i) + "]"));
    }
  }

  const auto& obj = field(root, "objective", "");
  c.objective.horizon =
      static_cast<int>(to_unsigned<unsigned>(field(obj, "horizon", "objective"), "objective.horizon"));
  c.objective.x0 = to_vector(field(obj, "x0", "objective"), "objective.x0");

  if (root.contains("validation")) {
    const auto& val = root["validation"];
    if (val.contains("runs")) c.validation.runs = to_unsigned<std::size_t>(val["runs"], "validation.runs");
    if (val.contains("repetitions")) {
      c.validation.repetitions = to_unsigned<std::size_t>(val["repetitions"], "validation.repetitions");
    }
    if (val.contains("seed")) c.validation.seed = to_unsigned<std::uint64_t>(val["seed"], "validation.seed");
    if (val.contains("traces")) c.validation.traces = to_unsigned<std::size_t>(val["traces"], "validation.traces");
  }
  if (root.contains("output")) {
    if (!root["output"].is_string()) fail("output", "expected a string");
    c.output = root["output"].get<std::string>();
  }
  if (root.contains("workers")) c.workers = to_unsigned<unsigned>(root["workers"], "workers");

  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json root;
  if (!c.name.empty()) root["name"] = c.name;
  root["system"] = {{"A", matrix_json(c.system.A)},
                    {"B", matrix_json(c.system.B)},
                    {"q", vector_json(c.system.q)},
                    {"u_lo", vector_json(c.system.u_lo)},
                    {"u_hi", vector_json(c.system.u_hi)},
                    {"lift_steps", c.system.lift_steps},
                    {"noise", noise_json(c.system.noise)}};
  json goal = json::array(), critical = json::array();
  for (const auto& b : c.partition.goal) goal.push_back(box_json(b));
  for (const auto& b : c.partition.critical) critical.push_back(box_json(b));
  root["partition"] = {{"lo", vector_json(c.partition.lo)},
                       {"hi", vector_json(c.partition.hi)},
                       {"counts", c.partition.counts},
                       {"goal", goal},
                       {"critical", critical}};
  root["abstraction"] = {{"samples", c.abstraction.samples},
                         {"sweep", c.abstraction.sweep},
                         {"beta", c.abstraction.beta},
                         {"seed", c.abstraction.seed}};
  root["objective"] = {{"horizon", c.objective.horizon}, {"x0", vector_json(c.objective.x0)}};
  root["validation"] = {{"runs", c.validation.runs},
                        {"repetitions", c.validation.repetitions},
                        {"seed", c.validation.seed},
                        {"traces", c.validation.traces}};
  root["output"] = c.output;
  root["workers"] = c.workers;
  return root.dump(2) + "\n";
}

}  // namespace imdp
