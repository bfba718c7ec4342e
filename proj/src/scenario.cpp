#include "pedflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pedflow/errors.hpp"
#include "pedflow/grid.hpp"

namespace pedflow {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError("missing key '" + where + key + "'");
  }
  return obj.at(key);
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigError("key '" + where + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number(obj, key, where);
}

Vec2 point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError("'" + where + "' must be a [x, y] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

Rect rect(const json& v, const std::string& where) {
  const std::string w = where + ".";
  return Rect{number(v, "x_min", w), number(v, "x_max", w), number(v, "y_min", w),
              number(v, "y_max", w)};
}

json to_json(const Rect& r) {
  return json{{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
}

json to_json(const Vec2& p) { return json::array({p.x, p.y}); }

RateMap rate_map(const json& v, const std::string& where) {
  RateMap m;
  m.default_value = number(v, "default", where + ".");
  if (v.contains("regions")) {
    std::size_t k = 0;
    for (const json& r : v.at("regions")) {
      const std::string w = where + ".regions[" + std::to_string(k++) + "]";
      RateRegion region;
      region.value = number(r, "value", w + ".");
      if (r.contains("disc")) {
        const json& d = r.at("disc");
        region.shape = Disc{point(require(d, "center", w + ".disc."), w + ".disc.center"),
                            number(d, "radius", w + ".disc.")};
      } else if (r.contains("slab_x")) {
        const json& s = r.at("slab_x");
        region.shape = SlabX{number(s, "x_min", w + ".slab_x."), number(s, "x_max", w + ".slab_x.")};
      } else if (r.contains("rect")) {
        region.shape = rect(r.at("rect"), w + ".rect");
      } else {
        throw ConfigError("'" + w + "' needs one of disc, slab_x, rect");
      }
      m.regions.push_back(std::move(region));
    }
  }
  return m;
}

struct ShapeToJson {
  json operator()(const Disc& d) const {
    return json{{"disc", {{"center", to_json(d.center)}, {"radius", d.radius}}}};
  }
  json operator()(const SlabX& s) const {
    return json{{"slab_x", {{"x_min", s.x_min}, {"x_max", s.x_max}}}};
  }
  json operator()(const Rect& r) const { return json{{"rect", to_json(r)}}; }
};

json to_json(const RateMap& m) {
  json regions = json::array();
  for (const RateRegion& r : m.regions) {
    json entry = std::visit(ShapeToJson{}, r.shape);
    entry["value"] = r.value;
    regions.push_back(std::move(entry));
  }
  return json{{"default", m.default_value}, {"regions", std::move(regions)}};
}

std::vector<double> number_list(const json& obj, const char* key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const json& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(std::string("key '") + key + "' must be an array");
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("key '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double Scenario::micro_dt() const {
  if (micro.dt) return *micro.dt;
  const double sup = rates.sup_bound();
  return sup > 0.0 ? std::min(0.01, 0.5 / sup) : 0.01;
}

void Scenario::validate() const {
  const ForceParams& f = forces;
  if (!(f.comfort_speed > 0.0)) throw ConfigError("forces.comfort_speed must be > 0");
  if (!(f.relaxation_time > 0.0)) throw ConfigError("forces.relaxation_time must be > 0");
  if (!(f.kernel.amplitude >= 0.0)) throw ConfigError("forces.kernel.amplitude must be >= 0");
  if (!(f.kernel.attraction_range > 0.0) || !(f.kernel.repulsion_range > 0.0)) {
    throw ConfigError("forces.kernel ranges must be > 0");
  }
  if (f.truncation_radius && !(*f.truncation_radius > 0.0)) {
    throw ConfigError("forces.truncation_radius must be > 0");
  }
  if (!(reflection.epsilon > 0.0)) throw ConfigError("reflection.epsilon must be > 0");
  rates.validate();

  const double dt = micro_dt();
  if (!(dt > 0.0)) throw ConfigError("micro.dt must be > 0");
  const double bound = dt * rates.sup_bound();
  if (bound > 1.0) {
    throw ConfigError("micro.dt * ||lambda||_inf = " + fmt(bound) +
                      " exceeds 1 (transition kernel is not a probability)");
  }
  if (micro.pedestrians < 1) throw ConfigError("micro.pedestrians must be >= 1");
  if (micro.replicates < 1) throw ConfigError("micro.replicates must be >= 1");

  if (!(initial.p_stop >= 0.0 && initial.p_stop <= 1.0)) {
    throw ConfigError("initial.p_stop = " + fmt(initial.p_stop) + " must lie in [0, 1]");
  }
  const Rect& r = initial.region;
  if (!(r.width() > 0.0) || !(r.height() > 0.0)) {
    throw ConfigError("initial.region must have positive area");
  }
  const double mass = initial.density * r.area();
  if (std::abs(mass - 1.0) > 1e-12) {
    throw ConfigError("initial mass density * area = " + fmt(mass) + " must equal 1");
  }
  const Rect& window = domain.bounds();
  if (!window.contains(r)) throw ConfigError("initial.region must lie inside the domain window");
  for (const Rect& o : domain.obstacles()) {
    if (r.x_min < o.x_max && o.x_min < r.x_max && r.y_min < o.y_max && o.y_min < r.y_max) {
      throw ConfigError("initial.region overlaps an obstacle");
    }
  }

  if (!(macro.cfl > 0.0 && macro.cfl <= 1.0)) throw ConfigError("macro.cfl must lie in (0, 1]");
  if (macro.max_dt && !(*macro.max_dt > 0.0)) throw ConfigError("macro.max_dt must be > 0");
  Grid(domain, macro.dx, macro.dy);

  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
  auto on_step_grid = [dt](double t) {
    const double n = std::round(t / dt);
    return std::abs(n * dt - t) <= 1e-9 * std::max(1.0, std::abs(t));
  };
  if (!on_step_grid(horizon)) throw ConfigError("horizon must be a multiple of micro.dt");
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    if (!(snapshots[k] >= 0.0 && snapshots[k] <= horizon)) {
      throw ConfigError("snapshot time " + fmt(snapshots[k]) + " outside [0, horizon]");
    }
    if (k > 0 && !(snapshots[k] > snapshots[k - 1])) {
      throw ConfigError("snapshot times must be strictly increasing");
    }
    if (!on_step_grid(snapshots[k])) {
      throw ConfigError("snapshot time " + fmt(snapshots[k]) + " is not a multiple of micro.dt");
    }
  }
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  Scenario s;
  try {
    s.name = root.value("name", std::string("scenario"));

    const json& dom = require(root, "domain", "");
    std::vector<Rect> obstacles;
    if (dom.contains("obstacles")) {
      std::size_t k = 0;
      for (const json& o : dom.at("obstacles")) {
        obstacles.push_back(rect(o, "domain.obstacles[" + std::to_string(k++) + "]"));
      }
    }
    s.domain = WalkableDomain(rect(require(dom, "window", "domain."), "domain.window"),
                              std::move(obstacles), dom.value("closed", false));

    if (root.contains("reflection")) s.reflection.epsilon = number(root.at("reflection"), "epsilon", "reflection.");

    const json& f = require(root, "forces", "");
    s.forces.comfort_speed = number(f, "comfort_speed", "forces.");
    s.forces.relaxation_time = number(f, "relaxation_time", "forces.");
    s.forces.destination = point(require(f, "destination", "forces."), "forces.destination");
    if (f.contains("kernel")) {
      const json& k = f.at("kernel");
      s.forces.kernel = MorseKernel{number(k, "amplitude", "forces.kernel."),
                                    number(k, "attraction_range", "forces.kernel."),
                                    number(k, "repulsion_range", "forces.kernel."),
                                    number(k, "offset", "forces.kernel.")};
    }
    s.forces.truncation_radius = optional_number(f, "truncation_radius", "forces.");

    const json& rates = require(root, "rates", "");
    s.rates.stopped = rate_map(require(rates, "stopped", "rates."), "rates.stopped");
    s.rates.walking = rate_map(require(rates, "walking", "rates."), "rates.walking");

    const json& init = require(root, "initial", "");
    s.initial.region = rect(require(init, "region", "initial."), "initial.region");
    s.initial.density = number(init, "density", "initial.");
    s.initial.p_stop = number(init, "p_stop", "initial.");

    const json& micro = require(root, "micro", "");
    const double n = number(micro, "pedestrians", "micro.");
    const double m = number(micro, "replicates", "micro.");
    if (n < 1 || m < 1 || n != std::floor(n) || m != std::floor(m)) {
      throw ConfigError("micro.pedestrians and micro.replicates must be positive integers");
    }
    s.micro.pedestrians = static_cast<std::size_t>(n);
    s.micro.replicates = static_cast<std::size_t>(m);
    s.micro.dt = optional_number(micro, "dt", "micro.");

    const json& macro = require(root, "macro", "");
    s.macro.dx = number(macro, "dx", "macro.");
    s.macro.dy = number(macro, "dy", "macro.");
    if (macro.contains("cfl")) s.macro.cfl = number(macro, "cfl", "macro.");
    s.macro.max_dt = optional_number(macro, "max_dt", "macro.");

    s.horizon = number(root, "horizon", "");
    s.snapshots = number_list(root, "snapshots");
    s.cuts = number_list(root, "cuts");
    const json& seed = require(root, "seed", "");
    if (!seed.is_number_unsigned()) throw ConfigError("key 'seed' must be an unsigned integer");
    s.seed = seed.get<std::uint64_t>();
    s.output = root.value("output", std::string("runs/") + s.name);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario type error: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string dump_scenario(const Scenario& s) {
  json obstacles = json::array();
  for (const Rect& o : s.domain.obstacles()) obstacles.push_back(to_json(o));
  json forces{{"comfort_speed", s.forces.comfort_speed},
              {"relaxation_time", s.forces.relaxation_time},
              {"destination", to_json(s.forces.destination)},
              {"kernel",
               {{"amplitude", s.forces.kernel.amplitude},
                {"attraction_range", s.forces.kernel.attraction_range},
                {"repulsion_range", s.forces.kernel.repulsion_range},
                {"offset", s.forces.kernel.offset}}}};
  if (s.forces.truncation_radius) forces["truncation_radius"] = *s.forces.truncation_radius;
  json micro{{"pedestrians", s.micro.pedestrians}, {"replicates", s.micro.replicates}};
  if (s.micro.dt) micro["dt"] = *s.micro.dt;
  json macro{{"dx", s.macro.dx}, {"dy", s.macro.dy}, {"cfl", s.macro.cfl}};
  if (s.macro.max_dt) macro["max_dt"] = *s.macro.max_dt;

  json root{
      {"name", s.name},
      {"domain",
       {{"window", to_json(s.domain.bounds())},
        {"obstacles", std::move(obstacles)},
        {"closed", s.domain.closed()}}},
      {"reflection", {{"epsilon", s.reflection.epsilon}}},
      {"forces", std::move(forces)},
      {"rates", {{"stopped", to_json(s.rates.stopped)}, {"walking", to_json(s.rates.walking)}}},
      {"initial",
       {{"region", to_json(s.initial.region)},
        {"density", s.initial.density},
        {"p_stop", s.initial.p_stop}}},
      {"micro", std::move(micro)},
      {"macro", std::move(macro)},
      {"horizon", s.horizon},
      {"snapshots", s.snapshots},
      {"cuts", s.cuts},
      {"seed", s.seed},
      {"output", s.output}};
  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file " + path.string());
  out << dump_scenario(scenario);
}

}  // namespace pedflow
