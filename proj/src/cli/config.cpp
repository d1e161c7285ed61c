#include "cvqdyn/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "cvqdyn/cli/output.hpp"

namespace cvq::cli {

namespace {

Field num(std::string key, std::string unit, std::string doc, std::string fallback = "", bool positive = false) {
  Field f;
  f.key = std::move(key);
  f.unit = std::move(unit);
  f.doc = std::move(doc);
  f.fallback = std::move(fallback);
  f.required = f.fallback.empty();
  f.positive = positive;
  return f;
}

Field pos(std::string key, std::string unit, std::string doc, std::string fallback = "") {
  return num(std::move(key), std::move(unit), std::move(doc), std::move(fallback), true);
}

Field opt(std::string key, std::string unit, std::string doc, bool positive = true) {
  Field f = num(std::move(key), std::move(unit), std::move(doc), "", positive);
  f.required = false;
  return f;
}

Field list(std::string key, std::string unit, std::string doc, std::string fallback = "", bool positive = true) {
  Field f = num(std::move(key), std::move(unit), std::move(doc), std::move(fallback), positive);
  f.type = FieldType::NumberList;
  return f;
}

Field integer(std::string key, std::string doc, std::string fallback) {
  Field f = pos(std::move(key), "1", std::move(doc), std::move(fallback));
  f.type = FieldType::Integer;
  return f;
}

Field choice(std::string key, std::string doc, std::string fallback, std::vector<std::string> choices) {
  Field f = num(std::move(key), "", std::move(doc), "\"" + fallback + "\"");
  f.type = FieldType::String;
  f.choices = std::move(choices);
  return f;
}

Field flag(std::string key, std::string doc, std::string fallback) {
  Field f = num(std::move(key), "", std::move(doc), std::move(fallback));
  f.type = FieldType::Bool;
  return f;
}

Field stencil() { return choice("solver.stencil", "finite-difference stencil", "penta", {"tri", "penta"}); }

std::vector<Field> collision_fields(const std::string& dx, const std::string& dt, const std::string& cadence) {
  return {
      pos("physics.Z_P", "e", "projectile charge", "2"),
      pos("physics.Z_T", "e", "target charge", "79"),
      pos("physics.mass", "MeV/c^2", "projectile rest energy", "3727.3794066"),
      pos("physics.L", "fm", "launch distance"),
      pos("physics.T0", "MeV", "initial kinetic energy"),
      list("physics.sigma", "fm", "initial position spread; an array runs a sweep"),
      pos("solver.dx", "fm", "grid spacing", dx),
      pos("solver.dt", "fm/c", "time step", dt),
      integer("solver.cadence", "steps between observations", cadence),
      stencil(),
  };
}

std::vector<Schema> build() {
  std::vector<Schema> out;
  const Field tier = choice("tier", "required run tier", "fast", {"fast", "slow"});
  const Field units_dimless = choice("units", "unit system", "dimensionless", {"dimensionless"});
  const Field units_natural = choice("units", "unit system", "natural", {"natural"});
  const Field units_si = choice("units", "unit system", "SI", {"SI"});

  out.push_back({"evolve", "single Gaussian packet, free or in a harmonic trap", "dimensionless",
                 {tier, units_dimless, pos("physics.mass", "m", "particle mass", "1"),
                  pos("physics.hbar", "hbar", "Planck constant", "1"), pos("physics.sigma", "length", "initial spread"),
                  num("physics.x0", "length", "initial centre", "0"), num("physics.p0", "momentum", "mean momentum", "0"),
                  num("physics.omega", "1/time", "trap frequency, 0 for free motion", "0"),
                  pos("physics.t_end", "time", "final time"), pos("solver.dx", "length", "grid spacing", "0.05"),
                  pos("solver.dt", "time", "time step", "0.01"), integer("solver.cadence", "steps between rows", "100"),
                  stencil(), opt("solver.half_width", "length", "grid half-width about the path; automatic if absent")},
                 {}});

  out.push_back({"box", "Gaussian packet between hard walls at 0 and width", "dimensionless",
                 {tier, units_dimless, pos("physics.mass", "m", "particle mass", "1"),
                  pos("physics.hbar", "hbar", "Planck constant", "1"), pos("physics.width", "length", "box width"),
                  pos("physics.sigma", "length", "initial spread"),
                  opt("physics.x0", "length", "initial centre; the box middle if absent"),
                  num("physics.p0", "momentum", "mean momentum", "0"), pos("physics.t_end", "time", "final time"),
                  pos("solver.dx", "length", "grid spacing", "0.05"), pos("solver.dt", "time", "time step", "0.01"),
                  integer("solver.cadence", "steps between rows", "100"), stencil()},
                 {}});

  {
    Schema s{"rutherford", "head-on Coulomb collision of a Gaussian projectile", "natural",
             collision_fields("0.2", "1", "20"), {}};
    s.fields.insert(s.fields.begin(), {tier, units_natural});
    s.fields.push_back(choice("physics.mode", "fixed target or two colliding packets", "target",
                              {"target", "colliding"}));
    s.fields.push_back(flag("physics.run_to_return", "continue until the packet is back at the launch point", "false"));
    s.fields.push_back(pos("solver.regrid_safety", "sigma", "minimum box half-width", "7"));
    s.fields.push_back(pos("solver.regrid_half_width", "sigma", "box half-width after a regrid", "10"));
    s.fields.push_back(pos("checks.energy_tol", "1", "allowed peak relative energy error", "1e-6"));
    out.push_back(std::move(s));
  }
  {
    Schema s{"tunneling", "dynamical tunneling through the truncated Coulomb barrier", "natural",
             collision_fields("0.2", "100", "10"), {}};
    s.fields.insert(s.fields.begin(), {tier, units_natural});
    s.fields.push_back(pos("physics.l", "fm", "barrier cut", "25"));
    s.fields.push_back(flag("physics.barrier", "false removes the potential for a reference run", "true"));
    s.fields.push_back(pos("physics.sigma_min", "fm",
                           "smallest accepted spread; cost grows roughly as 1/sigma^2 below ~10 fm", "5"));
    s.fields.push_back(pos("solver.absorber_width", "fm", "absorbing layer width", "300"));
    s.fields.push_back(pos("solver.well_margin", "fm", "distance from the cut to the absorber", "200"));
    s.fields.push_back(pos("solver.flux_tol", "1", "flux per step counted as settled", "1e-12"));
    s.fields.push_back(integer("solver.flux_samples", "consecutive settled steps", "100"));
    s.fields.push_back(integer("solver.max_steps", "step budget", "2000000"));
    out.push_back(std::move(s));
  }

  const std::vector<Field> material = {
      choice("physics.material", "sphere material", "osmium", {"osmium", "silica", "custom"}),
      opt("physics.density", "kg/m^3", "density for material = custom"),
      opt("physics.mass", "kg", "sphere mass"),
      opt("physics.R0", "m", "sphere radius"),
      pos("physics.L_over_R0", "R0", "centre separation in radii", "2.5"),
  };
  {
    Schema s{"entangle-gaussian", "closed-form entanglement of two Gaussian masses", "SI", {tier, units_si}, {}};
    s.fields.insert(s.fields.end(), material.begin(), material.end());
    s.fields.push_back(opt("physics.sigma", "m", "initial spread of each mass"));
    s.fields.push_back(opt("physics.omega0", "rad/s", "trap frequency preparing the initial state"));
    s.fields.push_back(choice("physics.interaction", "coupling", "newtonian",
                              {"newtonian", "mond", "casimir", "newtonian+casimir"}));
    s.fields.push_back(opt("physics.omega", "rad/s", "coupling frequency; overrides the interaction"));
    s.fields.push_back(flag("physics.trapped", "keep the traps on during the evolution", "false"));
    s.fields.push_back(num("physics.temperature", "K", "initial temperature", "0"));
    s.fields.push_back(pos("physics.t_end", "s", "final time"));
    s.fields.push_back(integer("physics.samples", "rows", "101"));
    s.one_of = {{"physics.mass", "physics.R0"}, {"physics.sigma", "physics.omega0"}};
    out.push_back(std::move(s));
  }
  out.push_back({"entangle-numeric", "order-N reduced-mass evolution and entanglement", "dimensionless",
                 {tier, units_dimless, pos("physics.mass", "m", "mass of each particle", "1"),
                  pos("physics.hbar", "hbar", "Planck constant", "1"), pos("physics.sigma", "length", "initial spread"),
                  pos("physics.omega", "1/time", "coupling frequency of the attractive 1/r potential"),
                  pos("physics.L", "length", "separation"),
                  list("physics.p0", "momentum", "relative approach momentum; an array runs a sweep", "0", false),
                  integer("physics.order", "expansion order N", "2"), num("physics.P_com", "momentum", "pair boost", "0"),
                  pos("physics.t_end", "time", "final time"), pos("solver.dx", "length", "grid spacing", "0.02"),
                  pos("solver.dt", "time", "time step", "5e-4"), integer("solver.cadence", "steps between rows", "40"),
                  stencil(), opt("solver.half_width", "length", "relative grid half-width; automatic if absent"),
                  flag("solver.schmidt", "also compute the Schmidt entropy", "false"),
                  integer("solver.schmidt_every", "rows between Schmidt decompositions", "1"),
                  pos("solver.schmidt_tol", "1", "retained Schmidt weight 1 - tol", "1e-7")},
                 {}});
  {
    Schema s{"mond-compare", "Newtonian against MOND entanglement with thermal states", "SI", {tier, units_si}, {}};
    s.fields.insert(s.fields.end(), material.begin(), material.end());
    s.fields.push_back(pos("physics.omega0", "rad/s", "trap frequency preparing the initial state"));
    s.fields.push_back(num("physics.temperature", "K", "initial temperature", "0"));
    s.fields.push_back(pos("physics.t_end", "s", "final time"));
    s.fields.push_back(integer("physics.samples", "rows", "121"));
    s.fields.push_back(pos("physics.threshold", "ebit", "detectable negativity", "0.01"));
    s.one_of = {{"physics.mass", "physics.R0"}};
    out.push_back(std::move(s));
  }
  {
    Schema s{"casimir-compare", "gravity, Casimir and combined entanglement", "SI", {tier, units_si}, {}};
    s.fields.insert(s.fields.end(), material.begin(), material.end());
    s.fields.push_back(pos("physics.omega0", "rad/s", "trap frequency preparing the initial state"));
    s.fields.push_back(pos("physics.t_end", "s", "final time"));
    s.fields.push_back(integer("physics.samples", "rows", "101"));
    s.one_of = {{"physics.mass", "physics.R0"}};
    out.push_back(std::move(s));
  }
  {
    Schema s{"convergence", "grid and step refinement table", "natural", {tier}, {}};
    s.fields.push_back(choice("units", "unit system; natural for rutherford, dimensionless for evolve", "natural",
                              {"natural", "dimensionless"}));
    s.fields.push_back(choice("physics.target", "what is refined", "rutherford", {"rutherford", "evolve"}));
    s.fields.push_back(pos("physics.Z_P", "e", "projectile charge (rutherford)", "2"));
    s.fields.push_back(pos("physics.Z_T", "e", "target charge (rutherford)", "79"));
    s.fields.push_back(pos("physics.mass", "MeV/c^2 or m", "projectile mass", "3727.3794066"));
    s.fields.push_back(pos("physics.hbar", "hbar", "Planck constant (evolve)", "1"));
    s.fields.push_back(pos("physics.L", "fm", "launch distance (rutherford)", "1e4"));
    s.fields.push_back(pos("physics.T0", "MeV", "kinetic energy (rutherford)", "5"));
    s.fields.push_back(pos("physics.sigma", "fm or length", "initial spread"));
    s.fields.push_back(num("physics.x0", "length", "initial centre (evolve)", "0"));
    s.fields.push_back(num("physics.p0", "momentum", "mean momentum (evolve)", "0"));
    s.fields.push_back(opt("physics.t_end", "time", "final time (evolve)"));
    s.fields.push_back(list("solver.dx", "fm or length", "grid spacings"));
    s.fields.push_back(list("solver.dt", "fm/c or time", "time steps"));
    s.fields.push_back(choice("solver.stencil", "stencil, or both", "penta", {"tri", "penta", "both"}));
    s.fields.push_back(integer("solver.cadence", "steps between observations", "20"));
    out.push_back(std::move(s));
  }
  return out;
}

const char* type_name(FieldType t) {
  switch (t) {
    case FieldType::Number: return "number";
    case FieldType::NumberList: return "number or array";
    case FieldType::Integer: return "integer";
    case FieldType::String: return "string";
    case FieldType::Bool: return "bool";
  }
  return "";
}

}  // namespace

const std::vector<Schema>& schemas() {
  static const std::vector<Schema> all = build();
  return all;
}

const Schema& schema_for(const std::string& kind) {
  for (const auto& s : schemas())
    if (s.kind == kind) return s;
  throw ConfigError("scenario", "unknown scenario '" + kind + "'");
}

std::string describe(const Schema& s) {
  std::ostringstream os;
  os << s.kind << ": " << s.summary << " [" << s.units << " units]\n";
  for (const auto& f : s.fields) {
    os << "  " << f.key << " (" << type_name(f.type);
    if (!f.unit.empty()) os << ", " << f.unit;
    os << ") " << f.doc;
    if (f.required)
      os << " [required]";
    else if (!f.fallback.empty())
      os << " [default " << f.fallback << "]";
    if (!f.choices.empty()) {
      os << " {";
      for (std::size_t i = 0; i < f.choices.size(); ++i) os << (i ? "|" : "") << f.choices[i];
      os << "}";
    }
    os << '\n';
  }
  for (const auto& g : s.one_of) {
    os << "  at least one of:";
    for (const auto& k : g) os << ' ' << k;
    os << '\n';
  }
  return os.str();
}

struct ScenarioConfig::Data {
  toml::table tbl;
  toml::table defaults;
};

ScenarioConfig::~ScenarioConfig() = default;
ScenarioConfig::ScenarioConfig(ScenarioConfig&&) noexcept = default;

ScenarioConfig::ScenarioConfig(std::string text, const std::string& origin)
    : text_(std::move(text)), sha256_(sha256_hex(text_)), data_(std::make_unique<Data>()) {
  try {
    data_->tbl = toml::parse(text_, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ": " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("syntax", os.str());
  }
  const auto* sc = data_->tbl["scenario"].as_string();
  if (!sc) throw ConfigError("scenario", "missing required field 'scenario'");
  kind_ = sc->get();
  schema_ = &schema_for(kind_);
  for (const auto& f : schema_->fields) {
    if (f.fallback.empty()) continue;
    auto d = toml::parse("v = " + f.fallback);
    data_->defaults.insert_or_assign(f.key, *d.get("v"));
  }
  validate();
  tier_ = string("tier");
}

const Field& ScenarioConfig::field(const std::string& key) const {
  for (const auto& f : schema_->fields)
    if (f.key == key) return f;
  throw ConfigError(key, "field '" + key + "' is not part of scenario " + kind_);
}

bool ScenarioConfig::has(const std::string& key) const {
  return bool(data_->tbl.at_path(key));
}

namespace {

toml::node_view<const toml::node> lookup(const toml::table& tbl, const toml::table& defaults, const std::string& key) {
  auto v = tbl.at_path(key);
  if (v) return v;
  const auto* d = defaults.get(key);
  return toml::node_view<const toml::node>(d);
}

std::optional<double> as_number(const toml::node& n) {
  if (auto v = n.value<double>()) return *v;
  return std::nullopt;
}

}  // namespace

double ScenarioConfig::number(const std::string& key) const {
  field(key);
  auto v = lookup(data_->tbl, data_->defaults, key);
  if (!v) throw ConfigError(key, "missing required field '" + key + "'");
  if (auto d = as_number(*v.node())) return *d;
  if (auto* a = v.as_array(); a && a->size() == 1)
    if (auto d = as_number(*a->get(0))) return *d;
  throw ConfigError(key, "field '" + key + "' must be a number");
}

std::vector<double> ScenarioConfig::numbers(const std::string& key) const {
  field(key);
  auto v = lookup(data_->tbl, data_->defaults, key);
  if (!v) throw ConfigError(key, "missing required field '" + key + "'");
  std::vector<double> out;
  if (auto d = as_number(*v.node())) {
    out.push_back(*d);
  } else if (auto* a = v.as_array()) {
    for (const auto& e : *a) {
      auto d = as_number(e);
      if (!d) throw ConfigError(key, "field '" + key + "' must hold numbers");
      out.push_back(*d);
    }
  } else {
    throw ConfigError(key, "field '" + key + "' must be a number or an array of numbers");
  }
  if (out.empty()) throw ConfigError(key, "field '" + key + "' is empty");
  return out;
}

long ScenarioConfig::integer(const std::string& key) const {
  field(key);
  auto v = lookup(data_->tbl, data_->defaults, key);
  if (!v) throw ConfigError(key, "missing required field '" + key + "'");
  if (auto i = v.value<int64_t>(); i && v.is_integer()) return long(*i);
  throw ConfigError(key, "field '" + key + "' must be an integer");
}

std::string ScenarioConfig::string(const std::string& key) const {
  field(key);
  auto v = lookup(data_->tbl, data_->defaults, key);
  if (!v) throw ConfigError(key, "missing required field '" + key + "'");
  if (auto s = v.value<std::string>(); s && v.is_string()) return *s;
  throw ConfigError(key, "field '" + key + "' must be a string");
}

bool ScenarioConfig::flag(const std::string& key) const {
  field(key);
  auto v = lookup(data_->tbl, data_->defaults, key);
  if (!v) throw ConfigError(key, "missing required field '" + key + "'");
  if (auto b = v.value<bool>(); b && v.is_boolean()) return *b;
  throw ConfigError(key, "field '" + key + "' must be true or false");
}

void ScenarioConfig::validate() const {
  // unknown keys are rejected so that typos do not silently fall back to defaults
  std::function<void(const toml::table&, const std::string&)> walk = [&](const toml::table& t,
                                                                          const std::string& prefix) {
    for (const auto& [k, v] : t) {
      const std::string key = prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str());
      if (key == "scenario") continue;
      if (const auto* sub = v.as_table()) {
        walk(*sub, key);
        continue;
      }
      field(key);
    }
  };
  walk(data_->tbl, "");

  for (const auto& f : schema_->fields) {
    if (f.required && !has(f.key)) throw ConfigError(f.key, "missing required field '" + f.key + "'");
    if (!has(f.key) && f.fallback.empty()) continue;
    switch (f.type) {
      case FieldType::Number: {
        const double v = number(f.key);
        if (f.positive && !(v > 0)) throw ConfigError(f.key, "field '" + f.key + "' must be positive");
        break;
      }
      case FieldType::NumberList:
        for (double v : numbers(f.key))
          if (f.positive && !(v > 0)) throw ConfigError(f.key, "field '" + f.key + "' must be positive");
        break;
      case FieldType::Integer:
        if (f.positive && integer(f.key) <= 0) throw ConfigError(f.key, "field '" + f.key + "' must be positive");
        break;
      case FieldType::String: {
        const auto s = string(f.key);
        if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), s) == f.choices.end())
          throw ConfigError(f.key, "field '" + f.key + "' has unsupported value '" + s + "'");
        break;
      }
      case FieldType::Bool: flag(f.key); break;
    }
  }
  for (const auto& g : schema_->one_of) {
    if (std::none_of(g.begin(), g.end(), [&](const std::string& k) { return has(k); })) {
      std::string names;
      for (const auto& k : g) names += (names.empty() ? "'" : " or '") + k + "'";
      throw ConfigError(g.front(), "missing required field: one of " + names);
    }
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("file", "cannot read config " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return ScenarioConfig(os.str(), path.string());
}

}  // namespace cvq::cli
