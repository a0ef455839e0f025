#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "castfv/app.hpp"
#include "castfv/error.hpp"

namespace castfv {

namespace {

struct UnitScale {
  double scale;
  double shift;
};

using UnitTable = std::map<std::string, UnitScale>;

const std::map<std::string, std::pair<std::string, UnitTable>>& unit_tables() {
  static const std::map<std::string, std::pair<std::string, UnitTable>> tables = {
      {"temperature", {"K", {{"K", {1, 0}}, {"C", {1, 273.15}}}}},
      {"temperature_difference", {"K", {{"K", {1, 0}}, {"C", {1, 0}}}}},
      {"time", {"s", {{"s", {1, 0}}, {"ms", {1e-3, 0}}, {"min", {60, 0}}, {"h", {3600, 0}}}}},
      {"length", {"m", {{"m", {1, 0}}, {"cm", {1e-2, 0}}, {"mm", {1e-3, 0}}, {"um", {1e-6, 0}}}}},
      {"density", {"kg/m3", {{"kg/m3", {1, 0}}, {"g/cm3", {1e3, 0}}}}},
      {"viscosity", {"Pa.s", {{"Pa.s", {1, 0}}, {"mPa.s", {1e-3, 0}}}}},
      {"specific_heat", {"J/kg/K", {{"J/kg/K", {1, 0}}, {"kJ/kg/K", {1e3, 0}}}}},
      {"conductivity", {"W/m/K", {{"W/m/K", {1, 0}}}}},
      {"specific_energy", {"J/kg", {{"J/kg", {1, 0}}, {"kJ/kg", {1e3, 0}}}}},
      {"inverse_temperature", {"1/K", {{"1/K", {1, 0}}}}},
      {"cooling_rate", {"K/s", {{"K/s", {1, 0}}, {"K/min", {1.0 / 60.0, 0}}}}},
      {"diffusivity", {"m2/s", {{"m2/s", {1, 0}}}}},
      {"concentration", {"wt%", {{"wt%", {1, 0}}}}},
      {"stress", {"MPa", {{"MPa", {1, 0}}, {"kPa", {1e-3, 0}}, {"GPa", {1e3, 0}}}}},
      {"yield_coefficient", {"MPa.um^0.5", {{"MPa.um^0.5", {1, 0}}}}},
      {"liquidus_slope", {"K/wt%", {{"K/wt%", {1, 0}}}}},
  };
  return tables;
}

const std::map<std::string, std::string>& known_keys() {
  static const std::map<std::string, std::string> keys = {
      {"material.density", "density"},
      {"material.viscosity", "viscosity"},
      {"material.specific_heat", "specific_heat"},
      {"material.conductivity", "conductivity"},
      {"material.conductivity_shift", "conductivity"},
      {"material.liquidus_slope", "liquidus_slope"},
      {"material.latent_heat", "specific_energy"},
      {"material.expansion", "inverse_temperature"},
      {"material.reference_temperature", "temperature"},
      {"material.partition_coefficient", "dimensionless"},
      {"material.melting_temperature", "temperature"},
      {"material.liquidus", "temperature"},
      {"material.solidus", "temperature"},
      {"material.eutectic_smear", "temperature_difference"},
      {"material.dendrite_spacing", "length"},
      {"material.solute_diffusivity", "diffusivity"},
      {"material.C0", "concentration"},
      {"initial.temperature", "temperature"},
      {"time.dt", "time"},
      {"time.end", "time"},
      {"micro.sdas_coefficient", "dimensionless"},
      {"micro.sdas_exponent", "dimensionless"},
      {"micro.yield_coefficient", "yield_coefficient"},
      {"micro.yield_offset", "stress"},
      {"micro.initial_grain_radius", "length"},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& text, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(context + ": '" + text + "' is not a number");
  }
  if (used != text.size()) throw ConfigError(context + ": '" + text + "' is not a number");
  return v;
}

std::pair<std::string, std::string> split_field(const std::string& field) {
  const auto dot = field.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == field.size())
    throw ConfigError("config field '" + field + "' must be written section.key");
  return {field.substr(0, dot), field.substr(dot + 1)};
}

bool parse_bool(const std::string& text, const std::string& context) {
  if (text == "on" || text == "true" || text == "yes" || text == "1") return true;
  if (text == "off" || text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(context + ": expected on/off, got '" + text + "'");
}

Vec3 parse_vector(const std::string& text, const std::string& kind, const std::string& context) {
  std::istringstream is(text);
  std::string a, b, c, unit;
  if (!(is >> a >> b >> c)) throw ConfigError(context + ": expected three values");
  std::getline(is, unit);
  unit = trim(unit);
  return {parse_quantity(a + " " + unit, kind), parse_quantity(b + " " + unit, kind),
          parse_quantity(c + " " + unit, kind)};
}

}  // namespace

double parse_quantity(const std::string& text, const std::string& kind) {
  const std::string t = trim(text);
  if (kind == "dimensionless") return parse_number(t, kind);
  const auto& tables = unit_tables();
  auto table = tables.find(kind);
  if (table == tables.end()) throw ConfigError("unknown quantity kind '" + kind + "'");
  const auto space = t.find_first_of(" \t");
  if (space == std::string::npos)
    throw ConfigError("'" + t + "' needs a unit (expected " + kind + ", e.g. " + table->second.first + ")");
  const double v = parse_number(t.substr(0, space), kind);
  const std::string unit = trim(t.substr(space));
  auto u = table->second.second.find(unit);
  if (u == table->second.second.end()) throw ConfigError("unit '" + unit + "' is not a " + kind + " unit");
  return v * u->second.scale + u->second.shift;
}

std::string si_unit(const std::string& kind) {
  if (kind == "dimensionless") return "";
  auto table = unit_tables().find(kind);
  if (table == unit_tables().end()) throw ConfigError("unknown quantity kind '" + kind + "'");
  return table->second.first;
}

std::string key_kind(const std::string& field) {
  auto it = known_keys().find(field);
  if (it != known_keys().end()) return it->second;
  const auto [section, key] = split_field(field);
  if (section.rfind("boundary.", 0) == 0) {
    if (key == "temperature") return "temperature";
    if (key == "rate") return "cooling_rate";
    if (key == "offset") return "temperature_difference";
  }
  if (section == "solver") return "dimensionless";
  throw ConfigError("config field '" + field + "' does not hold a number");
}

ConfigTree parse_config_tree(const std::string& text) {
  std::istringstream is(text);
  ConfigTree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  return tree;
}

ConfigTree load_config_tree(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config_tree(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

bool has_field(const ConfigTree& tree, const std::string& field) {
  const auto [section, key] = split_field(field);
  auto s = tree.find(section);
  return s != tree.not_found() && s->second.find(key) != s->second.not_found();
}

std::string get_field(const ConfigTree& tree, const std::string& field) {
  const auto [section, key] = split_field(field);
  auto s = tree.find(section);
  if (s == tree.not_found()) throw ConfigError("missing config section [" + section + "]");
  auto k = s->second.find(key);
  if (k == s->second.not_found()) throw ConfigError("missing config key " + field);
  return trim(k->second.data());
}

void set_field(ConfigTree& tree, const std::string& field, const std::string& value) {
  const auto [section, key] = split_field(field);
  auto s = tree.find(section);
  if (s == tree.not_found()) {
    tree.push_back({section, ConfigTree()});
    s = tree.find(section);
  }
  auto k = s->second.find(key);
  if (k == s->second.not_found())
    s->second.push_back({key, ConfigTree(value)});
  else
    k->second.put_value(value);
}

std::string dump_config_tree(const ConfigTree& tree) {
  std::ostringstream os;
  boost::property_tree::write_ini(os, tree);
  return os.str();
}

double BoundarySpec::value(double t) const {
  switch (type) {
    case Type::Fixed:
      return temperature;
    case Type::Cooling:
      return temperature + offset - rate * t;
    case Type::Insulated:
      break;
  }
  return 0.0;
}

void RunConfig::validate() const {
  mat.validate();
  micro.validate();
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(end_time > 0.0)) throw ConfigError("end time must be positive");
  if (output_every < 0) throw ConfigError("output_every must not be negative");
  if (mesh_path.empty() && !uses_box()) throw ConfigError("config names no mesh");
  if (uses_box() && (box_cells[1] < 1 || box_cells[2] < 1 || (box_size.array() <= 0.0).any()))
    throw ConfigError("box mesh needs positive cell counts and size");
  if (!(solver.omega > 0.0 && solver.omega <= 1.0)) throw ConfigError("omega must lie in (0, 1]");
}

RunConfig parse_run_config(const ConfigTree& tree, const std::string& base_dir) {
  RunConfig c;
  auto num = [&](const std::string& field, double fallback) {
    return has_field(tree, field) ? parse_quantity(get_field(tree, field), key_kind(field)) : fallback;
  };
  auto flag = [&](const std::string& field, bool fallback) {
    return has_field(tree, field) ? parse_bool(get_field(tree, field), field) : fallback;
  };

  if (has_field(tree, "mesh.file")) {
    std::filesystem::path p = get_field(tree, "mesh.file");
    c.mesh_path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
  } else if (has_field(tree, "mesh.box_cells")) {
    std::istringstream is(get_field(tree, "mesh.box_cells"));
    if (!(is >> c.box_cells[0] >> c.box_cells[1] >> c.box_cells[2]) || c.box_cells[0] < 1)
      throw ConfigError("mesh.box_cells needs three positive integers");
    c.box_size = parse_vector(get_field(tree, "mesh.box_size"), "length", "mesh.box_size");
  }

  MaterialModel& m = c.mat;
  m.rho = num("material.density", m.rho);
  m.mu = num("material.viscosity", m.mu);
  m.cp = num("material.specific_heat", m.cp);
  if (has_field(tree, "material.conductivity_table")) {
    if (has_field(tree, "material.conductivity"))
      throw ConfigError("give either material.conductivity or material.conductivity_table, not both");
    // pairs "T:k" in K and W/m/K
    std::istringstream is(get_field(tree, "material.conductivity_table"));
    std::string pair;
    m.k = {};
    while (is >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw ConfigError("material.conductivity_table entries are T:k pairs in K and W/m/K");
      m.k.T.push_back(parse_number(pair.substr(0, colon), "material.conductivity_table"));
      m.k.k.push_back(parse_number(pair.substr(colon + 1), "material.conductivity_table"));
    }
    if (m.k.T.empty()) throw ConfigError("material.conductivity_table is empty");
    for (std::size_t i = 1; i < m.k.T.size(); ++i)
      if (!(m.k.T[i] > m.k.T[i - 1])) throw ConfigError("material.conductivity_table temperatures must increase");
  } else if (has_field(tree, "material.conductivity")) {
    m.k = ConductivityTable::constant(num("material.conductivity", 0.0));
  }
  if (has_field(tree, "material.conductivity_shift")) {
    const double shift = num("material.conductivity_shift", 0.0);
    for (double& k : m.k.k) k += shift;
  }
  m.latent = num("material.latent_heat", m.latent);
  m.beta = num("material.expansion", m.beta);
  m.T_ref = num("material.reference_temperature", m.T_ref);
  m.k_p = num("material.partition_coefficient", m.k_p);
  m.T_f = num("material.melting_temperature", m.T_f);
  m.T_liq = num("material.liquidus", m.T_liq);
  m.T_sol = num("material.solidus", m.T_sol);
  m.T_eps = num("material.eutectic_smear", m.T_eps);
  m.dendrite_spacing = num("material.dendrite_spacing", m.dendrite_spacing);
  m.D_s = num("material.solute_diffusivity", m.D_s);
  m.C0 = num("material.C0", m.C0);
  if (has_field(tree, "material.liquidus_slope")) {
    if (has_field(tree, "material.liquidus"))
      throw ConfigError("give either material.liquidus or material.liquidus_slope, not both");
    m.T_liq = m.T_f - num("material.liquidus_slope", 0.0) * m.C0;
  }

  c.gravity = flag("physics.gravity", true);
  if (!c.gravity) m.g.setZero();
  c.solver.convection = flag("physics.convection", true);

  MicroParams& mp = c.micro;
  mp.A_lambda = num("micro.sdas_coefficient", mp.A_lambda);
  mp.B_lambda = num("micro.sdas_exponent", mp.B_lambda);
  mp.A_sigma = num("micro.yield_coefficient", mp.A_sigma);
  mp.B_sigma = num("micro.yield_offset", mp.B_sigma);
  mp.r0 = num("micro.initial_grain_radius", mp.r0);
  mp.k_p = m.k_p;
  mp.C0 = m.C0;
  mp.D_s = m.D_s;

  c.initial_temperature = parse_quantity(get_field(tree, "initial.temperature"), "temperature");
  if (!has_field(tree, "material.reference_temperature")) m.T_ref = c.initial_temperature;
  c.dt = parse_quantity(get_field(tree, "time.dt"), "time");
  c.end_time = parse_quantity(get_field(tree, "time.end"), "time");
  c.stop_at_solid = flag("time.stop_at_solid", true);
  if (has_field(tree, "time.output_every"))
    c.output_every = static_cast<int>(parse_number(get_field(tree, "time.output_every"), "time.output_every"));

  SolidifyOptions& s = c.solver;
  s.omega = num("solver.omega", s.omega);
  if (has_field(tree, "solver.latent_update")) {
    const std::string u = get_field(tree, "solver.latent_update");
    if (u == "curve")
      s.latent_update = LatentUpdate::Curve;
    else if (u == "relaxed")
      s.latent_update = LatentUpdate::Relaxed;
    else
      throw ConfigError("solver.latent_update must be curve or relaxed, got '" + u + "'");
  }
  s.energy_tol = num("solver.energy_tol", s.energy_tol);
  s.max_outer = static_cast<int>(num("solver.max_outer", s.max_outer));
  s.tol_div = num("solver.tol_div", s.tol_div);
  s.linear.tol = num("solver.linear_tol", s.linear.tol);
  s.pressure.tol = num("solver.pressure_tol", s.pressure.tol);
  s.linear.max_iter = static_cast<int>(num("solver.max_iter", s.linear.max_iter));
  s.pressure.max_iter = std::max(s.pressure.max_iter, s.linear.max_iter);

  for (const auto& [section, body] : tree) {
    if (section.rfind("boundary.", 0) != 0) continue;
    BoundarySpec b;
    b.patch = section.substr(9);
    const std::string type = has_field(tree, section + ".type") ? get_field(tree, section + ".type") : "";
    if (type == "fixed") {
      b.type = BoundarySpec::Type::Fixed;
      b.temperature = parse_quantity(get_field(tree, section + ".temperature"), "temperature");
    } else if (type == "cooling") {
      b.type = BoundarySpec::Type::Cooling;
      b.temperature = parse_quantity(get_field(tree, section + ".temperature"), "temperature");
      b.rate = parse_quantity(get_field(tree, section + ".rate"), "cooling_rate");
      if (has_field(tree, section + ".offset"))
        b.offset = parse_quantity(get_field(tree, section + ".offset"), "temperature_difference");
    } else if (type == "insulated") {
      b.type = BoundarySpec::Type::Insulated;
    } else {
      throw ConfigError("[" + section + "] type must be fixed, cooling or insulated");
    }
    c.boundaries.push_back(b);
  }

  auto probes = tree.find("probes");
  if (probes != tree.not_found())
    for (const auto& [name, value] : probes->second)
      c.probes.push_back({name, parse_vector(value.data(), "length", "probes." + name)});

  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  const ConfigTree tree = load_config_tree(path);
  return parse_run_config(tree, std::filesystem::path(path).parent_path().string());
}

Mesh load_run_mesh(const RunConfig& config) {
  Mesh mesh = config.uses_box()
                  ? make_box_mesh(config.box_cells[0], config.box_cells[1], config.box_cells[2], Vec3::Zero(),
                                  config.box_size)
                  : read_mesh(config.mesh_path);
  for (const auto& b : config.boundaries)
    if (mesh.find_patch(b.patch) < 0) throw ConfigError("boundary patch '" + b.patch + "' is not in the mesh");
  return mesh;
}

BoundaryConditions thermal_boundary_conditions(const Mesh& mesh, const RunConfig& config, double t, double t_old) {
  BoundaryConditions bc = zero_gradient_everywhere(mesh);
  for (const auto& b : config.boundaries) {
    const int patch = mesh.find_patch(b.patch);
    if (patch < 0) throw ConfigError("boundary patch '" + b.patch + "' is not in the mesh");
    if (b.type == BoundarySpec::Type::Insulated) continue;
    bc[patch] = {BoundaryKind::FixedValue, b.value(t), b.value(t_old)};
  }
  return bc;
}

CampaignConfig parse_campaign_config(const ConfigTree& tree, const std::string& base_dir) {
  CampaignConfig c;
  c.base = tree;
  c.base_dir = base_dir;
  if (has_field(tree, "campaign.level"))
    c.level = static_cast<int>(parse_number(get_field(tree, "campaign.level"), "campaign.level"));
  if (has_field(tree, "campaign.order"))
    c.order = static_cast<int>(parse_number(get_field(tree, "campaign.order"), "campaign.order"));
  if (has_field(tree, "campaign.validation_points"))
    c.validation_points =
        static_cast<int>(parse_number(get_field(tree, "campaign.validation_points"), "campaign.validation_points"));
  if (has_field(tree, "campaign.seed")) c.seed = std::stoull(get_field(tree, "campaign.seed"));
  if (has_field(tree, "campaign.surface_resolution"))
    c.surface_resolution = static_cast<int>(
        parse_number(get_field(tree, "campaign.surface_resolution"), "campaign.surface_resolution"));
  std::istringstream outs(get_field(tree, "campaign.outputs"));
  for (std::string o; outs >> o;) c.outputs.push_back(o);

  for (const auto& [section, body] : tree) {
    if (section.rfind("input.", 0) != 0) continue;
    StochasticInput in;
    in.name = section.substr(6);
    in.field = get_field(tree, section + ".field");
    std::string kind = key_kind(in.field);
    in.mean = parse_quantity(get_field(tree, section + ".mean"), kind);
    if (kind == "temperature") kind = "temperature_difference";
    in.stddev = parse_quantity(get_field(tree, section + ".stddev"), kind);
    c.inputs.push_back(in);
  }
  c.validate();
  return c;
}

CampaignConfig load_campaign_config(const std::string& path) {
  return parse_campaign_config(load_config_tree(path), std::filesystem::path(path).parent_path().string());
}

void CampaignConfig::validate() const {
  if (inputs.empty()) throw ConfigError("campaign has no stochastic inputs");
  if (outputs.empty()) throw ConfigError("campaign has no outputs");
  if (level < 1) throw ConfigError("campaign level must be at least 1");
  for (std::size_t i = 0; i < inputs.size(); ++i)
    for (std::size_t j = i + 1; j < inputs.size(); ++j)
      if (inputs[i].field == inputs[j].field)
        throw ConfigError("inputs '" + inputs[i].name + "' and '" + inputs[j].name + "' map to the same field");
  distribution().validate();
}

InputDistribution CampaignConfig::distribution() const {
  InputDistribution d;
  const int n = static_cast<int>(inputs.size());
  d.mean.resize(n);
  d.stddev.resize(n);
  for (int k = 0; k < n; ++k) {
    d.names.push_back(inputs[k].name);
    d.mean[k] = inputs[k].mean;
    d.stddev[k] = inputs[k].stddev;
  }
  return d;
}

ConfigTree sample_config(const CampaignConfig& config, const Eigen::VectorXd& x) {
  ConfigTree tree = config.base;
  for (std::size_t k = 0; k < config.inputs.size(); ++k) {
    const std::string& field = config.inputs[k].field;
    const std::string unit = si_unit(key_kind(field));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x[static_cast<Eigen::Index>(k)]);
    set_field(tree, field, unit.empty() ? std::string(buf) : std::string(buf) + " " + unit);
  }
  return tree;
}

}  // namespace castfv
