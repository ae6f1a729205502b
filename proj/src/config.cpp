#include "mdcs/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "mdcs/errors.hpp"
#include "mdcs/report.hpp"
#include "text_util.hpp"

namespace mdcs {

namespace {

enum class Dim { None, Thz, Ghz, Mhz, Ps, Ns, Nm, Strain, ThzPerStrain, GhzPerStrain, Kelvin };

struct UnitDef {
  const char* name;
  Dim dim;
  double factor;  // to the dimension's canonical unit
};

// Canonical units: THz, GHz, MHz, ps, ns, nm, strain, THz/strain, GHz/strain, K.
constexpr UnitDef kUnits[] = {
    {"thz", Dim::Thz, 1.0},          {"ghz", Dim::Thz, 1e-3},         {"mhz", Dim::Thz, 1e-6},
    {"thz", Dim::Ghz, 1e3},          {"ghz", Dim::Ghz, 1.0},          {"mhz", Dim::Ghz, 1e-3},
    {"ghz", Dim::Mhz, 1e3},          {"mhz", Dim::Mhz, 1.0},          {"khz", Dim::Mhz, 1e-3},
    {"fs", Dim::Ps, 1e-3},           {"ps", Dim::Ps, 1.0},            {"ns", Dim::Ps, 1e3},
    {"ps", Dim::Ns, 1e-3},           {"ns", Dim::Ns, 1.0},            {"us", Dim::Ns, 1e3},
    {"nm", Dim::Nm, 1.0},            {"strain", Dim::Strain, 1.0},    {"thz/strain", Dim::ThzPerStrain, 1.0},
    {"ghz/strain", Dim::ThzPerStrain, 1e-3}, {"thz/strain", Dim::GhzPerStrain, 1e3},
    {"ghz/strain", Dim::GhzPerStrain, 1.0},  {"mhz/strain", Dim::GhzPerStrain, 1e-3},
    {"k", Dim::Kelvin, 1.0},
};

const char* canonical_unit(Dim d) {
  switch (d) {
    case Dim::Thz: return "THz";
    case Dim::Ghz: return "GHz";
    case Dim::Mhz: return "MHz";
    case Dim::Ps: return "ps";
    case Dim::Ns: return "ns";
    case Dim::Nm: return "nm";
    case Dim::Strain: return "strain";
    case Dim::ThzPerStrain: return "THz/strain";
    case Dim::GhzPerStrain: return "GHz/strain";
    case Dim::Kelvin: return "K";
    case Dim::None: return "";
  }
  return "";
}

std::string lower(std::string_view s) {
  std::string o(s);
  for (auto& c : o) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return o;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string where(int line, const std::string& field) {
  return (line > 0 ? "line " + std::to_string(line) + ": " : std::string("override: ")) + "field " +
         field + ": ";
}

struct Value {
  int line = 0;
  std::string field;  // section.key
  std::vector<std::string> tokens;

  [[noreturn]] void syntax(const std::string& msg) const { throw SyntaxError(where(line, field) + msg); }
  [[noreturn]] void schema(const std::string& msg) const { throw SchemaError(where(line, field) + msg); }
  [[noreturn]] void unit(const std::string& msg) const { throw UnitError(where(line, field) + msg); }

  double parse_number(const std::string& tok) const {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    if (b != e && *b == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) syntax("'" + tok + "' is not a number");
    if (!std::isfinite(v)) syntax("value must be finite");
    return v;
  }

  double quantity(Dim dim) const {
    if (tokens.size() == 1) unit("missing unit (expected " + std::string(canonical_unit(dim)) + ")");
    if (tokens.size() != 2) syntax("expected 'value unit'");
    const double v = parse_number(tokens[0]);
    const std::string u = lower(tokens[1]);
    for (const auto& d : kUnits)
      if (d.dim == dim && u == d.name) return v * d.factor;
    unit("unit '" + tokens[1] + "' is not a " + canonical_unit(dim) + "-compatible unit");
  }

  const std::string& single() const {
    if (tokens.size() != 1) {
      if (tokens.size() == 2) unit("takes no unit");
      syntax("expected a single value");
    }
    return tokens[0];
  }

  double number() const { return parse_number(single()); }

  std::uint64_t count() const {
    const std::string& s = single();
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      syntax("'" + s + "' is not a non-negative integer");
    return v;
  }

  bool flag() const {
    const std::string s = lower(single());
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    syntax("'" + s + "' is not a boolean");
  }

  std::string word(std::initializer_list<const char*> allowed) const {
    const std::string s = lower(single());
    for (const char* a : allowed)
      if (s == a) return s;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    schema("'" + single() + "' is not one of " + list);
  }
};

struct ParseState {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> component_index;
  std::map<std::string, int> first_line;  // field -> line
  std::optional<double> wavelength_nm, bandwidth_nm;
  bool laser_center_set = false, laser_fwhm_set = false;
  std::optional<bool> square;
  bool tau_points = false, t_points = false, tau_step = false, t_step = false;
};

PopulationComponent& component(ParseState& st, const std::string& name) {
  auto it = st.component_index.find(name);
  if (it == st.component_index.end()) {
    PopulationComponent c;
    c.name = name;
    c.strain.shape = StrainShape::Delta;
    st.cfg.ensemble.components.push_back(c);
    it = st.component_index.emplace(name, st.cfg.ensemble.components.size() - 1).first;
  }
  return st.cfg.ensemble.components[it->second];
}

void set_field(ParseState& st, const std::string& section, const std::string& key, const Value& v) {
  auto& c = st.cfg;
  auto unknown = [&]() { v.schema("unknown key '" + key + "' in [" + section + "]"); };

  if (section == "experiment") {
    if (key == "seed") c.seed = v.count();
    else if (key == "emitters") c.emitters = v.count();
    else if (key == "waiting_time") c.waiting_time_ps = v.quantity(Dim::Ps);
    else if (key == "detection") {
      c.detection.clear();
      std::string all;
      for (const auto& t : v.tokens) all += t;
      std::stringstream ss(all);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string w = lower(trim(item));
        if (w == "heterodyne") c.detection.push_back(Detection::Heterodyne);
        else if (w == "pl") c.detection.push_back(Detection::Photoluminescence);
        else v.schema("'" + w + "' is not a detection mode (heterodyne, pl)");
      }
      if (c.detection.empty()) v.schema("at least one detection mode is required");
    } else if (key == "noise") c.noise = v.number();
    else if (key == "temperature") c.temperature_k = v.quantity(Dim::Kelvin);
    else if (key == "repetition_rate") c.repetition_rate_mhz = v.quantity(Dim::Mhz);
    else if (key == "excited_state_absorption") c.excited_state_absorption = v.flag();
    else unknown();
  } else if (section == "level_scheme") {
    if (key == "center") c.level_scheme.center_thz = v.quantity(Dim::Thz);
    else if (key == "ground_splitting") c.level_scheme.ground_splitting_ghz = v.quantity(Dim::Ghz);
    else if (key == "excited_splitting") c.level_scheme.excited_splitting_ghz = v.quantity(Dim::Ghz);
    else if (key == "two_level") c.level_scheme.two_level = v.flag();
    else unknown();
  } else if (section == "strain_model") {
    auto& m = c.strain_model;
    if (key == "shift") m.shift_thz_per_unit = v.quantity(Dim::ThzPerStrain);
    else if (key == "ground_splitting_slope") m.ground_splitting_ghz_per_unit = v.quantity(Dim::GhzPerStrain);
    else if (key == "excited_splitting_slope") m.excited_splitting_ghz_per_unit = v.quantity(Dim::GhzPerStrain);
    else if (key == "bright_yield") m.bright_yield = v.number();
    else if (key == "yield_crossover") m.yield_crossover = v.quantity(Dim::Strain);
    else if (key == "yield_steepness") m.yield_steepness = v.number();
    else unknown();
  } else if (section == "laser") {
    auto& l = c.laser;
    if (key == "shape") {
      const auto s = v.word({"gaussian", "flat"});
      l.shape = s == "flat" ? LaserShape::Flat : LaserShape::Gaussian;
    } else if (key == "center") {
      l.center_thz = v.quantity(Dim::Thz);
      st.laser_center_set = true;
    } else if (key == "fwhm") {
      l.fwhm_thz = v.quantity(Dim::Thz);
      st.laser_fwhm_set = true;
    } else if (key == "wavelength") st.wavelength_nm = v.quantity(Dim::Nm);
    else if (key == "bandwidth") st.bandwidth_nm = v.quantity(Dim::Nm);
    else unknown();
  } else if (section == "grid") {
    auto& g = c.grid;
    if (key == "tau_points") {
      g.n_tau = v.count();
      st.tau_points = true;
    } else if (key == "t_points") {
      g.n_t = v.count();
      st.t_points = true;
    } else if (key == "tau_step") {
      g.tau_step_ps = v.quantity(Dim::Ps);
      st.tau_step = true;
    } else if (key == "t_step") {
      g.t_step_ps = v.quantity(Dim::Ps);
      st.t_step = true;
    } else if (key == "square") st.square = v.flag();
    else unknown();
  } else if (section == "tags") {
    if (key.size() == 3 && key.rfind("nu", 0) == 0 && key[2] >= '1' && key[2] <= '4')
      c.tags.mhz[static_cast<std::size_t>(key[2] - '1')] = v.quantity(Dim::Mhz);
    else unknown();
  } else if (section == "output") {
    if (key == "dir") c.output_dir = v.single();
    else if (key == "pad_factor") {
      const auto p = v.count();
      if (p < 1 || p > 16) v.schema("pad factor must lie in 1..16");
      c.pad_factor = static_cast<int>(p);
    } else if (key == "window") c.cosine_window = v.word({"none", "cosine"}) == "cosine";
    else if (key == "projection") c.projection = projection_mode_from_string(v.word({"abs", "rss", "power"}));
    else if (key == "deconvolution_floor") c.deconvolution_floor = v.number();
    else unknown();
  } else if (section.rfind("component.", 0) == 0) {
    const std::string name = section.substr(10);
    auto& p = component(st, name);
    if (key == "weight") p.weight = v.number();
    else if (key == "strain_shape") {
      const auto s = v.word({"delta", "gaussian", "lorentzian"});
      p.strain.shape = s == "delta" ? StrainShape::Delta
                       : s == "gaussian" ? StrainShape::Gaussian : StrainShape::Lorentzian;
    } else if (key == "strain_center") p.strain.center = v.quantity(Dim::Strain);
    else if (key == "strain_fwhm") p.strain.fwhm = v.quantity(Dim::Strain);
    else if (key == "t2_rule") {
      const auto s = v.word({"constant", "classes", "lognormal"});
      p.dephasing.rule = s == "constant" ? DephasingRule::Constant
                         : s == "classes" ? DephasingRule::Classes : DephasingRule::LogNormal;
    } else if (key == "t2") p.dephasing.t2_ps = v.quantity(Dim::Ps);
    else if (key == "t2_classes") {
      // "120 ps 0.7, 990 ps 0.3"
      std::string all;
      for (const auto& t : v.tokens) all += t + " ";
      std::stringstream ss(all);
      std::string item;
      p.dephasing.classes.clear();
      while (std::getline(ss, item, ',')) {
        Value sub = v;
        sub.tokens = split_ws(item);
        if (sub.tokens.size() != 3) v.syntax("T2 classes are 'time unit weight' separated by commas");
        const double w = sub.parse_number(sub.tokens[2]);
        sub.tokens.pop_back();
        p.dephasing.classes.push_back({sub.quantity(Dim::Ps), w});
      }
    } else if (key == "lognormal_median") p.dephasing.lognormal_median_ps = v.quantity(Dim::Ps);
    else if (key == "lognormal_sigma") p.dephasing.lognormal_sigma = v.number();
    else if (key == "yield") p.yield_rule = v.word({"strain", "fixed"}) == "fixed" ? YieldRule::Fixed : YieldRule::Strain;
    else if (key == "fixed_yield") p.fixed_yield = v.number();
    else if (key == "dipole") p.dipole = v.number();
    else if (key == "t1") p.t1_ns = v.quantity(Dim::Ns);
    else if (key == "level") p.two_level = v.word({"doublet", "two_level"}) == "two_level";
    else unknown();
  } else {
    v.schema("unknown section [" + section + "]");
  }
}

int line_of(const ParseState& st, const std::string& field) {
  const auto it = st.first_line.find(field);
  return it == st.first_line.end() ? 0 : it->second;
}

void finalize(ParseState& st) {
  auto& c = st.cfg;
  auto fail = [&](const std::string& field, const std::string& msg) -> void {
    throw SchemaError(where(line_of(st, field), field) + msg);
  };

  if (st.wavelength_nm || st.bandwidth_nm) {
    if (!st.wavelength_nm || !st.bandwidth_nm)
      fail("laser.wavelength", "wavelength and bandwidth must be given together");
    if (st.laser_center_set || st.laser_fwhm_set)
      fail("laser.wavelength", "give either wavelength/bandwidth or center/fwhm, not both");
    const auto shape = c.laser.shape;
    c.laser = LaserSpectrum::from_wavelength(*st.wavelength_nm, *st.bandwidth_nm);
    if (shape == LaserShape::Flat) c.laser.shape = LaserShape::Flat;
  }
  if (c.laser.shape == LaserShape::Flat) c.laser.fwhm_thz = kInfinity;

  if (st.square.value_or(false)) {
    if (!st.t_points) c.grid.n_t = c.grid.n_tau;
    if (!st.t_step) c.grid.t_step_ps = c.grid.tau_step_ps;
    if (!c.grid.is_square()) fail("grid.square", "square grid needs equal tau and t points and steps");
  }

  try {
    c.grid.validate();
  } catch (const Error& e) {
    fail("grid", e.what());
  }
  try {
    c.level_scheme.validate();
  } catch (const Error& e) {
    fail("level_scheme", e.what());
  }
  try {
    c.strain_model.validate();
  } catch (const Error& e) {
    fail("strain_model", e.what());
  }
  try {
    c.laser.validate();
  } catch (const Error& e) {
    fail("laser", e.what());
  }
  if (c.emitters == 0) fail("experiment.emitters", "must be at least 1");
  if (!(c.noise >= 0.0)) fail("experiment.noise", "must be non-negative");
  if (!(c.waiting_time_ps >= 0.0)) fail("experiment.waiting_time", "must be non-negative");
  if (!(c.repetition_rate_mhz > 0.0)) fail("experiment.repetition_rate", "must be positive");
  if (!(c.deconvolution_floor > 0.0 && c.deconvolution_floor < 1.0))
    fail("output.deconvolution_floor", "must lie in (0, 1)");

  if (c.ensemble.components.empty()) fail("component", "at least one [component.NAME] section is required");
  double total = 0.0;
  for (const auto& p : c.ensemble.components) total += p.weight;
  if (std::abs(total - 1.0) > 1e-9) {
    const std::string field = "component." + c.ensemble.components.front().name + ".weight";
    fail(field, "component weights sum to " + detail::sig(total) + ", expected 1");
  }
  for (const auto& p : c.ensemble.components) {
    EnsembleSpec one;
    one.components = {p};
    one.components[0].weight = 1.0;
    try {
      one.validate();
    } catch (const Error& e) {
      fail("component." + p.name, e.what());
    }
  }
}

void parse_into(ParseState& st, std::string_view text) {
  std::string section;
  std::set<std::string> seen_sections, seen_fields;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw SyntaxError("line " + std::to_string(line_no) + ": unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw SyntaxError("line " + std::to_string(line_no) + ": empty section name");
      if (!seen_sections.insert(section).second)
        throw SchemaError("line " + std::to_string(line_no) + ": field " + section +
                          ": duplicate section");
      static const std::set<std::string> known{"experiment", "level_scheme", "strain_model", "laser",
                                               "grid",       "tags",         "output"};
      if (!known.count(section) && section.rfind("component.", 0) != 0)
        throw SchemaError("line " + std::to_string(line_no) + ": field " + section +
                          ": unknown section [" + section + "]");
      if (section.rfind("component.", 0) == 0) {
        if (section.size() == 10)
          throw SyntaxError("line " + std::to_string(line_no) + ": component needs a name");
        component(st, section.substr(10));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw SyntaxError("line " + std::to_string(line_no) + ": expected 'key = value unit'");
    if (section.empty())
      throw SyntaxError("line " + std::to_string(line_no) + ": key outside of any section");
    Value v;
    v.line = line_no;
    const std::string key = lower(trim(line.substr(0, eq)));
    v.field = section + "." + key;
    v.tokens = split_ws(line.substr(eq + 1));
    if (key.empty()) v.syntax("empty key");
    if (v.tokens.empty()) v.syntax("missing value");
    if (!seen_fields.insert(v.field).second) v.schema("duplicate key");
    st.first_line.emplace(v.field, line_no);
    set_field(st, section, key, v);
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ParseState st;
  parse_into(st, text);
  finalize(st);
  return st.cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw SyntaxError("override: expected 'section.key = value unit'");
  const std::string lhs = lower(trim(assignment.substr(0, eq)));
  const auto dot = lhs.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size())
    throw SyntaxError("override: '" + lhs + "' is not section.key");
  ParseState st;
  st.cfg = config;
  for (std::size_t i = 0; i < config.ensemble.components.size(); ++i)
    st.component_index[config.ensemble.components[i].name] = i;
  // Keep the current laser and grid unless the override touches them.
  st.laser_center_set = st.laser_fwhm_set = true;
  st.tau_points = st.t_points = st.tau_step = st.t_step = true;
  Value v;
  v.field = lhs;
  v.tokens = split_ws(assignment.substr(eq + 1));
  if (v.tokens.empty()) v.syntax("missing value");
  const std::string section = lhs.substr(0, dot);
  const std::string key = lhs.substr(dot + 1);
  if (section == "laser" && (key == "wavelength" || key == "bandwidth"))
    v.schema("override laser.center and laser.fwhm instead");
  set_field(st, section, key, v);
  finalize(st);
  config = st.cfg;
}

std::string serialize_config(const ExperimentConfig& c) {
  using detail::exact;
  std::ostringstream os;
  os << "[experiment]\n";
  os << "seed = " << c.seed << "\n";
  os << "emitters = " << c.emitters << "\n";
  os << "waiting_time = " << exact(c.waiting_time_ps) << " ps\n";
  os << "detection = ";
  for (std::size_t i = 0; i < c.detection.size(); ++i) os << (i ? "," : "") << to_string(c.detection[i]);
  os << "\n";
  os << "noise = " << exact(c.noise) << "\n";
  os << "temperature = " << exact(c.temperature_k) << " K\n";
  os << "repetition_rate = " << exact(c.repetition_rate_mhz) << " MHz\n";
  os << "excited_state_absorption = " << (c.excited_state_absorption ? "true" : "false") << "\n";

  os << "\n[level_scheme]\n";
  os << "center = " << exact(c.level_scheme.center_thz) << " THz\n";
  os << "ground_splitting = " << exact(c.level_scheme.ground_splitting_ghz) << " GHz\n";
  os << "excited_splitting = " << exact(c.level_scheme.excited_splitting_ghz) << " GHz\n";
  os << "two_level = " << (c.level_scheme.two_level ? "true" : "false") << "\n";

  const auto& m = c.strain_model;
  os << "\n[strain_model]\n";
  os << "shift = " << exact(m.shift_thz_per_unit) << " THz/strain\n";
  os << "ground_splitting_slope = " << exact(m.ground_splitting_ghz_per_unit) << " GHz/strain\n";
  os << "excited_splitting_slope = " << exact(m.excited_splitting_ghz_per_unit) << " GHz/strain\n";
  os << "bright_yield = " << exact(m.bright_yield) << "\n";
  os << "yield_crossover = " << exact(m.yield_crossover) << " strain\n";
  os << "yield_steepness = " << exact(m.yield_steepness) << "\n";

  os << "\n[laser]\n";
  if (c.laser.shape == LaserShape::Flat) {
    os << "shape = flat\n";
    os << "center = " << exact(c.laser.center_thz) << " THz\n";
  } else {
    os << "shape = gaussian\n";
    os << "center = " << exact(c.laser.center_thz) << " THz\n";
    os << "fwhm = " << exact(c.laser.fwhm_thz) << " THz\n";
  }

  os << "\n[grid]\n";
  os << "tau_points = " << c.grid.n_tau << "\n";
  os << "t_points = " << c.grid.n_t << "\n";
  os << "tau_step = " << exact(c.grid.tau_step_ps) << " ps\n";
  os << "t_step = " << exact(c.grid.t_step_ps) << " ps\n";

  os << "\n[tags]\n";
  for (std::size_t k = 0; k < 4; ++k) os << "nu" << k + 1 << " = " << exact(c.tags.mhz[k]) << " MHz\n";

  for (const auto& p : c.ensemble.components) {
    os << "\n[component." << p.name << "]\n";
    os << "weight = " << exact(p.weight) << "\n";
    os << "level = " << (p.two_level ? "two_level" : "doublet") << "\n";
    os << "strain_shape = "
       << (p.strain.shape == StrainShape::Delta      ? "delta"
           : p.strain.shape == StrainShape::Gaussian ? "gaussian"
                                                     : "lorentzian")
       << "\n";
    os << "strain_center = " << exact(p.strain.center) << " strain\n";
    os << "strain_fwhm = " << exact(p.strain.fwhm) << " strain\n";
    const auto& d = p.dephasing;
    os << "t2_rule = "
       << (d.rule == DephasingRule::Constant ? "constant"
           : d.rule == DephasingRule::Classes ? "classes"
                                              : "lognormal")
       << "\n";
    os << "t2 = " << exact(d.t2_ps) << " ps\n";
    if (!d.classes.empty()) {
      os << "t2_classes = ";
      for (std::size_t i = 0; i < d.classes.size(); ++i)
        os << (i ? ", " : "") << exact(d.classes[i].t2_ps) << " ps " << exact(d.classes[i].weight);
      os << "\n";
    }
    os << "lognormal_median = " << exact(d.lognormal_median_ps) << " ps\n";
    os << "lognormal_sigma = " << exact(d.lognormal_sigma) << "\n";
    os << "yield = " << (p.yield_rule == YieldRule::Fixed ? "fixed" : "strain") << "\n";
    os << "fixed_yield = " << exact(p.fixed_yield) << "\n";
    os << "dipole = " << exact(p.dipole) << "\n";
    os << "t1 = " << exact(p.t1_ns) << " ns\n";
  }

  os << "\n[output]\n";
  os << "dir = " << c.output_dir << "\n";
  os << "pad_factor = " << c.pad_factor << "\n";
  os << "window = " << (c.cosine_window ? "cosine" : "none") << "\n";
  os << "projection = " << to_string(c.projection) << "\n";
  os << "deconvolution_floor = " << exact(c.deconvolution_floor) << "\n";
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a64(serialize_config(config));
}

SynthesisOptions synthesis_options(const ExperimentConfig& c, Detection mode) {
  SynthesisOptions o;
  o.waiting_time_ps = c.waiting_time_ps;
  o.mode = mode;
  o.laser = c.laser;
  o.pathways.include_excited_state_absorption = c.excited_state_absorption;
  o.noise_seed = c.seed * 0x9E3779B97F4A7C15ULL + (mode == Detection::Photoluminescence ? 2 : 1);
  return o;
}

}  // namespace mdcs
