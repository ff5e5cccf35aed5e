#include "fsstokes/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fsstokes {

namespace {

struct Entry {
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const Entry& e, const std::string& key) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ConfigError("'" + key + "' expects a number, got '" + e.value + "'", e.line);
  }
  return v;
}

long long to_integer(const Entry& e, const std::string& key) {
  const char* begin = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
  }
  return v;
}

std::size_t to_count(const Entry& e, const std::string& key) {
  const long long v = to_integer(e, key);
  if (v < 1) {
    throw ConfigError("'" + key + "' must be at least 1", e.line);
  }
  return static_cast<std::size_t>(v);
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + e.value + "'", e.line);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "case", "scheme", "dt", "dt_years", "t_final", "t_final_years", "dt_max", "dt_max_years",
      "nx", "ny", "seed", "source", "bed_level", "step_amplitude", "step_half_width", "rho", "g",
      "mu0", "p", "delta", "epsilon", "edge_stabilization", "coupling_tol", "max_outer",
      "picard_tol", "max_picard", "csv", "vtk_dir", "vtk_every"};
  return keys;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) {
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value'", line);
    }
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (!known_keys().count(key)) {
      throw ConfigError("unknown key '" + key + "'", line);
    }
    if (value.empty()) {
      throw ConfigError("missing value for '" + key + "'", line);
    }
    if (entries.count(key)) {
      throw ConfigError("duplicate key '" + key + "'", line);
    }
    entries[key] = {value, line};
  }

  auto require = [&](const std::string& key) -> const Entry& {
    auto it = entries.find(key);
    if (it == entries.end()) {
      throw ConfigError("missing required key '" + key + "'", 0);
    }
    return it->second;
  };
  auto find = [&](const std::string& key) -> const Entry* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  SimConfig cfg;
  const Entry& case_entry = require("case");
  if (case_entry.value == "tank") {
    cfg.problem = tank_case(false);
  } else if (case_entry.value == "greenland-synthetic") {
    cfg.problem = greenland_synthetic_case(1);
  } else {
    throw ConfigError("unknown case '" + case_entry.value + "'", case_entry.line);
  }
  const bool years = cfg.problem.units == UnitSystem::si_years;

  const Entry& scheme_entry = require("scheme");
  try {
    cfg.scheme = parse_scheme(scheme_entry.value);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), scheme_entry.line);
  }

  auto time_key = [&](const std::string& key, double& target) {
    const Entry* plain = find(key);
    const Entry* yr = find(key + "_years");
    if (plain && yr) {
      throw ConfigError("both '" + key + "' and '" + key + "_years' given", yr->line);
    }
    if (yr) {
      if (!years) {
        throw ConfigError("'" + key + "_years' needs a case in SI-years units", yr->line);
      }
      target = to_double(*yr, key + "_years") * seconds_per_year;
      return true;
    }
    if (plain) {
      target = to_double(*plain, key);
      return true;
    }
    return false;
  };
  if (!time_key("dt", cfg.dt)) {
    throw ConfigError("missing required key 'dt'", 0);
  }
  time_key("t_final", cfg.problem.t_final);
  time_key("dt_max", cfg.dt_max);

  CaseConfig& pc = cfg.problem;
  if (const Entry* e = find("nx")) pc.nx = to_count(*e, "nx");
  if (const Entry* e = find("ny")) pc.ny = to_count(*e, "ny");
  if (const Entry* e = find("seed")) pc.seed = static_cast<std::uint64_t>(to_integer(*e, "seed"));
  if (const Entry* e = find("source")) {
    if (e->value == "none") {
      pc.source_enabled = false;
    } else if (e->value == "tank" && pc.kind == CaseKind::tank) {
      pc.source_enabled = true;
    } else {
      throw ConfigError("source '" + e->value + "' not available for this case", e->line);
    }
  }
  if (const Entry* e = find("bed_level")) pc.bed_level = to_double(*e, "bed_level");
  if (const Entry* e = find("step_amplitude")) pc.step_amplitude = to_double(*e, "step_amplitude");
  if (const Entry* e = find("step_half_width")) pc.step_half_width = to_double(*e, "step_half_width");
  if (const Entry* e = find("rho")) pc.fluid.rho = to_double(*e, "rho");
  if (const Entry* e = find("g")) pc.fluid.g = to_double(*e, "g");
  if (const Entry* e = find("mu0")) pc.fluid.mu0 = to_double(*e, "mu0");
  if (const Entry* e = find("p")) pc.fluid.p = to_double(*e, "p");
  if (const Entry* e = find("delta")) pc.fluid.delta = to_double(*e, "delta");
  if (const Entry* e = find("epsilon")) cfg.epsilon = to_double(*e, "epsilon");
  if (const Entry* e = find("edge_stabilization"))
    cfg.edge_stabilization = to_bool(*e, "edge_stabilization");
  if (const Entry* e = find("coupling_tol")) cfg.coupling_tol = to_double(*e, "coupling_tol");
  if (const Entry* e = find("max_outer")) cfg.max_outer = static_cast<int>(to_count(*e, "max_outer"));
  if (const Entry* e = find("picard_tol")) cfg.picard_tol = to_double(*e, "picard_tol");
  if (const Entry* e = find("max_picard"))
    cfg.max_picard = static_cast<int>(to_count(*e, "max_picard"));
  if (const Entry* e = find("csv")) cfg.output.csv_path = e->value;
  if (const Entry* e = find("vtk_dir")) cfg.output.vtk_dir = e->value;
  if (const Entry* e = find("vtk_every"))
    cfg.output.vtk_every = static_cast<int>(to_count(*e, "vtk_every"));
  rebuild_case(pc);

  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what(), 0);
  }
  return cfg;
}

std::string serialize_config(const SimConfig& cfg) {
  const CaseConfig& pc = cfg.problem;
  std::ostringstream out;
  out.precision(17);
  out << "case = " << (pc.kind == CaseKind::tank ? "tank" : "greenland-synthetic") << "\n";
  out << "scheme = " << scheme_name(cfg.scheme) << "\n";
  out << "dt = " << cfg.dt << "\n";
  out << "t_final = " << pc.t_final << "\n";
  out << "dt_max = " << cfg.dt_max << "\n";
  out << "nx = " << pc.nx << "\n";
  out << "ny = " << pc.ny << "\n";
  if (pc.kind == CaseKind::tank) {
    out << "source = " << (pc.source_enabled ? "tank" : "none") << "\n";
    out << "bed_level = " << pc.bed_level << "\n";
    out << "step_amplitude = " << pc.step_amplitude << "\n";
    out << "step_half_width = " << pc.step_half_width << "\n";
  } else {
    out << "seed = " << pc.seed << "\n";
  }
  out << "rho = " << pc.fluid.rho << "\n";
  out << "g = " << pc.fluid.g << "\n";
  out << "mu0 = " << pc.fluid.mu0 << "\n";
  out << "p = " << pc.fluid.p << "\n";
  out << "delta = " << pc.fluid.delta << "\n";
  out << "epsilon = " << cfg.epsilon << "\n";
  out << "edge_stabilization = " << (cfg.edge_stabilization ? "true" : "false") << "\n";
  out << "coupling_tol = " << cfg.coupling_tol << "\n";
  out << "max_outer = " << cfg.max_outer << "\n";
  out << "picard_tol = " << cfg.picard_tol << "\n";
  out << "max_picard = " << cfg.max_picard << "\n";
  if (!cfg.output.csv_path.empty()) out << "csv = " << cfg.output.csv_path << "\n";
  if (!cfg.output.vtk_dir.empty()) out << "vtk_dir = " << cfg.output.vtk_dir << "\n";
  out << "vtk_every = " << cfg.output.vtk_every << "\n";
  return out.str();
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'", 0);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace fsstokes
