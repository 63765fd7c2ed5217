#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/quadratic.hpp"

namespace spdc {

struct Preset {
  std::string name;
  Config config;
  std::string provenance;
};

namespace detail {

inline Config liio3_base() {
  Config c;
  c.crystal = make_liio3();
  c.length_um = 1000.0;
  c.lambda_p_um = 0.405;
  c.lambda_s_um = 0.810;
  c.lambda_i_um = 0.810;
  c.walkoff_rad = 0.0;
  c.alpha_rad = 0.0;
  return c;
}

inline double pump_duration_from_bandwidth(double dl_nm, double lambda_um) {
  // Pump spectral amplitude exp(-T0^2 Omega^2 / 4) has 1/e half width
  // sqrt(2)/T0 in Omega.
  return std::sqrt(2.0) / bandwidth_from_wavelength(dl_nm, lambda_um);
}

}  // namespace detail

inline std::vector<Preset> all_presets() {
  std::vector<Preset> presets;

  {
    Config c = detail::liio3_base();
    c.pump_waist_um = 400.0;
    c.pump_duration_fs = infinity;
    c.collection_s_um = c.collection_i_um = 400.0;
    c.filter_s_nm = c.filter_i_nm = 1.0;
    c.phi_s_rad = c.phi_i_rad = deg_to_rad(10.0);
    presets.push_back({"fig2", c,
                       "LiIO3 1 mm, 405 nm -> 2x810 nm at 10 deg, w_p = 400 um, "
                       "1 nm filters, no walk-off; CW pump (none stated)"});
    presets.push_back({"fig4", c,
                       "signal-purity view of the fig2 setup, same parameters"});
  }

  for (double wp : {30.0, 462.0}) {
    for (double ws : {133.0, 48.0}) {
      Config c = detail::liio3_base();
      c.pump_waist_um = wp;
      c.pump_duration_fs = detail::pump_duration_from_bandwidth(0.4, 0.405);
      c.collection_s_um = c.collection_i_um = ws;
      c.filter_s_nm = c.filter_i_nm = 0.2;
      c.phi_s_rad = c.phi_i_rad = deg_to_rad(17.0);
      std::string name = "valencia_w" + std::to_string(static_cast<int>(wp));
      if (ws != 133.0) name += "_ws48";
      presets.push_back({name, c,
                         "diode-pumped LiIO3 at 17 deg, 0.4 nm pump bandwidth, "
                         "0.2 nm monochromators; the printed collection width "
                         "reads 133,48 um, both values exposed"});
    }
  }

  {
    Config c;
    c.crystal = make_bbo();
    c.length_um = 1500.0;
    c.lambda_p_um = 0.405;
    c.lambda_s_um = c.lambda_i_um = 0.810;
    c.pump_waist_um = 5000.0;  // w_p >> L regime
    c.pump_duration_fs = infinity;
    c.collection_s_um = c.collection_i_um = 100.0;
    c.filter_s_nm = c.filter_i_nm = 10.0;
    c.phi_s_rad = c.phi_i_rad = 0.0;
    c.walkoff_rad = 0.0;
    presets.push_back({"teich", c,
                       "collinear CW-pumped 1.5 mm BBO, 10 nm filters; "
                       "w_p >> L realized as 5 mm"});
  }

  {
    Config c;
    c.crystal = make_bbo();
    c.length_um = 2000.0;
    c.lambda_p_um = 0.3511;
    c.lambda_s_um = c.lambda_i_um = 0.7022;  // forced degenerate
    c.pump_waist_um = 20.0;
    c.pump_duration_fs = infinity;
    c.collection_s_um = c.collection_i_um = 100.0;
    c.filter_s_nm = c.filter_i_nm = 10.0;
    c.phi_s_rad = c.phi_i_rad = deg_to_rad(4.0);
    c.walkoff_rad = 0.0;
    presets.push_back({"altman", c,
                       "2 mm BBO pumped at 351.1 nm with a 20 um waist, 4 deg, "
                       "10 nm filters; signal/idler wavelength set to 702.2 nm "
                       "so energy conservation closes"});
  }

  {
    Config c = detail::liio3_base();
    c.pump_waist_um = 400.0;
    c.pump_duration_fs = 100.0;  // pulsed pump assumed for the waist scans
    c.phi_s_rad = c.phi_i_rad = deg_to_rad(10.0);
    c.filter_s_nm = c.filter_i_nm = 10.0;
    c.collection_s_um = c.collection_i_um = infinity;
    presets.push_back({"fig5a", c,
                       "pump-waist scan, 10 nm filters, single-q collection"});
    c.collection_s_um = c.collection_i_um = 400.0;
    c.filter_s_nm = c.filter_i_nm = 0.0;
    presets.push_back({"fig5b", c,
                       "pump-waist scan, narrow-band filters, 400 um collection"});
    c.filter_s_nm = c.filter_i_nm = 10.0;
    presets.push_back({"fig5c", c,
                       "pump-waist scan, 10 nm filters, 400 um collection"});
  }

  return presets;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : all_presets()) names.push_back(p.name);
  return names;
}

inline Preset preset(const std::string& name) {
  const auto presets = all_presets();
  for (const auto& p : presets) {
    if (p.name == name) return p;
  }
  std::string valid;
  for (const auto& p : presets) valid += (valid.empty() ? "" : ", ") + p.name;
  throw validation_error("unknown preset '" + name + "'; valid names: " + valid);
}

// --- Config files -----------------------------------------------------------
//
// Flat key-value text, one `key = value` per line, `#` comments. Keys carry
// unit suffixes (_um, _nm, _fs, _deg, _rad). See README.md, "Config files".

namespace detail {

inline double parse_number(const std::string& s, int line) {
  if (s == "inf" || s == "infinity") return infinity;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw validation_error("line " + std::to_string(line) +
                           ": cannot parse number '" + s + "'");
  }
}

struct KeyValue {
  std::string value;
  int line = 0;
  bool used = false;
};

class ConfigReader {
 public:
  std::map<std::string, KeyValue> entries;

  std::optional<double> number(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    it->second.used = true;
    return parse_number(it->second.value, it->second.line);
  }

  // Value under any of the unit-suffixed variants, converted to the first
  // listed unit. Supplying more than one variant is ambiguous.
  std::optional<double> with_units(const std::vector<std::pair<std::string, double>>& variants) {
    std::optional<double> result;
    std::string found;
    for (const auto& [key, factor] : variants) {
      if (auto v = number(key)) {
        if (result) {
          throw validation_error("keys '" + found + "' and '" + key +
                                 "' are alternatives; give exactly one");
        }
        result = *v * factor;
        found = key;
      }
    }
    return result;
  }

  std::optional<std::string> text(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }
};

}  // namespace detail

inline Config parse_config(std::istream& in) {
  detail::ConfigReader reader;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (strip(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw validation_error("line " + std::to_string(lineno) +
                             ": expected 'key = value'");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw validation_error("line " + std::to_string(lineno) +
                             ": expected 'key = value'");
    }
    if (reader.entries.count(key)) {
      throw validation_error("line " + std::to_string(lineno) +
                             ": duplicate key '" + key + "'");
    }
    reader.entries[key] = {value, lineno, false};
  }

  Config c;
  const auto crystal = reader.text("crystal");
  if (!crystal) throw validation_error("missing key 'crystal'");
  if (*crystal == "LiIO3") {
    c.crystal = make_liio3();
  } else if (*crystal == "BBO") {
    c.crystal = make_bbo();
  } else {
    throw validation_error("unknown crystal '" + *crystal + "' (LiIO3 or BBO)");
  }

  const auto require = [](std::optional<double> v, const std::string& what) {
    if (!v) throw validation_error("missing key '" + what + "'");
    return *v;
  };
  c.length_um = require(reader.with_units({{"length_um", 1.0}, {"length_mm", 1e3}}),
                        "length_um");

  const auto lp = reader.with_units({{"lambda_p_um", 1.0}, {"lambda_p_nm", 1e-3}});
  const auto ls = reader.with_units({{"lambda_s_um", 1.0}, {"lambda_s_nm", 1e-3}});
  const auto li = reader.with_units({{"lambda_i_um", 1.0}, {"lambda_i_nm", 1e-3}});
  const int have = lp.has_value() + ls.has_value() + li.has_value();
  if (have < 2) {
    throw validation_error(
        "at most one wavelength may be omitted: energy-conservation closure "
        "1/lambda_p = 1/lambda_s + 1/lambda_i needs the other two");
  }
  c.lambda_p_um = lp ? *lp : 1.0 / (1.0 / *ls + 1.0 / *li);
  c.lambda_s_um = ls ? *ls : 1.0 / (1.0 / *lp - 1.0 / *li);
  c.lambda_i_um = li ? *li : 1.0 / (1.0 / *lp - 1.0 / *ls);

  c.pump_waist_um = require(reader.number("pump_waist_um"), "pump_waist_um");

  const auto t0 = reader.number("pump_duration_fs");
  const auto dlp = reader.number("pump_bandwidth_nm");
  if (t0 && dlp) {
    throw validation_error(
        "give exactly one of pump_duration_fs and pump_bandwidth_nm");
  }
  if (dlp) {
    c.pump_duration_fs = *dlp == 0.0
                             ? infinity
                             : detail::pump_duration_from_bandwidth(*dlp, c.lambda_p_um);
  } else if (t0) {
    c.pump_duration_fs = *t0;
  } else {
    throw validation_error(
        "give exactly one of pump_duration_fs and pump_bandwidth_nm "
        "(inf / 0 for a CW pump)");
  }

  const auto joint = [&reader](const std::string& joint_key, const std::string& s_key,
                               const std::string& i_key, double& s_out, double& i_out) {
    const auto j = reader.number(joint_key);
    const auto s = reader.number(s_key);
    const auto i = reader.number(i_key);
    if (j && (s || i)) {
      throw validation_error("'" + joint_key + "' excludes '" + s_key + "'/'" +
                             i_key + "'");
    }
    if (j) {
      s_out = i_out = *j;
    } else if (s && i) {
      s_out = *s;
      i_out = *i;
    } else if (s || i) {
      throw validation_error("give both '" + s_key + "' and '" + i_key +
                             "', or '" + joint_key + "'");
    }
  };
  joint("collection_um", "collection_s_um", "collection_i_um",
        c.collection_s_um, c.collection_i_um);
  joint("filter_nm", "filter_s_nm", "filter_i_nm", c.filter_s_nm, c.filter_i_nm);

  const auto angle = [&reader](const std::string& base) {
    return reader.with_units({{base + "_rad", 1.0}, {base + "_deg", pi / 180.0}});
  };
  if (const auto phi = angle("phi")) {
    c.phi_s_rad = c.phi_i_rad = *phi;
  } else {
    c.phi_s_rad = angle("phi_s").value_or(0.0);
    c.phi_i_rad = angle("phi_i").value_or(0.0);
  }
  c.alpha_rad = angle("alpha").value_or(0.0);

  if (const auto w = reader.text("walkoff")) {
    if (*w != "computed") {
      throw validation_error("'walkoff' accepts only 'computed'; "
                             "use walkoff_rad/_deg for a manual value");
    }
    c.walkoff_rad = std::nullopt;
  } else if (const auto rho = angle("walkoff")) {
    c.walkoff_rad = *rho;
  } else {
    c.walkoff_rad = 0.0;
  }
  if (const auto theta = angle("theta_cut")) c.theta_cut_rad = *theta;
  c.beta = reader.number("beta").value_or(0.455);

  for (const auto& [key, entry] : reader.entries) {
    if (!entry.used) {
      throw validation_error("line " + std::to_string(entry.line) +
                             ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("file not found: " + path);
  try {
    return parse_config(in);
  } catch (const validation_error& err) {
    throw validation_error(path + ": " + err.what());
  }
}

inline std::string emit_config(const Config& c) {
  std::ostringstream out;
  out.precision(17);
  const auto num = [](double v) {
    if (std::isinf(v)) return std::string("inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "crystal = " << c.crystal.display_name() << "\n";
  out << "length_um = " << num(c.length_um) << "\n";
  out << "lambda_p_um = " << num(c.lambda_p_um) << "\n";
  out << "lambda_s_um = " << num(c.lambda_s_um) << "\n";
  out << "lambda_i_um = " << num(c.lambda_i_um) << "\n";
  out << "pump_waist_um = " << num(c.pump_waist_um) << "\n";
  out << "pump_duration_fs = " << num(c.pump_duration_fs) << "\n";
  out << "collection_s_um = " << num(c.collection_s_um) << "\n";
  out << "collection_i_um = " << num(c.collection_i_um) << "\n";
  out << "filter_s_nm = " << num(c.filter_s_nm) << "\n";
  out << "filter_i_nm = " << num(c.filter_i_nm) << "\n";
  out << "phi_s_rad = " << num(c.phi_s_rad) << "\n";
  out << "phi_i_rad = " << num(c.phi_i_rad) << "\n";
  out << "alpha_rad = " << num(c.alpha_rad) << "\n";
  if (c.walkoff_rad) {
    out << "walkoff_rad = " << num(*c.walkoff_rad) << "\n";
  } else {
    out << "walkoff = computed\n";
  }
  if (c.theta_cut_rad) out << "theta_cut_rad = " << num(*c.theta_cut_rad) << "\n";
  out << "beta = " << num(c.beta) << "\n";
  return out.str();
}

// --- Parameter sweeps -------------------------------------------------------

enum class SweepParameter { Collection, Filter, PumpWaist, Phi };

inline SweepParameter sweep_parameter_from_name(const std::string& name) {
  if (name == "collection") return SweepParameter::Collection;
  if (name == "filter") return SweepParameter::Filter;
  if (name == "pump_waist") return SweepParameter::PumpWaist;
  if (name == "phi") return SweepParameter::Phi;
  throw validation_error("parameter '" + name +
                         "' is not sweepable; choose one of "
                         "collection, filter, pump_waist, phi");
}

inline std::string sweep_parameter_unit(SweepParameter p) {
  switch (p) {
    case SweepParameter::Filter: return "nm";
    case SweepParameter::Phi: return "rad";
    default: return "um";
  }
}

inline std::string sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::Collection: return "collection";
    case SweepParameter::Filter: return "filter";
    case SweepParameter::PumpWaist: return "pump_waist";
    default: return "phi";
  }
}

struct SweepRow {
  double abscissa = 0.0;
  PurityReport report;
  std::string status = "ok";  // rows that error carry the failure kind
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::Collection;
  std::vector<SweepRow> rows;
};

inline Config with_sweep_value(Config config, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::Collection:
      config.collection_s_um = config.collection_i_um = value;
      break;
    case SweepParameter::Filter:
      config.filter_s_nm = config.filter_i_nm = value;
      break;
    case SweepParameter::PumpWaist:
      config.pump_waist_um = value;
      break;
    case SweepParameter::Phi:
      config.phi_s_rad = config.phi_i_rad = value;
      break;
  }
  return config;
}

inline SweepTable sweep(const Config& config, SweepParameter parameter,
                        const std::vector<double>& values) {
  if (values.empty()) throw validation_error("sweep needs at least one value");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw validation_error("sweep values must be strictly increasing");
    }
  }
  SweepTable table;
  table.parameter = parameter;
  for (double v : values) {
    SweepRow row;
    row.abscissa = v;
    try {
      row.report = evaluate(with_sweep_value(config, parameter, v));
    } catch (const validation_error& err) {
      row.status = std::string("validation: ") + err.what();
    } catch (const numerical_error& err) {
      row.status = std::string("numerical: ") + err.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string to_csv(const SweepTable& table) {
  std::ostringstream out;
  out << sweep_parameter_name(table.parameter) << " ("
      << sweep_parameter_unit(table.parameter)
      << "),purity_spatial_pair,purity_signal,schmidt_K,i_concurrence,status\n";
  char buf[64];
  const auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (const auto& row : table.rows) {
    out << num(row.abscissa) << ",";
    if (row.status == "ok") {
      out << num(row.report.purity_spatial_pair) << ","
          << num(row.report.purity_signal) << "," << num(row.report.schmidt_K)
          << "," << num(row.report.i_concurrence);
    } else {
      out << ",,,";
    }
    std::string status = row.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << "," << status << "\n";
  }
  return out.str();
}

}  // namespace spdc
