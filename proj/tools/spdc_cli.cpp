// Command-line front end: purity evaluation, parameter sweeps, Monte Carlo
// oracle checks. Exit codes: 0 success, 2 usage error, 3 validation error,
// 4 numerical/conditioning error.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spdc/oracle.hpp"
#include "spdc/scenarios.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

struct ConfigSource {
  std::string preset_name;
  std::string config_path;
  // overrides, applied on top (flags > file > preset defaults)
  std::optional<double> dl_nm;
  std::optional<double> ws_um;
  std::optional<double> wp_um;
  std::optional<double> phi_deg;
  std::optional<double> t0_fs;
  bool cw = false;

  spdc::Config resolve() const {
    spdc::Config c;
    if (!preset_name.empty() && !config_path.empty()) {
      throw spdc::validation_error("give --preset or --config, not both");
    }
    if (!preset_name.empty()) {
      c = spdc::preset(preset_name).config;
    } else if (!config_path.empty()) {
      c = spdc::load_config(config_path);
    } else {
      throw spdc::validation_error("a config source is required: --preset or --config");
    }
    if (dl_nm) c.filter_s_nm = c.filter_i_nm = *dl_nm;
    if (ws_um) c.collection_s_um = c.collection_i_um = *ws_um;
    if (wp_um) c.pump_waist_um = *wp_um;
    if (phi_deg) c.phi_s_rad = c.phi_i_rad = spdc::deg_to_rad(*phi_deg);
    if (t0_fs) c.pump_duration_fs = *t0_fs;
    if (cw) c.pump_duration_fs = spdc::infinity;
    c.validate();
    return c;
  }
};

void add_source_flags(CLI::App* cmd, ConfigSource& src) {
  cmd->add_option("--preset", src.preset_name, "named preset (see --help of the top command)");
  cmd->add_option("--config", src.config_path, "config file path");
  cmd->add_option("--dl-nm", src.dl_nm, "override both filter widths, nm (0 or inf allowed)");
  cmd->add_option("--ws-um", src.ws_um, "override both collection widths, um (inf allowed)");
  cmd->add_option("--wp-um", src.wp_um, "override pump waist, um");
  cmd->add_option("--phi-deg", src.phi_deg, "override both emission angles, deg");
  cmd->add_option("--t0-fs", src.t0_fs, "override pump duration, fs");
  cmd->add_flag("--cw", src.cw, "treat the pump as CW");
}

std::string preset_listing() {
  std::string s = "Presets:\n";
  for (const auto& p : spdc::all_presets()) {
    s += "  " + p.name + ": " + p.provenance + "\n";
  }
  return s;
}

void print_report(const spdc::PurityReport& report, bool csv) {
  if (csv) {
    std::printf("purity_spatial_pair,purity_signal,schmidt_K,i_concurrence\n");
    std::printf("%.12g,%.12g,%.12g,%.12g\n", report.purity_spatial_pair,
                report.purity_signal, report.schmidt_K, report.i_concurrence);
    return;
  }
  std::printf("purity_spatial_pair  %.10f\n", report.purity_spatial_pair);
  std::printf("purity_signal        %.10f\n", report.purity_signal);
  std::printf("schmidt_K            %.10f\n", report.schmidt_K);
  std::printf("i_concurrence        %.10f\n", report.i_concurrence);
  std::printf("pivots A             [%.6g, %.6g]\n", report.det_a.min_pivot,
              report.det_a.max_pivot);
  std::printf("pivots B             [%.6g, %.6g]\n", report.det_b.min_pivot,
              report.det_b.max_pivot);
  std::printf("pivots C             [%.6g, %.6g]\n", report.det_c.min_pivot,
              report.det_c.max_pivot);
  if (report.limits_used) {
    std::printf("limit check delta    %.3g\n", report.limit_check_delta);
  }
  if (report.clamped) {
    std::printf("note                 purity overshoot clamped to 1\n");
  }
}

std::filesystem::path resolve_out_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("SPDC_OUT_DIR")) {
      p = std::filesystem::path(dir) / p;
    }
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-frequency purity and entanglement of SPDC photon pairs"};
  app.footer(preset_listing());
  app.require_subcommand(1);

  ConfigSource purity_src;
  bool purity_csv = false;
  auto* cmd_purity = app.add_subcommand("purity", "evaluate one configuration");
  add_source_flags(cmd_purity, purity_src);
  cmd_purity->add_flag("--csv", purity_csv, "emit CSV instead of aligned text");

  ConfigSource sweep_src;
  std::string sweep_param, sweep_out;
  std::optional<double> sweep_from, sweep_to;
  int sweep_steps = 0;
  std::vector<double> sweep_values;
  auto* cmd_sweep = app.add_subcommand("sweep", "sweep one parameter, write CSV");
  add_source_flags(cmd_sweep, sweep_src);
  cmd_sweep->add_option("--param", sweep_param,
                        "collection | filter | pump_waist | phi")->required();
  cmd_sweep->add_option("--from", sweep_from, "first value");
  cmd_sweep->add_option("--to", sweep_to, "last value");
  cmd_sweep->add_option("--steps", sweep_steps, "number of rows");
  cmd_sweep->add_option("--values", sweep_values, "explicit list of values");
  cmd_sweep->add_option("--out", sweep_out, "output CSV path "
                        "(relative paths resolve under $SPDC_OUT_DIR)")->required();

  ConfigSource oracle_src;
  std::size_t oracle_samples = 1000000;
  std::uint64_t oracle_seed = 42;
  auto* cmd_oracle = app.add_subcommand("oracle-check",
                                        "compare determinant path with Monte Carlo");
  add_source_flags(cmd_oracle, oracle_src);
  cmd_oracle->add_option("--samples", oracle_samples, "sample count, >= 1e4");
  cmd_oracle->add_option("--seed", oracle_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (cmd_purity->parsed()) {
      print_report(spdc::evaluate(purity_src.resolve()), purity_csv);
      return 0;
    }

    if (cmd_sweep->parsed()) {
      const spdc::Config config = sweep_src.resolve();
      const auto param = spdc::sweep_parameter_from_name(sweep_param);
      std::vector<double> values = sweep_values;
      if (values.empty()) {
        if (!sweep_from || !sweep_to || sweep_steps < 1) {
          throw spdc::validation_error(
              "give --values, or --from/--to/--steps");
        }
        if (sweep_steps == 1) {
          values.push_back(*sweep_from);
        } else {
          for (int i = 0; i < sweep_steps; ++i) {
            values.push_back(*sweep_from + (*sweep_to - *sweep_from) * i /
                                               (sweep_steps - 1));
          }
        }
      }
      const spdc::SweepTable table = spdc::sweep(config, param, values);
      const std::filesystem::path out = resolve_out_path(sweep_out);
      std::ofstream file(out, std::ios::binary);
      if (!file) {
        std::fprintf(stderr, "error: cannot write %s\n", out.c_str());
        return kExitValidation;
      }
      file << spdc::to_csv(table);
      double lo = 2.0, hi = -1.0;
      std::size_t ok = 0;
      for (const auto& row : table.rows) {
        if (row.status != "ok") continue;
        ++ok;
        lo = std::min(lo, row.report.purity_spatial_pair);
        hi = std::max(hi, row.report.purity_spatial_pair);
      }
      std::printf("%zu rows (%zu ok) -> %s", table.rows.size(), ok,
                  out.string().c_str());
      if (ok > 0) std::printf("; purity_spatial_pair in [%.6g, %.6g]", lo, hi);
      std::printf("\n");
      return 0;
    }

    if (cmd_oracle->parsed()) {
      const spdc::Config config = oracle_src.resolve();
      const spdc::Linearization lin = spdc::linearize(config);
      const auto assembled = spdc::assemble_A(config, lin);
      const auto pairing = spdc::TracePairing::frequency_trace();
      const double det_path = spdc::purity(assembled.a, pairing);
      const auto mc = spdc::mc_gaussian_purity(assembled.a, pairing,
                                               oracle_samples, oracle_seed);
      const double z = (mc.value - det_path) / mc.std_error;
      std::printf("determinant path   %.10f\n", det_path);
      std::printf("monte carlo        %.10f +- %.10f (n = %zu, ess = %.3g)\n",
                  mc.value, mc.std_error, mc.samples, mc.effective_samples);
      std::printf("z-score            %.4f\n", z);
      if (std::abs(z) > 3.0) {
        std::fprintf(stderr, "error: Monte Carlo disagrees with the determinant "
                             "path beyond 3 sigma\n");
        return kExitNumerical;
      }
      return 0;
    }
  } catch (const spdc::validation_error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitValidation;
  } catch (const spdc::numerical_error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitNumerical;
  }
  return kExitUsage;
}
