#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spdc/scenarios.hpp"

using namespace spdc;

TEST_CASE("preset catalogue") {
  const auto names = preset_names();
  for (const char* expected :
       {"fig2", "fig4", "valencia_w30", "valencia_w462", "valencia_w30_ws48",
        "valencia_w462_ws48", "teich", "altman", "fig5a", "fig5b", "fig5c"}) {
    CAPTURE(expected);
    CHECK(std::count(names.begin(), names.end(), expected) == 1);
  }
  CHECK_THROWS_AS(preset("fig3"), validation_error);
  for (const auto& p : all_presets()) {
    CAPTURE(p.name);
    CHECK_NOTHROW(p.config.validate());
    CHECK_FALSE(p.provenance.empty());
  }
}

TEST_CASE("preset parameters") {
  {
    const Config c = preset("fig2").config;
    CHECK(c.crystal.name == CrystalName::LiIO3);
    CHECK(c.length_um == 1000.0);
    CHECK(c.lambda_p_um == 0.405);
    CHECK(c.lambda_s_um == 0.810);
    CHECK(c.phi_s_rad == doctest::Approx(deg_to_rad(10.0)));
    CHECK(c.pump_waist_um == 400.0);
    CHECK(c.filter_s_nm == 1.0);
    CHECK(c.cw_pump());
    CHECK(c.walkoff_rad == 0.0);
  }
  {
    const Config c = preset("teich").config;
    CHECK(c.crystal.name == CrystalName::BBO);
    CHECK(c.length_um == 1500.0);
    CHECK(c.phi_s_rad == 0.0);
    CHECK(c.phi_i_rad == 0.0);
    CHECK(c.cw_pump());
  }
  {
    const Config c = preset("altman").config;
    CHECK(c.lambda_p_um == 0.3511);
    CHECK(c.lambda_s_um == doctest::Approx(0.7022));
    CHECK(c.pump_waist_um == 20.0);
    CHECK(c.phi_s_rad == doctest::Approx(deg_to_rad(4.0)));
  }
  {
    const Config c = preset("valencia_w30").config;
    CHECK(c.pump_waist_um == 30.0);
    CHECK(c.collection_s_um == 133.0);
    CHECK(c.filter_s_nm == 0.2);
    CHECK(c.phi_s_rad == doctest::Approx(deg_to_rad(17.0)));
    // 0.4 nm pump bandwidth at 405 nm
    CHECK(c.pump_duration_fs ==
          doctest::Approx(std::sqrt(2.0) / bandwidth_from_wavelength(0.4, 0.405))
              .epsilon(1e-12));
    CHECK(preset("valencia_w462").config.pump_waist_um == 462.0);
    CHECK(preset("valencia_w30_ws48").config.collection_s_um == 48.0);
  }
  {
    CHECK(std::isinf(preset("fig5a").config.collection_s_um));
    CHECK(preset("fig5b").config.filter_s_nm == 0.0);
    CHECK(preset("fig5c").config.filter_s_nm == 10.0);
    CHECK(preset("fig5c").config.collection_s_um == 400.0);
    CHECK(preset("fig5a").config.pump_duration_fs == 100.0);
  }
}

TEST_CASE("config round trip through emit and parse") {
  for (const auto& p : all_presets()) {
    CAPTURE(p.name);
    std::istringstream in(emit_config(p.config));
    const Config c = parse_config(in);
    CHECK(c.crystal.name == p.config.crystal.name);
    CHECK(c.length_um == doctest::Approx(p.config.length_um).epsilon(1e-9));
    CHECK(c.lambda_p_um == doctest::Approx(p.config.lambda_p_um).epsilon(1e-9));
    CHECK(c.pump_waist_um == doctest::Approx(p.config.pump_waist_um).epsilon(1e-9));
    if (p.config.cw_pump()) {
      CHECK(c.cw_pump());
    } else {
      CHECK(c.pump_duration_fs ==
            doctest::Approx(p.config.pump_duration_fs).epsilon(1e-9));
    }
    CHECK(c.collection_s_um == p.config.collection_s_um);
    CHECK(c.filter_s_nm == doctest::Approx(p.config.filter_s_nm).scale(1.0).epsilon(1e-9));
    CHECK(c.phi_s_rad == doctest::Approx(p.config.phi_s_rad).scale(1.0).epsilon(1e-12));
    CHECK(c.walkoff_rad.has_value() == p.config.walkoff_rad.has_value());
  }
}

TEST_CASE("config parsing: units and closure") {
  {
    std::istringstream in(
        "crystal = LiIO3\n"
        "length_mm = 1\n"
        "lambda_p_nm = 405\n"
        "lambda_s_nm = 810\n"
        "pump_waist_um = 400\n"
        "pump_bandwidth_nm = 0.4\n"
        "phi_deg = 17\n");
    const Config c = parse_config(in);
    CHECK(c.length_um == doctest::Approx(1000.0));
    CHECK(c.lambda_p_um == doctest::Approx(0.405));
    CHECK(c.lambda_i_um == doctest::Approx(0.810).epsilon(1e-12));  // derived
    CHECK(c.phi_s_rad == doctest::Approx(deg_to_rad(17.0)));
    CHECK(std::isfinite(c.pump_duration_fs));
  }
  {
    std::istringstream in(
        "crystal = BBO\n"
        "length_um = 1500   # comment\n"
        "lambda_p_um = 0.405\n"
        "lambda_s_um = 0.810\n"
        "lambda_i_um = 0.810\n"
        "pump_waist_um = 5000\n"
        "pump_duration_fs = inf\n"
        "collection_um = 100\n"
        "filter_nm = 10\n"
        "walkoff = computed\n");
    const Config c = parse_config(in);
    CHECK(c.cw_pump());
    CHECK(c.collection_i_um == 100.0);
    CHECK(c.filter_i_nm == 10.0);
    CHECK_FALSE(c.walkoff_rad.has_value());
  }
}

TEST_CASE("config parsing: errors") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  const std::string base =
      "crystal = LiIO3\nlength_um = 1000\nlambda_p_um = 0.405\n"
      "lambda_s_um = 0.810\nlambda_i_um = 0.810\npump_waist_um = 400\n"
      "pump_duration_fs = inf\n";
  CHECK_NOTHROW(parse(base));
  CHECK_THROWS_AS(parse(base + "bogus_key = 1\n"), validation_error);
  CHECK_THROWS_AS(parse(base + "phi_deg = 10\nphi_rad = 0.1\n"), validation_error);
  CHECK_THROWS_AS(parse(base + "pump_bandwidth_nm = 0.4\n"), validation_error);
  CHECK_THROWS_AS(parse(base + "collection_um = 100\ncollection_s_um = 50\n"),
                  validation_error);
  CHECK_THROWS_AS(parse(base + "collection_s_um = 50\n"), validation_error);
  CHECK_THROWS_AS(parse(base + "length_um = 2\n"), validation_error);  // duplicate
  CHECK_THROWS_AS(parse(base + "nonsense line\n"), validation_error);
  CHECK_THROWS_AS(parse(base + "filter_nm = abc\n"), validation_error);
  CHECK_THROWS_AS(parse("crystal = KDP\n" + base.substr(base.find('\n') + 1)),
                  validation_error);
  // not enough wavelengths for closure
  CHECK_THROWS_AS(parse("crystal = LiIO3\nlength_um = 1000\n"
                        "lambda_p_um = 0.405\npump_waist_um = 400\n"
                        "pump_duration_fs = inf\n"),
                  validation_error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), validation_error);
  // error messages carry line numbers
  try {
    parse(base + "bogus_key = 1\n");
    FAIL("expected validation_error");
  } catch (const validation_error& err) {
    CHECK(std::string(err.what()).find("line 8") != std::string::npos);
  }
}

TEST_CASE("sweep: values, statuses and rows") {
  const Config base = preset("fig2").config;
  SweepTable t = sweep(base, SweepParameter::Collection, {100.0, 400.0, 1000.0});
  REQUIRE(t.rows.size() == 3);
  for (const auto& row : t.rows) CHECK(row.status == "ok");
  CHECK(t.rows[0].abscissa == 100.0);
  CHECK(t.rows[0].report.purity_spatial_pair <
        t.rows[2].report.purity_spatial_pair);

  CHECK_THROWS_AS(sweep(base, SweepParameter::Collection, {}), validation_error);
  CHECK_THROWS_AS(sweep(base, SweepParameter::Collection, {2.0, 1.0}),
                  validation_error);

  // an invalid row is flagged, not fatal
  SweepTable bad = sweep(base, SweepParameter::PumpWaist, {-5.0, 400.0});
  CHECK(bad.rows[0].status != "ok");
  CHECK(bad.rows[0].status.find("validation") == 0);
  CHECK(bad.rows[1].status == "ok");
}

TEST_CASE("sweep parameter names and units") {
  CHECK(sweep_parameter_from_name("collection") == SweepParameter::Collection);
  CHECK(sweep_parameter_from_name("pump_waist") == SweepParameter::PumpWaist);
  CHECK_THROWS_AS(sweep_parameter_from_name("length"), validation_error);
  CHECK(sweep_parameter_unit(SweepParameter::Filter) == "nm");
  CHECK(sweep_parameter_unit(SweepParameter::Phi) == "rad");
  CHECK(sweep_parameter_name(SweepParameter::Phi) == "phi");
}

TEST_CASE("with_sweep_value targets the right field") {
  const Config base = preset("fig2").config;
  CHECK(with_sweep_value(base, SweepParameter::Collection, 7.0).collection_i_um == 7.0);
  CHECK(with_sweep_value(base, SweepParameter::Filter, 7.0).filter_s_nm == 7.0);
  CHECK(with_sweep_value(base, SweepParameter::PumpWaist, 7.0).pump_waist_um == 7.0);
  CHECK(with_sweep_value(base, SweepParameter::Phi, 0.1).phi_i_rad == 0.1);
}

TEST_CASE("csv output") {
  const Config base = preset("fig2").config;
  SweepTable t = sweep(base, SweepParameter::Collection, {100.0, 400.0});
  const std::string csv = to_csv(t);
  CHECK(csv.find("collection (um),purity_spatial_pair,purity_signal,"
                 "schmidt_K,i_concurrence,status\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(csv.find(",ok\n") != std::string::npos);
  // byte-identical across runs
  CHECK(to_csv(sweep(base, SweepParameter::Collection, {100.0, 400.0})) == csv);

  // flagged rows keep empty value cells and their status loses commas
  SweepTable bad = sweep(base, SweepParameter::PumpWaist, {-5.0});
  const std::string bad_csv = to_csv(bad);
  CHECK(bad_csv.find(",,,,") != std::string::npos);
  const auto body = bad_csv.substr(bad_csv.find('\n') + 1);
  CHECK(std::count(body.begin(), body.end(), ',') == 5);
}
