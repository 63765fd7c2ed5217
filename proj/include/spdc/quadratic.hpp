#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/phasematch.hpp"
#include "spdc/units.hpp"

namespace spdc {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// Symmetric positive-definite form of the Gaussian mode function. dim is 6 for
// the single-amplitude matrix A and 12 for the composed matrices B and C; the
// coordinate order is x = (q_s^x, q_s^y, Omega_s, q_i^x, q_i^y, Omega_i) and
// X = (x, x') for dim 12.
struct QuadraticForm {
  Eigen::MatrixXd m;

  int dim() const { return static_cast<int>(m.rows()); }

  void check_symmetric() const {
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw validation_error("quadratic form is not symmetric");
    }
  }
};

struct DetResult {
  double log_det = 0.0;
  double min_pivot = 0.0;
  double max_pivot = 0.0;
  bool positive_definite = false;
};

// log-determinant via a pivoted symmetric factorization; flags non-positive
// pivots. The matrix is Jacobi-equilibrated first (coordinates carry mixed
// units, so raw pivots would reflect unit choices, not conditioning), and the
// log-space result keeps large filter precisions representable.
inline DetResult det_pd(const QuadraticForm& form) {
  form.check_symmetric();
  DetResult r;
  const Eigen::VectorXd diag = form.m.diagonal();
  if (diag.minCoeff() <= 0.0) {
    r.min_pivot = diag.minCoeff();
    r.max_pivot = diag.maxCoeff();
    return r;
  }
  const Eigen::VectorXd inv_scale = diag.array().rsqrt();
  const Eigen::MatrixXd scaled =
      inv_scale.asDiagonal() * form.m * inv_scale.asDiagonal();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
  const auto d = ldlt.vectorD();
  r.min_pivot = d.minCoeff();
  r.max_pivot = d.maxCoeff();
  r.positive_definite = r.min_pivot > 0.0;
  if (r.positive_definite) {
    r.log_det = d.array().log().sum() + diag.array().log().sum();
  }
  return r;
}

// Which of the four mode-function factors in the purity integrand sees primed
// coordinates. Each map lists, per row of the 6-vector argument, the index
// into the 12-coordinate vector X = (x, x').
struct TracePairing {
  enum class Kind { FrequencyTrace, IdlerTrace, MomentumTrace };
  Kind kind = Kind::FrequencyTrace;
  std::array<std::array<int, 6>, 4> maps{};

  // Tr over frequency: primed momenta share unprimed frequencies.
  static TracePairing frequency_trace() {
    return {Kind::FrequencyTrace,
            {{{0, 1, 2, 3, 4, 5},
              {6, 7, 2, 9, 10, 5},
              {6, 7, 8, 9, 10, 11},
              {0, 1, 8, 3, 4, 11}}}};
  }
  // Tr over the idler photon: primed signal shares unprimed idler.
  static TracePairing idler_trace() {
    return {Kind::IdlerTrace,
            {{{0, 1, 2, 3, 4, 5},
              {6, 7, 8, 3, 4, 5},
              {6, 7, 8, 9, 10, 11},
              {0, 1, 2, 9, 10, 11}}}};
  }
  // Tr over momentum: primed frequencies share unprimed momenta.
  static TracePairing momentum_trace() {
    return {Kind::MomentumTrace,
            {{{0, 1, 2, 3, 4, 5},
              {0, 1, 8, 3, 4, 11},
              {6, 7, 8, 9, 10, 11},
              {6, 7, 2, 9, 10, 5}}}};
  }
};

// M12 = sum_k S_k^T A S_k over the four selection maps.
inline QuadraticForm compose_traced_form(const QuadraticForm& a,
                                         const TracePairing& pairing) {
  a.check_symmetric();
  Mat12 m = Mat12::Zero();
  for (const auto& map : pairing.maps) {
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        m(map[r], map[c]) += a.m(r, c);
      }
    }
  }
  return {m};
}

// Angular-frequency filter bandwidth (rad/fs) from a half width at 1/e in
// wavelength: B = pi c dlambda / (lambda^2 sqrt(ln 2)).
inline double bandwidth_from_wavelength(double delta_lambda_nm, double lambda_um) {
  if (delta_lambda_nm < 0.0) {
    throw validation_error("filter width must be >= 0");
  }
  if (lambda_um <= 0.0) {
    throw validation_error("wavelength must be > 0");
  }
  return pi * speed_of_light * (delta_lambda_nm * 1e-3) /
         (lambda_um * lambda_um * std::sqrt(std::numbers::ln2));
}

// Numerical stand-in for exact limits (B_n = 0, w_n = inf, CW pump): the
// limiting term gets precision limit_factor times the largest finite diagonal
// entry. Evaluations repeat at 4x the factor and must agree (see evaluate()).
inline constexpr double default_limit_factor = 1e6;

struct AssemblyResult {
  QuadraticForm a;
  bool has_limits = false;       // any extreme-value substitution present
  double pump_duration_fs = 0.0; // T0 actually used (finite also for CW)
  double extreme_precision = 0.0; // precision substituted for exact limits
};

// Builds the 6x6 matrix of the Gaussian mode function as a sum of rank-one
// terms 2 gamma c c^T, one per Gaussian factor of the mode function.
inline AssemblyResult assemble_A(const Config& config, const Linearization& lin,
                                 double limit_factor = default_limit_factor) {
  config.validate();
  Mat6 m = Mat6::Zero();
  const auto add = [&m](double gamma, const Vec6& c) {
    m += 2.0 * gamma * (c * c.transpose());
  };
  const auto unit = [](int i) {
    Vec6 e = Vec6::Zero();
    e[i] = 1.0;
    return e;
  };

  const double wp2 = config.pump_waist_um * config.pump_waist_um;
  add(wp2 / 4.0, unit(QSX) + unit(QIX));   // pump transverse, x
  add(wp2 / 4.0, lin.d0_grad);             // pump transverse, y (Delta_0)
  const double bl = config.beta * config.length_um;
  add(bl * bl / 4.0, lin.dk_grad);         // phase matching, sinc -> Gaussian

  AssemblyResult result;
  if (!config.cw_pump()) {
    const double t0 = config.pump_duration_fs;
    add(t0 * t0 / 4.0, unit(OMS) + unit(OMI));
    result.pump_duration_fs = t0;
  }
  const auto add_collection = [&](double w, int ix, int iy) {
    if (std::isfinite(w) && w > 0.0) {
      add(w * w / 2.0, unit(ix));
      add(w * w / 2.0, unit(iy));
    }
  };
  add_collection(config.collection_s_um, QSX, QSY);
  add_collection(config.collection_i_um, QIX, QIY);
  const auto add_filter = [&](double dl_nm, double lambda, int io) {
    if (std::isfinite(dl_nm) && dl_nm > 0.0) {
      const double b = bandwidth_from_wavelength(dl_nm, lambda);
      add(1.0 / (2.0 * b * b), unit(io));
    }
  };
  add_filter(config.filter_s_nm, config.lambda_s_um, OMS);
  add_filter(config.filter_i_nm, config.lambda_i_um, OMI);

  if (!m.allFinite()) {
    throw numerical_error("non-finite entries while assembling the mode-function form");
  }

  // Numerical limits, all at the same extreme precision.
  const double extreme = limit_factor * m.diagonal().maxCoeff();
  result.extreme_precision = extreme;
  if (config.cw_pump()) {
    // CW pump: finite T0 with a pump bandwidth 1e3x narrower than the
    // narrowest analysis filter; without finite filters, fall back to the
    // extreme precision. Scaling with the limit factor makes the limit
    // re-evaluation in evaluate() a doubling-T0 check.
    const double scale = std::sqrt(limit_factor / default_limit_factor);
    double b_min = infinity;
    for (const auto& [dl, lambda] :
         {std::pair{config.filter_s_nm, config.lambda_s_um},
          std::pair{config.filter_i_nm, config.lambda_i_um}}) {
      if (std::isfinite(dl) && dl > 0.0) {
        b_min = std::min(b_min, bandwidth_from_wavelength(dl, lambda));
      }
    }
    const double t0 = std::isfinite(b_min)
                          ? 1e3 * std::sqrt(2.0) / b_min * scale
                          : std::sqrt(2.0 * extreme);
    add(t0 * t0 / 4.0, unit(OMS) + unit(OMI));
    result.pump_duration_fs = t0;
    result.has_limits = true;
  }
  const auto limit_collection = [&](double w, int ix, int iy) {
    if (std::isinf(w)) {
      add(extreme / 2.0, unit(ix));
      add(extreme / 2.0, unit(iy));
      result.has_limits = true;
    }
  };
  limit_collection(config.collection_s_um, QSX, QSY);
  limit_collection(config.collection_i_um, QIX, QIY);
  if (config.filter_s_nm == 0.0) {
    add(extreme / 2.0, unit(OMS));
    result.has_limits = true;
  }
  if (config.filter_i_nm == 0.0) {
    add(extreme / 2.0, unit(OMI));
    result.has_limits = true;
  }

  result.a = QuadraticForm{m};
  return result;
}

struct PurityResult {
  double value = 0.0;
  bool clamped = false;          // overshoot in (1, 1 + 1e-9] clamped to 1
  DetResult det_a;
  DetResult det_composed;
};

// Tr(rho^2) = det(2A) / sqrt(det(M)) for a composed double-dimension form.
// Works for any dimension pair (d, 2d); the library uses 6/12 and the reduced
// model 4/8.
inline PurityResult purity_from_composed(const QuadraticForm& a,
                                         const QuadraticForm& composed) {
  PurityResult r;
  r.det_a = det_pd(a);
  if (!r.det_a.positive_definite) {
    throw numerical_error("mode-function form is not positive definite");
  }
  r.det_composed = det_pd(composed);
  if (!r.det_composed.positive_definite) {
    throw numerical_error("composed 12x12 form is not positive definite");
  }
  for (const DetResult* d : {&r.det_a, &r.det_composed}) {
    if (d->max_pivot / d->min_pivot > 1e12) {
      throw numerical_error(
          "ill-conditioned quadratic form: pivot ratio " +
          std::to_string(d->max_pivot / d->min_pivot));
    }
  }
  const double log_det_2a = a.dim() * std::numbers::ln2 + r.det_a.log_det;
  r.value = std::exp(log_det_2a - 0.5 * r.det_composed.log_det);
  if (r.value > 1.0) {
    if (r.value > 1.0 + 1e-9) {
      throw numerical_error("purity overshoot " + std::to_string(r.value) +
                            " exceeds rounding tolerance");
    }
    r.value = 1.0;
    r.clamped = true;
  }
  return r;
}

inline PurityResult purity_detailed(const QuadraticForm& a, const TracePairing& pairing) {
  return purity_from_composed(a, compose_traced_form(a, pairing));
}

inline double purity(const QuadraticForm& a, const TracePairing& pairing) {
  return purity_detailed(a, pairing).value;
}

// Schmidt number K = 1/purity and I-concurrence C = sqrt(2 (1 - purity)).
inline std::pair<double, double> entanglement_measures(double purity_signal) {
  if (!(purity_signal > 0.0) || purity_signal > 1.0) {
    throw validation_error("purity must lie in (0, 1]");
  }
  return {1.0 / purity_signal, std::sqrt(2.0 * (1.0 - purity_signal))};
}

// The four scalar outputs plus conditioning diagnostics.
struct PurityReport {
  double purity_spatial_pair = 0.0;
  double purity_signal = 0.0;
  double schmidt_K = 1.0;
  double i_concurrence = 0.0;
  DetResult det_a;
  DetResult det_b;               // frequency-trace composition
  DetResult det_c;               // idler-trace composition
  bool clamped = false;
  bool limits_used = false;
  double limit_check_delta = 0.0; // max purity change when limit factor x4
};

// Full pipeline: linearize, assemble, evaluate both determinant ratios.
// When numerical limits are present the evaluation repeats with a 4x stronger
// extreme value; disagreement beyond 1e-4 raises a limit-handling error.
inline PurityReport evaluate(const Config& config) {
  const Linearization lin = linearize(config);
  const AssemblyResult asm1 = assemble_A(config, lin);
  const PurityResult pq = purity_detailed(asm1.a, TracePairing::frequency_trace());
  const PurityResult ps = purity_detailed(asm1.a, TracePairing::idler_trace());

  PurityReport report;
  report.purity_spatial_pair = pq.value;
  report.purity_signal = ps.value;
  std::tie(report.schmidt_K, report.i_concurrence) = entanglement_measures(ps.value);
  report.det_a = pq.det_a;
  report.det_b = pq.det_composed;
  report.det_c = ps.det_composed;
  report.clamped = pq.clamped || ps.clamped;
  report.limits_used = asm1.has_limits || config.cw_pump();

  if (report.limits_used) {
    const AssemblyResult asm2 = assemble_A(config, lin, 4.0 * default_limit_factor);
    const double pq2 = purity(asm2.a, TracePairing::frequency_trace());
    report.limit_check_delta = std::abs(pq2 - pq.value);
    if (!config.cw_pump()) {
      // The signal purity is excluded from the check for a CW pump: a
      // monochromatic pump carries unbounded frequency entanglement, so
      // purity_signal has no finite T0 -> inf limit and is reported at the
      // documented regularization instead.
      const double ps2 = purity(asm2.a, TracePairing::idler_trace());
      report.limit_check_delta =
          std::max(report.limit_check_delta, std::abs(ps2 - ps.value));
    }
    if (report.limit_check_delta > 1e-4) {
      throw numerical_error(
          "extreme-value limit not converged: purity shifts by " +
          std::to_string(report.limit_check_delta) + " under a 4x stronger limit");
    }
  }
  return report;
}

}  // namespace spdc
