#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "spdc/config.hpp"
#include "spdc/errors.hpp"
#include "spdc/phasematch.hpp"
#include "spdc/quadratic.hpp"
#include "spdc/units.hpp"

namespace spdc {

// --- Monte Carlo verification of the determinant ratio ----------------------

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double effective_samples = 0.0;
  std::size_t samples = 0;
};

namespace detail {

// Reproducible standard normals: Box-Muller over mt19937_64 uniforms. The
// standard library's normal_distribution is implementation-defined, which
// would break the fixed-seed contract across platforms.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

 private:
  double uniform() {
    return (engine_() >> 11) * 0x1.0p-53;  // [0, 1)
  }
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

// Importance-sampling estimate of det(2A)/sqrt(det(M12)). Proposal is the
// Gaussian with matrix diag(A, A); the identity maps of the pairing already
// account for it, so the weight is exp of the two cross-coupled maps only and
// is bounded by 1. The estimate is 2^6 times the mean weight.
inline McEstimate mc_gaussian_purity(const QuadraticForm& a,
                                     const TracePairing& pairing,
                                     std::size_t samples, std::uint64_t seed) {
  a.check_symmetric();
  if (samples < 10000) {
    throw validation_error("mc_gaussian_purity requires at least 1e4 samples");
  }
  Eigen::LLT<Mat6> llt(a.m);
  if (llt.info() != Eigen::Success) {
    throw numerical_error("degenerate proposal: A is not positive definite");
  }
  const Mat6 upper = llt.matrixU();  // A = U^T U

  detail::NormalSource normal(seed);
  detail::KahanSum sum_w, sum_w2;
  Eigen::Matrix<double, 12, 1> sample;
  Vec6 z, arg;
  for (std::size_t i = 0; i < samples; ++i) {
    // Both halves of X drawn from N(0, A^{-1}): x = U^{-1} z.
    for (int half = 0; half < 2; ++half) {
      for (int j = 0; j < 6; ++j) z[j] = normal();
      sample.segment<6>(6 * half) = upper.template triangularView<Eigen::Upper>().solve(z);
    }
    double exponent = 0.0;
    for (int k : {1, 3}) {
      for (int j = 0; j < 6; ++j) arg[j] = sample[pairing.maps[k][j]];
      exponent += (upper * arg).squaredNorm();
    }
    const double w = std::exp(-0.5 * exponent);
    sum_w.add(w);
    sum_w2.add(w * w);
  }
  const double n = static_cast<double>(samples);
  const double mean = sum_w.sum / n;
  const double var = std::max(0.0, sum_w2.sum / n - mean * mean);

  McEstimate e;
  e.samples = samples;
  e.value = 64.0 * mean;
  e.std_error = 64.0 * std::sqrt(var / n);
  e.effective_samples =
      sum_w2.sum > 0.0 ? sum_w.sum * sum_w.sum / sum_w2.sum : 0.0;
  if (e.effective_samples < 0.01 * n) {
    throw numerical_error("importance-sampling proposal too light-tailed: "
                          "effective sample size below 1% of samples");
  }
  return e;
}

// --- Reduced 1+1 dimensional model ------------------------------------------

// Coordinates of the reduced model: y = (q_s^y, Omega_s, q_i^y, Omega_i),
// i.e. the full model with the x-momenta dropped.
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;

inline constexpr std::array<int, 4> reduced_coords = {QSY, OMS, QIY, OMI};

inline QuadraticForm reduced_form(const QuadraticForm& a6) {
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = a6.m(reduced_coords[r], reduced_coords[c]);
  return {m};
}

// Selection maps of the reduced composed forms, same pairing logic as the
// 12-dimensional case with one momentum per photon.
inline std::array<std::array<int, 4>, 4> reduced_maps(TracePairing::Kind kind) {
  if (kind == TracePairing::Kind::IdlerTrace) {
    return {{{0, 1, 2, 3}, {4, 5, 2, 3}, {4, 5, 6, 7}, {0, 1, 6, 7}}};
  }
  return {{{0, 1, 2, 3}, {4, 1, 6, 3}, {4, 5, 6, 7}, {0, 5, 2, 7}}};
}

inline QuadraticForm compose_reduced(const QuadraticForm& a4,
                                     TracePairing::Kind kind) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 8);
  for (const auto& map : reduced_maps(kind)) {
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(map[r], map[c]) += a4.m(r, c);
  }
  return {m};
}

// det(2A4)/sqrt(det(M8)) on the reduced model.
inline double reduced_determinant_purity(const Config& config,
                                         TracePairing::Kind kind) {
  const AssemblyResult asr = assemble_A(config, linearize(config));
  const QuadraticForm a4 = reduced_form(asr.a);
  return purity_from_composed(a4, compose_reduced(a4, kind)).value;
}

struct ReducedModelOptions {
  int grid = 48;                 // points per axis, >= 32
  bool gaussian_variant = false; // true: linearized Gaussian mode function
  TracePairing::Kind kind = TracePairing::Kind::FrequencyTrace;
};

struct ReducedModelResult {
  double purity = 0.0;
  double boundary_ratio = 0.0;   // max boundary density relative to peak
};

// Dense trapezoid quadrature of the purity integral on the reduced model.
// The default mode function is the exact one (true sinc, exact Deltas); the
// Gaussian variant exercises the same quadrature against the 4x4 determinant
// formula. Integration window: 6 marginal standard deviations of the Gaussian
// amplitude envelope per axis.
inline ReducedModelResult reduced_model_purity(const Config& config,
                                               const ReducedModelOptions& opts) {
  if (opts.grid < 32) {
    throw validation_error("reduced_model_purity requires grid >= 32");
  }
  const int g = opts.grid;
  const Linearization lin = linearize(config);
  const AssemblyResult asr = assemble_A(config, lin);
  const QuadraticForm a4 = reduced_form(asr.a);
  const Mat4 cov = a4.m.inverse();

  std::array<std::vector<double>, 4> nodes;
  std::array<std::vector<double>, 4> weights;
  for (int axis = 0; axis < 4; ++axis) {
    const double sigma = std::sqrt(cov(axis, axis));
    const double half = 6.0 * sigma;
    nodes[axis].resize(g);
    weights[axis].assign(g, 2.0 * half / (g - 1));
    for (int i = 0; i < g; ++i) nodes[axis][i] = -half + 2.0 * half * i / (g - 1);
    weights[axis].front() *= 0.5;
    weights[axis].back() *= 0.5;
  }

  const double t0 = asr.pump_duration_fs;
  const double wp2 = config.pump_waist_um * config.pump_waist_um;
  const double bs = std::isfinite(config.filter_s_nm) && config.filter_s_nm > 0.0
                        ? bandwidth_from_wavelength(config.filter_s_nm, config.lambda_s_um)
                        : 0.0;
  const double bi = std::isfinite(config.filter_i_nm) && config.filter_i_nm > 0.0
                        ? bandwidth_from_wavelength(config.filter_i_nm, config.lambda_i_um)
                        : 0.0;

  const auto amplitude = [&](const Vec4& y) -> double {
    if (opts.gaussian_variant) {
      return std::exp(-0.5 * y.dot(a4.m * y));
    }
    Vec6 x = Vec6::Zero();
    for (int j = 0; j < 4; ++j) x[reduced_coords[j]] = y[j];
    const double d0 = delta0_exact(config, x);
    const double dk = deltak_exact(config, x);
    double expo = wp2 / 4.0 * d0 * d0 + t0 * t0 / 4.0 * (y[1] + y[3]) * (y[1] + y[3]);
    const auto collect = [&expo](double w, double q, double extreme) {
      if (std::isinf(w)) {
        expo += 0.5 * extreme * q * q;
      } else if (w > 0.0) {
        expo += w * w * q * q / 2.0;
      }
    };
    collect(config.collection_s_um, y[0], asr.extreme_precision);
    collect(config.collection_i_um, y[2], asr.extreme_precision);
    const auto filter = [&expo, &asr](double dl, double b, double om) {
      if (dl == 0.0) {
        expo += 0.5 * asr.extreme_precision * om * om;
      } else if (b > 0.0) {
        expo += om * om / (2.0 * b * b);
      }
    };
    filter(config.filter_s_nm, bs, y[1]);
    filter(config.filter_i_nm, bi, y[3]);
    const double u = dk * config.length_um / 2.0;
    const double sinc = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
    return std::exp(-expo) * sinc;
  };

  // Kernel matrix of weighted amplitudes: rows and columns group the kept vs
  // traced coordinates. Purity is ||K^T K||_F^2 / ||K||_F^4 for either
  // grouping. Filled directly; no intermediate rank-4 tensor.
  const int gg = g * g;
  Eigen::MatrixXd kernel(gg, gg);
  double peak_density = 0.0;
  double boundary_density = 0.0;
  Vec4 y;
  for (int a = 0; a < g; ++a) {
    y[0] = nodes[0][a];
    for (int b = 0; b < g; ++b) {
      y[1] = nodes[1][b];
      for (int c = 0; c < g; ++c) {
        y[2] = nodes[2][c];
        for (int d = 0; d < g; ++d) {
          y[3] = nodes[3][d];
          const double amp = amplitude(y);
          const double density = amp * amp;
          peak_density = std::max(peak_density, density);
          if (a == 0 || a == g - 1 || b == 0 || b == g - 1 || c == 0 ||
              c == g - 1 || d == 0 || d == g - 1) {
            boundary_density = std::max(boundary_density, density);
          }
          const double w = std::sqrt(weights[0][a] * weights[1][b] *
                                     weights[2][c] * weights[3][d]);
          if (opts.kind == TracePairing::Kind::IdlerTrace) {
            kernel(a * g + b, c * g + d) = amp * w;  // (q_s, Om_s) x (q_i, Om_i)
          } else {
            kernel(a * g + c, b * g + d) = amp * w;  // (q_s, q_i) x (Om_s, Om_i)
          }
        }
      }
    }
  }

  ReducedModelResult result;
  result.boundary_ratio = boundary_density / peak_density;
  if (result.boundary_ratio > 1e-8) {
    throw numerical_error(
        "integration window clips the reduced mode function: boundary density " +
        std::to_string(result.boundary_ratio) + " of peak");
  }

  const Eigen::MatrixXd gram = kernel.transpose() * kernel;
  const double norm2 = gram.trace();
  result.purity = gram.squaredNorm() / (norm2 * norm2);
  return result;
}

// --- Audit of the sinc -> Gaussian approximation ----------------------------

struct DiscrepancyResult {
  double max_deviation = 0.0;
  double l2_relative = 0.0;
};

// Compares sinc(Delta_k L / 2) with exp(-beta^2 Delta_k^2 L^2 / 4) along the
// dk_grad direction over Delta_k in +-4 pi / L. Both profiles depend on
// Delta_k L only, so the result is independent of L.
inline DiscrepancyResult sinc_gaussian_discrepancy(const Config& config, int grid) {
  if (grid < 64) {
    throw validation_error("sinc_gaussian_discrepancy requires grid >= 64");
  }
  double num = 0.0, den = 0.0;
  DiscrepancyResult r;
  for (int i = 0; i < grid; ++i) {
    const double u = -2.0 * pi + 4.0 * pi * i / (grid - 1);  // u = Delta_k L / 2
    const double s = std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u;
    const double gauss = std::exp(-config.beta * config.beta * u * u);
    const double w = (i == 0 || i == grid - 1) ? 0.5 : 1.0;
    num += w * (s - gauss) * (s - gauss);
    den += w * s * s;
    r.max_deviation = std::max(r.max_deviation, std::abs(s - gauss));
  }
  r.l2_relative = std::sqrt(num / den);
  return r;
}

}  // namespace spdc
