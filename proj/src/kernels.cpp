#include "cesarolab/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "cesarolab/common.hpp"

namespace cesarolab {

namespace {

double log_c_at(const RadialWeight& w, std::size_t n, MomentTable& table) {
  MomentEntry e = moment(w, static_cast<double>(2 * n + 1), table);
  return -std::log(2.0) - e.log_value;
}

// log w_x is convex in x, so the increments of log c_n are nonincreasing and
// c_{N+m} <= c_N * exp(m * ell) for any ell at least the last increment.
// With q = rho * exp(ell) < 1 the dropped remainder past N is at most
// c_N rho^N q / (1 - q).
double log_tail_bound(const std::vector<double>& log_c, double log_rho, std::size_t upto) {
  const std::size_t window = 4;
  if (upto + 1 < window + 1) return kPosInf;
  double ell = kNegInf;
  for (std::size_t i = upto + 1 - window; i <= upto; ++i) {
    ell = std::max(ell, log_c[i] - log_c[i - 1]);
  }
  const double log_q = log_rho + ell;
  if (!(log_q < 0.0)) return kPosInf;
  return log_c[upto] + static_cast<double>(upto) * log_rho + log_q - std::log1p(-std::exp(log_q));
}

}  // namespace

KernelCoeffs kernel_coeffs(const RadialWeight& w, std::size_t count, MomentTable& table) {
  KernelCoeffs out;
  out.weight_id = w.id();
  out.log_c.resize(count);
  std::vector<double> xs(count);
  for (std::size_t n = 0; n < count; ++n) xs[n] = static_cast<double>(2 * n + 1);
  prefetch_moments(w, xs, table, 1);
  for (std::size_t n = 0; n < count; ++n) out.log_c[n] = log_c_at(w, n, table);
  return out;
}

KernelValue kernel_eval(const RadialWeight& w, std::complex<double> z, std::complex<double> zeta,
                        MomentTable& table, double tol, std::size_t n_max) {
  const std::complex<double> u = std::conj(z) * zeta;
  const double rho = std::abs(u);
  if (!(rho < 1.0)) {
    throw std::invalid_argument("kernel_eval: |conj(z) * zeta| must be below 1");
  }
  const double log_rho = rho == 0.0 ? kNegInf : std::log(rho);

  std::vector<double> log_c;
  std::complex<double> sum{0.0, 0.0};
  std::complex<double> upow{1.0, 0.0};
  constexpr std::size_t kChunk = 64;

  for (std::size_t n = 0;; ++n) {
    if (n >= n_max) {
      throw NumericError("kernel_eval: truncation " + std::to_string(n_max) +
                         " reached before the tail bound met tolerance " +
                         format_double_shortest(tol));
    }
    log_c.push_back(log_c_at(w, n, table));
    sum += std::exp(log_c[n]) * upow;
    if (rho == 0.0) {
      return {sum, 0.0, 1};
    }
    upow *= u;
    if ((n + 1) % kChunk == 0 || n + 1 >= n_max) {
      const double lt = log_tail_bound(log_c, log_rho, n);
      if (lt != kPosInf) {
        const double bound = std::exp(lt);
        if (bound <= tol * std::max(std::abs(sum), 1e-300)) {
          return {sum, bound, n + 1};
        }
      }
    }
  }
}

AveragedKernel averaged_kernel_series(const RadialWeight& w, double rho, MomentTable& table,
                                      double tol, std::size_t n_max) {
  if (!(rho >= 0.0) || !(rho < 1.0)) {
    throw std::invalid_argument("averaged_kernel_series: rho must lie in [0, 1)");
  }
  AveragedKernel out;
  out.weight_id = w.id();
  out.rho = rho;
  const double log_rho = rho == 0.0 ? kNegInf : std::log(rho);

  std::vector<double> log_c;
  constexpr std::size_t kChunk = 64;
  for (std::size_t n = 0;; ++n) {
    if (n >= n_max) {
      throw NumericError("averaged_kernel_series: truncation " + std::to_string(n_max) +
                         " reached before the tail bound met tolerance " +
                         format_double_shortest(tol));
    }
    log_c.push_back(log_c_at(w, n, table));
    if (rho == 0.0 && n >= 1) break;
    if ((n + 1) % kChunk == 0) {
      // kappa_m <= c_m / (n+2) for m > n, so the c-series bound divided by
      // the next index bounds the kappa tail.
      const double lt = log_tail_bound(log_c, log_rho, n);
      if (lt != kPosInf) {
        const double bound = std::exp(lt) / static_cast<double>(n + 2);
        double partial = 0.0;
        for (std::size_t m = 0; m < log_c.size(); ++m) {
          partial += std::exp(log_c[m] + static_cast<double>(m) * log_rho) /
                     static_cast<double>(m + 1);
        }
        if (bound <= tol * std::max(partial, 1e-300)) {
          out.tail_bound = bound;
          break;
        }
      }
    }
  }
  out.log_kappa.resize(log_c.size());
  for (std::size_t n = 0; n < log_c.size(); ++n) {
    out.log_kappa[n] = log_c[n] - std::log1p(static_cast<double>(n));
  }
  return out;
}

std::complex<double> averaged_kernel_eval(const AveragedKernel& k, std::complex<double> u) {
  const double mod = std::abs(u);
  if (mod > k.rho * (1.0 + 1e-12) && mod > 1e-300) {
    throw std::invalid_argument("averaged_kernel_eval: |u| exceeds the certified modulus");
  }
  const double log_mod = mod == 0.0 ? kNegInf : std::log(mod);
  std::complex<double> phase{1.0, 0.0};
  const std::complex<double> step = mod == 0.0 ? std::complex<double>{0.0, 0.0} : u / mod;
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t n = 0; n < k.log_kappa.size(); ++n) {
    const double mag = std::exp(k.log_kappa[n] + x_times_log(static_cast<double>(n), log_mod));
    sum += mag * phase;
    if (mod == 0.0) break;
    phase *= step;
    if ((n & 255u) == 255u) phase /= std::abs(phase);
  }
  return sum;
}

}  // namespace cesarolab
