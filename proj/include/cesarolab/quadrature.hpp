#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace cesarolab {

struct QuadratureConfig {
  double tolerance = 1e-12;  // relative, on the integral value
  int max_level = 12;        // node-density doublings after the coarse pass
};

struct LogQuadResult {
  double log_value;    // natural log of a nonnegative integral (-inf if zero)
  double abs_log_err;  // error bound on log_value == relative error of the value
  int levels = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct ComplexQuadResult {
  std::complex<double> value;
  double rel_err;  // estimated relative error (vs |value|)
  int levels = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Running-max log-domain accumulator for sums of exp(term).
class LogAccumulator {
 public:
  void add(double log_term);
  double log_sum() const;
  bool empty() const { return count_ == 0; }

 private:
  double max_ = -1e308 * 10;  // -inf
  double sum_ = 0.0;          // sum of exp(term - max_)
  std::size_t count_ = 0;
};

// Integral over (0, L) of f >= 0; the callback receives (u, L-u) and returns
// log f. Both arguments are exact in the double-exponential parametrization,
// so endpoint-singular integrands keep full relative accuracy.
LogQuadResult tanh_sinh_log(const std::function<double(double, double)>& log_f, double length,
                            const QuadratureConfig& cfg = {});

// Integral over (0, inf) of g >= 0; the callback receives (v, log v).
LogQuadResult exp_sinh_log(const std::function<double(double, double)>& log_g,
                           const QuadratureConfig& cfg = {});

// Complex-valued integral over (0, L); the callback receives (u, L-u).
ComplexQuadResult tanh_sinh_complex(const std::function<std::complex<double>(double, double)>& f,
                                    double length, const QuadratureConfig& cfg = {});

}  // namespace cesarolab
