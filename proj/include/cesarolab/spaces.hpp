#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cesarolab/moments.hpp"
#include "cesarolab/weights.hpp"

namespace cesarolab {

// Taylor coefficients f_hat(0..degree) of an analytic polynomial.
struct CoefficientSeries {
  std::vector<std::complex<double>> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  std::complex<double> evaluate(std::complex<double> z) const;  // Horner

  // Serialized as a JSON array of [re, im] pairs.
  static CoefficientSeries from_json_text(std::string_view text);
  std::string to_json_text() const;
};

// A coefficient-weighted Hilbert space of analytic functions on the disk:
// either H_gamma (gamma > 0), with coefficient weight (n+1)^{1-gamma}, or the
// Bergman space of a radial weight mu, with coefficient weight 2 mu_{2n+1}.
class SpaceSpec {
 public:
  static SpaceSpec hgamma(double gamma);
  static SpaceSpec bergman(const RadialWeight& mu, QuadratureConfig qc = {});
  // "hgamma:G" or "bergman:WEIGHT"
  static SpaceSpec parse(std::string_view text, QuadratureConfig qc = {});

  bool is_hgamma() const { return is_hgamma_; }
  double gamma() const;
  const RadialWeight& mu() const;
  MomentTable& mu_table() const;

  const std::string& label() const { return label_; }

  double log_coeff_weight(std::size_t n) const;
  double coeff_weight(std::size_t n) const;

  double norm(const CoefficientSeries& f) const;

 private:
  SpaceSpec() = default;

  bool is_hgamma_ = true;
  double gamma_ = 1.0;
  std::shared_ptr<RadialWeight> mu_;
  std::shared_ptr<MomentTable> mu_table_;
  std::string label_;
};

// Integral-form H_gamma norm of a polynomial, exact per coefficient:
// |f(0)|^2 + sum_n n^2 |f_hat(n)|^2 * 2 B(2n, gamma+1), square-rooted.
double exact_hgamma_norm(const CoefficientSeries& f, double gamma);

// Taylor coefficients of (1 - z)^{-gamma}, computed by the ratio recurrence.
std::vector<double> hgamma_kernel_coeffs(double gamma, std::size_t count);

}  // namespace cesarolab
