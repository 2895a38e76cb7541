#include "cesarolab/spaces.hpp"

#include <cmath>

#include <json.hpp>

#include "cesarolab/common.hpp"

namespace cesarolab {

using ordered_json = nlohmann::ordered_json;

std::complex<double> CoefficientSeries::evaluate(std::complex<double> z) const {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    acc = acc * z + coeffs[i];
  }
  return acc;
}

CoefficientSeries CoefficientSeries::from_json_text(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("series JSON: ") + e.what(), e.byte);
  }
  if (!j.is_array() || j.empty()) {
    throw ParseError("series JSON must be a nonempty array of [re, im] pairs", 0);
  }
  CoefficientSeries f;
  f.coeffs.reserve(j.size());
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
      throw ParseError("series JSON entries must be [re, im] number pairs", 0);
    }
    f.coeffs.emplace_back(item[0].get<double>(), item[1].get<double>());
  }
  return f;
}

std::string CoefficientSeries::to_json_text() const {
  ordered_json j = ordered_json::array();
  for (const auto& c : coeffs) {
    j.push_back(ordered_json::array({c.real(), c.imag()}));
  }
  return j.dump();
}

SpaceSpec SpaceSpec::hgamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument(
        "hgamma: gamma must be positive (gamma = 0 is not an admissible operator domain)");
  }
  SpaceSpec s;
  s.is_hgamma_ = true;
  s.gamma_ = gamma;
  s.label_ = "hgamma:" + format_double_shortest(gamma);
  return s;
}

SpaceSpec SpaceSpec::bergman(const RadialWeight& mu, QuadratureConfig qc) {
  SpaceSpec s;
  s.is_hgamma_ = false;
  s.mu_ = std::make_shared<RadialWeight>(mu);
  s.mu_table_ = std::make_shared<MomentTable>(mu, qc);
  s.label_ = "bergman:" + mu.label();
  return s;
}

SpaceSpec SpaceSpec::parse(std::string_view text, QuadratureConfig qc) {
  constexpr std::string_view kH = "hgamma:";
  constexpr std::string_view kB = "bergman:";
  if (text.substr(0, kH.size()) == kH) {
    std::string_view num = text.substr(kH.size());
    double g = 0.0;
    try {
      std::size_t used = 0;
      g = std::stod(std::string(num), &used);
      if (used != num.size()) throw std::invalid_argument("trailing");
    } catch (const std::invalid_argument&) {
      throw ParseError("space: expected a number after 'hgamma:'", kH.size());
    } catch (const std::out_of_range&) {
      throw ParseError("space: gamma out of range", kH.size());
    }
    return hgamma(g);  // domain violations keep their own message
  }
  if (text.substr(0, kB.size()) == kB) {
    RadialWeight mu = RadialWeight::parse(text.substr(kB.size()));
    return bergman(mu, qc);
  }
  throw ParseError("space must be 'hgamma:GAMMA' or 'bergman:WEIGHT'", 0);
}

double SpaceSpec::gamma() const {
  if (!is_hgamma_) throw std::logic_error("gamma() on a Bergman space");
  return gamma_;
}

const RadialWeight& SpaceSpec::mu() const {
  if (is_hgamma_) throw std::logic_error("mu() on an hgamma space");
  return *mu_;
}

MomentTable& SpaceSpec::mu_table() const {
  if (is_hgamma_) throw std::logic_error("mu_table() on an hgamma space");
  return *mu_table_;
}

double SpaceSpec::log_coeff_weight(std::size_t n) const {
  if (is_hgamma_) {
    return (1.0 - gamma_) * std::log1p(static_cast<double>(n));
  }
  MomentEntry e = moment(*mu_, static_cast<double>(2 * n + 1), *mu_table_);
  return std::log(2.0) + e.log_value;
}

double SpaceSpec::coeff_weight(std::size_t n) const { return std::exp(log_coeff_weight(n)); }

double SpaceSpec::norm(const CoefficientSeries& f) const {
  const std::size_t n = f.coeffs.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = log_coeff_weight(i);
  const double sq = pairwise_accumulate<double>(0, n, [&](std::size_t i) {
    return std::exp(w[i]) * std::norm(f.coeffs[i]);
  });
  return std::sqrt(sq);
}

double exact_hgamma_norm(const CoefficientSeries& f, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("exact_hgamma_norm: gamma must be positive");
  const std::size_t n = f.coeffs.size();
  double sq = n > 0 ? std::norm(f.coeffs[0]) : 0.0;
  sq += pairwise_accumulate<double>(1, n, [&](std::size_t i) {
    const double di = static_cast<double>(i);
    return di * di * std::norm(f.coeffs[i]) *
           2.0 * std::exp(log_beta(2.0 * di, gamma + 1.0));
  });
  return std::sqrt(sq);
}

std::vector<double> hgamma_kernel_coeffs(double gamma, std::size_t count) {
  if (!(gamma > 0.0)) throw std::invalid_argument("hgamma_kernel_coeffs: gamma must be positive");
  std::vector<double> c(count);
  if (count == 0) return c;
  c[0] = 1.0;
  for (std::size_t n = 0; n + 1 < count; ++n) {
    const double dn = static_cast<double>(n);
    c[n + 1] = c[n] * (dn + gamma) / (dn + 1.0);
  }
  return c;
}

}  // namespace cesarolab
