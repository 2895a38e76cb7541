#include "cesarolab/common.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace cesarolab {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view s) {
  std::uint64_t h = fnv1a64(s);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

std::string format_double_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double_17(double v) {
  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%.16e", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

double logsumexp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = a > b ? a : b;
  double d = (a > b ? b : a) - m;
  return m + std::log1p(std::exp(d));
}

double log_gamma_pos(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

namespace {

// Stirling tail: log Gamma(z) = (z-1/2) log z - z + log(2 pi)/2 + tail(z).
double stirling_tail(double z) {
  const double z2 = z * z;
  double inv = 1.0 / z;
  double s = inv / 12.0;
  inv /= z2;
  s -= inv / 360.0;
  inv /= z2;
  s += inv / 1260.0;
  inv /= z2;
  s -= inv / 1680.0;
  inv /= z2;
  s += inv / 1188.0;
  return s;
}

}  // namespace

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("log_beta: arguments must be positive");
  if (a > b) std::swap(a, b);
  if (b < 40.0) return log_gamma_pos(a) + log_gamma_pos(b) - log_gamma_pos(a + b);
  // Large b: the naive lgamma difference cancels ~log-gamma magnitudes and
  // loses absolute accuracy; expand log Gamma(b) - log Gamma(a+b) instead.
  return log_gamma_pos(a) - (b - 0.5) * std::log1p(a / b) - a * std::log(a + b) + a +
         stirling_tail(b) - stirling_tail(a + b);
}

double pairwise_sum(std::span<const double> xs) {
  return pairwise_accumulate<double>(0, xs.size(), [&](std::size_t i) { return xs[i]; });
}

}  // namespace cesarolab
