#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cesarolab {

// Parse failure in the weight DSL, space labels, or series files.
// position() is a byte offset into the offending text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Quadrature non-convergence, series truncation failure, or value-range
// breakage (entry overflow). Carries a human-readable context string.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

// Magnitude limits for matrix assembly: entries with log below the flush
// threshold become exact zeros (counted); above the overflow threshold the
// assembly fails, since exp() would leave double range.
inline constexpr double kLogFlushThreshold = -700.0;
inline constexpr double kLogOverflowThreshold = 709.0;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a64(std::string_view s);
std::string fnv1a64_hex(std::string_view s);

// Shortest decimal string that round-trips to the same double.
std::string format_double_shortest(double v);
// 17 significant digits, scientific; round-trips exactly.
std::string format_double_17(double v);

// log(e^a + e^b), tolerant of -inf arguments.
double logsumexp2(double a, double b);

// x * l with the convention 0 * (-inf) == 0, used for r^x factors in log space.
inline double x_times_log(double x, double l) { return x == 0.0 ? 0.0 : x * l; }

double log_gamma_pos(double x);   // log Gamma(x), x > 0
double log_beta(double a, double b);

// Deterministic summation: the reduction tree depends only on the index
// range, never on thread count or data values.
template <class T, class F>
T pairwise_accumulate(std::size_t begin, std::size_t end, F&& f) {
  const std::size_t n = end - begin;
  if (n <= 64) {
    T s{};
    for (std::size_t i = begin; i < end; ++i) s += f(i);
    return s;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_accumulate<T>(begin, mid, f) + pairwise_accumulate<T>(mid, end, f);
}

double pairwise_sum(std::span<const double> xs);

}  // namespace cesarolab
