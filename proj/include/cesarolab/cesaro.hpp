#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cesarolab/kernels.hpp"
#include "cesarolab/moments.hpp"
#include "cesarolab/spaces.hpp"
#include "cesarolab/weights.hpp"

namespace cesarolab {

// Coefficient form of the operator, acting through the square section of the
// input's degree: g_hat(n) = w_n * sum_{k<=n} f_hat(k) / (2 (n-k+1) w_{2(n-k)+1}).
CoefficientSeries apply(const RadialWeight& w, const CoefficientSeries& f, MomentTable& table);

// Integral form at a point: int_0^1 f(t z) K_t(z) w(t) dt, evaluated by
// complex double-exponential quadrature per additive measure atom of w.
std::complex<double> apply_integral(const RadialWeight& w, const CoefficientSeries& f,
                                    std::complex<double> z, MomentTable& table,
                                    const QuadratureConfig& qc = {});

// Finite section of the operator in the orthonormal coordinates of a space:
// S[n,k] = M[n,k] * sqrt(w_n / w_k), lower triangular, packed row-major.
struct OperatorSection {
  std::string weight_label;
  std::string weight_id;
  std::string space_label;
  std::size_t dim = 0;
  std::vector<double> entries;  // row n starts at n(n+1)/2, length n+1
  std::size_t flushed_to_zero = 0;

  double entry(std::size_t n, std::size_t k) const { return entries[n * (n + 1) / 2 + k]; }
  void apply_to(std::span<const double> x, std::span<double> y) const;            // y = S x
  void apply_transpose_to(std::span<const double> x, std::span<double> y) const;  // y = S^T x
};

// Entries whose log magnitude falls below kLogFlushThreshold become exact
// zeros (counted in flushed_to_zero); above kLogOverflowThreshold the
// assembly throws NumericError identifying the entry.
OperatorSection matrix_section(const RadialWeight& w, const SpaceSpec& space, std::size_t dim,
                               MomentTable& table, int threads = 1);

// CSV dump: one "# {json metadata}" line, a header, then n,k,value rows with
// shortest round-trip formatting.
std::string section_to_csv(const OperatorSection& s);

}  // namespace cesarolab
