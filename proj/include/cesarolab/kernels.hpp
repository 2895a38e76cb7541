#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cesarolab/moments.hpp"
#include "cesarolab/weights.hpp"

namespace cesarolab {

// Coefficients c_n = 1 / (2 w_{2n+1}) of the diagonal reproducing kernel
// series sum c_n (conj(z) zeta)^n, stored in log form.
struct KernelCoeffs {
  std::string weight_id;
  std::vector<double> log_c;  // n = 0..N
};

KernelCoeffs kernel_coeffs(const RadialWeight& w, std::size_t count, MomentTable& table);

struct KernelValue {
  std::complex<double> value;
  double tail_bound;  // certified bound on the dropped remainder
  std::size_t terms;
};

// Evaluates the kernel at (z, zeta), |z zeta| < 1, growing the truncation
// until the tail bound drops below tol * |partial sum|. Throws NumericError
// if n_max is reached first.
KernelValue kernel_eval(const RadialWeight& w, std::complex<double> z, std::complex<double> zeta,
                        MomentTable& table, double tol = 1e-12, std::size_t n_max = 1 << 15);

// Truncated series of the averaged kernel K_t(z) = sum kappa_n (t z)^n with
// kappa_n = c_n / (n+1), certified for arguments of modulus <= rho.
struct AveragedKernel {
  std::string weight_id;
  std::vector<double> log_kappa;
  double rho;
  double tail_bound;  // bound on the dropped remainder at modulus rho
};

AveragedKernel averaged_kernel_series(const RadialWeight& w, double rho, MomentTable& table,
                                      double tol = 1e-12, std::size_t n_max = 1 << 15);

// Evaluates a truncated averaged kernel at u = t z with |u| <= rho.
std::complex<double> averaged_kernel_eval(const AveragedKernel& k, std::complex<double> u);

}  // namespace cesarolab
