#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cesarolab/cesaro.hpp"
#include "cesarolab/moments.hpp"
#include "cesarolab/spaces.hpp"
#include "cesarolab/weights.hpp"

namespace cesarolab {

struct PowerIterationConfig {
  double rel_tol = 1e-8;
  int max_iters = 2000;
  int stable_iters = 3;  // consecutive small changes required
  int threads = 1;
};

struct SectionNormResult {
  double sigma = 0.0;  // largest singular value estimate (always a lower bound)
  int iterations = 0;
  bool converged = false;
};

// Power iteration on S^T S from the deterministic normalized all-ones start;
// the estimate is ||S v|| for the current unit vector v.
SectionNormResult section_norm(const OperatorSection& s, const PowerIterationConfig& cfg = {});

struct ScanThresholds {
  double plateau_ratio_per_doubling = 1.05;
  double growth_slope_threshold = 0.02;  // on log sigma per doubling
  int tail_points = 3;
};

enum class ScanVerdict { BoundedLooking, UnboundedLooking, Inconclusive };

std::string scan_verdict_name(ScanVerdict v);

struct ScanReport {
  std::string weight_label;
  std::string weight_id;
  std::string space_label;
  std::vector<std::size_t> dims;
  std::vector<double> sigmas;
  std::vector<int> iterations;
  std::vector<bool> converged;
  double growth_fit = 0.0;               // log sigma slope per doubling, tail window
  double max_tail_ratio_per_doubling = 1.0;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  ScanThresholds thresholds;
};

ScanReport boundedness_scan(const RadialWeight& w, const SpaceSpec& space,
                            std::span<const std::size_t> dims, MomentTable& table,
                            const PowerIterationConfig& pcfg = {},
                            const ScanThresholds& thresholds = {});

// Running sums S(N) = sum_{n<=N} (n+1) d_n^2 with d_n the coefficients of the
// operator applied to the constant 1, against L(N) = sum_{n<=N} 1/(4(n+1)).
struct DirichletCurve {
  std::vector<double> series_sum;  // S, index n = 0..n_max
  std::vector<double> lower_bound;  // L
};

DirichletCurve dirichlet_divergence(const RadialWeight& w, std::size_t n_max, MomentTable& table);

struct ProbePoint {
  double a;
  std::size_t degree;
  double family_norm;
  double ratio;  // ||C f_a|| / ||f_a||
};

struct ProbeReport {
  std::string weight_label;
  std::string space_label;
  std::vector<ProbePoint> points;
  double min_ratio = 0.0;
};

// Unit-norm localized family swept toward the boundary; ratios staying away
// from zero are the non-compactness signal.
ProbeReport compactness_probe(const RadialWeight& w, const SpaceSpec& space,
                              std::span<const double> a_grid, MomentTable& table,
                              double tail_tol = 1e-6);

struct NecessityReport {
  std::string weight_label;
  std::string space_label;
  std::size_t block_size = 0;               // N
  double moment_ratio = 0.0;                // w_{8N} / w_{12N}
  double fn_ratio = 0.0;                    // ||C f_N||^2 / ||f_N||^2, output degree 8N
  std::vector<std::size_t> m_values;
  std::vector<double> double_sums;          // averaged double sum per M
  std::vector<double> fnm_ratios;           // ||C f_{N,M}||^2 / ||f_{N,M}||^2
};

NecessityReport necessity_functionals(const RadialWeight& w, const SpaceSpec& space, std::size_t N,
                                      std::span<const std::size_t> m_values, MomentTable& table);

// f_N: coefficients w_n^{-1/2} up to degree N, so ||f_N||^2 = N + 1 exactly.
CoefficientSeries family_fn(const SpaceSpec& space, std::size_t N);
// f_{N,M}: all-ones coefficients up to degree M*N.
CoefficientSeries family_fnm(std::size_t N, std::size_t M);
// f_a: coefficients sqrt(1-a^2) a^n w_n^{-1/2}, truncated so the dropped
// norm mass is below tail_tol; unit norm up to that truncation.
CoefficientSeries family_fa(const SpaceSpec& space, double a, double tail_tol = 1e-6);
std::size_t fa_truncation_degree(double a, double tail_tol = 1e-6);

}  // namespace cesarolab
