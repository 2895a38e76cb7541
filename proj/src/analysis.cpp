#include "cesarolab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "cesarolab/common.hpp"
#include "cesarolab/parallel.hpp"

namespace cesarolab {

namespace {

double norm2(std::span<const double> x) {
  return std::sqrt(pairwise_accumulate<double>(0, x.size(), [&](std::size_t i) {
    return x[i] * x[i];
  }));
}

}  // namespace

SectionNormResult section_norm(const OperatorSection& s, const PowerIterationConfig& cfg) {
  const std::size_t n = s.dim;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> u(n, 0.0);
  std::vector<double> back(n, 0.0);

  SectionNormResult out;
  double prev_sigma = -1.0;
  int stable = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    s.apply_to(v, u);
    const double sigma = norm2(u);
    out.iterations = it;
    if (sigma == 0.0) {
      out.sigma = 0.0;
      out.converged = true;
      return out;
    }
    out.sigma = sigma;
    if (prev_sigma >= 0.0 && std::abs(sigma - prev_sigma) <= cfg.rel_tol * sigma) {
      if (++stable >= cfg.stable_iters) {
        out.converged = true;
        return out;
      }
    } else {
      stable = 0;
    }
    prev_sigma = sigma;
    s.apply_transpose_to(u, back);
    const double bn = norm2(back);
    if (bn == 0.0) {
      out.converged = true;
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = back[i] / bn;
  }
  return out;
}

std::string scan_verdict_name(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::BoundedLooking:
      return "bounded-looking";
    case ScanVerdict::UnboundedLooking:
      return "unbounded-looking";
    case ScanVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

ScanReport boundedness_scan(const RadialWeight& w, const SpaceSpec& space,
                            std::span<const std::size_t> dims, MomentTable& table,
                            const PowerIterationConfig& pcfg, const ScanThresholds& thresholds) {
  if (dims.size() < 2) throw std::invalid_argument("boundedness_scan: need at least two sizes");
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) {
      throw std::invalid_argument("boundedness_scan: sizes must be strictly increasing");
    }
  }
  ScanReport rep;
  rep.weight_label = w.label();
  rep.weight_id = w.id();
  rep.space_label = space.label();
  rep.thresholds = thresholds;
  rep.dims.assign(dims.begin(), dims.end());

  for (std::size_t dim : dims) {
    OperatorSection s = matrix_section(w, space, dim, table, pcfg.threads);
    SectionNormResult r = section_norm(s, pcfg);
    rep.sigmas.push_back(r.sigma);
    rep.iterations.push_back(r.iterations);
    rep.converged.push_back(r.converged);
  }

  const std::size_t count = rep.sigmas.size();
  const std::size_t tail_pairs =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(thresholds.tail_points, 1)),
                            count - 1);
  double max_ratio = 0.0;
  for (std::size_t i = count - tail_pairs; i < count; ++i) {
    const double doublings = std::log2(static_cast<double>(rep.dims[i]) /
                                       static_cast<double>(rep.dims[i - 1]));
    const double per_doubling =
        std::exp((std::log(rep.sigmas[i]) - std::log(rep.sigmas[i - 1])) / doublings);
    max_ratio = std::max(max_ratio, per_doubling);
  }
  rep.max_tail_ratio_per_doubling = max_ratio;

  const std::size_t fit_points = tail_pairs + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = count - fit_points; i < count; ++i) {
    const double x = std::log2(static_cast<double>(rep.dims[i]));
    const double y = std::log(rep.sigmas[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = fit_points * sxx - sx * sx;
  rep.growth_fit = denom != 0.0 ? (fit_points * sxy - sx * sy) / denom : 0.0;

  if (max_ratio <= thresholds.plateau_ratio_per_doubling) {
    rep.verdict = ScanVerdict::BoundedLooking;
  } else if (rep.growth_fit > thresholds.growth_slope_threshold) {
    rep.verdict = ScanVerdict::UnboundedLooking;
  } else {
    rep.verdict = ScanVerdict::Inconclusive;
  }
  return rep;
}

DirichletCurve dirichlet_divergence(const RadialWeight& w, std::size_t n_max, MomentTable& table) {
  std::vector<double> xs;
  xs.reserve(2 * (n_max + 1));
  for (std::size_t n = 0; n <= n_max; ++n) {
    xs.push_back(static_cast<double>(n));
    xs.push_back(static_cast<double>(2 * n + 1));
  }
  prefetch_moments(w, xs, table, 1);

  DirichletCurve out;
  out.series_sum.resize(n_max + 1);
  out.lower_bound.resize(n_max + 1);
  double s = 0.0;
  double l = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double np1 = static_cast<double>(n + 1);
    const double log_d = moment(w, static_cast<double>(n), table).log_value - std::log(2.0) -
                         std::log(np1) -
                         moment(w, static_cast<double>(2 * n + 1), table).log_value;
    s += np1 * std::exp(2.0 * log_d);
    l += 0.25 / np1;
    out.series_sum[n] = s;
    out.lower_bound[n] = l;
  }
  return out;
}

std::size_t fa_truncation_degree(double a, double tail_tol) {
  if (!(a > 0.0) || !(a < 1.0)) throw std::invalid_argument("fa_truncation_degree: a in (0,1)");
  if (!(tail_tol > 0.0) || !(tail_tol < 1.0)) {
    throw std::invalid_argument("fa_truncation_degree: tail_tol in (0,1)");
  }
  const double needed = std::log(tail_tol) / (2.0 * std::log(a));
  return static_cast<std::size_t>(std::ceil(needed));
}

CoefficientSeries family_fn(const SpaceSpec& space, std::size_t N) {
  CoefficientSeries f;
  f.coeffs.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    f.coeffs[n] = std::exp(-0.5 * space.log_coeff_weight(n));
  }
  return f;
}

CoefficientSeries family_fnm(std::size_t N, std::size_t M) {
  CoefficientSeries f;
  f.coeffs.assign(M * N + 1, {1.0, 0.0});
  return f;
}

CoefficientSeries family_fa(const SpaceSpec& space, double a, double tail_tol) {
  const std::size_t N = fa_truncation_degree(a, tail_tol);
  const double amp = std::sqrt(1.0 - a * a);
  CoefficientSeries f;
  f.coeffs.resize(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    f.coeffs[n] = amp * std::pow(a, static_cast<double>(n)) *
                  std::exp(-0.5 * space.log_coeff_weight(n));
  }
  return f;
}

ProbeReport compactness_probe(const RadialWeight& w, const SpaceSpec& space,
                              std::span<const double> a_grid, MomentTable& table,
                              double tail_tol) {
  ProbeReport rep;
  rep.weight_label = w.label();
  rep.space_label = space.label();
  double min_ratio = kPosInf;
  for (double a : a_grid) {
    CoefficientSeries fa = family_fa(space, a, tail_tol);
    const double fnorm = space.norm(fa);
    CoefficientSeries g = apply(w, fa, table);
    const double ratio = space.norm(g) / fnorm;
    rep.points.push_back({a, fa.degree(), fnorm, ratio});
    min_ratio = std::min(min_ratio, ratio);
  }
  rep.min_ratio = rep.points.empty() ? 0.0 : min_ratio;
  return rep;
}

NecessityReport necessity_functionals(const RadialWeight& w, const SpaceSpec& space, std::size_t N,
                                      std::span<const std::size_t> m_values, MomentTable& table) {
  if (N == 0) throw std::invalid_argument("necessity_functionals: N must be positive");
  NecessityReport rep;
  rep.weight_label = w.label();
  rep.space_label = space.label();
  rep.block_size = N;
  rep.m_values.assign(m_values.begin(), m_values.end());

  rep.moment_ratio = std::exp(moment(w, 8.0 * static_cast<double>(N), table).log_value -
                              moment(w, 12.0 * static_cast<double>(N), table).log_value);

  {
    CoefficientSeries f = family_fn(space, N);
    const double fnorm2 = static_cast<double>(N + 1);
    CoefficientSeries padded = f;
    padded.coeffs.resize(8 * N + 1, {0.0, 0.0});
    CoefficientSeries g = apply(w, padded, table);
    const double gnorm = space.norm(g);
    rep.fn_ratio = gnorm * gnorm / fnorm2;
  }

  for (std::size_t M : m_values) {
    if (M == 0) throw std::invalid_argument("necessity_functionals: M must be positive");
    const std::size_t top = M * N;
    std::vector<double> cw(top + 1);
    for (std::size_t n = 0; n <= top; ++n) cw[n] = space.coeff_weight(n);
    std::vector<double> suffix(top + 2, 0.0);
    for (std::size_t n = top + 1; n-- > 0;) suffix[n] = suffix[n + 1] + cw[n];
    double dbl = 0.0;
    for (std::size_t k = N; k <= top; ++k) {
      dbl += suffix[k] / static_cast<double>(k + 1);
    }
    rep.double_sums.push_back(dbl / suffix[0]);

    CoefficientSeries f = family_fnm(N, M);
    const double fnorm = space.norm(f);
    CoefficientSeries g = apply(w, f, table);
    const double gnorm = space.norm(g);
    rep.fnm_ratios.push_back((gnorm * gnorm) / (fnorm * fnorm));
  }
  return rep;
}

}  // namespace cesarolab
