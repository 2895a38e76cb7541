#include "cesarolab/cesaro.hpp"

#include <atomic>
#include <cmath>
#include <mutex>

#include <json.hpp>

#include "cesarolab/common.hpp"
#include "cesarolab/parallel.hpp"

namespace cesarolab {

namespace {

// log of d_m = 1 / (2 (m+1) w_{2m+1}).
std::vector<double> log_diag_terms(const RadialWeight& w, std::size_t count, MomentTable& table) {
  std::vector<double> xs(count);
  for (std::size_t m = 0; m < count; ++m) xs[m] = static_cast<double>(2 * m + 1);
  prefetch_moments(w, xs, table, 1);
  std::vector<double> out(count);
  for (std::size_t m = 0; m < count; ++m) {
    out[m] = -std::log(2.0) - std::log1p(static_cast<double>(m)) -
             moment(w, xs[m], table).log_value;
  }
  return out;
}

std::vector<double> log_weight_moments(const RadialWeight& w, std::size_t count,
                                       MomentTable& table) {
  std::vector<double> xs(count);
  for (std::size_t n = 0; n < count; ++n) xs[n] = static_cast<double>(n);
  prefetch_moments(w, xs, table, 1);
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = moment(w, xs[n], table).log_value;
  return out;
}

struct Range {
  double lo = kPosInf;
  double hi = kNegInf;
  void note(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

Range range_of(const std::vector<double>& xs) {
  Range r;
  for (double v : xs) r.note(v);
  return r;
}

}  // namespace

CoefficientSeries apply(const RadialWeight& w, const CoefficientSeries& f, MomentTable& table) {
  const std::size_t count = f.coeffs.size();
  CoefficientSeries g;
  g.coeffs.assign(count, {0.0, 0.0});
  if (count == 0) return g;

  const std::vector<double> lw = log_weight_moments(w, count, table);
  const std::vector<double> ld = log_diag_terms(w, count, table);

  // When every factor and every product stays inside double range, the two
  // exponentials can be taken once per index instead of once per term.
  const Range rw = range_of(lw);
  const Range rd = range_of(ld);
  const bool fast = rw.lo > -680.0 && rw.hi < 680.0 && rd.lo > -680.0 && rd.hi < 680.0 &&
                    rw.hi + rd.hi < 700.0 && rw.lo + rd.lo > -740.0;
  if (fast) {
    std::vector<double> wv(count), dv(count);
    for (std::size_t i = 0; i < count; ++i) {
      wv[i] = std::exp(lw[i]);
      dv[i] = std::exp(ld[i]);
    }
    for (std::size_t n = 0; n < count; ++n) {
      const std::complex<double> inner = pairwise_accumulate<std::complex<double>>(
          0, n + 1, [&](std::size_t k) { return f.coeffs[k] * dv[n - k]; });
      g.coeffs[n] = wv[n] * inner;
    }
    return g;
  }
  for (std::size_t n = 0; n < count; ++n) {
    g.coeffs[n] = pairwise_accumulate<std::complex<double>>(0, n + 1, [&](std::size_t k) {
      return f.coeffs[k] * std::exp(lw[n] + ld[n - k]);
    });
  }
  return g;
}

namespace {

// Additive decomposition of the measure w(t) dt: a scale factor per atom.
struct MeasureAtom {
  const WeightExpr* atom;
  double log_scale;
};

void collect_atoms(const WeightExpr& e, double log_scale, std::vector<MeasureAtom>& out) {
  switch (e.kind) {
    case WeightKind::Scale:
      collect_atoms(*e.a, log_scale + std::log(e.p1), out);
      return;
    case WeightKind::Sum:
      collect_atoms(*e.a, log_scale, out);
      collect_atoms(*e.b, log_scale, out);
      return;
    default:
      out.push_back({&e, log_scale});
  }
}

}  // namespace

std::complex<double> apply_integral(const RadialWeight& w, const CoefficientSeries& f,
                                    std::complex<double> z, MomentTable& table,
                                    const QuadratureConfig& qc) {
  const double mod = std::abs(z);
  if (!(mod < 1.0)) {
    throw std::invalid_argument("apply_integral: |z| must be below 1");
  }
  const AveragedKernel kt = averaged_kernel_series(w, mod, table, std::min(qc.tolerance, 1e-12));

  auto value_at = [&](double t) {
    const std::complex<double> tz = t * z;
    return f.evaluate(tz) * averaged_kernel_eval(kt, tz);
  };

  std::vector<MeasureAtom> atoms;
  collect_atoms(*w.expression(), 0.0, atoms);

  std::complex<double> total{0.0, 0.0};
  for (const MeasureAtom& a : atoms) {
    const WeightExpr& e = *a.atom;
    const double scale = std::exp(a.log_scale);
    ComplexQuadResult q;
    if (e.kind == WeightKind::LogInv) {
      const double p = e.p1;
      auto integrand = [&](double y, double cy) {
        const double log_v = std::log1p(-cy) / (p - 1.0);
        const double v = std::exp(log_v);
        const double s = std::expm1(log_v) / v;  // -(1-v)/v
        const double r = -std::expm1(s);
        return value_at(r) / (p - 1.0);
        (void)y;
      };
      q = tanh_sinh_complex(integrand, 1.0, qc);
    } else {
      auto integrand = [&](double t, double delta) {
        const double wt = std::exp(log_evaluate_expr_at(e, delta));
        return value_at(t) * wt;
      };
      q = tanh_sinh_complex(integrand, 1.0, qc);
    }
    if (!q.converged) {
      throw NumericError("apply_integral: quadrature did not converge for weight " + w.label() +
                         " (achieved rel err " + format_double_shortest(q.rel_err) + ")");
    }
    total += scale * q.value;
  }
  return total;
}

OperatorSection matrix_section(const RadialWeight& w, const SpaceSpec& space, std::size_t dim,
                               MomentTable& table, int threads) {
  if (dim == 0) throw std::invalid_argument("matrix_section: dimension must be positive");
  OperatorSection s;
  s.weight_label = w.label();
  s.weight_id = w.id();
  s.space_label = space.label();
  s.dim = dim;
  s.entries.assign(dim * (dim + 1) / 2, 0.0);

  const std::vector<double> lw = log_weight_moments(w, dim, table);
  const std::vector<double> ld = log_diag_terms(w, dim, table);
  std::vector<double> lcw(dim);
  for (std::size_t n = 0; n < dim; ++n) lcw[n] = space.log_coeff_weight(n);

  std::atomic<std::size_t> flushed{0};
  std::mutex fail_mu;
  std::optional<std::string> failure;

  parallel_for_chunks(dim, threads, [&](std::size_t begin, std::size_t end, int) {
    std::size_t local_flushed = 0;
    for (std::size_t n = begin; n < end; ++n) {
      double* row = s.entries.data() + n * (n + 1) / 2;
      for (std::size_t k = 0; k <= n; ++k) {
        const double lg = lw[n] + ld[n - k] + 0.5 * (lcw[n] - lcw[k]);
        if (lg < kLogFlushThreshold) {
          row[k] = 0.0;
          ++local_flushed;
          continue;
        }
        if (lg > kLogOverflowThreshold) {
          std::lock_guard<std::mutex> lock(fail_mu);
          if (!failure) {
            failure = "matrix_section: entry (" + std::to_string(n) + "," + std::to_string(k) +
                      ") has log magnitude " + format_double_shortest(lg) +
                      ", beyond double range";
          }
          return;
        }
        row[k] = std::exp(lg);
      }
    }
    flushed += local_flushed;
  });
  if (failure) throw NumericError(*failure);
  s.flushed_to_zero = flushed.load();
  return s;
}

void OperatorSection::apply_to(std::span<const double> x, std::span<double> y) const {
  for (std::size_t n = 0; n < dim; ++n) {
    const double* row = entries.data() + n * (n + 1) / 2;
    y[n] = pairwise_accumulate<double>(0, n + 1, [&](std::size_t k) { return row[k] * x[k]; });
  }
}

void OperatorSection::apply_transpose_to(std::span<const double> x, std::span<double> y) const {
  for (std::size_t k = 0; k < dim; ++k) {
    y[k] = pairwise_accumulate<double>(k, dim, [&](std::size_t n) {
      return entries[n * (n + 1) / 2 + k] * x[n];
    });
  }
}

std::string section_to_csv(const OperatorSection& s) {
  nlohmann::ordered_json meta;
  meta["weight"] = s.weight_label;
  meta["weight_id"] = s.weight_id;
  meta["space"] = s.space_label;
  meta["dim"] = s.dim;
  meta["flushed_to_zero"] = s.flushed_to_zero;
  std::string out = "# " + meta.dump() + "\n";
  out += "n,k,value\n";
  for (std::size_t n = 0; n < s.dim; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      out += std::to_string(n);
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += format_double_shortest(s.entry(n, k));
      out += '\n';
    }
  }
  return out;
}

}  // namespace cesarolab
