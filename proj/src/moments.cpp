#include "cesarolab/moments.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "cesarolab/common.hpp"
#include "cesarolab/io.hpp"
#include "cesarolab/parallel.hpp"

namespace cesarolab {

namespace {

struct LogResult {
  double log_value;
  double abs_log_err;
};

bool has_closed_moment(const WeightExpr& e) {
  switch (e.kind) {
    case WeightKind::One:
    case WeightKind::Pow:
    case WeightKind::Pow2:
      return true;
    case WeightKind::Exp:
    case WeightKind::LogInv:
      return false;
    case WeightKind::Scale:
      return has_closed_moment(*e.a);
    case WeightKind::Sum:
      return has_closed_moment(*e.a) && has_closed_moment(*e.b);
  }
  return false;
}

double closed_err(double log_value) { return 1e-14 * (1.0 + std::abs(log_value)); }

LogResult closed_log_moment(const WeightExpr& e, double x) {
  switch (e.kind) {
    case WeightKind::One: {
      double lv = -std::log1p(x);
      return {lv, closed_err(lv)};
    }
    case WeightKind::Pow: {
      double lv = log_beta(x + 1.0, e.p1 + 1.0);
      return {lv, closed_err(lv)};
    }
    case WeightKind::Pow2: {
      double lv = std::log(0.5) + log_beta((x + 1.0) / 2.0, e.p1 + 1.0);
      return {lv, closed_err(lv)};
    }
    case WeightKind::Scale: {
      LogResult r = closed_log_moment(*e.a, x);
      return {std::log(e.p1) + r.log_value, r.abs_log_err};
    }
    case WeightKind::Sum: {
      LogResult ra = closed_log_moment(*e.a, x);
      LogResult rb = closed_log_moment(*e.b, x);
      return {logsumexp2(ra.log_value, rb.log_value), std::max(ra.abs_log_err, rb.abs_log_err)};
    }
    default:
      throw std::logic_error("closed_log_moment: no closed form");
  }
}

LogResult from_quad(const LogQuadResult& q, const char* what, const std::string& label, double x) {
  if (!q.converged) {
    throw NumericError(std::string(what) + " quadrature did not converge for weight " + label +
                       " at x=" + format_double_shortest(x) +
                       " (achieved rel err " + format_double_shortest(q.abs_log_err) + ")");
  }
  return {q.log_value, q.abs_log_err};
}

// Atom quadrature routes. pow/pow2/one integrate in r directly; exp uses
// u = 1/(1-r) on (1, inf); loginv uses y = (1 - log(1-r))^{1-p} on (0, 1),
// which absorbs the weight into dy/(p-1) and keeps the transformed
// integrand double-exponentially tame for every p > 1.
LogResult atom_log_moment_quad(const WeightExpr& e, double x, const QuadratureConfig& qc,
                               const std::string& label) {
  switch (e.kind) {
    case WeightKind::One:
    case WeightKind::Pow:
    case WeightKind::Pow2: {
      auto lf = [&](double r, double delta) {
        double lw;
        if (e.kind == WeightKind::One) {
          lw = 0.0;
        } else if (e.kind == WeightKind::Pow) {
          lw = e.p1 * std::log(delta);
        } else {
          lw = e.p1 * (std::log(delta) + std::log(2.0 - delta));
        }
        return x_times_log(x, std::log1p(-delta)) + lw;
        (void)r;
      };
      return from_quad(tanh_sinh_log(lf, 1.0, qc), "moment", label, x);
    }
    case WeightKind::Exp: {
      const double c = e.p1;
      const double beta = e.p2;
      auto lg = [&](double v, double logv) {
        (void)logv;
        const double log_u = std::log1p(v);
        const double log_r = -std::log1p(1.0 / v);
        return x_times_log(x, log_r) - c * std::exp(beta * log_u) - 2.0 * log_u;
      };
      return from_quad(exp_sinh_log(lg, qc), "moment", label, x);
    }
    case WeightKind::LogInv: {
      const double p = e.p1;
      auto lf = [&](double y, double cy) {
        (void)y;
        // v = y^{1/(p-1)}; r = 1 - exp(1 - 1/v); s = 1 - 1/v = -(1-v)/v
        const double log_v = std::log1p(-cy) / (p - 1.0);
        const double v = std::exp(log_v);
        const double one_minus_v = -std::expm1(log_v);
        const double s = -one_minus_v / v;
        const double log_r = std::log(-std::expm1(s));
        return x_times_log(x, log_r) - std::log(p - 1.0);
      };
      return from_quad(tanh_sinh_log(lf, 1.0, qc), "moment", label, x);
    }
    default:
      throw std::logic_error("atom_log_moment_quad: composite node");
  }
}

LogResult log_moment_of(const WeightExpr& e, double x, const QuadratureConfig& qc,
                        bool force_quadrature, const std::string& label) {
  if (!force_quadrature && has_closed_moment(e)) return closed_log_moment(e, x);
  switch (e.kind) {
    case WeightKind::Scale: {
      LogResult r = log_moment_of(*e.a, x, qc, force_quadrature, label);
      return {std::log(e.p1) + r.log_value, r.abs_log_err};
    }
    case WeightKind::Sum: {
      LogResult ra = log_moment_of(*e.a, x, qc, force_quadrature, label);
      LogResult rb = log_moment_of(*e.b, x, qc, force_quadrature, label);
      return {logsumexp2(ra.log_value, rb.log_value), std::max(ra.abs_log_err, rb.abs_log_err)};
    }
    default:
      return atom_log_moment_quad(e, x, qc, label);
  }
}

LogResult atom_log_tail_quad(const WeightExpr& e, double delta0, const QuadratureConfig& qc,
                             const std::string& label) {
  switch (e.kind) {
    case WeightKind::One:
    case WeightKind::Pow:
    case WeightKind::Pow2: {
      auto lf = [&](double d, double cd) {
        (void)cd;
        if (e.kind == WeightKind::One) return 0.0;
        if (e.kind == WeightKind::Pow) return e.p1 * std::log(d);
        return e.p1 * (std::log(d) + std::log(2.0 - d));
      };
      return from_quad(tanh_sinh_log(lf, delta0, qc), "tail", label, delta0);
    }
    case WeightKind::Exp: {
      const double c = e.p1;
      const double beta = e.p2;
      const double u0 = 1.0 / delta0;
      auto lg = [&](double v, double logv) {
        (void)logv;
        const double u = u0 + v;
        return -c * std::pow(u, beta) - 2.0 * std::log(u);
      };
      return from_quad(exp_sinh_log(lg, qc), "tail", label, delta0);
    }
    case WeightKind::LogInv: {
      const double p = e.p1;
      const double y0 = std::exp((1.0 - p) * std::log(1.0 - std::log(delta0)));
      auto lf = [&](double y, double cy) {
        (void)y;
        (void)cy;
        return -std::log(p - 1.0);
      };
      return from_quad(tanh_sinh_log(lf, y0, qc), "tail", label, delta0);
    }
    default:
      throw std::logic_error("atom_log_tail_quad: composite node");
  }
}

bool has_closed_tail(const WeightExpr& e) {
  switch (e.kind) {
    case WeightKind::One:
    case WeightKind::Pow:
      return true;
    case WeightKind::Scale:
      return has_closed_tail(*e.a);
    case WeightKind::Sum:
      return has_closed_tail(*e.a) && has_closed_tail(*e.b);
    default:
      return false;
  }
}

LogResult closed_log_tail(const WeightExpr& e, double delta0) {
  switch (e.kind) {
    case WeightKind::One: {
      double lv = std::log(delta0);
      return {lv, closed_err(lv)};
    }
    case WeightKind::Pow: {
      double lv = (e.p1 + 1.0) * std::log(delta0) - std::log1p(e.p1);
      return {lv, closed_err(lv)};
    }
    case WeightKind::Scale: {
      LogResult r = closed_log_tail(*e.a, delta0);
      return {std::log(e.p1) + r.log_value, r.abs_log_err};
    }
    case WeightKind::Sum: {
      LogResult ra = closed_log_tail(*e.a, delta0);
      LogResult rb = closed_log_tail(*e.b, delta0);
      return {logsumexp2(ra.log_value, rb.log_value), std::max(ra.abs_log_err, rb.abs_log_err)};
    }
    default:
      throw std::logic_error("closed_log_tail: no closed form");
  }
}

LogResult log_tail_of(const WeightExpr& e, double delta0, const QuadratureConfig& qc,
                      bool force_quadrature, const std::string& label) {
  if (!force_quadrature && has_closed_tail(e)) return closed_log_tail(e, delta0);
  switch (e.kind) {
    case WeightKind::Scale: {
      LogResult r = log_tail_of(*e.a, delta0, qc, force_quadrature, label);
      return {std::log(e.p1) + r.log_value, r.abs_log_err};
    }
    case WeightKind::Sum: {
      LogResult ra = log_tail_of(*e.a, delta0, qc, force_quadrature, label);
      LogResult rb = log_tail_of(*e.b, delta0, qc, force_quadrature, label);
      return {logsumexp2(ra.log_value, rb.log_value), std::max(ra.abs_log_err, rb.abs_log_err)};
    }
    default:
      return atom_log_tail_quad(e, delta0, qc, label);
  }
}

}  // namespace

MomentTable::MomentTable(const RadialWeight& w, QuadratureConfig qc, bool force_quadrature)
    : weight_id_(w.id()), weight_label_(w.label()), qc_(qc), force_quadrature_(force_quadrature) {}

std::optional<MomentEntry> MomentTable::lookup(double x) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(x);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

MomentEntry MomentTable::insert(double x, MomentEntry e) {
  std::unique_lock lock(mu_);
  auto [it, inserted] = entries_.try_emplace(x, e);
  return it->second;
}

std::vector<std::pair<double, MomentEntry>> MomentTable::snapshot() const {
  std::shared_lock lock(mu_);
  return {entries_.begin(), entries_.end()};
}

std::size_t MomentTable::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

MomentEntry moment(const RadialWeight& w, double x, MomentTable& table) {
  if (w.id() != table.weight_id()) {
    throw std::invalid_argument("moment: table belongs to weight " + table.weight_label());
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("moment: exponent must be finite and nonnegative");
  }
  if (auto hit = table.lookup(x)) return *hit;
  LogResult r = log_moment_of(*w.expression(), x, table.quadrature_config(),
                              table.force_quadrature(), w.label());
  return table.insert(x, MomentEntry{r.log_value, r.abs_log_err});
}

void prefetch_moments(const RadialWeight& w, std::span<const double> xs, MomentTable& table,
                      int threads) {
  parallel_for_chunks(xs.size(), threads, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t i = begin; i < end; ++i) moment(w, xs[i], table);
  });
}

MomentEntry log_tail_at(const RadialWeight& w, double one_minus_r, const QuadratureConfig& qc,
                        bool force_quadrature) {
  if (!(one_minus_r > 0.0) || !(one_minus_r <= 1.0)) {
    throw std::invalid_argument("log_tail_at: 1-r must lie in (0, 1]");
  }
  LogResult r = log_tail_of(*w.expression(), one_minus_r, qc, force_quadrature, w.label());
  return MomentEntry{r.log_value, r.abs_log_err};
}

double tail(const RadialWeight& w, double r, const QuadratureConfig& qc) {
  if (!(r >= 0.0) || !(r < 1.0)) {
    throw std::invalid_argument("tail: r must lie in [0, 1)");
  }
  return std::exp(log_tail_at(w, 1.0 - r, qc).log_value);
}

MomentCacheFile MomentCacheFile::load(const std::string& path) {
  MomentCacheFile out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == "weight_id,x,log_value,abs_log_err") continue;
    }
    std::istringstream ss(line);
    std::string id, xs, lvs, errs;
    if (!std::getline(ss, id, ',') || !std::getline(ss, xs, ',') || !std::getline(ss, lvs, ',') ||
        !std::getline(ss, errs)) {
      throw ParseError("malformed moment cache row in " + path, lineno);
    }
    try {
      double x = std::stod(xs);
      MomentEntry e{std::stod(lvs), std::stod(errs)};
      out.by_weight[id].emplace_back(x, e);
    } catch (const std::exception&) {
      throw ParseError("malformed number in moment cache row in " + path, lineno);
    }
  }
  return out;
}

void MomentCacheFile::merge_table(const MomentTable& table) {
  auto& rows = by_weight[table.weight_id()];
  std::map<double, MomentEntry> merged;
  for (const auto& [x, e] : rows) merged.emplace(x, e);
  for (const auto& [x, e] : table.snapshot()) merged.emplace(x, e);
  rows.assign(merged.begin(), merged.end());
}

void MomentCacheFile::absorb_into(MomentTable& table) const {
  auto it = by_weight.find(table.weight_id());
  if (it == by_weight.end()) return;
  // entries recorded under a looser tolerance than the table wants are
  // recomputed instead of trusted; the factor leaves room for the truncation
  // term of the error estimate, which can sit a little above the tolerance
  const double limit = 32.0 * table.quadrature_config().tolerance;
  for (const auto& [x, e] : it->second) {
    if (e.abs_log_err <= limit) table.insert(x, e);
  }
}

std::string MomentCacheFile::serialize() const {
  std::string out = "weight_id,x,log_value,abs_log_err\n";
  for (const auto& [id, rows] : by_weight) {
    for (const auto& [x, e] : rows) {
      out += id;
      out += ',';
      out += format_double_17(x);
      out += ',';
      out += format_double_17(e.log_value);
      out += ',';
      out += format_double_17(e.abs_log_err);
      out += '\n';
    }
  }
  return out;
}

void MomentCacheFile::save(const std::string& path) const { write_file_atomic(path, serialize()); }

}  // namespace cesarolab
