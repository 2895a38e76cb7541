#include "cesarolab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "cesarolab/common.hpp"

namespace cesarolab {

namespace {

constexpr double kWindow = 6.0;     // |t| cap; keeps endpoint distances inside double range
constexpr int kHardMaxLevel = 12;   // node tables are built once up to this density
constexpr double kSideCutoff = 760.0;  // stop a side after terms fall this far below the max

struct TsNode {
  double frac;   // u/L for the t > 0 orientation
  double cfrac;  // (L-u)/L, exact complement
  double logw;   // log of (du/dt)/L
};

struct EsNode {
  double v;
  double logv;
  double logw;  // log of dv/dt
};

struct EsLevel {
  std::vector<EsNode> pos;  // t = +h, +2h(level 0) or odd multiples, ascending
  std::vector<EsNode> neg;  // t = -h, ... descending t, i.e. v decreasing
};

TsNode make_ts_node(double t) {
  const double tau = (M_PI / 2.0) * std::sinh(t);
  const double em = std::exp(-2.0 * tau);
  TsNode n;
  n.frac = 1.0 / (1.0 + em);
  n.cfrac = em / (1.0 + em);
  n.logw = std::log(M_PI) + std::log(std::cosh(t)) - 2.0 * tau - 2.0 * std::log1p(em);
  return n;
}

EsNode make_es_node(double t) {
  const double tau = (M_PI / 2.0) * std::sinh(t);
  EsNode n;
  n.v = std::exp(tau);
  n.logv = tau;
  n.logw = std::log(M_PI / 2.0) + std::log(std::cosh(t)) + tau;
  return n;
}

// Level 0 uses integer t; level l >= 1 holds odd multiples of 2^-l.
std::vector<double> level_offsets(int level) {
  std::vector<double> ts;
  if (level == 0) {
    for (int k = 1; k * 1.0 <= kWindow; ++k) ts.push_back(static_cast<double>(k));
  } else {
    const double h = std::ldexp(1.0, -level);
    for (int k = 1; k * h <= kWindow; k += 2) ts.push_back(k * h);
  }
  return ts;
}

const std::vector<std::vector<TsNode>>& ts_levels() {
  static std::vector<std::vector<TsNode>> levels = [] {
    std::vector<std::vector<TsNode>> out;
    for (int lv = 0; lv <= kHardMaxLevel; ++lv) {
      std::vector<TsNode> nodes;
      for (double t : level_offsets(lv)) nodes.push_back(make_ts_node(t));
      out.push_back(std::move(nodes));
    }
    return out;
  }();
  return levels;
}

const std::vector<EsLevel>& es_levels() {
  static std::vector<EsLevel> levels = [] {
    std::vector<EsLevel> out;
    for (int lv = 0; lv <= kHardMaxLevel; ++lv) {
      EsLevel lvl;
      for (double t : level_offsets(lv)) {
        lvl.pos.push_back(make_es_node(t));
        lvl.neg.push_back(make_es_node(-t));
      }
      out.push_back(std::move(lvl));
    }
    return out;
  }();
  return levels;
}

double checked(double log_term) {
  if (std::isnan(log_term)) throw NumericError("quadrature integrand returned NaN");
  if (log_term == kPosInf) throw NumericError("quadrature integrand overflowed to +inf");
  return log_term;
}

struct LogLevelState {
  LogAccumulator acc;
  double running_max = kNegInf;
  double edge_max = kNegInf;  // largest term seen at the end of a side scan
  std::size_t evaluations = 0;

  // A side may dip below the cutoff on its way to mass recorded by a coarser
  // level, so only negligible *and* descending runs are allowed to end it.
  template <class TermFn>
  void scan_side(std::size_t count, TermFn&& term_at, bool track_edge = true) {
    int below = 0;
    double prev = kNegInf;
    double last = kNegInf;
    for (std::size_t i = 0; i < count; ++i) {
      double term = term_at(i);
      ++evaluations;
      acc.add(term);
      if (term > running_max) running_max = term;
      const bool negligible = term < running_max - kSideCutoff;
      const bool descending =
          i > 0 && (term < prev || (term == kNegInf && prev == kNegInf));
      last = term;
      prev = term;
      if (negligible && descending) {
        if (++below >= 2) break;
      } else {
        below = 0;
      }
    }
    if (track_edge && last > edge_max) edge_max = last;
  }
};

}  // namespace

void LogAccumulator::add(double log_term) {
  if (log_term == kNegInf) return;
  ++count_;
  if (log_term <= max_) {
    sum_ += std::exp(log_term - max_);
    return;
  }
  sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
  max_ = log_term;
}

double LogAccumulator::log_sum() const {
  if (count_ == 0 || sum_ <= 0.0) return kNegInf;
  return max_ + std::log(sum_);
}

LogQuadResult tanh_sinh_log(const std::function<double(double, double)>& log_f, double length,
                            const QuadratureConfig& cfg) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("tanh_sinh_log: length must be positive and finite");
  }
  const int max_lv = std::clamp(cfg.max_level, 3, kHardMaxLevel);
  const double log_len = std::log(length);
  const auto& levels = ts_levels();

  LogLevelState st;
  auto eval = [&](const TsNode& n, bool mirrored) {
    const double frac = mirrored ? n.cfrac : n.frac;
    const double cfrac = mirrored ? n.frac : n.cfrac;
    return checked(log_f(length * frac, length * cfrac)) + n.logw + log_len;
  };

  // center node t = 0; never an edge, so it stays out of the truncation estimate
  {
    TsNode c{0.5, 0.5, std::log(M_PI / 4.0)};
    st.scan_side(1, [&](std::size_t) { return eval(c, false); }, false);
  }

  LogQuadResult out;
  double prev = kNegInf;
  double rel = kPosInf;
  for (int lv = 0; lv <= max_lv; ++lv) {
    const auto& nodes = levels[static_cast<std::size_t>(lv)];
    st.scan_side(nodes.size(), [&](std::size_t i) { return eval(nodes[i], false); });
    st.scan_side(nodes.size(), [&](std::size_t i) { return eval(nodes[i], true); });
    const double cur = st.acc.log_sum() + std::log(std::ldexp(1.0, -lv));
    out.levels = lv;
    if (lv >= 2) {
      if (cur == kNegInf && prev == kNegInf) {
        rel = 0.0;
      } else {
        const double diff = cur - prev;
        rel = std::abs(diff) < 1.0 ? std::abs(std::expm1(diff)) : kPosInf;
      }
      if (rel <= cfg.tolerance) {
        out.converged = true;
        out.log_value = cur;
        break;
      }
    }
    prev = cur;
    out.log_value = cur;
  }
  out.evaluations = st.evaluations;
  const double h_final = std::ldexp(1.0, -out.levels);
  double trunc_rel = 0.0;
  if (out.log_value != kNegInf && st.edge_max != kNegInf) {
    trunc_rel = std::exp(st.edge_max + std::log(h_final) - out.log_value) * 8.0;
  }
  out.abs_log_err = std::max({rel != kPosInf ? rel : 1.0, trunc_rel, 4e-16});
  return out;
}

LogQuadResult exp_sinh_log(const std::function<double(double, double)>& log_g,
                           const QuadratureConfig& cfg) {
  const int max_lv = std::clamp(cfg.max_level, 3, kHardMaxLevel);
  const auto& levels = es_levels();

  LogLevelState st;
  auto eval = [&](const EsNode& n) { return checked(log_g(n.v, n.logv)) + n.logw; };

  {
    EsNode c{1.0, 0.0, std::log(M_PI / 2.0)};
    st.scan_side(1, [&](std::size_t) { return eval(c); }, false);
  }

  LogQuadResult out;
  double prev = kNegInf;
  double rel = kPosInf;
  for (int lv = 0; lv <= max_lv; ++lv) {
    const auto& lvl = levels[static_cast<std::size_t>(lv)];
    st.scan_side(lvl.pos.size(), [&](std::size_t i) { return eval(lvl.pos[i]); });
    st.scan_side(lvl.neg.size(), [&](std::size_t i) { return eval(lvl.neg[i]); });
    const double cur = st.acc.log_sum() + std::log(std::ldexp(1.0, -lv));
    out.levels = lv;
    if (lv >= 2) {
      if (cur == kNegInf && prev == kNegInf) {
        rel = 0.0;
      } else {
        const double diff = cur - prev;
        rel = std::abs(diff) < 1.0 ? std::abs(std::expm1(diff)) : kPosInf;
      }
      if (rel <= cfg.tolerance) {
        out.converged = true;
        out.log_value = cur;
        break;
      }
    }
    prev = cur;
    out.log_value = cur;
  }
  out.evaluations = st.evaluations;
  const double h_final = std::ldexp(1.0, -out.levels);
  double trunc_rel = 0.0;
  if (out.log_value != kNegInf && st.edge_max != kNegInf) {
    trunc_rel = std::exp(st.edge_max + std::log(h_final) - out.log_value) * 8.0;
  }
  out.abs_log_err = std::max({rel != kPosInf ? rel : 1.0, trunc_rel, 4e-16});
  return out;
}

namespace {

struct KahanComplex {
  std::complex<double> s{0.0, 0.0};
  std::complex<double> c{0.0, 0.0};
  void add(std::complex<double> x) {
    const std::complex<double> y = x - c;
    const std::complex<double> t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

}  // namespace

ComplexQuadResult tanh_sinh_complex(const std::function<std::complex<double>(double, double)>& f,
                                    double length, const QuadratureConfig& cfg) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("tanh_sinh_complex: length must be positive and finite");
  }
  const int max_lv = std::clamp(cfg.max_level, 3, kHardMaxLevel);
  const auto& levels = ts_levels();

  KahanComplex acc;
  double max_abs = 0.0;
  double edge_abs = 0.0;
  std::size_t evals = 0;

  auto eval = [&](const TsNode& n, bool mirrored) {
    const double frac = mirrored ? n.cfrac : n.frac;
    const double cfrac = mirrored ? n.frac : n.cfrac;
    std::complex<double> val = f(length * frac, length * cfrac);
    if (std::isnan(val.real()) || std::isnan(val.imag())) {
      throw NumericError("quadrature integrand returned NaN");
    }
    const double w = std::exp(n.logw) * length;
    return val * w;
  };

  auto scan_side = [&](const std::vector<TsNode>& nodes, bool mirrored, bool track_edge) {
    int below = 0;
    double prev_mag = kPosInf;
    double last = 0.0;
    bool first = true;
    for (const auto& n : nodes) {
      std::complex<double> term = eval(n, mirrored);
      ++evals;
      const double mag = std::abs(term);
      acc.add(term);
      if (mag > max_abs) max_abs = mag;
      const bool negligible = max_abs > 0.0 && mag < max_abs * 1e-250;
      const bool descending = !first && (mag < prev_mag || (mag == 0.0 && prev_mag == 0.0));
      last = mag;
      prev_mag = mag;
      first = false;
      if (negligible && descending) {
        if (++below >= 2) break;
      } else {
        below = 0;
      }
    }
    if (track_edge && last > edge_abs) edge_abs = last;
  };

  {
    TsNode c{0.5, 0.5, std::log(M_PI / 4.0)};
    scan_side({c}, false, false);
  }

  ComplexQuadResult out;
  std::complex<double> prev{0.0, 0.0};
  double rel = kPosInf;
  for (int lv = 0; lv <= max_lv; ++lv) {
    const auto& nodes = levels[static_cast<std::size_t>(lv)];
    scan_side(nodes, false, true);
    scan_side(nodes, true, true);
    const double h = std::ldexp(1.0, -lv);
    const std::complex<double> cur = acc.s * h;
    out.levels = lv;
    if (lv >= 2) {
      const double scale = std::max(std::abs(cur), 1e-300);
      rel = std::abs(cur - prev) / scale;
      if (rel <= cfg.tolerance) {
        out.converged = true;
        out.value = cur;
        break;
      }
    }
    prev = cur;
    out.value = cur;
  }
  out.evaluations = evals;
  const double h_final = std::ldexp(1.0, -out.levels);
  const double scale = std::max(std::abs(out.value), 1e-300);
  const double trunc_rel = edge_abs * h_final * 8.0 / scale;
  out.rel_err = std::max({rel == kPosInf ? 1.0 : rel, trunc_rel, 4e-16});
  return out;
}

}  // namespace cesarolab
