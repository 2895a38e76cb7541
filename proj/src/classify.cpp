#include "cesarolab/classify.hpp"

#include <algorithm>
#include <cmath>

#include "cesarolab/common.hpp"

namespace cesarolab {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return "yes";
    case Verdict::No:
      return "no";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::vector<ProfilePoint> dhat_profile(const RadialWeight& w, int j_max, MomentTable& table) {
  if (j_max < 0) throw std::invalid_argument("dhat_profile: j_max must be nonnegative");
  std::vector<double> xs;
  for (int j = 0; j <= j_max + 1; ++j) xs.push_back(std::ldexp(1.0, j));
  prefetch_moments(w, xs, table, 1);
  std::vector<ProfilePoint> out;
  for (int j = 0; j <= j_max; ++j) {
    const double a = moment(w, xs[static_cast<std::size_t>(j)], table).log_value;
    const double b = moment(w, xs[static_cast<std::size_t>(j) + 1], table).log_value;
    out.push_back({static_cast<double>(j), a - b});
  }
  return out;
}

std::vector<ProfilePoint> dcheck_profile(const RadialWeight& w, double K,
                                         std::span<const double> delta_grid,
                                         const QuadratureConfig& qc) {
  if (!(K > 1.0)) throw std::invalid_argument("dcheck_profile: K must exceed 1");
  std::vector<ProfilePoint> out;
  for (double delta : delta_grid) {
    const double near = log_tail_at(w, delta, qc).log_value;
    const double far = log_tail_at(w, delta / K, qc).log_value;
    out.push_back({delta, near - far});
  }
  return out;
}

std::vector<ProfilePoint> m_profile(const RadialWeight& w, double K,
                                    std::span<const double> x_grid, MomentTable& table) {
  if (!(K > 1.0)) throw std::invalid_argument("m_profile: K must exceed 1");
  std::vector<double> xs;
  for (double x : x_grid) {
    xs.push_back(x);
    xs.push_back(K * x);
  }
  prefetch_moments(w, xs, table, 1);
  std::vector<ProfilePoint> out;
  for (double x : x_grid) {
    const double a = moment(w, x, table).log_value;
    const double b = moment(w, K * x, table).log_value;
    out.push_back({x, a - b});
  }
  return out;
}

namespace {

struct TailStats {
  double max_log = kNegInf;
  double min_log = kPosInf;
  double slope = 0.0;     // least squares, per index step (= per doubling)
  bool decreasing = true;  // nonincreasing across the window
  double last_log = 0.0;
};

TailStats tail_stats(const std::vector<ProfilePoint>& curve, int window) {
  TailStats st;
  const std::size_t n = curve.size();
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(window, 2)), n);
  const std::size_t begin = n - w;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = begin; i < n; ++i) {
    const double y = curve[i].log_ratio;
    const double x = static_cast<double>(i - begin);
    st.max_log = std::max(st.max_log, y);
    st.min_log = std::min(st.min_log, y);
    if (i > begin && y > curve[i - 1].log_ratio + 1e-12) st.decreasing = false;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = w * sxx - sx * sx;
  st.slope = denom != 0.0 ? (w * sxy - sx * sy) / denom : 0.0;
  st.last_log = curve[n - 1].log_ratio;
  return st;
}

ClassVerdict assess_bounded(std::vector<ProfilePoint> curve, const ClassifyConfig& cfg) {
  ClassVerdict out;
  out.curve = std::move(curve);
  const TailStats st = tail_stats(out.curve, cfg.tail_window);
  out.tail_slope = st.slope;
  const bool plateau = st.max_log - st.min_log <= std::log1p(cfg.plateau_tol);
  if (plateau && st.max_log <= std::log(cfg.dhat_bound)) {
    out.verdict = Verdict::Yes;
    out.note = "doubling ratios flatten below the bound";
  } else if (st.slope > cfg.slope_threshold) {
    out.verdict = Verdict::No;
    out.note = "doubling ratios keep growing";
  } else {
    out.verdict = Verdict::Inconclusive;
    out.note = "no plateau and no sustained growth at this resolution";
  }
  return out;
}

ClassVerdict assess_away_from_one(std::vector<ProfilePoint> curve, const ClassifyConfig& cfg) {
  ClassVerdict out;
  out.curve = std::move(curve);
  const TailStats st = tail_stats(out.curve, cfg.tail_window);
  out.tail_slope = st.slope;
  const bool plateau = st.max_log - st.min_log <= std::log1p(cfg.plateau_tol);
  const bool away = st.min_log >= std::log1p(cfg.away_margin);
  if (away && (plateau || st.slope > cfg.slope_threshold)) {
    out.verdict = Verdict::Yes;
    out.note = "ratios stay clear of 1";
  } else if (st.decreasing && st.last_log <= std::log1p(cfg.near_one_tol)) {
    out.verdict = Verdict::No;
    out.note = "ratios decrease toward 1";
  } else {
    out.verdict = Verdict::Inconclusive;
    out.note = "ratios neither certify a gap above 1 nor a decay to 1";
  }
  return out;
}

}  // namespace

ClassReport classify(const RadialWeight& w, const ClassifyConfig& cfg, MomentTable& table) {
  ClassReport rep;
  rep.weight_label = w.label();
  rep.weight_id = w.id();
  rep.parameters = cfg;

  rep.in_dhat = assess_bounded(dhat_profile(w, cfg.dhat_j_max, table), cfg);

  std::vector<double> deltas;
  for (int j = cfg.dcheck_j_min; j <= cfg.dcheck_j_max; ++j) deltas.push_back(std::ldexp(1.0, -j));
  rep.in_dcheck =
      assess_away_from_one(dcheck_profile(w, cfg.dcheck_k, deltas, table.quadrature_config()), cfg);

  std::vector<double> xs;
  for (int j = 0; j <= cfg.m_j_max; ++j) xs.push_back(std::ldexp(1.0, j));
  rep.in_m = assess_away_from_one(m_profile(w, cfg.m_k, xs, table), cfg);

  if (rep.in_dhat.verdict == Verdict::Yes && rep.in_m.verdict == Verdict::Yes) {
    rep.in_d = Verdict::Yes;
  } else if (rep.in_dhat.verdict == Verdict::No || rep.in_m.verdict == Verdict::No) {
    rep.in_d = Verdict::No;
  } else {
    rep.in_d = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace cesarolab
