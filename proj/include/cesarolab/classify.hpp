#pragma once

#include <span>
#include <string>
#include <vector>

#include "cesarolab/moments.hpp"
#include "cesarolab/weights.hpp"

namespace cesarolab {

enum class Verdict { Yes, No, Inconclusive };

std::string verdict_name(Verdict v);

// One profile sample: a grid parameter and the log of the diagnostic ratio.
// Ratios are kept in log form because essential-decay weights push them far
// beyond double range.
struct ProfilePoint {
  double param;
  double log_ratio;
};

struct ClassifyConfig {
  int dhat_j_max = 14;     // doubling ratios w_{2^j} / w_{2^{j+1}}, j = 0..j_max
  double dcheck_k = 2.0;   // tail ratio scale factor
  int dcheck_j_min = 1;    // delta grid 2^{-j}
  int dcheck_j_max = 40;
  double m_k = 4.0;        // moment ratio w_x / w_{Kx}
  int m_j_max = 17;        // x grid 2^j, j = 0..j_max
  int tail_window = 5;     // samples inspected at the far end of a profile
  double plateau_tol = 0.10;      // tail max/min within 1 + tol counts as flat
  double slope_threshold = 0.02;  // log-ratio growth per doubling counted as divergence
  double away_margin = 0.20;      // ratios must clear 1 + margin to certify "above 1"
  double near_one_tol = 0.15;     // decreasing tail at or below 1 + tol reads as "tends to 1"
  double dhat_bound = 1e4;        // plateau ratios must also stay below this
};

struct ClassVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<ProfilePoint> curve;
  double tail_slope = 0.0;  // least-squares log-ratio slope over the tail window
  std::string note;
};

struct ClassReport {
  std::string weight_label;
  std::string weight_id;
  ClassVerdict in_dhat;
  ClassVerdict in_dcheck;
  ClassVerdict in_m;
  Verdict in_d = Verdict::Inconclusive;
  ClassifyConfig parameters;
};

// log of w_{2^j} / w_{2^{j+1}} for j = 0..j_max.
std::vector<ProfilePoint> dhat_profile(const RadialWeight& w, int j_max, MomentTable& table);

// log of tail(1 - delta_j) / tail(1 - delta_j / K) on the dyadic grid.
std::vector<ProfilePoint> dcheck_profile(const RadialWeight& w, double K,
                                         std::span<const double> delta_grid,
                                         const QuadratureConfig& qc = {});

// log of w_x / w_{Kx} on a grid of exponents.
std::vector<ProfilePoint> m_profile(const RadialWeight& w, double K, std::span<const double> x_grid,
                                    MomentTable& table);

ClassReport classify(const RadialWeight& w, const ClassifyConfig& cfg, MomentTable& table);

}  // namespace cesarolab
