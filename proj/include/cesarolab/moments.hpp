#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cesarolab/quadrature.hpp"
#include "cesarolab/weights.hpp"

namespace cesarolab {

struct MomentEntry {
  double log_value;    // log of int_0^1 r^x w(r) dr
  double abs_log_err;  // error bound on log_value
};

// Per-weight cache of log moments, keyed by the exponent x. Concurrent
// lookups share a read lock; inserts serialize, and the first value stored
// for an exponent wins so repeated computation cannot disagree.
class MomentTable {
 public:
  explicit MomentTable(const RadialWeight& w, QuadratureConfig qc = {},
                       bool force_quadrature = false);

  const std::string& weight_id() const { return weight_id_; }
  const std::string& weight_label() const { return weight_label_; }
  const QuadratureConfig& quadrature_config() const { return qc_; }
  bool force_quadrature() const { return force_quadrature_; }

  std::optional<MomentEntry> lookup(double x) const;
  MomentEntry insert(double x, MomentEntry e);  // returns the stored entry
  std::vector<std::pair<double, MomentEntry>> snapshot() const;  // sorted by x
  std::size_t size() const;

 private:
  std::string weight_id_;
  std::string weight_label_;
  QuadratureConfig qc_;
  bool force_quadrature_;
  mutable std::shared_mutex mu_;
  std::map<double, MomentEntry> entries_;
};

// log w_x for x >= 0; closed form when the expression admits one (and the
// table is not in force-quadrature mode), double-exponential quadrature
// otherwise. Throws NumericError when quadrature misses the tolerance.
MomentEntry moment(const RadialWeight& w, double x, MomentTable& table);

// Computes (and caches) moments for many exponents, chunked across threads.
void prefetch_moments(const RadialWeight& w, std::span<const double> xs, MomentTable& table,
                      int threads = 1);

// log of the tail integral int_r^1 w(s) ds, parametrized by 1 - r so callers
// with dyadic grids keep full precision near r = 1. Not cached.
MomentEntry log_tail_at(const RadialWeight& w, double one_minus_r, const QuadratureConfig& qc = {},
                        bool force_quadrature = false);

// Tail value at r in [0, 1); convenience wrapper over log_tail_at.
double tail(const RadialWeight& w, double r, const QuadratureConfig& qc = {});

// Moment cache file: CSV with header weight_id,x,log_value,abs_log_err and
// 17-significant-digit fields, so values round-trip exactly.
struct MomentCacheFile {
  std::map<std::string, std::vector<std::pair<double, MomentEntry>>> by_weight;

  static MomentCacheFile load(const std::string& path);  // missing file -> empty
  void merge_table(const MomentTable& table);
  // Seeds the table with entries for its weight id; entries whose recorded
  // error is beyond what the table's tolerance justifies are left out.
  void absorb_into(MomentTable& table) const;
  std::string serialize() const;
  void save(const std::string& path) const;  // atomic (temp file + rename)
};

}  // namespace cesarolab
