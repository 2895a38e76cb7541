#include <complex>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cesarolab/analysis.hpp"
#include "cesarolab/cesaro.hpp"
#include "cesarolab/classify.hpp"
#include "cesarolab/common.hpp"
#include "cesarolab/io.hpp"
#include "cesarolab/kernels.hpp"
#include "cesarolab/moments.hpp"
#include "cesarolab/spaces.hpp"
#include "cesarolab/weights.hpp"

namespace {

using cesarolab::CoefficientSeries;
using cesarolab::MomentTable;
using cesarolab::RadialWeight;
using cesarolab::SpaceSpec;
using ordered_json = nlohmann::ordered_json;

struct GlobalOpts {
  std::string cache_path;
  std::string out_path;
  std::string format = "json";
  double tol = 1e-12;
  int threads = 0;
  bool no_timestamp = false;
};

struct CacheSession {
  explicit CacheSession(const GlobalOpts& g) : path(g.cache_path) {
    if (!path.empty()) file = cesarolab::MomentCacheFile::load(path);
  }
  void attach(MomentTable& table) {
    if (!path.empty()) file.absorb_into(table);
    tables.push_back(&table);
  }
  void flush() {
    if (path.empty()) return;
    for (MomentTable* t : tables) file.merge_table(*t);
    file.save(path);
  }
  std::string path;
  cesarolab::MomentCacheFile file;
  std::vector<MomentTable*> tables;
};

void stamp(ordered_json& j, const GlobalOpts& g) {
  if (!g.no_timestamp) j["timestamp"] = cesarolab::iso8601_utc_now();
}

void emit(const GlobalOpts& g, const std::string& structured, const std::string& summary) {
  if (!g.out_path.empty()) {
    cesarolab::write_file_atomic(g.out_path, structured);
    std::cout << summary << "\n";
  } else {
    std::cout << structured;
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<std::complex<double>> parse_z_pairs(const std::vector<double>& flat) {
  if (flat.empty() || flat.size() % 2 != 0) {
    throw std::invalid_argument("--z expects a flat comma list of re,im pairs");
  }
  std::vector<std::complex<double>> zs;
  for (std::size_t i = 0; i < flat.size(); i += 2) zs.emplace_back(flat[i], flat[i + 1]);
  return zs;
}

ordered_json complex_json(std::complex<double> v) {
  return ordered_json::array({v.real(), v.imag()});
}

cesarolab::QuadratureConfig quad_config(const GlobalOpts& g) {
  cesarolab::QuadratureConfig qc;
  qc.tolerance = g.tol;
  return qc;
}

int run_moments(const GlobalOpts& g, const std::string& weight_text,
                const std::vector<double>& xs, bool force_quadrature) {
  RadialWeight w = RadialWeight::parse(weight_text);
  MomentTable table(w, quad_config(g), force_quadrature);
  CacheSession cache(g);
  if (!force_quadrature) cache.attach(table);

  ordered_json root;
  root["command"] = "moments";
  root["weight"] = w.label();
  root["weight_id"] = w.id();
  root["force_quadrature"] = force_quadrature;
  root["tol"] = g.tol;
  ordered_json entries = ordered_json::array();
  std::string csv = "x,value,log_value,abs_log_err\n";
  std::optional<std::string> failure;
  for (double x : xs) {
    try {
      cesarolab::MomentEntry e = cesarolab::moment(w, x, table);
      ordered_json row;
      row["x"] = x;
      row["value"] = std::exp(e.log_value);
      row["log_value"] = e.log_value;
      row["abs_log_err"] = e.abs_log_err;
      entries.push_back(row);
      csv += cesarolab::format_double_shortest(x) + "," +
             cesarolab::format_double_shortest(std::exp(e.log_value)) + "," +
             cesarolab::format_double_shortest(e.log_value) + "," +
             cesarolab::format_double_shortest(e.abs_log_err) + "\n";
    } catch (const cesarolab::NumericError& e) {
      failure = e.what();
      break;
    }
  }
  root["entries"] = entries;
  if (failure) root["error"] = *failure;
  stamp(root, g);
  const std::string structured = g.format == "csv" ? csv : dump(root);
  emit(g, structured,
       "moments " + w.label() + ": " + std::to_string(entries.size()) + "/" +
           std::to_string(xs.size()) + " entries computed");
  cache.flush();
  if (failure) {
    std::cerr << "numeric error: " << *failure << "\n";
    return 3;
  }
  return 0;
}

ordered_json class_verdict_json(const cesarolab::ClassVerdict& v) {
  ordered_json j;
  j["verdict"] = cesarolab::verdict_name(v.verdict);
  j["tail_slope"] = v.tail_slope;
  j["note"] = v.note;
  ordered_json curve = ordered_json::array();
  for (const auto& p : v.curve) curve.push_back(ordered_json::array({p.param, p.log_ratio}));
  j["curve"] = curve;
  return j;
}

int run_classify(const GlobalOpts& g, const std::string& weight_text,
                 const cesarolab::ClassifyConfig& cfg) {
  RadialWeight w = RadialWeight::parse(weight_text);
  MomentTable table(w, quad_config(g));
  CacheSession cache(g);
  cache.attach(table);

  cesarolab::ClassReport rep = cesarolab::classify(w, cfg, table);

  ordered_json root;
  root["command"] = "classify";
  root["weight"] = rep.weight_label;
  root["weight_id"] = rep.weight_id;
  root["in_dhat"] = class_verdict_json(rep.in_dhat);
  root["in_dcheck"] = class_verdict_json(rep.in_dcheck);
  root["in_m"] = class_verdict_json(rep.in_m);
  root["in_d"] = cesarolab::verdict_name(rep.in_d);
  ordered_json params;
  params["dhat_j_max"] = cfg.dhat_j_max;
  params["dcheck_k"] = cfg.dcheck_k;
  params["dcheck_j_min"] = cfg.dcheck_j_min;
  params["dcheck_j_max"] = cfg.dcheck_j_max;
  params["m_k"] = cfg.m_k;
  params["m_j_max"] = cfg.m_j_max;
  params["tail_window"] = cfg.tail_window;
  params["plateau_tol"] = cfg.plateau_tol;
  params["slope_threshold"] = cfg.slope_threshold;
  params["away_margin"] = cfg.away_margin;
  params["near_one_tol"] = cfg.near_one_tol;
  params["dhat_bound"] = cfg.dhat_bound;
  root["parameters"] = params;
  stamp(root, g);

  std::string csv = "profile,param,log_ratio,ratio\n";
  auto add_rows = [&](const char* name, const cesarolab::ClassVerdict& v) {
    for (const auto& p : v.curve) {
      csv += std::string(name) + "," + cesarolab::format_double_shortest(p.param) + "," +
             cesarolab::format_double_shortest(p.log_ratio) + "," +
             cesarolab::format_double_shortest(std::exp(p.log_ratio)) + "\n";
    }
  };
  add_rows("dhat", rep.in_dhat);
  add_rows("dcheck", rep.in_dcheck);
  add_rows("m", rep.in_m);

  emit(g, g.format == "csv" ? csv : dump(root),
       "classify " + rep.weight_label + ": dhat=" + cesarolab::verdict_name(rep.in_dhat.verdict) +
           " dcheck=" + cesarolab::verdict_name(rep.in_dcheck.verdict) +
           " m=" + cesarolab::verdict_name(rep.in_m.verdict) +
           " d=" + cesarolab::verdict_name(rep.in_d));
  cache.flush();
  return 0;
}

int run_kernel(const GlobalOpts& g, const std::string& weight_text, std::size_t coeff_count,
               const std::vector<double>& eval_args, const std::vector<double>& averaged_args) {
  RadialWeight w = RadialWeight::parse(weight_text);
  MomentTable table(w, quad_config(g));
  CacheSession cache(g);
  cache.attach(table);

  ordered_json root;
  root["command"] = "kernel";
  root["weight"] = w.label();
  root["weight_id"] = w.id();
  std::string csv;
  std::string summary;

  if (coeff_count > 0) {
    cesarolab::KernelCoeffs kc = cesarolab::kernel_coeffs(w, coeff_count, table);
    ordered_json entries = ordered_json::array();
    csv = "n,log_c,c\n";
    for (std::size_t n = 0; n < kc.log_c.size(); ++n) {
      ordered_json row;
      row["n"] = n;
      row["log_c"] = kc.log_c[n];
      row["c"] = std::exp(kc.log_c[n]);
      entries.push_back(row);
      csv += std::to_string(n) + "," + cesarolab::format_double_shortest(kc.log_c[n]) + "," +
             cesarolab::format_double_shortest(std::exp(kc.log_c[n])) + "\n";
    }
    root["mode"] = "coeffs";
    root["entries"] = entries;
    summary = "kernel coeffs " + w.label() + ": " + std::to_string(kc.log_c.size()) + " terms";
  } else if (!eval_args.empty()) {
    if (eval_args.size() != 4) {
      throw std::invalid_argument("--eval expects Z_RE,Z_IM,ZETA_RE,ZETA_IM");
    }
    std::complex<double> z{eval_args[0], eval_args[1]};
    std::complex<double> zeta{eval_args[2], eval_args[3]};
    cesarolab::KernelValue kv = cesarolab::kernel_eval(w, z, zeta, table, g.tol);
    root["mode"] = "eval";
    root["z"] = complex_json(z);
    root["zeta"] = complex_json(zeta);
    root["value"] = complex_json(kv.value);
    root["tail_bound"] = kv.tail_bound;
    root["terms"] = kv.terms;
    csv = "re,im,tail_bound,terms\n" + cesarolab::format_double_shortest(kv.value.real()) + "," +
          cesarolab::format_double_shortest(kv.value.imag()) + "," +
          cesarolab::format_double_shortest(kv.tail_bound) + "," + std::to_string(kv.terms) + "\n";
    summary = "kernel eval " + w.label() + ": value (" +
              cesarolab::format_double_shortest(kv.value.real()) + ", " +
              cesarolab::format_double_shortest(kv.value.imag()) + ")";
  } else if (!averaged_args.empty()) {
    if (averaged_args.size() != 3) throw std::invalid_argument("--averaged expects T,Z_RE,Z_IM");
    const double t = averaged_args[0];
    std::complex<double> z{averaged_args[1], averaged_args[2]};
    if (!(t >= 0.0) || !(t <= 1.0)) throw std::invalid_argument("--averaged: t must lie in [0,1]");
    cesarolab::AveragedKernel ak =
        cesarolab::averaged_kernel_series(w, t * std::abs(z), table, g.tol);
    std::complex<double> value = cesarolab::averaged_kernel_eval(ak, t * z);
    root["mode"] = "averaged";
    root["t"] = t;
    root["z"] = complex_json(z);
    root["value"] = complex_json(value);
    root["terms"] = ak.log_kappa.size();
    csv = "re,im\n" + cesarolab::format_double_shortest(value.real()) + "," +
          cesarolab::format_double_shortest(value.imag()) + "\n";
    summary = "averaged kernel " + w.label() + ": value (" +
              cesarolab::format_double_shortest(value.real()) + ", " +
              cesarolab::format_double_shortest(value.imag()) + ")";
  } else {
    throw std::invalid_argument("kernel: one of --coeffs, --eval, --averaged is required");
  }
  stamp(root, g);
  emit(g, g.format == "csv" ? csv : dump(root), summary);
  cache.flush();
  return 0;
}

int run_apply(const GlobalOpts& g, const std::string& weight_text, const std::string& series_path,
              const std::string& mode, const std::vector<double>& z_flat) {
  RadialWeight w = RadialWeight::parse(weight_text);
  MomentTable table(w, quad_config(g));
  CacheSession cache(g);
  cache.attach(table);

  CoefficientSeries f = CoefficientSeries::from_json_text(cesarolab::read_file(series_path));

  ordered_json root;
  root["command"] = "apply";
  root["weight"] = w.label();
  root["weight_id"] = w.id();
  root["mode"] = mode;
  root["input_degree"] = f.degree();
  std::string csv;
  std::string summary;

  if (mode == "coeff") {
    CoefficientSeries gseries = cesarolab::apply(w, f, table);
    ordered_json out = ordered_json::array();
    csv = "n,re,im\n";
    for (std::size_t n = 0; n < gseries.coeffs.size(); ++n) {
      out.push_back(complex_json(gseries.coeffs[n]));
      csv += std::to_string(n) + "," +
             cesarolab::format_double_shortest(gseries.coeffs[n].real()) + "," +
             cesarolab::format_double_shortest(gseries.coeffs[n].imag()) + "\n";
    }
    root["output"] = out;
    summary = "apply " + w.label() + ": degree " + std::to_string(gseries.degree()) + " output";
  } else if (mode == "integral") {
    std::vector<std::complex<double>> zs = parse_z_pairs(z_flat);
    ordered_json pts = ordered_json::array();
    csv = "z_re,z_im,re,im\n";
    for (auto z : zs) {
      std::complex<double> v = cesarolab::apply_integral(w, f, z, table, quad_config(g));
      ordered_json row;
      row["z"] = complex_json(z);
      row["value"] = complex_json(v);
      pts.push_back(row);
      csv += cesarolab::format_double_shortest(z.real()) + "," +
             cesarolab::format_double_shortest(z.imag()) + "," +
             cesarolab::format_double_shortest(v.real()) + "," +
             cesarolab::format_double_shortest(v.imag()) + "\n";
    }
    root["points"] = pts;
    summary = "apply-integral " + w.label() + ": " + std::to_string(zs.size()) + " evaluations";
  } else {
    throw std::invalid_argument("apply: --mode must be coeff or integral");
  }
  stamp(root, g);
  emit(g, g.format == "csv" ? csv : dump(root), summary);
  cache.flush();
  return 0;
}

int run_scan(const GlobalOpts& g, const std::string& weight_text, const std::string& space_text,
             const std::vector<std::size_t>& dims, int max_iters,
             const std::string& dump_section_path) {
  RadialWeight w = RadialWeight::parse(weight_text);
  SpaceSpec space = SpaceSpec::parse(space_text, quad_config(g));
  MomentTable table(w, quad_config(g));
  CacheSession cache(g);
  cache.attach(table);
  if (!space.is_hgamma()) cache.attach(space.mu_table());

  cesarolab::PowerIterationConfig pcfg;
  pcfg.max_iters = max_iters;
  pcfg.threads = g.threads;
  cesarolab::ScanThresholds th;
  cesarolab::ScanReport rep = cesarolab::boundedness_scan(w, space, dims, table, pcfg, th);

  if (!dump_section_path.empty()) {
    cesarolab::OperatorSection s =
        cesarolab::matrix_section(w, space, dims.back(), table, g.threads);
    cesarolab::write_file_atomic(dump_section_path, cesarolab::section_to_csv(s));
  }

  ordered_json root;
  root["command"] = "scan";
  root["weight"] = rep.weight_label;
  root["weight_id"] = rep.weight_id;
  root["space"] = rep.space_label;
  root["Ns"] = rep.dims;
  root["sigmas"] = rep.sigmas;
  root["iterations"] = rep.iterations;
  ordered_json conv = ordered_json::array();
  for (bool b : rep.converged) conv.push_back(b);
  root["converged"] = conv;
  root["growth_fit"] = rep.growth_fit;
  root["max_tail_ratio_per_doubling"] = rep.max_tail_ratio_per_doubling;
  root["verdict"] = cesarolab::scan_verdict_name(rep.verdict);
  ordered_json th_json;
  th_json["plateau_ratio_per_doubling"] = th.plateau_ratio_per_doubling;
  th_json["growth_slope_threshold"] = th.growth_slope_threshold;
  th_json["tail_points"] = th.tail_points;
  root["thresholds"] = th_json;
  stamp(root, g);

  std::string csv = "N,sigma\n";
  for (std::size_t i = 0; i < rep.dims.size(); ++i) {
    csv += std::to_string(rep.dims[i]) + "," +
           cesarolab::format_double_shortest(rep.sigmas[i]) + "\n";
  }
  emit(g, g.format == "csv" ? csv : dump(root),
       "scan " + rep.weight_label + " on " + rep.space_label + ": " +
           cesarolab::scan_verdict_name(rep.verdict) + " (sigma " +
           cesarolab::format_double_shortest(rep.sigmas.back()) + " at N=" +
           std::to_string(rep.dims.back()) + ")");
  cache.flush();
  return 0;
}

int run_probe(const GlobalOpts& g, const std::string& weight_text, const std::string& space_text,
              const std::vector<double>& a_grid, double tail_tol) {
  RadialWeight w = RadialWeight::parse(weight_text);
  SpaceSpec space = SpaceSpec::parse(space_text, quad_config(g));
  MomentTable table(w, quad_config(g));
  CacheSession cache(g);
  cache.attach(table);
  if (!space.is_hgamma()) cache.attach(space.mu_table());

  cesarolab::ProbeReport rep = cesarolab::compactness_probe(w, space, a_grid, table, tail_tol);

  ordered_json root;
  root["command"] = "probe";
  root["weight"] = rep.weight_label;
  root["space"] = rep.space_label;
  root["tail_tol"] = tail_tol;
  ordered_json pts = ordered_json::array();
  std::string csv = "a,ratio\n";
  for (const auto& p : rep.points) {
    ordered_json row;
    row["a"] = p.a;
    row["degree"] = p.degree;
    row["norm"] = p.family_norm;
    row["ratio"] = p.ratio;
    pts.push_back(row);
    csv += cesarolab::format_double_shortest(p.a) + "," +
           cesarolab::format_double_shortest(p.ratio) + "\n";
  }
  root["points"] = pts;
  root["min_ratio"] = rep.min_ratio;
  stamp(root, g);
  emit(g, g.format == "csv" ? csv : dump(root),
       "probe " + rep.weight_label + " on " + rep.space_label + ": min ratio " +
           cesarolab::format_double_shortest(rep.min_ratio));
  cache.flush();
  return 0;
}

int run_dirichlet(const GlobalOpts& g, const std::string& weight_text, std::size_t n_max) {
  RadialWeight w = RadialWeight::parse(weight_text);
  MomentTable table(w, quad_config(g));
  CacheSession cache(g);
  cache.attach(table);

  cesarolab::DirichletCurve curve = cesarolab::dirichlet_divergence(w, n_max, table);

  ordered_json root;
  root["command"] = "dirichlet";
  root["weight"] = w.label();
  root["weight_id"] = w.id();
  root["n_max"] = n_max;
  root["S"] = curve.series_sum;
  root["L"] = curve.lower_bound;
  stamp(root, g);

  std::string csv = "N,S,L\n";
  for (std::size_t n = 0; n < curve.series_sum.size(); ++n) {
    csv += std::to_string(n) + "," + cesarolab::format_double_shortest(curve.series_sum[n]) +
           "," + cesarolab::format_double_shortest(curve.lower_bound[n]) + "\n";
  }
  emit(g, g.format == "csv" ? csv : dump(root),
       "dirichlet " + w.label() + ": S(" + std::to_string(n_max) + ") = " +
           cesarolab::format_double_shortest(curve.series_sum.back()) + ", L = " +
           cesarolab::format_double_shortest(curve.lower_bound.back()));
  cache.flush();
  return 0;
}

int run_necessity(const GlobalOpts& g, const std::string& weight_text,
                  const std::string& space_text, std::size_t N,
                  const std::vector<std::size_t>& m_values) {
  RadialWeight w = RadialWeight::parse(weight_text);
  SpaceSpec space = SpaceSpec::parse(space_text, quad_config(g));
  MomentTable table(w, quad_config(g));
  CacheSession cache(g);
  cache.attach(table);
  if (!space.is_hgamma()) cache.attach(space.mu_table());

  cesarolab::NecessityReport rep =
      cesarolab::necessity_functionals(w, space, N, m_values, table);

  ordered_json root;
  root["command"] = "necessity";
  root["weight"] = rep.weight_label;
  root["space"] = rep.space_label;
  root["N"] = rep.block_size;
  root["moment_ratio"] = rep.moment_ratio;
  root["fn_ratio"] = rep.fn_ratio;
  root["Ms"] = rep.m_values;
  root["double_sums"] = rep.double_sums;
  root["fnm_ratios"] = rep.fnm_ratios;
  stamp(root, g);

  std::string csv = "M,double_sum,fnm_ratio\n";
  for (std::size_t i = 0; i < rep.m_values.size(); ++i) {
    csv += std::to_string(rep.m_values[i]) + "," +
           cesarolab::format_double_shortest(rep.double_sums[i]) + "," +
           cesarolab::format_double_shortest(rep.fnm_ratios[i]) + "\n";
  }
  emit(g, g.format == "csv" ? csv : dump(root),
       "necessity " + rep.weight_label + " on " + rep.space_label + ": moment ratio " +
           cesarolab::format_double_shortest(rep.moment_ratio));
  cache.flush();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for generalized Cesaro operators on weighted spaces"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--cache", g.cache_path, "moment cache CSV, loaded before and saved after");
  app.add_option("--out", g.out_path, "write structured output to this file");
  app.add_option("--format", g.format, "structured output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--tol", g.tol, "quadrature relative tolerance")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0 = auto)")->capture_default_str();
  app.add_flag("--no-timestamp", g.no_timestamp, "omit timestamps from JSON output");

  // moments
  auto* cmd_moments = app.add_subcommand("moments", "weight moments w_x");
  std::string m_weight;
  std::vector<double> m_xs;
  bool m_force = false;
  cmd_moments->add_option("--weight", m_weight, "weight DSL expression")->required();
  cmd_moments->add_option("--x", m_xs, "exponents")->required()->delimiter(',');
  cmd_moments->add_flag("--force-quadrature", m_force, "bypass closed forms");

  // classify
  auto* cmd_classify = app.add_subcommand("classify", "weight class membership report");
  std::string c_weight;
  cesarolab::ClassifyConfig c_cfg;
  cmd_classify->add_option("--weight", c_weight, "weight DSL expression")->required();
  cmd_classify->add_option("--plateau-tol", c_cfg.plateau_tol, "plateau tolerance")
      ->capture_default_str();
  cmd_classify
      ->add_option("--slope-threshold", c_cfg.slope_threshold, "divergence slope per doubling")
      ->capture_default_str();

  // kernel
  auto* cmd_kernel = app.add_subcommand("kernel", "reproducing kernel diagnostics");
  std::string k_weight;
  std::size_t k_coeffs = 0;
  std::vector<double> k_eval, k_averaged;
  cmd_kernel->add_option("--weight", k_weight, "weight DSL expression")->required();
  cmd_kernel->add_option("--coeffs", k_coeffs, "emit the first N kernel coefficients");
  cmd_kernel->add_option("--eval", k_eval, "evaluate at Z_RE,Z_IM,ZETA_RE,ZETA_IM")
      ->delimiter(',');
  cmd_kernel->add_option("--averaged", k_averaged, "averaged kernel at T,Z_RE,Z_IM")
      ->delimiter(',');

  // apply
  auto* cmd_apply = app.add_subcommand("apply", "apply the operator to a coefficient series");
  std::string a_weight, a_series, a_mode = "coeff";
  std::vector<double> a_z;
  cmd_apply->add_option("--weight", a_weight, "weight DSL expression")->required();
  cmd_apply->add_option("--series", a_series, "JSON series file ([re,im] pairs)")->required();
  cmd_apply->add_option("--mode", a_mode, "coeff or integral")->capture_default_str();
  cmd_apply->add_option("--z", a_z, "evaluation points, flat re,im pairs")->delimiter(',');

  // scan
  auto* cmd_scan = app.add_subcommand("scan", "finite-section operator norm sweep");
  std::string s_weight, s_space, s_dump;
  std::vector<std::size_t> s_dims;
  int s_max_iters = 2000;
  cmd_scan->add_option("--weight", s_weight, "weight DSL expression")->required();
  cmd_scan->add_option("--space", s_space, "hgamma:G or bergman:WEIGHT")->required();
  cmd_scan->add_option("--ns", s_dims, "section sizes, increasing")->required()->delimiter(',');
  cmd_scan->add_option("--max-iters", s_max_iters, "power iteration budget")
      ->capture_default_str();
  cmd_scan->add_option("--dump-section", s_dump, "write the largest section as CSV here");

  // probe
  auto* cmd_probe = app.add_subcommand("probe", "compactness probe along a boundary family");
  std::string p_weight, p_space;
  std::vector<double> p_a;
  double p_tail_tol = 1e-6;
  cmd_probe->add_option("--weight", p_weight, "weight DSL expression")->required();
  cmd_probe->add_option("--space", p_space, "hgamma:G or bergman:WEIGHT")->required();
  cmd_probe->add_option("--a", p_a, "family parameters in (0,1)")->required()->delimiter(',');
  cmd_probe->add_option("--tail-tol", p_tail_tol, "dropped norm mass")->capture_default_str();

  // dirichlet
  auto* cmd_dirichlet = app.add_subcommand("dirichlet", "divergence curve for the constant input");
  std::string d_weight;
  std::size_t d_nmax = 10000;
  cmd_dirichlet->add_option("--weight", d_weight, "weight DSL expression")->required();
  cmd_dirichlet->add_option("--nmax", d_nmax, "largest index")->capture_default_str();

  // necessity
  auto* cmd_necessity = app.add_subcommand("necessity", "necessity-direction observables");
  std::string n_weight, n_space;
  std::size_t n_block = 64;
  std::vector<std::size_t> n_ms{2, 4, 8};
  cmd_necessity->add_option("--weight", n_weight, "weight DSL expression")->required();
  cmd_necessity->add_option("--space", n_space, "hgamma:G or bergman:WEIGHT")->required();
  cmd_necessity->add_option("--n", n_block, "block size N")->capture_default_str();
  cmd_necessity->add_option("--m", n_ms, "multipliers M")->delimiter(',')
      ->capture_default_str();

  for (CLI::App* sc : {cmd_moments, cmd_classify, cmd_kernel, cmd_apply, cmd_scan, cmd_probe,
                       cmd_dirichlet, cmd_necessity}) {
    sc->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_moments) return run_moments(g, m_weight, m_xs, m_force);
    if (*cmd_classify) return run_classify(g, c_weight, c_cfg);
    if (*cmd_kernel) return run_kernel(g, k_weight, k_coeffs, k_eval, k_averaged);
    if (*cmd_apply) return run_apply(g, a_weight, a_series, a_mode, a_z);
    if (*cmd_scan) return run_scan(g, s_weight, s_space, s_dims, s_max_iters, s_dump);
    if (*cmd_probe) return run_probe(g, p_weight, p_space, p_a, p_tail_tol);
    if (*cmd_dirichlet) return run_dirichlet(g, d_weight, d_nmax);
    if (*cmd_necessity) return run_necessity(g, n_weight, n_space, n_block, n_ms);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const cesarolab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const cesarolab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
