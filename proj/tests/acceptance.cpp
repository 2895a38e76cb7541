// Acceptance gate: one pass/fail line per criterion, exit 0 only if all hold.
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "cesarolab/analysis.hpp"
#include "cesarolab/cesaro.hpp"
#include "cesarolab/classify.hpp"
#include "cesarolab/common.hpp"
#include "cesarolab/kernels.hpp"
#include "cesarolab/moments.hpp"
#include "cesarolab/spaces.hpp"
#include "cesarolab/weights.hpp"
#include "test_support.hpp"

using namespace cesarolab;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// 1. apply() under the classical weight is the running average, 100 random
//    degree-64 vectors, 1e-12 absolute per coefficient.
void criterion_running_average(Checker& c) {
  const double tol = 1e-12;
  const auto one = RadialWeight::parse("one");
  MomentTable t(one);
  testsup::Rng rng(0xacce0001);
  for (int trial = 0; trial < 100; ++trial) {
    CoefficientSeries f;
    f.coeffs = testsup::random_coeffs(rng, 65);
    const auto g = apply(one, f, t);
    c.require(g.coeffs.size() == 65, "output degree changed");
    std::complex<double> partial{0.0, 0.0};
    for (std::size_t n = 0; n < 65; ++n) {
      partial += f.coeffs[n];
      const double err = std::abs(g.coeffs[n] - partial / (n + 1.0));
      c.require(err <= tol, "coefficient off by " + format_double_shortest(err));
    }
  }
}

// 2. image of the constant function: coefficients 1/(n+1) to closed-form
//    precision, degree-60 evaluation at 0.5 equal to 2 log 2 within 1e-10.
void criterion_constant_image(Checker& c) {
  const double coeff_rel_tol = 5e-15;
  const double eval_tol = 1e-10;
  const auto one = RadialWeight::parse("one");
  MomentTable t(one);
  CoefficientSeries f;
  f.coeffs.assign(61, {0.0, 0.0});
  f.coeffs[0] = {1.0, 0.0};
  const auto g = apply(one, f, t);
  for (std::size_t n = 0; n <= 60; ++n) {
    const double expected = 1.0 / (n + 1.0);
    c.require(std::abs(g.coeffs[n].real() - expected) <= coeff_rel_tol * expected,
              "coefficient " + std::to_string(n));
    c.require(g.coeffs[n].imag() == 0.0, "nonreal coefficient");
  }
  const double at_half = g.evaluate({0.5, 0.0}).real();
  c.require(std::abs(at_half - 2.0 * std::log(2.0)) <= eval_tol,
            "evaluation " + format_double_shortest(at_half));
}

// 3. kernel coefficients for pow2(alpha) against the Gamma closed form,
//    n <= 512, 1e-9 relative, moments forced through quadrature.
void criterion_kernel_closed_form(Checker& c) {
  const double rel_tol = 1e-9;
  for (double alpha : {0.0, 1.0, 2.5}) {
    const auto w = RadialWeight::parse("pow2(" + format_double_shortest(alpha) + ")");
    MomentTable t(w, QuadratureConfig{}, true);
    const auto kc = kernel_coeffs(w, 513, t);
    c.require(kc.log_c.size() == 513, "coefficient count");
    for (std::size_t n = 0; n <= 512; ++n) {
      const double log_ref = std::log(alpha + 1.0) + std::lgamma(n + 2.0 + alpha) -
                             std::lgamma(alpha + 2.0) - std::lgamma(n + 1.0);
      const double rel = std::abs(std::expm1(kc.log_c[n] - log_ref));
      c.require(rel <= rel_tol, "alpha " + format_double_shortest(alpha) + ", n " +
                                    std::to_string(n) + ": rel " + format_double_shortest(rel));
    }
  }
}

// 4. integral form against the coefficient form on a truncated geometric
//    series, five real points, 1e-8 absolute.
void criterion_integral_cross_check(Checker& c) {
  const double tol = 1e-8;
  CoefficientSeries f;
  f.coeffs.resize(65);
  double p = 1.0;
  for (std::size_t k = 0; k < 65; ++k, p *= 0.3) f.coeffs[k] = {p, 0.0};
  for (const char* text : {"one", "pow(0.5)", "pow(2)", "pow2(1)"}) {
    const auto w = RadialWeight::parse(text);
    MomentTable t(w);
    const auto g = apply(w, f, t);
    for (double x : {0.1, 0.3, 0.5, 0.6, 0.7}) {
      const std::complex<double> z{x, 0.0};
      const double diff = std::abs(apply_integral(w, f, z, t) - g.evaluate(z));
      c.require(diff <= tol, std::string(text) + " at z=" + format_double_shortest(x) +
                                 ": diff " + format_double_shortest(diff));
    }
  }
}

// 5. classical section norms: strictly increasing, below 2, above 1.75 by
//    N=4096; the 2x2 section matches its closed form within 1e-9.
void criterion_sharp_constant(Checker& c) {
  const double closed_tol = 1e-9;
  const auto one = RadialWeight::parse("one");
  MomentTable t(one);
  const auto space = SpaceSpec::hgamma(1.0);

  const auto two = section_norm(matrix_section(one, space, 2, t));
  const double closed = std::sqrt((3.0 + std::sqrt(5.0)) / 4.0);
  c.require(std::abs(two.sigma - closed) <= closed_tol,
            "2x2 norm " + format_double_shortest(two.sigma));

  double prev = 0.0;
  for (std::size_t n : {std::size_t(64), std::size_t(256), std::size_t(1024), std::size_t(4096)}) {
    const auto res = section_norm(matrix_section(one, space, n, t));
    c.require(res.converged, "power iteration stalled at N=" + std::to_string(n));
    c.require(res.sigma > prev, "not increasing at N=" + std::to_string(n));
    c.require(res.sigma < 2.0, "ceiling broken at N=" + std::to_string(n));
    prev = res.sigma;
  }
  c.require(prev > 1.75, "sigma(4096) = " + format_double_shortest(prev));
}

// 6. scan verdicts: bounded-looking for the regular pairs, unbounded-looking
//    for essential decay with at least a factor 2 between N=512 and N=4096.
void criterion_dichotomy(Checker& c) {
  const std::size_t dims[] = {64, 128, 256, 512, 1024, 2048, 4096};
  const auto scan_of = [&](const char* wtext, const SpaceSpec& space) {
    const auto w = RadialWeight::parse(wtext);
    MomentTable t(w);
    return boundedness_scan(w, space, dims, t);
  };
  for (const char* wtext : {"one", "pow(1)"}) {
    for (double gamma : {0.5, 1.0, 2.0}) {
      const auto rep = scan_of(wtext, SpaceSpec::hgamma(gamma));
      c.require(rep.verdict == ScanVerdict::BoundedLooking,
                std::string(wtext) + " on hgamma:" + format_double_shortest(gamma) + " gave " +
                    scan_verdict_name(rep.verdict));
    }
  }
  const auto bergman = scan_of("pow(1)", SpaceSpec::bergman(RadialWeight::parse("pow(0.5)")));
  c.require(bergman.verdict == ScanVerdict::BoundedLooking,
            "bergman pair gave " + scan_verdict_name(bergman.verdict));

  const auto decay = scan_of("exp(1,1)", SpaceSpec::hgamma(1.0));
  c.require(decay.verdict == ScanVerdict::UnboundedLooking,
            "exp(1,1) gave " + scan_verdict_name(decay.verdict));
  c.require(decay.sigmas[6] / decay.sigmas[3] >= 2.0,
            "growth factor " + format_double_shortest(decay.sigmas[6] / decay.sigmas[3]));
}

// 7. divergence envelope S(N) >= L(N) across the roster up to N=10^4, and
//    the envelope itself clears 2.3.
void criterion_divergence_envelope(Checker& c) {
  for (const char* text :
       {"one", "pow(0.5)", "pow(1)", "pow(2)", "pow2(1)", "exp(1,1)", "loginv(2)"}) {
    const auto w = RadialWeight::parse(text);
    MomentTable t(w);
    const auto curve = dirichlet_divergence(w, 10000, t);
    for (std::size_t n = 0; n < curve.series_sum.size(); ++n) {
      if (curve.series_sum[n] < curve.lower_bound[n]) {
        c.require(false, std::string(text) + " dips under the envelope at N=" +
                             std::to_string(n));
        break;
      }
    }
    if (std::string(text) == "one") {
      c.require(curve.lower_bound.back() > 2.3,
                "L(10^4) = " + format_double_shortest(curve.lower_bound.back()));
    }
  }
}

// 8. boundary family: unit norms under the truncation rule and ratios
//    bounded away from zero on both reference pairs.
void criterion_boundary_family(Checker& c) {
  const double norm_tol = 1e-6;
  const double floor = 0.1;
  const double grid[] = {0.9, 0.99, 0.999};
  const auto probe_of = [&](const char* wtext, const SpaceSpec& space) {
    const auto w = RadialWeight::parse(wtext);
    MomentTable t(w);
    return compactness_probe(w, space, grid, t);
  };
  const ProbeReport reports[] = {
      probe_of("one", SpaceSpec::hgamma(1.0)),
      probe_of("pow(1)", SpaceSpec::bergman(RadialWeight::parse("pow(1)"))),
  };
  for (const auto& rep : reports) {
    for (const auto& p : rep.points) {
      c.require(std::abs(p.family_norm - 1.0) <= norm_tol,
                rep.weight_label + " norm at a=" + format_double_shortest(p.a) + ": " +
                    format_double_shortest(p.family_norm));
    }
    c.require(rep.min_ratio >= floor,
              rep.weight_label + " min ratio " + format_double_shortest(rep.min_ratio));
  }
}

// 9. classifier truth table over the roster.
void criterion_truth_table(Checker& c) {
  const auto report_of = [](const char* text) {
    const auto w = RadialWeight::parse(text);
    MomentTable t(w);
    return classify(w, ClassifyConfig{}, t);
  };
  for (const char* text : {"one", "pow(0.5)", "pow(1)", "pow(2)", "pow2(1)"}) {
    const auto rep = report_of(text);
    c.require(rep.in_d == Verdict::Yes,
              std::string(text) + " in_d = " + verdict_name(rep.in_d));
  }
  const auto decay = report_of("exp(1,1)");
  c.require(decay.in_dhat.verdict == Verdict::No,
            "exp(1,1) in_dhat = " + verdict_name(decay.in_dhat.verdict));
  const auto slow = report_of("loginv(2)");
  c.require(slow.in_dhat.verdict == Verdict::Yes,
            "loginv(2) in_dhat = " + verdict_name(slow.in_dhat.verdict));
  c.require(slow.in_m.verdict == Verdict::No,
            "loginv(2) in_m = " + verdict_name(slow.in_m.verdict));
}

// 10. randomized property suites, 1000 trials each.
void criterion_property_suites(Checker& c) {
  {  // moments decrease in the exponent
    testsup::Rng rng(0xacce000a);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
      const auto w = testsup::random_weight(rng);
      MomentTable t(w);
      for (int pair = 0; pair < 3; ++pair) {
        const double x = rng.range(0.0, 180.0);
        const double y = x + rng.range(0.0, 60.0);
        const double lx = moment(w, x, t).log_value;
        const double ly = moment(w, y, t).log_value;
        c.require(lx >= ly - 1e-10, "moment order violated for " + w.label());
      }
    }
  }
  {  // nested sections agree bit for bit
    testsup::Rng rng(0xacce000b);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
      const auto w = testsup::random_weight(rng, true);
      MomentTable t(w);
      const auto space = rng.below(2) == 0
                             ? SpaceSpec::hgamma(rng.range(0.4, 2.5))
                             : SpaceSpec::bergman(RadialWeight::parse("pow(1)"));
      const std::size_t small = 2 + rng.below(10);
      const std::size_t big = small + 1 + rng.below(10);
      const auto a = matrix_section(w, space, small, t);
      const auto b = matrix_section(w, space, big, t);
      for (std::size_t n = 0; n < small && c.ok; ++n) {
        for (std::size_t k = 0; k <= n; ++k) {
          c.require(a.entry(n, k) == b.entry(n, k), "nesting broke for " + w.label());
        }
      }
    }
  }
  {  // apply is linear
    testsup::Rng rng(0xacce000c);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
      const auto w = testsup::random_weight(rng);
      MomentTable t(w);
      const std::size_t len = 1 + rng.below(32);
      CoefficientSeries f, g, combo;
      f.coeffs = testsup::random_coeffs(rng, len);
      g.coeffs = testsup::random_coeffs(rng, len);
      const std::complex<double> alpha = rng.complex_unit();
      const std::complex<double> beta = rng.complex_unit();
      combo.coeffs.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        combo.coeffs[i] = alpha * f.coeffs[i] + beta * g.coeffs[i];
      }
      const auto cf = apply(w, f, t);
      const auto cg = apply(w, g, t);
      const auto cc = apply(w, combo, t);
      for (std::size_t i = 0; i < len && c.ok; ++i) {
        const std::complex<double> expected = alpha * cf.coeffs[i] + beta * cg.coeffs[i];
        c.require(std::abs(cc.coeffs[i] - expected) <= 1e-11 * (1.0 + std::abs(expected)),
                  "linearity broke for " + w.label());
      }
    }
  }
  {  // squared norms add over disjoint coefficient blocks
    testsup::Rng rng(0xacce000d);
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
      const bool hardy = rng.below(2) == 0;
      const auto space = hardy ? SpaceSpec::hgamma(rng.range(0.3, 3.0))
                               : SpaceSpec::bergman(testsup::random_weight(rng, true));
      const std::size_t len = 2 + rng.below(40);
      const std::size_t cut = 1 + rng.below(len - 1);
      CoefficientSeries low, high, both;
      low.coeffs.assign(len, {0.0, 0.0});
      high.coeffs.assign(len, {0.0, 0.0});
      both.coeffs.assign(len, {0.0, 0.0});
      for (std::size_t i = 0; i < len; ++i) {
        const std::complex<double> v{rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)};
        both.coeffs[i] = v;
        (i < cut ? low : high).coeffs[i] = v;
      }
      const double split =
          space.norm(low) * space.norm(low) + space.norm(high) * space.norm(high);
      const double whole = space.norm(both) * space.norm(both);
      c.require(std::abs(whole - split) <= 1e-11 * (1.0 + split),
                "norm additivity broke on " + space.label());
    }
  }
}

}  // namespace

int main() {
  const struct {
    const char* label;
    std::function<void(Checker&)> fn;
  } criteria[] = {
      {"classical running average", criterion_running_average},
      {"constant image coefficients and value", criterion_constant_image},
      {"kernel coefficient closed form", criterion_kernel_closed_form},
      {"integral and coefficient forms agree", criterion_integral_cross_check},
      {"sharp section norm ceiling", criterion_sharp_constant},
      {"boundedness dichotomy verdicts", criterion_dichotomy},
      {"divergence envelope", criterion_divergence_envelope},
      {"boundary family ratios", criterion_boundary_family},
      {"weight class truth table", criterion_truth_table},
      {"randomized property suites", criterion_property_suites},
  };

  bool all_ok = true;
  int index = 1;
  for (const auto& cr : criteria) {
    Checker c;
    try {
      cr.fn(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    if (c.ok) {
      std::printf("PASS %d: %s\n", index, cr.label);
    } else {
      std::printf("FAIL %d: %s (%s)\n", index, cr.label, c.detail.c_str());
      all_ok = false;
    }
    std::fflush(stdout);
    ++index;
  }
  return all_ok ? 0 : 1;
}
