#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cesarolab/common.hpp"
#include "cesarolab/moments.hpp"
#include "test_support.hpp"

using namespace cesarolab;

namespace {

double closed_log_one(double x) { return -std::log1p(x); }

struct TempFile {
  std::string path;
  explicit TempFile(const char* stem) {
    path = (std::filesystem::temp_directory_path() /
            (std::string(stem) + "." + std::to_string(::getpid()) + ".csv"))
               .string();
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("closed forms agree with quadrature") {
  const char* exprs[] = {"one",       "pow(0.5)", "pow(2.5)",           "pow2(0)",
                         "pow2(1)",   "pow2(2.5)", "scale(pow(1),2.5)", "sum(one,pow(1))"};
  const double xs[] = {0.0, 0.5, 1.0, 2.0, 10.0, 100.0, 10000.0};
  for (const char* text : exprs) {
    const auto w = RadialWeight::parse(text);
    MomentTable closed(w);
    MomentTable forced(w, {}, true);
    for (double x : xs) {
      const double a = moment(w, x, closed).log_value;
      const double b = moment(w, x, forced).log_value;
      INFO(text << " at x=" << x);
      CHECK(std::abs(a - b) <= 1e-11);
    }
  }
}

TEST_CASE("reference moments for the essential-decay weights") {
  // mpmath oracles
  const auto we = RadialWeight::parse("exp(1,1)");
  MomentTable te(we);
  CHECK(std::exp(moment(we, 0.0, te).log_value) ==
        doctest::Approx(0.1484955067759220).epsilon(1e-12));
  CHECK(std::exp(moment(we, 1.0, te).log_value) ==
        doctest::Approx(0.03880353957816191).epsilon(1e-12));
  CHECK(std::exp(moment(we, 10.0, te).log_value) ==
        doctest::Approx(0.0002393988887712505).epsilon(1e-12));
  CHECK(moment(we, 2048.0, te).log_value ==
        doctest::Approx(-96.17597979155437).epsilon(1e-12));

  const auto wl = RadialWeight::parse("loginv(2)");
  MomentTable tl(wl);
  CHECK(std::exp(moment(wl, 0.0, tl).log_value) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(moment(wl, 1.0, tl).log_value) ==
        doctest::Approx(0.5963473623231941).epsilon(1e-12));
  CHECK(std::exp(moment(wl, 10.0, tl).log_value) ==
        doctest::Approx(0.2782211983563279).epsilon(1e-12));
  CHECK(std::exp(moment(wl, 1000.0, tl).log_value) ==
        doctest::Approx(0.1203080454866267).epsilon(1e-12));
  CHECK(std::exp(moment(wl, 2048.0, tl).log_value) ==
        doctest::Approx(0.11060436622534269).epsilon(1e-12));
}

TEST_CASE("loginv stays accurate as p approaches 1") {
  // the y-substitution makes w(r) dr = dy/(p-1) exactly; w_0 = 1/(p-1) * y0max
  // with y0 integrating to (p-1)^{-1} * 1^{p-1} ... total mass = 1/(p-1)
  for (double p : {1.001, 1.01, 1.1, 3.0}) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "loginv(%g)", p);
    const auto w = RadialWeight::parse(buf);
    MomentTable t(w);
    CHECK(moment(w, 0.0, t).log_value == doctest::Approx(-std::log(p - 1.0)).epsilon(1e-11));
  }
}

TEST_CASE("moment monotonicity property") {
  testsup::Rng rng(0x5eed0002);
  int trials = 0;
  while (trials < 1000) {
    const auto w = testsup::random_weight(rng, true);
    MomentTable t(w);
    for (int i = 0; i < 25 && trials < 1000; ++i, ++trials) {
      const double x = rng.range(0.0, 500.0);
      const double y = x + rng.range(0.0, 500.0);
      const double lx = moment(w, x, t).log_value;
      const double ly = moment(w, y, t).log_value;
      CHECK(lx >= ly - 1e-10);
    }
  }
}

TEST_CASE("moments are log convex in the exponent") {
  for (const char* text : {"one", "pow(1)", "pow2(1)", "exp(1,1)", "loginv(2)"}) {
    const auto w = RadialWeight::parse(text);
    MomentTable t(w);
    for (double x : {0.0, 1.0, 5.0, 40.0}) {
      for (double s : {0.5, 2.0, 16.0}) {
        const double a = moment(w, x, t).log_value;
        const double b = moment(w, x + s, t).log_value;
        const double c = moment(w, x + 2.0 * s, t).log_value;
        CHECK(a + c >= 2.0 * b - 1e-9);
      }
    }
  }
}

TEST_CASE("table ownership and domain checks") {
  const auto w = RadialWeight::parse("one");
  const auto other = RadialWeight::parse("pow(1)");
  MomentTable t(w);
  CHECK_THROWS_AS(moment(other, 1.0, t), std::invalid_argument);
  CHECK_THROWS_AS(moment(w, -1.0, t), std::invalid_argument);
  CHECK_THROWS_AS(moment(w, std::nan(""), t), std::invalid_argument);
}

TEST_CASE("insert is first-wins") {
  const auto w = RadialWeight::parse("one");
  MomentTable t(w);
  const MomentEntry poisoned{-123.0, 1e-16};
  t.insert(5.0, poisoned);
  t.insert(5.0, MomentEntry{-1.0, 1e-16});
  CHECK(t.lookup(5.0)->log_value == -123.0);
  // moment() must serve the cached value rather than recompute
  CHECK(moment(w, 5.0, t).log_value == -123.0);
}

TEST_CASE("prefetch across threads matches serial") {
  const auto w = RadialWeight::parse("exp(1,1)");
  std::vector<double> xs;
  for (int i = 0; i <= 200; ++i) xs.push_back(0.5 * i);
  MomentTable serial(w);
  prefetch_moments(w, xs, serial, 1);
  MomentTable threaded(w);
  prefetch_moments(w, xs, threaded, 4);
  REQUIRE(serial.size() == threaded.size());
  for (double x : xs) {
    CHECK(serial.lookup(x)->log_value == threaded.lookup(x)->log_value);
  }
}

TEST_CASE("tails: closed forms and references") {
  const auto one = RadialWeight::parse("one");
  CHECK(tail(one, 0.25) == doctest::Approx(0.75).epsilon(1e-13));
  const auto p = RadialWeight::parse("pow(1.5)");
  // tail(r) = (1-r)^{2.5}/2.5
  CHECK(tail(p, 0.5) == doctest::Approx(std::pow(0.5, 2.5) / 2.5).epsilon(1e-12));

  const auto we = RadialWeight::parse("exp(1,1)");
  CHECK(tail(we, 0.9) == doctest::Approx(3.830240465631609e-7).epsilon(1e-11));
  CHECK(tail(we, 0.5) == doctest::Approx(0.01876713091024523).epsilon(1e-11));

  // loginv(2) tail has the closed value 1/(1 - log(1-r))
  const auto wl = RadialWeight::parse("loginv(2)");
  CHECK(tail(wl, 0.5) == doctest::Approx(0.59061610914964125).epsilon(1e-11));
  CHECK(tail(wl, 0.9) == doctest::Approx(0.30279310656411387).epsilon(1e-11));
}

TEST_CASE("tail in log form handles dyadic arguments far below 1") {
  const auto one = RadialWeight::parse("one");
  const double d = std::ldexp(1.0, -40);
  CHECK(log_tail_at(one, d).log_value == doctest::Approx(std::log(d)).epsilon(1e-13));
  const auto wl = RadialWeight::parse("loginv(2)");
  const double expected = -std::log1p(-std::log(d));
  CHECK(log_tail_at(wl, d).log_value == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("tail is monotone in r") {
  for (const char* text : {"one", "pow2(1)", "exp(1,1)", "loginv(2)"}) {
    const auto w = RadialWeight::parse(text);
    double prev = kPosInf;
    for (double d : {0.9, 0.5, 0.1, 0.01, 1e-4}) {
      const double cur = log_tail_at(w, d).log_value;
      CHECK(cur <= prev + 1e-10);
      prev = cur;
    }
  }
}

TEST_CASE("cache file round-trips exactly") {
  const auto w = RadialWeight::parse("exp(1,1)");
  MomentTable t(w);
  for (double x : {0.0, 1.0, 2.5, 77.0}) moment(w, x, t);

  TempFile tmp("cesarolab_cache_test");
  MomentCacheFile file;
  file.merge_table(t);
  file.save(tmp.path);

  MomentCacheFile loaded = MomentCacheFile::load(tmp.path);
  REQUIRE(loaded.by_weight.count(w.id()) == 1);
  MomentTable fresh(w);
  loaded.absorb_into(fresh);
  REQUIRE(fresh.size() == t.size());
  for (const auto& [x, e] : t.snapshot()) {
    auto hit = fresh.lookup(x);
    REQUIRE(hit.has_value());
    CHECK(hit->log_value == e.log_value);  // bit-exact through the CSV
    CHECK(hit->abs_log_err == e.abs_log_err);
  }
}

TEST_CASE("cache load failures") {
  CHECK(MomentCacheFile::load("/nonexistent/cesarolab/cache.csv").by_weight.empty());

  TempFile tmp("cesarolab_cache_bad");
  {
    std::ofstream out(tmp.path);
    out << "weight_id,x,log_value,abs_log_err\nabc,notanumber,1,2\n";
  }
  CHECK_THROWS_AS(MomentCacheFile::load(tmp.path), ParseError);
  {
    std::ofstream out(tmp.path, std::ios::trunc);
    out << "wrong,header\n";
  }
  CHECK_THROWS_AS(MomentCacheFile::load(tmp.path), ParseError);
}

TEST_CASE("absorbed entries respect the table tolerance") {
  const auto w = RadialWeight::parse("one");
  MomentCacheFile file;
  file.by_weight[w.id()] = {{3.0, {closed_log_one(3.0) + 0.5, 0.6}}};  // far too crude
  MomentTable t(w);
  file.absorb_into(t);
  // a cached value whose error exceeds the table tolerance must not be used
  const double got = moment(w, 3.0, t).log_value;
  CHECK(got == doctest::Approx(closed_log_one(3.0)).epsilon(1e-13));
}
