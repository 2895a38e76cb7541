#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "cesarolab/common.hpp"
#include "cesarolab/weights.hpp"
#include "test_support.hpp"

using namespace cesarolab;

TEST_CASE("parse and canonical labels") {
  CHECK(RadialWeight::parse("one").label() == "one");
  CHECK(RadialWeight::parse(" pow( 0.50 ) ").label() == "pow(0.5)");
  CHECK(RadialWeight::parse("pow2(1)").label() == "pow2(1)");
  CHECK(RadialWeight::parse("exp(1,1)").label() == "exp(1,1)");
  CHECK(RadialWeight::parse("loginv(2)").label() == "loginv(2)");
  CHECK(RadialWeight::parse("scale(sum(pow(1),exp(1,2)),2)").label() ==
        "scale(sum(pow(1),exp(1,2)),2)");
  CHECK(RadialWeight::parse("sum(one,one)").label() == "sum(one,one)");
}

TEST_CASE("ids are structural") {
  const auto a = RadialWeight::parse("pow(0.5)");
  const auto b = RadialWeight::parse("  pow(.5)");
  const auto c = RadialWeight::parse("pow(0.25)");
  CHECK(a.id() == b.id());
  CHECK(a.id() != c.id());
  CHECK(structurally_equal(*a.expression(), *b.expression()));
  CHECK_FALSE(structurally_equal(*a.expression(), *c.expression()));
  CHECK(RadialWeight::parse("pow(1)").id() != RadialWeight::parse("pow2(1)").id());
}

TEST_CASE("parse rejections carry positions") {
  auto expect_reject = [](const std::string& text, const char* fragment) {
    try {
      RadialWeight::parse(text);
      FAIL_CHECK("accepted: " << text);
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
  };
  expect_reject("pow(-1)", "exceed -1");
  expect_reject("pow(-1.5)", "exceed -1");
  expect_reject("pow2(-2)", "exceed -1");
  expect_reject("exp(0,1)", "positive");
  expect_reject("exp(1,0)", "positive");
  expect_reject("exp(-1,1)", "positive");
  expect_reject("loginv(1)", "exceed 1");
  expect_reject("loginv(0.5)", "exceed 1");
  expect_reject("scale(one,0)", "positive");
  expect_reject("scale(one,-2)", "positive");
  expect_reject("nope(1)", "unknown weight");
  expect_reject("pow(1)x", "trailing");
  expect_reject("pow(1", "");
  expect_reject("", "");
  expect_reject("sum(one)", "");
  expect_reject("pow()", "");
}

TEST_CASE("pointwise evaluation") {
  CHECK(RadialWeight::parse("one").evaluate(0.3) == 1.0);
  CHECK(RadialWeight::parse("pow(2)").evaluate(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(RadialWeight::parse("pow2(1)").evaluate(0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(RadialWeight::parse("exp(1,1)").evaluate(0.5) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  // loginv(p): (1-r)^{-1} (1 - log(1-r))^{-p}
  const double expected = 1.0 / (0.5 * std::pow(1.0 + std::log(2.0), 2.0));
  CHECK(RadialWeight::parse("loginv(2)").evaluate(0.5) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(RadialWeight::parse("scale(one,3)").evaluate(0.9) == doctest::Approx(3.0));
  CHECK(RadialWeight::parse("sum(one,pow(1))").evaluate(0.25) == doctest::Approx(1.75));
  CHECK(RadialWeight::parse("one").evaluate(0.0) == 1.0);
}

TEST_CASE("evaluate domain") {
  const auto w = RadialWeight::parse("one");
  CHECK_THROWS_AS(w.evaluate(1.0), std::invalid_argument);
  CHECK_THROWS_AS(w.evaluate(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(w.log_evaluate_at(0.0), std::invalid_argument);
  CHECK_THROWS_AS(w.log_evaluate_at(1.5), std::invalid_argument);
}

TEST_CASE("log_evaluate_at matches direct evaluation") {
  testsup::Rng rng(0x5eed0001);
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = testsup::random_weight(rng);
    const double delta = std::exp(rng.range(std::log(1e-6), 0.0));
    const double r = 1.0 - delta;
    if (r >= 1.0) continue;
    const double direct = w.evaluate(r);
    const double via_log = w.log_evaluate_at(delta);
    if (direct > 0.0 && std::isfinite(std::log(direct))) {
      CHECK(via_log == doctest::Approx(std::log(direct)).epsilon(1e-9));
    }
  }
}

TEST_CASE("log form reaches below double underflow") {
  // exp(1,1) at delta = 1e-6 is e^{-1e6}, far under DBL_MIN, but its log is fine
  const auto w = RadialWeight::parse("exp(1,1)");
  CHECK(w.log_evaluate_at(1e-6) == doctest::Approx(-1e6).epsilon(1e-12));
  CHECK(w.evaluate(1.0 - 1e-6) == 0.0);
}

TEST_CASE("expression evaluation helper agrees with the weight") {
  const auto w = RadialWeight::parse("sum(scale(pow(1),0.5),pow2(2))");
  for (double delta : {0.9, 0.5, 0.01, 1e-5}) {
    CHECK(log_evaluate_expr_at(*w.expression(), delta) ==
          doctest::Approx(w.log_evaluate_at(delta)).epsilon(1e-14));
  }
}
