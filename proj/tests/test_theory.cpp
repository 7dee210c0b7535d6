#include "doctest.h"

#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/synth.hpp"
#include "coherence_pursuit/theory.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>

using namespace cop;

namespace {

ConditionParams base_params() {
  ConditionParams p;
  p.m = 1000;
  p.r = 3;
  p.n1 = 600;
  p.n2 = 20;
  p.delta = 0.05;
  p.mu = 0.5;
  p.sigma_n = 0.1;
  p.nu = 0.3;
  return p;
}

// tail probability through Boost's regularized incomplete beta
double boost_tail(double t, double m) { return boost::math::ibetac(0.5, (m - 1) / 2, t / m); }

}  // namespace

TEST_CASE("condition arithmetic for the p=2 expectation gap") {
  ConditionParams p;
  p.m = 400;
  p.r = 5;
  p.n1 = 50;
  p.n2 = 500;
  auto rep = check_condition(ConditionKind::ExpectedGapSquared, p);
  CHECK(rep.lhs == doctest::Approx(8.75).epsilon(1e-14));
  CHECK(rep.rhs == doctest::Approx(1.45).epsilon(1e-14));
  CHECK(rep.holds);

  p.m = 100;
  p.r = 10;
  p.n1 = 10;
  p.n2 = 100;
  rep = check_condition(ConditionKind::ExpectedGapSquared, p);
  CHECK(rep.lhs == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_FALSE(rep.holds);
}

TEST_CASE("every condition matches an independent high-precision evaluation") {
  // Reference values evaluated at 30 digits with mpmath at
  // m=1000, r=3, n1=600, n2=20, delta=0.05, mu=0.5, sigma_n=0.1, nu=0.3.
  struct Ref {
    const char* kind;
    double lhs, rhs;
  };
  const Ref refs[] = {
      {"expected-gap-p1", 210.66861267644845, 1.2512282810038755},
      {"expected-gap-p2", 196.4, 0.35333333333333333},
      {"exact-recovery-p1", -143.37966032807303, 10.643872035775822},
      {"exact-recovery-p2", -40.336600765426495, 36.579645351066838},
      {"structured-gap", 275.9346607111066, 121.44654180426176},
      {"structured-separation", 165.64996581059384, 419.27837348494461},
      {"noisy-gap", 209.29691527853819, 8.4787551052177216},
      {"noisy-separation", -144.15211352277876, 259.65931222582056},
      {"clustered-gap", 360.97698855549493, 91.256903972507999},
  };
  for (const auto& ref : refs) {
    CAPTURE(ref.kind);
    const auto rep = check_condition(condition_kind_from_string(ref.kind), base_params());
    CHECK(rep.lhs == doctest::Approx(ref.lhs).epsilon(1e-9));
    CHECK(rep.rhs == doctest::Approx(ref.rhs).epsilon(1e-9));
    CHECK(rep.holds == (ref.lhs > ref.rhs));
  }
}

TEST_CASE("derived constants are recorded") {
  const auto rep = check_condition(ConditionKind::ExactRecoverySquared, base_params());
  auto find = [&](const std::string& name) {
    for (const auto& [k, v] : rep.intermediates)
      if (k == name) return v;
    FAIL("missing intermediate " << name);
    return 0.0;
  };
  CHECK(find("kappa") == doctest::Approx(1000.0 / 999.0));
  CHECK(find("zeta") == doctest::Approx(8 * std::log(20 / 0.05)));
  CHECK(find("eta1") > 0);
  const auto t3 = check_condition(ConditionKind::StructuredSeparation, base_params());
  bool has_td = false;
  for (const auto& [k, v] : t3.intermediates)
    if (k == "t_delta") {
      has_td = true;
      CHECK(v == doctest::Approx(3.8398374628429716).epsilon(1e-7));
    }
  CHECK(has_td);
  const std::string rec = rep.to_record();
  CHECK(rec.rfind("kind=exact-recovery-p2,lhs=", 0) == 0);
  CHECK(rec.find(",holds=false") != std::string::npos);
  CHECK(rec.find(",eta2=") != std::string::npos);
}

TEST_CASE("the p=1 expectation condition implies the p=2 one in high dimension") {
  int both = 0;
  for (double m : {1e3, 1e4}) {
    for (double r : {5.0, 10.0}) {
      for (double n1 = 10; n1 <= 5000; n1 *= 1.5) {
        for (double n2 = 1; n2 <= 1e5; n2 *= 2) {
          ConditionParams p;
          p.m = m;
          p.r = r;
          p.n1 = n1;
          p.n2 = n2;
          const bool l1 = check_condition(ConditionKind::ExpectedGapAbs, p).holds;
          const bool l2 = check_condition(ConditionKind::ExpectedGapSquared, p).holds;
          if (l1) CHECK(l2);
          both += l1 && l2;
        }
      }
    }
  }
  CHECK(both > 0);
}

TEST_CASE("conditions never flip from holding to failing as n1 grows") {
  for (ConditionKind kind : all_condition_kinds()) {
    CAPTURE(to_string(kind));
    for (double m : {200.0, 2000.0, 20000.0}) {
      for (double r : {2.0, 4.0}) {
        for (double n2 : {1.0, 10.0, 100.0}) {
          ConditionParams p = base_params();
          p.m = m;
          p.r = r;
          p.n2 = n2;
          bool seen = false;
          for (double n1 = 2; n1 <= 1e5; n1 *= 1.3) {
            p.n1 = std::floor(n1);
            const bool holds = check_condition(kind, p).holds;
            if (seen) CHECK(holds);
            seen = seen || holds;
          }
        }
      }
    }
  }
}

TEST_CASE("condition parameter errors") {
  ConditionParams p = base_params();
  p.mu.reset();
  CHECK_THROWS_AS(check_condition(ConditionKind::StructuredGap, p), InvalidArgument);
  p = base_params();
  p.mu = 1.0;
  CHECK_THROWS_AS(check_condition(ConditionKind::StructuredGap, p), InvalidArgument);
  CHECK_THROWS_AS(check_condition(ConditionKind::StructuredSeparation, p), InvalidArgument);
  p = base_params();
  p.nu = 1.5;
  CHECK_THROWS_AS(check_condition(ConditionKind::ClusteredGap, p), InvalidArgument);
  p = base_params();
  p.sigma_n.reset();
  CHECK_THROWS_AS(check_condition(ConditionKind::NoisyGap, p), InvalidArgument);
  p = base_params();
  p.delta = 1.0;
  CHECK_THROWS_AS(check_condition(ConditionKind::ExpectedGapAbs, p), InvalidArgument);
  p = base_params();
  p.n2 = 0;
  CHECK_THROWS_AS(check_condition(ConditionKind::ExpectedGapAbs, p), InvalidArgument);
  p = base_params();
  p.r = 1;
  CHECK_THROWS_AS(check_condition(ConditionKind::ExactRecoveryAbs, p), InvalidArgument);
  CHECK_THROWS_AS(condition_kind_from_string("lemma9"), InvalidArgument);
  for (ConditionKind k : all_condition_kinds()) CHECK(condition_kind_from_string(to_string(k)) == k);
}

TEST_CASE("expected coherence formulas") {
  auto in2 = expected_coherence(CoherenceRole::Inlier, CoherencePower::Squared, 400, 5, 50, 500);
  CHECK(in2.value == doctest::Approx(11.05));
  CHECK(in2.bound == BoundType::Exact);
  CHECK(expected_coherence(CoherenceRole::Inlier, CoherencePower::Squared, 400, 5, 1, 500).value ==
        doctest::Approx(500.0 / 400.0));
  auto out2 = expected_coherence(CoherenceRole::Outlier, CoherencePower::Squared, 400, 5, 50, 500);
  CHECK(out2.value == doctest::Approx((250.0 + 499.0) / 400.0));
  CHECK(out2.bound == BoundType::Upper);
  auto in1 = expected_coherence(CoherenceRole::Inlier, CoherencePower::Abs, 400, 5, 50, 500);
  CHECK(in1.bound == BoundType::Lower);
  CHECK(in1.value == doctest::Approx(49 * std::sqrt(2 / (std::numbers::pi * 5)) +
                                     500 * std::sqrt(2 / (std::numbers::pi * 400))));
  auto out1 = expected_coherence(CoherenceRole::Outlier, CoherencePower::Abs, 400, 5, 50, 500);
  CHECK(out1.bound == BoundType::Upper);
  CHECK(out1.value == doctest::Approx(50 * std::sqrt(5.0 / 400) + 499 / 20.0));
}

TEST_CASE("expected coherence bounds hold against simulation") {
  const Index m = 100, r = 10, n1 = 50, n2 = 100;
  double in1 = 0, out1 = 0, out2 = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto ds = generate(ModelSpec{Unstructured{}, m, r, n1, n2, static_cast<std::uint64_t>(t), false});
    in1 += coherence_kernel(ds.d, CoherencePower::Abs).values.head(n1).mean();
    out1 += coherence_kernel(ds.d, CoherencePower::Abs).values.tail(n2).mean();
    out2 += coherence_kernel(ds.d, CoherencePower::Squared).values.tail(n2).mean();
  }
  CHECK(in1 / trials >= expected_coherence(CoherenceRole::Inlier, CoherencePower::Abs, 100, 10, 50, 100).value);
  CHECK(out1 / trials <= expected_coherence(CoherenceRole::Outlier, CoherencePower::Abs, 100, 10, 50, 100).value);
  CHECK(out2 / trials <= expected_coherence(CoherenceRole::Outlier, CoherencePower::Squared, 100, 10, 50, 100).value);
}

TEST_CASE("tail_f boundary values") {
  for (double m : {3.0, 10.0, 1e4, 1e9}) {
    CHECK(tail_f(0, m) == 1.0);
    CHECK(tail_f(m, m) == 0.0);
    CHECK(tail_f(2 * m, m) == 0.0);
  }
  CHECK_THROWS_AS(tail_f(1, 2.5), InvalidArgument);
  CHECK_THROWS_AS(tail_f(-1, 10), InvalidArgument);
}

TEST_CASE("tail_f matches reference values") {
  struct Ref {
    double m, t, f;
  };
  const Ref refs[] = {
      {3, 0.5, 0.59175170953613698},     {3, 1, 0.42264973081037424},
      {10, 4, 0.036787497879786162},     {10, 9, 8.5380512231662748e-6},
      {100, 1, 0.3197484741393014},      {100, 9, 0.0023039657126900758},
      {1000, 4, 0.045446022576271259},   {1e6, 0.5, 0.47950039680667015},
      {1e6, 9, 0.0026997561766477495},
  };
  for (const auto& ref : refs) {
    CAPTURE(ref.m);
    CAPTURE(ref.t);
    CHECK(tail_f(ref.t, ref.m) == doctest::Approx(ref.f).epsilon(1e-9));
  }
}

TEST_CASE("tail_f agrees with Boost's incomplete beta") {
  for (double m : {3.0, 4.0, 7.0, 50.0, 100.0, 1000.0, 12345.0, 1e6}) {
    for (double t = 0.25; t < std::min(m, 40.0); t += 0.75) {
      const double ref = boost_tail(t, m);
      CAPTURE(m);
      CAPTURE(t);
      CHECK(std::abs(tail_f(t, m) - ref) <= 1e-10 * std::max(ref, 1e-300) + 1e-300);
    }
  }
}

TEST_CASE("tail_f is monotone and bounded") {
  for (double m : {3.0, 100.0, 1e4}) {
    double prev = 1.0;
    for (double t = 0; t <= 20; t += 0.5) {
      const double v = tail_f(t, m);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("t_delta") {
  for (double m : {100.0, 1e4}) {
    double prev = 0;
    for (double delta : {0.1, 0.01, 0.001}) {
      const double t = t_delta(delta, m);
      CHECK(tail_f(t, m) <= delta);
      CHECK(tail_f(t - 1e-8, m) >= delta * (1 - 1e-6));
      CHECK(t > prev);
      prev = t;
    }
  }
  CHECK(t_delta(1 - 1e-12, 100) <= 1e-8);
  CHECK(std::abs(t_delta(0.01, 1e6) - t_delta(0.01, 1e8)) <= 0.05);
  CHECK_THROWS_AS(t_delta(0.0, 100), InvalidArgument);
  CHECK_THROWS_AS(t_delta(1.0, 100), InvalidArgument);
}

TEST_CASE("empirical validation") {
  ConditionParams p;
  p.m = 400;
  p.r = 5;
  p.n1 = 50;
  p.n2 = 500;
  CHECK(validate_condition_empirically(ConditionKind::ExpectedGapSquared, p, 200, 1) == 1.0);
  p.n2 = 0;
  CHECK(validate_condition_empirically(ConditionKind::ExactRecoverySquared, p, 5, 1) == 1.0);
  CHECK_THROWS_AS(validate_condition_empirically(ConditionKind::ExpectedGapAbs, p, 0, 1),
                  InvalidArgument);

  SUBCASE("structured and noisy models run on the raw Gram matrix") {
    ConditionParams q;
    q.m = 200;
    q.r = 3;
    q.n1 = 200;
    q.n2 = 5;
    q.mu = 0.5;
    q.sigma_n = 0.2;
    q.nu = 0.3;
    CHECK(validate_condition_empirically(ConditionKind::StructuredGap, q, 10, 2) == 1.0);
    CHECK(validate_condition_empirically(ConditionKind::NoisySeparation, q, 10, 2) == 1.0);
    CHECK(validate_condition_empirically(ConditionKind::ClusteredGap, q, 10, 2) == 1.0);
  }
  SUBCASE("the exact recovery condition is sound where it holds") {
    ConditionParams q;
    q.m = 1000;
    q.r = 2;
    q.n1 = 600;
    q.n2 = 10;
    REQUIRE(check_condition(ConditionKind::ExactRecoverySquared, q).holds);
    CHECK(validate_condition_empirically(ConditionKind::ExactRecoverySquared, q, 20, 3) >= 0.8);
  }
}
