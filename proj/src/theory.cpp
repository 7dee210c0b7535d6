#include "coherence_pursuit/theory.hpp"

#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/parallel.hpp"
#include "coherence_pursuit/rng.hpp"
#include "coherence_pursuit/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace cop {
namespace {

using std::log;
using std::max;
using std::sqrt;
constexpr double kPi = std::numbers::pi;

struct KindName {
  ConditionKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 9> kKindNames{{
    {ConditionKind::ExpectedGapAbs, "expected-gap-p1"},
    {ConditionKind::ExpectedGapSquared, "expected-gap-p2"},
    {ConditionKind::ExactRecoveryAbs, "exact-recovery-p1"},
    {ConditionKind::ExactRecoverySquared, "exact-recovery-p2"},
    {ConditionKind::StructuredGap, "structured-gap"},
    {ConditionKind::StructuredSeparation, "structured-separation"},
    {ConditionKind::NoisyGap, "noisy-gap"},
    {ConditionKind::NoisySeparation, "noisy-separation"},
    {ConditionKind::ClusteredGap, "clustered-gap"},
}};

void require(bool ok, ConditionKind kind, const std::string& msg) {
  if (!ok) throw InvalidArgument("check_condition(" + std::string(to_string(kind)) + "): " + msg);
}

double need(const std::optional<double>& v, ConditionKind kind, const char* name) {
  require(v.has_value(), kind, std::string("missing parameter ") + name);
  return *v;
}

// 15-point Kronrod / 7-point Gauss pair on [a, b].
std::pair<double, double> gauss_kronrod15(const auto& f, double a, double b) {
  static constexpr std::array<double, 8> xgk{
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> wgk{
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg{
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = wgk[7] * fc;
  double gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double fs = f(c - h * xgk[i]) + f(c + h * xgk[i]);
    kron += wgk[i] * fs;
    if (i % 2 == 1) gauss += wg[i / 2] * fs;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

// Error budget is shared across subintervals in proportion to their width,
// relative to a first estimate over [a, b]; this keeps the subdivision finite
// when the integrand is deep in the subnormal range.
double adaptive_integral(const auto& f, double a, double b, double rel_tol) {
  struct Segment {
    double a, b;
    int depth;
  };
  const double budget = rel_tol * std::abs(gauss_kronrod15(f, a, b).first) / (b - a);
  std::vector<Segment> stack{{a, b, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    const Segment s = stack.back();
    stack.pop_back();
    const auto [value, err] = gauss_kronrod15(f, s.a, s.b);
    const double tol = max(budget * (s.b - s.a), rel_tol * std::abs(value));
    if (err <= tol || err < 1e-300 || s.depth >= 50) {
      total += value;
    } else {
      const double mid = 0.5 * (s.a + s.b);
      stack.push_back({mid, s.b, s.depth + 1});
      stack.push_back({s.a, mid, s.depth + 1});
    }
  }
  return total;
}

// log(Gamma(b + 1/2) / Gamma(b)); the asymptotic series avoids cancellation
// between two huge lgamma values when b is large.
double log_gamma_half_ratio(double b) {
  if (b < 1e3) return std::lgamma(b + 0.5) - std::lgamma(b);
  const double ib = 1.0 / b;
  const double series =
      1.0 - ib / 8.0 + ib * ib / 128.0 + 5.0 * ib * ib * ib / 1024.0 -
      21.0 * ib * ib * ib * ib / 32768.0;
  return 0.5 * log(b) + std::log(series);
}

}  // namespace

std::string_view to_string(ConditionKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

ConditionKind condition_kind_from_string(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  throw InvalidArgument("unknown condition kind '" + std::string(name) + "'");
}

const std::vector<ConditionKind>& all_condition_kinds() {
  static const std::vector<ConditionKind> kinds = [] {
    std::vector<ConditionKind> v;
    for (const auto& kn : kKindNames) v.push_back(kn.kind);
    return v;
  }();
  return kinds;
}

bool is_separation_kind(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::ExactRecoveryAbs:
    case ConditionKind::ExactRecoverySquared:
    case ConditionKind::StructuredSeparation:
    case ConditionKind::NoisySeparation:
      return true;
    default:
      return false;
  }
}

CoherencePower condition_power(ConditionKind kind) {
  return kind == ConditionKind::ExpectedGapSquared || kind == ConditionKind::ExactRecoverySquared
             ? CoherencePower::Squared
             : CoherencePower::Abs;
}

std::string ConditionReport::to_record() const {
  std::ostringstream out;
  out.precision(17);
  out << "kind=" << to_string(kind) << ",lhs=" << lhs << ",rhs=" << rhs
      << ",holds=" << (holds ? "true" : "false");
  for (const auto& [name, value] : intermediates) out << ',' << name << '=' << value;
  return out.str();
}

ConditionReport check_condition(ConditionKind kind, const ConditionParams& p) {
  const double m = p.m, r = p.r, n1 = p.n1, n2 = p.n2, delta = p.delta;
  require(m > 0 && r > 0 && n1 > 0 && n2 > 0, kind, "m, r, n1, n2 must be positive");
  require(delta > 0 && delta < 1, kind, "delta must be in (0, 1)");
  require(r <= m, kind, "r must not exceed m");

  ConditionReport rep;
  rep.kind = kind;
  auto note = [&](const char* name, double v) { rep.intermediates.emplace_back(name, v); };
  // beta = max(8 log(n2/delta), 8 pi), kappa = m/(m-1); shared by several kinds.
  auto beta_kappa = [&] {
    require(m > 1, kind, "m must exceed 1");
    const double beta = max(8.0 * log(n2 / delta), 8.0 * kPi);
    const double kappa = m / (m - 1.0);
    note("beta", beta);
    note("kappa", kappa);
    return std::pair{beta, kappa};
  };

  switch (kind) {
    case ConditionKind::ExpectedGapAbs:
      rep.lhs = n1 / sqrt(r) * (sqrt(2.0 / kPi) - sqrt(4.0 * r * r / m));
      rep.rhs = 5.0 * n2 / (4.0 * sqrt(m)) + sqrt(2.0 / (kPi * r));
      break;

    case ConditionKind::ExpectedGapSquared:
      rep.lhs = n1 / r * (1.0 - 2.0 * r * r / m);
      rep.rhs = n2 / m + 1.0 / r;
      break;

    case ConditionKind::ExactRecoveryAbs: {
      require(r > 1, kind, "r must exceed 1");
      const auto [beta, kappa] = beta_kappa();
      rep.lhs = n1 / sqrt(r) * (sqrt(2.0 / kPi) - (r + 2.0 * sqrt(beta * kappa * r)) / sqrt(m)) -
                2.0 * sqrt(n1) - sqrt(2.0 * n1 * log(n1 / delta) / (r - 1.0));
      rep.rhs = n2 / sqrt(m) + 2.0 * sqrt(n2) + sqrt(2.0 * n2 * log(n2 / delta) / (m - 1.0)) +
                1.0 / sqrt(r);
      break;
    }

    case ConditionKind::ExactRecoverySquared: {
      require(m > 1, kind, "m must exceed 1");
      const double kappa = m / (m - 1.0);
      const double zeta = max(8.0 * kPi, 8.0 * log(n2 / delta));
      const double l1 = log(2.0 * r * n1 / delta);
      const double l2 = log(2.0 * m * n2 / delta);
      const double eta1 = max(4.0 / 3.0 * l1, sqrt(4.0 * n1 / r * l1));
      const double eta2 = max(4.0 / 3.0 * l2, sqrt(4.0 * n2 / m * l2));
      note("kappa", kappa);
      note("zeta", zeta);
      note("eta1", eta1);
      note("eta2", eta2);
      rep.lhs = n1 * (1.0 / r - (r + 4.0 * zeta * kappa + 4.0 * sqrt(zeta * r * kappa)) / m) - eta1;
      rep.rhs = 2.0 * eta2 + 1.0 / r;
      break;
    }

    case ConditionKind::StructuredGap: {
      const double mu = need(p.mu, kind, "mu");
      require(mu > 0 && mu < 1, kind, "mu must be in (0, 1)");
      const double s = 1.0 + mu * mu;
      rep.lhs = (n1 - 1.0) * sqrt(2.0 / (kPi * r));
      rep.rhs = 2.0 * n2 / s +
                1.0 / sqrt(m) *
                    ((2.0 * mu * mu * n2 + 4.0 * mu * n2 + 2.0 * n1 * sqrt(r * s) * (mu + 1.0)) / s);
      break;
    }

    case ConditionKind::StructuredSeparation: {
      const double mu = need(p.mu, kind, "mu");
      require(mu > 0 && mu < 1, kind, "mu must be in (0, 1)");
      require(m >= 3, kind, "m must be at least 3");
      const auto [beta, kappa] = beta_kappa();
      const double td = t_delta(delta, m);
      note("t_delta", td);
      const double s = 1.0 + mu * mu;
      rep.lhs = sqrt(2.0 / kPi) * (n1 - 1.0) / sqrt(r) - 2.0 * sqrt(n1) -
                sqrt(2.0 * n1 * log(n1 / delta) / r);
      rep.rhs = n2 / s +
                (mu * mu + mu) / s *
                    (n2 / sqrt(m) + 2.0 * sqrt(n2) + sqrt(2.0 * n2 * log(n2 / delta) / (m - 1.0))) +
                mu * n2 * sqrt(td) / (s * sqrt(m)) +
                n1 * (mu + 1.0) / sqrt(s * m) * (sqrt(r) + 2.0 * sqrt(beta * kappa));
      break;
    }

    case ConditionKind::NoisyGap: {
      const double sn = need(p.sigma_n, kind, "sigma_n");
      require(sn >= 0, kind, "sigma_n must be >= 0");
      const double s2 = 1.0 + sn * sn;
      const double xi = sqrt(2.0 * sn * sn / (kPi * m)) *
                        (n1 / sqrt(s2) * (1.0 + sn * sqrt(kPi / 2.0) + sqrt(r)) + n2 + 2.0 * n1);
      note("xi", xi);
      rep.lhs = n1 / sqrt(r) * (sqrt(2.0 / (kPi * s2)) - sqrt(4.0 * r * r / m));
      rep.rhs = n2 * sqrt(s2) / sqrt(m) + sqrt(2.0 / (kPi * r)) + xi;
      break;
    }

    case ConditionKind::NoisySeparation: {
      const double sn = need(p.sigma_n, kind, "sigma_n");
      require(sn > 0, kind, "sigma_n must be > 0");
      require(r > 1, kind, "r must exceed 1");
      require(m > 1, kind, "m must exceed 1");
      const double s2 = 1.0 + sn * sn;
      const double n = n1 + n2;
      const double c_arg = n / (delta * sqrt(2.0 * kPi) * sn);
      require(c_arg > 1.0, kind, "n / (delta sqrt(2 pi) sigma_n) must exceed 1");
      const double c = sqrt(2.0 * log(c_arg));
      const double beta = max(8.0 * kPi, 8.0 * log(n2 / delta));
      const double beta_p = max(8.0 * kPi, 8.0 * log(n1 / delta));
      const double varsigma =
          ((c * sn + c * c * sn * sn) / sqrt(s2) + c * sn) *
              (n1 / sqrt(m) + 2.0 * sqrt(n1) + sqrt(2.0 * n1 * log(n1 / delta) / (m - 1.0))) +
          c * n1 * sn / sqrt(s2) * (sqrt(r / m) + 2.0 * sqrt(beta_p / (m - 1.0)));
      note("c", c);
      note("beta", beta);
      note("beta_prime", beta_p);
      note("varsigma", varsigma);
      rep.lhs = n1 / sqrt(r) * (sqrt(2.0 / (kPi * s2)) - (r + 2.0 * sqrt(beta * r)) / sqrt(m - 1.0)) -
                2.0 * sqrt(n1 / s2) - sqrt(2.0 * n1 * log(n1 / delta) / ((r - 1.0) * s2));
      rep.rhs = sqrt(s2) * (n2 / sqrt(m) + 2.0 * sqrt(n2) + sqrt(2.0 * n2 * log(n2 / delta) / (m - 1.0))) +
                1.0 / sqrt(r) + varsigma;
      break;
    }

    case ConditionKind::ClusteredGap: {
      const double nu = need(p.nu, kind, "nu");
      require(nu > 0 && nu < 1, kind, "nu must be in (0, 1)");
      const double s = 1.0 + nu * nu;
      rep.lhs = n1 * (1.0 - (nu * nu + 2.0 * nu) / sqrt(r));
      rep.rhs = 1.0 + 2.0 * n1 * (1.0 + nu) * sqrt(r * s) / sqrt(m) +
                n2 * sqrt(s) / sqrt(m) * (nu - sqrt(2.0 / kPi) + 2.0 * sqrt(s));
      break;
    }
  }
  rep.holds = rep.lhs > rep.rhs;
  return rep;
}

ExpectedCoherence expected_coherence(CoherenceRole role, CoherencePower p, double m, double r,
                                     double n1, double n2) {
  if (!(m >= 1 && r >= 1 && r <= m && n1 >= 0 && n2 >= 0))
    throw InvalidArgument("expected_coherence: invalid counts");
  if (p == CoherencePower::Squared) {
    if (role == CoherenceRole::Inlier) return {(n1 - 1.0) / r + n2 / m, BoundType::Exact};
    return {(r * n1 + n2 - 1.0) / m, BoundType::Upper};
  }
  if (role == CoherenceRole::Inlier)
    return {(n1 - 1.0) * sqrt(2.0 / (kPi * r)) + n2 * sqrt(2.0 / (kPi * m)), BoundType::Lower};
  return {n1 * sqrt(r / m) + (n2 - 1.0) * sqrt(1.0 / m), BoundType::Upper};
}

double tail_f(double t, double m) {
  if (!(m >= 3)) throw InvalidArgument("tail_f: m must be >= 3");
  if (!(t >= 0)) throw InvalidArgument("tail_f: t must be >= 0");
  if (t == 0) return 1.0;
  if (t >= m) return 0.0;
  const double b = (m - 1.0) / 2.0;
  // Density of s = sqrt(x) for x ~ Beta(1/2, b): 2 (1 - s^2)^(b-1) / B(1/2, b),
  // with log B(1/2, b) = log Gamma(1/2) - log(Gamma(b + 1/2) / Gamma(b)).
  const double log_norm = std::log(2.0) - (0.5 * std::log(kPi) - log_gamma_half_ratio(b));
  auto density = [&](double s) { return std::exp(log_norm + (b - 1.0) * std::log1p(-s * s)); };

  // The density falls off on a 1/sqrt(b) scale; integrate over geometrically
  // growing panels starting at the lower limit so the quadrature sees the mass.
  const double lo = sqrt(t / m);
  const double width = std::min(1.0, 1.0 / sqrt(max(b, 1.0)));
  double total = 0.0;
  double a = lo;
  for (double step = width; a < 1.0; step *= 2.0) {
    const double next = std::min(1.0, a + step);
    total += adaptive_integral(density, a, next, 1e-12);
    a = next;
    if (a < 1.0 && density(a) * (1.0 - a) <= 1e-17 * total) break;
  }
  return std::clamp(total, 0.0, 1.0);
}

double t_delta(double delta, double m) {
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("t_delta: delta must be in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  while (hi < m && tail_f(hi, m) >= delta) {
    lo = hi;
    hi *= 2.0;
  }
  hi = std::min(hi, m);
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (tail_f(mid, m) < delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

namespace {

ModelSpec model_for(ConditionKind kind, const ConditionParams& p, std::uint64_t seed) {
  ModelSpec spec;
  spec.m = static_cast<Index>(std::llround(p.m));
  spec.r = static_cast<Index>(std::llround(p.r));
  spec.n1 = static_cast<Index>(std::llround(p.n1));
  spec.n2 = static_cast<Index>(std::llround(p.n2));
  spec.seed = seed;
  switch (kind) {
    case ConditionKind::StructuredGap:
    case ConditionKind::StructuredSeparation:
      spec.kind = StructuredOutliers{need(p.mu, kind, "mu"), std::nullopt};
      break;
    case ConditionKind::NoisyGap:
    case ConditionKind::NoisySeparation:
      spec.kind = NoisyInliers{need(p.sigma_n, kind, "sigma_n")};
      break;
    case ConditionKind::ClusteredGap:
      spec.kind = ClusteredInliers{need(p.nu, kind, "nu")};
      break;
    default:
      spec.kind = Unstructured{};
  }
  return spec;
}

// Unstructured kinds are stated on normalized data; the others on D^T D.
bool uses_raw_gram(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::ExpectedGapAbs:
    case ConditionKind::ExpectedGapSquared:
    case ConditionKind::ExactRecoveryAbs:
    case ConditionKind::ExactRecoverySquared:
      return false;
    default:
      return true;
  }
}

}  // namespace

double validate_condition_empirically(ConditionKind kind, const ConditionParams& params,
                                      Index trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw InvalidArgument("validate_condition_empirically: trials must be >= 1");
  const Rng base(seed);
  std::vector<char> success(static_cast<std::size_t>(trials), 0);
  parallel_for(success.size(), threads, [&](std::size_t t) {
    const LabeledDataset ds = generate(model_for(kind, params, base.split(t).key()));
    const CoherencePower power = condition_power(kind);
    const CoherenceProfile prof = uses_raw_gram(kind)
                                      ? raw_gram_coherence(ds.d, power, kDefaultBlock, 1)
                                      : coherence_kernel(normalize_columns(ds.d).x, power,
                                                         kDefaultBlock, 1);
    double in_sum = 0, out_sum = 0;
    double in_min = std::numeric_limits<double>::infinity();
    double out_max = -std::numeric_limits<double>::infinity();
    Index n_in = 0, n_out = 0;
    for (Index j = 0; j < prof.size(); ++j) {
      const double v = prof.values(j);
      if (ds.labels[static_cast<std::size_t>(j)] == kInlierLabel) {
        in_sum += v;
        in_min = std::min(in_min, v);
        ++n_in;
      } else {
        out_sum += v;
        out_max = std::max(out_max, v);
        ++n_out;
      }
    }
    bool ok = true;
    if (n_out > 0 && n_in > 0) {
      ok = is_separation_kind(kind) ? in_min > out_max
                                    : in_sum / static_cast<double>(n_in) >
                                          2.0 * out_sum / static_cast<double>(n_out);
    }
    success[t] = ok ? 1 : 0;
  });
  const auto hits = std::count(success.begin(), success.end(), char{1});
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace cop
