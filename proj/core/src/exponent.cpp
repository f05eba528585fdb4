#include "relaylearn/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "relaylearn/errors.hpp"

namespace relay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGoldenTol = 1e-10;
constexpr double kEndpointTol = 1e-8;

void check_s_range(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::domain_error("tilt s must lie in [0, 1]");
  }
}

struct MinResult {
  double x;
  double value;
};

// Golden-section search for a convex function, with a coarse bracketing
// prepass so near-flat regions cannot trap the bracket away from the global
// minimum, and endpoint snapping since the optimum may sit on the boundary.
MinResult minimize_convex(const std::function<double(double)>& f, double lo,
                          double hi) {
  constexpr int kPre = 64;
  double best_x = lo, best_v = f(lo);
  for (int i = 1; i <= kPre; ++i) {
    const double x = lo + (hi - lo) * i / kPre;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - (hi - lo) / kPre);
  double b = std::min(hi, best_x + (hi - lo) / kPre);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > kGoldenTol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  double x = (a + b) / 2.0;
  double v = f(x);
  if (v > best_v) {
    x = best_x;
    v = best_v;
  }
  for (double end : {lo, hi}) {
    if (std::abs(x - end) < kEndpointTol) {
      const double ve = f(end);
      if (ve <= v) {
        x = end;
        v = ve;
      }
    }
  }
  return {x, v};
}

ExponentReport report_from_min(BoundFamily family, const MinResult& m,
                               double lo, double hi) {
  return ExponentReport{family, m.x, m.value, -m.value,
                        std::abs(m.x - lo) < kEndpointTol ||
                            std::abs(m.x - hi) < kEndpointTol};
}

}  // namespace

double binary_kl(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::domain_error("binary_kl: first argument must lie in [0, 1]");
  }
  if (!(b > 0.0 && b < 1.0)) {
    throw std::domain_error("binary_kl: second argument must lie in (0, 1)");
  }
  double out = 0.0;
  if (a > 0.0) out += a * std::log(a / b);
  if (a < 1.0) out += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
  return out;
}

double rho_s(const std::vector<double>& a, const std::vector<double>& b,
             double s) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("rho_s: distributions must share an alphabet");
  }
  check_s_range(s);
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0.0 || b[i] <= 0.0) continue;  // endpoints: continuous extension
    if (s == 0.0) {
      sum += a[i];
    } else if (s == 1.0) {
      sum += b[i];
    } else {
      sum += std::pow(a[i], 1.0 - s) * std::pow(b[i], s);
    }
  }
  return sum;
}

TiltedFamily::TiltedFamily(const Dmc& ch) {
  const auto& r0 = ch.row(0);
  const auto& r1 = ch.row(1);
  for (size_t y = 0; y < r0.size(); ++y) {
    if (r0[y] > 0.0 && r1[y] > 0.0) {
      a_.push_back(r0[y]);
      b_.push_back(r1[y]);
      l_.push_back(std::log(r1[y] / r0[y]));
    }
  }
}

double TiltedFamily::mu(double s) const {
  check_s_range(s);
  if (a_.empty()) return -kInf;
  // sum over common support of a * exp(s * l); equals rho_s restricted there
  double sum = 0.0;
  for (size_t i = 0; i < a_.size(); ++i) {
    sum += a_[i] * std::exp(s * l_[i]);
  }
  return std::log(sum);
}

void TiltedFamily::tilted_moments(double s, double* mean, double* var) const {
  check_s_range(s);
  if (a_.empty()) {
    throw std::domain_error(
        "tilted moments undefined: channel rows have disjoint support");
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < a_.size(); ++i) {
    const double w = a_[i] * std::exp(s * l_[i]);
    z += w;
    m1 += w * l_[i];
    m2 += w * l_[i] * l_[i];
  }
  m1 /= z;
  m2 /= z;
  if (mean) *mean = m1;
  if (var) *var = std::max(0.0, m2 - m1 * m1);
}

double TiltedFamily::mu_prime(double s) const {
  double m;
  tilted_moments(s, &m, nullptr);
  return m;
}

double TiltedFamily::mu_double_prime(double s) const {
  double v;
  tilted_moments(s, nullptr, &v);
  return v;
}

std::string bound_family_name(BoundFamily family) {
  switch (family) {
    case BoundFamily::OneHop: return "one_hop";
    case BoundFamily::TwoHop: return "two_hop";
    case BoundFamily::TwoHopFlipped: return "two_hop_flipped";
    case BoundFamily::TrivialConverse: return "trivial_converse";
    case BoundFamily::BlockConverse: return "block_converse";
    case BoundFamily::E1: return "e1";
  }
  return "unknown";
}

ExponentReport one_hop_rate(const Dmc& ch) {
  TiltedFamily t(ch);
  auto m = minimize_convex([&](double s) { return t.mu(s); }, 0.0, 1.0);
  return report_from_min(BoundFamily::OneHop, m, 0.0, 1.0);
}

ExponentReport two_hop_rate(const Dmc& P, const Dmc& Q) {
  TiltedFamily tp(P), tq(Q);
  auto m = minimize_convex(
      [&](double s) { return std::max(tp.mu(s), tq.mu(s)); }, 0.0, 1.0);
  return report_from_min(BoundFamily::TwoHop, m, 0.0, 1.0);
}

ExponentReport two_hop_rate_flipped(const Dmc& P, const Dmc& Q) {
  TiltedFamily tp(P), tq(Q);
  auto straight = minimize_convex(
      [&](double s) { return std::max(tp.mu(s), tq.mu(s)); }, 0.0, 1.0);
  auto mirrored = minimize_convex(
      [&](double s) { return std::max(tp.mu(s), tq.mu(1.0 - s)); }, 0.0, 1.0);
  const MinResult& best = mirrored.value < straight.value ? mirrored : straight;
  return report_from_min(BoundFamily::TwoHopFlipped, best, 0.0, 1.0);
}

ExponentReport trivial_converse(const Dmc& P, const Dmc& Q) {
  ExponentReport rp = one_hop_rate(P);
  ExponentReport rq = one_hop_rate(Q);
  ExponentReport out = rp.rate <= rq.rate ? rp : rq;
  out.family = BoundFamily::TrivialConverse;
  return out;
}

bool assumption1_holds(const Dmc& ch, double grid_step, double tol) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw std::domain_error("assumption check: grid step must lie in (0, 1/2]");
  }
  TiltedFamily t(ch);
  const int steps = static_cast<int>(std::ceil(0.5 / grid_step));
  for (int i = 0; i <= steps; ++i) {
    const double s = std::min(0.5, i * grid_step);
    if (t.mu(s) > t.mu(1.0 - s) + tol) return false;
  }
  return true;
}

std::optional<ExponentReport> block_converse(const Dmc& P, const Dmc& Q) {
  if (!assumption1_holds(P) || !assumption1_holds(Q)) return std::nullopt;
  TiltedFamily tp(P), tq(Q);
  auto m = minimize_convex(
      [&](double s) { return std::max(tp.mu(s), tq.mu(s)); }, 0.0, 0.5);
  return report_from_min(BoundFamily::BlockConverse, m, 0.0, 0.5);
}

ExponentReport e1_exponent(const Dmc& P, const Dmc& Q, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::domain_error("gamma must lie in [0, 1]");
  }
  TiltedFamily tp(P), tq(Q);
  bool have_best = false;
  MinResult best{0.0, 0.0};
  for (int bp = 0; bp < 2; ++bp) {
    for (int bq = 0; bq < 2; ++bq) {
      auto phi = [&](double s) {
        const double mp = bp ? tp.mu(s) : tp.mu(1.0 - s);
        const double mq = bq ? tq.mu(s) : tq.mu(1.0 - s);
        return gamma * mp + (1.0 - gamma) * mq;
      };
      auto m = minimize_convex(phi, 0.0, 1.0);
      // the exponent of this orientation is -m.value; keep the largest
      if (!have_best || m.value < best.value) {
        best = m;
        have_best = true;
      }
    }
  }
  return report_from_min(BoundFamily::E1, best, 0.0, 1.0);
}

GammaSplit gamma_balanced(const Dmc& P, const Dmc& Q) {
  TiltedFamily tp(P), tq(Q);
  auto m = minimize_convex(
      [&](double s) { return std::max(tp.mu(s), tq.mu(s)); }, 0.0, 1.0);
  const double mu_star = m.value;
  auto mp = minimize_convex([&](double s) { return tp.mu(s); }, 0.0, 1.0);
  auto mq = minimize_convex([&](double s) { return tq.mu(s); }, 0.0, 1.0);

  GammaSplit out{GammaSplit::Case::Balanced, 0.0};
  if (tq.mu(mp.x) <= mp.value + 1e-9) {
    // Q sits below P's unconstrained minimum, so P binds on its own
    out = {GammaSplit::Case::DominantP, 1.0};
  } else if (tp.mu(mq.x) <= mq.value + 1e-9) {
    out = {GammaSplit::Case::DominantQ, 0.0};
  } else {
    // neither dominates, so the difference changes sign between the two
    // unconstrained minima; bisect for the crossing
    double lo = mp.x, hi = mq.x;
    for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (tp.mu(mid) - tq.mu(mid) <= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double s_c = 0.5 * (lo + hi);
    const double dp = tp.mu_prime(s_c);
    const double dq = tq.mu_prime(s_c);
    const double denom = dq - dp;
    if (std::abs(denom) < 1e-12) {
      std::ostringstream msg;
      msg << "gamma_balanced: degenerate crossing at s=" << s_c
          << " (mu_P'=" << dp << ", mu_Q'=" << dq << ")";
      throw InternalError(msg.str());
    }
    double g = dq / denom;
    if (g < -1e-9 || g > 1.0 + 1e-9) {
      std::ostringstream msg;
      msg << "gamma_balanced: balance point " << g << " outside [0, 1]";
      throw InternalError(msg.str());
    }
    out = {GammaSplit::Case::Balanced, std::clamp(g, 0.0, 1.0)};
  }

  // defining property: the split's mu combination never dips below mu_star
  for (int i = 0; i <= 1000; ++i) {
    const double s = i / 1000.0;
    const double lhs = out.gamma * tp.mu(s) + (1.0 - out.gamma) * tq.mu(s);
    if (lhs < mu_star - 1e-9) {
      std::ostringstream msg;
      msg << "gamma_balanced: combination dips below the two-hop minimum at s="
          << s << " (lhs=" << lhs << ", mu_star=" << mu_star
          << ", gamma=" << out.gamma << ")";
      throw InternalError(msg.str());
    }
  }
  return out;
}

double feedback_exponent_bsc_rz(double p, double q, double gamma) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::domain_error("feedback exponent: p must lie in (0, 1/2)");
  }
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("feedback exponent: q must lie in (0, 1)");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::domain_error("feedback exponent: gamma must lie in [0, 1]");
  }
  return gamma * binary_kl(0.5, p) + (1.0 - gamma) * std::log(1.0 / q);
}

std::optional<double> two_round_exponent(const Dmc& P, const Dmc& Q,
                                         double gamma) {
  double p = 0.0, q = 0.0;
  if (is_bsc(Q, &q)) {
    return e1_exponent(P, Q, gamma).rate;  // feedback cannot help into a BSC
  }
  if (is_bsc(P, &p) && is_reverse_z(Q, &q)) {
    return feedback_exponent_bsc_rz(p, q, gamma);
  }
  return std::nullopt;
}

double sgb_lower_bound(const Dmc& ch, long n) {
  if (n < 1) throw std::domain_error("sgb_lower_bound: n must be >= 1");
  TiltedFamily t(ch);
  auto m = minimize_convex([&](double s) { return t.mu(s); }, 0.0, 1.0);
  const double var = t.mu_double_prime(m.x);
  return 0.125 * std::exp(n * m.value - std::sqrt(2.0 * n * var));
}

}  // namespace relay
