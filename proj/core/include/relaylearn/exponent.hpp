#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaylearn/channel.hpp"

namespace relay {

// KL divergence between Bernoulli(a) and Bernoulli(b), natural log.
double binary_kl(double a, double b);

// Tilted overlap sum(a_x^(1-s) * b_x^s) for s in [0,1]; the endpoints take
// the continuous extension (mass of one distribution on the other's support).
double rho_s(const std::vector<double>& a, const std::vector<double>& b,
             double s);

// mu(s) = ln rho_s(row0, row1, s) for a binary-input channel, with first and
// second derivatives taken under the tilted distribution on the common
// support. mu is convex, <= 0 on [0,1], and 0 at the endpoints when the
// channel has full support.
class TiltedFamily {
 public:
  explicit TiltedFamily(const Dmc& ch);

  double mu(double s) const;
  double mu_prime(double s) const;
  double mu_double_prime(double s) const;

  bool common_support_empty() const { return a_.empty(); }

 private:
  void tilted_moments(double s, double* mean, double* var) const;

  std::vector<double> a_, b_;  // row masses restricted to the common support
  std::vector<double> l_;     // ln(b/a) per common-support symbol
};

enum class BoundFamily {
  OneHop,
  TwoHop,
  TwoHopFlipped,
  TrivialConverse,
  BlockConverse,
  E1,
};

std::string bound_family_name(BoundFamily family);

struct ExponentReport {
  BoundFamily family;
  double s_star;
  double mu_star;
  double rate;       // always equal to -mu_star
  bool at_endpoint;  // argmin within 1e-8 of s = 0 or s = 1
};

// Best error exponent of a single channel: -min_s mu(s).
ExponentReport one_hop_rate(const Dmc& ch);

// Relay exponent -min_s max(mu_P(s), mu_Q(s)).
ExponentReport two_hop_rate(const Dmc& P, const Dmc& Q);

// Same, but also allowing the tilt of one hop to be mirrored (s vs 1-s);
// returns the better of the two orientations.
ExponentReport two_hop_rate_flipped(const Dmc& P, const Dmc& Q);

// min of the two one-hop rates; no protocol can beat the weaker hop.
ExponentReport trivial_converse(const Dmc& P, const Dmc& Q);

// mu(s) <= mu(1-s) for all s in [0, 1/2], checked on a grid.
bool assumption1_holds(const Dmc& ch, double grid_step = 1e-3,
                       double tol = 1e-12);

// -min over s in [0, 1/2] of max(mu_P, mu_Q); only valid when both channels
// satisfy the s <-> 1-s dominance assumption, otherwise nullopt.
std::optional<ExponentReport> block_converse(const Dmc& P, const Dmc& Q);

// Converse exponent for a fixed teacher/student time split gamma: the best
// over the four orientation choices of -min_s of the gamma-weighted
// combination of (possibly mirrored) mu curves.
ExponentReport e1_exponent(const Dmc& P, const Dmc& Q, double gamma);

struct GammaSplit {
  enum class Case { DominantP, DominantQ, Balanced };
  Case kind;
  double gamma;
};

// The time split at which the e1 converse matches the two-hop rate. Either
// one channel's mu dominates at its own global minimum (gamma 1 or 0), or
// the curves cross and the split balances their slopes.
GammaSplit gamma_balanced(const Dmc& P, const Dmc& Q);

// Exponent of the two-round feedback strategy for a BSC(p) teacher hop and
// reverse-Z(q) student hop: gamma * KL(1/2 || p) + (1 - gamma) * ln(1/q).
double feedback_exponent_bsc_rz(double p, double q, double gamma);

// Two-round exponent in the cases where it has a closed form: equal to the
// e1 exponent when Q is a BSC (feedback cannot help), and to the feedback
// strategy exponent when P is a BSC and Q is a reverse-Z. Otherwise nullopt.
std::optional<double> two_round_exponent(const Dmc& P, const Dmc& Q,
                                         double gamma);

// Sphere-packing style floor exp(n mu(s*) - sqrt(2 n mu''(s*))) / 8 on the
// error of any single-hop code of length n.
double sgb_lower_bound(const Dmc& ch, long n);

}  // namespace relay
