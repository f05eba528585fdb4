#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relaylearn/channel.hpp"

namespace relay {

// Fraction of a block spent asserting "1" after observing empirical ones
// fraction alpha through a BSC(p): 0 below p, KL-proportional ramp up to 1/2,
// mirrored above by f(alpha) = 1 - f(1-alpha), and 1 from 1-p on.
double f_fraction(double alpha, double p);

// Integer thresholds t(a) = floor(k * f(a/k, p)) for a/k <= 1/2, mirrored as
// k - t(k-a) above so that complementing a block is an exact symmetry.
std::vector<int> bsc_threshold_table(int k, double p);

// Distribution of the per-block log likelihood ratio sum over k channel
// uses. Support is sorted ascending and may include -inf/+inf when a row has
// zeros; equal values within 1e-12 are merged. pmf0/pmf1 are the laws under
// input 0 and 1; tail0_geq[i] = P0(L >= support[i]), tail1_leq[i] =
// P1(L <= support[i]).
struct LlrDistribution {
  std::vector<double> support;
  std::vector<double> pmf0, pmf1;
  std::vector<double> tail0_geq, tail1_leq;

  int size() const { return static_cast<int>(support.size()); }
  // Index of the support entry nearest to l; the lookup must land within
  // 1e-9 of an actual support point.
  int index_of(double l) const;
};

LlrDistribution build_llr_distribution(const Dmc& ch, int k);

// Unrounded non-decreasing g values per support index: the larger-tail
// branch formula taken through a running maximum (the raw branch switch at
// l = 0 is not monotone; the running maximum stays inside the same
// tail-bound sandwich and restores monotonicity).
std::vector<double> g_values_raw(const LlrDistribution& dist, int k,
                                 double s_bar, double mu_max);

// Rounded (nearest, ties up) and clamped to [0, k]; verified non-decreasing.
std::vector<int> build_g_table(const LlrDistribution& dist, int k,
                               double s_bar, double mu_max);

enum class ProtocolKind {
  SimpleForwarding,
  Cumulative,
  SqrtBlockMajority,
  BscBlock,
  DmcBlock,
};

// Teaching protocol with all derived tables compiled once up front.
struct ProtocolSpec {
  ProtocolKind kind;
  int k;
  ChannelSpec P, Q;
  double s_bar;  // dmc-block tilt; NaN otherwise

  // compiled (never serialized):
  std::vector<int> thresholds;  // ones-prefix (bsc) / zeros-prefix (dmc) per latent
  LlrDistribution llr;          // dmc-block: law of the teacher's block LLR
  double mu_max;                // dmc-block: max of the two mu curves at s_bar
};

ProtocolSpec make_protocol_spec(ProtocolKind kind, int k,
                                const ChannelSpec& P, const ChannelSpec& Q,
                                std::optional<double> s_bar = std::nullopt);

// One block: emits t(alpha) ones then k - t(alpha) zeros.
std::vector<std::uint8_t> teach_block_bsc(const std::vector<int>& y_block,
                                          const ProtocolSpec& spec);

// One block: emits g(l) zeros then k - g(l) ones (prefix symbol inverted
// relative to the BSC map; the decoder tables match).
std::vector<std::uint8_t> teach_block_dmc(const std::vector<int>& y_block,
                                          const ProtocolSpec& spec);

// Whole-stream teaching map. Block protocols send an all-zeros filler block
// first and encode observation block j in transmission block j+1; n must be
// a positive multiple of k. simple-forwarding repeats the observation;
// cumulative sends the running majority (ties repeat the previous
// transmission, initially 0); sqrt-block-majority sends, per block of length
// ceil(sqrt(n)), the majority of the previous block's observations (same tie
// rule, all-zeros first block).
std::vector<std::uint8_t> teach_stream(const std::vector<int>& y,
                                       const ProtocolSpec& spec);

}  // namespace relay
