#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "relaylearn/decoder.hpp"
#include "relaylearn/protocol.hpp"

namespace relay {

const char* protocol_kind_name(ProtocolKind kind);
ProtocolKind protocol_kind_from_string(const std::string& name);

enum class DecoderKind { BlockMl, Majority, EpsilonMajority };

const char* decoder_kind_name(DecoderKind kind);
DecoderKind decoder_kind_from_string(const std::string& name);

struct ExperimentConfig {
  ProtocolSpec protocol;
  DecoderKind decoder;
  double epsilon;  // epsilon-majority window fraction; NaN otherwise
  std::vector<long> n_grid;
  long trials;
  std::uint64_t seed;
  int min_errors = 50;
  int threads = 0;  // 0: hardware concurrency
};

struct Interval {
  double lo, hi;
};

// Wilson score interval for errors successes out of trials at the given
// two-sided confidence (0.95 or 0.99 in practice).
Interval wilson_interval(long errors, long trials, double confidence);

struct ErrorEstimate {
  long n;
  long trials;
  long errors;
  double p_hat;
  double ci95_lo, ci95_hi;
  double point_rate;  // -ln(p_hat)/n; +inf when no errors were seen
};

// Monte Carlo error estimate at one stream length. Trial t draws theta and
// all noise from a stream derived from (seed, n, t), so results are
// bit-identical for any thread count.
ErrorEstimate run_point(const ExperimentConfig& config, long n);

// run_point across config.n_grid.
std::vector<ErrorEstimate> run_sweep(const ExperimentConfig& config);

struct ExponentFit {
  double slope;
  double slope_se;
  double intercept;
  int points_used;
};

// Weighted least squares of -ln(p_hat) against n with a free intercept;
// weights are inverse delta-method variances errors/(1 - p_hat). Points with
// fewer than min_errors errors are excluded; fewer than 3 usable points is
// an estimation error.
ExponentFit fit_exponent(const std::vector<ErrorEstimate>& points,
                         int min_errors);

struct BlockVerification {
  int k;
  double rho_bhatt;     // sum over blocks of sqrt(P(w|0) P(w|1))
  double rho_tilted;    // tilted sum at s_bar (dmc); equals rho_bhatt for bsc
  double ml_error;      // exact single-block ML error, uniform prior
  double analytic_bound;
  double margin;        // analytic_bound - the rho the bound applies to
  bool pass;
  double mu2_half;      // tilted variance of the block LLR at s = 1/2
};

// Exhaustive enumeration of all |Z|^k received blocks for a block protocol;
// refuses above 2^20 states.
BlockVerification exact_block_verification(const ProtocolSpec& spec);

// Points table as CSV (RFC 4180 quoting, CRLF line endings).
void write_points_csv(std::ostream& os, const ExperimentConfig& config,
                      const std::vector<ErrorEstimate>& points);

}  // namespace relay
