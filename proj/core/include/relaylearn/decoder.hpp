#pragma once

#include <cstdint>
#include <vector>

#include "relaylearn/protocol.hpp"
#include "relaylearn/rng.hpp"

namespace relay {

// Per-block likelihood tables for the student's ML decision. Latents are the
// teacher's possible block encodings, ordered so that the ones/zeros prefix
// threshold is non-decreasing; emissions depend only on whether a position
// sits before or after the threshold.
struct BlockLlrTables {
  int k = 0;
  std::vector<double> log_prior0, log_prior1;  // per latent, -inf allowed
  std::vector<int> threshold;                  // prefix length per latent
  std::vector<double> log_emit_first;          // per received symbol
  std::vector<double> log_emit_second;

  int latent_count() const { return static_cast<int>(threshold.size()); }
};

BlockLlrTables make_block_tables(const ProtocolSpec& spec);

// Block log likelihood ratio ln P(w | theta=1) / P(w | theta=0) computed in
// one pass over the block plus one incremental segment update per latent.
// reads, when given, counts accesses to w.
double block_llr_fast(const std::vector<int>& w, const BlockLlrTables& tables,
                      long* reads = nullptr);

// Reference implementation: full double loop over latents and positions.
double block_llr_naive(const std::vector<int>& w, const BlockLlrTables& tables);

struct BlockDecodeResult {
  int bit;
  double total_llr;
};

// ML decision for a block protocol stream: drops the filler block, sums the
// per-block LLRs, ties decide 0. Truncating z to fewer whole blocks yields
// the same partial sums (anytime property).
BlockDecodeResult decode_block_protocol(const std::vector<int>& z,
                                        const ProtocolSpec& spec,
                                        const BlockLlrTables& tables);

// Majority vote over the final ceil(eps * n) received bits; exact ties are
// broken by a fair coin.
int decode_majority(const std::vector<int>& z, double eps, RngStream& rng);

}  // namespace relay
