#include "relaylearn/decoder.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "relaylearn/errors.hpp"

namespace relay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_or_ninf(double p) { return p > 0.0 ? std::log(p) : -kInf; }

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Streaming log-sum-exp accumulator; -inf terms are skipped.
struct LogSum {
  double max = -kInf;
  double acc = 0.0;

  void add(double lp) {
    if (lp == -kInf) return;
    if (lp > max) {
      acc = acc * std::exp(max - lp) + 1.0;
      max = lp;
    } else {
      acc += std::exp(lp - max);
    }
  }
  double value() const { return max == -kInf ? -kInf : max + std::log(acc); }
};

void check_received_symbols(const std::vector<int>& w, int alphabet) {
  for (int v : w) {
    if (v < 0 || v >= alphabet) {
      throw std::invalid_argument("received symbol outside alphabet");
    }
  }
}

}  // namespace

BlockLlrTables make_block_tables(const ProtocolSpec& spec) {
  BlockLlrTables t;
  t.k = spec.k;
  const Dmc& Q = spec.Q.dmc;
  const int zn = Q.alphabet_size();

  switch (spec.kind) {
    case ProtocolKind::BscBlock: {
      double p = 0.0;
      is_bsc(spec.P.dmc, &p);
      const int L = spec.k + 1;
      t.threshold = spec.thresholds;
      t.log_prior0.resize(L);
      t.log_prior1.resize(L);
      for (int a = 0; a < L; ++a) {
        const double lc = log_binom(spec.k, a);
        t.log_prior0[a] = lc + a * std::log(p) + (spec.k - a) * std::log(1 - p);
        t.log_prior1[a] = lc + a * std::log(1 - p) + (spec.k - a) * std::log(p);
      }
      // prefix carries ones
      t.log_emit_first.resize(zn);
      t.log_emit_second.resize(zn);
      for (int z = 0; z < zn; ++z) {
        t.log_emit_first[z] = log_or_ninf(Q.row(1)[z]);
        t.log_emit_second[z] = log_or_ninf(Q.row(0)[z]);
      }
      break;
    }
    case ProtocolKind::DmcBlock: {
      const int L = spec.llr.size();
      t.threshold = spec.thresholds;
      t.log_prior0.resize(L);
      t.log_prior1.resize(L);
      for (int j = 0; j < L; ++j) {
        t.log_prior0[j] = log_or_ninf(spec.llr.pmf0[j]);
        t.log_prior1[j] = log_or_ninf(spec.llr.pmf1[j]);
      }
      // prefix carries zeros
      t.log_emit_first.resize(zn);
      t.log_emit_second.resize(zn);
      for (int z = 0; z < zn; ++z) {
        t.log_emit_first[z] = log_or_ninf(Q.row(0)[z]);
        t.log_emit_second[z] = log_or_ninf(Q.row(1)[z]);
      }
      break;
    }
    default:
      throw std::invalid_argument(
          "block tables only apply to block protocols");
  }
  for (size_t j = 1; j < t.threshold.size(); ++j) {
    if (t.threshold[j] < t.threshold[j - 1]) {
      throw InternalError("latent thresholds must be non-decreasing");
    }
  }
  return t;
}

double block_llr_fast(const std::vector<int>& w, const BlockLlrTables& tables,
                      long* reads) {
  const int k = tables.k;
  if (static_cast<int>(w.size()) != k) {
    throw std::invalid_argument("received block has wrong length");
  }
  check_received_symbols(w, static_cast<int>(tables.log_emit_first.size()));
  const int L = tables.latent_count();
  long nreads = 0;

  // log P(w | latent 0): first segment up to threshold[0], rest second
  double finite = 0.0;
  int infs = 0;
  auto add_term = [&](double v) {
    if (v == -kInf) {
      ++infs;
    } else {
      finite += v;
    }
  };
  auto remove_term = [&](double v) {
    if (v == -kInf) {
      --infs;
    } else {
      finite -= v;
    }
  };

  const int t0 = tables.threshold[0];
  for (int i = 0; i < k; ++i) {
    const int z = w[i];
    ++nreads;
    add_term(i < t0 ? tables.log_emit_first[z] : tables.log_emit_second[z]);
  }

  LogSum s0, s1;
  auto fold = [&](int j) {
    const double lp = infs > 0 ? -kInf : finite;
    if (lp != -kInf) {
      if (tables.log_prior0[j] != -kInf) s0.add(tables.log_prior0[j] + lp);
      if (tables.log_prior1[j] != -kInf) s1.add(tables.log_prior1[j] + lp);
    }
  };
  fold(0);
  for (int j = 1; j < L; ++j) {
    for (int i = tables.threshold[j - 1]; i < tables.threshold[j]; ++i) {
      const int z = w[i];
      ++nreads;
      remove_term(tables.log_emit_second[z]);
      add_term(tables.log_emit_first[z]);
    }
    fold(j);
  }
  if (reads) *reads = nreads;

  const double l1 = s1.value();
  const double l0 = s0.value();
  if (l1 == -kInf && l0 == -kInf) {
    throw std::domain_error("received block impossible under both inputs");
  }
  if (l1 == -kInf) return -kInf;
  if (l0 == -kInf) return kInf;
  return l1 - l0;
}

double block_llr_naive(const std::vector<int>& w,
                       const BlockLlrTables& tables) {
  const int k = tables.k;
  if (static_cast<int>(w.size()) != k) {
    throw std::invalid_argument("received block has wrong length");
  }
  check_received_symbols(w, static_cast<int>(tables.log_emit_first.size()));
  LogSum s0, s1;
  for (int j = 0; j < tables.latent_count(); ++j) {
    double lp = 0.0;
    for (int i = 0; i < k; ++i) {
      lp += i < tables.threshold[j] ? tables.log_emit_first[w[i]]
                                    : tables.log_emit_second[w[i]];
    }
    if (tables.log_prior0[j] != -kInf) s0.add(tables.log_prior0[j] + lp);
    if (tables.log_prior1[j] != -kInf) s1.add(tables.log_prior1[j] + lp);
  }
  const double l1 = s1.value();
  const double l0 = s0.value();
  if (l1 == -kInf && l0 == -kInf) {
    throw std::domain_error("received block impossible under both inputs");
  }
  if (l1 == -kInf) return -kInf;
  if (l0 == -kInf) return kInf;
  return l1 - l0;
}

BlockDecodeResult decode_block_protocol(const std::vector<int>& z,
                                        const ProtocolSpec& spec,
                                        const BlockLlrTables& tables) {
  if (spec.kind != ProtocolKind::BscBlock &&
      spec.kind != ProtocolKind::DmcBlock) {
    throw std::invalid_argument("not a block protocol");
  }
  const int n = static_cast<int>(z.size());
  const int k = spec.k;
  if (n % k != 0) {
    throw std::invalid_argument("stream length must be a multiple of k");
  }
  const int m = n / k;
  if (m < 2) {
    throw std::invalid_argument(
        "stream too short: need at least one block after the filler");
  }
  double total = 0.0;
  std::vector<int> block(k);
  for (int j = 1; j < m; ++j) {
    std::copy(z.begin() + j * k, z.begin() + (j + 1) * k, block.begin());
    const double llr = block_llr_fast(block, tables);
    total += llr;
    if (std::isnan(total)) {
      throw std::domain_error(
          "stream carries contradictory impossible blocks");
    }
  }
  return BlockDecodeResult{total > 0.0 ? 1 : 0, total};
}

int decode_majority(const std::vector<int>& z, double eps, RngStream& rng) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw std::domain_error("majority window fraction must lie in (0, 1]");
  }
  const int n = static_cast<int>(z.size());
  if (n < 1) throw std::invalid_argument("empty stream");
  check_received_symbols(z, 2);
  const int window = std::max(1, static_cast<int>(std::ceil(eps * n)));
  int ones = 0;
  for (int i = n - window; i < n; ++i) ones += z[i];
  if (2 * ones > window) return 1;
  if (2 * ones < window) return 0;
  return rng.next_bit();
}

}  // namespace relay
