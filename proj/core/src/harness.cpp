#include "relaylearn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "relaylearn/errors.hpp"
#include "relaylearn/exponent.hpp"

namespace relay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double z_for_confidence(double confidence) {
  if (std::abs(confidence - 0.95) < 1e-9) return 1.959963984540054;
  if (std::abs(confidence - 0.99) < 1e-9) return 2.5758293035489004;
  throw std::domain_error("unsupported confidence level (use 0.95 or 0.99)");
}

void validate_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::domain_error("trials must be >= 1");
  if (config.n_grid.empty()) throw std::domain_error("n_grid must be nonempty");
  for (long n : config.n_grid) {
    if (n < 1) throw std::domain_error("n must be >= 1");
    const bool block = config.protocol.kind == ProtocolKind::BscBlock ||
                       config.protocol.kind == ProtocolKind::DmcBlock;
    if (block && n % config.protocol.k != 0) {
      throw std::domain_error("n must be a multiple of the block length");
    }
  }
  if (config.decoder == DecoderKind::EpsilonMajority &&
      !(config.epsilon > 0.0 && config.epsilon < 1.0)) {
    throw std::domain_error("epsilon must lie in (0, 1)");
  }
  if (config.decoder == DecoderKind::BlockMl &&
      config.protocol.kind != ProtocolKind::BscBlock &&
      config.protocol.kind != ProtocolKind::DmcBlock) {
    throw std::domain_error("block-ml decoding needs a block protocol");
  }
  if (config.decoder != DecoderKind::BlockMl &&
      config.protocol.Q.dmc.alphabet_size() != 2) {
    throw std::domain_error("majority decoding needs binary received symbols");
  }
  if (config.min_errors < 1) throw std::domain_error("min_errors must be >= 1");
}

}  // namespace

const char* protocol_kind_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::SimpleForwarding: return "simple-forwarding";
    case ProtocolKind::Cumulative: return "cumulative";
    case ProtocolKind::SqrtBlockMajority: return "sqrt-block-majority";
    case ProtocolKind::BscBlock: return "bsc-block";
    case ProtocolKind::DmcBlock: return "dmc-block";
  }
  return "unknown";
}

ProtocolKind protocol_kind_from_string(const std::string& name) {
  if (name == "simple-forwarding") return ProtocolKind::SimpleForwarding;
  if (name == "cumulative") return ProtocolKind::Cumulative;
  if (name == "sqrt-block-majority") return ProtocolKind::SqrtBlockMajority;
  if (name == "bsc-block") return ProtocolKind::BscBlock;
  if (name == "dmc-block") return ProtocolKind::DmcBlock;
  throw std::domain_error("unknown protocol kind: " + name);
}

const char* decoder_kind_name(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::BlockMl: return "block-ml";
    case DecoderKind::Majority: return "majority";
    case DecoderKind::EpsilonMajority: return "epsilon-majority";
  }
  return "unknown";
}

DecoderKind decoder_kind_from_string(const std::string& name) {
  if (name == "block-ml") return DecoderKind::BlockMl;
  if (name == "majority") return DecoderKind::Majority;
  if (name == "epsilon-majority") return DecoderKind::EpsilonMajority;
  throw std::domain_error("unknown decoder kind: " + name);
}

Interval wilson_interval(long errors, long trials, double confidence) {
  if (trials < 1) throw std::domain_error("trials must be >= 1");
  if (errors < 0 || errors > trials) {
    throw std::domain_error("errors must lie in [0, trials]");
  }
  const double z = z_for_confidence(confidence);
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  // at the boundary counts the analytic endpoint is exact; avoid fp residue
  const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = errors == trials ? 1.0 : std::min(1.0, center + half);
  return Interval{lo, hi};
}

ErrorEstimate run_point(const ExperimentConfig& config, long n) {
  validate_config(config);
  const ProtocolSpec& spec = config.protocol;
  const bool block_decode = config.decoder == DecoderKind::BlockMl;

  BlockLlrTables tables;
  if (block_decode) {
    if (n / spec.k < 2) {
      throw std::domain_error(
          "block-ml needs at least one block after the filler");
    }
    tables = make_block_tables(spec);
  }

  int nthreads = config.threads > 0
                     ? config.threads
                     : static_cast<int>(std::thread::hardware_concurrency());
  if (nthreads < 1) nthreads = 1;
  nthreads = static_cast<int>(
      std::min<long>(nthreads, config.trials));

  std::vector<long> errors_per(nthreads, 0);
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&](int who, long t0, long t1) {
    try {
      std::vector<int> y(n), z(n);
      long errs = 0;
      for (long t = t0; t < t1; ++t) {
        RngStream rng = RngStream::derive(config.seed,
                                          static_cast<std::uint64_t>(n),
                                          static_cast<std::uint64_t>(t));
        const int theta = rng.next_bit();
        for (long i = 0; i < n; ++i) {
          y[i] = spec.P.dmc.sample(theta, rng);
        }
        const std::vector<std::uint8_t> x = teach_stream(y, spec);
        for (long i = 0; i < n; ++i) {
          z[i] = spec.Q.dmc.sample(x[i], rng);
        }
        int est = 0;
        switch (config.decoder) {
          case DecoderKind::BlockMl:
            est = decode_block_protocol(z, spec, tables).bit;
            break;
          case DecoderKind::Majority:
            est = decode_majority(z, 1.0, rng);
            break;
          case DecoderKind::EpsilonMajority:
            est = decode_majority(z, config.epsilon, rng);
            break;
        }
        if (est != theta) ++errs;
      }
      errors_per[who] = errs;
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  if (nthreads == 1) {
    worker(0, 0, config.trials);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (config.trials + nthreads - 1) / nthreads;
    for (int w = 0; w < nthreads; ++w) {
      const long t0 = w * chunk;
      const long t1 = std::min<long>(config.trials, t0 + chunk);
      if (t0 >= t1) break;
      pool.emplace_back(worker, w, t0, t1);
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  long errors = 0;
  for (long e : errors_per) errors += e;

  const double p_hat = static_cast<double>(errors) / config.trials;
  const Interval ci = wilson_interval(errors, config.trials, 0.95);
  const double rate = errors > 0 ? -std::log(p_hat) / n : kInf;
  return ErrorEstimate{n, config.trials, errors, p_hat, ci.lo, ci.hi, rate};
}

std::vector<ErrorEstimate> run_sweep(const ExperimentConfig& config) {
  validate_config(config);
  std::vector<ErrorEstimate> out;
  out.reserve(config.n_grid.size());
  for (long n : config.n_grid) out.push_back(run_point(config, n));
  return out;
}

ExponentFit fit_exponent(const std::vector<ErrorEstimate>& points,
                         int min_errors) {
  std::vector<const ErrorEstimate*> used;
  for (const auto& pt : points) {
    if (pt.errors >= min_errors) used.push_back(&pt);
  }
  if (used.size() < 3) {
    std::ostringstream msg;
    msg << "exponent fit needs at least 3 points with >= " << min_errors
        << " errors, have " << used.size();
    throw std::domain_error(msg.str());
  }
  // weights: inverse variance of ln(p_hat) by the delta method
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (const auto* pt : used) {
    const double w = pt->errors / (1.0 - pt->p_hat);
    sw += w;
    swx += w * pt->n;
    swy += w * -std::log(pt->p_hat);
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (const auto* pt : used) {
    const double w = pt->errors / (1.0 - pt->p_hat);
    const double dx = pt->n - xbar;
    sxx += w * dx * dx;
    sxy += w * dx * (-std::log(pt->p_hat) - ybar);
  }
  if (!(sxx > 0.0)) {
    throw std::domain_error("exponent fit needs distinct n values");
  }
  const double slope = sxy / sxx;
  return ExponentFit{slope, std::sqrt(1.0 / sxx), ybar - slope * xbar,
                     static_cast<int>(used.size())};
}

BlockVerification exact_block_verification(const ProtocolSpec& spec) {
  if (spec.kind != ProtocolKind::BscBlock &&
      spec.kind != ProtocolKind::DmcBlock) {
    throw std::invalid_argument("exact verification needs a block protocol");
  }
  const int k = spec.k;
  const int zn = spec.Q.dmc.alphabet_size();
  double states = std::pow(static_cast<double>(zn), k);
  if (states > static_cast<double>(1 << 20)) {
    throw std::domain_error(
        "exact verification refused: more than 2^20 received blocks");
  }

  const BlockLlrTables tables = make_block_tables(spec);
  const int L = tables.latent_count();

  // priors and emissions in plain probability space
  std::vector<double> prior0(L), prior1(L);
  for (int j = 0; j < L; ++j) {
    prior0[j] = tables.log_prior0[j] == -kInf ? 0.0
                                              : std::exp(tables.log_prior0[j]);
    prior1[j] = tables.log_prior1[j] == -kInf ? 0.0
                                              : std::exp(tables.log_prior1[j]);
  }

  const double s_bar = spec.kind == ProtocolKind::DmcBlock ? spec.s_bar : 0.5;

  std::vector<double> emit_first(zn), emit_second(zn);
  for (int z = 0; z < zn; ++z) {
    emit_first[z] =
        tables.log_emit_first[z] == -kInf ? 0.0 : std::exp(tables.log_emit_first[z]);
    emit_second[z] = tables.log_emit_second[z] == -kInf
                         ? 0.0
                         : std::exp(tables.log_emit_second[z]);
  }

  double rho_bhatt = 0.0, rho_tilted = 0.0, ml_error = 0.0;
  double z_half = 0.0, m1 = 0.0, m2 = 0.0;

  std::vector<int> w(k, 0);
  std::vector<double> cond(L);
  while (true) {
    for (int j = 0; j < L; ++j) {
      double pr = 1.0;
      for (int i = 0; i < k; ++i) {
        pr *= i < tables.threshold[j] ? emit_first[w[i]] : emit_second[w[i]];
      }
      cond[j] = pr;
    }
    double a = 0.0, b = 0.0;  // P(w|1), P(w|0)
    for (int j = 0; j < L; ++j) {
      a += prior1[j] * cond[j];
      b += prior0[j] * cond[j];
    }
    rho_bhatt += std::sqrt(a * b);
    if (a > 0.0 && b > 0.0) {
      rho_tilted += std::pow(b, 1.0 - s_bar) * std::pow(a, s_bar);
      const double lw = std::log(a / b);
      const double weight = std::sqrt(a * b);
      z_half += weight;
      m1 += weight * lw;
      m2 += weight * lw * lw;
    } else {
      rho_tilted += 0.0;
    }
    ml_error += std::min(a, b);

    int pos = k - 1;
    while (pos >= 0 && w[pos] == zn - 1) w[pos--] = 0;
    if (pos < 0) break;
    ++w[pos];
  }
  ml_error *= 0.5;

  double bound;
  double rho_for_bound;
  if (spec.kind == ProtocolKind::BscBlock) {
    double p = 0.0, q = 0.0;
    is_bsc(spec.P.dmc, &p);
    const double p_eff = is_bsc(spec.Q.dmc, &q) ? std::max(p, q) : p;
    bound = (k + 1.0) * (k + 1.0) * std::exp(-k * binary_kl(0.5, p_eff));
    rho_for_bound = rho_bhatt;
  } else {
    const int ysize = spec.P.dmc.alphabet_size();
    bound = std::pow(k + 1.0, 2.0 * ysize) * std::exp(k * spec.mu_max);
    rho_for_bound = rho_tilted;
  }

  BlockVerification out;
  out.k = k;
  out.rho_bhatt = rho_bhatt;
  out.rho_tilted = spec.kind == ProtocolKind::BscBlock ? rho_bhatt : rho_tilted;
  out.ml_error = ml_error;
  out.analytic_bound = bound;
  out.margin = bound - rho_for_bound;
  out.pass = rho_for_bound <= bound;
  if (z_half > 0.0) {
    m1 /= z_half;
    m2 /= z_half;
    out.mu2_half = std::max(0.0, m2 - m1 * m1);
  } else {
    out.mu2_half = 0.0;
  }
  return out;
}

void write_points_csv(std::ostream& os, const ExperimentConfig& config,
                      const std::vector<ErrorEstimate>& points) {
  os << "protocol,p_or_P,q_or_Q,k,n,trials,errors,p_hat,ci_lo,ci_hi\r\n";
  char buf[512];
  for (const auto& pt : points) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%ld,%ld,%ld,%.10g,%.10g,%.10g\r\n",
                  protocol_kind_name(config.protocol.kind),
                  config.protocol.P.display().c_str(),
                  config.protocol.Q.display().c_str(), config.protocol.k,
                  pt.n, pt.trials, pt.errors, pt.p_hat, pt.ci95_lo,
                  pt.ci95_hi);
    os << buf;
  }
}

}  // namespace relay
