#include "relaylearn/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "relaylearn/errors.hpp"
#include "relaylearn/exponent.hpp"

namespace relay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMergeTol = 1e-12;
constexpr size_t kMaxLlrStates = 4u << 20;

void check_block_symbols(const std::vector<int>& y_block, int k,
                         int alphabet) {
  if (static_cast<int>(y_block.size()) != k) {
    throw std::invalid_argument("observation block has wrong length");
  }
  for (int v : y_block) {
    if (v < 0 || v >= alphabet) {
      throw std::invalid_argument("observation symbol outside alphabet");
    }
  }
}

int round_ties_up(double v) {
  return static_cast<int>(std::floor(v + 0.5));
}

}  // namespace

double f_fraction(double alpha, double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::domain_error("f_fraction: p must lie in (0, 1/2)");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("f_fraction: alpha must lie in [0, 1]");
  }
  if (alpha < p) return 0.0;
  if (alpha <= 0.5) return binary_kl(alpha, p) / (2.0 * binary_kl(0.5, p));
  if (alpha < 1.0 - p) return 1.0 - f_fraction(1.0 - alpha, p);
  return 1.0;
}

std::vector<int> bsc_threshold_table(int k, double p) {
  if (k < 1) throw std::domain_error("block length must be >= 1");
  std::vector<int> t(k + 1, 0);
  for (int a = 0; a <= k; ++a) {
    if (2 * a <= k) {
      t[a] = static_cast<int>(std::floor(k * f_fraction(double(a) / k, p)));
    }
  }
  for (int a = 0; a <= k; ++a) {
    if (2 * a > k) t[a] = k - t[k - a];
  }
  return t;
}

int LlrDistribution::index_of(double l) const {
  auto it = std::lower_bound(support.begin(), support.end(), l);
  int best = -1;
  double best_diff = kInf;
  for (auto cand : {it, it == support.begin() ? it : std::prev(it)}) {
    if (cand == support.end()) continue;
    if (*cand == l) return static_cast<int>(cand - support.begin());
    const double d = std::abs(*cand - l);
    if (d < best_diff) {
      best_diff = d;
      best = static_cast<int>(cand - support.begin());
    }
  }
  if (best < 0 || best_diff > 1e-9) {
    std::ostringstream msg;
    msg << "LLR value " << l << " does not match any support point";
    throw InternalError(msg.str());
  }
  return best;
}

LlrDistribution build_llr_distribution(const Dmc& ch, int k) {
  if (k < 1) throw std::domain_error("block length must be >= 1");

  struct Sym {
    int flag;  // -1: row1 zero, +1: row0 zero, 0: both positive
    double l;
    double r0, r1;
  };
  std::vector<Sym> syms;
  for (int y = 0; y < ch.alphabet_size(); ++y) {
    const double r0 = ch.row(0)[y];
    const double r1 = ch.row(1)[y];
    if (r0 == 0.0 && r1 == 0.0) continue;
    if (r1 == 0.0) {
      syms.push_back({-1, 0.0, r0, r1});
    } else if (r0 == 0.0) {
      syms.push_back({+1, 0.0, r0, r1});
    } else {
      syms.push_back({0, std::log(r1 / r0), r0, r1});
    }
  }

  struct St {
    int flag;
    double l;
    double p0, p1;
  };
  std::vector<St> states{{0, 0.0, 1.0, 1.0}};
  std::vector<St> next;
  for (int step = 0; step < k; ++step) {
    next.clear();
    next.reserve(states.size() * syms.size());
    for (const St& st : states) {
      for (const Sym& sym : syms) {
        const double p0 = st.p0 * sym.r0;
        const double p1 = st.p1 * sym.r1;
        if (p0 == 0.0 && p1 == 0.0) continue;
        int flag;
        double l;
        if (st.flag == 0 && sym.flag == 0) {
          flag = 0;
          l = st.l + sym.l;
        } else if (st.flag == 0) {
          flag = sym.flag;
          l = 0.0;
        } else if (sym.flag == 0 || sym.flag == st.flag) {
          flag = st.flag;
          l = 0.0;
        } else {
          // opposite infinities carry zero mass under both laws
          throw InternalError("mixed-infinity LLR state with positive mass");
        }
        next.push_back({flag, l, p0, p1});
      }
    }
    std::sort(next.begin(), next.end(), [](const St& a, const St& b) {
      return a.flag != b.flag ? a.flag < b.flag : a.l < b.l;
    });
    states.clear();
    for (const St& st : next) {
      if (!states.empty() && states.back().flag == st.flag &&
          (st.flag != 0 || st.l - states.back().l <= kMergeTol)) {
        states.back().p0 += st.p0;
        states.back().p1 += st.p1;
      } else {
        states.push_back(st);
      }
    }
    if (states.size() > kMaxLlrStates) {
      throw std::domain_error(
          "LLR distribution support too large for this block length");
    }
  }

  LlrDistribution out;
  out.support.reserve(states.size());
  out.pmf0.reserve(states.size());
  out.pmf1.reserve(states.size());
  for (const St& st : states) {
    out.support.push_back(st.flag == 0 ? st.l : (st.flag < 0 ? -kInf : kInf));
    out.pmf0.push_back(st.p0);
    out.pmf1.push_back(st.p1);
  }

  const int m = out.size();
  out.tail0_geq.assign(m, 0.0);
  out.tail1_leq.assign(m, 0.0);
  double acc = 0.0;
  for (int i = m - 1; i >= 0; --i) {
    acc += out.pmf0[i];
    out.tail0_geq[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) {
    throw InternalError("LLR pmf under input 0 does not sum to 1");
  }
  acc = 0.0;
  for (int i = 0; i < m; ++i) {
    acc += out.pmf1[i];
    out.tail1_leq[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9) {
    throw InternalError("LLR pmf under input 1 does not sum to 1");
  }
  return out;
}

std::vector<double> g_values_raw(const LlrDistribution& dist, int k,
                                 double s_bar, double mu_max) {
  if (k < 1) throw std::domain_error("block length must be >= 1");
  if (!(s_bar >= 0.0 && s_bar <= 1.0)) {
    throw std::domain_error("s_bar must lie in [0, 1]");
  }
  if (!(mu_max < 0.0)) {
    throw std::domain_error("mu_max must be negative");
  }
  std::vector<double> g(dist.size());
  double running = 0.0;
  for (int i = 0; i < dist.size(); ++i) {
    const double l = dist.support[i];
    double v;
    if (l <= 0.0) {
      const double tail = dist.tail0_geq[i];
      if (!(tail > 0.0)) throw InternalError("empty upper tail at l <= 0");
      v = std::min(double(k), (1.0 - s_bar) / mu_max * std::log(tail));
    } else {
      const double tail = dist.tail1_leq[i];
      if (!(tail > 0.0)) throw InternalError("empty lower tail at l > 0");
      v = std::max(0.0, double(k) - s_bar / mu_max * std::log(tail));
    }
    running = std::max(running, v);
    g[i] = running;
  }
  return g;
}

std::vector<int> build_g_table(const LlrDistribution& dist, int k,
                               double s_bar, double mu_max) {
  const std::vector<double> raw = g_values_raw(dist, k, s_bar, mu_max);
  std::vector<int> g(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    g[i] = std::clamp(round_ties_up(raw[i]), 0, k);
    if (i > 0 && g[i] < g[i - 1]) {
      throw InternalError("g table decreased along the LLR support");
    }
  }
  return g;
}

namespace {

ProtocolSpec make_protocolspec_uninit(ProtocolKind kind, int k,
                                      const ChannelSpec& P,
                                      const ChannelSpec& Q) {
  return ProtocolSpec{kind, k, P, Q,
                      std::numeric_limits<double>::quiet_NaN(),
                      {}, LlrDistribution{}, 0.0};
}

}  // namespace

ProtocolSpec make_protocol_spec(ProtocolKind kind, int k,
                                const ChannelSpec& P, const ChannelSpec& Q,
                                std::optional<double> s_bar) {
  if (k < 1) throw std::domain_error("block length must be >= 1");
  ProtocolSpec spec = make_protocolspec_uninit(kind, k, P, Q);

  switch (kind) {
    case ProtocolKind::SimpleForwarding:
    case ProtocolKind::Cumulative:
    case ProtocolKind::SqrtBlockMajority: {
      if (P.dmc.alphabet_size() != 2) {
        throw std::domain_error(
            "baseline protocols need binary teacher observations");
      }
      break;
    }
    case ProtocolKind::BscBlock: {
      double p = 0.0;
      if (!is_bsc(P.dmc, &p)) {
        throw std::domain_error("bsc-block requires a BSC teacher channel");
      }
      spec.thresholds = bsc_threshold_table(k, p);
      break;
    }
    case ProtocolKind::DmcBlock: {
      TiltedFamily tp(P.dmc), tq(Q.dmc);
      const double sb = s_bar.value_or(two_hop_rate(P.dmc, Q.dmc).s_star);
      if (!(sb >= 0.0 && sb <= 1.0)) {
        throw std::domain_error("s_bar must lie in [0, 1]");
      }
      spec.s_bar = sb;
      spec.mu_max = std::max(tp.mu(sb), tq.mu(sb));
      if (!(spec.mu_max < 0.0)) {
        throw std::domain_error(
            "dmc-block needs max(mu_P, mu_Q) < 0 at the chosen s_bar");
      }
      spec.llr = build_llr_distribution(P.dmc, k);
      spec.thresholds = build_g_table(spec.llr, k, sb, spec.mu_max);
      break;
    }
  }
  if (kind != ProtocolKind::DmcBlock && s_bar.has_value()) {
    throw std::domain_error("s_bar only applies to dmc-block");
  }
  return spec;
}

std::vector<std::uint8_t> teach_block_bsc(const std::vector<int>& y_block,
                                          const ProtocolSpec& spec) {
  if (spec.kind != ProtocolKind::BscBlock) {
    throw std::invalid_argument("protocol is not bsc-block");
  }
  check_block_symbols(y_block, spec.k, 2);
  int ones = 0;
  for (int v : y_block) ones += v;
  const int t = spec.thresholds[ones];
  std::vector<std::uint8_t> x(spec.k, 0);
  std::fill(x.begin(), x.begin() + t, std::uint8_t{1});
  return x;
}

std::vector<std::uint8_t> teach_block_dmc(const std::vector<int>& y_block,
                                          const ProtocolSpec& spec) {
  if (spec.kind != ProtocolKind::DmcBlock) {
    throw std::invalid_argument("protocol is not dmc-block");
  }
  check_block_symbols(y_block, spec.k, spec.P.dmc.alphabet_size());

  int flag = 0;
  double l = 0.0;
  for (int y : y_block) {
    const double r0 = spec.P.dmc.row(0)[y];
    const double r1 = spec.P.dmc.row(1)[y];
    if (r0 == 0.0 && r1 == 0.0) {
      throw std::invalid_argument(
          "observation symbol has zero probability under both inputs");
    }
    if (r1 == 0.0) {
      if (flag > 0) {
        throw std::invalid_argument(
            "observation block impossible under both inputs");
      }
      flag = -1;
    } else if (r0 == 0.0) {
      if (flag < 0) {
        throw std::invalid_argument(
            "observation block impossible under both inputs");
      }
      flag = +1;
    } else {
      l += std::log(r1 / r0);
    }
  }
  const double lv = flag == 0 ? l : (flag < 0 ? -kInf : kInf);
  const int g = spec.thresholds[spec.llr.index_of(lv)];
  std::vector<std::uint8_t> x(spec.k, 1);
  std::fill(x.begin(), x.begin() + g, std::uint8_t{0});
  return x;
}

std::vector<std::uint8_t> teach_stream(const std::vector<int>& y,
                                       const ProtocolSpec& spec) {
  const int n = static_cast<int>(y.size());
  if (n < 1) throw std::invalid_argument("empty observation stream");
  for (int v : y) {
    if (v < 0 || v >= spec.P.dmc.alphabet_size()) {
      throw std::invalid_argument("observation symbol outside alphabet");
    }
  }

  std::vector<std::uint8_t> x;
  x.reserve(n);
  switch (spec.kind) {
    case ProtocolKind::SimpleForwarding: {
      for (int v : y) x.push_back(static_cast<std::uint8_t>(v));
      break;
    }
    case ProtocolKind::Cumulative: {
      int ones = 0;
      std::uint8_t prev = 0;
      for (int i = 0; i < n; ++i) {
        ones += y[i];
        const int seen = i + 1;
        std::uint8_t bit = prev;
        if (2 * ones > seen) bit = 1;
        if (2 * ones < seen) bit = 0;
        x.push_back(bit);
        prev = bit;
      }
      break;
    }
    case ProtocolKind::SqrtBlockMajority: {
      const int b = static_cast<int>(std::ceil(std::sqrt(double(n))));
      std::uint8_t prev = 0;
      for (int start = 0; start < n; start += b) {
        const int len = std::min(b, n - start);
        std::uint8_t bit = 0;
        if (start > 0) {
          const int prev_start = start - b;
          const int prev_len = b;
          int ones = 0;
          for (int i = prev_start; i < prev_start + prev_len; ++i) ones += y[i];
          bit = prev;
          if (2 * ones > prev_len) bit = 1;
          if (2 * ones < prev_len) bit = 0;
        }
        x.insert(x.end(), len, bit);
        prev = bit;
      }
      break;
    }
    case ProtocolKind::BscBlock:
    case ProtocolKind::DmcBlock: {
      if (n % spec.k != 0) {
        throw std::invalid_argument(
            "stream length must be a multiple of the block length");
      }
      const int m = n / spec.k;
      x.insert(x.end(), spec.k, std::uint8_t{0});
      std::vector<int> block(spec.k);
      for (int j = 1; j < m; ++j) {
        std::copy(y.begin() + (j - 1) * spec.k, y.begin() + j * spec.k,
                  block.begin());
        const auto enc = spec.kind == ProtocolKind::BscBlock
                             ? teach_block_bsc(block, spec)
                             : teach_block_dmc(block, spec);
        x.insert(x.end(), enc.begin(), enc.end());
      }
      break;
    }
  }
  return x;
}

}  // namespace relay
