#include "relaylearn/channel.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace relay {

namespace {

constexpr double kRowSumTol = 1e-12;

std::vector<double> make_cdf(const std::vector<double>& row) {
  std::vector<double> cdf(row.size());
  double acc = 0.0;
  for (size_t i = 0; i < row.size(); ++i) {
    acc += row[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;  // guard against rounding in the running sum
  return cdf;
}

void validate_row(const std::vector<double>& row, const char* name) {
  if (row.size() < 2) {
    throw std::invalid_argument(std::string(name) +
                                " must have at least 2 outputs");
  }
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0) || v > 1.0) {
      throw std::invalid_argument(std::string(name) +
                                  " entries must lie in [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTol) {
    throw std::invalid_argument(std::string(name) + " must sum to 1");
  }
}

}  // namespace

Dmc::Dmc(std::vector<double> row0, std::vector<double> row1)
    : row0_(std::move(row0)), row1_(std::move(row1)) {
  validate_row(row0_, "row0");
  validate_row(row1_, "row1");
  if (row0_.size() != row1_.size()) {
    throw std::invalid_argument("rows must have equal length");
  }
  if (row0_ == row1_) {
    throw std::invalid_argument("rows must differ (channel must carry information)");
  }
  cdf0_ = make_cdf(row0_);
  cdf1_ = make_cdf(row1_);
}

int Dmc::sample(int input, RngStream& rng) const {
  if (input != 0 && input != 1) {
    throw std::invalid_argument("channel input must be 0 or 1");
  }
  const std::vector<double>& cdf = input == 0 ? cdf0_ : cdf1_;
  const double u = rng.next_double();
  for (size_t i = 0; i + 1 < cdf.size(); ++i) {
    if (u < cdf[i]) return static_cast<int>(i);
  }
  return static_cast<int>(cdf.size()) - 1;
}

Dmc make_bsc(double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::domain_error("bsc crossover must lie in (0, 1/2)");
  }
  return Dmc({1.0 - p, p}, {p, 1.0 - p});
}

Dmc make_reverse_z(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("reverse-z parameter must lie in (0, 1)");
  }
  return Dmc({1.0 - q, q}, {0.0, 1.0});
}

Dmc compose(const Dmc& first, const Dmc& second) {
  if (first.alphabet_size() != 2) {
    throw std::invalid_argument(
        "compose requires the first channel to have binary output");
  }
  const int m = second.alphabet_size();
  std::vector<double> out0(m), out1(m);
  for (int z = 0; z < m; ++z) {
    out0[z] = first.row(0)[0] * second.row(0)[z] +
              first.row(0)[1] * second.row(1)[z];
    out1[z] = first.row(1)[0] * second.row(0)[z] +
              first.row(1)[1] * second.row(1)[z];
  }
  return Dmc(std::move(out0), std::move(out1));
}

bool is_bsc(const Dmc& ch, double* p) {
  if (ch.alphabet_size() != 2) return false;
  const double a = ch.row(0)[1];
  const double b = ch.row(1)[0];
  if (std::abs(a - b) > 1e-12) return false;
  if (!(a > 0.0 && a < 0.5)) return false;
  if (p) *p = a;
  return true;
}

bool is_reverse_z(const Dmc& ch, double* q) {
  if (ch.alphabet_size() != 2) return false;
  if (ch.row(1)[0] != 0.0 || ch.row(1)[1] != 1.0) return false;
  const double qq = ch.row(0)[1];
  if (!(qq > 0.0 && qq < 1.0)) return false;
  if (q) *q = qq;
  return true;
}

std::string ChannelSpec::display() const {
  char buf[64];
  switch (kind) {
    case Kind::Bsc:
      std::snprintf(buf, sizeof(buf), "bsc(%g)", param);
      return buf;
    case Kind::ReverseZ:
      std::snprintf(buf, sizeof(buf), "reverse_z(%g)", param);
      return buf;
    case Kind::General:
      return "general";
  }
  return "unknown";
}

ChannelSpec channel_spec_bsc(double p) {
  return ChannelSpec{ChannelSpec::Kind::Bsc, p, make_bsc(p)};
}

ChannelSpec channel_spec_reverse_z(double q) {
  return ChannelSpec{ChannelSpec::Kind::ReverseZ, q, make_reverse_z(q)};
}

ChannelSpec channel_spec_general(std::vector<double> row0,
                                 std::vector<double> row1) {
  return ChannelSpec{ChannelSpec::Kind::General, 0.0,
                     Dmc(std::move(row0), std::move(row1))};
}

}  // namespace relay
