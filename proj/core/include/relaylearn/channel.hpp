#pragma once

#include <string>
#include <vector>

#include "relaylearn/rng.hpp"

namespace relay {

// Binary-input discrete memoryless channel. Immutable after construction;
// row(i) is the output distribution given input bit i.
class Dmc {
 public:
  Dmc(std::vector<double> row0, std::vector<double> row1);

  int alphabet_size() const { return static_cast<int>(row0_.size()); }
  const std::vector<double>& row(int input) const {
    return input == 0 ? row0_ : row1_;
  }

  int sample(int input, RngStream& rng) const;

 private:
  std::vector<double> row0_, row1_;
  std::vector<double> cdf0_, cdf1_;
};

// Crossover probability p in (0, 1/2).
Dmc make_bsc(double p);

// Output 1 is noiseless evidence for input 1: row1 = (0, 1), row0 = (1-q, q)
// with q in (0, 1).
Dmc make_reverse_z(double q);

// Cascade: the output of `first` (which must be binary) feeds `second`.
// For BSCs this gives the usual crossover combination p1(1-p2) + (1-p1)p2.
Dmc compose(const Dmc& first, const Dmc& second);

bool is_bsc(const Dmc& ch, double* p = nullptr);
bool is_reverse_z(const Dmc& ch, double* q = nullptr);

// A channel together with how it was described, so reports and serialized
// configs can echo the original parameterization.
struct ChannelSpec {
  enum class Kind { Bsc, ReverseZ, General };
  Kind kind = Kind::General;
  double param = 0.0;  // p for Bsc, q for ReverseZ, unused for General
  Dmc dmc;

  std::string display() const;
};

ChannelSpec channel_spec_bsc(double p);
ChannelSpec channel_spec_reverse_z(double q);
ChannelSpec channel_spec_general(std::vector<double> row0,
                                 std::vector<double> row1);

}  // namespace relay
