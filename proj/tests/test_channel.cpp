#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "relaylearn/channel.hpp"
#include "relaylearn/rng.hpp"

using namespace relay;

TEST_SUITE("channel") {

TEST_CASE("bsc and reverse-z construction") {
  Dmc b = make_bsc(0.2);
  CHECK(b.alphabet_size() == 2);
  CHECK(b.row(0)[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(b.row(0)[1] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(b.row(1)[0] == doctest::Approx(0.2).epsilon(1e-14));

  Dmc z = make_reverse_z(0.8);
  CHECK(z.row(1)[0] == 0.0);
  CHECK(z.row(1)[1] == 1.0);
  CHECK(z.row(0)[0] == doctest::Approx(0.2).epsilon(1e-14));

  CHECK_THROWS_AS(make_bsc(0.0), std::domain_error);
  CHECK_THROWS_AS(make_bsc(0.5), std::domain_error);
  CHECK_THROWS_AS(make_bsc(-0.1), std::domain_error);
  CHECK_THROWS_AS(make_reverse_z(0.0), std::domain_error);
  CHECK_THROWS_AS(make_reverse_z(1.0), std::domain_error);
}

TEST_CASE("dmc validation") {
  CHECK_THROWS(Dmc({0.5, 0.6}, {0.5, 0.4}));   // row sum off
  CHECK_THROWS(Dmc({0.5, 0.5}, {0.5, 0.5}));   // rows identical
  CHECK_THROWS(Dmc({1.0}, {1.0}));             // single output
  CHECK_THROWS(Dmc({-0.1, 1.1}, {0.5, 0.5}));  // out of range
  CHECK_NOTHROW(Dmc({0.5, 0.3, 0.2}, {0.1, 0.2, 0.7}));
}

TEST_CASE("compose reproduces the crossover combination") {
  for (double p1 : {0.1, 0.25, 0.4}) {
    for (double p2 : {0.05, 0.3, 0.45}) {
      Dmc c = compose(make_bsc(p1), make_bsc(p2));
      const double pc = p1 * (1.0 - p2) + (1.0 - p1) * p2;
      double got = 0.0;
      CHECK(is_bsc(c, &got));
      CHECK(got == doctest::Approx(pc).epsilon(1e-12));
    }
  }
}

TEST_CASE("compose wants a binary first stage, any second stage") {
  Dmc ternary({0.5, 0.3, 0.2}, {0.1, 0.2, 0.7});
  CHECK_THROWS(compose(ternary, make_bsc(0.1)));

  Dmc c = compose(make_bsc(0.2), ternary);
  CHECK(c.alphabet_size() == 3);
  CHECK(c.row(0)[0] == doctest::Approx(0.8 * 0.5 + 0.2 * 0.1).epsilon(1e-14));
  CHECK(c.row(1)[2] == doctest::Approx(0.2 * 0.2 + 0.8 * 0.7).epsilon(1e-14));
}

TEST_CASE("kind detection") {
  double v = 0.0;
  CHECK(is_bsc(make_bsc(0.3), &v));
  CHECK(v == doctest::Approx(0.3).epsilon(1e-14));
  CHECK_FALSE(is_bsc(make_reverse_z(0.3)));
  CHECK(is_reverse_z(make_reverse_z(0.8), &v));
  CHECK(v == doctest::Approx(0.8).epsilon(1e-14));
  CHECK_FALSE(is_reverse_z(make_bsc(0.2)));
  // general spec numerically equal to a bsc is still detected
  Dmc g({0.7, 0.3}, {0.3, 0.7});
  CHECK(is_bsc(g, &v));
  CHECK(v == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("sampling tracks the row law") {
  RngStream rng(12345);
  Dmc ch = make_bsc(0.3);
  const int trials = 100000;
  int ones = 0;
  for (int i = 0; i < trials; ++i) ones += ch.sample(0, rng);
  const double frac = static_cast<double>(ones) / trials;
  // 4 sigma band around 0.3, sigma ~ 0.00145
  CHECK(frac > 0.294);
  CHECK(frac < 0.306);

  Dmc rz = make_reverse_z(0.8);
  for (int i = 0; i < 1000; ++i) CHECK(rz.sample(1, rng) == 1);
}

TEST_CASE("display strings") {
  CHECK(channel_spec_bsc(0.2).display() == "bsc(0.2)");
  CHECK(channel_spec_reverse_z(0.8).display() == "reverse_z(0.8)");
  CHECK(channel_spec_general({0.5, 0.25, 0.25}, {0.1, 0.2, 0.7}).display() ==
        "general");
}

TEST_CASE("derived trial streams are reproducible and distinct") {
  RngStream a = RngStream::derive(7, 100, 0);
  RngStream a2 = RngStream::derive(7, 100, 0);
  for (int i = 0; i < 8; ++i) CHECK(a.next_u64() == a2.next_u64());

  RngStream b = RngStream::derive(7, 100, 1);
  RngStream c = RngStream::derive(7, 200, 0);
  RngStream base = RngStream::derive(7, 100, 0);
  bool differs_trial = false, differs_n = false;
  for (int i = 0; i < 8; ++i) {
    const std::uint64_t x = base.next_u64();
    differs_trial |= (x != b.next_u64());
    differs_n |= (x != c.next_u64());
  }
  CHECK(differs_trial);
  CHECK(differs_n);
}

TEST_CASE("uniform doubles land in the unit interval") {
  RngStream rng(99);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));
}

}  // TEST_SUITE
