#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "relaylearn/channel.hpp"
#include "relaylearn/exponent.hpp"
#include "relaylearn/rng.hpp"

using namespace relay;

namespace {

// Frozen reference values computed with 50-digit arithmetic.
constexpr double kKlHalf02 = 0.223143551314209756;
constexpr double kKlHalf03 = 0.0871766935723888764;
constexpr double kKl035_02 = 0.06089993867153895;
constexpr double kKl03_02 = 0.02816755759528336;
constexpr double kLnInv07 = 0.3566749439387324;
constexpr double kMu2HalfBsc02 = 1.9218120556728056;  // ln(4)^2

// Full-support random channel with all entries bounded away from zero so
// finite-difference tolerances stay honest.
Dmc random_gentle_channel(RngStream& rng, int outputs) {
  std::vector<double> r0(outputs), r1(outputs);
  while (true) {
    double s0 = 0.0, s1 = 0.0;
    for (int i = 0; i < outputs; ++i) {
      r0[i] = 0.5 + rng.next_double();
      r1[i] = 0.5 + rng.next_double();
      s0 += r0[i];
      s1 += r1[i];
    }
    bool distinct = false;
    for (int i = 0; i < outputs; ++i) {
      r0[i] /= s0;
      r1[i] /= s1;
      if (std::abs(r0[i] - r1[i]) > 1e-3) distinct = true;
    }
    if (distinct) return Dmc(r0, r1);
  }
}

std::vector<double> random_pmf(RngStream& rng, int m) {
  std::vector<double> v(m);
  double s = 0.0;
  for (double& x : v) {
    x = 0.05 + rng.next_double();
    s += x;
  }
  for (double& x : v) x /= s;
  return v;
}

}  // namespace

TEST_SUITE("exponent") {

TEST_CASE("binary kl reference values") {
  CHECK(binary_kl(0.5, 0.2) == doctest::Approx(kKlHalf02).epsilon(1e-14));
  CHECK(binary_kl(0.5, 0.3) == doctest::Approx(kKlHalf03).epsilon(1e-14));
  CHECK(binary_kl(0.35, 0.2) == doctest::Approx(kKl035_02).epsilon(1e-13));
  CHECK(binary_kl(0.3, 0.2) == doctest::Approx(kKl03_02).epsilon(1e-13));
  CHECK(binary_kl(0.3, 0.3) == doctest::Approx(0.0));
  CHECK(binary_kl(0.0, 0.4) == doctest::Approx(-std::log(0.6)).epsilon(1e-14));
  CHECK_THROWS(binary_kl(0.5, 0.0));
  CHECK_THROWS(binary_kl(1.5, 0.2));
}

TEST_CASE("one-hop rate of a bsc is the symmetric kl") {
  for (double p : {0.1, 0.2, 0.3, 0.45}) {
    ExponentReport r = one_hop_rate(make_bsc(p));
    CHECK(r.rate == doctest::Approx(binary_kl(0.5, p)).epsilon(1e-9));
    CHECK(r.s_star == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.rate == -r.mu_star);
    CHECK_FALSE(r.at_endpoint);
  }
}

TEST_CASE("one-hop rate of a reverse-z sits at the s=0 endpoint") {
  ExponentReport r = one_hop_rate(make_reverse_z(0.7));
  CHECK(r.rate == doctest::Approx(kLnInv07).epsilon(1e-10));
  CHECK(r.at_endpoint);
  CHECK(r.s_star == doctest::Approx(0.0).epsilon(1e-8));
  ExponentReport r8 = one_hop_rate(make_reverse_z(0.8));
  CHECK(r8.rate == doctest::Approx(-std::log(0.8)).epsilon(1e-10));
}

TEST_CASE("disjoint-support rows give an infinite one-hop rate") {
  Dmc noiseless({1.0, 0.0}, {0.0, 1.0});
  TiltedFamily t(noiseless);
  CHECK(t.common_support_empty());
  CHECK(one_hop_rate(noiseless).rate ==
        std::numeric_limits<double>::infinity());
  CHECK_THROWS(t.mu_prime(0.5));
}

TEST_CASE("tilted family endpoints, negativity, convexity") {
  RngStream rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    Dmc ch = random_gentle_channel(rng, 2 + static_cast<int>(rng.next_u64() % 3));
    TiltedFamily t(ch);
    CHECK(std::abs(t.mu(0.0)) < 1e-12);
    CHECK(std::abs(t.mu(1.0)) < 1e-12);
    double prev2 = t.mu(0.0), prev1 = t.mu(1e-3);
    for (int i = 2; i <= 1000; ++i) {
      const double cur = t.mu(i * 1e-3);
      CHECK(cur <= 1e-12);
      CHECK(prev2 - 2.0 * prev1 + cur >= -1e-9);  // discrete convexity
      prev2 = prev1;
      prev1 = cur;
    }
  }
}

TEST_CASE("tilted derivatives match central differences") {
  RngStream rng(77);
  const double h = 2.5e-4;
  for (int trial = 0; trial < 10; ++trial) {
    Dmc ch = random_gentle_channel(rng, 3);
    TiltedFamily t(ch);
    for (int i = 1; i <= 9; ++i) {
      const double s = 0.1 * i;
      const double fd1 = (t.mu(s + h) - t.mu(s - h)) / (2.0 * h);
      const double fd2 = (t.mu(s + h) - 2.0 * t.mu(s) + t.mu(s - h)) / (h * h);
      CHECK(std::abs(t.mu_prime(s) - fd1) < 1e-6);
      CHECK(std::abs(t.mu_double_prime(s) - fd2) < 1e-6);
    }
  }
}

TEST_CASE("bsc tilted variance at the symmetric point") {
  TiltedFamily t(make_bsc(0.2));
  CHECK(t.mu_double_prime(0.5) ==
        doctest::Approx(kMu2HalfBsc02).epsilon(1e-12));
}

TEST_CASE("rho tensorizes over products") {
  RngStream rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 3);
    std::vector<double> a = random_pmf(rng, m), b = random_pmf(rng, m);
    std::vector<double> aa(m * m), bb(m * m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        aa[i * m + j] = a[i] * a[j];
        bb[i * m + j] = b[i] * b[j];
      }
    }
    for (double s : {0.0, 0.2, 0.5, 0.8, 1.0}) {
      const double r = rho_s(a, b, s);
      CHECK(rho_s(aa, bb, s) == doctest::Approx(r * r).epsilon(1e-12));
    }
  }
}

TEST_CASE("mixture inequalities in both arguments") {
  RngStream rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_u64() % 4);
    const int parts = 2 + static_cast<int>(rng.next_u64() % 3);
    std::vector<std::vector<double>> comp;
    for (int i = 0; i < parts; ++i) comp.push_back(random_pmf(rng, m));
    std::vector<double> w = random_pmf(rng, parts);
    std::vector<double> mix(m, 0.0);
    for (int i = 0; i < parts; ++i) {
      for (int j = 0; j < m; ++j) mix[j] += w[i] * comp[i][j];
    }
    std::vector<double> other = random_pmf(rng, m);
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      // mixture in the first slot: exponent 1-s
      double upper = 0.0, lowest = 1e300;
      for (int i = 0; i < parts; ++i) {
        const double r = rho_s(comp[i], other, s);
        upper += std::pow(w[i], 1.0 - s) * r;
        lowest = std::min(lowest, r);
      }
      const double r_mix = rho_s(mix, other, s);
      CHECK(r_mix <= upper + 1e-12);
      CHECK(r_mix >= lowest - 1e-12);
      // mixture in the second slot: exponent s
      upper = 0.0;
      lowest = 1e300;
      for (int i = 0; i < parts; ++i) {
        const double r = rho_s(other, comp[i], s);
        upper += std::pow(w[i], s) * r;
        lowest = std::min(lowest, r);
      }
      const double r_mix2 = rho_s(other, mix, s);
      CHECK(r_mix2 <= upper + 1e-12);
      CHECK(r_mix2 >= lowest - 1e-12);
    }
  }
}

TEST_CASE("two-hop rate of nested bscs equals the weaker hop") {
  ExponentReport r = two_hop_rate(make_bsc(0.2), make_bsc(0.3));
  CHECK(r.rate == doctest::Approx(binary_kl(0.5, 0.3)).epsilon(1e-9));
  CHECK(r.s_star == doctest::Approx(0.5).epsilon(1e-6));

  ExponentReport sym = two_hop_rate(make_bsc(0.3), make_bsc(0.2));
  CHECK(sym.rate == doctest::Approx(r.rate).epsilon(1e-12));
}

TEST_CASE("two-hop never beats either single hop") {
  RngStream rng(555);
  for (int trial = 0; trial < 10; ++trial) {
    Dmc P = random_gentle_channel(rng, 2);
    Dmc Q = random_gentle_channel(rng, 3);
    const double two = two_hop_rate(P, Q).rate;
    CHECK(two <= one_hop_rate(P).rate + 1e-12);
    CHECK(two <= one_hop_rate(Q).rate + 1e-12);
    CHECK(two_hop_rate_flipped(P, Q).rate >= two - 1e-12);
  }
}

TEST_CASE("golden-section minima agree with a fine grid") {
  struct Pair {
    Dmc P, Q;
  };
  const Pair pairs[] = {
      {make_bsc(0.2), make_bsc(0.3)},
      {make_bsc(0.2), make_reverse_z(0.8)},
      {make_bsc(0.35), make_bsc(0.35)},
  };
  for (const auto& pr : pairs) {
    TiltedFamily tp(pr.P), tq(pr.Q);
    double grid_min = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      grid_min = std::min(grid_min,
                          std::max(tp.mu(i * 1e-4), tq.mu(i * 1e-4)));
    }
    const double mu_star = two_hop_rate(pr.P, pr.Q).mu_star;
    CHECK(mu_star <= grid_min + 1e-10);
    CHECK(mu_star >= grid_min - 1e-4);
  }
}

TEST_CASE("flipped orientation matches for symmetric channels") {
  ExponentReport a = two_hop_rate(make_bsc(0.2), make_reverse_z(0.8));
  ExponentReport b = two_hop_rate_flipped(make_bsc(0.2), make_reverse_z(0.8));
  CHECK(b.rate == doctest::Approx(a.rate).epsilon(1e-9));
}

TEST_CASE("trivial converse is the weaker one-hop rate") {
  ExponentReport r = trivial_converse(make_bsc(0.2), make_reverse_z(0.8));
  const double expect = std::min(one_hop_rate(make_bsc(0.2)).rate,
                                 one_hop_rate(make_reverse_z(0.8)).rate);
  CHECK(r.rate == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.rate >= two_hop_rate(make_bsc(0.2), make_reverse_z(0.8)).rate);
}

TEST_CASE("mirror-dominance check accepts symmetric kinds, rejects a plain z") {
  CHECK(assumption1_holds(make_bsc(0.2)));
  CHECK(assumption1_holds(make_bsc(0.45)));
  CHECK(assumption1_holds(make_reverse_z(0.8)));
  // input 0 noiseless, input 1 leaks: the mirrored curve dominates instead
  Dmc plain_z({1.0, 0.0}, {0.2, 0.8});
  CHECK_FALSE(assumption1_holds(plain_z));
}

TEST_CASE("restricted converse exists only under mirror dominance") {
  auto r = block_converse(make_bsc(0.2), make_reverse_z(0.8));
  REQUIRE(r.has_value());
  CHECK(r->rate == doctest::Approx(
                       two_hop_rate(make_bsc(0.2), make_reverse_z(0.8)).rate)
                       .epsilon(1e-6));
  CHECK(r->s_star <= 0.5 + 1e-9);

  Dmc plain_z({1.0, 0.0}, {0.2, 0.8});
  CHECK_FALSE(block_converse(make_bsc(0.2), plain_z).has_value());
  CHECK_FALSE(block_converse(plain_z, make_bsc(0.2)).has_value());
}

TEST_CASE("fixed-split converse endpoints reduce to one-hop rates") {
  Dmc P = make_bsc(0.2);
  Dmc Q = make_reverse_z(0.8);
  CHECK(e1_exponent(P, Q, 0.0).rate ==
        doctest::Approx(one_hop_rate(Q).rate).epsilon(1e-9));
  CHECK(e1_exponent(P, Q, 1.0).rate ==
        doctest::Approx(one_hop_rate(P).rate).epsilon(1e-9));
  CHECK_THROWS(e1_exponent(P, Q, -0.1));
  CHECK_THROWS(e1_exponent(P, Q, 1.1));
}

TEST_CASE("fixed-split converse stays above the two-hop rate") {
  Dmc P = make_bsc(0.2);
  Dmc Q = make_reverse_z(0.8);
  const double two = two_hop_rate(P, Q).rate;
  for (int i = 0; i <= 20; ++i) {
    CHECK(e1_exponent(P, Q, i / 20.0).rate >= two - 1e-9);
  }
}

TEST_CASE("balanced split closes the gap to the two-hop rate") {
  struct Pair {
    Dmc P, Q;
  };
  const Pair pairs[] = {
      {make_bsc(0.2), make_reverse_z(0.8)},
      {make_bsc(0.2), make_bsc(0.3)},
      {make_bsc(0.25), make_bsc(0.25)},
      {make_reverse_z(0.8), make_bsc(0.2)},
  };
  for (const auto& pr : pairs) {
    GammaSplit split = gamma_balanced(pr.P, pr.Q);
    CHECK(split.gamma >= 0.0);
    CHECK(split.gamma <= 1.0);
    const double at_split = e1_exponent(pr.P, pr.Q, split.gamma).rate;
    CHECK(at_split ==
          doctest::Approx(two_hop_rate(pr.P, pr.Q).rate).epsilon(1e-6));
  }
  // equal channels settle on a pure split
  GammaSplit eq = gamma_balanced(make_bsc(0.25), make_bsc(0.25));
  CHECK(eq.kind == GammaSplit::Case::DominantP);
  CHECK(eq.gamma == 1.0);
  // the wider bsc dominates, so all time goes to the other hop
  GammaSplit dom = gamma_balanced(make_bsc(0.2), make_bsc(0.3));
  CHECK(dom.kind == GammaSplit::Case::DominantQ);
  CHECK(dom.gamma == 0.0);
}

TEST_CASE("feedback strategy exponent is flat for the matched pair") {
  for (int i = 0; i <= 20; ++i) {
    const double g = i / 20.0;
    CHECK(feedback_exponent_bsc_rz(0.2, 0.8, g) ==
          doctest::Approx(kKlHalf02).epsilon(1e-12));
  }
  // generic pair: linear interpolation between the two pure rates
  CHECK(feedback_exponent_bsc_rz(0.3, 0.7, 0.25) ==
        doctest::Approx(0.25 * binary_kl(0.5, 0.3) + 0.75 * kLnInv07)
            .epsilon(1e-12));
}

TEST_CASE("two-round exponent covers exactly the closed-form cases") {
  Dmc P = make_bsc(0.2);
  Dmc Qbsc = make_bsc(0.3);
  Dmc Qrz = make_reverse_z(0.8);

  auto fb = two_round_exponent(P, Qrz, 0.4);
  REQUIRE(fb.has_value());
  CHECK(*fb == doctest::Approx(feedback_exponent_bsc_rz(0.2, 0.8, 0.4))
                   .epsilon(1e-12));

  auto same = two_round_exponent(P, Qbsc, 0.4);
  REQUIRE(same.has_value());
  CHECK(*same == doctest::Approx(e1_exponent(P, Qbsc, 0.4).rate)
                     .epsilon(1e-12));

  CHECK_FALSE(two_round_exponent(make_reverse_z(0.8), Qrz, 0.4).has_value());
}

TEST_CASE("single-hop floor formula and monotonicity") {
  Dmc P = make_bsc(0.2);
  TiltedFamily t(P);
  const double expected =
      0.125 * std::exp(100.0 * -binary_kl(0.5, 0.2) -
                       std::sqrt(2.0 * 100.0 * t.mu_double_prime(0.5)));
  CHECK(sgb_lower_bound(P, 100) == doctest::Approx(expected).epsilon(1e-9));
  CHECK_THROWS(sgb_lower_bound(P, 0));
  double prev = sgb_lower_bound(P, 50);
  for (long n = 100; n <= 1000; n += 50) {
    const double cur = sgb_lower_bound(P, n);
    CHECK(cur < prev);
    prev = cur;
  }
}

}  // TEST_SUITE
