#include <benchmark/benchmark.h>

#include <limits>
#include <vector>

#include "relaylearn/channel.hpp"
#include "relaylearn/decoder.hpp"
#include "relaylearn/exponent.hpp"
#include "relaylearn/harness.hpp"
#include "relaylearn/protocol.hpp"
#include "relaylearn/rng.hpp"

using namespace relay;

namespace {

std::vector<int> random_block(int k, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<int> w(k);
  for (int& v : w) v = rng.next_bit();
  return w;
}

void bm_block_llr_fast(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ProtocolSpec spec = make_protocol_spec(
      ProtocolKind::BscBlock, k, channel_spec_bsc(0.25),
      channel_spec_bsc(0.25));
  const BlockLlrTables tables = make_block_tables(spec);
  const std::vector<int> w = random_block(k, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(block_llr_fast(w, tables));
  }
  state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(bm_block_llr_fast)->Arg(8)->Arg(64)->Arg(256)->Arg(1024);

void bm_block_llr_naive(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const ProtocolSpec spec = make_protocol_spec(
      ProtocolKind::BscBlock, k, channel_spec_bsc(0.25),
      channel_spec_bsc(0.25));
  const BlockLlrTables tables = make_block_tables(spec);
  const std::vector<int> w = random_block(k, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(block_llr_naive(w, tables));
  }
  state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(bm_block_llr_naive)->Arg(8)->Arg(64)->Arg(256)->Arg(1024);

void bm_build_llr_distribution(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Dmc ch({0.5, 0.3, 0.2}, {0.1, 0.3, 0.6});
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_llr_distribution(ch, k));
  }
}
BENCHMARK(bm_build_llr_distribution)->Arg(8)->Arg(32)->Arg(128);

void bm_two_hop_rate(benchmark::State& state) {
  const Dmc P = make_bsc(0.2);
  const Dmc Q = make_reverse_z(0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(two_hop_rate(P, Q));
  }
}
BENCHMARK(bm_two_hop_rate);

void bm_e1_exponent(benchmark::State& state) {
  const Dmc P = make_bsc(0.2);
  const Dmc Q = make_reverse_z(0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(e1_exponent(P, Q, 0.4));
  }
}
BENCHMARK(bm_e1_exponent);

void bm_run_point(benchmark::State& state) {
  ExperimentConfig c{
      make_protocol_spec(ProtocolKind::BscBlock, 8, channel_spec_bsc(0.3),
                         channel_spec_bsc(0.3)),
      DecoderKind::BlockMl,
      std::numeric_limits<double>::quiet_NaN(),
      {64},
      2000,
      1,
      50,
      1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_point(c, 64));
  }
  state.SetItemsProcessed(state.iterations() * c.trials);
}
BENCHMARK(bm_run_point)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
