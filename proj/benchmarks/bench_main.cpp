#include <benchmark/benchmark.h>

#include <random>

#include "bittrunc/bitcore.hpp"
#include "bittrunc/memsim.hpp"
#include "bittrunc/tensortrunc.hpp"
#include "bittrunc/videopipe.hpp"

using namespace bittrunc;

namespace {

std::vector<std::uint32_t> random_words(std::size_t n) {
  std::mt19937 rng(1);
  std::vector<std::uint32_t> out(n);
  for (auto& w : out) w = rng();
  return out;
}

video::FramePlanar420 noise_frame(unsigned w, unsigned h) {
  auto f = video::FramePlanar420::filled(w, h, 0);
  std::mt19937 rng(2);
  for (auto& v : f.y) v = static_cast<std::uint8_t>(rng());
  return f;
}

void BM_TruncateWord(benchmark::State& state) {
  const auto words = random_words(4096);
  const auto spec = TruncationSpec::word(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    std::uint32_t acc = 0;
    for (auto w : words) acc ^= apply_truncation_word(w, spec);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_TruncateWord)->Arg(3)->Arg(17);

void BM_TruncateByteMode(benchmark::State& state) {
  const auto words = random_words(4096);
  const auto spec = TruncationSpec::byte(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    std::uint32_t acc = 0;
    for (auto w : words) acc ^= apply_truncation_word(w, spec);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_TruncateByteMode)->Arg(4);

void BM_BruteForceBestFill(benchmark::State& state) {
  const auto set = TruncationIndexSet::contiguous(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_best_fill(set).min_sse);
}
BENCHMARK(BM_BruteForceBestFill)->Arg(6)->Arg(10);

void BM_MemsimReadWrite(benchmark::State& state) {
  memsim::MemoryArray m(1024);
  const auto words = random_words(1024);
  m.set_truncation(TruncationSpec::byte(3));
  for (auto _ : state) {
    for (std::size_t a = 0; a < words.size(); ++a) m.write_word(a, words[a]);
    std::uint32_t acc = 0;
    for (std::size_t a = 0; a < words.size(); ++a) acc ^= m.read_word(a).bits;
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 2 * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_MemsimReadWrite);

void BM_Ssim(benchmark::State& state) {
  const auto a = noise_frame(352, 288);
  auto b = a;
  for (auto& v : b.y) v = apply_truncation_byte(v, 3);
  for (auto _ : state) benchmark::DoNotOptimize(video::ssim(a, b));
}
BENCHMARK(BM_Ssim);

void BM_ApplyPolicy(benchmark::State& state) {
  video::VideoClip clip{352, 288, 30.0, {noise_frame(352, 288)}};
  const auto decision = video::decide_luminance(clip, video::LuminanceCondition::Sunlight);
  for (auto _ : state) benchmark::DoNotOptimize(video::apply_policy(clip, decision, 1).frames.size());
}
BENCHMARK(BM_ApplyPolicy);

void BM_TruncateTensor(benchmark::State& state) {
  const auto t = tensor::normal_tensor({1u << 20}, 3);
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tensor::truncate_tensor(t, 17, NonFinitePolicy::Preserve, threads).size());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}
BENCHMARK(BM_TruncateTensor)->Arg(1)->Arg(0)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
