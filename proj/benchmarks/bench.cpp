#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "gen.hpp"
#include "tapo/derivation.hpp"
#include "tapo/parse.hpp"
#include "tapo/presheaf.hpp"
#include "tapo/scenario.hpp"

using namespace tapo;

namespace {

KnowledgeBase fixture(const std::string& name) {
  std::ifstream in(std::string(TAPO_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kb(ss.str());
}

void BM_Saturate(benchmark::State& st) {
  gen::Rng rng(1);
  auto v = gen::vocab(static_cast<std::size_t>(st.range(0)), 6, 2);
  auto s = gen::state(rng, v, static_cast<std::size_t>(st.range(0)) * 3, 4, 2);
  for (auto _ : st) benchmark::DoNotOptimize(saturate(s, 16));
}
BENCHMARK(BM_Saturate)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_EvalProgram(benchmark::State& st) {
  gen::Rng rng(2);
  auto v = gen::vocab(4, 4, 1);
  auto s = gen::state(rng, v, 6, 2, 1);
  auto atoms = gen::atoms(rng, v, 4);
  auto p = gen::program(rng, v, atoms, static_cast<std::size_t>(st.range(0)));
  StateDerivedProvider prov;
  for (auto _ : st) {
    prov.reset();
    benchmark::DoNotOptimize(eval_program(s, p, prov, 200));
  }
}
BENCHMARK(BM_EvalProgram)->DenseRange(2, 6, 2);

void BM_DeriveAndCheck(benchmark::State& st) {
  gen::Rng rng(3);
  auto v = gen::vocab(4, 4, 1);
  auto s = gen::state(rng, v, 6, 2, 1);
  auto atoms = gen::atoms(rng, v, 4);
  auto p = gen::program(rng, v, atoms, 5);
  StateDerivedProvider prov;
  CheckEnv env{{{prov.name(), &prov}}, {}, 200, 32};
  for (auto _ : st) {
    auto t = derive_transition(s, p, prov, 200);
    if (t) benchmark::DoNotOptimize(check_derivation(*t, env));
  }
}
BENCHMARK(BM_DeriveAndCheck);

void BM_OracleTransition(benchmark::State& st) {
  gen::Rng rng(4);
  auto v = gen::vocab(4, 4, 1);
  auto s = gen::state(rng, v, 6, 3, 1);
  auto f = gen::frame(rng, v, "f", 4, false);
  auto q = f.queries.begin()->first;
  for (auto _ : st) benchmark::DoNotOptimize(oracle_transition(f, s, q));
}
BENCHMARK(BM_OracleTransition);

void BM_Glue(benchmark::State& st) {
  auto fam = StateFamily::from(fixture("family-diamond.tapo"));
  for (auto _ : st) benchmark::DoNotOptimize(glue(fam, "U", {"V1", "V2"}));
}
BENCHMARK(BM_Glue);

void BM_Functoriality(benchmark::State& st) {
  auto fam = StateFamily::from(fixture("family-chain.tapo"));
  for (auto _ : st) benchmark::DoNotOptimize(check_functoriality(fam));
}
BENCHMARK(BM_Functoriality);

void BM_CurryScenario(benchmark::State& st) {
  auto sc = load_scenario(std::string(TAPO_FIXTURES) + "/curry-v.yaml");
  for (auto _ : st) benchmark::DoNotOptimize(run_scenario(sc));
}
BENCHMARK(BM_CurryScenario);

}  // namespace
BENCHMARK_MAIN();
