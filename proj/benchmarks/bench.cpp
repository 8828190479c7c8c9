#include <benchmark/benchmark.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pft/compiler.hpp"
#include "pft/kernel.hpp"
#include "pft/model.hpp"
#include "pft/parse.hpp"
#include "pft/schema.hpp"
#include "pft/scripts.hpp"
#include "random_formulas.hpp"

using namespace pft;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::filesystem::path(PFT_CORPUS_DIR) / name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BM_CheckEquiv(benchmark::State& st) {
  EquivDef e = corpus_equiv(st.range(0) == 0 ? "blv_equiv" : "hp_equiv");
  for (auto _ : st) benchmark::DoNotOptimize(check_equiv(e, 3).class_count);
}
BENCHMARK(BM_CheckEquiv)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SearchAbstraction(benchmark::State& st) {
  EquivDef e = corpus_equiv("hp_equiv");
  const int d = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(search_abstraction(e, d).searched);
}
BENCHMARK(BM_SearchAbstraction)->DenseRange(1, 3)->Unit(benchmark::kMicrosecond);

void BM_ParseDerivation(benchmark::State& st) {
  std::string text = slurp("russell.prf");
  for (auto _ : st) benchmark::DoNotOptimize(parse_derivation(text).lines.size());
  st.SetBytesProcessed(static_cast<int64_t>(st.iterations() * text.size()));
}
BENCHMARK(BM_ParseDerivation)->Unit(benchmark::kMillisecond);

void BM_CheckRussell(benchmark::State& st) {
  Derivation d = parse_derivation(slurp("russell.prf"));
  for (auto _ : st) benchmark::DoNotOptimize(check(d, TheoryId{TheoryKind::PFTStar}, Registry(1)).ok);
  st.counters["lines"] = static_cast<double>(d.lines.size());
}
BENCHMARK(BM_CheckRussell)->Unit(benchmark::kMillisecond);

void BM_CompileGx(benchmark::State& st) {
  Formula phi = parse_formula("(pred G x)", {}, {false, {}});
  for (auto _ : st) benchmark::DoNotOptimize(compile(phi, 1).equivalences.size());
}
BENCHMARK(BM_CompileGx)->Unit(benchmark::kMillisecond);

void BM_ValidateFoComp(benchmark::State& st) {
  testing::FormulaGen gen(3);
  std::vector<Formula> inst;
  for (int i = 0; i < 100; ++i)
    inst.push_back(fo_comp_instance(gen.formula(3, true), std::vector<Var>{Var::obj("x")}, Var::conc("R", 1)));
  for (auto _ : st) benchmark::DoNotOptimize(validate_instances(inst, 2).ok());
}
BENCHMARK(BM_ValidateFoComp)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
