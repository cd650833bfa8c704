#include "lscsim/eesl.hpp"
#include "lscsim/engine.hpp"
#include "lscsim/justify.hpp"
#include "lscsim/model.hpp"
#include "lscsim/playtree.hpp"

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const lsc::SystemModel& weborder_model() {
  static lsc::SystemModel model =
      lsc::parse_model(read_file(std::string(LSCSIM_FIXTURE_DIR) + "/weborder.lsc"));
  return model;
}

lsc::Grammar weborder_grammar() {
  const lsc::SystemModel& model = weborder_model();
  std::set<std::string> alphabet(model.external_events.begin(),
                                 model.external_events.end());
  lsc::AstPtr ast =
      lsc::parse_eesl("(createOrder.(createAbort+createConfirm))*", alphabet);
  return lsc::compile_to_grammar(lsc::desugar(ast));
}

void BM_ParseModel(benchmark::State& state) {
  std::string text = read_file(std::string(LSCSIM_FIXTURE_DIR) + "/weborder.lsc");
  for (auto _ : state) {
    lsc::SystemModel model = lsc::parse_model(text);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_ParseModel);

void BM_CompileGrammar(benchmark::State& state) {
  std::set<std::string> alphabet = {"createOrder", "createAbort", "createConfirm"};
  lsc::AstPtr ast =
      lsc::parse_eesl("(createOrder.(createAbort||createConfirm))*", alphabet);
  lsc::AstPtr desugared = lsc::desugar(lsc::apply_testing_mode(ast));
  for (auto _ : state) {
    lsc::Grammar g = lsc::compile_to_grammar(desugared);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_CompileGrammar);

void BM_Superstep(benchmark::State& state) {
  const lsc::SystemModel& model = weborder_model();
  lsc::SimState init = lsc::initial_state(model);
  for (auto _ : state) {
    auto states = lsc::superstep(model, init, "createOrder");
    benchmark::DoNotOptimize(states);
  }
}
BENCHMARK(BM_Superstep);

void BM_CheckConsistency(benchmark::State& state) {
  const lsc::SystemModel& model = weborder_model();
  lsc::Grammar grammar = weborder_grammar();
  for (auto _ : state) {
    lsc::Verdict v = lsc::check_consistency(model, grammar);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_CheckConsistency);

void BM_BuildGraph(benchmark::State& state) {
  const lsc::SystemModel& model = weborder_model();
  lsc::Grammar grammar = weborder_grammar();
  for (auto _ : state) {
    lsc::TransitionGraph g = lsc::build_transition_graph(model, grammar);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_BuildGraph);

}  // namespace

BENCHMARK_MAIN();
