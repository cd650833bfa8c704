#include "lscsim/eesl.hpp"
#include "lscsim/engine.hpp"
#include "lscsim/justify.hpp"
#include "lscsim/model.hpp"
#include "lscsim/playtree.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

struct CheckArgs {
  std::string model_path;
  std::string eesl_text;
  std::string eesl_path;
  bool eesl_given = false;
  bool testing = false;
  std::string ctl_mode;
  std::string property;
  std::string dot_path;
  int max_internal_steps = 10000;
};

// Exit codes: 0 consistent, 1 inconsistent, 2 usage or input error,
// 3 divergence (unbounded internal activity).
enum ExitCode { kConsistent = 0, kInconsistent = 1, kInputError = 2, kDiverged = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_check(const CheckArgs& args) {
  if (!args.ctl_mode.empty()) {
    if (!args.testing) {
      std::cerr << "error: --ctl requires --testing\n";
      return kInputError;
    }
    if (args.property.empty()) {
      std::cerr << "error: --ctl requires --property\n";
      return kInputError;
    }
  }

  lsc::SystemModel model;
  lsc::Grammar grammar;
  try {
    model = lsc::parse_model(read_file(args.model_path));
    auto diags = lsc::validate_model(model);
    if (!diags.empty()) {
      for (const auto& d : diags)
        std::cerr << "error: " << d.pos.line << ":" << d.pos.col << ": " << d.message << "\n";
      return kInputError;
    }

    std::string text = args.eesl_text;
    if (!args.eesl_given && !args.eesl_path.empty()) text = read_file(args.eesl_path);

    std::set<std::string> alphabet(model.external_events.begin(), model.external_events.end());
    lsc::AstPtr ast = lsc::parse_eesl(text, alphabet);
    if (args.testing) ast = lsc::apply_testing_mode(ast);
    grammar = lsc::compile_to_grammar(lsc::desugar(ast));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  lsc::PlayOptions opt;
  opt.engine.max_internal_steps = args.max_internal_steps;
  try {
    lsc::Verdict verdict = lsc::check_consistency(model, grammar, opt);
    if (!verdict.consistent) {
      std::cout << "INCONSISTENT\n";
      std::cout << "trace: " << lsc::format_trace(verdict.trace) << "\n";
      return kInconsistent;
    }
    std::cout << "CONSISTENT\n";
    if (verdict.open_ended_runs > 0)
      std::cerr << "note: " << verdict.open_ended_runs
                << " run(s) ended with charts still active\n";

    if (!args.ctl_mode.empty() || !args.dot_path.empty()) {
      lsc::TransitionGraph graph = lsc::build_transition_graph(model, grammar, opt.engine);
      if (!args.ctl_mode.empty()) {
        lsc::CtlQuery query;
        query.mode = args.ctl_mode == "AG" ? lsc::CtlQuery::Mode::AG : lsc::CtlQuery::Mode::EF;
        query.property = args.property;
        bool holds = lsc::eval_ctl(graph, query);
        std::cout << args.ctl_mode << ": " << (holds ? "true" : "false") << "\n";
      }
      if (!args.dot_path.empty()) {
        std::ofstream out(args.dot_path, std::ios::binary);
        if (!out) {
          std::cerr << "error: cannot write file: " << args.dot_path << "\n";
          return kInputError;
        }
        out << lsc::emit_dot(graph);
      }
    }
    return kConsistent;
  } catch (const lsc::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Live sequence chart simulator and consistency checker"};
  app.require_subcommand(1);

  CheckArgs args;
  CLI::App* check = app.add_subcommand(
      "check", "Check the charts of a model against an input language");
  check->add_option("--model", args.model_path, "Model file")->required();
  check->add_option("--eesl", args.eesl_text,
                    "Input language expression (wins over --eesl-file)");
  check->add_option("--eesl-file", args.eesl_path, "File holding the expression");
  check->add_flag("--testing", args.testing,
                  "Insert stability probes before external events");
  check->add_option("--ctl", args.ctl_mode, "Evaluate a query over the superstate graph")
      ->check(CLI::IsMember({"AG", "EF"}));
  check->add_option("--property", args.property, "Testing chart named by the query");
  check->add_option("--dot", args.dot_path, "Write the superstate graph in DOT format");
  check->add_option("--max-internal-steps", args.max_internal_steps,
                    "Bound on internal steps per superstep")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  args.eesl_given = check->count("--eesl") > 0;
  if (!args.eesl_given && args.eesl_path.empty()) {
    std::cerr << "error: one of --eesl or --eesl-file is required\n";
    return kInputError;
  }
  return run_check(args);
}
