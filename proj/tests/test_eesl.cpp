#include "lscsim/eesl.hpp"

#include "doctest.h"
#include "oracles.hpp"

using namespace lsc;
using oracle::Word;
using oracle::WordSet;

namespace {

const std::set<std::string> kAbc = {"a", "b", "c"};
const std::set<std::string> kOrderEvents = {"createOrder", "createAbort",
                                            "createConfirm"};

std::string dump_of(const std::string& expr, const std::set<std::string>& alphabet) {
  return compile_to_grammar(desugar(parse_eesl(expr, alphabet))).dump();
}

}  // namespace

TEST_CASE("operator spellings are interchangeable") {
  auto utf8 = parse_eesl("(createOrder·(createAbort+createConfirm))*", kOrderEvents);
  auto ascii = parse_eesl("(createOrder.(createAbort+createConfirm))*", kOrderEvents);
  CHECK(ast_to_string(utf8) == ast_to_string(ascii));

  CHECK(ast_to_string(parse_eesl("a‖b", kAbc)) == ast_to_string(parse_eesl("a||b", kAbc)));
  CHECK(ast_to_string(parse_eesl("⟨a⟩", kAbc)) == ast_to_string(parse_eesl("<a>", kAbc)));
  CHECK(ast_to_string(parse_eesl("λ", kAbc)) == ast_to_string(parse_eesl("", kAbc)));
}

TEST_CASE("precedence binds star, then concatenation, then shuffle, then union") {
  CHECK(ast_to_string(parse_eesl("a+b.c*", kAbc)) == "a+b·c*");
  CHECK(ast_to_string(parse_eesl("a||b+c", kAbc)) == "a‖b+c");
  CHECK(ast_to_string(parse_eesl("a.b||c", kAbc)) == "a·b‖c");
  CHECK(ast_to_string(parse_eesl("(a+b).c", kAbc)) == "(a+b)·c");
  CHECK(ast_to_string(parse_eesl("(a)", kAbc)) == "(a)");

  AstPtr left_nested = parse_eesl("a.b.c", kAbc);
  REQUIRE(left_nested->kind == AstNode::Kind::Concat);
  CHECK(left_nested->left->kind == AstNode::Kind::Concat);
}

TEST_CASE("parse errors and alphabet violations are reported") {
  CHECK_THROWS_AS(parse_eesl("x", kAbc), SemanticError);
  CHECK_THROWS_AS(parse_eesl("a)", kAbc), ParseError);
  CHECK_THROWS_AS(parse_eesl("a+", kAbc), ParseError);
  CHECK_THROWS_AS(parse_eesl("(a", kAbc), ParseError);
  CHECK_THROWS_AS(parse_eesl("⟨a+b⟩", kAbc), ParseError);
  // Markers are always part of the vocabulary.
  CHECK_NOTHROW(parse_eesl("beginP.a.endP", kAbc));
  CHECK_NOTHROW(parse_eesl("testSF.a", kAbc));
}

TEST_CASE("testing mode probes single events and whole shuffles") {
  auto t = [&](const std::string& expr) {
    return ast_to_string(apply_testing_mode(parse_eesl(expr, kAbc)));
  };
  CHECK(t("a") == "testSF·a");
  CHECK(t("a.b") == "testSF·a·(testSF·b)");
  CHECK(t("a+b*") == "testSF·a+(testSF·b)*");
  CHECK(t("a||b") == "testSF·(a‖b)");
  CHECK(t("a.b||c") == "testSF·(a·b‖c)");
  CHECK(t("⟨a⟩") == "⟨a⟩");
  CHECK(t("⟨a⟩.b") == "⟨a⟩·(testSF·b)");
  // Markers are never probed.
  CHECK(t("beginP.a.endP") == "beginP·(testSF·a)·endP");
  CHECK(t("λ") == "λ");
}

TEST_CASE("the shuffle of two atoms covers both orders") {
  WordSet words = oracle::ast_words(parse_eesl("a||b", kAbc), 6);
  WordSet expect = {
      {"beginP", "a", "endP"},
      {"beginP", "b", "endP"},
      {"beginP", "a", "b", "endP"},
      {"beginP", "b", "a", "endP"},
  };
  CHECK(words == expect);

  // The desugared form generates exactly the same language.
  WordSet desugared = oracle::ast_words(desugar(parse_eesl("a||b", kAbc)), 6);
  CHECK(desugared == expect);
}

TEST_CASE("a single event test expands to a probe plus the event") {
  WordSet words = oracle::ast_words(desugar(parse_eesl("⟨a⟩", kAbc)), 4);
  CHECK(words == WordSet{{"testSF", "a"}});
}

TEST_CASE("desugaring preserves the language") {
  for (const char* expr :
       {"a||b", "(a.b)||c", "a||(b+c)", "(a||b)*", "a.(b||c).a", "⟨a⟩.b",
        "(a||b)||c", "a*||b"}) {
    CAPTURE(expr);
    AstPtr ast = parse_eesl(expr, kAbc);
    CHECK(oracle::ast_words(ast, 6) == oracle::ast_words(desugar(ast), 6));
  }
}

TEST_CASE("compiled grammars generate the expression language") {
  for (const char* expr :
       {"", "a", "a*", "a.b.c", "(a+b).c", "a||b", "(a.b)||c", "(a||b)*",
        "⟨a⟩.b*", "(a.(b+c))*", "a.b||c"}) {
    CAPTURE(expr);
    AstPtr ast = desugar(parse_eesl(expr, kAbc));
    Grammar g = compile_to_grammar(ast);
    CHECK(g.is_right_linear());
    CHECK(oracle::grammar_words(g, 6) == oracle::ast_words(ast, 6));
  }
}

TEST_CASE("compiled grammars are unambiguous on the fixture expressions") {
  for (const char* expr :
       {"(createOrder.(createAbort+createConfirm))*",
        "(createOrder+createAbort+createConfirm)*",
        "(createOrder.(createAbort||createConfirm))*"}) {
    CAPTURE(expr);
    Grammar g = compile_to_grammar(desugar(parse_eesl(expr, kOrderEvents)));
    for (const Word& w : oracle::grammar_words(g, 6)) {
      CAPTURE(w.size());
      CHECK(oracle::derivation_count(g, w) == 1);
    }
  }
}

TEST_CASE("the order grammar matches its frozen dump") {
  CHECK(dump_of("(createOrder.(createAbort+createConfirm))*", kOrderEvents) ==
        "V0 -> λ | createOrder V1\n"
        "V1 -> createAbort V2 | createConfirm V3\n"
        "V2 -> λ | createOrder V1\n"
        "V3 -> λ | createOrder V1\n");
}

TEST_CASE("the free order grammar matches its frozen dump") {
  std::string row = " -> λ | createOrder V1 | createAbort V2 | createConfirm V3\n";
  CHECK(dump_of("(createOrder+createAbort+createConfirm)*", kOrderEvents) ==
        "V0" + row + "V1" + row + "V2" + row + "V3" + row);
}

TEST_CASE("small grammars have the expected dumps") {
  CHECK(dump_of("", kAbc) == "V0 -> λ\n");
  CHECK(dump_of("λ", kAbc) == "V0 -> λ\n");
  CHECK(dump_of("a", kAbc) == "V0 -> a V1\nV1 -> λ\n");
  CHECK(dump_of("a*", kAbc) == "V0 -> λ | a V1\nV1 -> λ | a V1\n");
}

TEST_CASE("compilation is deterministic") {
  const std::string expr = "(a.(b||c))*";
  Grammar g1 = compile_to_grammar(desugar(parse_eesl(expr, kAbc)));
  Grammar g2 = compile_to_grammar(desugar(parse_eesl(expr, kAbc)));
  CHECK(g1 == g2);
  CHECK(g1.dump() == g2.dump());
}

TEST_CASE("automaton construction rejects sugared nodes") {
  CHECK_THROWS_AS(compile_to_grammar(parse_eesl("a||b", kAbc)), GrammarError);
  CHECK_THROWS_AS(compile_to_grammar(parse_eesl("⟨a⟩", kAbc)), GrammarError);
}

TEST_CASE("grammar dumps show dead variables as empty") {
  Grammar g;
  g.terminals = {"a"};
  g.start = 0;
  Grammar::Production p;
  p.terminal = 0;
  p.next = 1;
  g.rules = {{p}, {}};
  CHECK(g.dump() == "V0 -> a V1\nV1 -> ∅\n");
  CHECK(g.is_right_linear());
  CHECK(oracle::grammar_words(g, 5).empty());
}
