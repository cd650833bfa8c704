#include "lscsim/model.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <set>

using namespace lsc;

namespace {

SystemModel load(const std::string& fixture) {
  return parse_model(oracle::read_file(oracle::fixture_path(fixture)));
}

}  // namespace

TEST_CASE("weborder model parses with the expected shape") {
  SystemModel m = load("weborder.lsc");

  REQUIRE(m.objects.size() == 2);
  CHECK(m.objects[0].name == "RBC");
  CHECK(m.objects[1].name == "STC");
  CHECK(m.objects[0].vars.size() == 1);
  CHECK(m.objects[0].vars[0].name == "conf");
  CHECK(m.objects[0].vars[0].domain == std::vector<std::string>{"false", "true", "abort"});
  CHECK(m.objects[0].vars[0].init == "false");

  CHECK(m.external_events ==
        std::vector<std::string>{"createOrder", "createAbort", "createConfirm"});
  REQUIRE(m.charts.size() == 8);

  const Chart* co = m.find_chart("CreateOrder");
  REQUIRE(co != nullptr);
  CHECK_FALSE(co->atomic);
  CHECK(co->instances == std::vector<std::string>{"RBC", "STC"});
  CHECK(co->prechart.size() == 1);
  CHECK(co->main.size() == 3);
  CHECK(co->activating_events == std::set<std::string>{"createOrder"});
  CHECK(co->alphabet ==
        std::set<std::string>{"createOrder", "sendOrder", "ack"});
  CHECK_FALSE(co->is_testing);

  const Chart* sc = m.find_chart("SellerConfirms");
  REQUIRE(sc != nullptr);
  CHECK(sc->activating_events == std::set<std::string>{"beginP"});

  const Chart* atomic = m.find_chart("SetConfirmStatus");
  REQUIRE(atomic != nullptr);
  CHECK(atomic->atomic);

  CHECK(m.find_chart("NoSuchChart") == nullptr);
  CHECK(validate_model(m).empty());
}

TEST_CASE("event classification distinguishes external, internal and hidden") {
  SystemModel m = load("weborder.lsc");
  CHECK(m.is_external("createOrder"));
  CHECK_FALSE(m.is_external("sendOrder"));
  CHECK(m.events.at("sendOrder") == EventClass::Internal);
  CHECK(m.events.at("beginP") == EventClass::Hidden);
  CHECK(m.events.at("testSF") == EventClass::Hidden);
  CHECK(m.events.at("propertyHold") == EventClass::Hidden);
}

TEST_CASE("testing charts are recognized by their propertyHold message") {
  SystemModel m = load("weborder_ag.lsc");
  const Chart* t = m.find_chart("ConfStatusAgree");
  REQUIRE(t != nullptr);
  CHECK(t->is_testing);
  CHECK(m.find_chart("CreateOrder")->is_testing == false);
  CHECK(validate_model(m).empty());
}

TEST_CASE("variable slots resolve names and literals") {
  SystemModel m = load("weborder.lsc");
  REQUIRE(m.var_slots.size() == 2);
  auto rbc = m.find_slot("RBC", "conf");
  REQUIRE(rbc.has_value());
  auto stc = m.find_slot("STC", "conf");
  REQUIRE(stc.has_value());
  CHECK(*rbc != *stc);
  CHECK_FALSE(m.find_slot("RBC", "nope").has_value());
  CHECK_FALSE(m.find_slot("XXX", "conf").has_value());

  CHECK(m.literal_index(*rbc, "false") == uint8_t{0});
  CHECK(m.literal_index(*rbc, "true") == uint8_t{1});
  CHECK(m.literal_index(*rbc, "abort") == uint8_t{2});
  CHECK_FALSE(m.literal_index(*rbc, "maybe").has_value());
}

TEST_CASE("pretty printed text reparses to the same rendering") {
  for (const char* f : {"weborder.lsc", "weborder_anti.lsc", "weborder_ag.lsc",
                        "weborder_ef.lsc", "diverge.lsc"}) {
    CAPTURE(f);
    SystemModel m = load(f);
    std::string once = pretty_print(m);
    SystemModel again = parse_model(once);
    CHECK(pretty_print(again) == once);
    CHECK(again.charts.size() == m.charts.size());
    CHECK(validate_model(again).empty());
  }
}

TEST_CASE("chart layout places elements column by column") {
  SystemModel m = load("weborder.lsc");
  const Chart& co = *m.find_chart("CreateOrder");

  // Columns: RBC = [createOrder, assign, sendOrder, ack],
  //          STC = [sendOrder, ack].
  REQUIRE(co.lifeline_count() == 2);
  CHECK(co.lifeline_index("RBC") == 0);
  CHECK(co.lifeline_index("STC") == 1);
  CHECK(co.lifeline_index("nobody") == -1);
  CHECK(co.prechart_lens == Cut{1, 0});
  CHECK(co.full_cut() == Cut{4, 2});

  using P = std::vector<std::pair<uint16_t, uint16_t>>;
  CHECK(co.element_positions(0) == P{{0, 0}});          // createOrder, RBC only
  CHECK(co.element_positions(1) == P{{0, 1}});          // assign
  CHECK(co.element_positions(2) == P{{0, 2}, {1, 0}});  // sendOrder
  CHECK(co.element_positions(3) == P{{0, 3}, {1, 1}});  // ack
  CHECK(co.in_prechart(0));
  CHECK_FALSE(co.in_prechart(1));
}

TEST_CASE("cut legality matches brute-force downward closure") {
  SystemModel m = load("weborder.lsc");
  const Chart& co = *m.find_chart("CreateOrder");

  // Reference rule, computed directly from element positions: a cut is
  // legal when it is within bounds and passes each element on all of its
  // lifelines or on none.
  auto reference_legal = [&](const Cut& cut) {
    Cut full = co.full_cut();
    for (size_t l = 0; l < cut.size(); ++l)
      if (cut[l] > full[l]) return false;
    for (uint32_t id = 0; id < co.element_count(); ++id) {
      auto pos = co.element_positions(id);
      int passed = 0;
      for (auto [l, p] : pos)
        if (cut[l] > p) ++passed;
      if (passed != 0 && passed != static_cast<int>(pos.size())) return false;
    }
    return true;
  };

  int legal = 0;
  for (uint16_t r = 0; r <= 5; ++r)
    for (uint16_t s = 0; s <= 3; ++s) {
      Cut cut{r, s};
      CAPTURE(r);
      CAPTURE(s);
      bool expect = r <= 4 && s <= 2 && reference_legal(cut);
      CHECK(co.is_legal_cut(cut) == expect);
      CHECK(validate_cut(co, cut).size() == (expect ? 0u : 1u));
      if (expect) ++legal;
    }
  // CreateOrder is totally ordered, so there is one legal cut per prefix.
  CHECK(legal == 5);

  CHECK(co.is_legal_cut(co.zero_cut()));
  CHECK(co.is_legal_cut(co.full_cut()));
  CHECK_FALSE(co.is_legal_cut(Cut{1}));  // wrong arity
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_model("object A {\n  var x in {0} init 0\n}\nchart C }{\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.pos.line == 4);
    std::string what = e.what();
    CHECK(what.find("4:") != std::string::npos);
  }
}

TEST_CASE("semantic errors are reported at parse time") {
  // Unknown object in instances.
  CHECK_THROWS_AS(parse_model("object A { var x in {0} init 0 }\n"
                              "external go\n"
                              "chart C {\n  instances: A, B\n  main:\n"
                              "    msg A -> A hi hot\n}\n"),
                  SemanticError);
  // Init value outside the domain.
  CHECK_THROWS_AS(parse_model("object A { var x in {0, 1} init 7 }\n"), SemanticError);
  // Reserved event declared external.
  CHECK_THROWS_AS(parse_model("object A { var x in {0} init 0 }\nexternal beginP\n"),
                  SemanticError);
  // sync needs at least two instances.
  CHECK_THROWS_AS(parse_model("object A { var x in {0} init 0 }\n"
                              "chart C {\n  instances: A\n  main:\n    sync A\n}\n"),
                  SemanticError);
  // Message endpoint not on the instances line.
  CHECK_THROWS_AS(parse_model("object A { var x in {0} init 0 }\n"
                              "object B { var y in {0} init 0 }\n"
                              "chart C {\n  instances: A\n  main:\n"
                              "    msg A -> B ping hot\n}\n"),
                  SemanticError);
  // Condition over an unknown variable.
  CHECK_THROWS_AS(parse_model("object A { var x in {0} init 0 }\n"
                              "chart C {\n  instances: A\n  main:\n"
                              "    cond A (A.zz = 0) cold\n}\n"),
                  SemanticError);
}

TEST_CASE("validate_model flags structural problems") {
  // An assignment in a prechart is parseable but invalid.
  SystemModel m = parse_model(
      "object A { var x in {0, 1} init 0 }\n"
      "external go\n"
      "chart C {\n  instances: A\n  prechart:\n"
      "    msg A -> A go cold\n    assign A.x := 1\n  main:\n"
      "    assign A.x := 1\n}\n");
  auto diags = validate_model(m);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("assignment") != std::string::npos);

  // A prechart without any message event has nothing to activate on.
  SystemModel m2 = parse_model(
      "object A { var x in {0, 1} init 0 }\n"
      "chart C {\n  instances: A\n  prechart:\n"
      "    cond A (A.x = 0) cold\n  main:\n    assign A.x := 1\n}\n");
  auto diags2 = validate_model(m2);
  REQUIRE(diags2.size() == 1);
  CHECK(diags2[0].message.find("minimal") != std::string::npos);
}

TEST_CASE("numeric literals and comments are accepted") {
  SystemModel m = parse_model(
      "# a comment line\n"
      "object A { var x in {0, 1, 2} init 2 }  # trailing comment\n"
      "external go\n"
      "chart C {\n  instances: A\n  prechart:\n    msg A -> A go cold\n"
      "  main:\n    cond A (A.x != 0) cold; assign A.x := 0\n}\n");
  CHECK(m.objects[0].vars[0].init == "2");
  const Chart& c = m.charts[0];
  REQUIRE(c.main.size() == 2);
  CHECK(c.main[0].as_condition() != nullptr);
  CHECK(c.main[1].as_assign() != nullptr);
  CHECK(validate_model(m).empty());
}

TEST_CASE("predicates compare against literals or other variables") {
  SystemModel m = load("weborder_ag.lsc");
  const Chart& t = *m.find_chart("ConfStatusAgree");
  REQUIRE(t.main.size() >= 1);
  const ConditionElem* cond = t.main[0].as_condition();
  REQUIRE(cond != nullptr);
  REQUIRE(cond->pred.kind == Predicate::Kind::Conjunction);
  REQUIRE(cond->pred.atoms.size() == 1);
  const PredAtom& atom = cond->pred.atoms[0];
  CHECK(atom.lhs == VarRef{"RBC", "conf"});
  CHECK(atom.op == CmpOp::Eq);
  REQUIRE(atom.rhs_ref.has_value());
  CHECK(*atom.rhs_ref == VarRef{"STC", "conf"});
}
