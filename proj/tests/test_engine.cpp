#include "lscsim/engine.hpp"

#include "doctest.h"
#include "lscsim/model.hpp"
#include "oracles.hpp"

using namespace lsc;

namespace {

SystemModel load(const std::string& fixture) {
  return parse_model(oracle::read_file(oracle::fixture_path(fixture)));
}

const char* kChainModel = R"(
object A { var x in {0} init 0 }
external go
chart P {
  instances: A
  prechart:
    msg A -> A go cold
  main:
    msg A -> A a hot
}
chart Q {
  instances: A
  prechart:
    msg A -> A a cold
  main:
    msg A -> A b hot
}
chart R {
  instances: A
  prechart:
    msg A -> A b cold
  main:
    msg A -> A c hot
}
)";

const char* kAtomicModel = R"(
object A { var x in {0, 1, 2} init 0 }
external go
chart Settle atomic {
  instances: A
  prechart:
    msg A -> A go cold
  main:
    cond A (A.x = 0) cold
    assign A.x := 1
}
chart Racer {
  instances: A
  prechart:
    msg A -> A go cold
  main:
    assign A.x := 2
}
)";

// Same model without the atomic marker.
const char* kRacyModel = R"(
object A { var x in {0, 1, 2} init 0 }
external go
chart Settle {
  instances: A
  prechart:
    msg A -> A go cold
  main:
    cond A (A.x = 0) cold
    assign A.x := 1
}
chart Racer {
  instances: A
  prechart:
    msg A -> A go cold
  main:
    assign A.x := 2
}
)";

}  // namespace

TEST_CASE("initial state holds the declared init values and no copies") {
  SystemModel m = load("weborder.lsc");
  SimState s = initial_state(m);
  CHECK(s.q == std::vector<uint8_t>{0, 0});
  CHECK(s.rl.empty());
  CHECK_FALSE(s.violated);
  CHECK(is_stable(m, s));
  CHECK(describe_valuation(m, s) == "{RBC.conf=false, STC.conf=false}");
}

TEST_CASE("an event occurrence activates matching precharts") {
  SystemModel m = load("weborder.lsc");
  SimState init = initial_state(m);
  auto states = apply_step(m, init, "createOrder");
  REQUIRE(states.size() == 1);
  const SimState& s = states[0];
  REQUIRE(s.rl.size() == 1);
  CHECK(m.charts[s.rl[0].chart].name == "CreateOrder");
  CHECK(s.rl[0].mode == Mode::Active);
  CHECK(s.rl[0].cut == Cut{1, 0});
  CHECK_FALSE(is_stable(m, s));

  // The copy now owes its main part: assignment first, then the sends.
  auto events = enabled_internal_events(m, s);
  CHECK(events == std::vector<std::string>{"assign:RBC.conf:=false"});

  auto steps = enabled_internal_steps(m, s);
  REQUIRE(steps.size() == 1);
  SimState after = apply_internal_step(m, s, steps[0]);
  CHECK(enabled_internal_events(m, after) == std::vector<std::string>{"sendOrder"});
}

TEST_CASE("supersteps on the weborder model reach the frozen stable states") {
  SystemModel m = load("weborder.lsc");
  SimState init = initial_state(m);

  SUBCASE("createOrder settles back to agreeing status") {
    auto states = superstep(m, init, "createOrder");
    REQUIRE(states.size() == 1);
    CHECK(describe_valuation(m, states[0]) == "{RBC.conf=false, STC.conf=false}");
    CHECK(states[0].rl.empty());
    CHECK(is_stable(m, states[0]));
  }

  SUBCASE("createConfirm runs the atomic bookkeeping chart") {
    auto states = superstep(m, init, "createConfirm");
    REQUIRE(states.size() == 1);
    CHECK(describe_valuation(m, states[0]) == "{RBC.conf=false, STC.conf=true}");
    CHECK(states[0].rl.empty());
  }

  SUBCASE("createAbort alone activates nothing") {
    auto states = superstep(m, init, "createAbort");
    REQUIRE(states.size() == 1);
    CHECK(states[0] == init);
  }

  SUBCASE("beginP arms the decision charts mid-prechart") {
    auto states = superstep(m, init, "beginP");
    REQUIRE(states.size() == 1);
    const SimState& s = states[0];
    CHECK(s.q == init.q);
    REQUIRE(s.rl.size() == 2);
    CHECK(m.charts[s.rl[0].chart].name == "SellerConfirms");
    CHECK(m.charts[s.rl[1].chart].name == "BuyerAborts");
    CHECK(s.rl[0].mode == Mode::PreActive);
    CHECK(s.rl[1].mode == Mode::PreActive);
    // beginP plus the first sync have been taken on both charts.
    CHECK(s.rl[0].cut == Cut{2, 1, 0});
    CHECK(s.rl[1].cut == Cut{2, 1, 0});
  }

  SUBCASE("a full confirm group ends with both sides confirmed") {
    SimState s = superstep(m, init, "beginP").at(0);
    s = superstep(m, s, "createConfirm").at(0);
    CHECK(describe_valuation(m, s) == "{RBC.conf=false, STC.conf=true}");
    auto states = superstep(m, s, "endP");
    REQUIRE(states.size() == 1);
    CHECK(describe_valuation(m, states[0]) == "{RBC.conf=true, STC.conf=true}");
    CHECK(states[0].rl.empty());
  }

  SUBCASE("a full abort group ends with both sides aborted") {
    SimState s = superstep(m, init, "beginP").at(0);
    s = superstep(m, s, "createAbort").at(0);
    auto states = superstep(m, s, "endP");
    REQUIRE(states.size() == 1);
    CHECK(describe_valuation(m, states[0]) == "{RBC.conf=abort, STC.conf=abort}");
    CHECK(states[0].rl.empty());
  }
}

TEST_CASE("out-of-order events discard passive copies silently") {
  SystemModel m = load("weborder_anti.lsc");
  SimState init = initial_state(m);
  SimState s1 = superstep(m, init, "createOrder").at(0);

  // The anti chart sits mid-prechart after createOrder and its first sync.
  bool found = false;
  for (const RunningCopy& c : s1.rl)
    if (m.charts[c.chart].name == "NoAbortAfterConfirm") {
      found = true;
      CHECK(c.mode == Mode::PreActive);
      CHECK(c.cut == Cut{2, 1});
    }
  CHECK(found);

  // A second createOrder hits that copy out of order: the stale copy is
  // dropped and a fresh one is armed, landing in the same state.
  auto again = superstep(m, s1, "createOrder");
  REQUIRE(again.size() == 1);
  CHECK(again[0] == s1);
}

TEST_CASE("a hot condition violation poisons the state") {
  SystemModel m = load("weborder_anti.lsc");
  SimState s = initial_state(m);
  s = superstep(m, s, "createOrder").at(0);
  s = superstep(m, s, "createConfirm").at(0);
  auto states = superstep(m, s, "createAbort");
  REQUIRE(states.size() == 1);
  CHECK(states[0].violated);
}

TEST_CASE("violated states accept no further work") {
  SystemModel m = load("weborder_anti.lsc");
  SimState s = initial_state(m);
  for (const char* e : {"createOrder", "createConfirm", "createAbort"})
    s = superstep(m, s, e).at(0);
  REQUIRE(s.violated);
  CHECK_THROWS_AS(enabled_internal_steps(m, s), std::logic_error);
  CHECK_THROWS_AS(apply_step(m, s, "createOrder"), std::logic_error);
  CHECK_THROWS_AS(superstep(m, s, "createOrder"), std::logic_error);
}

TEST_CASE("supersteps reject unknown and internal events") {
  SystemModel m = load("weborder.lsc");
  SimState init = initial_state(m);
  CHECK_THROWS_AS(superstep(m, init, "noSuchEvent"), UnknownEventError);
  // sendOrder is internal: the environment cannot inject it.
  CHECK_THROWS_AS(superstep(m, init, "sendOrder"), UnknownEventError);
  // Markers are fine.
  CHECK_NOTHROW(superstep(m, init, "testSF"));
}

TEST_CASE("supersteps require a stable starting state") {
  SystemModel m = load("weborder.lsc");
  SimState mid = apply_step(m, initial_state(m), "createOrder").at(0);
  REQUIRE_FALSE(is_stable(m, mid));
  CHECK_THROWS_AS(superstep(m, mid, "createAbort"), std::logic_error);
}

TEST_CASE("internal message chains run to completion inside one superstep") {
  SystemModel m = parse_model(kChainModel);
  REQUIRE(validate_model(m).empty());
  SimState init = initial_state(m);
  auto states = superstep(m, init, "go");
  REQUIRE(states.size() == 1);
  CHECK(states[0].rl.empty());

  // A tight budget cuts the same chain off.
  EngineOptions opt;
  opt.max_internal_steps = 2;
  CHECK_THROWS_AS(superstep(m, init, "go", opt), DivergenceError);
}

TEST_CASE("cyclic internal activity is reported as divergence") {
  SystemModel m = load("diverge.lsc");
  SimState init = initial_state(m);
  CHECK_THROWS_AS(superstep(m, init, "go"), DivergenceError);
}

TEST_CASE("atomic charts run to completion without interleaving") {
  SystemModel atomic = parse_model(kAtomicModel);
  SystemModel racy = parse_model(kRacyModel);
  REQUIRE(validate_model(atomic).empty());
  REQUIRE(validate_model(racy).empty());

  auto a = superstep(atomic, initial_state(atomic), "go");
  REQUIRE(a.size() == 1);
  CHECK(describe_valuation(atomic, a[0]) == "{A.x=2}");

  auto r = superstep(racy, initial_state(racy), "go");
  REQUIRE(r.size() == 2);
  CHECK(describe_valuation(racy, r[0]) == "{A.x=1}");
  CHECK(describe_valuation(racy, r[1]) == "{A.x=2}");
}

TEST_CASE("exploration order does not change the stable state set") {
  EngineOptions fwd;
  EngineOptions rev;
  rev.reverse_exploration = true;

  SystemModel racy = parse_model(kRacyModel);
  CHECK(superstep(racy, initial_state(racy), "go", fwd) ==
        superstep(racy, initial_state(racy), "go", rev));

  SystemModel m = load("weborder.lsc");
  SimState s = initial_state(m);
  for (const char* e : {"createOrder", "beginP", "createAbort", "endP"}) {
    CAPTURE(e);
    auto f = superstep(m, s, e, fwd);
    auto r = superstep(m, s, e, rev);
    CHECK(f == r);
    s = f.at(0);
  }
}

TEST_CASE("superstep_traced reports which testing charts fired") {
  SystemModel m = load("weborder_ag.lsc");
  SimState init = initial_state(m);
  auto outcomes = superstep_traced(m, init, "testSF");
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].state.q == init.q);
  CHECK(outcomes[0].state.rl.empty());
  CHECK(outcomes[0].properties_fired == std::set<std::string>{"ConfStatusAgree"});

  // Plain supersteps agree on the state part.
  auto plain = superstep(m, init, "testSF");
  REQUIRE(plain.size() == 1);
  CHECK(plain[0] == outcomes[0].state);
}

TEST_CASE("states canonicalize to sorted duplicate-free copy lists") {
  SystemModel m = load("weborder.lsc");
  SimState s = initial_state(m);
  RunningCopy a{1, Mode::PreActive, Cut{1, 0}};
  RunningCopy b{0, Mode::Active, Cut{1, 0}};
  s.rl = {a, b, a};
  s.canonicalize();
  REQUIRE(s.rl.size() == 2);
  CHECK(s.rl[0] == b);
  CHECK(s.rl[1] == a);

  SimState t = s;
  CHECK(t.encode() == s.encode());
  t.rl[0].cut = Cut{0, 0};
  CHECK(t.encode() != s.encode());
}
