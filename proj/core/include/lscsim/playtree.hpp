#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "lscsim/eesl.hpp"
#include "lscsim/engine.hpp"
#include "lscsim/model.hpp"

namespace lsc {

// One grammar symbol: a terminal or a variable, indexed into the grammar.
struct Symbol {
  bool terminal = false;
  uint32_t index = 0;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using Word = std::vector<Symbol>;

// Node identity of the exploration tree: super state plus remaining word.
struct Id {
  SimState state;
  Word w;

  std::string encode() const;
};

class MemoTable {
public:
  bool contains(const Id& id) const { return keys_.count(id.encode()) != 0; }
  void insert(const Id& id) { keys_.insert(id.encode()); }
  size_t size() const { return keys_.size(); }

private:
  std::set<std::string> keys_;
};

struct PlayOptions {
  EngineOptions engine;
  bool use_memo = true;
  // Safety valve for runs without memoization; 0 disables it.
  uint64_t max_visits = 0;
};

// Called for every ID inserted into the memo table.
using IdObserver = std::function<void(const Id&)>;

// Children of an ID whose word starts with a terminal: one per stable state
// of the superstep on that event, with the word advanced past it.
std::vector<Id> terminal_move(const SystemModel& model, const Grammar& grammar,
                              const Id& id, const EngineOptions& opt = {});

// Children of an ID whose word starts with a variable: one per production,
// in production order.
std::vector<Id> nonterminal_move(const Grammar& grammar, const Id& id);

struct MdftResult {
  bool violated = false;
  std::vector<std::string> trace;  // events on the failing branch, markers kept
  size_t open_ended_runs = 0;      // success leaves with copies still running
};

// Memoized depth-first traversal. Returns on the first violating leaf with
// the branch trace; otherwise reports no violation after exhausting the tree.
MdftResult mdft(const SystemModel& model, const Grammar& grammar, const Id& root,
                MemoTable& memo, const PlayOptions& opt = {},
                const IdObserver& observer = nullptr);

struct Verdict {
  bool consistent = true;
  std::vector<std::string> trace;  // least failing prefix when inconsistent
  size_t memo_entries = 0;
  size_t open_ended_runs = 0;
};

// Full consistency check from the initial state over the grammar's start
// variable. Inconsistent verdicts carry a length-minimal failure trace.
Verdict check_consistency(const SystemModel& model, const Grammar& grammar,
                          const PlayOptions& opt = {},
                          const IdObserver& observer = nullptr);

// Shortest failing prefix of a failure trace, found by replaying prefixes of
// increasing length over the superstep relation.
std::vector<std::string> minimize_failure_trace(const SystemModel& model,
                                                const Grammar& grammar,
                                                const std::vector<std::string>& trace,
                                                const EngineOptions& opt = {});

// Upper bound on the number of distinct IDs, saturating at infinity.
double id_space_bound(const SystemModel& model, const Grammar& grammar);

}  // namespace lsc
