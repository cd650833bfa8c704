#include "lscsim/playtree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace lsc {

std::string Id::encode() const {
  std::string out = state.encode();
  out.push_back('\x04');
  for (const Symbol& s : w) {
    out.push_back(s.terminal ? 'T' : 'V');
    for (int shift = 0; shift < 32; shift += 8)
      out.push_back(static_cast<char>((s.index >> shift) & 0xff));
  }
  return out;
}

std::vector<Id> terminal_move(const SystemModel& model, const Grammar& grammar,
                              const Id& id, const EngineOptions& opt) {
  assert(!id.w.empty() && id.w.front().terminal);
  const std::string& event = grammar.terminals.at(id.w.front().index);
  Word tail(id.w.begin() + 1, id.w.end());
  std::vector<Id> out;
  for (SimState& s : superstep(model, id.state, event, opt))
    out.push_back({std::move(s), tail});
  return out;
}

std::vector<Id> nonterminal_move(const Grammar& grammar, const Id& id) {
  assert(!id.w.empty() && !id.w.front().terminal);
  const auto& prods = grammar.rules.at(id.w.front().index);
  Word tail(id.w.begin() + 1, id.w.end());
  std::vector<Id> out;
  out.reserve(prods.size());
  for (const Grammar::Production& p : prods) {
    Word w2;
    if (p.terminal) w2.push_back({true, *p.terminal});
    if (p.next) w2.push_back({false, *p.next});
    w2.insert(w2.end(), tail.begin(), tail.end());
    out.push_back({id.state, std::move(w2)});
  }
  return out;
}

namespace {

struct Traversal {
  const SystemModel& model;
  const Grammar& grammar;
  MemoTable& memo;
  const PlayOptions& opt;
  const IdObserver& observer;
  std::vector<std::string> trace;
  size_t open_ended = 0;
  uint64_t visits = 0;

  bool run(const Id& id) {
    if (id.state.violated) return true;
    if (id.w.empty()) {
      if (!id.state.rl.empty()) ++open_ended;
      return false;
    }
    if (opt.use_memo) {
      if (memo.contains(id)) return false;
      memo.insert(id);
      if (observer) observer(id);
    }
    if (opt.max_visits && ++visits > opt.max_visits)
      throw DivergenceError("exploration budget exceeded");

    const Symbol& head = id.w.front();
    if (head.terminal) {
      trace.push_back(grammar.terminals.at(head.index));
      for (Id& child : terminal_move(model, grammar, id, opt.engine))
        if (run(child)) return true;
      trace.pop_back();
      return false;
    }
    for (Id& child : nonterminal_move(grammar, id))
      if (run(child)) return true;
    return false;
  }
};

}  // namespace

MdftResult mdft(const SystemModel& model, const Grammar& grammar, const Id& root,
                MemoTable& memo, const PlayOptions& opt, const IdObserver& observer) {
  if (!grammar.is_right_linear())
    throw GrammarError("grammar is not right-linear; traversal unsupported");
  Traversal t{model, grammar, memo, opt, observer};
  MdftResult r;
  r.violated = t.run(root);
  r.trace = std::move(t.trace);
  r.open_ended_runs = t.open_ended;
  return r;
}

Verdict check_consistency(const SystemModel& model, const Grammar& grammar,
                          const PlayOptions& opt, const IdObserver& observer) {
  MemoTable memo;
  Id root{initial_state(model), {Symbol{false, grammar.start}}};
  if (grammar.rules.empty()) {
    // Degenerate empty grammar: nothing to simulate.
    return Verdict{true, {}, 0, 0};
  }
  MdftResult r = mdft(model, grammar, root, memo, opt, observer);
  Verdict v;
  v.consistent = !r.violated;
  v.memo_entries = memo.size();
  v.open_ended_runs = r.open_ended_runs;
  if (r.violated)
    v.trace = minimize_failure_trace(model, grammar, r.trace, opt.engine);
  return v;
}

std::vector<std::string> minimize_failure_trace(const SystemModel& model,
                                                const Grammar& grammar,
                                                const std::vector<std::string>& trace,
                                                const EngineOptions& opt) {
  (void)grammar;
  if (trace.empty()) throw std::logic_error("empty failure trace");

  auto prefix_fails = [&](size_t len) {
    std::vector<SimState> frontier{initial_state(model)};
    for (size_t i = 0; i < len; ++i) {
      std::vector<SimState> next;
      bool last = i + 1 == len;
      for (const SimState& s : frontier) {
        for (SimState& t : superstep(model, s, trace[i], opt)) {
          if (t.violated) {
            if (last) return true;
            continue;  // shorter failing prefix; found by an earlier round
          }
          next.push_back(std::move(t));
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      frontier = std::move(next);
      if (frontier.empty()) break;
    }
    return false;
  };

  for (size_t len = 1; len < trace.size(); ++len) {
    if (prefix_fails(len))
      return std::vector<std::string>(trace.begin(), trace.begin() + len);
  }
  if (!prefix_fails(trace.size()))
    throw std::logic_error("failure trace does not replay to a violation");
  return trace;
}

double id_space_bound(const SystemModel& model, const Grammar& grammar) {
  double q = 1.0;
  for (const auto& slot : model.var_slots) q *= static_cast<double>(slot.domain.size());

  double word_forms = (1.0 + static_cast<double>(grammar.terminals.size())) *
                      (1.0 + static_cast<double>(grammar.rules.size()));

  // Each chart admits at most 2 * prod(len_l + 1) distinct copies; the copy
  // set is any subset of them.
  double copy_kinds = 0.0;
  for (const Chart& c : model.charts) {
    double cuts = 1.0;
    for (const auto& col : c.lifeline_elems) cuts *= static_cast<double>(col.size() + 1);
    copy_kinds += 2.0 * cuts;
  }
  double rl_configs = std::exp2(std::min(copy_kinds, 1020.0));
  if (copy_kinds > 1020.0) rl_configs = std::numeric_limits<double>::infinity();

  double bound = q * word_forms * rl_configs * 2.0;
  if (!std::isfinite(bound)) return std::numeric_limits<double>::infinity();
  return bound;
}

}  // namespace lsc
