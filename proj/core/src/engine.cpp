#include "lscsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

namespace lsc {

// ---------------------------------------------------------------------------
// SimState

void SimState::canonicalize() {
  std::sort(rl.begin(), rl.end());
  rl.erase(std::unique(rl.begin(), rl.end()), rl.end());
}

std::string SimState::encode() const {
  std::string out;
  out.reserve(q.size() + rl.size() * 8 + 4);
  for (uint8_t v : q) out.push_back(static_cast<char>(v));
  out.push_back('\x01');
  for (const RunningCopy& c : rl) {
    out.push_back(static_cast<char>(c.chart & 0xff));
    out.push_back(static_cast<char>((c.chart >> 8) & 0xff));
    out.push_back(c.mode == Mode::Active ? '\x41' : '\x50');
    for (uint16_t x : c.cut) {
      out.push_back(static_cast<char>(x & 0xff));
      out.push_back(static_cast<char>((x >> 8) & 0xff));
    }
    out.push_back('\x02');
  }
  out.push_back(violated ? '\x31' : '\x30');
  return out;
}

std::string describe_valuation(const SystemModel& model, const SimState& state) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [name, slot] : model.slot_by_name) {
    if (!first) os << ", ";
    first = false;
    const auto& dom = model.var_slots[slot].domain;
    uint8_t v = slot < state.q.size() ? state.q[slot] : 0;
    os << name << "=" << (v < dom.size() ? dom[v] : "?");
  }
  os << "}";
  return os.str();
}

SimState initial_state(const SystemModel& model) {
  SimState s;
  s.q.reserve(model.var_slots.size());
  for (const auto& slot : model.var_slots) s.q.push_back(slot.init_index);
  return s;
}

// ---------------------------------------------------------------------------
// Copy helpers

namespace {

bool copy_active_pred(const SystemModel& model, const RunningCopy& c) {
  const Chart& chart = model.charts[c.chart];
  for (size_t l = 0; l < chart.lifeline_count(); ++l)
    if (c.cut[l] < chart.prechart_lens[l]) return false;
  return true;
}

bool copy_complete(const SystemModel& model, const RunningCopy& c) {
  const Chart& chart = model.charts[c.chart];
  for (size_t l = 0; l < chart.lifeline_count(); ++l)
    if (c.cut[l] < chart.lifeline_elems[l].size()) return false;
  return true;
}

bool element_enabled(const Chart& chart, const Cut& cut, uint32_t elem) {
  auto positions = chart.element_positions(elem);
  if (positions.empty()) return false;
  for (auto [l, p] : positions)
    if (cut[l] != p) return false;
  return true;
}

// Not passed on every lifeline and not enabled: the copy still owes it.
bool element_pending(const Chart& chart, const Cut& cut, uint32_t elem) {
  bool unpassed = false;
  for (auto [l, p] : chart.element_positions(elem))
    if (cut[l] <= p) unpassed = true;
  return unpassed && !element_enabled(chart, cut, elem);
}

void advance_element(const Chart& chart, Cut& cut, uint32_t elem) {
  for (auto [l, p] : chart.element_positions(elem)) cut[l] = static_cast<uint16_t>(p + 1);
}

// Lowest element id of `event` enabled at the cut, or -1.
int enabled_message_elem(const Chart& chart, const Cut& cut, const std::string& event) {
  for (uint32_t id = 0; id < chart.element_count(); ++id) {
    const auto* msg = chart.element(id).as_message();
    if (!msg || msg->event != event) continue;
    if (element_enabled(chart, cut, id)) return static_cast<int>(id);
  }
  return -1;
}

void refresh_mode(const SystemModel& model, RunningCopy& c) {
  if (c.mode == Mode::PreActive && copy_active_pred(model, c)) c.mode = Mode::Active;
}

void settle(const SystemModel& model, SimState& s) {
  for (auto& c : s.rl) refresh_mode(model, c);
  s.rl.erase(std::remove_if(s.rl.begin(), s.rl.end(),
                            [&](const RunningCopy& c) { return copy_complete(model, c); }),
             s.rl.end());
  s.canonicalize();
}

bool eval_pred(const SimState& s, const ResolvedPred& p) {
  switch (p.kind) {
    case Predicate::Kind::True: return true;
    case Predicate::Kind::False: return false;
    case Predicate::Kind::Conjunction: break;
  }
  for (const ResolvedAtom& a : p.atoms) {
    uint8_t lhs = s.q[a.lhs_slot];
    uint8_t rhs = a.rhs_is_slot ? s.q[a.rhs_slot] : a.rhs_value;
    bool eq = lhs == rhs;
    if (a.op == CmpOp::Eq ? !eq : eq) return false;
  }
  return true;
}

// Occurrence of a message event: fresh activations, advancement of enabled
// copies, out-of-order handling, completion. Deterministic.
SimState apply_event_occurrence(const SystemModel& model, const SimState& state,
                                const std::string& event) {
  SimState out = state;

  // Fresh copies for every chart whose minimal prechart events match. The
  // canonical copy set makes re-activation while an identical copy runs a
  // no-op.
  std::vector<RunningCopy> work = out.rl;
  for (size_t ci = 0; ci < model.charts.size(); ++ci) {
    const Chart& chart = model.charts[ci];
    if (!chart.activating_events.count(event)) continue;
    RunningCopy fresh;
    fresh.chart = static_cast<uint16_t>(ci);
    fresh.cut = chart.zero_cut();
    fresh.mode = chart.prechart.empty() ? Mode::Active : Mode::PreActive;
    work.push_back(std::move(fresh));
  }

  std::vector<RunningCopy> kept;
  kept.reserve(work.size());
  for (RunningCopy& c : work) {
    const Chart& chart = model.charts[c.chart];
    int elem = enabled_message_elem(chart, c.cut, event);
    if (elem >= 0) {
      advance_element(chart, c.cut, static_cast<uint32_t>(elem));
      refresh_mode(model, c);
      kept.push_back(std::move(c));
      continue;
    }
    if (!chart.alphabet.count(event)) {
      kept.push_back(std::move(c));
      continue;
    }
    // Out of order. A prechart abandons silently; an active copy violates
    // when it still has an enabled hot message obligation.
    if (c.mode == Mode::PreActive) continue;
    bool hot_obligation = false;
    for (uint32_t id = 0; id < chart.element_count(); ++id) {
      const auto* msg = chart.element(id).as_message();
      if (!msg || msg->temp != Temperature::Hot) continue;
      if (element_enabled(chart, c.cut, id)) hot_obligation = true;
    }
    if (hot_obligation) out.violated = true;
    // Cold exit: drop the copy either way.
  }
  out.rl = std::move(kept);
  settle(model, out);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Step enumeration

namespace {

struct StepKey {
  std::string chart_name;
  uint16_t lifeline = 0;
  uint16_t location = 0;
  uint32_t copy = 0;
  uint32_t elem = 0;

  friend auto operator<=>(const StepKey&, const StepKey&) = default;
};

StepKey key_for(const SystemModel& model, const SimState& s, uint32_t copy_index,
                uint32_t elem) {
  const RunningCopy& c = s.rl[copy_index];
  const Chart& chart = model.charts[c.chart];
  auto positions = chart.element_positions(elem);
  StepKey k;
  k.chart_name = chart.name;
  k.lifeline = positions.empty() ? 0 : positions.front().first;
  k.location = positions.empty() ? 0 : positions.front().second;
  k.copy = copy_index;
  k.elem = elem;
  return k;
}

std::string step_name(const SystemModel& model, const SimState& s, const EngineStep& st) {
  const RunningCopy& c = s.rl[st.copy_index];
  const Chart& chart = model.charts[c.chart];
  std::ostringstream os;
  switch (st.kind) {
    case EngineStep::Kind::Message:
      return st.event;
    case EngineStep::Kind::Condition:
      os << "cond:" << chart.name << "#" << st.element;
      return os.str();
    case EngineStep::Kind::Assignment: {
      const auto* as = chart.element(st.element).as_assign();
      os << "assign:" << as->instance << "." << as->var << ":=" << as->value;
      return os.str();
    }
    case EngineStep::Kind::Sync:
      os << "sync:" << chart.name << "#" << st.element;
      return os.str();
  }
  return os.str();
}

}  // namespace

std::vector<EngineStep> enabled_internal_steps(const SystemModel& model,
                                               const SimState& state) {
  if (state.violated)
    throw std::logic_error("enabled_internal_steps: state already violated");

  std::vector<std::pair<StepKey, EngineStep>> found;
  std::set<std::string> taken_events;

  for (uint32_t i = 0; i < state.rl.size(); ++i) {
    const RunningCopy& c = state.rl[i];
    const Chart& chart = model.charts[c.chart];
    for (uint32_t id = 0; id < chart.element_count(); ++id) {
      if (!element_enabled(chart, c.cut, id)) continue;
      const Element& e = chart.element(id);
      if (const auto* msg = e.as_message()) {
        // Spontaneous sends: hot obligations of active main charts only.
        // Markers stay environment-driven.
        if (c.mode != Mode::Active || chart.in_prechart(id)) continue;
        if (msg->temp != Temperature::Hot) continue;
        if (reserved::is_marker_event(msg->event)) continue;
        if (taken_events.count(msg->event)) continue;
        // Blocked while another active copy still owes the same event at a
        // hot location it has not reached; firing now would abort that copy.
        bool blocked = false;
        for (const RunningCopy& other : state.rl) {
          if (other.mode != Mode::Active) continue;
          const Chart& oc = model.charts[other.chart];
          for (uint32_t oid = 0; oid < oc.element_count(); ++oid) {
            const auto* omsg = oc.element(oid).as_message();
            if (!omsg || omsg->event != msg->event) continue;
            if (oc.in_prechart(oid) || omsg->temp != Temperature::Hot) continue;
            if (element_pending(oc, other.cut, oid)) blocked = true;
          }
        }
        if (blocked) continue;
        taken_events.insert(msg->event);
        EngineStep st{EngineStep::Kind::Message, msg->event, i, id};
        found.emplace_back(key_for(model, state, i, id), std::move(st));
      } else if (e.as_condition()) {
        EngineStep st{EngineStep::Kind::Condition, "", i, id};
        found.emplace_back(key_for(model, state, i, id), std::move(st));
      } else if (e.as_assign()) {
        EngineStep st{EngineStep::Kind::Assignment, "", i, id};
        found.emplace_back(key_for(model, state, i, id), std::move(st));
      } else if (e.as_sync()) {
        EngineStep st{EngineStep::Kind::Sync, "", i, id};
        found.emplace_back(key_for(model, state, i, id), std::move(st));
      }
    }
  }

  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<EngineStep> out;
  out.reserve(found.size());
  for (auto& [k, st] : found) out.push_back(std::move(st));
  return out;
}

std::vector<std::string> enabled_internal_events(const SystemModel& model,
                                                 const SimState& state) {
  std::vector<std::string> out;
  for (const EngineStep& st : enabled_internal_steps(model, state))
    out.push_back(step_name(model, state, st));
  return out;
}

bool is_stable(const SystemModel& model, const SimState& state) {
  if (state.violated) return true;
  return enabled_internal_steps(model, state).empty();
}

std::vector<SimState> apply_step(const SystemModel& model, const SimState& state,
                                 const std::string& event) {
  if (state.violated) throw std::logic_error("apply_step: state already violated");
  auto it = model.events.find(event);
  if (it == model.events.end())
    throw UnknownEventError("unknown event '" + event + "'");
  return {apply_event_occurrence(model, state, event)};
}

SimState apply_internal_step(const SystemModel& model, const SimState& state,
                             const EngineStep& step) {
  if (state.violated)
    throw std::logic_error("apply_internal_step: state already violated");

  if (step.kind == EngineStep::Kind::Message)
    return apply_event_occurrence(model, state, step.event);

  SimState out = state;
  RunningCopy& c = out.rl.at(step.copy_index);
  const Chart& chart = model.charts[c.chart];
  bool in_pre = chart.in_prechart(step.element);

  switch (step.kind) {
    case EngineStep::Kind::Condition: {
      auto it = chart.resolved_preds.find(step.element);
      bool ok = it != chart.resolved_preds.end() && eval_pred(out, it->second);
      if (ok) {
        advance_element(chart, c.cut, step.element);
      } else if (in_pre) {
        out.rl.erase(out.rl.begin() + step.copy_index);
      } else {
        const auto* cond = chart.element(step.element).as_condition();
        if (cond->temp == Temperature::Hot)
          out.violated = true;
        else
          out.rl.erase(out.rl.begin() + step.copy_index);
      }
      break;
    }
    case EngineStep::Kind::Assignment: {
      auto it = chart.resolved_assigns.find(step.element);
      if (it != chart.resolved_assigns.end()) out.q[it->second.slot] = it->second.value;
      advance_element(chart, c.cut, step.element);
      break;
    }
    case EngineStep::Kind::Sync:
      advance_element(chart, c.cut, step.element);
      break;
    case EngineStep::Kind::Message:
      break;
  }
  settle(model, out);
  return out;
}

// ---------------------------------------------------------------------------
// Superstep

namespace {

// Only the least active atomic copy with work may move; everything else
// waits until it has no enabled step of its own.
std::vector<EngineStep> restrict_atomic(const SystemModel& model, const SimState& state,
                                        std::vector<EngineStep> steps) {
  int winner = -1;
  for (uint32_t i = 0; i < state.rl.size(); ++i) {
    const RunningCopy& c = state.rl[i];
    if (c.mode != Mode::Active || !model.charts[c.chart].atomic) continue;
    bool has_step = false;
    for (const EngineStep& st : steps) {
      if (st.copy_index == i) has_step = true;
      if (st.kind == EngineStep::Kind::Message &&
          enabled_message_elem(model.charts[c.chart], c.cut, st.event) >= 0)
        has_step = true;
    }
    if (has_step) {
      winner = static_cast<int>(i);
      break;
    }
  }
  if (winner < 0) return steps;
  const RunningCopy& w = state.rl[winner];
  std::vector<EngineStep> out;
  for (EngineStep& st : steps) {
    if (st.copy_index == static_cast<uint32_t>(winner)) {
      out.push_back(std::move(st));
    } else if (st.kind == EngineStep::Kind::Message &&
               enabled_message_elem(model.charts[w.chart], w.cut, st.event) >= 0) {
      out.push_back(std::move(st));
    }
  }
  return out;
}

struct Explorer {
  const SystemModel& model;
  const EngineOptions& opt;
  std::map<SimState, std::set<std::string>> results;
  std::set<std::string> visited;
  std::set<std::string> on_path;

  std::string key_of(const SimState& s, const std::set<std::string>& fired) {
    std::string k = s.encode();
    for (const auto& f : fired) {
      k.push_back('\x03');
      k.append(f);
    }
    return k;
  }

  void run(const SimState& s, std::set<std::string> fired, int depth) {
    if (depth > opt.max_internal_steps)
      throw DivergenceError("internal step budget exceeded (" +
                            std::to_string(opt.max_internal_steps) + ")");
    std::string key = key_of(s, fired);
    if (on_path.count(key))
      throw DivergenceError("internal event cycle detected");
    if (visited.count(key)) return;
    visited.insert(key);

    if (s.violated) {
      results[s].insert(fired.begin(), fired.end());
      return;
    }
    std::vector<EngineStep> steps =
        restrict_atomic(model, s, enabled_internal_steps(model, s));
    if (steps.empty()) {
      results[s].insert(fired.begin(), fired.end());
      return;
    }
    if (opt.reverse_exploration) std::reverse(steps.begin(), steps.end());

    on_path.insert(key);
    for (const EngineStep& st : steps) {
      std::set<std::string> next_fired = fired;
      if (st.kind == EngineStep::Kind::Message &&
          st.event == reserved::kPropertyHold) {
        // Every active testing copy able to send right now gets credit.
        for (const RunningCopy& c : s.rl) {
          const Chart& chart = model.charts[c.chart];
          if (c.mode != Mode::Active || !chart.is_testing) continue;
          int elem = enabled_message_elem(chart, c.cut, st.event);
          if (elem >= 0 && !chart.in_prechart(static_cast<uint32_t>(elem)))
            next_fired.insert(chart.name);
        }
      }
      run(apply_internal_step(model, s, st), std::move(next_fired), depth + 1);
    }
    on_path.erase(key);
  }
};

}  // namespace

std::vector<SuperstepOutcome> superstep_traced(const SystemModel& model,
                                               const SimState& state,
                                               const std::string& event,
                                               const EngineOptions& opt) {
  if (state.violated) throw std::logic_error("superstep: state already violated");
  if (!is_stable(model, state)) throw std::logic_error("superstep: state not stable");
  auto it = model.events.find(event);
  bool marker = reserved::is_marker_event(event);
  if (!marker && (it == model.events.end() || it->second != EventClass::External))
    throw UnknownEventError("superstep needs an external or marker event, got '" +
                            event + "'");

  Explorer ex{model, opt};
  ex.run(apply_event_occurrence(model, state, event), {}, 0);

  std::vector<SuperstepOutcome> out;
  out.reserve(ex.results.size());
  for (auto& [s, fired] : ex.results) out.push_back({s, fired});
  return out;
}

std::vector<SimState> superstep(const SystemModel& model, const SimState& state,
                                const std::string& event, const EngineOptions& opt) {
  std::vector<SimState> out;
  for (auto& o : superstep_traced(model, state, event, opt)) out.push_back(std::move(o.state));
  return out;
}

}  // namespace lsc
