#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "lscsim/model.hpp"

namespace lsc {

// Exceeded internal-step budget or an internal event cycle inside one
// superstep.
class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Event name the engine cannot dispatch (internal to charts, or unknown).
class UnknownEventError : public std::runtime_error {
public:
  explicit UnknownEventError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Mode : uint8_t { PreActive, Active };

struct RunningCopy {
  uint16_t chart = 0;
  Mode mode = Mode::PreActive;
  Cut cut;

  friend auto operator<=>(const RunningCopy&, const RunningCopy&) = default;
};

// One simulation super state: variable valuation, running copies, violation
// flag. Copies are kept sorted and duplicate-free; equal states have equal
// encodings.
struct SimState {
  std::vector<uint8_t> q;  // indexes into the flattened variable domains
  std::vector<RunningCopy> rl;
  bool violated = false;

  void canonicalize();
  std::string encode() const;
  friend auto operator<=>(const SimState&, const SimState&) = default;
};

// Renders q as sorted "obj.var=value" pairs, e.g. "{RBC.conf=false, STC.conf=true}".
std::string describe_valuation(const SystemModel& model, const SimState& state);

SimState initial_state(const SystemModel& model);

struct EngineOptions {
  int max_internal_steps = 10000;
  // Explores interleavings in reverse order. The set of stable states must
  // not depend on this; tests rely on that.
  bool reverse_exploration = false;
};

// One executable engine step. Message steps carry the event to broadcast;
// the remaining kinds act on a single copy, identified by its position in
// the canonical copy list of the state they were enumerated from.
struct EngineStep {
  enum class Kind : uint8_t { Message, Condition, Assignment, Sync } kind;
  std::string event;       // Message only
  uint32_t copy_index = 0; // owning copy (for Message: canonical sender)
  uint32_t element = 0;    // element id within the copy's chart
};

// Spontaneous steps available in a state, canonically ordered by
// (chart name, lifeline index, location index). A message event appears once
// even when several copies could send it. Requires state.violated == false.
std::vector<EngineStep> enabled_internal_steps(const SystemModel& model,
                                               const SimState& state);

// Names of the enabled steps, same order.
std::vector<std::string> enabled_internal_events(const SystemModel& model,
                                                 const SimState& state);

bool is_stable(const SystemModel& model, const SimState& state);

// Processes the occurrence of a message event: activates matching precharts,
// advances enabled copies, applies the out-of-order rules, drops completed
// copies. Deterministic; the vector always has exactly one element.
std::vector<SimState> apply_step(const SystemModel& model, const SimState& state,
                                 const std::string& event);

// Applies one enumerated internal step.
SimState apply_internal_step(const SystemModel& model, const SimState& state,
                             const EngineStep& step);

// All stable states reachable from `state` after the occurrence of external
// or marker event `event`, exploring every interleaving of internal steps.
// Requires a stable, non-violated state. Result is sorted and duplicate-free.
std::vector<SimState> superstep(const SystemModel& model, const SimState& state,
                                const std::string& event,
                                const EngineOptions& opt = {});

struct SuperstepOutcome {
  SimState state;
  // Testing charts whose propertyHold fired on some path to this state.
  std::set<std::string> properties_fired;
};

std::vector<SuperstepOutcome> superstep_traced(const SystemModel& model,
                                               const SimState& state,
                                               const std::string& event,
                                               const EngineOptions& opt = {});

}  // namespace lsc
