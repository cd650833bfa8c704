#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lsc {

struct SourcePos {
  int line = 0;
  int col = 0;
};

// Malformed chart-DSL or EESL text.
class ParseError : public std::runtime_error {
public:
  ParseError(SourcePos pos, const std::string& msg);
  SourcePos pos;
};

// Well-formed text whose names or values do not resolve against the model.
class SemanticError : public std::runtime_error {
public:
  SemanticError(SourcePos pos, const std::string& msg);
  SourcePos pos;
};

enum class Temperature : uint8_t { Hot, Cold };
enum class CmpOp : uint8_t { Eq, Ne };

// Vocabulary owned by the simulator. These names are auto-registered and can
// never be declared by a model.
namespace reserved {
inline constexpr std::string_view kBeginP = "beginP";
inline constexpr std::string_view kEndP = "endP";
inline constexpr std::string_view kTestSF = "testSF";
inline constexpr std::string_view kPropertyHold = "propertyHold";
inline constexpr std::string_view kSync = "SYNC";
inline constexpr std::string_view kParControl = "ParControl";
inline constexpr std::string_view kTestControl = "testControl";

bool is_reserved_event(std::string_view name);
// Markers are fed to the engine from the compiled input language, never
// emitted by charts.
bool is_marker_event(std::string_view name);
bool is_virtual_lifeline(std::string_view name);
}  // namespace reserved

struct VarRef {
  std::string object;
  std::string var;
  bool operator==(const VarRef&) const = default;
};

struct PredAtom {
  VarRef lhs;
  CmpOp op = CmpOp::Eq;
  std::optional<VarRef> rhs_ref;  // var-to-var comparison when set
  std::string rhs_literal;        // literal comparison otherwise
  bool operator==(const PredAtom&) const = default;
};

// Conjunction of comparisons over finite-domain variables, or a constant.
struct Predicate {
  enum class Kind : uint8_t { True, False, Conjunction };
  Kind kind = Kind::True;
  std::vector<PredAtom> atoms;
  bool operator==(const Predicate&) const = default;
};

struct MessageElem {
  std::string src;
  std::string dst;
  std::string event;
  Temperature temp = Temperature::Cold;
  bool operator==(const MessageElem&) const = default;
};

struct ConditionElem {
  std::string instance;
  Predicate pred;
  Temperature temp = Temperature::Cold;
  bool operator==(const ConditionElem&) const = default;
};

struct AssignElem {
  std::string instance;
  std::string var;
  std::string value;
  bool operator==(const AssignElem&) const = default;
};

// Location barrier: advances all participating lifelines together.
struct SyncElem {
  std::vector<std::string> instances;
  bool operator==(const SyncElem&) const = default;
};

struct Element {
  std::variant<MessageElem, ConditionElem, AssignElem, SyncElem> body;
  SourcePos pos;

  const MessageElem* as_message() const { return std::get_if<MessageElem>(&body); }
  const ConditionElem* as_condition() const { return std::get_if<ConditionElem>(&body); }
  const AssignElem* as_assign() const { return std::get_if<AssignElem>(&body); }
  const SyncElem* as_sync() const { return std::get_if<SyncElem>(&body); }
};

struct VarDecl {
  std::string name;
  std::vector<std::string> domain;
  std::string init;
};

struct ObjectDecl {
  std::string name;
  std::vector<VarDecl> vars;
};

// Per-lifeline location indexes of one running copy. cut[l] counts elements
// already passed on lifeline l.
using Cut = std::vector<uint16_t>;

struct Diagnostic {
  SourcePos pos;
  std::string message;
};

// Condition/assignment payloads resolved to variable slots for evaluation.
struct ResolvedAtom {
  uint32_t lhs_slot = 0;
  CmpOp op = CmpOp::Eq;
  bool rhs_is_slot = false;
  uint32_t rhs_slot = 0;
  uint8_t rhs_value = 0;
};

struct ResolvedPred {
  Predicate::Kind kind = Predicate::Kind::True;
  std::vector<ResolvedAtom> atoms;
};

struct ResolvedAssign {
  uint32_t slot = 0;
  uint8_t value = 0;
};

class Chart {
public:
  std::string name;
  bool atomic = false;
  std::vector<std::string> instances;  // lifelines, may include virtual ones
  std::vector<Element> prechart;
  std::vector<Element> main;

  // Derived layout, filled by finalize_model. Element ids index prechart
  // elements first, then main-chart elements.
  std::vector<std::vector<uint32_t>> lifeline_elems;  // lifeline -> element ids
  std::vector<uint16_t> prechart_lens;                // per lifeline
  std::set<std::string> alphabet;                     // message events anywhere
  std::set<std::string> activating_events;            // minimal prechart events
  bool is_testing = false;  // sends propertyHold from its main chart
  std::map<uint32_t, ResolvedPred> resolved_preds;
  std::map<uint32_t, ResolvedAssign> resolved_assigns;

  size_t lifeline_count() const { return instances.size(); }
  size_t element_count() const { return prechart.size() + main.size(); }
  const Element& element(uint32_t id) const {
    return id < prechart.size() ? prechart[id] : main[id - prechart.size()];
  }
  bool in_prechart(uint32_t id) const { return id < prechart.size(); }
  int lifeline_index(std::string_view inst) const;

  // Positions (lifeline, index) an element occupies; one per distinct lifeline.
  std::vector<std::pair<uint16_t, uint16_t>> element_positions(uint32_t id) const;

  Cut zero_cut() const { return Cut(instances.size(), 0); }
  Cut full_cut() const;

  // A cut is legal when it is within bounds and downward-closed: lifelines
  // sharing an element agree on whether it has been passed.
  bool is_legal_cut(const Cut& cut) const;
};

std::vector<Diagnostic> validate_cut(const Chart& chart, const Cut& cut);

enum class EventClass : uint8_t { External, Internal, Hidden };

struct SystemModel {
  std::vector<ObjectDecl> objects;
  std::vector<std::string> external_events;  // the alphabet, declaration order
  std::vector<Chart> charts;

  // Derived tables, filled by finalize_model.
  struct VarSlot {
    std::string object;
    std::string var;
    std::vector<std::string> domain;
    uint8_t init_index = 0;
  };
  std::vector<VarSlot> var_slots;
  std::map<std::string, uint32_t, std::less<>> slot_by_name;  // "obj.var"
  std::map<std::string, EventClass, std::less<>> events;      // every known event

  std::optional<uint32_t> find_slot(std::string_view object, std::string_view var) const;
  std::optional<uint8_t> literal_index(uint32_t slot, std::string_view literal) const;
  bool is_external(std::string_view event) const;
  const Chart* find_chart(std::string_view name) const;
};

// Parses the chart DSL. The returned model is finalized and satisfies every
// structural invariant; violations raise ParseError or SemanticError.
SystemModel parse_model(std::string_view text);

// Recomputes the derived tables after direct mutation of a model. Lenient:
// structural problems are left for validate_model to report.
void finalize_model(SystemModel& model);

// Renders a model back to DSL text. parse_model(pretty_print(m)) reproduces m.
std::string pretty_print(const SystemModel& model);

// Structural invariant check; empty result means the model is well-formed.
std::vector<Diagnostic> validate_model(const SystemModel& model);

}  // namespace lsc
