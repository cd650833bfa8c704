#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "lscsim/eesl.hpp"
#include "lscsim/engine.hpp"
#include "lscsim/model.hpp"

namespace lsc {

// Super-state graph over the stable states visited while consuming the input
// language. Nodes sit at observation boundaries: the initial state, the state
// after each single external event, and the state after a complete parallel
// group. Check-point supersteps are folded away; their marks attach to the
// node they depart from.
struct TransitionGraph {
  struct Node {
    std::string key;                  // canonical state encoding
    std::string display;              // valuation plus running-copy summary
    std::set<std::string> satisfied;  // testing charts that held here
  };
  struct Edge {
    uint32_t from = 0;
    uint32_t to = 0;
    std::vector<std::string> labels;  // unique, first-seen order
  };

  std::vector<Node> nodes;  // creation order; node 0 is the initial state
  std::vector<Edge> edges;  // creation order
  std::set<std::string> properties;  // testing charts present in the model
};

struct CtlQuery {
  enum class Mode : uint8_t { AG, EF } mode = Mode::AG;
  std::string property;  // testing chart name
};

class GraphBuildError : public std::runtime_error {
public:
  explicit GraphBuildError(const std::string& msg) : std::runtime_error(msg) {}
};

// Walks every word of the grammar over the superstep relation and folds the
// visits into the super-state graph. The model must already have passed the
// consistency check; reaching a violated state raises GraphBuildError.
TransitionGraph build_transition_graph(const SystemModel& model, const Grammar& grammar,
                                       const EngineOptions& opt = {});

// AG: the property chart held at every node. EF: at some node.
bool eval_ctl(const TransitionGraph& graph, const CtlQuery& query);

// Graphviz rendering, stable across runs. Satisfied nodes are filled green.
std::string emit_dot(const TransitionGraph& graph);

// Human-readable trace: markers folded away, parallel groups bracketed, e.g.
// "createOrder·[createAbort,createConfirm]".
std::string format_trace(const std::vector<std::string>& trace);

}  // namespace lsc
