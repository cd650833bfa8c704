#include "lscsim/justify.hpp"

#include "lscsim/playtree.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace lsc {

namespace {

constexpr size_t kMaxGroupEvents = 64;

std::string copy_summary(const SystemModel& model, const SimState& s) {
  if (s.rl.empty()) return "";
  std::ostringstream os;
  os << " [";
  for (size_t i = 0; i < s.rl.size(); ++i) {
    if (i) os << ", ";
    const RunningCopy& c = s.rl[i];
    os << model.charts[c.chart].name << "(";
    for (size_t l = 0; l < c.cut.size(); ++l) {
      if (l) os << ",";
      os << c.cut[l];
    }
    os << ")";
  }
  os << "]";
  return os.str();
}

struct WalkItem {
  SimState state;
  Word w;
  uint32_t src_node = 0;
  int group_depth = 0;
  std::vector<std::string> group;        // events inside the open group
  std::set<std::string> pending_marks;   // fired since the last boundary
};

struct GraphBuilder {
  const SystemModel& model;
  const Grammar& grammar;
  const EngineOptions& opt;
  TransitionGraph g;
  std::map<std::string, uint32_t> node_index;
  std::set<std::string> visited;
  std::map<std::pair<uint32_t, uint32_t>, size_t> edge_index;

  uint32_t intern_node(const SimState& s) {
    std::string key = s.encode();
    auto it = node_index.find(key);
    if (it != node_index.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(g.nodes.size());
    node_index.emplace(std::move(key), id);
    TransitionGraph::Node n;
    n.key = s.encode();
    n.display = describe_valuation(model, s) + copy_summary(model, s);
    g.nodes.push_back(std::move(n));
    return id;
  }

  void add_edge(uint32_t from, uint32_t to, const std::string& label) {
    auto key = std::make_pair(from, to);
    auto it = edge_index.find(key);
    if (it == edge_index.end()) {
      g.edges.push_back({from, to, {label}});
      edge_index.emplace(key, g.edges.size() - 1);
      return;
    }
    auto& labels = g.edges[it->second].labels;
    if (std::find(labels.begin(), labels.end(), label) == labels.end())
      labels.push_back(label);
  }

  std::string item_key(const WalkItem& it) const {
    std::string key = it.state.encode();
    key.push_back('\x05');
    for (const Symbol& s : it.w) {
      key.push_back(s.terminal ? 'T' : 'V');
      key.append(std::to_string(s.index));
      key.push_back(',');
    }
    key.push_back('\x05');
    key.append(std::to_string(it.src_node));
    key.push_back('\x05');
    key.append(std::to_string(it.group_depth));
    for (const auto& e : it.group) {
      key.push_back('\x06');
      key.append(e);
    }
    for (const auto& p : it.pending_marks) {
      key.push_back('\x07');
      key.append(p);
    }
    return key;
  }

  void run() {
    for (const Chart& c : model.charts)
      if (c.is_testing) g.properties.insert(c.name);

    SimState init = initial_state(model);
    std::vector<WalkItem> stack;
    stack.push_back({init, {Symbol{false, grammar.start}}, intern_node(init), 0, {}, {}});

    while (!stack.empty()) {
      WalkItem item = std::move(stack.back());
      stack.pop_back();
      std::string key = item_key(item);
      if (!visited.insert(key).second) continue;

      if (item.w.empty()) {
        if (item.group_depth != 0)
          throw GraphBuildError("input language ends inside a parallel group");
        continue;
      }

      const Symbol& head = item.w.front();
      if (!head.terminal) {
        const auto& prods = grammar.rules.at(head.index);
        Word tail(item.w.begin() + 1, item.w.end());
        // Reverse push keeps production order on the stack.
        for (auto pit = prods.rbegin(); pit != prods.rend(); ++pit) {
          Word w2;
          if (pit->terminal) w2.push_back({true, *pit->terminal});
          if (pit->next) w2.push_back({false, *pit->next});
          w2.insert(w2.end(), tail.begin(), tail.end());
          WalkItem child = item;
          child.w = std::move(w2);
          stack.push_back(std::move(child));
        }
        continue;
      }

      const std::string& event = grammar.terminals.at(head.index);
      Word tail(item.w.begin() + 1, item.w.end());

      auto outcomes = superstep_traced(model, item.state, event, opt);
      for (const auto& o : outcomes)
        if (o.state.violated)
          throw GraphBuildError("graph construction reached a violating state; "
                                "run the consistency check first");

      if (event == reserved::kTestSF) {
        // Folded: marks land on the departure node, no edge, no node.
        for (auto& o : outcomes) {
          for (const auto& p : o.properties_fired)
            g.nodes[item.src_node].satisfied.insert(p);
          WalkItem child = item;
          child.state = std::move(o.state);
          child.w = tail;
          stack.push_back(std::move(child));
        }
        continue;
      }

      if (event == reserved::kBeginP) {
        for (auto& o : outcomes) {
          WalkItem child = item;
          child.state = std::move(o.state);
          child.w = tail;
          child.group_depth = item.group_depth + 1;
          child.pending_marks.insert(o.properties_fired.begin(), o.properties_fired.end());
          stack.push_back(std::move(child));
        }
        continue;
      }

      if (event == reserved::kEndP) {
        if (item.group_depth == 0)
          throw GraphBuildError("unbalanced parallel-group markers in input language");
        for (auto& o : outcomes) {
          WalkItem child = item;
          child.state = std::move(o.state);
          child.w = tail;
          child.group_depth = item.group_depth - 1;
          child.pending_marks.insert(o.properties_fired.begin(), o.properties_fired.end());
          if (child.group_depth == 0) {
            std::vector<std::string> sorted = child.group;
            std::sort(sorted.begin(), sorted.end());
            std::string label;
            for (size_t i = 0; i < sorted.size(); ++i) {
              if (i) label.push_back(',');
              label.append(sorted[i]);
            }
            uint32_t to = intern_node(child.state);
            if (!label.empty()) add_edge(item.src_node, to, label);
            for (const auto& p : child.pending_marks)
              g.nodes[to].satisfied.insert(p);
            child.src_node = to;
            child.group.clear();
            child.pending_marks.clear();
          }
          stack.push_back(std::move(child));
        }
        continue;
      }

      // Ordinary event.
      for (auto& o : outcomes) {
        WalkItem child = item;
        child.state = std::move(o.state);
        child.w = tail;
        child.pending_marks.insert(o.properties_fired.begin(), o.properties_fired.end());
        if (item.group_depth > 0) {
          if (child.group.size() >= kMaxGroupEvents)
            throw GraphBuildError("parallel group exceeds " +
                                  std::to_string(kMaxGroupEvents) + " events");
          child.group.push_back(event);
        } else {
          uint32_t to = intern_node(child.state);
          add_edge(item.src_node, to, event);
          for (const auto& p : child.pending_marks)
            g.nodes[to].satisfied.insert(p);
          child.src_node = to;
          child.pending_marks.clear();
        }
        stack.push_back(std::move(child));
      }
    }
  }
};

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

TransitionGraph build_transition_graph(const SystemModel& model, const Grammar& grammar,
                                       const EngineOptions& opt) {
  if (!grammar.is_right_linear())
    throw GrammarError("grammar is not right-linear; graph construction unsupported");
  GraphBuilder b{model, grammar, opt};
  b.run();
  return std::move(b.g);
}

bool eval_ctl(const TransitionGraph& graph, const CtlQuery& query) {
  if (!graph.properties.count(query.property))
    throw SemanticError({}, "unknown property '" + query.property +
                                "': no testing chart with that name");
  if (query.mode == CtlQuery::Mode::AG) {
    for (const auto& n : graph.nodes)
      if (!n.satisfied.count(query.property)) return false;
    return true;
  }
  for (const auto& n : graph.nodes)
    if (n.satisfied.count(query.property)) return true;
  return false;
}

std::string emit_dot(const TransitionGraph& graph) {
  std::ostringstream os;
  os << "digraph superstates {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=box];\n";
  for (size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& n = graph.nodes[i];
    os << "  n" << i << " [label=\"" << dot_escape(n.display) << "\"";
    if (!n.satisfied.empty()) os << ", style=filled, fillcolor=green";
    os << "];\n";
  }
  for (const auto& e : graph.edges) {
    std::string label;
    for (size_t i = 0; i < e.labels.size(); ++i) {
      if (i) label += "; ";
      label += e.labels[i];
    }
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << dot_escape(label)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string format_trace(const std::vector<std::string>& trace) {
  std::vector<std::string> parts;
  int depth = 0;
  std::vector<std::string> group;
  for (const std::string& e : trace) {
    if (e == reserved::kTestSF) continue;
    if (e == reserved::kBeginP) {
      ++depth;
      continue;
    }
    if (e == reserved::kEndP) {
      if (depth > 0) --depth;
      if (depth == 0 && !group.empty()) {
        if (group.size() == 1) {
          parts.push_back(group.front());
        } else {
          std::string buf = "[";
          for (size_t i = 0; i < group.size(); ++i) {
            if (i) buf.push_back(',');
            buf += group[i];
          }
          buf.push_back(']');
          parts.push_back(std::move(buf));
        }
        group.clear();
      }
      continue;
    }
    if (depth > 0)
      group.push_back(e);
    else
      parts.push_back(e);
  }
  for (const std::string& e : group) parts.push_back(e);  // unterminated group
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "\xC2\xB7";
    out += parts[i];
  }
  return out;
}

}  // namespace lsc
