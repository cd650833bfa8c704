#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lscsim/model.hpp"

namespace lsc {

// Input-language AST. Nodes are immutable and shared.
struct AstNode;
using AstPtr = std::shared_ptr<const AstNode>;

struct AstNode {
  enum class Kind : uint8_t { Lambda, Atom, Test, Group, Star, Concat, Union, Par };
  Kind kind = Kind::Lambda;
  std::string atom;    // Atom only
  AstPtr left;         // unary child / left operand
  AstPtr right;        // right operand
};

AstPtr make_lambda();
AstPtr make_atom(std::string name);
AstPtr make_test(AstPtr inner);
AstPtr make_group(AstPtr inner);
AstPtr make_star(AstPtr inner);
AstPtr make_concat(AstPtr l, AstPtr r);
AstPtr make_union(AstPtr l, AstPtr r);
AstPtr make_par(AstPtr l, AstPtr r);

// Parses an expression over `alphabet`; the marker events beginP, endP and
// testSF are always admitted as atoms. Both the unicode operators
// (· ‖ ⟨ ⟩ λ) and their ASCII spellings (. || < > and the empty string) are
// accepted. Operator precedence, tightest first: * · ‖ +.
AstPtr parse_eesl(std::string_view text, const std::set<std::string>& alphabet);

std::string ast_to_string(const AstPtr& ast);

// Prefixes every single external event and every parallel group with one
// testSF. Nothing is injected inside a parallel group, and explicit test
// atoms keep their single testSF.
AstPtr apply_testing_mode(const AstPtr& ast);

// Removes Par and Test nodes. ⟨a⟩ becomes testSF·a. S1‖S2 becomes
// beginP·(S1 + S2 + shuffle(S1,S2))·endP, where two plain events shuffle to
// ab+ba and larger operands go through an interleaving automaton product.
AstPtr desugar(const AstPtr& ast);

class GrammarError : public std::runtime_error {
public:
  explicit GrammarError(const std::string& msg) : std::runtime_error(msg) {}
};

// Right-linear word grammar. Production shapes: λ, terminal, terminal+next.
struct Grammar {
  struct Production {
    std::optional<uint32_t> terminal;
    std::optional<uint32_t> next;
    friend bool operator==(const Production&, const Production&) = default;
  };
  std::vector<std::string> terminals;          // first-appearance order
  std::vector<std::vector<Production>> rules;  // indexed by variable
  uint32_t start = 0;

  bool is_right_linear() const;
  // One line per variable: "V0 -> λ | createOrder V1".
  std::string dump() const;
  friend bool operator==(const Grammar&, const Grammar&) = default;
};

// Thompson construction, epsilon-closure subset determinization, removal of
// states that cannot reach acceptance, then one variable per remaining state.
// A variable's λ-production comes first; its other productions follow the
// terminal order. Requires a desugared AST.
Grammar compile_to_grammar(const AstPtr& ast);

}  // namespace lsc
