#include "lscsim/eesl.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

namespace lsc {

// ---------------------------------------------------------------------------
// Node factories

namespace {

AstPtr node(AstNode::Kind k, std::string atom = {}, AstPtr l = nullptr, AstPtr r = nullptr) {
  auto n = std::make_shared<AstNode>();
  n->kind = k;
  n->atom = std::move(atom);
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

}  // namespace

AstPtr make_lambda() { return node(AstNode::Kind::Lambda); }
AstPtr make_atom(std::string name) { return node(AstNode::Kind::Atom, std::move(name)); }
AstPtr make_test(AstPtr inner) { return node(AstNode::Kind::Test, {}, std::move(inner)); }
AstPtr make_group(AstPtr inner) { return node(AstNode::Kind::Group, {}, std::move(inner)); }
AstPtr make_star(AstPtr inner) { return node(AstNode::Kind::Star, {}, std::move(inner)); }
AstPtr make_concat(AstPtr l, AstPtr r) {
  return node(AstNode::Kind::Concat, {}, std::move(l), std::move(r));
}
AstPtr make_union(AstPtr l, AstPtr r) {
  return node(AstNode::Kind::Union, {}, std::move(l), std::move(r));
}
AstPtr make_par(AstPtr l, AstPtr r) {
  return node(AstNode::Kind::Par, {}, std::move(l), std::move(r));
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class ETok : uint8_t {
  Atom,
  Dot,
  Par,
  Plus,
  Star,
  LParen,
  RParen,
  LAngle,
  RAngle,
  Lambda,
  End,
};

struct EToken {
  ETok kind;
  std::string text;
  SourcePos pos;
};

class EeslLexer {
public:
  explicit EeslLexer(std::string_view src) : src_(src) {}

  std::vector<EToken> run() {
    std::vector<EToken> out;
    while (i_ < src_.size()) {
      char c = src_[i_];
      SourcePos pos{line_, col_};
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        step(1);
        continue;
      }
      if (try_multibyte(out, pos)) continue;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (i_ < src_.size()) {
          char d = src_[i_];
          if (!std::isalnum(static_cast<unsigned char>(d)) && d != '_') break;
          word.push_back(d);
          step(1);
        }
        out.push_back({ETok::Atom, std::move(word), pos});
        continue;
      }
      switch (c) {
        case '.': step(1); out.push_back({ETok::Dot, ".", pos}); continue;
        case '+': step(1); out.push_back({ETok::Plus, "+", pos}); continue;
        case '*': step(1); out.push_back({ETok::Star, "*", pos}); continue;
        case '(': step(1); out.push_back({ETok::LParen, "(", pos}); continue;
        case ')': step(1); out.push_back({ETok::RParen, ")", pos}); continue;
        case '<': step(1); out.push_back({ETok::LAngle, "<", pos}); continue;
        case '>': step(1); out.push_back({ETok::RAngle, ">", pos}); continue;
        case '|':
          if (i_ + 1 < src_.size() && src_[i_ + 1] == '|') {
            step(2);
            out.push_back({ETok::Par, "||", pos});
            continue;
          }
          throw ParseError(pos, "expected '||'");
        default:
          throw ParseError(pos, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({ETok::End, "", SourcePos{line_, col_}});
    return out;
  }

private:
  bool starts_with(std::string_view s) const {
    return src_.substr(i_, s.size()) == s;
  }
  bool try_multibyte(std::vector<EToken>& out, SourcePos pos) {
    struct Sym {
      std::string_view bytes;
      ETok kind;
    };
    static constexpr Sym kSyms[] = {
        {"\xC2\xB7", ETok::Dot},           // middle dot
        {"\xE2\x80\x96", ETok::Par},       // double vertical line
        {"\xE2\x9F\xA8", ETok::LAngle},    // mathematical left angle bracket
        {"\xE2\x9F\xA9", ETok::RAngle},    // mathematical right angle bracket
        {"\xCE\xBB", ETok::Lambda},        // lambda
    };
    for (const Sym& s : kSyms) {
      if (starts_with(s.bytes)) {
        step(s.bytes.size());
        out.push_back({s.kind, std::string(s.bytes), pos});
        return true;
      }
    }
    return false;
  }
  void step(size_t n) {
    for (size_t k = 0; k < n && i_ < src_.size(); ++k) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++i_;
    }
  }

  std::string_view src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser. Precedence, loosest to tightest: + then ‖ then · then *.

class EeslParser {
public:
  EeslParser(std::string_view text, const std::set<std::string>& alphabet)
      : toks_(EeslLexer(text).run()), alphabet_(alphabet) {}

  AstPtr run() {
    if (at(ETok::End)) return make_lambda();
    AstPtr ast = parse_union();
    if (!at(ETok::End)) throw ParseError(cur().pos, "trailing input after expression");
    return ast;
  }

private:
  const EToken& cur() const { return toks_[i_]; }
  bool at(ETok k) const { return cur().kind == k; }
  const EToken& next() { return toks_[i_++]; }

  AstPtr parse_union() {
    AstPtr l = parse_par();
    while (at(ETok::Plus)) {
      next();
      l = make_union(std::move(l), parse_par());
    }
    return l;
  }

  AstPtr parse_par() {
    AstPtr l = parse_concat();
    while (at(ETok::Par)) {
      next();
      l = make_par(std::move(l), parse_concat());
    }
    return l;
  }

  AstPtr parse_concat() {
    AstPtr l = parse_star();
    while (at(ETok::Dot)) {
      next();
      l = make_concat(std::move(l), parse_star());
    }
    return l;
  }

  AstPtr parse_star() {
    AstPtr p = parse_primary();
    while (at(ETok::Star)) {
      next();
      p = make_star(std::move(p));
    }
    return p;
  }

  AstPtr parse_primary() {
    const EToken& t = cur();
    switch (t.kind) {
      case ETok::LParen: {
        next();
        AstPtr inner = parse_union();
        if (!at(ETok::RParen)) throw ParseError(cur().pos, "expected ')'");
        next();
        return make_group(std::move(inner));
      }
      case ETok::LAngle: {
        next();
        if (!at(ETok::Atom)) throw ParseError(cur().pos, "expected event inside test");
        AstPtr a = parse_atom();
        if (!at(ETok::RAngle)) throw ParseError(cur().pos, "expected closing angle bracket");
        next();
        return make_test(std::move(a));
      }
      case ETok::Atom:
        return parse_atom();
      case ETok::Lambda:
        next();
        return make_lambda();
      default:
        throw ParseError(t.pos, "expected event, '(', test or λ");
    }
  }

  AstPtr parse_atom() {
    const EToken& t = next();
    if (!alphabet_.count(t.text) && !reserved::is_marker_event(t.text))
      throw SemanticError(t.pos, "event '" + t.text + "' is not in the alphabet");
    return make_atom(t.text);
  }

  std::vector<EToken> toks_;
  size_t i_ = 0;
  const std::set<std::string>& alphabet_;
};

}  // namespace

AstPtr parse_eesl(std::string_view text, const std::set<std::string>& alphabet) {
  return EeslParser(text, alphabet).run();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int prec_of(const AstNode& n) {
  switch (n.kind) {
    case AstNode::Kind::Union: return 1;
    case AstNode::Kind::Par: return 2;
    case AstNode::Kind::Concat: return 3;
    case AstNode::Kind::Star: return 4;
    default: return 5;
  }
}

void print_node(std::ostringstream& os, const AstPtr& n, int parent_prec) {
  int p = prec_of(*n);
  bool wrap = p < parent_prec;
  if (wrap) os << "(";
  switch (n->kind) {
    case AstNode::Kind::Lambda: os << "\xCE\xBB"; break;
    case AstNode::Kind::Atom: os << n->atom; break;
    case AstNode::Kind::Test:
      os << "\xE2\x9F\xA8";
      print_node(os, n->left, 0);
      os << "\xE2\x9F\xA9";
      break;
    case AstNode::Kind::Group:
      os << "(";
      print_node(os, n->left, 0);
      os << ")";
      break;
    case AstNode::Kind::Star:
      print_node(os, n->left, 5);
      os << "*";
      break;
    case AstNode::Kind::Concat:
      print_node(os, n->left, 3);
      os << "\xC2\xB7";
      print_node(os, n->right, 4);
      break;
    case AstNode::Kind::Union:
      print_node(os, n->left, 1);
      os << "+";
      print_node(os, n->right, 2);
      break;
    case AstNode::Kind::Par:
      print_node(os, n->left, 2);
      os << "\xE2\x80\x96";
      print_node(os, n->right, 3);
      break;
  }
  if (wrap) os << ")";
}

}  // namespace

std::string ast_to_string(const AstPtr& ast) {
  std::ostringstream os;
  print_node(os, ast, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Testing mode

AstPtr apply_testing_mode(const AstPtr& ast) {
  switch (ast->kind) {
    case AstNode::Kind::Lambda:
      return ast;
    case AstNode::Kind::Atom:
      if (reserved::is_marker_event(ast->atom)) return ast;
      return make_concat(make_atom(std::string(reserved::kTestSF)), ast);
    case AstNode::Kind::Test:
      // Already checks before its event; desugaring adds the single testSF.
      return ast;
    case AstNode::Kind::Group:
      return make_group(apply_testing_mode(ast->left));
    case AstNode::Kind::Star:
      return make_star(apply_testing_mode(ast->left));
    case AstNode::Kind::Concat:
      return make_concat(apply_testing_mode(ast->left), apply_testing_mode(ast->right));
    case AstNode::Kind::Union:
      return make_union(apply_testing_mode(ast->left), apply_testing_mode(ast->right));
    case AstNode::Kind::Par:
      // One check before the whole group, nothing inside it.
      return make_concat(make_atom(std::string(reserved::kTestSF)), ast);
  }
  return ast;
}

// ---------------------------------------------------------------------------
// NFA machinery, shared by desugaring and compilation.

namespace {

struct Nfa {
  struct Edge {
    int to = 0;
    int term = -1;  // -1: epsilon
  };
  std::vector<std::vector<Edge>> adj;
  int start = 0;
  int accept = 0;

  int add_state() {
    adj.emplace_back();
    return static_cast<int>(adj.size()) - 1;
  }
  void add_edge(int from, int to, int term) { adj[from].push_back({to, term}); }
};

struct Frag {
  int start;
  int accept;
};

void collect_terminals(const AstPtr& n, std::vector<std::string>& out,
                       std::map<std::string, int>& index) {
  switch (n->kind) {
    case AstNode::Kind::Lambda:
      return;
    case AstNode::Kind::Atom:
      if (!index.count(n->atom)) {
        index[n->atom] = static_cast<int>(out.size());
        out.push_back(n->atom);
      }
      return;
    case AstNode::Kind::Test:
    case AstNode::Kind::Group:
    case AstNode::Kind::Star:
      collect_terminals(n->left, out, index);
      return;
    case AstNode::Kind::Concat:
    case AstNode::Kind::Union:
    case AstNode::Kind::Par:
      collect_terminals(n->left, out, index);
      collect_terminals(n->right, out, index);
      return;
  }
}

Frag thompson(const AstPtr& n, Nfa& nfa, const std::map<std::string, int>& term_index) {
  switch (n->kind) {
    case AstNode::Kind::Lambda: {
      int s = nfa.add_state(), a = nfa.add_state();
      nfa.add_edge(s, a, -1);
      return {s, a};
    }
    case AstNode::Kind::Atom: {
      int s = nfa.add_state(), a = nfa.add_state();
      nfa.add_edge(s, a, term_index.at(n->atom));
      return {s, a};
    }
    case AstNode::Kind::Group:
      return thompson(n->left, nfa, term_index);
    case AstNode::Kind::Star: {
      Frag c = thompson(n->left, nfa, term_index);
      int s = nfa.add_state(), a = nfa.add_state();
      nfa.add_edge(s, c.start, -1);
      nfa.add_edge(s, a, -1);
      nfa.add_edge(c.accept, c.start, -1);
      nfa.add_edge(c.accept, a, -1);
      return {s, a};
    }
    case AstNode::Kind::Concat: {
      Frag l = thompson(n->left, nfa, term_index);
      Frag r = thompson(n->right, nfa, term_index);
      nfa.add_edge(l.accept, r.start, -1);
      return {l.start, r.accept};
    }
    case AstNode::Kind::Union: {
      Frag l = thompson(n->left, nfa, term_index);
      Frag r = thompson(n->right, nfa, term_index);
      int s = nfa.add_state(), a = nfa.add_state();
      nfa.add_edge(s, l.start, -1);
      nfa.add_edge(s, r.start, -1);
      nfa.add_edge(l.accept, a, -1);
      nfa.add_edge(r.accept, a, -1);
      return {s, a};
    }
    case AstNode::Kind::Test:
    case AstNode::Kind::Par:
      throw GrammarError("expression must be desugared before automaton construction");
  }
  throw GrammarError("unreachable");
}

Nfa build_nfa(const AstPtr& ast, const std::map<std::string, int>& term_index) {
  Nfa nfa;
  Frag f = thompson(ast, nfa, term_index);
  nfa.start = f.start;
  nfa.accept = f.accept;
  return nfa;
}

// Asynchronous product: accepts exactly the interleavings of one word from
// each operand.
Nfa product_nfa(const Nfa& a, const Nfa& b) {
  Nfa p;
  int nb = static_cast<int>(b.adj.size());
  auto id = [nb](int i, int j) { return i * nb + j; };
  int total = static_cast<int>(a.adj.size()) * nb;
  for (int k = 0; k < total; ++k) p.add_state();
  for (int i = 0; i < static_cast<int>(a.adj.size()); ++i) {
    for (int j = 0; j < nb; ++j) {
      for (const Nfa::Edge& e : a.adj[i]) p.add_edge(id(i, j), id(e.to, j), e.term);
      for (const Nfa::Edge& e : b.adj[j]) p.add_edge(id(i, j), id(i, e.to), e.term);
    }
  }
  p.start = id(a.start, b.start);
  p.accept = id(a.accept, b.accept);
  return p;
}

// Regex combinators over a nullable representation; nullptr is the empty
// language.
AstPtr rx_union(AstPtr a, AstPtr b) {
  if (!a) return b;
  if (!b) return a;
  return make_union(std::move(a), std::move(b));
}

AstPtr rx_concat(AstPtr a, AstPtr b) {
  if (!a || !b) return nullptr;
  if (a->kind == AstNode::Kind::Lambda) return b;
  if (b->kind == AstNode::Kind::Lambda) return a;
  return make_concat(std::move(a), std::move(b));
}

AstPtr rx_star(AstPtr a) {
  if (!a || a->kind == AstNode::Kind::Lambda) return make_lambda();
  if (a->kind == AstNode::Kind::Star) return a;
  return make_star(std::move(a));
}

// State elimination, ascending state order. Deterministic.
AstPtr nfa_to_regex(const Nfa& nfa, const std::vector<std::string>& terminals) {
  int n = static_cast<int>(nfa.adj.size());
  int src = n, dst = n + 1;
  std::vector<std::vector<AstPtr>> r(n + 2, std::vector<AstPtr>(n + 2));
  for (int i = 0; i < n; ++i) {
    for (const Nfa::Edge& e : nfa.adj[i]) {
      AstPtr label = e.term < 0 ? make_lambda() : make_atom(terminals[e.term]);
      r[i][e.to] = rx_union(std::move(r[i][e.to]), std::move(label));
    }
  }
  r[src][nfa.start] = make_lambda();
  r[nfa.accept][dst] = make_lambda();

  std::vector<bool> gone(n + 2, false);
  for (int k = 0; k < n; ++k) {
    AstPtr loop = rx_star(r[k][k]);
    for (int u = 0; u < n + 2; ++u) {
      if (gone[u] || u == k || !r[u][k]) continue;
      for (int v = 0; v < n + 2; ++v) {
        if (gone[v] || v == k || !r[k][v]) continue;
        AstPtr via = rx_concat(r[u][k], rx_concat(loop, r[k][v]));
        r[u][v] = rx_union(std::move(r[u][v]), std::move(via));
      }
    }
    gone[k] = true;
    for (int u = 0; u < n + 2; ++u) {
      r[u][k] = nullptr;
      r[k][u] = nullptr;
    }
  }
  return r[src][dst];
}

AstPtr shuffle_regex(const AstPtr& l, const AstPtr& r) {
  std::vector<std::string> terms;
  std::map<std::string, int> index;
  collect_terminals(l, terms, index);
  collect_terminals(r, terms, index);
  Nfa nl = build_nfa(l, index);
  Nfa nr = build_nfa(r, index);
  Nfa prod = product_nfa(nl, nr);
  return nfa_to_regex(prod, terms);
}

}  // namespace

// ---------------------------------------------------------------------------
// Desugaring

AstPtr desugar(const AstPtr& ast) {
  switch (ast->kind) {
    case AstNode::Kind::Lambda:
    case AstNode::Kind::Atom:
      return ast;
    case AstNode::Kind::Test:
      return make_concat(make_atom(std::string(reserved::kTestSF)), desugar(ast->left));
    case AstNode::Kind::Group:
      return make_group(desugar(ast->left));
    case AstNode::Kind::Star:
      return make_star(desugar(ast->left));
    case AstNode::Kind::Concat:
      return make_concat(desugar(ast->left), desugar(ast->right));
    case AstNode::Kind::Union:
      return make_union(desugar(ast->left), desugar(ast->right));
    case AstNode::Kind::Par: {
      AstPtr l = desugar(ast->left);
      AstPtr r = desugar(ast->right);
      AstPtr mixed;
      if (l->kind == AstNode::Kind::Atom && r->kind == AstNode::Kind::Atom) {
        mixed = make_union(make_concat(l, r), make_concat(r, l));
      } else {
        mixed = shuffle_regex(l, r);
      }
      AstPtr inner = make_union(l, make_union(r, std::move(mixed)));
      return make_concat(
          make_atom(std::string(reserved::kBeginP)),
          make_concat(make_group(std::move(inner)),
                      make_atom(std::string(reserved::kEndP))));
    }
  }
  return ast;
}

// ---------------------------------------------------------------------------
// Grammar

bool Grammar::is_right_linear() const {
  for (const auto& prods : rules) {
    for (const Production& p : prods) {
      if (p.next && !p.terminal) return false;
      if (p.terminal && *p.terminal >= terminals.size()) return false;
      if (p.next && *p.next >= rules.size()) return false;
    }
  }
  return start < rules.size() || rules.empty();
}

std::string Grammar::dump() const {
  std::ostringstream os;
  for (size_t v = 0; v < rules.size(); ++v) {
    os << "V" << v << " ->";
    if (rules[v].empty()) {
      os << " \xE2\x88\x85";  // no productions: dead variable
    } else {
      for (size_t i = 0; i < rules[v].size(); ++i) {
        os << (i ? " | " : " ");
        const Production& p = rules[v][i];
        if (!p.terminal) {
          os << "\xCE\xBB";
        } else {
          os << terminals[*p.terminal];
          if (p.next) os << " V" << *p.next;
        }
      }
    }
    os << "\n";
  }
  return os.str();
}

Grammar compile_to_grammar(const AstPtr& ast) {
  Grammar g;
  std::map<std::string, int> term_index;
  collect_terminals(ast, g.terminals, term_index);

  Nfa nfa = build_nfa(ast, term_index);
  int nterms = static_cast<int>(g.terminals.size());

  auto closure = [&nfa](std::vector<int> states) {
    std::set<int> seen(states.begin(), states.end());
    std::vector<int> work = states;
    while (!work.empty()) {
      int s = work.back();
      work.pop_back();
      for (const Nfa::Edge& e : nfa.adj[s])
        if (e.term < 0 && seen.insert(e.to).second) work.push_back(e.to);
    }
    return std::vector<int>(seen.begin(), seen.end());  // sorted
  };

  // Subset construction; states numbered in discovery order.
  std::map<std::vector<int>, int> dfa_index;
  std::vector<std::vector<int>> dfa_sets;
  std::vector<std::vector<int>> dfa_edges;  // per state, per terminal, -1 if none
  std::vector<bool> dfa_accept;

  auto intern = [&](std::vector<int> set) {
    auto it = dfa_index.find(set);
    if (it != dfa_index.end()) return it->second;
    int id = static_cast<int>(dfa_sets.size());
    dfa_index.emplace(set, id);
    bool acc = std::binary_search(set.begin(), set.end(), nfa.accept);
    dfa_sets.push_back(std::move(set));
    dfa_edges.emplace_back(nterms, -1);
    dfa_accept.push_back(acc);
    return id;
  };

  intern(closure({nfa.start}));
  for (size_t cur = 0; cur < dfa_sets.size(); ++cur) {
    for (int t = 0; t < nterms; ++t) {
      std::vector<int> moved;
      for (int s : dfa_sets[cur])
        for (const Nfa::Edge& e : nfa.adj[s])
          if (e.term == t) moved.push_back(e.to);
      if (moved.empty()) continue;
      dfa_edges[cur][t] = intern(closure(std::move(moved)));
    }
  }

  // Keep only states that reach acceptance.
  int nstates = static_cast<int>(dfa_sets.size());
  std::vector<std::vector<int>> rev(nstates);
  for (int s = 0; s < nstates; ++s)
    for (int t = 0; t < nterms; ++t)
      if (dfa_edges[s][t] >= 0) rev[dfa_edges[s][t]].push_back(s);
  std::vector<bool> live(nstates, false);
  std::vector<int> work;
  for (int s = 0; s < nstates; ++s)
    if (dfa_accept[s]) {
      live[s] = true;
      work.push_back(s);
    }
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    for (int p : rev[s])
      if (!live[p]) {
        live[p] = true;
        work.push_back(p);
      }
  }

  std::vector<int> remap(nstates, -1);
  int next_var = 0;
  for (int s = 0; s < nstates; ++s)
    if (live[s]) remap[s] = next_var++;

  if (!live[0]) {
    // Empty language: a single start variable with no productions.
    g.rules.emplace_back();
    g.start = 0;
    return g;
  }

  g.rules.assign(next_var, {});
  g.start = static_cast<uint32_t>(remap[0]);
  for (int s = 0; s < nstates; ++s) {
    if (!live[s]) continue;
    auto& prods = g.rules[remap[s]];
    if (dfa_accept[s]) prods.push_back({std::nullopt, std::nullopt});
    for (int t = 0; t < nterms; ++t) {
      int to = dfa_edges[s][t];
      if (to < 0 || !live[to]) continue;
      prods.push_back({static_cast<uint32_t>(t), static_cast<uint32_t>(remap[to])});
    }
  }
  return g;
}

}  // namespace lsc
