#include "lscsim/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lsc {

namespace {

std::string pos_prefix(SourcePos pos, const std::string& msg) {
  std::ostringstream os;
  os << pos.line << ":" << pos.col << ": " << msg;
  return os.str();
}

}  // namespace

ParseError::ParseError(SourcePos p, const std::string& msg)
    : std::runtime_error(pos_prefix(p, msg)), pos(p) {}

SemanticError::SemanticError(SourcePos p, const std::string& msg)
    : std::runtime_error(pos_prefix(p, msg)), pos(p) {}

namespace reserved {

bool is_reserved_event(std::string_view name) {
  return name == kBeginP || name == kEndP || name == kTestSF ||
         name == kPropertyHold || name == kSync;
}

bool is_marker_event(std::string_view name) {
  return name == kBeginP || name == kEndP || name == kTestSF;
}

bool is_virtual_lifeline(std::string_view name) {
  return name == kParControl || name == kTestControl;
}

}  // namespace reserved

// ---------------------------------------------------------------------------
// Chart layout

int Chart::lifeline_index(std::string_view inst) const {
  for (size_t i = 0; i < instances.size(); ++i)
    if (instances[i] == inst) return static_cast<int>(i);
  return -1;
}

std::vector<std::pair<uint16_t, uint16_t>> Chart::element_positions(uint32_t id) const {
  std::vector<std::pair<uint16_t, uint16_t>> out;
  for (uint16_t l = 0; l < lifeline_elems.size(); ++l) {
    const auto& col = lifeline_elems[l];
    for (uint16_t p = 0; p < col.size(); ++p)
      if (col[p] == id) out.emplace_back(l, p);
  }
  return out;
}

Cut Chart::full_cut() const {
  Cut cut(instances.size(), 0);
  for (size_t l = 0; l < lifeline_elems.size(); ++l)
    cut[l] = static_cast<uint16_t>(lifeline_elems[l].size());
  return cut;
}

bool Chart::is_legal_cut(const Cut& cut) const {
  if (cut.size() != instances.size()) return false;
  for (size_t l = 0; l < cut.size(); ++l)
    if (cut[l] > lifeline_elems[l].size()) return false;
  // Downward closure: every multi-lifeline element is passed on all of its
  // lifelines or on none of them.
  for (uint32_t id = 0; id < element_count(); ++id) {
    auto positions = element_positions(id);
    if (positions.size() < 2) continue;
    bool first_passed = cut[positions[0].first] > positions[0].second;
    for (size_t i = 1; i < positions.size(); ++i) {
      bool passed = cut[positions[i].first] > positions[i].second;
      if (passed != first_passed) return false;
    }
  }
  return true;
}

std::vector<Diagnostic> validate_cut(const Chart& chart, const Cut& cut) {
  std::vector<Diagnostic> out;
  if (!chart.is_legal_cut(cut)) {
    std::ostringstream os;
    os << "illegal cut in chart " << chart.name << " (";
    for (size_t i = 0; i < cut.size(); ++i) {
      if (i) os << ",";
      os << cut[i];
    }
    os << "): not downward-closed or out of bounds";
    out.push_back({SourcePos{}, os.str()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model tables

std::optional<uint32_t> SystemModel::find_slot(std::string_view object,
                                               std::string_view var) const {
  std::string key;
  key.reserve(object.size() + var.size() + 1);
  key.append(object).push_back('.');
  key.append(var);
  auto it = slot_by_name.find(key);
  if (it == slot_by_name.end()) return std::nullopt;
  return it->second;
}

std::optional<uint8_t> SystemModel::literal_index(uint32_t slot,
                                                  std::string_view literal) const {
  if (slot >= var_slots.size()) return std::nullopt;
  const auto& dom = var_slots[slot].domain;
  for (size_t i = 0; i < dom.size(); ++i)
    if (dom[i] == literal) return static_cast<uint8_t>(i);
  return std::nullopt;
}

bool SystemModel::is_external(std::string_view event) const {
  return std::find(external_events.begin(), external_events.end(), event) !=
         external_events.end();
}

const Chart* SystemModel::find_chart(std::string_view name) const {
  for (const auto& c : charts)
    if (c.name == name) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok : uint8_t {
  Ident,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Comma,
  Colon,
  Dot,
  Arrow,     // ->
  Walrus,    // :=
  Eq,        // =
  Ne,        // !=
  AndAnd,    // &&
  Term,      // newline or ';'
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_blanks();
      SourcePos pos{line_, col_};
      if (at_end()) {
        out.push_back({Tok::End, "", pos});
        return out;
      }
      char c = peek();
      if (c == '\n') {
        advance();
        if (out.empty() || out.back().kind == Tok::Term) continue;
        out.push_back({Tok::Term, "\\n", pos});
        continue;
      }
      if (c == ';') {
        advance();
        if (!out.empty() && out.back().kind == Tok::Term) continue;
        out.push_back({Tok::Term, ";", pos});
        continue;
      }
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (!at_end()) {
          char d = peek();
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '_') {
            word.push_back(d);
            advance();
          } else {
            break;
          }
        }
        out.push_back({Tok::Ident, std::move(word), pos});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        // Bare numerals are valid domain values and literals.
        std::string word;
        while (!at_end() && std::isalnum(static_cast<unsigned char>(peek()))) {
          word.push_back(peek());
          advance();
        }
        out.push_back({Tok::Ident, std::move(word), pos});
        continue;
      }
      switch (c) {
        case '{': advance(); out.push_back({Tok::LBrace, "{", pos}); continue;
        case '}': advance(); out.push_back({Tok::RBrace, "}", pos}); continue;
        case '(': advance(); out.push_back({Tok::LParen, "(", pos}); continue;
        case ')': advance(); out.push_back({Tok::RParen, ")", pos}); continue;
        case ',': advance(); out.push_back({Tok::Comma, ",", pos}); continue;
        case '.': advance(); out.push_back({Tok::Dot, ".", pos}); continue;
        case '=': advance(); out.push_back({Tok::Eq, "=", pos}); continue;
        case '-':
          advance();
          if (!at_end() && peek() == '>') {
            advance();
            out.push_back({Tok::Arrow, "->", pos});
            continue;
          }
          throw ParseError(pos, "expected '->'");
        case ':':
          advance();
          if (!at_end() && peek() == '=') {
            advance();
            out.push_back({Tok::Walrus, ":=", pos});
          } else {
            out.push_back({Tok::Colon, ":", pos});
          }
          continue;
        case '!':
          advance();
          if (!at_end() && peek() == '=') {
            advance();
            out.push_back({Tok::Ne, "!=", pos});
            continue;
          }
          throw ParseError(pos, "expected '!='");
        case '&':
          advance();
          if (!at_end() && peek() == '&') {
            advance();
            out.push_back({Tok::AndAnd, "&&", pos});
            continue;
          }
          throw ParseError(pos, "expected '&&'");
        default:
          throw ParseError(pos, std::string("unexpected character '") + c + "'");
      }
    }
  }

private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek() const { return src_[i_]; }
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void skip_blanks() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  std::string_view src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class ModelParser {
public:
  explicit ModelParser(std::string_view text) : toks_(Lexer(text).run()) {}

  SystemModel run() {
    SystemModel m;
    skip_terms();
    while (!at(Tok::End)) {
      const Token& t = cur();
      if (t.kind != Tok::Ident)
        throw ParseError(t.pos, "expected 'object', 'external' or 'chart'");
      if (t.text == "object") {
        parse_object(m);
      } else if (t.text == "external") {
        parse_external(m);
      } else if (t.text == "chart") {
        parse_chart(m);
      } else {
        throw ParseError(t.pos, "unknown declaration '" + t.text + "'");
      }
      skip_terms();
    }
    check_model(m);
    finalize_model(m);
    return m;
  }

private:
  const Token& cur() const { return toks_[i_]; }
  bool at(Tok k) const { return cur().kind == k; }
  const Token& next() { return toks_[i_++]; }
  void skip_terms() {
    while (at(Tok::Term)) ++i_;
  }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) throw ParseError(cur().pos, std::string("expected ") + what);
    return next();
  }
  std::string expect_ident(const char* what) {
    if (!at(Tok::Ident)) throw ParseError(cur().pos, std::string("expected ") + what);
    return next().text;
  }
  std::string expect_keyword(const char* kw) {
    const Token& t = cur();
    if (t.kind != Tok::Ident || t.text != kw)
      throw ParseError(t.pos, std::string("expected '") + kw + "'");
    return next().text;
  }
  bool at_keyword(const char* kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }
  void expect_term(const char* after) {
    if (at(Tok::RBrace) || at(Tok::End)) return;  // closing brace may follow directly
    if (!at(Tok::Term))
      throw ParseError(cur().pos, std::string("expected end of statement after ") + after);
    skip_terms();
  }

  void parse_object(SystemModel& m) {
    next();  // object
    SourcePos pos = cur().pos;
    ObjectDecl obj;
    obj.name = expect_ident("object name");
    if (reserved::is_virtual_lifeline(obj.name))
      throw SemanticError(pos, "'" + obj.name + "' is a reserved instance name");
    expect(Tok::LBrace, "'{'");
    skip_terms();
    while (!at(Tok::RBrace)) {
      expect_keyword("var");
      VarDecl v;
      SourcePos vpos = cur().pos;
      v.name = expect_ident("variable name");
      expect_keyword("in");
      expect(Tok::LBrace, "'{'");
      v.domain.push_back(expect_ident("domain value"));
      while (at(Tok::Comma)) {
        next();
        v.domain.push_back(expect_ident("domain value"));
      }
      expect(Tok::RBrace, "'}'");
      expect_keyword("init");
      v.init = expect_ident("initial value");
      expect_term("variable declaration");
      for (size_t a = 0; a < v.domain.size(); ++a)
        for (size_t b = a + 1; b < v.domain.size(); ++b)
          if (v.domain[a] == v.domain[b])
            throw SemanticError(vpos, "duplicate domain value '" + v.domain[a] + "'");
      if (std::find(v.domain.begin(), v.domain.end(), v.init) == v.domain.end())
        throw SemanticError(vpos, "initial value '" + v.init + "' not in domain of '" +
                                      v.name + "'");
      for (const auto& prev : obj.vars)
        if (prev.name == v.name)
          throw SemanticError(vpos, "duplicate variable '" + v.name + "'");
      obj.vars.push_back(std::move(v));
      skip_terms();
    }
    next();  // }
    for (const auto& prev : m.objects)
      if (prev.name == obj.name)
        throw SemanticError(pos, "duplicate object '" + obj.name + "'");
    m.objects.push_back(std::move(obj));
    expect_term("object declaration");
  }

  void parse_external(SystemModel& m) {
    next();  // external
    while (true) {
      SourcePos pos = cur().pos;
      std::string name = expect_ident("event name");
      if (reserved::is_reserved_event(name))
        throw SemanticError(pos, "'" + name + "' is a reserved event name");
      if (m.is_external(name))
        throw SemanticError(pos, "duplicate external event '" + name + "'");
      m.external_events.push_back(std::move(name));
      if (at(Tok::Comma)) {
        next();
        continue;
      }
      break;
    }
    expect_term("external declaration");
  }

  void parse_chart(SystemModel& m) {
    next();  // chart
    SourcePos pos = cur().pos;
    Chart c;
    c.name = expect_ident("chart name");
    if (at_keyword("atomic")) {
      next();
      c.atomic = true;
    }
    expect(Tok::LBrace, "'{'");
    skip_terms();
    expect_keyword("instances");
    expect(Tok::Colon, "':'");
    while (true) {
      c.instances.push_back(expect_ident("instance name"));
      if (at(Tok::Comma)) {
        next();
        continue;
      }
      break;
    }
    expect_term("instance list");
    for (size_t a = 0; a < c.instances.size(); ++a)
      for (size_t b = a + 1; b < c.instances.size(); ++b)
        if (c.instances[a] == c.instances[b])
          throw SemanticError(pos, "duplicate instance '" + c.instances[a] + "'");

    if (at_keyword("prechart")) {
      next();
      expect(Tok::Colon, "':'");
      skip_terms();
      c.prechart = parse_elements(m, c);
    }
    if (at_keyword("main")) {
      next();
      expect(Tok::Colon, "':'");
      skip_terms();
      c.main = parse_elements(m, c);
    }
    expect(Tok::RBrace, "'}'");
    if (c.prechart.empty() && c.main.empty())
      throw SemanticError(pos, "chart '" + c.name + "' has no elements");
    for (const auto& prev : m.charts)
      if (prev.name == c.name)
        throw SemanticError(pos, "duplicate chart '" + c.name + "'");
    m.charts.push_back(std::move(c));
    expect_term("chart declaration");
  }

  std::vector<Element> parse_elements(SystemModel& m, const Chart& c) {
    std::vector<Element> out;
    while (at(Tok::Ident)) {
      const std::string& kw = cur().text;
      if (kw == "main" || kw == "prechart") break;
      Element e;
      e.pos = cur().pos;
      if (kw == "msg") {
        next();
        MessageElem msg;
        msg.src = expect_instance(c);
        expect(Tok::Arrow, "'->'");
        msg.dst = expect_instance(c);
        SourcePos epos = cur().pos;
        msg.event = expect_ident("event name");
        if (msg.event == reserved::kSync)
          throw SemanticError(epos, "'SYNC' is a reserved event name");
        msg.temp = parse_temp();
        e.body = std::move(msg);
      } else if (kw == "cond") {
        next();
        ConditionElem cond;
        cond.instance = expect_instance(c);
        expect(Tok::LParen, "'('");
        cond.pred = parse_predicate(m);
        expect(Tok::RParen, "')'");
        cond.temp = parse_temp();
        e.body = std::move(cond);
      } else if (kw == "assign") {
        next();
        AssignElem as;
        as.instance = expect_instance(c);
        expect(Tok::Dot, "'.'");
        as.var = expect_ident("variable name");
        expect(Tok::Walrus, "':='");
        SourcePos vpos = cur().pos;
        as.value = expect_ident("value");
        check_assign(m, as, vpos);
        e.body = std::move(as);
      } else if (kw == "sync") {
        next();
        SyncElem sy;
        sy.instances.push_back(expect_instance(c));
        while (at(Tok::Comma)) {
          next();
          sy.instances.push_back(expect_instance(c));
        }
        if (sy.instances.size() < 2)
          throw SemanticError(e.pos, "sync needs at least two instances");
        for (size_t a = 0; a < sy.instances.size(); ++a)
          for (size_t b = a + 1; b < sy.instances.size(); ++b)
            if (sy.instances[a] == sy.instances[b])
              throw SemanticError(e.pos, "duplicate instance in sync");
        e.body = std::move(sy);
      } else {
        break;
      }
      expect_term("chart element");
      out.push_back(std::move(e));
    }
    return out;
  }

  std::string expect_instance(const Chart& c) {
    SourcePos pos = cur().pos;
    std::string name = expect_ident("instance name");
    if (c.lifeline_index(name) < 0)
      throw SemanticError(pos, "instance '" + name + "' is not a lifeline of chart '" +
                                   c.name + "'");
    return name;
  }

  Temperature parse_temp() {
    SourcePos pos = cur().pos;
    std::string word = expect_ident("'hot' or 'cold'");
    if (word == "hot") return Temperature::Hot;
    if (word == "cold") return Temperature::Cold;
    throw ParseError(pos, "expected 'hot' or 'cold'");
  }

  Predicate parse_predicate(SystemModel& m) {
    Predicate p;
    if (at_keyword("true") && toks_[i_ + 1].kind == Tok::RParen) {
      next();
      p.kind = Predicate::Kind::True;
      return p;
    }
    if (at_keyword("false") && toks_[i_ + 1].kind == Tok::RParen) {
      next();
      p.kind = Predicate::Kind::False;
      return p;
    }
    p.kind = Predicate::Kind::Conjunction;
    p.atoms.push_back(parse_atom(m));
    while (at(Tok::AndAnd)) {
      next();
      p.atoms.push_back(parse_atom(m));
    }
    return p;
  }

  PredAtom parse_atom(SystemModel& m) {
    PredAtom a;
    SourcePos pos = cur().pos;
    a.lhs.object = expect_ident("object name");
    expect(Tok::Dot, "'.'");
    a.lhs.var = expect_ident("variable name");
    check_var_ref(m, a.lhs, pos);
    if (at(Tok::Eq)) {
      next();
      a.op = CmpOp::Eq;
    } else if (at(Tok::Ne)) {
      next();
      a.op = CmpOp::Ne;
    } else {
      throw ParseError(cur().pos, "expected '=' or '!='");
    }
    SourcePos rpos = cur().pos;
    std::string first = expect_ident("value or variable reference");
    if (at(Tok::Dot)) {
      next();
      VarRef ref;
      ref.object = std::move(first);
      ref.var = expect_ident("variable name");
      check_var_ref(m, ref, rpos);
      a.rhs_ref = std::move(ref);
    } else {
      a.rhs_literal = std::move(first);
      check_literal(m, a.lhs, a.rhs_literal, rpos);
    }
    return a;
  }

  void check_var_ref(const SystemModel& m, const VarRef& ref, SourcePos pos) {
    for (const auto& obj : m.objects) {
      if (obj.name != ref.object) continue;
      for (const auto& v : obj.vars)
        if (v.name == ref.var) return;
      throw SemanticError(pos, "object '" + ref.object + "' has no variable '" +
                                   ref.var + "'");
    }
    throw SemanticError(pos, "unknown object '" + ref.object + "'");
  }

  void check_literal(const SystemModel& m, const VarRef& ref, const std::string& lit,
                     SourcePos pos) {
    for (const auto& obj : m.objects) {
      if (obj.name != ref.object) continue;
      for (const auto& v : obj.vars) {
        if (v.name != ref.var) continue;
        if (std::find(v.domain.begin(), v.domain.end(), lit) == v.domain.end())
          throw SemanticError(pos, "value '" + lit + "' not in domain of " +
                                       ref.object + "." + ref.var);
        return;
      }
    }
  }

  void check_assign(const SystemModel& m, const AssignElem& as, SourcePos pos) {
    VarRef ref{as.instance, as.var};
    check_var_ref(m, ref, pos);
    check_literal(m, ref, as.value, pos);
  }

  // Cross-declaration checks that need the whole model.
  void check_model(const SystemModel& m) {
    for (const auto& c : m.charts) {
      for (const auto& inst : c.instances) {
        if (reserved::is_virtual_lifeline(inst)) continue;
        bool known = false;
        for (const auto& obj : m.objects)
          if (obj.name == inst) known = true;
        if (!known)
          throw SemanticError(SourcePos{}, "chart '" + c.name +
                                               "' references unknown object '" + inst + "'");
      }
    }
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
};

}  // namespace

SystemModel parse_model(std::string_view text) { return ModelParser(text).run(); }

// ---------------------------------------------------------------------------
// Finalization

void finalize_model(SystemModel& m) {
  m.var_slots.clear();
  m.slot_by_name.clear();
  m.events.clear();

  for (const auto& obj : m.objects) {
    for (const auto& v : obj.vars) {
      SystemModel::VarSlot slot;
      slot.object = obj.name;
      slot.var = v.name;
      slot.domain = v.domain;
      uint8_t init = 0;
      for (size_t i = 0; i < v.domain.size(); ++i)
        if (v.domain[i] == v.init) init = static_cast<uint8_t>(i);
      slot.init_index = init;
      m.slot_by_name[obj.name + "." + v.name] =
          static_cast<uint32_t>(m.var_slots.size());
      m.var_slots.push_back(std::move(slot));
    }
  }

  for (const auto& e : m.external_events) m.events[e] = EventClass::External;
  m.events[std::string(reserved::kBeginP)] = EventClass::Hidden;
  m.events[std::string(reserved::kEndP)] = EventClass::Hidden;
  m.events[std::string(reserved::kTestSF)] = EventClass::Hidden;
  m.events[std::string(reserved::kPropertyHold)] = EventClass::Hidden;

  for (auto& c : m.charts) {
    c.lifeline_elems.assign(c.instances.size(), {});
    c.prechart_lens.assign(c.instances.size(), 0);
    c.alphabet.clear();
    c.activating_events.clear();
    c.resolved_preds.clear();
    c.resolved_assigns.clear();
    c.is_testing = false;

    auto place = [&](uint32_t id, const std::vector<std::string>& insts, bool pre) {
      std::set<int> seen;
      for (const auto& inst : insts) {
        int l = c.lifeline_index(inst);
        if (l < 0 || seen.count(l)) continue;
        seen.insert(l);
        c.lifeline_elems[l].push_back(id);
        if (pre) c.prechart_lens[l]++;
      }
    };

    for (uint32_t id = 0; id < c.element_count(); ++id) {
      const Element& e = c.element(id);
      bool pre = c.in_prechart(id);
      if (const auto* msg = e.as_message()) {
        place(id, {msg->src, msg->dst}, pre);
        c.alphabet.insert(msg->event);
        if (msg->event == reserved::kPropertyHold && !pre) c.is_testing = true;
        if (m.events.find(msg->event) == m.events.end())
          m.events[msg->event] = EventClass::Internal;
      } else if (const auto* cond = e.as_condition()) {
        place(id, {cond->instance}, pre);
        ResolvedPred rp;
        rp.kind = cond->pred.kind;
        bool ok = true;
        for (const auto& atom : cond->pred.atoms) {
          ResolvedAtom ra;
          auto lhs = m.find_slot(atom.lhs.object, atom.lhs.var);
          if (!lhs) {
            ok = false;
            break;
          }
          ra.lhs_slot = *lhs;
          ra.op = atom.op;
          if (atom.rhs_ref) {
            auto rhs = m.find_slot(atom.rhs_ref->object, atom.rhs_ref->var);
            if (!rhs) {
              ok = false;
              break;
            }
            ra.rhs_is_slot = true;
            ra.rhs_slot = *rhs;
          } else {
            auto lit = m.literal_index(*lhs, atom.rhs_literal);
            if (!lit) {
              ok = false;
              break;
            }
            ra.rhs_value = *lit;
          }
          rp.atoms.push_back(ra);
        }
        if (ok) c.resolved_preds[id] = std::move(rp);
      } else if (const auto* as = e.as_assign()) {
        place(id, {as->instance}, pre);
        auto slot = m.find_slot(as->instance, as->var);
        if (slot) {
          auto lit = m.literal_index(*slot, as->value);
          if (lit) c.resolved_assigns[id] = ResolvedAssign{*slot, *lit};
        }
      } else if (const auto* sy = e.as_sync()) {
        place(id, sy->instances, pre);
      }
    }

    // Activation is keyed on the message events enabled at the empty cut of
    // the prechart (or of the main chart when the prechart is empty).
    Cut zero = c.zero_cut();
    for (uint32_t id = 0; id < c.element_count(); ++id) {
      const auto* msg = c.element(id).as_message();
      if (!msg) continue;
      if (c.prechart.empty() != !c.in_prechart(id)) continue;
      bool minimal = true;
      for (auto [l, p] : c.element_positions(id))
        if (p != zero[l]) minimal = false;
      if (minimal) c.activating_events.insert(msg->event);
    }
  }
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Diagnostic> validate_model(const SystemModel& m) {
  std::vector<Diagnostic> out;
  auto flag = [&out](SourcePos pos, std::string msg) {
    out.push_back({pos, std::move(msg)});
  };

  std::set<std::string> object_names;
  for (const auto& obj : m.objects) {
    if (!object_names.insert(obj.name).second)
      flag({}, "duplicate object '" + obj.name + "'");
    if (reserved::is_virtual_lifeline(obj.name))
      flag({}, "object '" + obj.name + "' uses a reserved instance name");
    std::set<std::string> var_names;
    for (const auto& v : obj.vars) {
      if (!var_names.insert(v.name).second)
        flag({}, "duplicate variable '" + obj.name + "." + v.name + "'");
      if (v.domain.empty()) {
        flag({}, "empty domain for '" + obj.name + "." + v.name + "'");
        continue;
      }
      std::set<std::string> values(v.domain.begin(), v.domain.end());
      if (values.size() != v.domain.size())
        flag({}, "duplicate domain value in '" + obj.name + "." + v.name + "'");
      if (!values.count(v.init))
        flag({}, "initial value '" + v.init + "' outside domain of '" + obj.name + "." +
                     v.name + "'");
    }
  }

  std::set<std::string> externals;
  for (const auto& e : m.external_events) {
    if (!externals.insert(e).second) flag({}, "duplicate external event '" + e + "'");
    if (reserved::is_reserved_event(e))
      flag({}, "external event '" + e + "' collides with a reserved name");
  }

  std::set<std::string> chart_names;
  for (const auto& c : m.charts) {
    if (!chart_names.insert(c.name).second)
      flag({}, "duplicate chart '" + c.name + "'");
    if (c.prechart.empty() && c.main.empty()) {
      flag({}, "chart '" + c.name + "' has no elements");
      continue;
    }
    std::set<std::string> insts;
    for (const auto& inst : c.instances) {
      if (!insts.insert(inst).second)
        flag({}, "duplicate instance '" + inst + "' in chart '" + c.name + "'");
      if (reserved::is_virtual_lifeline(inst)) continue;
      if (!object_names.count(inst))
        flag({}, "chart '" + c.name + "' references unknown object '" + inst + "'");
    }

    bool prechart_starts_with_message = c.prechart.empty();
    if (!c.prechart.empty()) {
      for (uint32_t id = 0; id < c.prechart.size(); ++id) {
        bool minimal = true;
        for (auto [l, p] : c.element_positions(id))
          if (p != 0) minimal = false;
        if (minimal && c.element(id).as_message()) prechart_starts_with_message = true;
      }
    }
    if (!prechart_starts_with_message)
      flag({}, "chart '" + c.name + "': prechart has no minimal message event");

    for (uint32_t id = 0; id < c.element_count(); ++id) {
      const Element& e = c.element(id);
      bool pre = c.in_prechart(id);
      if (const auto* msg = e.as_message()) {
        if (c.lifeline_index(msg->src) < 0 || c.lifeline_index(msg->dst) < 0)
          flag(e.pos, "chart '" + c.name + "': message endpoint not on a lifeline");
        if (msg->event == reserved::kSync)
          flag(e.pos, "chart '" + c.name + "': 'SYNC' used as an event name");
        if (m.is_external(msg->event) && reserved::is_reserved_event(msg->event))
          flag(e.pos, "reserved event '" + msg->event + "' declared external");
      } else if (const auto* cond = e.as_condition()) {
        if (c.lifeline_index(cond->instance) < 0)
          flag(e.pos, "chart '" + c.name + "': condition instance not on a lifeline");
        for (const auto& atom : cond->pred.atoms) {
          auto slot = m.find_slot(atom.lhs.object, atom.lhs.var);
          if (!slot) {
            flag(e.pos, "chart '" + c.name + "': unknown variable " + atom.lhs.object +
                            "." + atom.lhs.var);
            continue;
          }
          if (atom.rhs_ref) {
            if (!m.find_slot(atom.rhs_ref->object, atom.rhs_ref->var))
              flag(e.pos, "chart '" + c.name + "': unknown variable " +
                              atom.rhs_ref->object + "." + atom.rhs_ref->var);
          } else if (!m.literal_index(*slot, atom.rhs_literal)) {
            flag(e.pos, "chart '" + c.name + "': value '" + atom.rhs_literal +
                            "' outside domain of " + atom.lhs.object + "." + atom.lhs.var);
          }
        }
      } else if (const auto* as = e.as_assign()) {
        if (pre)
          flag(e.pos, "chart '" + c.name + "': assignment in prechart");
        if (c.lifeline_index(as->instance) < 0) {
          flag(e.pos, "chart '" + c.name + "': assignment instance not on a lifeline");
        } else {
          auto slot = m.find_slot(as->instance, as->var);
          if (!slot) {
            flag(e.pos, "chart '" + c.name + "': unknown variable " + as->instance + "." +
                            as->var);
          } else if (!m.literal_index(*slot, as->value)) {
            flag(e.pos, "chart '" + c.name + "': value '" + as->value +
                            "' outside domain of " + as->instance + "." + as->var);
          }
        }
      } else if (const auto* sy = e.as_sync()) {
        if (sy->instances.size() < 2)
          flag(e.pos, "chart '" + c.name + "': sync with fewer than two instances");
        for (const auto& inst : sy->instances)
          if (c.lifeline_index(inst) < 0)
            flag(e.pos, "chart '" + c.name + "': sync instance not on a lifeline");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pretty printing

namespace {

void print_predicate(std::ostringstream& os, const Predicate& p) {
  switch (p.kind) {
    case Predicate::Kind::True: os << "true"; return;
    case Predicate::Kind::False: os << "false"; return;
    case Predicate::Kind::Conjunction: break;
  }
  for (size_t i = 0; i < p.atoms.size(); ++i) {
    if (i) os << " && ";
    const PredAtom& a = p.atoms[i];
    os << a.lhs.object << "." << a.lhs.var << (a.op == CmpOp::Eq ? " = " : " != ");
    if (a.rhs_ref)
      os << a.rhs_ref->object << "." << a.rhs_ref->var;
    else
      os << a.rhs_literal;
  }
}

void print_elements(std::ostringstream& os, const std::vector<Element>& elems) {
  for (const Element& e : elems) {
    os << "    ";
    if (const auto* msg = e.as_message()) {
      os << "msg " << msg->src << " -> " << msg->dst << " " << msg->event << " "
         << (msg->temp == Temperature::Hot ? "hot" : "cold");
    } else if (const auto* cond = e.as_condition()) {
      os << "cond " << cond->instance << " (";
      print_predicate(os, cond->pred);
      os << ") " << (cond->temp == Temperature::Hot ? "hot" : "cold");
    } else if (const auto* as = e.as_assign()) {
      os << "assign " << as->instance << "." << as->var << " := " << as->value;
    } else if (const auto* sy = e.as_sync()) {
      os << "sync ";
      for (size_t i = 0; i < sy->instances.size(); ++i) {
        if (i) os << ", ";
        os << sy->instances[i];
      }
    }
    os << "\n";
  }
}

}  // namespace

std::string pretty_print(const SystemModel& m) {
  std::ostringstream os;
  for (const auto& obj : m.objects) {
    os << "object " << obj.name << " {\n";
    for (const auto& v : obj.vars) {
      os << "  var " << v.name << " in {";
      for (size_t i = 0; i < v.domain.size(); ++i) {
        if (i) os << ", ";
        os << v.domain[i];
      }
      os << "} init " << v.init << "\n";
    }
    os << "}\n\n";
  }
  if (!m.external_events.empty()) {
    os << "external ";
    for (size_t i = 0; i < m.external_events.size(); ++i) {
      if (i) os << ", ";
      os << m.external_events[i];
    }
    os << "\n\n";
  }
  for (const auto& c : m.charts) {
    os << "chart " << c.name << (c.atomic ? " atomic" : "") << " {\n";
    os << "  instances: ";
    for (size_t i = 0; i < c.instances.size(); ++i) {
      if (i) os << ", ";
      os << c.instances[i];
    }
    os << "\n";
    if (!c.prechart.empty()) {
      os << "  prechart:\n";
      print_elements(os, c.prechart);
    }
    if (!c.main.empty()) {
      os << "  main:\n";
      print_elements(os, c.main);
    }
    os << "}\n\n";
  }
  return os.str();
}

}  // namespace lsc
