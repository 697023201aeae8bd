#include "mvk/fo_logic.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

#include "mvk/errors.hpp"
#include "json.hpp"

namespace mvk {

FOFormula FOFormula::make(Kind kind, std::string name,
                          std::vector<std::string> args,
                          std::vector<FOFormula> kids) {
  auto rep = std::make_shared<Rep>();
  rep->kind = kind;
  rep->name = std::move(name);
  rep->args = std::move(args);
  rep->kids = std::move(kids);
  return FOFormula(std::move(rep));
}

FOFormula FOFormula::eq(std::string a, std::string b) {
  return make(Kind::Eq, "", {std::move(a), std::move(b)}, {});
}
FOFormula FOFormula::rel(std::string name, std::vector<std::string> args) {
  return make(Kind::Rel, std::move(name), std::move(args), {});
}
FOFormula FOFormula::negate(FOFormula a) {
  return make(Kind::Not, "", {}, {std::move(a)});
}
FOFormula FOFormula::conj(FOFormula a, FOFormula b) {
  return make(Kind::And, "", {}, {std::move(a), std::move(b)});
}
FOFormula FOFormula::disj(FOFormula a, FOFormula b) {
  return make(Kind::Or, "", {}, {std::move(a), std::move(b)});
}
FOFormula FOFormula::implies(FOFormula a, FOFormula b) {
  return make(Kind::Imp, "", {}, {std::move(a), std::move(b)});
}
FOFormula FOFormula::exists(std::string var, FOFormula body) {
  return make(Kind::Exists, std::move(var), {}, {std::move(body)});
}
FOFormula FOFormula::forall(std::string var, FOFormula body) {
  return make(Kind::Forall, std::move(var), {}, {std::move(body)});
}

namespace {

void collect_free(const FOFormula& f, std::set<std::string>& bound,
                  std::set<std::string>& out) {
  switch (f.kind()) {
    case FOFormula::Kind::Eq:
    case FOFormula::Kind::Rel:
      for (const auto& v : f.args())
        if (!bound.count(v)) out.insert(v);
      return;
    case FOFormula::Kind::Not:
      collect_free(f.child(), bound, out);
      return;
    case FOFormula::Kind::And:
    case FOFormula::Kind::Or:
    case FOFormula::Kind::Imp:
      collect_free(f.child(0), bound, out);
      collect_free(f.child(1), bound, out);
      return;
    case FOFormula::Kind::Exists:
    case FOFormula::Kind::Forall: {
      bool fresh = bound.insert(f.bound_var()).second;
      collect_free(f.child(), bound, out);
      if (fresh) bound.erase(f.bound_var());
      return;
    }
  }
}

}  // namespace

std::vector<std::string> FOFormula::free_variables() const {
  std::set<std::string> bound, out;
  collect_free(*this, bound, out);
  return {out.begin(), out.end()};
}

uint32_t FOFormula::quantifier_depth() const {
  uint32_t best = 0;
  for (std::size_t i = 0; i < arity(); ++i)
    best = std::max(best, child(i).quantifier_depth());
  if (kind() == Kind::Exists || kind() == Kind::Forall) ++best;
  return best;
}

namespace {

struct FOParser {
  const std::string& text;
  std::size_t pos = 0;

  explicit FOParser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  bool accept_str(const std::string& s) {
    skip_ws();
    if (text.compare(pos, s.size(), s) == 0) {
      pos += s.size();
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(std::string("expected ") + what, pos);
  }

  std::optional<std::string> try_ident() {
    skip_ws();
    std::size_t start = pos;
    if (start >= text.size()) return std::nullopt;
    char c = text[start];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return std::nullopt;
    std::size_t end = start + 1;
    while (end < text.size()) {
      char d = text[end];
      if (std::isalnum(static_cast<unsigned char>(d)) || d == '_')
        ++end;
      else
        break;
    }
    pos = end;
    return text.substr(start, end - start);
  }

  bool accept_keyword(const std::string& kw) {
    skip_ws();
    std::size_t save = pos;
    auto id = try_ident();
    if (id && *id == kw) return true;
    pos = save;
    return false;
  }

  FOFormula parse_formula() {
    if (accept_keyword("exists")) return parse_quantifier(true);
    if (accept_keyword("forall")) return parse_quantifier(false);
    return parse_imp();
  }

  FOFormula parse_quantifier(bool existential) {
    auto var = try_ident();
    if (!var) throw ParseError("expected variable after quantifier", pos);
    expect('.', "'.'");
    FOFormula body = parse_formula();
    return existential ? FOFormula::exists(*var, std::move(body))
                       : FOFormula::forall(*var, std::move(body));
  }

  FOFormula parse_imp() {
    FOFormula lhs = parse_or();
    skip_ws();
    if (accept_str("->")) return FOFormula::implies(std::move(lhs), parse_imp());
    return lhs;
  }

  FOFormula parse_or() {
    FOFormula f = parse_and();
    while (accept('|')) f = FOFormula::disj(std::move(f), parse_and());
    return f;
  }

  FOFormula parse_and() {
    FOFormula f = parse_unary();
    while (accept('&')) f = FOFormula::conj(std::move(f), parse_unary());
    return f;
  }

  FOFormula parse_unary() {
    if (accept('~')) return FOFormula::negate(parse_unary());
    return parse_atom();
  }

  FOFormula parse_atom() {
    skip_ws();
    if (accept('(')) {
      FOFormula f = parse_formula();
      expect(')', "')'");
      return f;
    }
    auto id = try_ident();
    if (!id) throw ParseError("expected atom", pos);
    if (*id == "exists" || *id == "forall")
      throw ParseError("quantifier must head its subformula; parenthesize", pos);
    if (accept('(')) {
      std::vector<std::string> args;
      if (!accept(')')) {
        do {
          auto arg = try_ident();
          if (!arg) throw ParseError("expected argument variable", pos);
          args.push_back(*arg);
        } while (accept(','));
        expect(')', "')'");
      }
      return FOFormula::rel(*id, std::move(args));
    }
    expect('=', "'=' or '(' after identifier");
    auto rhs = try_ident();
    if (!rhs) throw ParseError("expected identifier after '='", pos);
    return FOFormula::eq(*id, *rhs);
  }
};

void render_fo(const FOFormula& f, std::string& out) {
  using K = FOFormula::Kind;
  switch (f.kind()) {
    case K::Eq:
      out += f.args()[0];
      out += " = ";
      out += f.args()[1];
      return;
    case K::Rel: {
      out += f.rel_name();
      out += '(';
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        if (i) out += ", ";
        out += f.args()[i];
      }
      out += ')';
      return;
    }
    case K::Not:
      out += "~(";
      render_fo(f.child(), out);
      out += ')';
      return;
    case K::And:
    case K::Or:
    case K::Imp: {
      const char* op = f.kind() == K::And ? ") & ("
                       : f.kind() == K::Or ? ") | ("
                                            : ") -> (";
      out += '(';
      render_fo(f.child(0), out);
      out += op;
      render_fo(f.child(1), out);
      out += ')';
      return;
    }
    case K::Exists:
    case K::Forall:
      out += f.kind() == K::Exists ? "exists " : "forall ";
      out += f.bound_var();
      out += ". ";
      render_fo(f.child(), out);
      return;
  }
}

}  // namespace

FOFormula parse_fo_formula(const std::string& text) {
  FOParser p(text);
  FOFormula f = p.parse_formula();
  p.skip_ws();
  if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
  return f;
}

std::string render_fo_formula(const FOFormula& f) {
  std::string out;
  render_fo(f, out);
  return out;
}

namespace {

std::size_t row_index(const ClassicalStructure& s,
                      const std::vector<uint32_t>& args) {
  std::size_t idx = 0;
  for (uint32_t a : args) {
    if (a >= s.size) throw DomainError(DomainError::Kind::BadInput, "relation argument out of range");
    idx = idx * s.size + a;
  }
  return idx;
}

}  // namespace

bool ClassicalStructure::holds(const std::string& rel,
                               const std::vector<uint32_t>& args) const {
  auto it = relations.find(rel);
  if (it == relations.end())
    throw DomainError(DomainError::Kind::MissingRelation, "unknown relation: " + rel);
  if (args.size() != it->second.arity)
    throw DomainError(DomainError::Kind::BadInput, "arity mismatch for " + rel);
  return it->second.truth[row_index(*this, args)];
}

void ClassicalStructure::set(const std::string& rel,
                             const std::vector<uint32_t>& args, bool value) {
  auto it = relations.find(rel);
  if (it == relations.end())
    throw DomainError(DomainError::Kind::MissingRelation, "unknown relation: " + rel);
  if (args.size() != it->second.arity)
    throw DomainError(DomainError::Kind::BadInput, "arity mismatch for " + rel);
  it->second.truth[row_index(*this, args)] = value;
}

ClassicalStructure ClassicalStructure::with_relation(uint32_t size,
                                                     const std::string& rel,
                                                     uint32_t arity) {
  ClassicalStructure s;
  s.size = size;
  Relation r;
  r.arity = arity;
  std::size_t rows = 1;
  for (uint32_t i = 0; i < arity; ++i) rows *= size;
  r.truth.assign(rows, false);
  s.relations.emplace(rel, std::move(r));
  return s;
}

bool classical_eval(const ClassicalStructure& s, const FOFormula& f,
                    const std::map<std::string, uint32_t>& env) {
  using K = FOFormula::Kind;
  auto lookup = [&](const std::string& v) -> uint32_t {
    auto it = env.find(v);
    if (it == env.end())
      throw DomainError(DomainError::Kind::UnknownVariable, "unbound variable: " + v);
    return it->second;
  };
  switch (f.kind()) {
    case K::Eq:
      return lookup(f.args()[0]) == lookup(f.args()[1]);
    case K::Rel: {
      std::vector<uint32_t> args;
      args.reserve(f.args().size());
      for (const auto& v : f.args()) args.push_back(lookup(v));
      return s.holds(f.rel_name(), args);
    }
    case K::Not:
      return !classical_eval(s, f.child(), env);
    case K::And:
      return classical_eval(s, f.child(0), env) && classical_eval(s, f.child(1), env);
    case K::Or:
      return classical_eval(s, f.child(0), env) || classical_eval(s, f.child(1), env);
    case K::Imp:
      return !classical_eval(s, f.child(0), env) || classical_eval(s, f.child(1), env);
    case K::Exists:
    case K::Forall: {
      bool want_witness = f.kind() == K::Exists;
      auto inner = env;
      for (uint32_t a = 0; a < s.size; ++a) {
        inner[f.bound_var()] = a;
        if (classical_eval(s, f.child(), inner) == want_witness)
          return want_witness;
      }
      return !want_witness;
    }
  }
  throw Error("unreachable formula kind");
}

ClassicalStructure classical_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(DomainError::Kind::BadInput,
                      std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("size") ||
      !j["size"].is_number_unsigned() || j["size"].get<uint64_t>() == 0 ||
      j["size"].get<uint64_t>() > 64)
    throw DomainError(DomainError::Kind::BadInput,
                      "\"size\" must be between 1 and 64");
  ClassicalStructure s;
  s.size = j["size"].get<uint32_t>();
  if (!j.contains("relations")) return s;
  if (!j["relations"].is_object())
    throw DomainError(DomainError::Kind::BadInput,
                      "\"relations\" must be an object");
  for (const auto& [name, body] : j["relations"].items()) {
    if (!body.is_object() || !body.contains("arity") ||
        !body["arity"].is_number_unsigned() ||
        body["arity"].get<uint64_t>() > 4)
      throw DomainError(DomainError::Kind::BadInput,
                        "relation " + name + " needs an arity of at most 4");
    uint32_t arity = body["arity"].get<uint32_t>();
    auto with = ClassicalStructure::with_relation(s.size, name, arity);
    s.relations.emplace(name, std::move(with.relations[name]));
    if (!body.contains("holds")) continue;
    if (!body["holds"].is_array())
      throw DomainError(DomainError::Kind::BadInput,
                        "relation " + name + " \"holds\" must be an array");
    for (const auto& row : body["holds"]) {
      if (!row.is_array() || row.size() != arity)
        throw DomainError(DomainError::Kind::BadInput,
                          "relation " + name + " row has the wrong arity");
      std::vector<uint32_t> args;
      for (const auto& v : row) {
        if (!v.is_number_unsigned() || v.get<uint64_t>() >= s.size)
          throw DomainError(DomainError::Kind::BadInput,
                            "relation " + name + " argument out of range");
        args.push_back(v.get<uint32_t>());
      }
      s.set(name, args);
    }
  }
  return s;
}

std::string classical_to_json(const ClassicalStructure& s) {
  nlohmann::json j;
  j["size"] = s.size;
  nlohmann::json rels = nlohmann::json::object();
  for (const auto& [name, r] : s.relations) {
    nlohmann::json body;
    body["arity"] = r.arity;
    nlohmann::json holds = nlohmann::json::array();
    std::vector<uint32_t> args(r.arity, 0);
    for (std::size_t row = 0; row < r.truth.size(); ++row) {
      if (!r.truth[row]) continue;
      std::size_t rest = row;
      for (uint32_t i = r.arity; i-- > 0;) {
        args[i] = static_cast<uint32_t>(rest % s.size);
        rest /= s.size;
      }
      holds.push_back(args);
    }
    body["holds"] = std::move(holds);
    rels[name] = std::move(body);
  }
  j["relations"] = std::move(rels);
  return j.dump();
}

std::vector<FOFormula> generate_fo_family(
    const std::map<std::string, uint32_t>& relation_arities,
    uint32_t max_nodes, uint32_t max_qdepth) {
  struct Entry {
    FOFormula f;
    uint32_t qdepth;
  };
  const std::vector<std::string> vars = {"x", "y"};

  // by_size[k] holds formulas with exactly k+1 nodes.
  std::vector<std::vector<Entry>> by_size(max_nodes);
  if (max_nodes == 0) return {};

  for (const auto& a : vars)
    for (const auto& b : vars)
      by_size[0].push_back({FOFormula::eq(a, b), 0});
  for (const auto& [name, arity] : relation_arities) {
    std::vector<uint32_t> idx(arity, 0);
    while (true) {
      std::vector<std::string> args;
      for (uint32_t i : idx) args.push_back(vars[i]);
      by_size[0].push_back({FOFormula::rel(name, std::move(args)), 0});
      uint32_t carry = 0;
      while (carry < arity && ++idx[carry] == vars.size()) idx[carry++] = 0;
      if (carry == arity) break;
    }
    if (arity == 0) break;
  }

  for (uint32_t size = 2; size <= max_nodes; ++size) {
    auto& dst = by_size[size - 1];
    for (const auto& e : by_size[size - 2]) {
      dst.push_back({FOFormula::negate(e.f), e.qdepth});
      if (e.qdepth < max_qdepth) {
        for (const auto& v : vars) {
          dst.push_back({FOFormula::exists(v, e.f), e.qdepth + 1});
          dst.push_back({FOFormula::forall(v, e.f), e.qdepth + 1});
        }
      }
    }
    for (uint32_t left = 1; left + 1 < size; ++left) {
      uint32_t right = size - 1 - left;
      for (const auto& a : by_size[left - 1])
        for (const auto& b : by_size[right - 1]) {
          uint32_t q = std::max(a.qdepth, b.qdepth);
          dst.push_back({FOFormula::conj(a.f, b.f), q});
          dst.push_back({FOFormula::disj(a.f, b.f), q});
          dst.push_back({FOFormula::implies(a.f, b.f), q});
        }
    }
  }

  std::vector<FOFormula> out;
  for (const auto& bucket : by_size)
    for (const auto& e : bucket) out.push_back(e.f);
  return out;
}

std::optional<std::vector<uint32_t>> find_isomorphism(
    const ClassicalStructure& a, const ClassicalStructure& b) {
  if (a.size != b.size) return std::nullopt;
  if (a.relations.size() != b.relations.size()) return std::nullopt;
  for (const auto& [name, rel] : a.relations) {
    auto it = b.relations.find(name);
    if (it == b.relations.end() || it->second.arity != rel.arity)
      return std::nullopt;
  }

  std::vector<uint32_t> perm(a.size);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (const auto& [name, rel] : a.relations) {
      std::vector<uint32_t> args(rel.arity, 0), mapped(rel.arity, 0);
      // Iterate universe^arity in odometer order.
      bool done = rel.arity == 0 && a.size > 0 ? false : false;
      (void)done;
      std::size_t rows = rel.truth.size();
      for (std::size_t row = 0; row < rows && ok; ++row) {
        std::size_t rest = row;
        for (uint32_t i = rel.arity; i-- > 0;) {
          args[i] = static_cast<uint32_t>(rest % a.size);
          rest /= a.size;
        }
        for (uint32_t i = 0; i < rel.arity; ++i) mapped[i] = perm[args[i]];
        if (a.holds(name, args) != b.holds(name, mapped)) ok = false;
      }
      if (!ok) break;
    }
    if (ok) return perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

}  // namespace mvk
