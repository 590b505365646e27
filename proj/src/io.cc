/*
 * Copyright (c) 2026, The strandkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "strandkit/io.h"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace strandkit {

namespace {

[[noreturn]] void fail(const std::string& file, const SExpr& at,
                       const std::string& message) {
  throw ParseError(file, at.line(), at.column(), message);
}

std::size_t number(const SExpr& e, const std::string& file) {
  if (!e.is_number()) fail(file, e, "expected a number, found " + to_string(e));
  return e.value();
}

const std::string& symbol(const SExpr& e, const std::string& file) {
  if (!e.is_symbol()) fail(file, e, "expected a symbol, found " + to_string(e));
  return e.text();
}

void expect_size(const SExpr& e, std::size_t n, const std::string& file) {
  if (!e.is_list() || e.size() != n) {
    fail(file, e, "expected " + std::to_string(n) + " items in " +
                      to_string(e));
  }
}

// First clause (HEAD ...) among the items of form from index start.
const SExpr* clause(const SExpr& form, std::string_view head,
                    std::size_t start = 2) {
  for (std::size_t i = start; i < form.size(); ++i) {
    if (form[i].is_form(head)) return &form[i];
  }
  return nullptr;
}

std::vector<const SExpr*> clauses(const SExpr& form, std::string_view head,
                                  std::size_t start = 2) {
  std::vector<const SExpr*> out;
  for (std::size_t i = start; i < form.size(); ++i) {
    if (form[i].is_form(head)) out.push_back(&form[i]);
  }
  return out;
}

const SExpr& require_clause(const SExpr& form, std::string_view head,
                            const std::string& file, std::size_t start = 2) {
  const SExpr* c = clause(form, head, start);
  if (c == nullptr) {
    fail(file, form, "missing (" + std::string(head) + " ...) clause");
  }
  return *c;
}

SExpr sym(std::string s) { return SExpr::symbol(std::move(s)); }
SExpr num(std::size_t n) { return SExpr::number(n); }
SExpr list(std::vector<SExpr> items) { return SExpr::list(std::move(items)); }

Scope scope_of(const std::vector<VarKey>& vars) {
  Scope out;
  for (const VarKey& v : vars) out[v.name] = v;
  return out;
}

StrandNode parse_strand_node(const SExpr& e,
                             const std::set<std::string>& strands,
                             const std::string& file) {
  expect_size(e, 2, file);
  const std::string& z = symbol(e[0], file);
  if (!strands.count(z)) fail(file, e[0], "unknown strand variable " + z);
  return {z, number(e[1], file)};
}

Node parse_node(const SExpr& e, const std::string& file) {
  expect_size(e, 2, file);
  return {number(e[0], file), number(e[1], file)};
}

Event parse_event(const SExpr& e, const Scope& scope,
                  const std::string& file) {
  if (e.is_form("send") && e.size() == 2) {
    return Event::send(parse_term(e[1], scope, file));
  }
  if (e.is_form("recv") && e.size() == 2) {
    return Event::recv(parse_term(e[1], scope, file));
  }
  fail(file, e, "expected (send TERM) or (recv TERM), found " + to_string(e));
}

Trace parse_trace(const SExpr& e, const Scope& scope,
                  const std::string& file) {
  std::vector<Event> events;
  for (std::size_t i = 1; i < e.size(); ++i) {
    events.push_back(parse_event(e[i], scope, file));
  }
  if (events.empty()) fail(file, e, "a trace needs at least one event");
  return Trace(std::move(events));
}

SExpr event_sexpr(const Event& e) {
  return list({sym(e.outbound() ? "send" : "recv"), term_sexpr(e.message)});
}

SExpr trace_sexpr(const Trace& t) {
  std::vector<SExpr> items{sym("trace")};
  for (const Event& e : t) items.push_back(event_sexpr(e));
  return list(std::move(items));
}

SExpr strand_node_sexpr(const StrandNode& n) {
  return list({sym(n.strand), num(n.index)});
}

SExpr map_sexpr(const Substitution& s, const std::vector<VarKey>& order) {
  std::vector<SExpr> items{sym("map")};
  for (const VarKey& v : order) {
    if (const Term* t = s.find(v)) {
      items.push_back(list({sym(v.name), term_sexpr(*t)}));
    }
  }
  return list(std::move(items));
}

std::vector<Atom> parse_conjunction(const SExpr& e, const Scope& scope,
                                    const std::set<std::string>& strands,
                                    const std::string& file) {
  std::vector<Atom> out;
  if (e.is_form("and")) {
    for (std::size_t i = 1; i < e.size(); ++i) {
      out.push_back(parse_atom(e[i], scope, strands, file));
    }
  } else {
    out.push_back(parse_atom(e, scope, strands, file));
  }
  return out;
}

SExpr conjunction_sexpr(const std::vector<Atom>& atoms) {
  std::vector<SExpr> items{sym("and")};
  for (const Atom& a : atoms) items.push_back(atom_sexpr(a));
  return list(std::move(items));
}

struct Quantified {
  Declarations decls;
  std::vector<Atom> atoms;
};

// (exists DECLS BODY), or BODY alone.
Quantified parse_exists(const SExpr& e, Scope scope,
                        std::set<std::string> strands,
                        const std::string& file) {
  Quantified out;
  const SExpr* body = &e;
  if (e.is_form("exists")) {
    expect_size(e, 3, file);
    out.decls = parse_declarations(e[1], file);
    for (const VarKey& v : out.decls.vars) scope[v.name] = v;
    strands.insert(out.decls.strands.begin(), out.decls.strands.end());
    body = &e[2];
  }
  out.atoms = parse_conjunction(*body, scope, strands, file);
  return out;
}

std::vector<const SExpr*> disjuncts_of(const SExpr& e) {
  std::vector<const SExpr*> out;
  if (e.is_form("false")) return out;
  if (e.is_form("or")) {
    for (std::size_t i = 1; i < e.size(); ++i) out.push_back(&e[i]);
    return out;
  }
  out.push_back(&e);
  return out;
}

bool is_equality(const Atom& a) {
  return std::holds_alternative<EqTerm>(a) ||
         std::holds_alternative<EqStrand>(a);
}

std::string join_dir(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

Term parse_term(const SExpr& e, const Scope& scope, const std::string& file) {
  if (e.is_symbol()) {
    auto it = scope.find(e.text());
    if (it == scope.end()) fail(file, e, "unknown variable " + e.text());
    return as_term(it->second);
  }
  if (!e.is_list() || e.size() == 0 || !e[0].is_symbol()) {
    fail(file, e, "expected a term, found " + to_string(e));
  }
  const std::string& head = e[0].text();
  try {
    if (head == "akey" || head == "akey-inv" || head == "skey" ||
        head == "data" || head == "tag") {
      expect_size(e, 2, file);
      const std::size_t i = number(e[1], file);
      if (head == "akey") return Term::akey(i);
      if (head == "akey-inv") return Term::akey(i, true);
      if (head == "skey") return Term::skey(i);
      if (head == "data") return Term::data(i);
      return Term::tag(i);
    }
    if (head == "var") {
      expect_size(e, 3, file);
      auto sort = parse_sort(symbol(e[2], file));
      if (!sort) fail(file, e[2], "unknown sort " + e[2].text());
      return Term::var(symbol(e[1], file), *sort);
    }
    if (head == "invk") {
      expect_size(e, 2, file);
      return invert_key(parse_term(e[1], scope, file));
    }
    if (head == "pair") {
      if (e.size() < 3) fail(file, e, "pair needs at least two terms");
      Term out = parse_term(e[e.size() - 1], scope, file);
      for (std::size_t i = e.size() - 1; i-- > 1;) {
        out = Term::pair(parse_term(e[i], scope, file), out);
      }
      return out;
    }
    if (head == "enc") {
      expect_size(e, 3, file);
      return Term::enc(parse_term(e[1], scope, file),
                       parse_term(e[2], scope, file));
    }
  } catch (const SortError& err) {
    fail(file, e, err.what());
  }
  fail(file, e, "unknown term constructor " + head);
}

SExpr term_sexpr(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kAConst:
      return list({sym(t.inverted() ? "akey-inv" : "akey"), num(t.index())});
    case Term::Kind::kSConst: return list({sym("skey"), num(t.index())});
    case Term::Kind::kDConst: return list({sym("data"), num(t.index())});
    case Term::Kind::kTag: return list({sym("tag"), num(t.index())});
    case Term::Kind::kVar:
      if (t.inverted()) return list({sym("invk"), sym(t.name())});
      return sym(t.name());
    case Term::Kind::kPair: {
      std::vector<SExpr> items{sym("pair")};
      const Term* cur = &t;
      while (cur->is_pair()) {
        items.push_back(term_sexpr(cur->left()));
        cur = &cur->right();
      }
      items.push_back(term_sexpr(*cur));
      return list(std::move(items));
    }
    case Term::Kind::kEnc:
      return list({sym("enc"), term_sexpr(t.plaintext()), term_sexpr(t.key())});
  }
  return sym("?");
}

Declarations parse_declarations(const SExpr& e, const std::string& file) {
  if (!e.is_list()) fail(file, e, "expected declarations");
  Declarations out;
  std::set<std::string> seen;
  for (const SExpr& group : e.items()) {
    if (!group.is_list() || group.size() < 2) {
      fail(file, group, "expected (NAME... SORT)");
    }
    const std::string& sort_text = symbol(group[group.size() - 1], file);
    const bool strand = sort_text == "strd" || sort_text == "strand";
    auto sort = parse_sort(sort_text);
    if (!strand && !sort) {
      fail(file, group[group.size() - 1], "unknown sort " + sort_text);
    }
    for (std::size_t i = 0; i + 1 < group.size(); ++i) {
      const std::string& name = symbol(group[i], file);
      if (!seen.insert(name).second) {
        fail(file, group[i], "duplicate declaration of " + name);
      }
      if (strand) {
        out.strands.push_back(name);
      } else {
        out.vars.push_back({name, *sort});
      }
    }
  }
  return out;
}

SExpr declarations_sexpr(const std::vector<VarKey>& vars,
                         const std::vector<std::string>& strands) {
  std::vector<SExpr> groups;
  std::vector<SExpr> group;
  std::optional<Sort> current;
  auto flush = [&](std::string sort) {
    if (group.empty()) return;
    group.push_back(sym(std::move(sort)));
    groups.push_back(list(std::move(group)));
    group.clear();
  };
  for (const VarKey& v : vars) {
    if (current && *current != v.sort) flush(std::string(sort_name(*current)));
    current = v.sort;
    group.push_back(sym(v.name));
  }
  if (current) flush(std::string(sort_name(*current)));
  for (const std::string& z : strands) group.push_back(sym(z));
  flush("strd");
  return list(std::move(groups));
}

Atom parse_atom(const SExpr& e, const Scope& scope,
                const std::set<std::string>& strands,
                const std::string& file) {
  if (e.is_form("htin")) {
    expect_size(e, 4, file);
    const std::string& z = symbol(e[1], file);
    if (!strands.count(z)) fail(file, e[1], "unknown strand variable " + z);
    const SExpr& call = e[3];
    if (!call.is_list() || call.size() == 0) {
      fail(file, call, "expected (ROLE TERM...)");
    }
    HtIn h{z, number(e[2], file), symbol(call[0], file), {}};
    for (std::size_t i = 1; i < call.size(); ++i) {
      h.args.push_back(parse_term(call[i], scope, file));
    }
    return h;
  }
  if (e.is_form("prec")) {
    expect_size(e, 3, file);
    return Prec{parse_strand_node(e[1], strands, file),
                parse_strand_node(e[2], strands, file)};
  }
  if (e.is_form("non")) {
    expect_size(e, 2, file);
    return Non{parse_term(e[1], scope, file)};
  }
  if (e.is_form("uniq")) {
    expect_size(e, 3, file);
    return Uniq{parse_term(e[1], scope, file),
                parse_strand_node(e[2], strands, file)};
  }
  if (e.is_form("=")) {
    expect_size(e, 3, file);
    if (e[1].is_symbol() && strands.count(e[1].text())) {
      const std::string& rhs = symbol(e[2], file);
      if (!strands.count(rhs)) {
        fail(file, e[2], "a strand variable equals only a strand variable");
      }
      return EqStrand{e[1].text(), rhs};
    }
    const std::string& lhs = symbol(e[1], file);
    auto it = scope.find(lhs);
    if (it == scope.end()) fail(file, e[1], "unknown variable " + lhs);
    return EqTerm{it->second, parse_term(e[2], scope, file)};
  }
  fail(file, e, "unknown atom " + to_string(e));
}

SExpr atom_sexpr(const Atom& a) {
  return std::visit(
      [](const auto& x) -> SExpr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, HtIn>) {
          std::vector<SExpr> call{sym(x.role)};
          for (const Term& t : x.args) call.push_back(term_sexpr(t));
          return list({sym("htin"), sym(x.strand), num(x.height),
                       list(std::move(call))});
        } else if constexpr (std::is_same_v<T, Prec>) {
          return list({sym("prec"), strand_node_sexpr(x.before),
                       strand_node_sexpr(x.after)});
        } else if constexpr (std::is_same_v<T, Non>) {
          return list({sym("non"), term_sexpr(x.term)});
        } else if constexpr (std::is_same_v<T, Uniq>) {
          return list({sym("uniq"), term_sexpr(x.term),
                       strand_node_sexpr(x.node)});
        } else if constexpr (std::is_same_v<T, EqStrand>) {
          return list({sym("="), sym(x.lhs), sym(x.rhs)});
        } else {
          return list({sym("="), sym(x.lhs.name), term_sexpr(x.rhs)});
        }
      },
      a);
}

std::string_view file_kind_name(FileKind kind) {
  switch (kind) {
    case FileKind::kProtocol: return "protocol";
    case FileKind::kSkeleton: return "skeleton";
    case FileKind::kBundle: return "bundle";
    case FileKind::kHom: return "homomorphism";
    case FileKind::kAnalysis: return "analysis";
    case FileKind::kSentence: return "sentence";
    case FileKind::kGoal: return "goal";
  }
  return "?";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// ---------------------------------------------------------------------------
// Protocols

namespace {

std::shared_ptr<const Protocol> parse_protocol(const SExpr& form,
                                               const std::string& file) {
  if (form.size() < 2) fail(file, form, "defprotocol needs a name");
  const std::string& name = symbol(form[1], file);
  std::vector<RoleTemplate> roles;
  std::optional<std::size_t> boxes;
  for (std::size_t i = 2; i < form.size(); ++i) {
    const SExpr& item = form[i];
    if (item.is_form("defstate")) {
      const SExpr& b = require_clause(item, "boxes", file, 1);
      expect_size(b, 2, file);
      boxes = number(b[1], file);
      continue;
    }
    if (!item.is_form("defrole") || item.size() < 2) {
      fail(file, item, "expected (defrole ...) or (defstate ...)");
    }
    const std::string& role = symbol(item[1], file);
    Declarations decls;
    if (const SExpr* v = clause(item, "vars")) {
      std::vector<SExpr> groups(v->items().begin() + 1, v->items().end());
      decls = parse_declarations(SExpr::list(groups, v->line(), v->column()),
                                 file);
      if (!decls.strands.empty()) {
        fail(file, *v, "roles take no strand variables");
      }
    }
    const Scope scope = scope_of(decls.vars);
    Trace trace = parse_trace(require_clause(item, "trace", file), scope, file);
    OriginationSets nonorig(trace.size()), uniqorig(trace.size());
    std::vector<Lifted<AnnotationSpec>> annotations(trace.size());
    auto indexed = [&](const SExpr& entry) -> std::size_t {
      expect_size(entry, 2, file);
      const std::size_t idx = number(entry[0], file);
      if (idx >= trace.size()) fail(file, entry[0], "index past the trace");
      return idx;
    };
    for (const SExpr* c : clauses(item, "non-orig")) {
      for (std::size_t j = 1; j < c->size(); ++j) {
        nonorig[indexed((*c)[j])].insert(parse_term((*c)[j][1], scope, file));
      }
    }
    for (const SExpr* c : clauses(item, "uniq-orig")) {
      for (std::size_t j = 1; j < c->size(); ++j) {
        uniqorig[indexed((*c)[j])].insert(parse_term((*c)[j][1], scope, file));
      }
    }
    for (const SExpr* c : clauses(item, "annotations")) {
      for (std::size_t j = 1; j < c->size(); ++j) {
        const std::size_t idx = indexed((*c)[j]);
        const SExpr& a = (*c)[j][1];
        if (a.is_form("state-step")) {
          annotations[idx] = Lifted<AnnotationSpec>::up(StateEncoding::kStep);
        } else if (a.is_form("state-issue")) {
          annotations[idx] = Lifted<AnnotationSpec>::up(StateEncoding::kIssue);
        } else if (a.is_form("opaque")) {
          std::string text;
          for (std::size_t k = 1; k < a.size(); ++k) {
            if (k > 1) text += ' ';
            text += a[k].is_list() ? to_string(a[k]) : a[k].text();
          }
          annotations[idx] = Lifted<AnnotationSpec>::up(OpaqueAnnotation{text});
        } else {
          fail(file, a, "unknown annotation " + to_string(a));
        }
      }
    }
    try {
      roles.emplace_back(role, decls.vars, std::move(trace), std::move(nonorig),
                         std::move(uniqorig), std::move(annotations));
    } catch (const Error& err) {
      fail(file, item, err.what());
    }
  }
  try {
    return std::make_shared<const Protocol>(name, std::move(roles), boxes);
  } catch (const Error& err) {
    fail(file, form, err.what());
  }
}

}  // namespace

SExpr protocol_sexpr(const Protocol& p) {
  std::vector<SExpr> items{sym("defprotocol"), sym(p.name())};
  for (const RoleTemplate& r : p.roles()) {
    std::vector<SExpr> role{sym("defrole"), sym(r.name())};
    std::vector<SExpr> vars{sym("vars")};
    const SExpr decls = declarations_sexpr(r.params());
    vars.insert(vars.end(), decls.items().begin(), decls.items().end());
    role.push_back(list(std::move(vars)));
    role.push_back(trace_sexpr(r.trace()));
    auto origination = [&](const char* head, const OriginationSets& sets) {
      std::vector<SExpr> c{sym(head)};
      for (std::size_t i = 0; i < sets.size(); ++i) {
        for (const Term& t : sets[i]) c.push_back(list({num(i), term_sexpr(t)}));
      }
      if (c.size() > 1) role.push_back(list(std::move(c)));
    };
    origination("non-orig", r.nonorig());
    origination("uniq-orig", r.uniqorig());
    std::vector<SExpr> annos{sym("annotations")};
    for (std::size_t i = 0; i < r.annotations().size(); ++i) {
      const auto& a = r.annotations()[i];
      if (a.is_bottom()) continue;
      SExpr value = std::visit(
          [](const auto& x) -> SExpr {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, StateEncoding>) {
              return list({sym(x == StateEncoding::kStep ? "state-step"
                                                         : "state-issue")});
            } else {
              return list({sym("opaque"), SExpr::string(x.text)});
            }
          },
          a.down());
      annos.push_back(list({num(i), std::move(value)}));
    }
    if (annos.size() > 1) role.push_back(list(std::move(annos)));
    items.push_back(list(std::move(role)));
  }
  if (p.boxes()) {
    items.push_back(list({sym("defstate"), list({sym("boxes"), num(*p.boxes())})}));
  }
  return list(std::move(items));
}

// ---------------------------------------------------------------------------
// Workspace

void Workspace::add_protocol(std::shared_ptr<const Protocol> p) {
  protocols_[p->name()] = std::move(p);
}

std::shared_ptr<const Protocol> Workspace::protocol(
    const std::string& name) const {
  auto it = protocols_.find(name);
  if (it == protocols_.end()) throw Error("no protocol named " + name);
  return it->second;
}

const Skeleton& Workspace::skeleton(const std::string& name) const {
  auto it = skeletons_.find(name);
  if (it == skeletons_.end()) throw Error("no skeleton named " + name);
  return it->second;
}

const BundleFile& Workspace::bundle(const std::string& name) const {
  auto it = bundles_.find(name);
  if (it == bundles_.end()) throw Error("no bundle named " + name);
  return it->second;
}

const SExpr& Workspace::hom(const std::string& name) const {
  auto it = homs_.find(name);
  if (it == homs_.end()) throw Error("no homomorphism named " + name);
  return it->second;
}

const ShapeAnalysis& Workspace::analysis(const std::string& name) const {
  auto it = analyses_.find(name);
  if (it == analyses_.end()) throw Error("no analysis named " + name);
  return it->second;
}

const ShapeSentence& Workspace::sentence(const std::string& name) const {
  auto it = sentences_.find(name);
  if (it == sentences_.end()) throw Error("no sentence named " + name);
  return it->second;
}

const Goal& Workspace::goal(const std::string& name) const {
  auto it = goals_.find(name);
  if (it == goals_.end()) throw Error("no goal named " + name);
  return it->second;
}

std::shared_ptr<const Protocol> Workspace::require_protocol(
    const SExpr& form, const std::string& file, const std::string& dir) {
  const SExpr& c = require_clause(form, "protocol", file);
  expect_size(c, 2, file);
  const std::string& name = symbol(c[1], file);
  if (auto it = protocols_.find(name); it != protocols_.end()) {
    return it->second;
  }
  std::vector<std::string> dirs{dir};
  dirs.insert(dirs.end(), dirs_.begin(), dirs_.end());
  for (const std::string& d : dirs) {
    const std::string path = join_dir(d, name + ".prot");
    if (!std::filesystem::exists(path) || loading_.count(path)) continue;
    load(path);
    if (auto it = protocols_.find(name); it != protocols_.end()) {
      return it->second;
    }
  }
  fail(file, c, "protocol " + name + " is not loaded and " + name +
                    ".prot was not found");
}

Skeleton Workspace::parse_skeleton(const SExpr& form, const std::string& file,
                                   const std::string& dir) {
  if (form.size() < 2) fail(file, form, "defskeleton needs a name");
  const std::string& name = symbol(form[1], file);
  auto protocol = require_protocol(form, file, dir);
  Declarations decls;
  if (const SExpr* v = clause(form, "vars")) {
    std::vector<SExpr> groups(v->items().begin() + 1, v->items().end());
    decls = parse_declarations(SExpr::list(groups), file);
  }
  const Scope scope = scope_of(decls.vars);
  std::vector<Instance> instances;
  for (const SExpr* in : clauses(form, "instance")) {
    const SExpr& r = require_clause(*in, "role", file, 1);
    expect_size(r, 2, file);
    const std::string& role_name = symbol(r[1], file);
    const RoleTemplate* role = protocol->find(role_name);
    if (role == nullptr) fail(file, r, "unknown role " + role_name);
    Instance inst{role_name, role->trace().size(), {}};
    if (const SExpr* h = clause(*in, "height", 1)) {
      expect_size(*h, 2, file);
      inst.height = number((*h)[1], file);
    }
    if (const SExpr* m = clause(*in, "map", 1)) {
      for (std::size_t i = 1; i < m->size(); ++i) {
        const SExpr& entry = (*m)[i];
        expect_size(entry, 2, file);
        const std::string& param = symbol(entry[0], file);
        auto p = std::find_if(role->params().begin(), role->params().end(),
                              [&](const VarKey& k) { return k.name == param; });
        if (p == role->params().end()) {
          fail(file, entry[0], role_name + " has no parameter " + param);
        }
        try {
          inst.mapping.bind(*p, parse_term(entry[1], scope, file));
        } catch (const SortError& err) {
          fail(file, entry, err.what());
        }
      }
    }
    instances.push_back(std::move(inst));
  }
  NodeOrder ordering;
  if (const SExpr* p = clause(form, "precedes")) {
    for (std::size_t i = 1; i < p->size(); ++i) {
      expect_size((*p)[i], 2, file);
      ordering.emplace_back(parse_node((*p)[i][0], file),
                            parse_node((*p)[i][1], file));
    }
  }
  std::set<Term> nonorig, uniqorig;
  if (const SExpr* n = clause(form, "non-orig")) {
    for (std::size_t i = 1; i < n->size(); ++i) {
      nonorig.insert(parse_term((*n)[i], scope, file));
    }
  }
  if (const SExpr* u = clause(form, "uniq-orig")) {
    for (std::size_t i = 1; i < u->size(); ++i) {
      uniqorig.insert(parse_term((*u)[i], scope, file));
    }
  }
  try {
    return Skeleton(name, protocol, decls.vars, std::move(instances),
                    std::move(ordering), std::move(nonorig),
                    std::move(uniqorig));
  } catch (const Error& err) {
    fail(file, form, err.what());
  }
}

HomWitness parse_hom(const SExpr& form, const Skeleton& from,
                     const std::vector<VarKey>& to_vars,
                     const std::string& file) {
  HomWitness w;
  const SExpr& strands = require_clause(form, "strands", file, 1);
  for (std::size_t i = 1; i < strands.size(); ++i) {
    const SExpr& s = strands[i];
    if (s.is_list()) {
      Node n = parse_node(s, file);
      w.listener_nodes[i - 1] = n.index;
      w.strand_map.push_back(n.strand);
    } else {
      w.strand_map.push_back(number(s, file));
    }
  }
  if (const SExpr* m = clause(form, "map", 1)) {
    const Scope domain = scope_of(from.vars());
    const Scope range = scope_of(to_vars);
    for (std::size_t i = 1; i < m->size(); ++i) {
      const SExpr& entry = (*m)[i];
      expect_size(entry, 2, file);
      const std::string& x = symbol(entry[0], file);
      auto it = domain.find(x);
      if (it == domain.end()) {
        fail(file, entry[0], from.name() + " has no variable " + x);
      }
      try {
        w.term_map.bind(it->second, parse_term(entry[1], range, file));
      } catch (const SortError& err) {
        fail(file, entry, err.what());
      }
    }
  }
  return w;
}

namespace {

BundleFile parse_bundle(const SExpr& form, std::shared_ptr<const Protocol> p,
                        const std::string& file) {
  const std::string& name = symbol(form[1], file);
  std::vector<Trace> traces;
  PartialAssignment hint;
  for (const SExpr* s : clauses(form, "strand")) {
    if (const SExpr* t = clause(*s, "trace", 1)) {
      traces.push_back(parse_trace(*t, {}, file));
      hint.emplace_back();
      continue;
    }
    const SExpr& r = require_clause(*s, "role", file, 1);
    expect_size(r, 2, file);
    const std::string& role = symbol(r[1], file);
    std::optional<StrandRole> assigned;
    try {
      if (auto kind = parse_adversary(role)) {
        std::vector<Term> params;
        const SExpr& ps = require_clause(*s, "params", file, 1);
        for (std::size_t i = 1; i < ps.size(); ++i) {
          params.push_back(parse_term(ps[i], {}, file));
        }
        assigned = StrandRole::adversary(*kind, std::move(params));
      } else {
        const RoleTemplate* t = p->find(role);
        if (t == nullptr || t->is_listener()) {
          fail(file, r, "protocol " + p->name() + " has no role " + role);
        }
        Substitution binding;
        if (const SExpr* m = clause(*s, "map", 1)) {
          for (std::size_t i = 1; i < m->size(); ++i) {
            const SExpr& entry = (*m)[i];
            expect_size(entry, 2, file);
            const std::string& param = symbol(entry[0], file);
            auto k = std::find_if(t->params().begin(), t->params().end(),
                                  [&](const VarKey& v) { return v.name == param; });
            if (k == t->params().end()) {
              fail(file, entry[0], role + " has no parameter " + param);
            }
            binding.bind(*k, parse_term(entry[1], {}, file));
          }
        }
        assigned = StrandRole::regular(role, std::move(binding));
      }
      RoleItem item = role_item(*p, *assigned);
      std::size_t height = item.trace.size();
      if (const SExpr* h = clause(*s, "height", 1)) {
        expect_size(*h, 2, file);
        height = number((*h)[1], file);
        if (height == 0 || height > item.trace.size()) {
          fail(file, *h, "height out of range");
        }
      }
      traces.push_back(item.trace.prefix(height));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& err) {
      fail(file, *s, err.what());
    }
    hint.push_back(std::move(assigned));
  }
  if (traces.empty()) fail(file, form, "a bundle needs at least one strand");
  std::vector<CommEdge> edges;
  if (const SExpr* e = clause(form, "edges")) {
    for (std::size_t i = 1; i < e->size(); ++i) {
      expect_size((*e)[i], 2, file);
      edges.push_back({parse_node((*e)[i][0], file),
                       parse_node((*e)[i][1], file)});
    }
  }
  return BundleFile{name, std::move(p),
                    Bundle(StrandSpace(std::move(traces)), std::move(edges)),
                    std::move(hint)};
}

struct ForallParts {
  Declarations decls;
  Scope scope;
  std::set<std::string> strands;
  const SExpr* body;
};

ForallParts parse_forall(const SExpr& form, std::string_view connective,
                         const std::string& file) {
  const SExpr& f = require_clause(form, "forall", file);
  expect_size(f, 3, file);
  ForallParts out;
  out.decls = parse_declarations(f[1], file);
  out.scope = scope_of(out.decls.vars);
  out.strands.insert(out.decls.strands.begin(), out.decls.strands.end());
  if (!f[2].is_form(connective)) {
    fail(file, f[2], "expected (" + std::string(connective) + " ...)");
  }
  expect_size(f[2], 3, file);
  out.body = &f[2];
  return out;
}

}  // namespace

std::pair<FileKind, std::string> Workspace::load_form(const SExpr& form,
                                                      const std::string& file,
                                                      const std::string& dir) {
  if (!form.is_list() || form.size() < 2 || !form[0].is_symbol()) {
    fail(file, form, "expected a definition, found " + to_string(form));
  }
  const std::string& head = form[0].text();
  const std::string& name = symbol(form[1], file);
  if (head == "defprotocol") {
    add_protocol(parse_protocol(form, file));
    return {FileKind::kProtocol, name};
  }
  if (head == "defskeleton") {
    skeletons_.insert_or_assign(name, parse_skeleton(form, file, dir));
    return {FileKind::kSkeleton, name};
  }
  if (head == "defbundle") {
    bundles_.insert_or_assign(
        name, parse_bundle(form, require_protocol(form, file, dir), file));
    return {FileKind::kBundle, name};
  }
  if (head == "defhom") {
    homs_.insert_or_assign(name, form);
    return {FileKind::kHom, name};
  }
  if (head == "defanalysis") {
    const SExpr& pov = require_clause(form, "pov", file);
    expect_size(pov, 2, file);
    Skeleton k0 = parse_skeleton(pov[1], file, dir);
    skeletons_.insert_or_assign(k0.name(), k0);
    std::vector<Shape> shapes;
    for (const SExpr* s : clauses(form, "shape")) {
      expect_size(*s, 3, file);
      Skeleton ki = parse_skeleton((*s)[1], file, dir);
      skeletons_.insert_or_assign(ki.name(), ki);
      HomWitness w = parse_hom((*s)[2], k0, ki.vars(), file);
      shapes.push_back(Shape{std::move(ki), std::move(w)});
    }
    analyses_.insert_or_assign(
        name, ShapeAnalysis{name, std::move(k0), std::move(shapes)});
    return {FileKind::kAnalysis, name};
  }
  if (head == "defsentence") {
    ShapeSentence s;
    s.name = name;
    s.protocol = require_protocol(form, file, dir);
    ForallParts parts = parse_forall(form, "iff", file);
    s.pov.vars = parts.decls.vars;
    s.pov.strand_vars = parts.decls.strands;
    s.pov.atoms = parse_conjunction((*parts.body)[1], parts.scope,
                                    parts.strands, file);
    for (const SExpr* d : disjuncts_of((*parts.body)[2])) {
      Quantified q = parse_exists(*d, parts.scope, parts.strands, file);
      Disjunct out{q.decls.vars, q.decls.strands, {}, {}};
      for (Atom& a : q.atoms) {
        (is_equality(a) ? out.delta : out.atoms).push_back(std::move(a));
      }
      s.disjuncts.push_back(std::move(out));
    }
    try {
      validate_sentence(s);
    } catch (const Error& err) {
      fail(file, form, err.what());
    }
    sentences_.insert_or_assign(name, std::move(s));
    return {FileKind::kSentence, name};
  }
  if (head == "defgoal") {
    Goal g;
    g.name = name;
    g.protocol = require_protocol(form, file, dir);
    ForallParts parts = parse_forall(form, "implies", file);
    g.hypothesis.vars = parts.decls.vars;
    g.hypothesis.strand_vars = parts.decls.strands;
    g.hypothesis.atoms = parse_conjunction((*parts.body)[1], parts.scope,
                                           parts.strands, file);
    for (const SExpr* d : disjuncts_of((*parts.body)[2])) {
      Quantified q = parse_exists(*d, parts.scope, parts.strands, file);
      g.conclusions.push_back(
          Formula{q.decls.vars, q.decls.strands, std::move(q.atoms)});
    }
    try {
      validate_goal(g);
    } catch (const Error& err) {
      fail(file, form, err.what());
    }
    goals_.insert_or_assign(name, std::move(g));
    return {FileKind::kGoal, name};
  }
  fail(file, form[0], "unknown definition " + head);
}

std::vector<std::pair<FileKind, std::string>> Workspace::load_text(
    std::string_view text, const std::string& file, const std::string& dir) {
  std::vector<std::pair<FileKind, std::string>> out;
  for (const SExpr& form : parse_sexprs(text, file)) {
    out.push_back(load_form(form, file, dir));
  }
  return out;
}

std::vector<std::pair<FileKind, std::string>> Workspace::load(
    const std::string& path) {
  loading_.insert(path);
  const std::string text = read_file(path);
  std::string dir = std::filesystem::path(path).parent_path().string();
  if (dir.empty()) dir = ".";
  auto out = load_text(text, path, dir);
  loading_.erase(path);
  return out;
}

std::string Workspace::load_expect(const std::string& path, FileKind kind) {
  auto loaded = load(path);
  if (loaded.empty()) throw ParseError(path, 1, 1, "file defines nothing");
  if (loaded.front().first != kind) {
    throw ParseError(path, 1, 1,
                     "expected a " + std::string(file_kind_name(kind)) +
                         ", found a " +
                         std::string(file_kind_name(loaded.front().first)));
  }
  return loaded.front().second;
}

// ---------------------------------------------------------------------------
// Printers

SExpr skeleton_sexpr(const Skeleton& k) {
  std::vector<SExpr> items{sym("defskeleton"), sym(k.name()),
                           list({sym("protocol"), sym(k.protocol().name())})};
  std::vector<SExpr> vars{sym("vars")};
  const SExpr decls = declarations_sexpr(k.vars());
  vars.insert(vars.end(), decls.items().begin(), decls.items().end());
  items.push_back(list(std::move(vars)));
  for (std::size_t s = 0; s < k.instances().size(); ++s) {
    const Instance& in = k.instances()[s];
    items.push_back(list({sym("instance"), list({sym("role"), sym(in.role)}),
                          list({sym("height"), num(in.height)}),
                          map_sexpr(in.mapping, k.role_of(s).params())}));
  }
  if (!k.ordering().empty()) {
    std::vector<SExpr> p{sym("precedes")};
    for (const auto& [a, c] : k.ordering()) {
      p.push_back(list({node_sexpr(a), node_sexpr(c)}));
    }
    items.push_back(list(std::move(p)));
  }
  if (!k.nonorig().empty()) {
    std::vector<SExpr> n{sym("non-orig")};
    for (const Term& t : k.nonorig()) n.push_back(term_sexpr(t));
    items.push_back(list(std::move(n)));
  }
  if (!k.uniqorig().empty()) {
    std::vector<SExpr> u{sym("uniq-orig")};
    for (const Term& t : k.uniqorig()) u.push_back(term_sexpr(t));
    items.push_back(list(std::move(u)));
  }
  return list(std::move(items));
}

SExpr bundle_sexpr(const BundleFile& b) {
  std::vector<SExpr> items{sym("defbundle"), sym(b.name),
                           list({sym("protocol"), sym(b.protocol->name())})};
  const StrandSpace& space = b.bundle.space();
  for (std::size_t s = 0; s < space.size(); ++s) {
    const std::optional<StrandRole>* hint =
        s < b.hint.size() ? &b.hint[s] : nullptr;
    if (hint == nullptr || !hint->has_value()) {
      items.push_back(list({sym("strand"), trace_sexpr(space.trace(s))}));
      continue;
    }
    const StrandRole& r = **hint;
    std::vector<SExpr> strand{sym("strand"), list({sym("role"), sym(r.role)})};
    std::size_t full = 0;
    if (r.kind == StrandRole::Kind::kAdversary) {
      std::vector<SExpr> params{sym("params")};
      for (const Term& t : r.params) params.push_back(term_sexpr(t));
      full = role_item(*b.protocol, r).trace.size();
      if (space.trace(s).size() != full) {
        strand.push_back(list({sym("height"), num(space.trace(s).size())}));
      }
      strand.push_back(list(std::move(params)));
    } else {
      strand.push_back(list({sym("height"), num(space.trace(s).size())}));
      strand.push_back(
          map_sexpr(r.binding, b.protocol->find(r.role)->params()));
    }
    items.push_back(list(std::move(strand)));
  }
  if (!b.bundle.edges().empty()) {
    std::vector<SExpr> edges{sym("edges")};
    for (const CommEdge& e : b.bundle.edges()) {
      edges.push_back(list({node_sexpr(e.from), node_sexpr(e.to)}));
    }
    items.push_back(list(std::move(edges)));
  }
  return list(std::move(items));
}

SExpr hom_sexpr(const std::string& name, const HomWitness& w) {
  std::vector<SExpr> strands{sym("strands")};
  for (std::size_t s = 0; s < w.strand_map.size(); ++s) {
    auto li = w.listener_nodes.find(s);
    if (li == w.listener_nodes.end()) {
      strands.push_back(num(w.strand_map[s]));
    } else {
      strands.push_back(list({num(w.strand_map[s]), num(li->second)}));
    }
  }
  std::vector<SExpr> map{sym("map")};
  for (const auto& [k, t] : w.term_map.bindings()) {
    map.push_back(list({sym(k.name), term_sexpr(t)}));
  }
  return list({sym("defhom"), sym(name), list(std::move(strands)),
               list(std::move(map))});
}

SExpr analysis_sexpr(const ShapeAnalysis& a) {
  std::vector<SExpr> items{sym("defanalysis"), sym(a.name),
                           list({sym("pov"), skeleton_sexpr(a.pov)})};
  for (const Shape& s : a.shapes) {
    items.push_back(list({sym("shape"), skeleton_sexpr(s.skeleton),
                          hom_sexpr(s.skeleton.name(), s.hom)}));
  }
  return list(std::move(items));
}

SExpr sentence_sexpr(const ShapeSentence& s) {
  std::vector<SExpr> ors{sym("or")};
  for (const Disjunct& d : s.disjuncts) {
    std::vector<Atom> all = d.delta;
    all.insert(all.end(), d.atoms.begin(), d.atoms.end());
    ors.push_back(list({sym("exists"), declarations_sexpr(d.vars, d.strand_vars),
                        conjunction_sexpr(all)}));
  }
  return list(
      {sym("defsentence"), sym(s.name),
       list({sym("protocol"), sym(s.protocol->name())}),
       list({sym("forall"), declarations_sexpr(s.pov.vars, s.pov.strand_vars),
             list({sym("iff"), conjunction_sexpr(s.pov.atoms),
                   list(std::move(ors))})})});
}

SExpr goal_sexpr(const Goal& g) {
  std::vector<SExpr> ors{sym("or")};
  for (const Formula& c : g.conclusions) {
    ors.push_back(list({sym("exists"), declarations_sexpr(c.vars, c.strand_vars),
                        conjunction_sexpr(c.atoms)}));
  }
  return list({sym("defgoal"), sym(g.name),
               list({sym("protocol"), sym(g.protocol->name())}),
               list({sym("forall"),
                     declarations_sexpr(g.hypothesis.vars,
                                        g.hypothesis.strand_vars),
                     list({sym("implies"),
                           conjunction_sexpr(g.hypothesis.atoms),
                           list(std::move(ors))})})});
}

SExpr node_sexpr(const Node& n) { return list({num(n.strand), num(n.index)}); }

SExpr assignment_sexpr(const Assignment& a) {
  std::vector<SExpr> items{sym("assignment")};
  for (const auto& [z, s] : a.strands) {
    auto li = a.listener_nodes.find(z);
    items.push_back(list({sym(z), li == a.listener_nodes.end()
                                      ? num(s)
                                      : list({num(s), num(li->second)})}));
  }
  for (const auto& [k, t] : a.terms.bindings()) {
    items.push_back(list({sym(k.name), term_sexpr(t)}));
  }
  return list(std::move(items));
}

SExpr witness_sexpr(const CompatibilityWitness& w) {
  std::vector<SExpr> order{sym("order")};
  for (const Node& n : w.order) order.push_back(node_sexpr(n));
  std::vector<SExpr> path{sym("path")};
  for (std::size_t s : w.path) path.push_back(num(s));
  return list({sym("compatible"), list({sym("ell"), num(w.ell)}),
               list(std::move(order)), list(std::move(path))});
}

SExpr transitions_sexpr(const TransitionSet& t) {
  switch (t.kind()) {
    case TransitionSet::Kind::kCheckBox: return list({sym("check-box")});
    case TransitionSet::Kind::kNewCard: return list({sym("new-card")});
    case TransitionSet::Kind::kEndsAt:
      return list({sym("ends-at"), num(t.state())});
    case TransitionSet::Kind::kStartsAt:
      return list({sym("starts-at"), num(t.state())});
    case TransitionSet::Kind::kExplicit: {
      std::vector<SExpr> items{sym("explicit")};
      for (const auto& [a, b] : t.pairs()) items.push_back(list({num(a), num(b)}));
      return list(std::move(items));
    }
  }
  return list({});
}

// ---------------------------------------------------------------------------
// Graphviz

namespace {

std::string dot_label(const Event& e) {
  std::string text = (e.outbound() ? "+" : "-") + to_string(e.message);
  if (text.size() > 48) text = text.substr(0, 45) + "...";
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string dot_id(const Node& n) {
  return "n" + std::to_string(n.strand) + "_" + std::to_string(n.index);
}

}  // namespace

std::string export_dot(const Bundle& b, const std::string& name) {
  const auto problems = validate_bundle(b);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid bundle: " << problems.front();
    throw ValidationError(msg.str());
  }
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n";
  os << "  node [shape=box, fontname=\"monospace\"];\n";
  const StrandSpace& space = b.space();
  for (std::size_t s = 0; s < space.size(); ++s) {
    os << "  subgraph cluster_" << s << " {\n";
    os << "    label=\"strand " << s << "\";\n";
    for (std::size_t i = 0; i < space.trace(s).size(); ++i) {
      const Node n{s, i};
      os << "    " << dot_id(n) << " [label=\"" << dot_label(evt(space, n))
         << "\"];\n";
    }
    for (std::size_t i = 0; i + 1 < space.trace(s).size(); ++i) {
      os << "    " << dot_id({s, i}) << " -> " << dot_id({s, i + 1})
         << " [color=\"black:invis:black\"];\n";
    }
    os << "  }\n";
  }
  for (const CommEdge& e : b.edges()) {
    os << "  " << dot_id(e.from) << " -> " << dot_id(e.to) << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace strandkit
