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

#include "strandkit/logic.h"

#include <algorithm>
#include <sstream>

namespace strandkit {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

void print_node(std::ostream& os, const StrandNode& n) {
  os << '(' << n.strand << ", " << n.index << ')';
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const Atom& a) {
  std::visit(Overload{
                 [&](const HtIn& h) {
                   os << "htin(" << h.strand << ", " << h.height << ", "
                      << h.role << '(';
                   for (std::size_t i = 0; i < h.args.size(); ++i) {
                     if (i) os << ", ";
                     os << h.args[i];
                   }
                   os << "))";
                 },
                 [&](const Prec& p) {
                   os << "prec(";
                   print_node(os, p.before);
                   os << ", ";
                   print_node(os, p.after);
                   os << ')';
                 },
                 [&](const Non& n) { os << "non(" << n.term << ')'; },
                 [&](const Uniq& u) {
                   os << "uniq(" << u.term << ", ";
                   print_node(os, u.node);
                   os << ')';
                 },
                 [&](const EqStrand& e) { os << e.lhs << " = " << e.rhs; },
                 [&](const EqTerm& e) {
                   os << e.lhs.name << " = " << e.rhs;
                 },
             },
             a);
  return os;
}

std::string to_string(const Atom& a) {
  std::ostringstream os;
  os << a;
  return os.str();
}

std::set<VarKey> atom_variables(const Atom& a) {
  std::set<VarKey> out;
  std::visit(Overload{
                 [&](const HtIn& h) {
                   for (const Term& t : h.args) collect_variables(t, out);
                 },
                 [&](const Prec&) {},
                 [&](const Non& n) { collect_variables(n.term, out); },
                 [&](const Uniq& u) { collect_variables(u.term, out); },
                 [&](const EqStrand&) {},
                 [&](const EqTerm& e) {
                   out.insert(e.lhs);
                   collect_variables(e.rhs, out);
                 },
             },
             a);
  return out;
}

std::set<std::string> atom_strands(const Atom& a) {
  return std::visit(
      Overload{
          [](const HtIn& h) { return std::set<std::string>{h.strand}; },
          [](const Prec& p) {
            return std::set<std::string>{p.before.strand, p.after.strand};
          },
          [](const Non&) { return std::set<std::string>{}; },
          [](const Uniq& u) { return std::set<std::string>{u.node.strand}; },
          [](const EqStrand& e) {
            return std::set<std::string>{e.lhs, e.rhs};
          },
          [](const EqTerm&) { return std::set<std::string>{}; },
      },
      a);
}

std::set<std::string> listener_variables(const std::vector<Atom>& atoms) {
  std::set<std::string> out;
  for (const Atom& a : atoms) {
    if (const auto* h = std::get_if<HtIn>(&a)) {
      if (h->role == kListenerRole) out.insert(h->strand);
    }
  }
  return out;
}

void validate_formula(const Protocol& p, const Formula& f,
                      const Formula* outer) {
  std::set<VarKey> vars(f.vars.begin(), f.vars.end());
  std::set<std::string> strands(f.strand_vars.begin(), f.strand_vars.end());
  if (outer != nullptr) {
    vars.insert(outer->vars.begin(), outer->vars.end());
    strands.insert(outer->strand_vars.begin(), outer->strand_vars.end());
  }
  for (const Atom& a : f.atoms) {
    const std::string where = "atom " + to_string(a);
    for (const VarKey& v : atom_variables(a)) {
      if (!vars.count(v)) {
        throw ValidationError(where + ": undeclared variable " + v.name +
                              ":" + std::string(sort_name(v.sort)));
      }
    }
    for (const std::string& z : atom_strands(a)) {
      if (!strands.count(z)) {
        throw ValidationError(where + ": undeclared strand variable " + z);
      }
    }
    if (const auto* h = std::get_if<HtIn>(&a)) {
      const RoleTemplate* role = p.find(h->role);
      if (role == nullptr) {
        throw ValidationError(where + ": unknown role " + h->role);
      }
      if (h->args.size() != role->params().size()) {
        throw ValidationError(where + ": " + h->role + " takes " +
                              std::to_string(role->params().size()) +
                              " arguments");
      }
      for (std::size_t i = 0; i < h->args.size(); ++i) {
        if (!sort_leq(sort_of(h->args[i]), role->params()[i].sort)) {
          throw ValidationError(where + ": argument " + std::to_string(i) +
                                " has the wrong sort");
        }
      }
      if (h->height == 0 || h->height > role->trace().size()) {
        throw ValidationError(where + ": height out of range");
      }
    } else if (const auto* n = std::get_if<Non>(&a)) {
      if (!is_atom(n->term)) throw ValidationError(where + ": not an atom");
    } else if (const auto* u = std::get_if<Uniq>(&a)) {
      if (!is_atom(u->term)) throw ValidationError(where + ": not an atom");
    } else if (const auto* e = std::get_if<EqTerm>(&a)) {
      Sort s = sort_of(e->rhs);
      if (!sort_leq(s, e->lhs.sort) && !sort_leq(e->lhs.sort, s)) {
        throw ValidationError(where + ": sides have unrelated sorts");
      }
    }
  }
}

std::ostream& operator<<(std::ostream& os, const Assignment& a) {
  os << '{';
  bool first = true;
  for (const auto& [z, s] : a.strands) {
    if (!first) os << ", ";
    first = false;
    os << z << " -> " << s;
    if (auto it = a.listener_nodes.find(z); it != a.listener_nodes.end()) {
      os << '@' << it->second;
    }
  }
  for (const auto& [key, t] : a.terms.bindings()) {
    if (!first) os << ", ";
    first = false;
    os << key.name << " -> " << t;
  }
  return os << '}';
}

Assignment restrict(const Assignment& a, const std::vector<VarKey>& vars,
                    const std::vector<std::string>& strand_vars) {
  Assignment out;
  for (const VarKey& v : vars) {
    if (const Term* t = a.terms.find(v)) out.terms.bind(v, *t);
  }
  for (const std::string& z : strand_vars) {
    if (auto it = a.strands.find(z); it != a.strands.end()) {
      out.strands.insert(*it);
    }
    if (auto it = a.listener_nodes.find(z); it != a.listener_nodes.end()) {
      out.listener_nodes.insert(*it);
    }
  }
  return out;
}

std::string strand_variable(std::size_t strand) {
  return "z" + std::to_string(strand);
}

Formula skeleton_formula(const Skeleton& k) {
  Formula f;
  f.vars = k.vars();
  for (std::size_t s = 0; s < k.instances().size(); ++s) {
    f.strand_vars.push_back(strand_variable(s));
  }
  for (std::size_t s = 0; s < k.instances().size(); ++s) {
    const Instance& in = k.instances()[s];
    HtIn h{strand_variable(s), in.height, in.role, {}};
    for (const VarKey& p : k.role_of(s).params()) {
      h.args.push_back(apply(in.mapping, as_term(p)));
    }
    f.atoms.push_back(std::move(h));
  }
  for (const auto& [a, c] : k.ordering()) {
    f.atoms.push_back(Prec{{strand_variable(a.strand), a.index},
                           {strand_variable(c.strand), c.index}});
  }
  for (const Term& t : k.uniqorig()) {
    Node o = k.origination_node(t);
    f.atoms.push_back(Uniq{t, {strand_variable(o.strand), o.index}});
  }
  for (const Term& t : k.nonorig()) f.atoms.push_back(Non{t});
  return f;
}

namespace {

class Solver {
 public:
  Solver(const Protocol& p, const std::vector<Atom>& atoms, const Bundle& b)
      : p_(p),
        atoms_(atoms),
        space_(b.space()),
        prec_(b),
        pool_(b.space(), ground_subterms(atoms)),
        listeners_(listener_variables(atoms)) {
    for (const Atom& a : atoms_) {
      if (std::holds_alternative<HtIn>(a) ||
          std::holds_alternative<EqTerm>(a)) {
        for (const VarKey& v : atom_variables(a)) bindable_.insert(v);
      }
    }
  }

  // nullopt while some variable of the atom is unbound.
  std::optional<bool> eval(const Atom& atom, const Assignment& a) const {
    for (const VarKey& v : atom_variables(atom)) {
      if (!a.terms.contains(v)) return std::nullopt;
    }
    for (const std::string& z : atom_strands(atom)) {
      if (!a.strands.count(z)) return std::nullopt;
    }
    return std::visit(
        Overload{
            [&](const HtIn& h) { return eval_htin(h, a); },
            [&](const Prec& pr) {
              if (pr.before.strand == pr.after.strand &&
                  listeners_.count(pr.before.strand)) {
                return pr.before.index < pr.after.index;
              }
              auto n0 = resolve(pr.before, a);
              auto n1 = resolve(pr.after, a);
              return n0 && n1 && prec_(*n0, *n1);
            },
            [&](const Non& n) {
              return non_originating(space_, apply(a.terms, n.term));
            },
            [&](const Uniq& u) {
              auto n = resolve(u.node, a);
              return n && uniquely_originates(space_, apply(a.terms, u.term),
                                              *n);
            },
            [&](const EqStrand& e) {
              return a.strands.at(e.lhs) == a.strands.at(e.rhs) &&
                     listener_index(e.lhs, a) == listener_index(e.rhs, a);
            },
            [&](const EqTerm& e) {
              return apply(a.terms, as_term(e.lhs)) == apply(a.terms, e.rhs);
            },
        },
        atom);
  }

  void run(const Assignment& seed,
           const std::function<bool(const Assignment&)>& visit) {
    visit_ = &visit;
    for (const Atom& atom : atoms_) {
      for (const VarKey& v : atom_variables(atom)) {
        if (!bindable_.count(v) && !seed.terms.contains(v)) {
          throw UnsupportedFragment(
              "variable " + v.name + " in " + to_string(atom) +
              " is bound by no htin atom or equality");
        }
      }
    }
    std::vector<char> done(atoms_.size(), 0);
    std::vector<char> matched(atoms_.size(), 0);
    search(seed, done, matched);
  }

 private:
  static std::set<Term> ground_subterms(const std::vector<Atom>& atoms) {
    std::set<Term> out;
    std::function<void(const Term&)> visit = [&](const Term& t) {
      if (is_ground(t)) {
        out.insert(t);
        return;
      }
      if (t.is_pair()) {
        visit(t.left());
        visit(t.right());
      } else if (t.is_enc()) {
        visit(t.plaintext());
        visit(t.key());
      }
    };
    for (const Atom& a : atoms) {
      std::visit(Overload{
                     [&](const HtIn& h) {
                       for (const Term& t : h.args) visit(t);
                     },
                     [&](const Non& n) { visit(n.term); },
                     [&](const Uniq& u) { visit(u.term); },
                     [&](const EqTerm& e) { visit(e.rhs); },
                     [&](const auto&) {},
                 },
                 a);
    }
    return out;
  }

  std::optional<std::size_t> listener_index(const std::string& z,
                                            const Assignment& a) const {
    auto it = a.listener_nodes.find(z);
    if (it == a.listener_nodes.end()) return std::nullopt;
    return it->second;
  }

  std::optional<Node> resolve(const StrandNode& n, const Assignment& a) const {
    Node out{a.strands.at(n.strand), n.index};
    if (auto li = listener_index(n.strand, a)) out.index = *li;
    if (!space_.valid(out)) return std::nullopt;
    return out;
  }

  std::optional<Substitution> param_map(const RoleTemplate& role,
                                        const std::vector<Term>& args) const {
    Substitution out;
    try {
      for (std::size_t i = 0; i < args.size(); ++i) {
        out.bind(role.params()[i], args[i]);
      }
    } catch (const SortError&) {
      return std::nullopt;
    }
    return out;
  }

  bool eval_htin(const HtIn& h, const Assignment& a) const {
    const RoleTemplate* role = p_.find(h.role);
    if (role == nullptr) return false;
    std::vector<Term> args;
    for (const Term& t : h.args) args.push_back(apply(a.terms, t));
    const std::size_t s = a.strands.at(h.strand);
    if (role->is_listener()) {
      auto li = listener_index(h.strand, a);
      if (!li || !space_.valid({s, *li})) return false;
      return evt(space_, {s, *li}) == Event::send(args[0]);
    }
    auto sub = param_map(*role, args);
    if (!sub) return false;
    try {
      return htin(space_, s, h.height, instantiate(*role, *sub));
    } catch (const Error&) {
      return false;
    }
  }

  // Binds the algebra variables of h by matching the role trace against
  // the bundle strand (or listener node) a assigns to h.strand.
  std::optional<Assignment> match_htin(const HtIn& h, Assignment a) const {
    const RoleTemplate* role = p_.find(h.role);
    if (role == nullptr) return std::nullopt;
    const std::size_t s = a.strands.at(h.strand);
    if (role->is_listener()) {
      const Event& e = evt(space_, {s, *listener_index(h.strand, a)});
      if (!e.outbound()) return std::nullopt;
      auto m = match(h.args[0], e.message, a.terms);
      if (!m) return std::nullopt;
      a.terms = std::move(*m);
      return a;
    }
    const Trace& actual = space_.trace(s);
    if (actual.size() > role->trace().size() || actual.size() < h.height) {
      return std::nullopt;
    }
    auto sub = param_map(*role, h.args);
    if (!sub) return std::nullopt;
    for (std::size_t j = 0; j < actual.size(); ++j) {
      Event pattern = apply(*sub, role->trace()[j]);
      if (pattern.direction != actual[j].direction) return std::nullopt;
      auto m = match(pattern.message, actual[j].message, a.terms);
      if (!m) return std::nullopt;
      a.terms = std::move(*m);
    }
    return a;
  }

  bool propagate(Assignment& a, std::vector<char>& done) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (done[i]) continue;
        const Atom& atom = atoms_[i];
        if (const auto* e = std::get_if<EqTerm>(&atom)) {
          const Term* value = a.terms.find(e->lhs);
          Term rhs = apply(a.terms, e->rhs);
          if (value != nullptr && !is_ground(rhs)) {
            auto m = match(e->rhs, *value, a.terms);
            if (!m) return false;
            a.terms = std::move(*m);
            changed = true;
          } else if (value == nullptr && is_ground(rhs)) {
            try {
              a.terms.bind(e->lhs, rhs);
            } catch (const SortError&) {
              return false;
            }
            changed = true;
          }
        } else if (const auto* e = std::get_if<EqStrand>(&atom)) {
          const bool l = a.strands.count(e->lhs) != 0;
          const bool r = a.strands.count(e->rhs) != 0;
          if (l != r) {
            const std::string& from = l ? e->lhs : e->rhs;
            const std::string& to = l ? e->rhs : e->lhs;
            a.strands[to] = a.strands.at(from);
            if (auto li = listener_index(from, a)) {
              a.listener_nodes[to] = *li;
            } else if (listeners_.count(to)) {
              return false;
            }
            changed = true;
          }
        }
        if (auto r = eval(atom, a)) {
          if (!*r) return false;
          done[i] = 1;
          changed = true;
        }
      }
    }
    return true;
  }

  bool search(Assignment a, std::vector<char> done,
              const std::vector<char>& matched) {
    if (!propagate(a, done)) return true;
    if (std::all_of(done.begin(), done.end(), [](char c) { return c; })) {
      return (*visit_)(a);
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (done[i] || matched[i]) continue;
      const auto* h = std::get_if<HtIn>(&atoms_[i]);
      if (h == nullptr) continue;
      std::vector<char> next = matched;
      next[i] = 1;
      std::vector<Assignment> choices;
      if (a.strands.count(h->strand)) {
        choices.push_back(a);
      } else {
        const bool listener = listeners_.count(h->strand) != 0;
        for (std::size_t s = 0; s < space_.size(); ++s) {
          if (!listener) {
            Assignment c = a;
            c.strands[h->strand] = s;
            choices.push_back(std::move(c));
            continue;
          }
          for (std::size_t j = 0; j < space_.trace(s).size(); ++j) {
            Assignment c = a;
            c.strands[h->strand] = s;
            c.listener_nodes[h->strand] = j;
            choices.push_back(std::move(c));
          }
        }
      }
      for (const Assignment& c : choices) {
        if (auto m = match_htin(*h, c)) {
          if (!search(std::move(*m), done, next)) return false;
        }
      }
      return true;
    }
    // Every htin atom has been matched; enumerate what is left.
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (done[i]) continue;
      for (const std::string& z : atom_strands(atoms_[i])) {
        if (a.strands.count(z)) continue;
        for (std::size_t s = 0; s < space_.size(); ++s) {
          Assignment c = a;
          c.strands[z] = s;
          if (!search(std::move(c), done, matched)) return false;
        }
        return true;
      }
      for (const VarKey& v : atom_variables(atoms_[i])) {
        if (a.terms.contains(v)) continue;
        for (const Term& candidate : pool_.of(v.sort)) {
          Assignment c = a;
          c.terms.bind(v, candidate);
          if (!search(std::move(c), done, matched)) return false;
        }
        return true;
      }
    }
    return true;
  }

  const Protocol& p_;
  const std::vector<Atom>& atoms_;
  const StrandSpace& space_;
  Precedence prec_;
  CandidatePool pool_;
  std::set<std::string> listeners_;
  std::set<VarKey> bindable_;
  const std::function<bool(const Assignment&)>* visit_ = nullptr;
};

void require_run(const Bundle& b, const Protocol& p) {
  const auto problems = validate_bundle(b);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid bundle: " << problems.front();
    throw ValidationError(msg.str());
  }
  const RunResult run = check_run(b, p);
  if (const auto* failure = std::get_if<NotARun>(&run)) {
    throw ValidationError("bundle is not a run of " + p.name() + " (strand " +
                          std::to_string(failure->strand) + ": " +
                          failure->reason + ")");
  }
}

}  // namespace

void for_each_satisfying(const Protocol& p, const std::vector<Atom>& atoms,
                         const Bundle& b, const Assignment& seed,
                         const std::function<bool(const Assignment&)>& visit) {
  Solver solver(p, atoms, b);
  solver.run(seed, visit);
}

std::vector<Assignment> satisfy(const Protocol& p,
                                const std::vector<Atom>& atoms,
                                const Bundle& b, const Assignment& seed) {
  std::vector<Assignment> out;
  for_each_satisfying(p, atoms, b, seed, [&](const Assignment& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

std::optional<Assignment> satisfy_one(const Protocol& p,
                                      const std::vector<Atom>& atoms,
                                      const Bundle& b,
                                      const Assignment& seed) {
  std::optional<Assignment> out;
  for_each_satisfying(p, atoms, b, seed, [&](const Assignment& a) {
    out = a;
    return false;
  });
  return out;
}

bool check_assignment(const Protocol& p, const std::vector<Atom>& atoms,
                      const Bundle& b, const Assignment& a) {
  Solver solver(p, atoms, b);
  for (const Atom& atom : atoms) {
    auto r = solver.eval(atom, a);
    if (!r || !*r) return false;
  }
  return true;
}

HomWitness induced_witness(const Skeleton& k, const Assignment& a) {
  HomWitness w;
  for (std::size_t s = 0; s < k.instances().size(); ++s) {
    const std::string z = strand_variable(s);
    auto it = a.strands.find(z);
    if (it == a.strands.end()) {
      throw ValidationError("assignment leaves " + z + " unbound");
    }
    w.strand_map.push_back(it->second);
    if (auto li = a.listener_nodes.find(z); li != a.listener_nodes.end()) {
      w.listener_nodes[s] = li->second;
    }
  }
  for (const VarKey& x : k.vars()) {
    if (const Term* t = a.terms.find(x)) w.term_map.bind(x, *t);
  }
  return w;
}

Assignment induced_assignment(const Skeleton& k, const HomWitness& w) {
  Assignment a;
  for (std::size_t s = 0; s < w.strand_map.size(); ++s) {
    a.strands[strand_variable(s)] = w.strand_map[s];
    if (auto li = w.listener_nodes.find(s); li != w.listener_nodes.end()) {
      a.listener_nodes[strand_variable(s)] = li->second;
    }
  }
  for (const VarKey& x : k.vars()) {
    if (const Term* t = w.term_map.find(x)) a.terms.bind(x, *t);
  }
  return a;
}

SigmaResult eval_sigma(const Skeleton& k, const Bundle& b) {
  SigmaResult out;
  const auto problems = validate_bundle(b);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid bundle: " << problems.front();
    out.reason = msg.str();
    return out;
  }
  const RunResult run = check_run(b, k.protocol());
  if (const auto* failure = std::get_if<NotARun>(&run)) {
    out.reason = "not a run of " + k.protocol().name() + ": strand " +
                 std::to_string(failure->strand) + ": " + failure->reason;
    return out;
  }
  auto a = satisfy_one(k.protocol(), skeleton_formula(k).atoms, b);
  if (!a) {
    out.reason = "the skeleton formula has no satisfying assignment";
    return out;
  }
  out.satisfiable = true;
  out.assignment = *a;
  out.witness = induced_witness(k, *a);
  out.witness_violations = verify_hom_to_bundle(k, b, *out.witness);
  return out;
}

// ---------------------------------------------------------------------------
// Shape analysis sentences

namespace {

std::string base_name(const std::string& name) {
  std::size_t end = name.size();
  while (end > 0 && (name[end - 1] == '\'' ||
                     std::isdigit(static_cast<unsigned char>(name[end - 1])))) {
    --end;
  }
  return end == 0 ? name : name.substr(0, end);
}

class Renamer {
 public:
  Substitution rename(const std::vector<VarKey>& vars,
                      std::vector<VarKey>& renamed) {
    Substitution out;
    for (const VarKey& v : vars) {
      const std::string base = base_name(v.name);
      VarKey fresh{base + std::to_string(counters_[base]++), v.sort};
      out.bind(v, as_term(fresh));
      renamed.push_back(fresh);
    }
    return out;
  }
  std::string strand() { return strand_variable(strands_++); }

 private:
  std::map<std::string, std::size_t> counters_;
  std::size_t strands_ = 0;
};

Atom map_atom(const Atom& atom, const Substitution& terms,
              const std::map<std::string, std::string>& strands) {
  auto z = [&](const std::string& s) {
    auto it = strands.find(s);
    return it == strands.end() ? s : it->second;
  };
  auto node = [&](const StrandNode& n) { return StrandNode{z(n.strand), n.index}; };
  return std::visit(
      Overload{
          [&](const HtIn& h) -> Atom {
            HtIn out{z(h.strand), h.height, h.role, {}};
            for (const Term& t : h.args) out.args.push_back(apply(terms, t));
            return out;
          },
          [&](const Prec& p) -> Atom {
            return Prec{node(p.before), node(p.after)};
          },
          [&](const Non& n) -> Atom { return Non{apply(terms, n.term)}; },
          [&](const Uniq& u) -> Atom {
            return Uniq{apply(terms, u.term), node(u.node)};
          },
          [&](const EqStrand& e) -> Atom {
            return EqStrand{z(e.lhs), z(e.rhs)};
          },
          [&](const EqTerm& e) -> Atom {
            Term lhs = apply(terms, as_term(e.lhs));
            if (!lhs.is_var() || lhs.inverted()) {
              throw ValidationError("equality left side renamed to a term");
            }
            return EqTerm{key_of(lhs), apply(terms, e.rhs)};
          },
      },
      atom);
}

std::vector<Atom> map_atoms(const std::vector<Atom>& atoms,
                            const Substitution& terms,
                            const std::map<std::string, std::string>& strands) {
  std::vector<Atom> out;
  for (const Atom& a : atoms) out.push_back(map_atom(a, terms, strands));
  return out;
}

void print_vars(std::ostream& os, const std::vector<VarKey>& vars,
                const std::vector<std::string>& strands) {
  bool first = true;
  for (const VarKey& v : vars) {
    os << (first ? "" : ", ") << v.name << ':' << v.sort;
    first = false;
  }
  for (const std::string& z : strands) {
    os << (first ? "" : ", ") << z << ":strand";
    first = false;
  }
}

void print_conj(std::ostream& os, const std::vector<Atom>& atoms,
                const std::string& indent) {
  if (atoms.empty()) {
    os << indent << "true\n";
    return;
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    os << indent << atoms[i] << (i + 1 < atoms.size() ? " and" : "") << '\n';
  }
}

}  // namespace

void validate_sentence(const ShapeSentence& s) {
  if (!s.protocol) throw ValidationError("sentence has no protocol");
  validate_formula(*s.protocol, s.pov);
  std::set<VarKey> pov(s.pov.vars.begin(), s.pov.vars.end());
  std::set<std::string> pov_strands(s.pov.strand_vars.begin(),
                                    s.pov.strand_vars.end());
  for (const Disjunct& d : s.disjuncts) {
    for (const VarKey& v : d.vars) {
      if (pov.count(v)) {
        throw ValidationError("disjunct variable " + v.name +
                              " is not renamed apart");
      }
    }
    for (const std::string& z : d.strand_vars) {
      if (pov_strands.count(z)) {
        throw ValidationError("disjunct strand variable " + z +
                              " is not renamed apart");
      }
    }
    Formula body{d.vars, d.strand_vars, d.delta};
    body.atoms.insert(body.atoms.end(), d.atoms.begin(), d.atoms.end());
    validate_formula(*s.protocol, body, &s.pov);
  }
}

std::ostream& operator<<(std::ostream& os, const ShapeSentence& s) {
  os << "forall ";
  print_vars(os, s.pov.vars, s.pov.strand_vars);
  os << ".\n";
  print_conj(os, s.pov.atoms, "  ");
  os << "iff\n";
  if (s.disjuncts.empty()) os << "  false\n";
  for (std::size_t i = 0; i < s.disjuncts.size(); ++i) {
    const Disjunct& d = s.disjuncts[i];
    if (i) os << "or\n";
    os << "  exists ";
    print_vars(os, d.vars, d.strand_vars);
    os << ".\n";
    std::vector<Atom> all = d.delta;
    all.insert(all.end(), d.atoms.begin(), d.atoms.end());
    print_conj(os, all, "    ");
  }
  return os;
}

ShapeSentence build_shape_sentence(const ShapeAnalysis& analysis) {
  ShapeSentence out;
  out.name = analysis.name;
  out.protocol = analysis.pov.protocol_ptr();
  Renamer renamer;

  const Skeleton& k0 = analysis.pov;
  const Formula f0 = skeleton_formula(k0);
  Substitution rho0 = renamer.rename(k0.vars(), out.pov.vars);
  std::map<std::string, std::string> z0;
  for (const std::string& z : f0.strand_vars) {
    z0[z] = renamer.strand();
    out.pov.strand_vars.push_back(z0[z]);
  }
  out.pov.atoms = map_atoms(f0.atoms, rho0, z0);

  for (const Shape& shape : analysis.shapes) {
    const Skeleton& ki = shape.skeleton;
    const auto problems = verify_hom(k0, ki, shape.hom);
    if (!problems.empty()) {
      std::ostringstream msg;
      msg << "homomorphism " << k0.name() << " -> " << ki.name()
          << " does not verify: " << problems.front();
      throw ValidationError(msg.str());
    }
    Disjunct d;
    const Formula fi = skeleton_formula(ki);
    Substitution rhoi = renamer.rename(ki.vars(), d.vars);
    std::map<std::string, std::string> zi;
    for (const std::string& z : fi.strand_vars) {
      zi[z] = renamer.strand();
      d.strand_vars.push_back(zi[z]);
    }
    for (std::size_t j = 0; j < k0.instances().size(); ++j) {
      d.delta.push_back(EqStrand{z0.at(strand_variable(j)),
                                 zi.at(strand_variable(shape.hom.strand_map[j]))});
    }
    for (const VarKey& x : k0.vars()) {
      Term image = apply(shape.hom.term_map, as_term(x));
      d.delta.push_back(
          EqTerm{key_of(apply(rho0, as_term(x))), apply(rhoi, image)});
    }
    d.atoms = map_atoms(fi.atoms, rhoi, zi);
    out.disjuncts.push_back(std::move(d));
  }
  validate_sentence(out);
  return out;
}

namespace {

// Renames variables to v0, v1, ... and strand variables to w0, w1, ... in
// declaration order; conjuncts are sorted.
struct Canonical {
  std::vector<Sort> sorts;
  std::size_t strands = 0;
  std::vector<Atom> pov;
  std::vector<std::pair<std::vector<Atom>, std::vector<Atom>>> disjuncts;
  std::vector<std::pair<std::vector<Sort>, std::size_t>> disjunct_vars;
  friend bool operator==(const Canonical&, const Canonical&) = default;
};

Canonical canonical(const ShapeSentence& s) {
  Canonical c;
  Substitution terms;
  std::map<std::string, std::string> strands;
  std::size_t nv = 0, nz = 0;
  auto add_vars = [&](const std::vector<VarKey>& vars,
                      const std::vector<std::string>& zs,
                      std::vector<Sort>& sorts) {
    for (const VarKey& v : vars) {
      terms.bind(v, Term::var("v" + std::to_string(nv++), v.sort));
      sorts.push_back(v.sort);
    }
    for (const std::string& z : zs) strands[z] = "w" + std::to_string(nz++);
    return zs.size();
  };
  c.strands = add_vars(s.pov.vars, s.pov.strand_vars, c.sorts);
  for (const Disjunct& d : s.disjuncts) {
    std::vector<Sort> sorts;
    std::size_t n = add_vars(d.vars, d.strand_vars, sorts);
    c.disjunct_vars.emplace_back(std::move(sorts), n);
  }
  auto sorted = [&](const std::vector<Atom>& atoms) {
    std::vector<Atom> out = map_atoms(atoms, terms, strands);
    std::sort(out.begin(), out.end());
    return out;
  };
  c.pov = sorted(s.pov.atoms);
  for (const Disjunct& d : s.disjuncts) {
    c.disjuncts.emplace_back(sorted(d.delta), sorted(d.atoms));
  }
  return c;
}

}  // namespace

bool alpha_equivalent(const ShapeSentence& a, const ShapeSentence& b) {
  if (!a.protocol || !b.protocol ||
      a.protocol->name() != b.protocol->name()) {
    return false;
  }
  return canonical(a) == canonical(b);
}

SentenceResult eval_sentence(const ShapeSentence& s, const Bundle& b) {
  const Protocol& p = *s.protocol;
  require_run(b, p);
  SentenceResult out;
  auto body = [](const Disjunct& d) {
    std::vector<Atom> atoms = d.delta;
    atoms.insert(atoms.end(), d.atoms.begin(), d.atoms.end());
    return atoms;
  };
  for_each_satisfying(p, s.pov.atoms, b, {}, [&](const Assignment& a0) {
    for (const Disjunct& d : s.disjuncts) {
      if (satisfy_one(p, body(d), b, a0)) return true;
    }
    out.holds = false;
    out.side = SentenceResult::Side::kForward;
    out.assignment = a0;
    return false;
  });
  if (!out.holds) return out;
  for (std::size_t i = 0; i < s.disjuncts.size() && out.holds; ++i) {
    for_each_satisfying(p, body(s.disjuncts[i]), b, {},
                        [&](const Assignment& a) {
                          Assignment a0 =
                              restrict(a, s.pov.vars, s.pov.strand_vars);
                          if (check_assignment(p, s.pov.atoms, b, a0)) {
                            return true;
                          }
                          out.holds = false;
                          out.side = SentenceResult::Side::kBackward;
                          out.disjunct = i;
                          out.assignment = a;
                          return false;
                        });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Goals

void validate_goal(const Goal& g) {
  if (!g.protocol) throw ValidationError("goal has no protocol");
  validate_formula(*g.protocol, g.hypothesis);
  std::set<VarKey> outer(g.hypothesis.vars.begin(), g.hypothesis.vars.end());
  std::set<std::string> outer_strands(g.hypothesis.strand_vars.begin(),
                                      g.hypothesis.strand_vars.end());
  for (const Formula& c : g.conclusions) {
    for (const VarKey& v : c.vars) {
      if (outer.count(v)) {
        throw ValidationError("conclusion variable " + v.name +
                              " shadows a hypothesis variable");
      }
    }
    for (const std::string& z : c.strand_vars) {
      if (outer_strands.count(z)) {
        throw ValidationError("conclusion strand variable " + z +
                              " shadows a hypothesis variable");
      }
    }
    validate_formula(*g.protocol, c, &g.hypothesis);
  }
}

std::ostream& operator<<(std::ostream& os, const Goal& g) {
  os << "forall ";
  print_vars(os, g.hypothesis.vars, g.hypothesis.strand_vars);
  os << ".\n";
  print_conj(os, g.hypothesis.atoms, "  ");
  os << "implies\n";
  if (g.conclusions.empty()) os << "  false\n";
  for (std::size_t i = 0; i < g.conclusions.size(); ++i) {
    if (i) os << "or\n";
    const Formula& c = g.conclusions[i];
    os << "  exists ";
    print_vars(os, c.vars, c.strand_vars);
    os << ".\n";
    print_conj(os, c.atoms, "    ");
  }
  return os;
}

std::vector<Assignment> eval_goal(const Goal& g, const Bundle& b) {
  const Protocol& p = *g.protocol;
  require_run(b, p);
  std::vector<Assignment> violations;
  for_each_satisfying(p, g.hypothesis.atoms, b, {}, [&](const Assignment& a) {
    for (const Formula& c : g.conclusions) {
      if (satisfy_one(p, c.atoms, b, a)) return true;
    }
    violations.push_back(a);
    return true;
  });
  return violations;
}

// ---------------------------------------------------------------------------
// Entailment

std::set<Atom> prec_closure(const std::vector<Atom>& atoms) {
  std::set<Atom> out(atoms.begin(), atoms.end());
  std::set<std::pair<StrandNode, StrandNode>> edges;
  for (const Atom& a : atoms) {
    if (const auto* h = std::get_if<HtIn>(&a)) {
      for (std::size_t i = 0; i < h->height; ++i) {
        for (std::size_t j = i + 1; j < h->height; ++j) {
          edges.insert({{h->strand, i}, {h->strand, j}});
        }
      }
    } else if (const auto* p = std::get_if<Prec>(&a)) {
      edges.insert({p->before, p->after});
    }
  }
  std::set<StrandNode> nodes;
  for (const auto& [x, y] : edges) {
    nodes.insert(x);
    nodes.insert(y);
  }
  std::vector<StrandNode> order(nodes.begin(), nodes.end());
  // Warshall over the mentioned nodes.
  for (const StrandNode& k : order) {
    for (const StrandNode& i : order) {
      if (!edges.count({i, k})) continue;
      for (const StrandNode& j : order) {
        if (edges.count({k, j})) edges.insert({i, j});
      }
    }
  }
  for (const auto& [x, y] : edges) out.insert(Prec{x, y});
  return out;
}

bool covered(const std::set<Atom>& closed, const Atom& a) {
  if (closed.count(a)) return true;
  if (const auto* h = std::get_if<HtIn>(&a)) {
    for (const Atom& c : closed) {
      const auto* ch = std::get_if<HtIn>(&c);
      if (ch && ch->strand == h->strand && ch->role == h->role &&
          ch->args == h->args && ch->height >= h->height) {
        return true;
      }
    }
  }
  if (const auto* e = std::get_if<EqTerm>(&a)) {
    return as_term(e->lhs) == e->rhs;
  }
  if (const auto* e = std::get_if<EqStrand>(&a)) return e->lhs == e->rhs;
  return false;
}

std::ostream& operator<<(std::ostream& os, const EntailmentProof& p) {
  auto print_sub = [&](const Substitution& s,
                       const std::map<std::string, std::string>& z) {
    os << '{';
    bool first = true;
    for (const auto& [a, b] : z) {
      os << (first ? "" : ", ") << a << " -> " << b;
      first = false;
    }
    for (const auto& [k, t] : s.bindings()) {
      os << (first ? "" : ", ") << k.name << " -> " << t;
      first = false;
    }
    os << '}';
  };
  os << "point of view: ";
  print_sub(p.pov_terms, p.pov_strands);
  os << '\n';
  for (std::size_t i = 0; i < p.disjuncts.size(); ++i) {
    const DisjunctProof& d = p.disjuncts[i];
    os << "shape " << i << ": ";
    if (d.inconsistent) {
      os << "equalities inconsistent\n";
      continue;
    }
    os << "conclusion " << d.conclusion << " with unifier ";
    print_sub(d.unifier, d.strand_unifier);
    os << " and witnesses ";
    print_sub(d.existentials, d.strand_existentials);
    os << '\n';
  }
  return os;
}

namespace {

struct Flex {
  std::set<VarKey> vars;
  std::set<std::string> strands;
};

using StrandMap = std::map<std::string, std::string>;

// One-way matching where only the variables in flex may be bound.
bool match_flex(const Term& pattern, const Term& target, const Flex& flex,
                Substitution& theta) {
  switch (pattern.kind()) {
    case Term::Kind::kVar: {
      const VarKey key = key_of(pattern);
      if (!flex.vars.count(key)) return pattern == target;
      Term image = target;
      if (pattern.inverted()) {
        if (sort_of(target) != Sort::kAKey) return false;
        image = invert_key(target);
      }
      if (!sort_leq(sort_of(image), key.sort)) return false;
      if (const Term* bound = theta.find(key)) return *bound == image;
      theta.bind(key, std::move(image));
      return true;
    }
    case Term::Kind::kPair:
      return target.is_pair() &&
             match_flex(pattern.left(), target.left(), flex, theta) &&
             match_flex(pattern.right(), target.right(), flex, theta);
    case Term::Kind::kEnc:
      return target.is_enc() &&
             match_flex(pattern.plaintext(), target.plaintext(), flex,
                        theta) &&
             match_flex(pattern.key(), target.key(), flex, theta);
    default: return pattern == target;
  }
}

bool match_strand(const std::string& pattern, const std::string& target,
                  const Flex& flex, StrandMap& zs) {
  if (!flex.strands.count(pattern)) return pattern == target;
  auto [it, inserted] = zs.emplace(pattern, target);
  return inserted || it->second == target;
}

// Pattern atom against a target atom; htin heights may grow.
bool match_atom(const Atom& pattern, const Atom& target, const Flex& flex,
                Substitution& theta, StrandMap& zs) {
  if (pattern.index() != target.index()) return false;
  if (const auto* h = std::get_if<HtIn>(&pattern)) {
    const auto& t = std::get<HtIn>(target);
    if (h->role != t.role || h->height > t.height ||
        h->args.size() != t.args.size() ||
        !match_strand(h->strand, t.strand, flex, zs)) {
      return false;
    }
    for (std::size_t i = 0; i < h->args.size(); ++i) {
      if (!match_flex(h->args[i], t.args[i], flex, theta)) return false;
    }
    return true;
  }
  if (const auto* p = std::get_if<Prec>(&pattern)) {
    const auto& t = std::get<Prec>(target);
    return p->before.index == t.before.index &&
           p->after.index == t.after.index &&
           match_strand(p->before.strand, t.before.strand, flex, zs) &&
           match_strand(p->after.strand, t.after.strand, flex, zs);
  }
  if (const auto* n = std::get_if<Non>(&pattern)) {
    return match_flex(n->term, std::get<Non>(target).term, flex, theta);
  }
  if (const auto* u = std::get_if<Uniq>(&pattern)) {
    const auto& t = std::get<Uniq>(target);
    return u->node.index == t.node.index &&
           match_strand(u->node.strand, t.node.strand, flex, zs) &&
           match_flex(u->term, t.term, flex, theta);
  }
  return false;
}

// Enumerates matches of every pattern atom into targets. Equalities in the
// pattern are checked (or used to bind) after the other atoms.
bool match_all(const std::vector<Atom>& patterns, std::size_t i,
               const std::vector<Atom>& targets, const Flex& flex,
               Substitution theta, StrandMap zs,
               const std::function<bool(const Substitution&, const StrandMap&)>&
                   visit) {
  if (i == patterns.size()) {
    for (const Atom& a : patterns) {
      if (const auto* e = std::get_if<EqTerm>(&a)) {
        Term lhs = apply(theta, as_term(e->lhs));
        Term rhs = apply(theta, e->rhs);
        if (lhs == rhs) continue;
        if (flex.vars.count(e->lhs) && !theta.contains(e->lhs) &&
            sort_leq(sort_of(rhs), e->lhs.sort)) {
          theta.bind(e->lhs, rhs);
          continue;
        }
        if (!match_flex(e->rhs, lhs, flex, theta)) return true;
      } else if (const auto* e = std::get_if<EqStrand>(&a)) {
        auto image = [&](const std::string& z) {
          auto it = zs.find(z);
          return it == zs.end() ? z : it->second;
        };
        std::string l = image(e->lhs), r = image(e->rhs);
        if (l == r) continue;
        if (flex.strands.count(e->lhs) && !zs.count(e->lhs)) {
          zs[e->lhs] = r;
        } else if (flex.strands.count(e->rhs) && !zs.count(e->rhs)) {
          zs[e->rhs] = l;
        } else {
          return true;
        }
      }
    }
    return visit(theta, zs);
  }
  const Atom& pattern = patterns[i];
  if (std::holds_alternative<EqTerm>(pattern) ||
      std::holds_alternative<EqStrand>(pattern)) {
    return match_all(patterns, i + 1, targets, flex, theta, zs, visit);
  }
  for (const Atom& target : targets) {
    Substitution t2 = theta;
    StrandMap z2 = zs;
    if (match_atom(pattern, target, flex, t2, z2)) {
      if (!match_all(patterns, i + 1, targets, flex, std::move(t2),
                     std::move(z2), visit)) {
        return false;
      }
    }
  }
  return true;
}

// Syntactic unification over the free algebra. rank(v) orders which
// variable is eliminated when both sides are variables: higher goes first.
class Unifier {
 public:
  explicit Unifier(std::function<int(const VarKey&)> rank,
                   std::function<int(const std::string&)> strand_rank)
      : rank_(std::move(rank)), strand_rank_(std::move(strand_rank)) {}

  bool unify(const Term& x0, const Term& y0) {
    Term x = apply(sub_, x0);
    Term y = apply(sub_, y0);
    if (x == y) return true;
    if (x.is_var() && y.is_var()) {
      const bool x_first = rank_(key_of(x)) >= rank_(key_of(y));
      const Term& a = x_first ? x : y;
      const Term& b = x_first ? y : x;
      return bind(a, b) || bind(b, a);
    }
    if (x.is_var()) return bind(x, y);
    if (y.is_var()) return bind(y, x);
    if (x.is_pair() && y.is_pair()) {
      return unify(x.left(), y.left()) && unify(x.right(), y.right());
    }
    if (x.is_enc() && y.is_enc()) {
      return unify(x.plaintext(), y.plaintext()) && unify(x.key(), y.key());
    }
    return false;
  }

  void unify_strands(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (strand_rank_(ra) >= strand_rank_(rb)) {
      parent_[ra] = rb;
    } else {
      parent_[rb] = ra;
    }
  }

  std::string find(const std::string& z) const {
    auto it = parent_.find(z);
    return it == parent_.end() ? z : find(it->second);
  }

  const Substitution& terms() const { return sub_; }

  StrandMap strands() const {
    StrandMap out;
    for (const auto& [z, ignored] : parent_) out[z] = find(z);
    return out;
  }

 private:
  bool bind(const Term& var, const Term& t) {
    Term image = t;
    if (var.inverted()) {
      if (sort_of(t) != Sort::kAKey) return false;
      image = invert_key(t);
    }
    const VarKey key = key_of(var);
    if (!sort_leq(sort_of(image), key.sort)) return false;
    if (variables(image).count(key)) return false;
    Substitution step;
    step.bind(key, image);
    Substitution next;
    for (const auto& [k, v] : sub_.bindings()) next.bind(k, apply(step, v));
    next.bind(key, image);
    sub_ = std::move(next);
    return true;
  }

  std::function<int(const VarKey&)> rank_;
  std::function<int(const std::string&)> strand_rank_;
  Substitution sub_;
  std::map<std::string, std::string> parent_;
};

bool is_equality(const Atom& a) {
  return std::holds_alternative<EqTerm>(a) ||
         std::holds_alternative<EqStrand>(a);
}

struct DisjunctContext {
  bool consistent = false;
  Substitution unifier;
  StrandMap strand_unifier;
  std::set<Atom> closed;
};

// Renames a disjunct's variables apart from the goal's.
std::string apart(const std::string& name, std::size_t i) {
  return name + "#" + std::to_string(i);
}

std::pair<Substitution, StrandMap> disjunct_renaming(const Disjunct& d,
                                                     std::size_t i) {
  Substitution terms;
  StrandMap strands;
  for (const VarKey& v : d.vars) {
    terms.bind(v, Term::var(apart(v.name, i), v.sort));
  }
  for (const std::string& z : d.strand_vars) strands[z] = apart(z, i);
  return {terms, strands};
}

DisjunctContext disjunct_context(const ShapeSentence& s, const Goal& g,
                                 std::size_t i, const Substitution& rho,
                                 const StrandMap& rho_strands) {
  const Disjunct& d = s.disjuncts[i];
  auto [terms, strands] = disjunct_renaming(d, i);
  for (const auto& [k, t] : rho.bindings()) terms.bind(k, t);
  for (const auto& [z, w] : rho_strands) strands[z] = w;
  std::vector<Atom> atoms = map_atoms(d.atoms, terms, strands);
  for (const Atom& a : g.hypothesis.atoms) atoms.push_back(a);

  std::set<VarKey> renamed;
  for (const VarKey& v : d.vars) renamed.insert({apart(v.name, i), v.sort});
  std::set<std::string> renamed_strands;
  for (const std::string& z : d.strand_vars) {
    renamed_strands.insert(apart(z, i));
  }
  Unifier u([&](const VarKey& v) { return renamed.count(v) ? 1 : 0; },
            [&](const std::string& z) {
              return renamed_strands.count(z) ? 1 : 0;
            });
  DisjunctContext out;
  auto strand_image = [&](const std::string& z) {
    auto it = strands.find(z);
    return it == strands.end() ? z : it->second;
  };
  std::vector<Atom> equalities = d.delta;
  equalities.insert(equalities.end(), atoms.begin(), atoms.end());
  for (std::size_t k = 0; k < equalities.size(); ++k) {
    // Delta atoms are still in the sentence's variables.
    const bool delta = k < d.delta.size();
    const Atom& a = equalities[k];
    if (const auto* e = std::get_if<EqTerm>(&a)) {
      Term lhs = as_term(e->lhs);
      Term rhs = e->rhs;
      if (delta) {
        lhs = apply(terms, lhs);
        rhs = apply(terms, rhs);
      }
      if (!u.unify(lhs, rhs)) return out;
    } else if (const auto* e = std::get_if<EqStrand>(&a)) {
      if (delta) {
        u.unify_strands(strand_image(e->lhs), strand_image(e->rhs));
      } else {
        u.unify_strands(e->lhs, e->rhs);
      }
    }
  }
  out.consistent = true;
  out.unifier = u.terms();
  out.strand_unifier = u.strands();
  std::vector<Atom> body;
  for (const Atom& a : atoms) {
    if (!is_equality(a)) {
      body.push_back(map_atom(a, out.unifier, out.strand_unifier));
    }
  }
  out.closed = prec_closure(body);
  return out;
}

Flex conclusion_flex(const Formula& c) {
  Flex flex;
  flex.vars.insert(c.vars.begin(), c.vars.end());
  flex.strands.insert(c.strand_vars.begin(), c.strand_vars.end());
  return flex;
}

std::optional<DisjunctProof> cover_disjunct(const DisjunctContext& ctx,
                                            const Goal& g) {
  DisjunctProof out;
  if (!ctx.consistent) {
    out.inconsistent = true;
    return out;
  }
  out.unifier = ctx.unifier;
  out.strand_unifier = ctx.strand_unifier;
  const std::vector<Atom> targets(ctx.closed.begin(), ctx.closed.end());
  for (std::size_t j = 0; j < g.conclusions.size(); ++j) {
    const Formula& c = g.conclusions[j];
    std::vector<Atom> patterns =
        map_atoms(c.atoms, ctx.unifier, ctx.strand_unifier);
    bool found = false;
    match_all(patterns, 0, targets, conclusion_flex(c), {}, {},
              [&](const Substitution& theta, const StrandMap& zs) {
                out.conclusion = j;
                out.existentials = theta;
                out.strand_existentials = zs;
                found = true;
                return false;
              });
    if (found) return out;
  }
  return std::nullopt;
}

void require_same_protocol(const ShapeSentence& s, const Goal& g) {
  if (!s.protocol || !g.protocol ||
      s.protocol->name() != g.protocol->name()) {
    throw ValidationError("sentence and goal use different protocols");
  }
}

}  // namespace

EntailResult entail(const ShapeSentence& s, const Goal& g) {
  require_same_protocol(s, g);
  EntailResult out;
  Flex pov;
  pov.vars.insert(s.pov.vars.begin(), s.pov.vars.end());
  pov.strands.insert(s.pov.strand_vars.begin(), s.pov.strand_vars.end());
  std::vector<Atom> hypothesis;
  for (const Atom& a : prec_closure(g.hypothesis.atoms)) {
    hypothesis.push_back(a);
  }
  bool matched_pov = false;
  match_all(
      s.pov.atoms, 0, hypothesis, pov, {}, {},
      [&](const Substitution& rho, const StrandMap& rho_strands) {
        matched_pov = true;
        EntailmentProof proof{rho, rho_strands, {}};
        for (std::size_t i = 0; i < s.disjuncts.size(); ++i) {
          auto d = cover_disjunct(
              disjunct_context(s, g, i, rho, rho_strands), g);
          if (!d) {
            out.reason = "shape " + std::to_string(i) +
                         " establishes no conclusion of the goal";
            return true;
          }
          proof.disjuncts.push_back(std::move(*d));
        }
        out.entailed = true;
        out.proof = std::move(proof);
        out.reason.clear();
        return false;
      });
  if (!matched_pov) {
    out.reason =
        "the point-of-view formula does not match the goal hypothesis";
  }
  return out;
}

bool check_entailment_proof(const ShapeSentence& s, const Goal& g,
                            const EntailmentProof& proof) {
  require_same_protocol(s, g);
  if (proof.disjuncts.size() != s.disjuncts.size()) return false;
  const std::set<Atom> hyp = prec_closure(g.hypothesis.atoms);
  for (const Atom& a : map_atoms(s.pov.atoms, proof.pov_terms,
                                 proof.pov_strands)) {
    if (!covered(hyp, a)) return false;
  }
  for (std::size_t i = 0; i < s.disjuncts.size(); ++i) {
    const DisjunctProof& d = proof.disjuncts[i];
    DisjunctContext ctx =
        disjunct_context(s, g, i, proof.pov_terms, proof.pov_strands);
    if (d.inconsistent) {
      if (ctx.consistent) return false;
      continue;
    }
    if (!ctx.consistent || !(ctx.unifier == d.unifier) ||
        ctx.strand_unifier != d.strand_unifier ||
        d.conclusion >= g.conclusions.size()) {
      return false;
    }
    const Formula& c = g.conclusions[d.conclusion];
    const Flex flex = conclusion_flex(c);
    for (const auto& [k, ignored] : d.existentials.bindings()) {
      if (!flex.vars.count(k)) return false;
    }
    for (const auto& [z, ignored] : d.strand_existentials) {
      if (!flex.strands.count(z)) return false;
    }
    StrandMap zs = d.strand_existentials;
    for (const Atom& a : map_atoms(
             map_atoms(c.atoms, d.unifier, d.strand_unifier), d.existentials,
             zs)) {
      if (!covered(ctx.closed, a)) return false;
    }
  }
  return true;
}

}  // namespace strandkit
