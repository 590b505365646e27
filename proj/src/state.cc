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

#include "strandkit/state.h"

#include <algorithm>
#include <functional>
#include <sstream>

namespace strandkit {

StateModel acp_state_model(std::size_t bx) {
  if (bx == 0) throw ValidationError("a card needs at least one box");
  return StateModel{bx, {TransitionSet::check_box(), TransitionSet::new_card()}};
}

bool in_tau(const StateModel& m, std::size_t s0, std::size_t s1) {
  if (s0 > m.bx || s1 > m.bx) return false;
  return std::any_of(m.tau.begin(), m.tau.end(), [&](const TransitionSet& t) {
    return t.contains(s0, s1, m.bx);
  });
}

std::set<std::size_t> infinite_states(const StateModel& m) {
  std::set<std::size_t> live;
  for (std::size_t s = 0; s <= m.bx; ++s) live.insert(s);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = live.begin(); it != live.end();) {
      const std::size_t s = *it;
      const bool has_next = std::any_of(
          live.begin(), live.end(), [&](std::size_t t) { return in_tau(m, s, t); });
      if (has_next) {
        ++it;
      } else {
        it = live.erase(it);
        changed = true;
      }
    }
  }
  return live;
}

Lifted<Annotation> annotations_of(const Bundle& b, const Protocol& p,
                                  const RoleAssignment& rl, const Node& n) {
  const StrandSpace& space = b.space();
  if (!space.valid(n)) throw ValidationError("node outside the bundle");
  if (rl.size() != space.size()) {
    throw ValidationError("role assignment does not cover the bundle");
  }
  RoleItem item = role_item(p, rl[n.strand]);
  if (!inst(space, n.strand, item)) {
    throw ValidationError("strand " + std::to_string(n.strand) +
                          " is not an instance of its assigned role");
  }
  return item.annotations.at(n.index);
}

std::vector<AnnotatedNode> annotated_nodes(const Bundle& b, const Protocol& p,
                                           const RoleAssignment& rl) {
  std::vector<AnnotatedNode> out;
  for (const Node& n : b.space().nodes()) {
    Lifted<Annotation> a = annotations_of(b, p, rl, n);
    if (a.is_bottom()) continue;
    const auto* t = std::get_if<TransitionSet>(&a.down());
    if (t == nullptr) {
      std::ostringstream msg;
      msg << "node " << n << " carries an opaque annotation";
      throw ValidationError(msg.str());
    }
    out.push_back({n, *t});
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const CompatibilityWitness& w) {
  os << "ell " << w.ell << "\norder";
  for (const Node& n : w.order) os << ' ' << n;
  os << "\npath";
  for (std::size_t s : w.path) os << ' ' << s;
  return os << '\n';
}

CompatibilityResult check_compatibility(const Bundle& b, const Protocol& p,
                                        const RoleAssignment& rl,
                                        const StateModel& m) {
  CompatibilityResult out;
  const std::vector<AnnotatedNode> anode = annotated_nodes(b, p, rl);
  const Precedence prec(b);
  for (std::size_t i = 0; i < anode.size(); ++i) {
    for (std::size_t j = i + 1; j < anode.size(); ++j) {
      const Node& x = anode[i].node;
      const Node& y = anode[j].node;
      if (!prec(x, y) && !prec(y, x)) {
        std::ostringstream msg;
        msg << "condition 2: annotated nodes " << x << " and " << y
            << " are not ordered by precedence";
        out.condition = 2;
        out.reason = msg.str();
        return out;
      }
    }
  }
  std::vector<AnnotatedNode> order = anode;
  std::sort(order.begin(), order.end(),
            [&](const AnnotatedNode& x, const AnnotatedNode& y) {
              return prec(x.node, y.node);
            });
  const std::size_t ell = order.size();
  // feasible[j]: states at position j from which the rest can be met.
  std::vector<std::set<std::size_t>> feasible(ell + 1);
  feasible[ell] = infinite_states(m);
  for (std::size_t j = ell; j-- > 0;) {
    for (std::size_t s = 0; s <= m.bx; ++s) {
      for (std::size_t t : feasible[j + 1]) {
        if (in_tau(m, s, t) && order[j].transitions.contains(s, t, m.bx)) {
          feasible[j].insert(s);
          break;
        }
      }
    }
  }
  if (feasible[0].empty()) {
    out.condition = 3;
    out.reason = "condition 3: no path meets every annotation in order";
    return out;
  }
  CompatibilityWitness w;
  w.ell = ell;
  w.path.push_back(*feasible[0].begin());
  for (std::size_t j = 0; j < ell; ++j) {
    w.order.push_back(order[j].node);
    for (std::size_t t : feasible[j + 1]) {
      if (in_tau(m, w.path.back(), t) &&
          order[j].transitions.contains(w.path.back(), t, m.bx)) {
        w.path.push_back(t);
        break;
      }
    }
  }
  out.compatible = true;
  out.witness = std::move(w);
  return out;
}

std::optional<std::string> validate_compatibility(
    const Bundle& b, const Protocol& p, const RoleAssignment& rl,
    const StateModel& m, const CompatibilityWitness& w) {
  std::set<Node> anode;
  for (const AnnotatedNode& a : annotated_nodes(b, p, rl)) anode.insert(a.node);
  const std::set<Node> image(w.order.begin(), w.order.end());
  if (w.order.size() != w.ell || image.size() != w.ell || image != anode) {
    return "condition 1: f is not a bijection onto 0.." +
           std::to_string(w.ell) + "-1";
  }
  if (w.path.size() != w.ell + 1) return "path prefix has the wrong length";
  for (std::size_t j = 0; j + 1 < w.path.size(); ++j) {
    if (!in_tau(m, w.path[j], w.path[j + 1])) {
      return "path step " + std::to_string(j) + " is not a transition";
    }
  }
  if (!infinite_states(m).count(w.path.back())) {
    return "path prefix does not extend to an infinite path";
  }
  const Precedence prec(b);
  for (std::size_t i = 0; i < w.ell; ++i) {
    for (std::size_t j = 0; j < w.ell; ++j) {
      if (prec(w.order[i], w.order[j]) != (i < j)) {
        std::ostringstream msg;
        msg << "condition 2 fails for " << w.order[i] << " and "
            << w.order[j];
        return msg.str();
      }
    }
  }
  for (std::size_t j = 0; j < w.ell; ++j) {
    Lifted<Annotation> a = annotations_of(b, p, rl, w.order[j]);
    const auto& t = std::get<TransitionSet>(a.down());
    if (!t.contains(w.path[j], w.path[j + 1], m.bx)) {
      std::ostringstream msg;
      msg << "condition 3 fails at " << w.order[j] << ": (" << w.path[j]
          << ", " << w.path[j + 1] << ") is not in " << t;
      return msg.str();
    }
  }
  return std::nullopt;
}

CheckOrIssueResult check_or_issue(const StateModel& m, std::size_t max_len) {
  if (max_len < 2) throw ValidationError("prefix length must be at least 2");
  CheckOrIssueResult out;
  const std::set<std::size_t> live = infinite_states(m);
  std::vector<std::size_t> path;
  auto violation = [&]() {
    for (std::size_t i = 0; i < path.size(); ++i) {
      for (std::size_t k = i; k < path.size(); ++k) {
        if (path[i] >= path[k]) continue;
        bool issued = false;
        for (std::size_t j = i + 1; j <= k; ++j) issued |= path[j] == m.bx;
        if (!issued) {
          out.holds = false;
          out.path = path;
          out.i = i;
          out.k = k;
          return true;
        }
      }
    }
    return false;
  };
  std::function<bool()> extend = [&]() {
    if (path.size() == max_len) {
      if (!live.count(path.back())) return true;
      ++out.prefixes;
      return !violation();
    }
    for (std::size_t t = 0; t <= m.bx; ++t) {
      if (!path.empty() && !in_tau(m, path.back(), t)) continue;
      path.push_back(t);
      const bool go_on = extend();
      path.pop_back();
      if (!go_on) return false;
    }
    return true;
  };
  extend();
  return out;
}

std::ostream& operator<<(std::ostream& os, const BridgeResult& r) {
  switch (r.kind) {
    case BridgeResult::Kind::kGeqState:
      return os << "s0 = " << r.s0 << " >= s1 = " << r.s1;
    case BridgeResult::Kind::kNewCardNode:
      return os << "s0 = " << r.s0 << " < s1 = " << r.s1
                << "; new card issued at " << *r.node;
    case BridgeResult::Kind::kNotApplicable:
      return os << "not applicable: " << r.reason;
    case BridgeResult::Kind::kNoWitness:
      return os << "no witness: " << r.reason;
  }
  return os;
}

BridgeResult find_bridge_witness(const Bundle& b, const Protocol& p,
                                 const RoleAssignment& rl,
                                 const StateModel& m,
                                 const CompatibilityWitness& w, const Node& n0,
                                 const Node& n1) {
  BridgeResult out;
  auto position = [&](const Node& n) -> std::optional<std::size_t> {
    auto it = std::find(w.order.begin(), w.order.end(), n);
    if (it == w.order.end()) return std::nullopt;
    return static_cast<std::size_t>(it - w.order.begin());
  };
  auto f0 = position(n0);
  auto f1 = position(n1);
  if (!f0 || !f1) {
    out.reason = "both nodes must be annotated";
    return out;
  }
  const Precedence prec(b);
  if (!prec(n0, n1)) {
    out.reason = "the first node does not precede the second";
    return out;
  }
  auto transitions = [&](const Node& n) {
    return std::get<TransitionSet>(annotations_of(b, p, rl, n).down());
  };
  std::set<std::size_t> targets, sources;
  for (const StatePair& t : enumerate(transitions(n0), m.bx)) {
    targets.insert(t.second);
  }
  for (const StatePair& t : enumerate(transitions(n1), m.bx)) {
    sources.insert(t.first);
  }
  if (targets.size() != 1 || sources.size() != 1) {
    out.reason = "annotations do not fix a final state s0 and a first state s1";
    return out;
  }
  out.s0 = *targets.begin();
  out.s1 = *sources.begin();
  if (out.s0 >= out.s1) {
    out.kind = BridgeResult::Kind::kGeqState;
    return out;
  }
  for (std::size_t j = *f0 + 2; j <= *f1; ++j) {
    if (w.path[j] != m.bx) continue;
    const Node& n = w.order[j - 1];
    if (same_transitions(transitions(n), TransitionSet::new_card(), m.bx) &&
        prec(n0, n) && prec(n, n1)) {
      out.kind = BridgeResult::Kind::kNewCardNode;
      out.node = n;
      return out;
    }
  }
  out.kind = BridgeResult::Kind::kNoWitness;
  out.reason = "no new-card node between the two nodes";
  return out;
}

namespace {

Term tuple(std::vector<Term> parts) {
  Term out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) {
    out = Term::pair(parts[i], out);
  }
  return out;
}

}  // namespace

AcpModel acp_protocol(std::size_t bx) {
  StateModel model = acp_state_model(bx);
  const VarKey b{"b", Sort::kAKey}, c{"c", Sort::kAKey}, k{"k", Sort::kSKey},
      nb{"nb", Sort::kData}, nc{"nc", Sort::kData};
  const Term tb = as_term(b), tc = as_term(c), tk = as_term(k),
             tnb = as_term(nb), tnc = as_term(nc);
  const Term buy = Term::tag(bx + 1);
  const Term fresh_card = Term::tag(bx + 2);
  auto card = [&](std::size_t s) {
    return Term::enc(tuple({Term::tag(s), tb, tc}), tk);
  };
  const Term order = Term::enc(tuple({buy, tnc, tc}), tb);
  const Term reply = Term::enc(tuple({tnc, tnb, tb}), tc);
  const Term receipt = Term::pair(tnc, tnb);

  std::vector<RoleTemplate> roles;
  roles.emplace_back(
      "buyer", std::vector<VarKey>{b, c, nb, nc},
      Trace({Event::send(order), Event::recv(reply), Event::send(receipt)}),
      OriginationSets{}, OriginationSets{},
      std::vector<Lifted<AnnotationSpec>>{});
  using Spec = Lifted<AnnotationSpec>;
  for (std::size_t s = 1; s <= bx; ++s) {
    const std::string name =
        bx == 1 ? "cashier" : "cashier-" + std::to_string(s);
    roles.emplace_back(
        name, std::vector<VarKey>{b, c, k, nb, nc},
        Trace({Event::recv(order), Event::send(reply), Event::recv(card(s)),
               Event::send(card(s - 1)), Event::recv(receipt)}),
        OriginationSets{}, OriginationSets{},
        std::vector<Spec>{Spec::bottom(), Spec::bottom(), Spec::bottom(),
                          Spec::up(StateEncoding::kStep), Spec::bottom()});
  }
  roles.emplace_back(
      "new-card", std::vector<VarKey>{b, c, k},
      Trace({Event::recv(fresh_card), Event::send(card(bx))}),
      OriginationSets{}, OriginationSets{},
      std::vector<Spec>{Spec::bottom(), Spec::up(StateEncoding::kIssue)});
  return AcpModel{std::make_shared<const Protocol>(
                      bx == 1 ? "acp" : "acp-" + std::to_string(bx),
                      std::move(roles), bx),
                  std::move(model)};
}

}  // namespace strandkit
