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

#include "strandkit/bundle.h"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace strandkit {

std::string_view violation_name(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kBadNode: return "bad node";
    case Violation::Kind::kNotTransmission: return "edge source not a transmission";
    case Violation::Kind::kNotReception: return "edge target not a reception";
    case Violation::Kind::kMessageMismatch: return "message mismatch";
    case Violation::Kind::kUnexplainedReception: return "unexplained reception";
    case Violation::Kind::kMultipleTransmitters: return "multiple transmitters";
    case Violation::Kind::kCycle: return "cycle";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const Violation& v) {
  os << violation_name(v.kind) << ": " << v.message;
  if (!v.nodes.empty()) {
    os << " at";
    for (const Node& n : v.nodes) os << ' ' << n;
  }
  return os;
}

std::vector<Violation> validate_bundle(const Bundle& b) {
  const StrandSpace& space = b.space();
  std::vector<Violation> out;
  std::map<Node, std::vector<Node>> transmitters;
  std::vector<CommEdge> good;
  for (const CommEdge& e : b.edges()) {
    if (!space.valid(e.from) || !space.valid(e.to)) {
      out.push_back({Violation::Kind::kBadNode,
                     "edge endpoint outside the strand space",
                     {e.from, e.to}});
      continue;
    }
    const Event& src = evt(space, e.from);
    const Event& dst = evt(space, e.to);
    bool ok = true;
    if (!src.outbound()) {
      out.push_back({Violation::Kind::kNotTransmission,
                     "edge starts at a reception", {e.from, e.to}});
      ok = false;
    }
    if (!dst.inbound()) {
      out.push_back({Violation::Kind::kNotReception,
                     "edge ends at a transmission", {e.from, e.to}});
      ok = false;
    }
    if (!(src.message == dst.message)) {
      out.push_back({Violation::Kind::kMessageMismatch,
                     "sent " + to_string(src.message) + ", received " +
                         to_string(dst.message),
                     {e.from, e.to}});
      ok = false;
    }
    if (ok) transmitters[e.to].push_back(e.from);
    good.push_back(e);
  }
  for (const Node& n : space.nodes()) {
    if (!evt(space, n).inbound()) continue;
    auto it = transmitters.find(n);
    if (it == transmitters.end()) {
      out.push_back({Violation::Kind::kUnexplainedReception,
                     "no transmission explains " +
                         to_string(evt(space, n).message),
                     {n}});
    } else if (it->second.size() > 1) {
      std::vector<Node> nodes = {n};
      nodes.insert(nodes.end(), it->second.begin(), it->second.end());
      out.push_back({Violation::Kind::kMultipleTransmitters,
                     "reception has more than one transmitter", nodes});
    }
  }

  // Kahn's algorithm over communication and succession edges.
  std::map<Node, std::vector<Node>> succ;
  std::map<Node, std::size_t> indegree;
  for (const Node& n : space.nodes()) indegree[n] = 0;
  auto add = [&](const Node& a, const Node& c) {
    succ[a].push_back(c);
    ++indegree[c];
  };
  for (const Node& n : space.nodes()) {
    if (n.index > 0) add({n.strand, n.index - 1}, n);
  }
  for (const CommEdge& e : good) add(e.from, e.to);
  std::vector<Node> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.push_back(n);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    Node n = ready.back();
    ready.pop_back();
    ++seen;
    for (const Node& m : succ[n]) {
      if (--indegree[m] == 0) ready.push_back(m);
    }
  }
  if (seen != indegree.size()) {
    std::vector<Node> stuck;
    for (const auto& [n, d] : indegree) {
      if (d > 0) stuck.push_back(n);
    }
    out.push_back({Violation::Kind::kCycle,
                   "communication and succession edges form a cycle", stuck});
  }
  return out;
}

Precedence::Precedence(const Bundle& b) {
  std::vector<Violation> problems = validate_bundle(b);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "precedence of an invalid bundle: " << problems.front();
    throw ValidationError(msg.str());
  }
  const StrandSpace& space = b.space();
  nodes_ = space.nodes();
  std::size_t offset = 0;
  for (std::size_t s = 0; s < space.size(); ++s) {
    strand_offset_.push_back(offset);
    offset += space.trace(s).size();
  }
  const std::size_t n = nodes_.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const Node& node : nodes_) {
    if (node.index + 1 < space.trace(node.strand).size()) {
      succ[id(node)].push_back(id({node.strand, node.index + 1}));
    }
  }
  for (const CommEdge& e : b.edges()) succ[id(e.from)].push_back(id(e.to));
  reach_.assign(n, std::vector<bool>(n, false));
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> stack = succ[start];
    while (!stack.empty()) {
      std::size_t m = stack.back();
      stack.pop_back();
      if (reach_[start][m]) continue;
      reach_[start][m] = true;
      for (std::size_t k : succ[m]) stack.push_back(k);
    }
  }
}

std::size_t Precedence::id(const Node& n) const {
  return strand_offset_.at(n.strand) + n.index;
}

bool Precedence::operator()(const Node& before, const Node& after) const {
  if (before.strand >= strand_offset_.size() ||
      after.strand >= strand_offset_.size()) {
    return false;
  }
  std::size_t a = id(before);
  std::size_t c = id(after);
  if (a >= nodes_.size() || c >= nodes_.size() || !(nodes_[a] == before) ||
      !(nodes_[c] == after)) {
    return false;
  }
  return reach_[a][c];
}

std::vector<std::pair<Node, Node>> Precedence::pairs() const {
  std::vector<std::pair<Node, Node>> out;
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    for (std::size_t c = 0; c < nodes_.size(); ++c) {
      if (reach_[a][c]) out.emplace_back(nodes_[a], nodes_[c]);
    }
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const StrandRole& r) {
  os << r.role;
  if (r.kind == StrandRole::Kind::kAdversary) {
    for (const Term& t : r.params) os << ' ' << t;
    return os;
  }
  os << " {";
  bool first = true;
  for (const auto& [k, v] : r.binding.bindings()) {
    os << (first ? "" : ", ") << k.name << " -> " << v;
    first = false;
  }
  return os << '}';
}

RoleItem role_item(const Protocol& p, const StrandRole& r) {
  if (r.kind == StrandRole::Kind::kAdversary) {
    auto kind = parse_adversary(r.role);
    if (!kind) throw ValidationError("unknown adversary role " + r.role);
    return adversary_item(*kind, r.params);
  }
  const RoleTemplate* role = p.find(r.role);
  if (role == nullptr || role->is_listener()) {
    throw ValidationError("protocol " + p.name() + " has no role " + r.role);
  }
  return instantiate(*role, r.binding);
}

CandidatePool::CandidatePool(const StrandSpace& space,
                             const std::set<Term>& extra) {
  std::set<Term> seen;
  std::function<void(const Term&)> visit = [&](const Term& t) {
    if (!is_ground(t) || !seen.insert(t).second) return;
    if (t.kind() == Term::Kind::kAConst) seen.insert(invert_key(t));
    if (t.is_pair()) {
      visit(t.left());
      visit(t.right());
    } else if (t.is_enc()) {
      visit(t.plaintext());
      visit(t.key());
    }
  };
  for (const Trace& trace : space.traces()) {
    for (const Event& e : trace) visit(e.message);
  }
  for (const Term& t : extra) visit(t);
  std::size_t next_a = 0, next_s = 0, next_d = 0;
  for (const Term& t : seen) {
    top_.push_back(t);
    switch (t.kind()) {
      case Term::Kind::kAConst:
        akeys_.push_back(t);
        next_a = std::max(next_a, t.index() + 1);
        break;
      case Term::Kind::kSConst:
        skeys_.push_back(t);
        next_s = std::max(next_s, t.index() + 1);
        break;
      case Term::Kind::kDConst:
        data_.push_back(t);
        next_d = std::max(next_d, t.index() + 1);
        break;
      default: break;
    }
  }
  akeys_.push_back(Term::akey(next_a));
  skeys_.push_back(Term::skey(next_s));
  data_.push_back(Term::data(next_d));
  top_.push_back(Term::data(next_d));
}

const std::vector<Term>& CandidatePool::of(Sort sort) const {
  switch (sort) {
    case Sort::kAKey: return akeys_;
    case Sort::kSKey: return skeys_;
    case Sort::kData: return data_;
    case Sort::kTop: return top_;
  }
  return top_;
}

namespace {

// Bindings of the role parameters under which the role's trace has the
// strand's trace as a prefix, with undetermined parameters drawn from pool.
// Calls visit for each candidate until it returns true.
bool for_each_regular_match(
    const RoleTemplate& role, const Trace& actual, const CandidatePool& pool,
    const std::function<bool(const Substitution&)>& visit) {
  if (actual.size() > role.trace().size()) return false;
  Substitution theta;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const Event& pattern = role.trace()[i];
    if (pattern.direction != actual[i].direction) return false;
    auto next = match(pattern.message, actual[i].message, theta);
    if (!next) return false;
    theta = std::move(*next);
  }
  std::vector<VarKey> open;
  for (const VarKey& p : role.params()) {
    if (!theta.contains(p)) open.push_back(p);
  }
  std::function<bool(std::size_t, Substitution&)> extend =
      [&](std::size_t k, Substitution& sub) -> bool {
    if (k == open.size()) return visit(sub);
    for (const Term& candidate : pool.of(open[k].sort)) {
      Substitution next = sub;
      next.bind(open[k], candidate);
      if (extend(k + 1, next)) return true;
    }
    return false;
  };
  return extend(0, theta);
}

}  // namespace

RunResult check_run(const Bundle& b, const Protocol& p,
                    const PartialAssignment& hint) {
  const StrandSpace& space = b.space();
  if (!hint.empty() && hint.size() != space.size()) {
    return NotARun{0, "hint covers " + std::to_string(hint.size()) +
                          " strands, bundle has " +
                          std::to_string(space.size())};
  }
  std::optional<CandidatePool> pool;
  RoleAssignment out;
  for (std::size_t s = 0; s < space.size(); ++s) {
    if (!hint.empty() && hint[s]) {
      try {
        if (!inst(space, s, role_item(p, *hint[s]))) {
          return NotARun{s, "strand is not an instance of its declared role " +
                                hint[s]->role};
        }
      } catch (const Error& e) {
        return NotARun{s, e.what()};
      }
      out.push_back(*hint[s]);
      continue;
    }
    if (!pool) pool.emplace(space);
    std::optional<StrandRole> found;
    for (const RoleTemplate& role : p.roles()) {
      for_each_regular_match(role, space.trace(s), *pool,
                             [&](const Substitution& sub) {
                               if (!inst(space, s, instantiate(role, sub))) {
                                 return false;
                               }
                               found = StrandRole::regular(role.name(), sub);
                               return true;
                             });
      if (found) break;
    }
    if (!found) {
      for (AdversaryKind kind : adversary_roles()) {
        auto params = infer_adversary_params(kind, space.trace(s));
        if (!params) continue;
        try {
          if (inst(space, s, adversary_item(kind, *params))) {
            found = StrandRole::adversary(kind, std::move(*params));
            break;
          }
        } catch (const Error&) {
        }
      }
    }
    if (!found) {
      return NotARun{s, "no role of " + p.name() +
                            " or adversary generator explains the strand"};
    }
    out.push_back(std::move(*found));
  }
  return out;
}

}  // namespace strandkit
