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

#include "strandkit/skeleton.h"

#include <algorithm>
#include <sstream>

namespace strandkit {

namespace {

StrandSpace build_space(const std::string& name, const Protocol& protocol,
                        const std::set<VarKey>& declared,
                        const std::vector<Instance>& instances) {
  if (instances.empty()) {
    throw ValidationError("skeleton " + name + " has no instances");
  }
  std::vector<Trace> traces;
  for (std::size_t s = 0; s < instances.size(); ++s) {
    const Instance& in = instances[s];
    const std::string where =
        "skeleton " + name + ", strand " + std::to_string(s);
    const RoleTemplate* role = protocol.find(in.role);
    if (role == nullptr) {
      throw ValidationError(where + ": unknown role " + in.role);
    }
    if (in.height == 0 || in.height > role->trace().size()) {
      throw ValidationError(where + ": height " + std::to_string(in.height) +
                            " outside 1.." +
                            std::to_string(role->trace().size()));
    }
    const std::set<VarKey> params(role->params().begin(),
                                  role->params().end());
    for (const auto& [key, image] : in.mapping.bindings()) {
      if (!params.count(key)) {
        throw ValidationError(where + ": " + key.name +
                              " is not a parameter of " + in.role);
      }
      for (const VarKey& v : variables(image)) {
        if (!declared.count(v)) {
          throw ValidationError(where + ": undeclared variable " + v.name);
        }
      }
    }
    for (const VarKey& p : role->params()) {
      if (!in.mapping.contains(p)) {
        throw ValidationError(where + ": parameter " + p.name + " unmapped");
      }
    }
    traces.push_back(apply(in.mapping, role->trace().prefix(in.height)));
  }
  return StrandSpace(std::move(traces));
}

}  // namespace

Skeleton::Skeleton(std::string name, std::shared_ptr<const Protocol> protocol,
                   std::vector<VarKey> vars, std::vector<Instance> instances,
                   NodeOrder ordering, std::set<Term> nonorig,
                   std::set<Term> uniqorig)
    : name_(std::move(name)),
      protocol_(std::move(protocol)),
      vars_(std::move(vars)),
      instances_(std::move(instances)),
      ordering_(std::move(ordering)),
      nonorig_(std::move(nonorig)),
      uniqorig_(std::move(uniqorig)),
      space_(build_space(name_, *protocol_,
                         std::set<VarKey>(vars_.begin(), vars_.end()),
                         instances_)) {
  const std::set<VarKey> declared(vars_.begin(), vars_.end());
  if (declared.size() != vars_.size()) {
    throw ValidationError("skeleton " + name_ + ": duplicate variable");
  }
  // Closure of ordering and succession; a pair (n, n) means a cycle.
  std::vector<Node> nodes = space_.nodes();
  std::map<Node, std::vector<Node>> succ;
  for (const Node& n : nodes) {
    if (n.index + 1 < space_.trace(n.strand).size()) {
      succ[n].push_back({n.strand, n.index + 1});
    }
  }
  for (const auto& [a, c] : ordering_) {
    if (!space_.valid(a) || !space_.valid(c)) {
      throw ValidationError("skeleton " + name_ +
                            ": ordering mentions a node outside the space");
    }
    succ[a].push_back(c);
  }
  for (const Node& start : nodes) {
    std::vector<Node> stack = succ[start];
    std::set<Node> seen;
    while (!stack.empty()) {
      Node m = stack.back();
      stack.pop_back();
      if (!seen.insert(m).second) continue;
      closure_.insert({start, m});
      for (const Node& k : succ[m]) stack.push_back(k);
    }
    if (seen.count(start)) {
      throw ValidationError("skeleton " + name_ + ": ordering is cyclic");
    }
  }
  for (const auto* set : {&nonorig_, &uniqorig_}) {
    for (const Term& t : *set) {
      if (!is_atom(t)) {
        throw ValidationError("skeleton " + name_ +
                              ": origination assumption on non-atom " +
                              to_string(t));
      }
      for (const VarKey& v : variables(t)) {
        if (!declared.count(v)) {
          throw ValidationError("skeleton " + name_ +
                                ": undeclared variable " + v.name);
        }
      }
    }
  }
  for (const Term& t : uniqorig_) {
    std::vector<Node> origins = origination_nodes(space_, t);
    if (origins.size() != 1) {
      throw ValidationError("skeleton " + name_ + ": " + to_string(t) +
                            " originates at " +
                            std::to_string(origins.size()) +
                            " nodes, expected exactly one");
    }
    origins_.emplace(t, origins.front());
  }
}

const RoleTemplate& Skeleton::role_of(std::size_t strand) const {
  return *protocol_->find(instances_.at(strand).role);
}

bool Skeleton::precedes(const Node& before, const Node& after) const {
  return closure_.count({before, after}) != 0;
}

Node Skeleton::origination_node(const Term& t) const {
  auto it = origins_.find(t);
  if (it == origins_.end()) {
    throw ValidationError("skeleton " + name_ + ": " + to_string(t) +
                          " is not uniquely originating");
  }
  return it->second;
}

HomWitness identity_witness(const Skeleton& k) {
  HomWitness w;
  for (std::size_t s = 0; s < k.instances().size(); ++s) {
    w.strand_map.push_back(s);
  }
  return w;
}

std::ostream& operator<<(std::ostream& os, const HomViolation& v) {
  return os << "property " << v.property << ": " << v.detail;
}

namespace {

std::string node_str(const Node& n) {
  std::ostringstream os;
  os << n;
  return os.str();
}

}  // namespace

std::vector<HomViolation> verify_hom(const Skeleton& k0, const Skeleton& k1,
                                     const HomWitness& w) {
  std::vector<HomViolation> out;
  if (k0.protocol().name() != k1.protocol().name()) {
    out.push_back({0, "skeletons use different protocols"});
    return out;
  }
  const std::size_t n0 = k0.instances().size();
  if (w.strand_map.size() != n0) {
    out.push_back({1, "strand map has " + std::to_string(w.strand_map.size()) +
                          " entries for " + std::to_string(n0) + " strands"});
    return out;
  }
  std::vector<bool> strand_ok(n0, true);
  for (std::size_t s = 0; s < n0; ++s) {
    std::size_t t = w.strand_map[s];
    if (t >= k1.instances().size()) {
      out.push_back({1, "strand " + std::to_string(s) + " maps to missing " +
                            std::to_string(t)});
      strand_ok[s] = false;
    } else if (k1.instances()[t].height < k0.instances()[s].height) {
      out.push_back({1, "strand " + std::to_string(s) + " maps to shorter " +
                            std::to_string(t)});
      strand_ok[s] = false;
    }
  }
  const std::set<VarKey> codomain(k1.vars().begin(), k1.vars().end());
  for (const VarKey& x : k0.vars()) {
    Term image = apply(w.term_map, as_term(x));
    for (const VarKey& v : variables(image)) {
      if (!codomain.count(v)) {
        out.push_back({2, x.name + " maps outside the codomain algebra (" +
                              v.name + ")"});
      }
    }
  }
  for (const Node& n : k0.space().nodes()) {
    if (!strand_ok[n.strand]) continue;
    Node m{w.strand_map[n.strand], n.index};
    Event image = apply(w.term_map, evt(k0.space(), n));
    if (!(image == evt(k1.space(), m))) {
      std::ostringstream msg;
      msg << "event at " << n << " maps to " << image << " but " << m
          << " is " << evt(k1.space(), m);
      out.push_back({3, msg.str()});
    }
  }
  for (const auto& [a, c] : k0.ordering()) {
    if (!strand_ok[a.strand] || !strand_ok[c.strand]) continue;
    Node fa{w.strand_map[a.strand], a.index};
    Node fc{w.strand_map[c.strand], c.index};
    if (!k1.precedes(fa, fc)) {
      out.push_back({4, node_str(a) + " < " + node_str(c) +
                            " is not preserved"});
    }
  }
  for (const Term& t : k0.nonorig()) {
    Term image = apply(w.term_map, t);
    if (!k1.nonorig().count(image)) {
      out.push_back({5, to_string(image) + " is not non-originating in " +
                            k1.name()});
    }
  }
  for (const Term& t : k0.uniqorig()) {
    Term image = apply(w.term_map, t);
    if (!k1.uniqorig().count(image)) {
      out.push_back({6, to_string(image) +
                            " is not uniquely originating in " + k1.name()});
      continue;
    }
    Node o0 = k0.origination_node(t);
    if (!strand_ok[o0.strand]) continue;
    Node mapped{w.strand_map[o0.strand], o0.index};
    Node o1 = k1.origination_node(image);
    if (!(mapped == o1)) {
      out.push_back({6, "origination node of " + to_string(t) + " maps to " +
                            node_str(mapped) + ", but " + to_string(image) +
                            " originates at " + node_str(o1)});
    }
  }
  return out;
}

std::vector<HomViolation> verify_hom_to_bundle(const Skeleton& k,
                                               const Bundle& b,
                                               const HomWitness& w,
                                               const PartialAssignment& hint) {
  std::vector<HomViolation> out;
  const std::vector<Violation> problems = validate_bundle(b);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid bundle: " << problems.front();
    out.push_back({0, msg.str()});
    return out;
  }
  const RunResult run = check_run(b, k.protocol(), hint);
  if (const auto* failure = std::get_if<NotARun>(&run)) {
    out.push_back({0, "bundle is not a run of " + k.protocol().name() +
                          " (strand " + std::to_string(failure->strand) +
                          ": " + failure->reason + ")"});
    return out;
  }
  const StrandSpace& theta = b.space();
  const Precedence prec(b);
  const std::size_t n = k.instances().size();
  if (w.strand_map.size() != n) {
    out.push_back({1, "strand map has " + std::to_string(w.strand_map.size()) +
                          " entries for " + std::to_string(n) + " strands"});
    return out;
  }

  bool ground = true;
  for (const VarKey& x : k.vars()) {
    const Term* image = w.term_map.find(x);
    if (image == nullptr || !is_ground(*image)) {
      out.push_back({2, x.name + " is not mapped to a ground message"});
      ground = false;
    }
  }

  // Image of each skeleton node in the bundle, when defined.
  std::vector<std::optional<std::size_t>> listener_index(n);
  std::vector<bool> strand_ok(n, true);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t t = w.strand_map[s];
    const Instance& in = k.instances()[s];
    if (t >= theta.size()) {
      out.push_back({1, "strand " + std::to_string(s) +
                            " maps outside the bundle"});
      strand_ok[s] = false;
      continue;
    }
    if (k.is_listener(s)) {
      auto it = w.listener_nodes.find(s);
      if (it == w.listener_nodes.end() || !theta.valid({t, it->second})) {
        out.push_back({1, "listener strand " + std::to_string(s) +
                              " has no target node"});
        strand_ok[s] = false;
        continue;
      }
      listener_index[s] = it->second;
      continue;
    }
    if (theta.trace(t).size() < in.height) {
      out.push_back({1, "strand " + std::to_string(s) + " (height " +
                            std::to_string(in.height) + ") maps to strand " +
                            std::to_string(t) + " of height " +
                            std::to_string(theta.trace(t).size())});
      strand_ok[s] = false;
    }
  }
  auto image_of = [&](const Node& node) -> Node {
    const std::size_t t = w.strand_map[node.strand];
    if (listener_index[node.strand]) return {t, *listener_index[node.strand]};
    return {t, node.index};
  };

  for (std::size_t s = 0; s < n && ground; ++s) {
    if (!strand_ok[s]) continue;
    const Instance& in = k.instances()[s];
    if (k.is_listener(s)) {
      Term msg = apply(w.term_map, apply(in.mapping, as_term(
                                                      k.role_of(s).params()[0])));
      const Event& target = evt(theta, image_of({s, 0}));
      if (!(target == Event::send(msg))) {
        out.push_back({3, "listener strand " + std::to_string(s) +
                              " maps to a node that does not transmit " +
                              to_string(msg)});
      }
      continue;
    }
    for (std::size_t i = 0; i < in.height; ++i) {
      Event image = apply(w.term_map, evt(k.space(), {s, i}));
      Node m = image_of({s, i});
      if (!(image == evt(theta, m))) {
        std::ostringstream msg;
        msg << "event at (" << s << ' ' << i << ") maps to " << image
            << " but " << m << " is " << evt(theta, m);
        out.push_back({3, msg.str()});
      }
    }
    try {
      RoleItem item =
          instantiate(k.role_of(s), in.mapping.then(w.term_map));
      if (!inst(theta, w.strand_map[s], item)) {
        out.push_back({3, "bundle strand " +
                              std::to_string(w.strand_map[s]) +
                              " is not an instance of the mapped " + in.role +
                              " role item"});
      }
    } catch (const Error& e) {
      out.push_back({3, std::string("cannot instantiate ") + in.role + ": " +
                            e.what()});
    }
  }

  for (const auto& [a, c] : k.ordering()) {
    if (!strand_ok[a.strand] || !strand_ok[c.strand]) continue;
    if (a.strand == c.strand && k.is_listener(a.strand)) continue;
    Node fa = image_of(a);
    Node fc = image_of(c);
    if (!prec(fa, fc)) {
      out.push_back({4, node_str(a) + " < " + node_str(c) + " maps to " +
                            node_str(fa) + ", " + node_str(fc) +
                            ", which are not ordered"});
    }
  }
  if (!ground) return out;
  for (const Term& t : k.nonorig()) {
    Term image = apply(w.term_map, t);
    if (!non_originating(theta, image)) {
      out.push_back({5, to_string(image) + " originates in the bundle"});
    }
  }
  for (const Term& t : k.uniqorig()) {
    Node o = k.origination_node(t);
    if (!strand_ok[o.strand]) continue;
    Term image = apply(w.term_map, t);
    Node mapped = image_of(o);
    if (!uniquely_originates(theta, image, mapped)) {
      out.push_back({6, to_string(image) +
                            " does not uniquely originate at " +
                            node_str(mapped)});
    }
  }
  return out;
}

HomWitness compose(const HomWitness& w1, const HomWitness& w2) {
  HomWitness out;
  for (std::size_t s = 0; s < w1.strand_map.size(); ++s) {
    const std::size_t mid = w1.strand_map[s];
    if (mid >= w2.strand_map.size()) {
      throw ValidationError("cannot compose: strand " + std::to_string(s) +
                            " maps outside the second witness's domain");
    }
    out.strand_map.push_back(w2.strand_map[mid]);
    if (auto it = w2.listener_nodes.find(mid); it != w2.listener_nodes.end()) {
      out.listener_nodes[s] = it->second;
    } else if (auto own = w1.listener_nodes.find(s);
               own != w1.listener_nodes.end()) {
      out.listener_nodes[s] = own->second;
    }
  }
  out.term_map = w1.term_map.then(w2.term_map);
  return out;
}

bool same_hom(const Skeleton& k, const HomWitness& a, const HomWitness& b) {
  if (a.strand_map != b.strand_map) return false;
  for (std::size_t s = 0; s < k.instances().size(); ++s) {
    if (!k.is_listener(s)) continue;
    auto ia = a.listener_nodes.find(s);
    auto ib = b.listener_nodes.find(s);
    if ((ia == a.listener_nodes.end()) != (ib == b.listener_nodes.end())) {
      return false;
    }
    if (ia != a.listener_nodes.end() && ia->second != ib->second) return false;
  }
  for (const VarKey& x : k.vars()) {
    if (!(apply(a.term_map, as_term(x)) == apply(b.term_map, as_term(x)))) {
      return false;
    }
  }
  return true;
}

}  // namespace strandkit
