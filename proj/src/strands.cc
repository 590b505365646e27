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

#include "strandkit/strands.h"

#include <stdexcept>
#include <string>

namespace strandkit {

Event apply(const Substitution& sub, const Event& e) {
  return Event{e.direction, apply(sub, e.message)};
}

std::ostream& operator<<(std::ostream& os, const Event& e) {
  return os << (e.outbound() ? '+' : '-') << e.message;
}

Trace::Trace(std::vector<Event> events) : events_(std::move(events)) {
  if (events_.empty()) throw ValidationError("a trace must be non-empty");
}

Trace Trace::prefix(std::size_t h) const {
  if (h == 0 || h > events_.size()) {
    throw ValidationError("prefix length " + std::to_string(h) +
                          " out of range for trace of length " +
                          std::to_string(events_.size()));
  }
  return Trace(std::vector<Event>(events_.begin(), events_.begin() + h));
}

Trace apply(const Substitution& sub, const Trace& trace) {
  std::vector<Event> out;
  out.reserve(trace.size());
  for (const Event& e : trace) out.push_back(apply(sub, e));
  return Trace(std::move(out));
}

std::ostream& operator<<(std::ostream& os, const Trace& trace) {
  os << '<';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) os << ", ";
    os << trace[i];
  }
  return os << '>';
}

std::ostream& operator<<(std::ostream& os, const Node& n) {
  return os << '(' << n.strand << ' ' << n.index << ')';
}

StrandSpace::StrandSpace(std::vector<Trace> traces)
    : traces_(std::move(traces)) {
  if (traces_.empty()) throw ValidationError("a strand space must be non-empty");
}

std::vector<Node> StrandSpace::nodes() const {
  std::vector<Node> out;
  for (std::size_t s = 0; s < traces_.size(); ++s) {
    for (std::size_t i = 0; i < traces_[s].size(); ++i) out.push_back({s, i});
  }
  return out;
}

std::size_t StrandSpace::node_count() const {
  std::size_t n = 0;
  for (const Trace& t : traces_) n += t.size();
  return n;
}

const Event& evt(const StrandSpace& space, const Node& n) {
  if (!space.valid(n)) {
    throw std::out_of_range("node (" + std::to_string(n.strand) + " " +
                            std::to_string(n.index) +
                            ") is not in the strand space");
  }
  return space.trace(n.strand)[n.index];
}

std::optional<std::size_t> originates_at(const Trace& trace, const Term& t) {
  if (!is_atom(t)) {
    throw ValidationError("origination is defined for atoms only: " +
                          to_string(t));
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (carried_by_free(t, trace[i].message)) {
      if (trace[i].outbound()) return i;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::vector<Node> origination_nodes(const StrandSpace& space, const Term& t) {
  std::vector<Node> out;
  for (std::size_t s = 0; s < space.size(); ++s) {
    if (auto i = originates_at(space.trace(s), t)) out.push_back({s, *i});
  }
  return out;
}

bool non_originating(const StrandSpace& space, const Term& t) {
  return origination_nodes(space, t).empty();
}

bool uniquely_originates(const StrandSpace& space, const Term& t,
                         const Node& n) {
  std::vector<Node> origins = origination_nodes(space, t);
  return origins.size() == 1 && origins.front() == n;
}

}  // namespace strandkit
