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

// Events, traces, strand spaces, nodes and origination.

#ifndef STRANDKIT_STRANDS_H_
#define STRANDKIT_STRANDS_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "strandkit/algebra.h"

namespace strandkit {

enum class Direction { kOutbound, kInbound };

struct Event {
  Direction direction;
  Term message;

  static Event send(Term t) { return Event{Direction::kOutbound, std::move(t)}; }
  static Event recv(Term t) { return Event{Direction::kInbound, std::move(t)}; }

  bool outbound() const { return direction == Direction::kOutbound; }
  bool inbound() const { return direction == Direction::kInbound; }

  friend bool operator==(const Event&, const Event&) = default;
};

Event apply(const Substitution& sub, const Event& e);
std::ostream& operator<<(std::ostream& os, const Event& e);

// A non-empty finite sequence of events.
class Trace {
 public:
  // Throws ValidationError when events is empty.
  explicit Trace(std::vector<Event> events);

  std::size_t size() const { return events_.size(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  const Event& at(std::size_t i) const { return events_.at(i); }
  auto begin() const { return events_.begin(); }
  auto end() const { return events_.end(); }
  const std::vector<Event>& events() const { return events_; }

  // The first h events; 1 <= h <= size().
  Trace prefix(std::size_t h) const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<Event> events_;
};

Trace apply(const Substitution& sub, const Trace& trace);
std::ostream& operator<<(std::ostream& os, const Trace& trace);

struct Node {
  std::size_t strand = 0;
  std::size_t index = 0;

  friend auto operator<=>(const Node&, const Node&) = default;
  friend bool operator==(const Node&, const Node&) = default;
};

std::ostream& operator<<(std::ostream& os, const Node& n);

// A non-empty finite sequence of traces.
class StrandSpace {
 public:
  explicit StrandSpace(std::vector<Trace> traces);

  std::size_t size() const { return traces_.size(); }
  const Trace& trace(std::size_t strand) const { return traces_.at(strand); }
  const std::vector<Trace>& traces() const { return traces_; }

  bool valid(const Node& n) const {
    return n.strand < traces_.size() && n.index < traces_[n.strand].size();
  }
  // All nodes, strand-major.
  std::vector<Node> nodes() const;
  std::size_t node_count() const;

 private:
  std::vector<Trace> traces_;
};

// Throws std::out_of_range for a node outside the space.
const Event& evt(const StrandSpace& space, const Node& n);

// Least index at which the atom t originates in trace: carried by an
// outbound event and by no earlier event. Throws ValidationError if t is not
// an atom. Variables are rigid, so this also serves role and skeleton traces.
std::optional<std::size_t> originates_at(const Trace& trace, const Term& t);

// t originates on no strand.
bool non_originating(const StrandSpace& space, const Term& t);

// t originates on exactly one strand, and at node n.
bool uniquely_originates(const StrandSpace& space, const Term& t,
                         const Node& n);

// All nodes at which t originates, one per originating strand.
std::vector<Node> origination_nodes(const StrandSpace& space, const Term& t);

}  // namespace strandkit

#endif  // STRANDKIT_STRANDS_H_
