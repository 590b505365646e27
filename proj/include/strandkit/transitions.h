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

// Sets of state transitions used as event annotations. States are naturals
// 0..bx, the number of unchecked boxes on an award card.

#ifndef STRANDKIT_TRANSITIONS_H_
#define STRANDKIT_TRANSITIONS_H_

#include <cstddef>
#include <ostream>
#include <set>
#include <utility>

namespace strandkit {

using StatePair = std::pair<std::size_t, std::size_t>;

class TransitionSet {
 public:
  enum class Kind {
    kCheckBox,  // {(s0, s1) | s0 = s1 + 1}
    kNewCard,   // {(s0, s1) | s1 = bx}
    kEndsAt,    // {(s0, s1) | s1 = state}
    kStartsAt,  // {(s0, s1) | s0 = state}
    kExplicit,
  };

  static TransitionSet check_box() { return TransitionSet(Kind::kCheckBox); }
  static TransitionSet new_card() { return TransitionSet(Kind::kNewCard); }
  static TransitionSet ends_at(std::size_t s);
  static TransitionSet starts_at(std::size_t s);
  static TransitionSet explicit_pairs(std::set<StatePair> pairs);

  Kind kind() const { return kind_; }
  std::size_t state() const { return state_; }
  const std::set<StatePair>& pairs() const { return pairs_; }

  // Membership for states within 0..bx.
  bool contains(std::size_t s0, std::size_t s1, std::size_t bx) const;

  // Structural equality; see same_transitions for extensional equality.
  friend bool operator==(const TransitionSet&, const TransitionSet&) = default;

 private:
  explicit TransitionSet(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::size_t state_ = 0;
  std::set<StatePair> pairs_;
};

// The pairs of a set over states 0..bx.
std::set<StatePair> enumerate(const TransitionSet& a, std::size_t bx);
bool subset_of(const TransitionSet& a, const TransitionSet& b, std::size_t bx);
bool same_transitions(const TransitionSet& a, const TransitionSet& b,
                      std::size_t bx);

std::ostream& operator<<(std::ostream& os, const TransitionSet& a);

}  // namespace strandkit

#endif  // STRANDKIT_TRANSITIONS_H_
