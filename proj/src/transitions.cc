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

#include "strandkit/transitions.h"

namespace strandkit {

TransitionSet TransitionSet::ends_at(std::size_t s) {
  TransitionSet t(Kind::kEndsAt);
  t.state_ = s;
  return t;
}

TransitionSet TransitionSet::starts_at(std::size_t s) {
  TransitionSet t(Kind::kStartsAt);
  t.state_ = s;
  return t;
}

TransitionSet TransitionSet::explicit_pairs(std::set<StatePair> pairs) {
  TransitionSet t(Kind::kExplicit);
  t.pairs_ = std::move(pairs);
  return t;
}

bool TransitionSet::contains(std::size_t s0, std::size_t s1,
                             std::size_t bx) const {
  if (s0 > bx || s1 > bx) return false;
  switch (kind_) {
    case Kind::kCheckBox: return s0 == s1 + 1;
    case Kind::kNewCard: return s1 == bx;
    case Kind::kEndsAt: return s1 == state_;
    case Kind::kStartsAt: return s0 == state_;
    case Kind::kExplicit: return pairs_.count({s0, s1}) != 0;
  }
  return false;
}

std::set<StatePair> enumerate(const TransitionSet& a, std::size_t bx) {
  std::set<StatePair> out;
  for (std::size_t s0 = 0; s0 <= bx; ++s0) {
    for (std::size_t s1 = 0; s1 <= bx; ++s1) {
      if (a.contains(s0, s1, bx)) out.insert({s0, s1});
    }
  }
  return out;
}

bool subset_of(const TransitionSet& a, const TransitionSet& b,
               std::size_t bx) {
  for (const StatePair& p : enumerate(a, bx)) {
    if (!b.contains(p.first, p.second, bx)) return false;
  }
  return true;
}

bool same_transitions(const TransitionSet& a, const TransitionSet& b,
                      std::size_t bx) {
  return enumerate(a, bx) == enumerate(b, bx);
}

std::ostream& operator<<(std::ostream& os, const TransitionSet& a) {
  switch (a.kind()) {
    case TransitionSet::Kind::kCheckBox: return os << "(check-box)";
    case TransitionSet::Kind::kNewCard: return os << "(new-card)";
    case TransitionSet::Kind::kEndsAt:
      return os << "(ends-at " << a.state() << ")";
    case TransitionSet::Kind::kStartsAt:
      return os << "(starts-at " << a.state() << ")";
    case TransitionSet::Kind::kExplicit:
      os << "(explicit";
      for (const auto& [s0, s1] : a.pairs()) os << " (" << s0 << ' ' << s1 << ')';
      return os << ")";
  }
  return os;
}

}  // namespace strandkit
