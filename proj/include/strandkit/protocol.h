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

// Roles as templates, role items, the instance predicates inst and htin, the
// adversary generators and listener strands.

#ifndef STRANDKIT_PROTOCOL_H_
#define STRANDKIT_PROTOCOL_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "strandkit/algebra.h"
#include "strandkit/strands.h"
#include "strandkit/transitions.h"

namespace strandkit {

// Bottom, or Up(value).
template <typename T>
class Lifted {
 public:
  Lifted() = default;
  static Lifted bottom() { return Lifted(); }
  static Lifted up(T value) {
    Lifted l;
    l.value_ = std::move(value);
    return l;
  }

  bool is_up() const { return value_.has_value(); }
  bool is_bottom() const { return !value_.has_value(); }
  // Throws std::bad_optional_access on Bottom.
  const T& down() const { return value_.value(); }

  friend bool operator==(const Lifted&, const Lifted&) = default;

 private:
  std::optional<T> value_;
};

// A payload the workbench carries but does not interpret.
struct OpaqueAnnotation {
  std::string text;
  friend bool operator==(const OpaqueAnnotation&, const OpaqueAnnotation&) =
      default;
};

using Annotation = std::variant<TransitionSet, OpaqueAnnotation>;

// Symbolic annotation on a role event. State annotations sit on the outbound
// half of an inbound/outbound pair that threads the state through messages;
// they turn into transition sets once the role is instantiated.
enum class StateEncoding {
  kStep,   // {(s0, s1) | g(s0) = h(C(i-1)), g(s1) = h(C(i))}
  kIssue,  // {(s0, s1) | g(s1) = h(C(i))}
};

using AnnotationSpec = std::variant<StateEncoding, OpaqueAnnotation>;

std::ostream& operator<<(std::ostream& os, const Annotation& a);
std::ostream& operator<<(std::ostream& os, const AnnotationSpec& a);

// The state encoded by a message: the tag in its first plaintext or pair
// position. Returns nullopt when the message encodes no state.
std::optional<std::size_t> encoded_state(const Term& message);

using OriginationSets = std::vector<std::set<Term>>;

// r(C, N, U, A): a ground trace with per-index origination assumptions and
// annotations. All four sequences have the same length.
struct RoleItem {
  RoleItem(std::string role, Trace trace, OriginationSets nonorig,
           OriginationSets uniqorig, std::vector<Lifted<Annotation>> annotations);

  std::string role;
  Trace trace;
  OriginationSets nonorig;
  OriginationSets uniqorig;
  std::vector<Lifted<Annotation>> annotations;
};

class RoleTemplate {
 public:
  // Throws ValidationError when a sequence has the wrong length, an
  // origination term is not an atom, or a variable is not a parameter.
  RoleTemplate(std::string name, std::vector<VarKey> params, Trace trace,
               OriginationSets nonorig, OriginationSets uniqorig,
               std::vector<Lifted<AnnotationSpec>> annotations);

  const std::string& name() const { return name_; }
  const std::vector<VarKey>& params() const { return params_; }
  const Trace& trace() const { return trace_; }
  const OriginationSets& nonorig() const { return nonorig_; }
  const OriginationSets& uniqorig() const { return uniqorig_; }
  const std::vector<Lifted<AnnotationSpec>>& annotations() const {
    return annotations_;
  }
  bool is_listener() const;

 private:
  std::string name_;
  std::vector<VarKey> params_;
  Trace trace_;
  OriginationSets nonorig_;
  OriginationSets uniqorig_;
  std::vector<Lifted<AnnotationSpec>> annotations_;
};

inline constexpr std::string_view kListenerRole = "listener";

// listener(x: top) = <-x, +x>.
const RoleTemplate& listener_template();

class Protocol {
 public:
  // Throws ValidationError on duplicate or reserved role names.
  Protocol(std::string name, std::vector<RoleTemplate> roles,
           std::optional<std::size_t> boxes = std::nullopt);

  const std::string& name() const { return name_; }
  const std::vector<RoleTemplate>& roles() const { return roles_; }
  // Regular roles, then the listener; nullptr if absent.
  const RoleTemplate* find(std::string_view role) const;
  // Number of boxes from a (defstate (boxes N)) clause.
  std::optional<std::size_t> boxes() const { return boxes_; }

 private:
  std::string name_;
  std::vector<RoleTemplate> roles_;
  std::optional<std::size_t> boxes_;
};

// sigma(r). Every parameter must be bound to a ground term; throws
// ValidationError otherwise (SortError for ill-sorted bindings).
RoleItem instantiate(const RoleTemplate& role, const Substitution& sub);

// inst(Theta, s, item) for h = |Theta(s)|: h <= |C|, C|h = Theta(s), and the
// non/uniq assumptions at indices below h hold.
bool inst(const StrandSpace& space, std::size_t strand, const RoleItem& item);

// h <= |Theta(s)| and inst(Theta, s, item).
bool htin(const StrandSpace& space, std::size_t strand, std::size_t height,
          const RoleItem& item);

enum class AdversaryKind { kCreate, kPair, kSep, kEnc, kDec, kTag };

std::string_view adversary_name(AdversaryKind kind);
std::optional<AdversaryKind> parse_adversary(std::string_view name);
std::size_t adversary_arity(AdversaryKind kind);
bool is_reserved_role_name(std::string_view name);

// All generators in declaration order.
const std::vector<AdversaryKind>& adversary_roles();

// Role item of an adversary generator. create takes an atom, tag a tag
// constant, enc/dec a term and a key. Throws ValidationError or SortError on
// bad parameters.
RoleItem adversary_item(AdversaryKind kind, const std::vector<Term>& params);

// Parameters under which the generator's trace has the given prefix, or
// nullopt. Parameters the prefix does not determine get a fixed filler.
std::optional<std::vector<Term>> infer_adversary_params(AdversaryKind kind,
                                                        const Trace& trace);

// Listener item for a ground message; throws ValidationError otherwise.
RoleItem listener_role(const Term& message);

}  // namespace strandkit

#endif  // STRANDKIT_PROTOCOL_H_
