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

#include "strandkit/protocol.h"

#include <algorithm>
#include <array>
#include <sstream>

namespace strandkit {

namespace {

std::string at_index(const std::string& role, std::size_t i) {
  return role + "[" + std::to_string(i) + "]";
}

OriginationSets empty_sets(std::size_t n) { return OriginationSets(n); }

std::vector<Lifted<Annotation>> no_annotations(std::size_t n) {
  return std::vector<Lifted<Annotation>>(n);
}

void require_ground(const std::vector<Term>& params, std::string_view role) {
  for (const Term& t : params) {
    if (!is_ground(t)) {
      throw ValidationError(std::string(role) +
                            " parameter is not ground: " + to_string(t));
    }
  }
}

bool is_key(const Term& t) {
  Sort s = sort_of(t);
  return s == Sort::kAKey || s == Sort::kSKey;
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const Annotation& a) {
  if (const auto* ts = std::get_if<TransitionSet>(&a)) return os << *ts;
  return os << "(opaque " << std::get<OpaqueAnnotation>(a).text << ")";
}

std::ostream& operator<<(std::ostream& os, const AnnotationSpec& a) {
  if (const auto* enc = std::get_if<StateEncoding>(&a)) {
    return os << (*enc == StateEncoding::kStep ? "(state-step)"
                                               : "(state-issue)");
  }
  return os << "(opaque " << std::get<OpaqueAnnotation>(a).text << ")";
}

std::optional<std::size_t> encoded_state(const Term& message) {
  switch (message.kind()) {
    case Term::Kind::kTag: return message.index();
    case Term::Kind::kEnc: return encoded_state(message.plaintext());
    case Term::Kind::kPair: return encoded_state(message.left());
    default: return std::nullopt;
  }
}

RoleItem::RoleItem(std::string role_name, Trace trace_in,
                   OriginationSets nonorig_in, OriginationSets uniqorig_in,
                   std::vector<Lifted<Annotation>> annotations_in)
    : role(std::move(role_name)),
      trace(std::move(trace_in)),
      nonorig(std::move(nonorig_in)),
      uniqorig(std::move(uniqorig_in)),
      annotations(std::move(annotations_in)) {
  if (nonorig.size() != trace.size() || uniqorig.size() != trace.size() ||
      annotations.size() != trace.size()) {
    throw ValidationError("role item " + role +
                          ": trace, non, uniq and annotation lengths differ");
  }
  for (const auto* sets : {&nonorig, &uniqorig}) {
    for (const auto& set : *sets) {
      for (const Term& t : set) {
        if (!is_atom(t)) {
          throw ValidationError("role item " + role +
                                ": origination assumption on non-atom " +
                                to_string(t));
        }
      }
    }
  }
}

RoleTemplate::RoleTemplate(std::string name, std::vector<VarKey> params,
                           Trace trace, OriginationSets nonorig,
                           OriginationSets uniqorig,
                           std::vector<Lifted<AnnotationSpec>> annotations)
    : name_(std::move(name)),
      params_(std::move(params)),
      trace_(std::move(trace)),
      nonorig_(std::move(nonorig)),
      uniqorig_(std::move(uniqorig)),
      annotations_(std::move(annotations)) {
  const std::size_t n = trace_.size();
  if (nonorig_.empty()) nonorig_.resize(n);
  if (uniqorig_.empty()) uniqorig_.resize(n);
  if (annotations_.empty()) annotations_.resize(n);
  if (nonorig_.size() != n || uniqorig_.size() != n ||
      annotations_.size() != n) {
    throw ValidationError("role " + name_ +
                          ": trace, non, uniq and annotation lengths differ");
  }
  std::set<VarKey> declared(params_.begin(), params_.end());
  if (declared.size() != params_.size()) {
    throw ValidationError("role " + name_ + ": duplicate parameter");
  }
  auto check_vars = [&](const Term& t) {
    for (const VarKey& v : variables(t)) {
      if (!declared.count(v)) {
        throw ValidationError("role " + name_ + ": variable " + v.name +
                              " is not a parameter");
      }
    }
  };
  for (const Event& e : trace_) check_vars(e.message);
  for (const auto* sets : {&nonorig_, &uniqorig_}) {
    for (const auto& set : *sets) {
      for (const Term& t : set) {
        if (!is_atom(t)) {
          throw ValidationError("role " + name_ +
                                ": origination assumption on non-atom " +
                                to_string(t));
        }
        check_vars(t);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = annotations_[i];
    if (a.is_bottom() || !std::holds_alternative<StateEncoding>(a.down())) {
      continue;
    }
    if (i == 0 || !trace_[i].outbound() || !trace_[i - 1].inbound()) {
      throw ValidationError(at_index(name_, i) +
                            ": state annotations belong on the outbound "
                            "half of an inbound/outbound pair");
    }
  }
}

bool RoleTemplate::is_listener() const { return name_ == kListenerRole; }

const RoleTemplate& listener_template() {
  static const RoleTemplate listener = [] {
    Term x = Term::var("x", Sort::kTop);
    return RoleTemplate(std::string(kListenerRole), {key_of(x)},
                        Trace({Event::recv(x), Event::send(x)}), {}, {}, {});
  }();
  return listener;
}

Protocol::Protocol(std::string name, std::vector<RoleTemplate> roles,
                   std::optional<std::size_t> boxes)
    : name_(std::move(name)), roles_(std::move(roles)), boxes_(boxes) {
  std::set<std::string> seen;
  for (const RoleTemplate& r : roles_) {
    if (is_reserved_role_name(r.name())) {
      throw ValidationError("protocol " + name_ + ": role name " + r.name() +
                            " is reserved");
    }
    if (!seen.insert(r.name()).second) {
      throw ValidationError("protocol " + name_ + ": duplicate role " +
                            r.name());
    }
  }
  if (boxes_ && *boxes_ == 0) {
    throw ValidationError("protocol " + name_ + ": boxes must be at least 1");
  }
}

const RoleTemplate* Protocol::find(std::string_view role) const {
  for (const RoleTemplate& r : roles_) {
    if (r.name() == role) return &r;
  }
  if (role == kListenerRole) return &listener_template();
  return nullptr;
}

RoleItem instantiate(const RoleTemplate& role, const Substitution& sub) {
  for (const VarKey& p : role.params()) {
    const Term* image = sub.find(p);
    if (image == nullptr) {
      throw ValidationError("instantiating " + role.name() +
                            ": unbound parameter " + p.name);
    }
    if (!is_ground(*image)) {
      throw ValidationError("instantiating " + role.name() + ": parameter " +
                            p.name + " bound to non-ground " +
                            to_string(*image));
    }
    if (!sort_leq(sort_of(*image), p.sort)) {
      throw SortError("instantiating " + role.name() + ": parameter " +
                      p.name + " has the wrong sort");
    }
  }
  Trace trace = apply(sub, role.trace());
  auto map_sets = [&](const OriginationSets& sets) {
    OriginationSets out;
    for (const auto& set : sets) {
      std::set<Term> mapped;
      for (const Term& t : set) mapped.insert(apply(sub, t));
      out.push_back(std::move(mapped));
    }
    return out;
  };
  std::vector<Lifted<Annotation>> annotations;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& spec = role.annotations()[i];
    if (spec.is_bottom()) {
      annotations.push_back(Lifted<Annotation>::bottom());
      continue;
    }
    if (const auto* opaque = std::get_if<OpaqueAnnotation>(&spec.down())) {
      annotations.push_back(Lifted<Annotation>::up(*opaque));
      continue;
    }
    auto after = encoded_state(trace[i].message);
    if (!after) {
      throw ValidationError(at_index(role.name(), i) +
                            ": message encodes no state");
    }
    if (std::get<StateEncoding>(spec.down()) == StateEncoding::kIssue) {
      annotations.push_back(
          Lifted<Annotation>::up(TransitionSet::ends_at(*after)));
      continue;
    }
    auto before = encoded_state(trace[i - 1].message);
    if (!before) {
      throw ValidationError(at_index(role.name(), i - 1) +
                            ": message encodes no state");
    }
    annotations.push_back(Lifted<Annotation>::up(
        TransitionSet::explicit_pairs({{*before, *after}})));
  }
  return RoleItem(role.name(), std::move(trace), map_sets(role.nonorig()),
                  map_sets(role.uniqorig()), std::move(annotations));
}

bool inst(const StrandSpace& space, std::size_t strand, const RoleItem& item) {
  if (strand >= space.size()) return false;
  const Trace& actual = space.trace(strand);
  const std::size_t h = actual.size();
  if (h > item.trace.size()) return false;
  for (std::size_t i = 0; i < h; ++i) {
    if (!(item.trace[i] == actual[i])) return false;
  }
  for (std::size_t i = 0; i < h; ++i) {
    for (const Term& t : item.nonorig[i]) {
      if (!non_originating(space, t)) return false;
    }
    for (const Term& t : item.uniqorig[i]) {
      if (!uniquely_originates(space, t, Node{strand, i})) return false;
    }
  }
  return true;
}

bool htin(const StrandSpace& space, std::size_t strand, std::size_t height,
          const RoleItem& item) {
  return strand < space.size() && height <= space.trace(strand).size() &&
         inst(space, strand, item);
}

std::string_view adversary_name(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kCreate: return "create";
    case AdversaryKind::kPair: return "pair";
    case AdversaryKind::kSep: return "sep";
    case AdversaryKind::kEnc: return "enc";
    case AdversaryKind::kDec: return "dec";
    case AdversaryKind::kTag: return "tag";
  }
  return "?";
}

const std::vector<AdversaryKind>& adversary_roles() {
  static const std::vector<AdversaryKind> kinds = {
      AdversaryKind::kCreate, AdversaryKind::kPair, AdversaryKind::kSep,
      AdversaryKind::kEnc,    AdversaryKind::kDec,  AdversaryKind::kTag};
  return kinds;
}

std::optional<AdversaryKind> parse_adversary(std::string_view name) {
  for (AdversaryKind k : adversary_roles()) {
    if (adversary_name(k) == name) return k;
  }
  return std::nullopt;
}

std::size_t adversary_arity(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kCreate:
    case AdversaryKind::kTag: return 1;
    default: return 2;
  }
}

bool is_reserved_role_name(std::string_view name) {
  return name == kListenerRole || parse_adversary(name).has_value();
}

RoleItem adversary_item(AdversaryKind kind, const std::vector<Term>& params) {
  const std::string name(adversary_name(kind));
  if (params.size() != adversary_arity(kind)) {
    throw ValidationError(name + " takes " +
                          std::to_string(adversary_arity(kind)) +
                          " parameters");
  }
  require_ground(params, name);
  std::vector<Event> events;
  switch (kind) {
    case AdversaryKind::kCreate:
      if (!is_atom(params[0])) {
        throw ValidationError("create is restricted to atoms: " +
                              to_string(params[0]));
      }
      events = {Event::send(params[0])};
      break;
    case AdversaryKind::kTag:
      if (params[0].kind() != Term::Kind::kTag) {
        throw ValidationError("tag emits tag constants only: " +
                              to_string(params[0]));
      }
      events = {Event::send(params[0])};
      break;
    case AdversaryKind::kPair:
      events = {Event::recv(params[0]), Event::recv(params[1]),
                Event::send(Term::pair(params[0], params[1]))};
      break;
    case AdversaryKind::kSep:
      events = {Event::recv(Term::pair(params[0], params[1])),
                Event::send(params[0]), Event::send(params[1])};
      break;
    case AdversaryKind::kEnc:
      if (!is_key(params[1])) {
        throw SortError("enc needs a key: " + to_string(params[1]));
      }
      events = {Event::recv(params[0]), Event::recv(params[1]),
                Event::send(Term::enc(params[0], params[1]))};
      break;
    case AdversaryKind::kDec:
      if (!is_key(params[1])) {
        throw SortError("dec needs a key: " + to_string(params[1]));
      }
      events = {Event::recv(Term::enc(params[0], params[1])),
                Event::recv(invert_key(params[1])), Event::send(params[0])};
      break;
  }
  const std::size_t n = events.size();
  return RoleItem(name, Trace(std::move(events)), empty_sets(n), empty_sets(n),
                  no_annotations(n));
}

std::optional<std::vector<Term>> infer_adversary_params(AdversaryKind kind,
                                                        const Trace& trace) {
  const Event& first = trace[0];
  std::vector<Term> params;
  switch (kind) {
    case AdversaryKind::kCreate:
      if (!first.outbound() || !is_atom(first.message)) return std::nullopt;
      params = {first.message};
      break;
    case AdversaryKind::kTag:
      if (!first.outbound() || first.message.kind() != Term::Kind::kTag) {
        return std::nullopt;
      }
      params = {first.message};
      break;
    case AdversaryKind::kPair:
      if (!first.inbound()) return std::nullopt;
      params = {first.message,
                trace.size() > 1 ? trace[1].message : first.message};
      break;
    case AdversaryKind::kSep:
      if (!first.inbound() || !first.message.is_pair()) return std::nullopt;
      params = {first.message.left(), first.message.right()};
      break;
    case AdversaryKind::kEnc:
      if (!first.inbound()) return std::nullopt;
      if (trace.size() > 1) {
        if (!is_key(trace[1].message)) return std::nullopt;
        params = {first.message, trace[1].message};
      } else {
        params = {first.message, Term::skey(0)};
      }
      break;
    case AdversaryKind::kDec:
      if (!first.inbound() || !first.message.is_enc()) return std::nullopt;
      params = {first.message.plaintext(), first.message.key()};
      break;
  }
  for (const Term& p : params) {
    if (!is_ground(p)) return std::nullopt;
  }
  return params;
}

RoleItem listener_role(const Term& message) {
  if (!is_ground(message)) {
    throw ValidationError("listener message must be ground: " +
                          to_string(message));
  }
  Substitution sub;
  sub.bind(listener_template().params().front(), message);
  return instantiate(listener_template(), sub);
}

}  // namespace strandkit
