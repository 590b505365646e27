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

#include "strandkit/algebra.h"

#include <sstream>
#include <utility>

namespace strandkit {

struct Term::Rep {
  Kind kind;
  std::size_t index = 0;
  bool inverted = false;
  std::string name;
  Sort sort = Sort::kTop;
  std::optional<Term> first;
  std::optional<Term> second;
};

bool sort_leq(Sort lower, Sort upper) {
  return lower == upper || upper == Sort::kTop;
}

std::string_view sort_name(Sort sort) {
  switch (sort) {
    case Sort::kTop: return "top";
    case Sort::kAKey: return "akey";
    case Sort::kSKey: return "skey";
    case Sort::kData: return "data";
  }
  return "?";
}

std::optional<Sort> parse_sort(std::string_view name) {
  if (name == "top" || name == "mesg") return Sort::kTop;
  if (name == "akey") return Sort::kAKey;
  if (name == "skey") return Sort::kSKey;
  if (name == "data") return Sort::kData;
  return std::nullopt;
}

Term Term::akey(std::size_t index, bool inverted) {
  return Term(std::make_shared<const Rep>(
      Rep{Kind::kAConst, index, inverted, {}, Sort::kAKey, {}, {}}));
}

Term Term::skey(std::size_t index) {
  return Term(std::make_shared<const Rep>(
      Rep{Kind::kSConst, index, false, {}, Sort::kSKey, {}, {}}));
}

Term Term::data(std::size_t index) {
  return Term(std::make_shared<const Rep>(
      Rep{Kind::kDConst, index, false, {}, Sort::kData, {}, {}}));
}

Term Term::tag(std::size_t index) {
  return Term(std::make_shared<const Rep>(
      Rep{Kind::kTag, index, false, {}, Sort::kTop, {}, {}}));
}

Term Term::var(std::string name, Sort sort, bool inverted) {
  if (inverted && sort != Sort::kAKey) {
    throw SortError("only asymmetric-key variables can be inverted: " + name);
  }
  return Term(std::make_shared<const Rep>(
      Rep{Kind::kVar, 0, inverted, std::move(name), sort, {}, {}}));
}

Term Term::pair(Term left, Term right) {
  return Term(std::make_shared<const Rep>(Rep{Kind::kPair, 0, false, {},
                                              Sort::kTop, std::move(left),
                                              std::move(right)}));
}

Term Term::enc(Term plaintext, Term key) {
  Sort ks = sort_of(key);
  if (ks != Sort::kAKey && ks != Sort::kSKey) {
    throw SortError("encryption key must be a key, got " + to_string(key));
  }
  return Term(std::make_shared<const Rep>(Rep{Kind::kEnc, 0, false, {},
                                              Sort::kTop, std::move(plaintext),
                                              std::move(key)}));
}

Term::Kind Term::kind() const { return rep_->kind; }
std::size_t Term::index() const { return rep_->index; }
bool Term::inverted() const { return rep_->inverted; }
const std::string& Term::name() const { return rep_->name; }
Sort Term::declared_sort() const { return rep_->sort; }
const Term& Term::left() const { return *rep_->first; }
const Term& Term::right() const { return *rep_->second; }
const Term& Term::plaintext() const { return *rep_->first; }
const Term& Term::key() const { return *rep_->second; }

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.rep_ == b.rep_) return std::strong_ordering::equal;
  const Term::Rep& x = *a.rep_;
  const Term::Rep& y = *b.rep_;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  switch (x.kind) {
    case Term::Kind::kAConst:
      if (auto c = x.index <=> y.index; c != 0) return c;
      return x.inverted <=> y.inverted;
    case Term::Kind::kSConst:
    case Term::Kind::kDConst:
    case Term::Kind::kTag:
      return x.index <=> y.index;
    case Term::Kind::kVar:
      if (auto c = x.name <=> y.name; c != 0) return c;
      if (auto c = x.sort <=> y.sort; c != 0) return c;
      return x.inverted <=> y.inverted;
    case Term::Kind::kPair:
    case Term::Kind::kEnc:
      if (auto c = *x.first <=> *y.first; c != 0) return c;
      return *x.second <=> *y.second;
  }
  return std::strong_ordering::equal;
}

bool operator==(const Term& a, const Term& b) { return (a <=> b) == 0; }

Sort sort_of(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kAConst: return Sort::kAKey;
    case Term::Kind::kSConst: return Sort::kSKey;
    case Term::Kind::kDConst: return Sort::kData;
    case Term::Kind::kVar: return t.declared_sort();
    default: return Sort::kTop;
  }
}

bool is_ground(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kVar: return false;
    case Term::Kind::kPair: return is_ground(t.left()) && is_ground(t.right());
    case Term::Kind::kEnc:
      return is_ground(t.plaintext()) && is_ground(t.key());
    default: return true;
  }
}

bool is_atom(const Term& t) { return sort_of(t) != Sort::kTop; }

Term invert_key(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kAConst: return Term::akey(t.index(), !t.inverted());
    case Term::Kind::kSConst: return t;
    case Term::Kind::kVar:
      if (t.declared_sort() == Sort::kAKey) {
        return Term::var(t.name(), Sort::kAKey, !t.inverted());
      }
      if (t.declared_sort() == Sort::kSKey) return t;
      break;
    default: break;
  }
  throw SortError("invk applied to a non-key: " + to_string(t));
}

bool is_canonical(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kVar:
      return !t.inverted() || t.declared_sort() == Sort::kAKey;
    case Term::Kind::kPair:
      return is_canonical(t.left()) && is_canonical(t.right());
    case Term::Kind::kEnc: {
      Sort ks = sort_of(t.key());
      return (ks == Sort::kAKey || ks == Sort::kSKey) &&
             is_canonical(t.plaintext()) && is_canonical(t.key());
    }
    default: return true;
  }
}

bool carried_by_free(const Term& t0, const Term& t1) {
  if (t0 == t1) return true;
  switch (t1.kind()) {
    case Term::Kind::kPair:
      return carried_by_free(t0, t1.left()) || carried_by_free(t0, t1.right());
    case Term::Kind::kEnc: return carried_by_free(t0, t1.plaintext());
    default: return false;
  }
}

bool carried_by(const Term& t0, const Term& t1) {
  if (!is_ground(t0) || !is_ground(t1)) {
    throw ValidationError("carried_by expects ground terms");
  }
  return carried_by_free(t0, t1);
}

VarKey key_of(const Term& var) {
  if (!var.is_var()) throw ValidationError("not a variable: " + to_string(var));
  return VarKey{var.name(), var.declared_sort()};
}

Term as_term(const VarKey& key) { return Term::var(key.name, key.sort); }

void collect_variables(const Term& t, std::set<VarKey>& out) {
  switch (t.kind()) {
    case Term::Kind::kVar: out.insert(key_of(t)); break;
    case Term::Kind::kPair:
      collect_variables(t.left(), out);
      collect_variables(t.right(), out);
      break;
    case Term::Kind::kEnc:
      collect_variables(t.plaintext(), out);
      collect_variables(t.key(), out);
      break;
    default: break;
  }
}

std::set<VarKey> variables(const Term& t) {
  std::set<VarKey> out;
  collect_variables(t, out);
  return out;
}

void Substitution::bind(const VarKey& key, Term image) {
  if (!sort_leq(sort_of(image), key.sort)) {
    std::ostringstream msg;
    msg << "cannot bind " << key.name << ":" << key.sort << " to "
        << to_string(image) << ":" << sort_of(image);
    throw SortError(msg.str());
  }
  bindings_.insert_or_assign(key, std::move(image));
}

const Term* Substitution::find(const VarKey& key) const {
  auto it = bindings_.find(key);
  return it == bindings_.end() ? nullptr : &it->second;
}

Substitution Substitution::then(const Substitution& outer) const {
  Substitution out;
  for (const auto& [key, image] : bindings_) out.bind(key, apply(outer, image));
  for (const auto& [key, image] : outer.bindings_) {
    if (!contains(key)) out.bind(key, image);
  }
  return out;
}

Term apply(const Substitution& sub, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kVar: {
      const Term* image = sub.find(key_of(t));
      if (image == nullptr) return t;
      return t.inverted() ? invert_key(*image) : *image;
    }
    case Term::Kind::kPair:
      return Term::pair(apply(sub, t.left()), apply(sub, t.right()));
    case Term::Kind::kEnc:
      return Term::enc(apply(sub, t.plaintext()), apply(sub, t.key()));
    default: return t;
  }
}

namespace {

bool match_into(const Term& pattern, const Term& target, Substitution& theta) {
  switch (pattern.kind()) {
    case Term::Kind::kVar: {
      Term image = target;
      if (pattern.inverted()) {
        if (sort_of(target) != Sort::kAKey) return false;
        image = invert_key(target);
      }
      if (!sort_leq(sort_of(image), pattern.declared_sort())) return false;
      VarKey key = key_of(pattern);
      if (const Term* bound = theta.find(key)) return *bound == image;
      theta.bind(key, std::move(image));
      return true;
    }
    case Term::Kind::kPair:
      return target.is_pair() && match_into(pattern.left(), target.left(), theta) &&
             match_into(pattern.right(), target.right(), theta);
    case Term::Kind::kEnc:
      return target.is_enc() &&
             match_into(pattern.plaintext(), target.plaintext(), theta) &&
             match_into(pattern.key(), target.key(), theta);
    default: return pattern == target;
  }
}

void render(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kAConst:
      os << 'a' << t.index() << (t.inverted() ? "^-1" : "");
      break;
    case Term::Kind::kSConst: os << 's' << t.index(); break;
    case Term::Kind::kDConst: os << 'd' << t.index(); break;
    case Term::Kind::kTag: os << 'g' << t.index(); break;
    case Term::Kind::kVar: os << t.name() << (t.inverted() ? "^-1" : ""); break;
    case Term::Kind::kPair:
      os << '(';
      render(os, t.left());
      os << ", ";
      render(os, t.right());
      os << ')';
      break;
    case Term::Kind::kEnc:
      os << '{';
      render(os, t.plaintext());
      os << '}';
      render(os, t.key());
      break;
  }
}

}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& target,
                                  const Substitution& seed) {
  Substitution theta = seed;
  if (!match_into(pattern, target, theta)) return std::nullopt;
  return theta;
}

std::string to_string(const Term& t) {
  std::ostringstream os;
  render(os, t);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  render(os, t);
  return os;
}

std::ostream& operator<<(std::ostream& os, Sort sort) {
  return os << sort_name(sort);
}

}  // namespace strandkit
