// Copyright 2025 The discoq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace discoq {

/// Atomic grammatical types: noun, prepositional phrase, sentence.
enum class BasicType : std::uint8_t { Noun, Prep, Sentence };

char basic_type_char(BasicType t);
BasicType basic_type_from_char(char c);

/// A basic type together with an adjoint iteration count. Negative counts
/// are left adjoints, positive counts right adjoints, zero the plain type.
struct SimpleType {
  BasicType base = BasicType::Noun;
  int adjoint = 0;

  SimpleType left_adjoint() const { return {base, adjoint - 1}; }
  SimpleType right_adjoint() const { return {base, adjoint + 1}; }

  std::string str() const;

  friend bool operator==(const SimpleType&, const SimpleType&) = default;
};

/// True iff `left` followed by `right` contracts under x·x^r <= 1 or
/// x^l·x <= 1, i.e. same base and the right adjoint index is one above.
bool contracts(const SimpleType& left, const SimpleType& right);

/// An element of the free pregroup: an ordered product of simple types.
/// The empty product is the monoid unit.
class PregroupType {
 public:
  PregroupType() = default;
  PregroupType(std::initializer_list<SimpleType> factors)
      : factors_(factors) {}
  explicit PregroupType(std::vector<SimpleType> factors)
      : factors_(std::move(factors)) {}

  /// Parses the surface syntax `n^r.s.n^l`: factors separated by `.`,
  /// adjoint suffixes `^l` / `^r` (repeatable, also accepted as `^ll`),
  /// `^0` or no suffix for the plain type.
  static PregroupType parse(std::string_view text);
  std::string str() const;

  const std::vector<SimpleType>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }

  friend PregroupType operator*(const PregroupType& a, const PregroupType& b);
  friend bool operator==(const PregroupType&, const PregroupType&) = default;

 private:
  std::vector<SimpleType> factors_;
};

enum class AdjointDirection { Left, Right };

/// Reverses factor order and shifts every adjoint index by -1 (left) or
/// +1 (right). The unit is self-dual.
PregroupType adjoint(const PregroupType& t, AdjointDirection direction);

/// Word-to-type assignments. Immutable after construction in practice; the
/// built-in lexicon covers the task vocabulary plus the full-form entries
/// used for reduction-only checks.
class Lexicon {
 public:
  Lexicon() = default;

  void insert(std::string word, PregroupType type);
  const PregroupType* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, PregroupType, std::less<>>& entries() const {
    return entries_;
  }

  static Lexicon builtin();
  /// Loads a JSON object mapping word -> type string (surface syntax).
  static Lexicon load(const std::string& path);

 private:
  std::map<std::string, PregroupType, std::less<>> entries_;
};

struct TypedWord {
  std::string word;
  PregroupType type;
};

/// A planar contraction of a type sequence. Cup endpoints are indices into
/// the flattened factor sequence of the input, left endpoint first.
struct Derivation {
  std::vector<TypedWord> input;
  std::vector<std::pair<int, int>> cups;
  PregroupType result;

  /// The input's factors laid out left to right.
  std::vector<SimpleType> flattened() const;
  /// Indices of factors not removed by any cup, left to right.
  std::vector<int> open_factors() const;
  bool is_sentence() const;
};

/// Contracts adjacent reducible pairs with a single left-to-right stack
/// pass and returns the full derivation, whatever the residue is.
Derivation contract_all(std::span<const TypedWord> words);

/// Like contract_all on anonymous words, but succeeds only when the residue
/// is exactly the sentence type s.
std::optional<Derivation> reduce(std::span<const PregroupType> types);

std::vector<std::string> tokenize(std::string_view caption);

/// Splits the caption on whitespace, assigns types from the lexicon, and
/// reduces. Throws ParseError on unknown words or when the residue is not s.
Derivation parse(std::string_view caption, const Lexicon& lexicon);

}  // namespace discoq
