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

#include "discoq/pregroup.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "discoq/errors.hpp"
#include "json.hpp"

namespace discoq {

char basic_type_char(BasicType t) {
  switch (t) {
    case BasicType::Noun:
      return 'n';
    case BasicType::Prep:
      return 'p';
    case BasicType::Sentence:
      return 's';
  }
  throw ValidationError("unknown basic type");
}

BasicType basic_type_from_char(char c) {
  switch (c) {
    case 'n':
      return BasicType::Noun;
    case 'p':
      return BasicType::Prep;
    case 's':
      return BasicType::Sentence;
    default:
      throw ValidationError(std::string("unknown basic type '") + c + "'");
  }
}

std::string SimpleType::str() const {
  std::string out(1, basic_type_char(base));
  if (adjoint != 0) {
    out += '^';
    out.append(static_cast<std::size_t>(std::abs(adjoint)),
               adjoint < 0 ? 'l' : 'r');
  }
  return out;
}

bool contracts(const SimpleType& left, const SimpleType& right) {
  return left.base == right.base && right.adjoint == left.adjoint + 1;
}

PregroupType PregroupType::parse(std::string_view text) {
  std::vector<SimpleType> factors;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('.', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view tok = text.substr(pos, end - pos);
    if (tok.empty()) {
      throw ValidationError("empty factor in type string '" +
                            std::string(text) + "'");
    }
    SimpleType st{basic_type_from_char(tok[0]), 0};
    for (std::size_t i = 1; i < tok.size(); ++i) {
      switch (tok[i]) {
        case '^':
          break;
        case 'l':
          st.adjoint -= 1;
          break;
        case 'r':
          st.adjoint += 1;
          break;
        case '0':
          break;
        default:
          throw ValidationError("bad adjoint suffix in factor '" +
                                std::string(tok) + "'");
      }
    }
    factors.push_back(st);
    pos = end + 1;
  }
  return PregroupType(std::move(factors));
}

std::string PregroupType::str() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += '.';
    out += factors_[i].str();
  }
  return out;
}

PregroupType operator*(const PregroupType& a, const PregroupType& b) {
  std::vector<SimpleType> factors = a.factors_;
  factors.insert(factors.end(), b.factors_.begin(), b.factors_.end());
  return PregroupType(std::move(factors));
}

PregroupType adjoint(const PregroupType& t, AdjointDirection direction) {
  const int shift = direction == AdjointDirection::Left ? -1 : +1;
  std::vector<SimpleType> factors(t.factors().rbegin(), t.factors().rend());
  for (auto& f : factors) f.adjoint += shift;
  return PregroupType(std::move(factors));
}

void Lexicon::insert(std::string word, PregroupType type) {
  entries_.insert_or_assign(std::move(word), std::move(type));
}

const PregroupType* Lexicon::find(std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::builtin() {
  Lexicon lex;
  for (const char* shape : {"cylinder", "sphere", "cube", "cone"}) {
    lex.insert(shape, PregroupType::parse("n"));
  }
  lex.insert("isLeftOf", PregroupType::parse("n^r.s.n^l"));
  lex.insert("isRightOf", PregroupType::parse("n^r.s.n^l"));
  // Full-form entries, used only for grammatical reductions.
  lex.insert("the", PregroupType::parse("n.n^l"));
  lex.insert("is", PregroupType::parse("n^r.s.p^l"));
  lex.insert("on", PregroupType::parse("p.n^l"));
  lex.insert("to", PregroupType::parse("p.n^l"));
  lex.insert("of", PregroupType::parse("p.n^l"));
  lex.insert("left", PregroupType::parse("n.p^l"));
  lex.insert("right", PregroupType::parse("n.p^l"));
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad lexicon JSON in " + path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError("lexicon file must hold a JSON object: " + path);
  }
  Lexicon lex;
  for (const auto& [word, type] : j.items()) {
    if (!type.is_string()) {
      throw ValidationError("lexicon entry for '" + word +
                            "' must be a type string");
    }
    lex.insert(word, PregroupType::parse(type.get<std::string>()));
  }
  return lex;
}

std::vector<SimpleType> Derivation::flattened() const {
  std::vector<SimpleType> out;
  for (const auto& w : input) {
    out.insert(out.end(), w.type.factors().begin(), w.type.factors().end());
  }
  return out;
}

std::vector<int> Derivation::open_factors() const {
  const auto flat = flattened();
  std::vector<bool> cupped(flat.size(), false);
  for (const auto& [a, b] : cups) {
    cupped[static_cast<std::size_t>(a)] = true;
    cupped[static_cast<std::size_t>(b)] = true;
  }
  std::vector<int> open;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (!cupped[i]) open.push_back(static_cast<int>(i));
  }
  return open;
}

bool Derivation::is_sentence() const {
  return result == PregroupType{{BasicType::Sentence, 0}};
}

Derivation contract_all(std::span<const TypedWord> words) {
  Derivation d;
  d.input.assign(words.begin(), words.end());
  const auto flat = d.flattened();

  // Left-to-right stack pass: an incoming factor cancels the top of the
  // stack when they form a reducible adjacent pair, otherwise it is pushed.
  std::vector<int> stack;
  for (int i = 0; i < static_cast<int>(flat.size()); ++i) {
    if (!stack.empty() &&
        contracts(flat[static_cast<std::size_t>(stack.back())],
                  flat[static_cast<std::size_t>(i)])) {
      d.cups.emplace_back(stack.back(), i);
      stack.pop_back();
    } else {
      stack.push_back(i);
    }
  }
  std::sort(d.cups.begin(), d.cups.end());

  std::vector<SimpleType> residue;
  residue.reserve(stack.size());
  for (int i : stack) residue.push_back(flat[static_cast<std::size_t>(i)]);
  d.result = PregroupType(std::move(residue));
  return d;
}

std::optional<Derivation> reduce(std::span<const PregroupType> types) {
  if (types.empty()) {
    throw ValidationError("reduce requires a non-empty type sequence");
  }
  std::vector<TypedWord> words;
  words.reserve(types.size());
  for (const auto& t : types) words.push_back({"", t});
  Derivation d = contract_all(words);
  if (!d.is_sentence()) return std::nullopt;
  return d;
}

std::vector<std::string> tokenize(std::string_view caption) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < caption.size()) {
    while (i < caption.size() &&
           std::isspace(static_cast<unsigned char>(caption[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < caption.size() &&
           !std::isspace(static_cast<unsigned char>(caption[i]))) {
      ++i;
    }
    if (i > start) words.emplace_back(caption.substr(start, i - start));
  }
  return words;
}

Derivation parse(std::string_view caption, const Lexicon& lexicon) {
  const auto tokens = tokenize(caption);
  if (tokens.empty()) throw ParseError("empty caption");

  std::vector<TypedWord> words;
  words.reserve(tokens.size());
  for (const auto& tok : tokens) {
    const PregroupType* type = lexicon.find(tok);
    if (type == nullptr) throw ParseError("unknown word: " + tok);
    words.push_back({tok, *type});
  }

  Derivation d = contract_all(words);
  if (!d.is_sentence()) {
    throw ParseError("caption does not reduce to s, residue: " +
                     d.result.str());
  }
  return d;
}

}  // namespace discoq
