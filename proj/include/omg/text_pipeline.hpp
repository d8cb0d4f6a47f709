#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omg {

// Vocabulary for one attribute (colors or vehicle types). Entries may span
// several words ("pickup truck"); matching is case-insensitive and prefers the
// longest entry at a position.
class AttributeLexicon {
 public:
  // `display` keeps its casing for prompt rendering; the canonical key is its
  // lowercase form.
  void add(std::string_view display);
  void add_alias(std::string_view alias, std::string_view canonical);

  // Canonical key of the leftmost entry found in `tokens`.
  std::optional<std::string> first_match(const std::vector<std::string>& tokens) const;

  // Display form for a canonical key ("suv" -> "SUV").
  std::string display(const std::string& canonical) const;
  bool contains(const std::string& canonical) const;

  // Canonical keys in insertion order.
  std::vector<std::string> canonical_keys() const;

 private:
  struct Entry {
    std::vector<std::string> words;
    std::string canonical;
  };
  std::vector<Entry> entries_;
  std::vector<std::pair<std::string, std::string>> displays_;
  std::size_t max_words_ = 1;
};

struct Lexicons {
  AttributeLexicon colors;
  AttributeLexicon types;
};

const Lexicons& default_lexicons();

// Text format: "[colors]" and "[types]" section headers, one entry per line,
// "alias=canonical" for aliases, '#' starts a comment.
Lexicons parse_lexicons(std::string_view text);
Lexicons load_lexicons(const std::filesystem::path& path);

struct AttributePair {
  std::optional<std::string> color;
  std::optional<std::string> vtype;

  bool operator==(const AttributePair&) const = default;
};

// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(std::string_view text);

AttributePair extract_color_type(std::string_view sentence,
                                 const Lexicons& lex = default_lexicons());

// Per field: most frequent present value, ties to the earliest sentence.
AttributePair vote_attributes(const std::array<AttributePair, 3>& pairs);

std::string generate_prompt(const AttributePair& attrs,
                            const Lexicons& lex = default_lexicons());

std::string build_global_text(const std::array<std::string, 3>& sentences);

struct QueryTexts {
  std::string global_text;
  std::array<std::string, 3> local_texts;
  std::string prompt_text;
  AttributePair attributes;
};

QueryTexts build_query_texts(const std::array<std::string, 3>& sentences,
                             const Lexicons& lex = default_lexicons());

uint64_t stable_hash64(std::string_view s);

// Signed hashed bag-of-words, L2-normalized. Empty text gives zeros.
std::vector<double> featurize_text(std::string_view text, int dim);

}  // namespace omg
