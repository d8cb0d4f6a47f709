#include "omg/text_pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "omg/tensor_io.hpp"
#include "omg/types.hpp"

namespace omg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void AttributeLexicon::add(std::string_view display) {
  const std::string key = lower(trim(display));
  if (key.empty()) return;
  add_alias(key, key);
  for (auto& [k, d] : displays_)
    if (k == key) {
      d = trim(display);
      return;
    }
  displays_.emplace_back(key, trim(display));
}

void AttributeLexicon::add_alias(std::string_view alias, std::string_view canonical) {
  Entry e{tokenize(alias), lower(trim(canonical))};
  if (e.words.empty() || e.canonical.empty()) return;
  max_words_ = std::max(max_words_, e.words.size());
  for (auto& existing : entries_)
    if (existing.words == e.words) {
      existing.canonical = e.canonical;
      return;
    }
  entries_.push_back(std::move(e));
}

std::optional<std::string> AttributeLexicon::first_match(
    const std::vector<std::string>& tokens) const {
  for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
    const std::size_t longest = std::min(max_words_, tokens.size() - pos);
    for (std::size_t n = longest; n >= 1; --n) {
      for (const auto& e : entries_) {
        if (e.words.size() != n) continue;
        if (std::equal(e.words.begin(), e.words.end(),
                       tokens.begin() + static_cast<std::ptrdiff_t>(pos)))
          return e.canonical;
      }
    }
  }
  return std::nullopt;
}

std::string AttributeLexicon::display(const std::string& canonical) const {
  for (const auto& [k, d] : displays_)
    if (k == canonical) return d;
  return canonical;
}

bool AttributeLexicon::contains(const std::string& canonical) const {
  return std::any_of(displays_.begin(), displays_.end(),
                     [&](const auto& kd) { return kd.first == canonical; });
}

std::vector<std::string> AttributeLexicon::canonical_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, d] : displays_) out.push_back(k);
  return out;
}

namespace {

constexpr std::string_view kDefaultLexiconText = R"(# Default attribute vocabularies.
[colors]
black
white
gray
grey=gray
silver
red
blue
green
brown
maroon
gold
yellow
orange
purple

[types]
sedan
SUV
truck
pickup
pickup truck
van
minivan
wagon
hatchback
coupe
jeep
bus
cargo truck
)";

}  // namespace

Lexicons parse_lexicons(std::string_view text) {
  Lexicons lex;
  AttributeLexicon* section = nullptr;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line(text.substr(start, end - start));
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string l = lower(line);
    if (l == "[colors]") {
      section = &lex.colors;
    } else if (l == "[types]") {
      section = &lex.types;
    } else if (section == nullptr) {
      throw DataError("lexicon line " + std::to_string(line_no) +
                      ": entry before [colors] or [types] header");
    } else if (auto eq = line.find('='); eq != std::string::npos) {
      section->add_alias(line.substr(0, eq), line.substr(eq + 1));
    } else {
      section->add(line);
    }
  }
  return lex;
}

Lexicons load_lexicons(const std::filesystem::path& path) {
  return parse_lexicons(read_file(path));
}

const Lexicons& default_lexicons() {
  static const Lexicons lex = parse_lexicons(kDefaultLexiconText);
  return lex;
}

AttributePair extract_color_type(std::string_view sentence, const Lexicons& lex) {
  const auto tokens = tokenize(sentence);
  return {lex.colors.first_match(tokens), lex.types.first_match(tokens)};
}

namespace {

std::optional<std::string> vote_field(
    const std::array<std::optional<std::string>, 3>& values) {
  std::optional<std::string> best;
  int best_count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    const int count = static_cast<int>(std::count(values.begin(), values.end(), values[i]));
    // Strictly greater keeps the earliest value on ties.
    if (count > best_count) {
      best = values[i];
      best_count = count;
    }
  }
  return best;
}

}  // namespace

AttributePair vote_attributes(const std::array<AttributePair, 3>& pairs) {
  return {vote_field({pairs[0].color, pairs[1].color, pairs[2].color}),
          vote_field({pairs[0].vtype, pairs[1].vtype, pairs[2].vtype})};
}

std::string generate_prompt(const AttributePair& attrs, const Lexicons& lex) {
  std::string out = "This is a ";
  if (attrs.color) out += lex.colors.display(*attrs.color) + " ";
  out += attrs.vtype ? lex.types.display(*attrs.vtype) : "vehicle";
  return out;
}

std::string build_global_text(const std::array<std::string, 3>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    std::string t = trim(s);
    if (t.empty()) continue;
    if (t.back() != '.') t.push_back('.');
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

QueryTexts build_query_texts(const std::array<std::string, 3>& sentences,
                             const Lexicons& lex) {
  QueryTexts q;
  q.global_text = build_global_text(sentences);
  q.local_texts = sentences;
  q.attributes = vote_attributes({extract_color_type(sentences[0], lex),
                                  extract_color_type(sentences[1], lex),
                                  extract_color_type(sentences[2], lex)});
  q.prompt_text = generate_prompt(q.attributes, lex);
  return q;
}

uint64_t stable_hash64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // Final avalanche so that the low bits used for bucketing mix well.
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

std::vector<double> featurize_text(std::string_view text, int dim) {
  if (dim < 1) throw DataError("text feature dimension must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  for (const auto& tok : tokenize(text)) {
    const uint64_t h = stable_hash64(tok);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[static_cast<std::size_t>(h % static_cast<uint64_t>(dim))] += sign;
  }
  double n2 = 0;
  for (double x : v) n2 += x * x;
  if (n2 > 0) {
    const double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
  }
  return v;
}

}  // namespace omg
