// SPDX-License-Identifier: Apache-2.0
#include "triage/textprep.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "triage/error.hpp"

namespace triage {

namespace embedded {
std::string_view stopwords_rainbow();
}

// --- StopwordList ------------------------------------------------------------

StopwordList::StopwordList(std::vector<std::string> words, std::string version)
    : version_(std::move(version)) {
  for (auto& w : words) {
    for (char& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!w.empty()) words_.insert(std::move(w));
  }
  if (words_.empty()) throw ValidationError("stopword list is empty");
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& w : words_) {
    for (unsigned char c : w) h = (h ^ c) * 1099511628211ULL;
    h = (h ^ '\n') * 1099511628211ULL;
  }
  fingerprint_ = h;
}

StopwordList StopwordList::parse(std::string_view text) {
  std::vector<std::string> words;
  std::string version = "custom";
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      std::string_view comment = line.substr(hash + 1);
      constexpr std::string_view kTag = " version:";
      if (comment.substr(0, kTag.size()) == kTag) {
        std::string v(comment.substr(kTag.size()));
        v.erase(0, v.find_first_not_of(" \t"));
        v.erase(v.find_last_not_of(" \t\r") + 1);
        if (!v.empty()) version = v;
      }
      line = line.substr(0, hash);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (!line.empty()) words.emplace_back(line);
  }
  return StopwordList(std::move(words), std::move(version));
}

StopwordList StopwordList::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read stopword file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const StopwordList& StopwordList::rainbow() {
  static const StopwordList list = parse(embedded::stopwords_rainbow());
  return list;
}

bool StopwordList::contains(std::string_view word) const { return words_.find(word) != words_.end(); }

// --- clean ----------------------------------------------------------------------

namespace {

// Decodes UTF-8; malformed sequences, overlongs and surrogates are skipped.
std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

// Base letters for U+00C0..U+00FF. Letters with a canonical decomposition lose
// their marks; the few without one (AE, O-slash, eth, thorn, sharp s) are
// transliterated. "" marks the two arithmetic signs.
constexpr std::array<std::string_view, 64> kLatin1{
    "A", "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I", "I", "I", "I",
    "D", "N", "O", "O", "O", "O", "O",  "",  "O", "U", "U", "U", "U", "Y", "TH", "ss",
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    "d", "n", "o", "o", "o", "o", "o",  "",  "o", "u", "u", "u", "u", "y", "th", "y"};

// U+0100..U+017F (Latin Extended-A).
constexpr std::array<std::string_view, 128> kLatinExtA{
    "A", "a", "A", "a", "A", "a", "C", "c", "C", "c", "C", "c", "C", "c", "D", "d",
    "D", "d", "E", "e", "E", "e", "E", "e", "E", "e", "E", "e", "G", "g", "G", "g",
    "G", "g", "G", "g", "H", "h", "H", "h", "I", "i", "I", "i", "I", "i", "I", "i",
    "I", "i", "IJ", "ij", "J", "j", "K", "k", "k", "L", "l", "L", "l", "L", "l", "L",
    "l", "L", "l", "N", "n", "N", "n", "N", "n", "n", "N", "n", "O", "o", "O", "o",
    "O", "o", "OE", "oe", "R", "r", "R", "r", "R", "r", "S", "s", "S", "s", "S", "s",
    "S", "s", "T", "t", "T", "t", "T", "t", "U", "u", "U", "u", "U", "u", "U", "u",
    "U", "u", "U", "u", "W", "w", "Y", "y", "Y", "Z", "z", "Z", "z", "Z", "z", "s"};

bool is_combining_mark(char32_t cp) {
  return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
         (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
         (cp >= 0xFE20 && cp <= 0xFE2F);
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

// Tags (<b>, </p>, <br/>, <!-- ... -->) and character entities (&amp;, &#39;).
std::string strip_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '<' && i + 1 < s.size() &&
        (is_alpha(s[i + 1]) || s[i + 1] == '/' || s[i + 1] == '!' || s[i + 1] == '?')) {
      const std::size_t close = s.find('>', i + 1);
      if (close != std::string_view::npos) {
        out.push_back(' ');
        i = close + 1;
        continue;
      }
    }
    if (c == '&') {
      std::size_t j = i + 1;
      if (j < s.size() && s[j] == '#') {
        ++j;
        if (j < s.size() && (s[j] == 'x' || s[j] == 'X')) ++j;
        while (j < s.size() && is_hex(s[j])) ++j;
      } else {
        while (j < s.size() && is_alpha(s[j])) ++j;
      }
      if (j < s.size() && s[j] == ';' && j > i + 1) {
        out.push_back(' ');
        i = j + 1;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace

std::string clean(std::string_view text) {
  // 1. Diacritics. Anything that does not fold to ASCII becomes a separator.
  std::string ascii;
  ascii.reserve(text.size());
  for (char32_t cp : decode_utf8(text)) {
    if (cp < 0x80) {
      ascii.push_back(static_cast<char>(cp));
    } else if (is_combining_mark(cp)) {
      continue;
    } else if (cp >= 0xC0 && cp <= 0xFF && !kLatin1[cp - 0xC0].empty()) {
      ascii += kLatin1[cp - 0xC0];
    } else if (cp >= 0x100 && cp <= 0x17F) {
      ascii += kLatinExtA[cp - 0x100];
    } else {
      ascii.push_back(' ');
    }
  }

  // 2. Markup.
  const std::string plain = strip_markup(ascii);

  // 3. Numerals (0x.. hexadecimal first, then any digit run with separators),
  //    punctuation, and whitespace.
  std::string out;
  out.reserve(plain.size());
  bool pending_space = false;
  auto emit_space = [&] { pending_space = !out.empty(); };
  std::size_t i = 0;
  while (i < plain.size()) {
    const char c = plain[i];
    const bool boundary = i == 0 || !is_alpha(plain[i - 1]);
    if (c == '0' && boundary && i + 2 < plain.size() &&
        (plain[i + 1] == 'x' || plain[i + 1] == 'X') && is_hex(plain[i + 2])) {
      i += 2;
      while (i < plain.size() && is_hex(plain[i])) ++i;
      emit_space();
      continue;
    }
    if (is_digit(c)) {
      while (i < plain.size() &&
             (is_digit(plain[i]) || ((plain[i] == '.' || plain[i] == ',') && i + 1 < plain.size() &&
                                     is_digit(plain[i + 1])))) {
        ++i;
      }
      emit_space();
      continue;
    }
    if (is_alpha(c)) {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    } else {
      emit_space();
    }
    ++i;
  }
  return out;
}

// --- preprocess ------------------------------------------------------------------

TokenizedDocument preprocess(std::string_view key, std::string_view summary,
                             std::string_view description, const StopwordList& stopwords,
                             const Stemmer& stemmer) {
  TokenizedDocument doc;
  doc.issue_key = std::string(key);
  std::string text = clean(summary);
  text.push_back(' ');
  text += clean(description);
  for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = text.find_first_not_of(' ', pos);
    if (start == std::string::npos) break;
    std::size_t end = text.find(' ', start);
    if (end == std::string::npos) end = text.size();
    const std::string_view token(text.data() + start, end - start);
    pos = end;
    if (token.size() < 3 || stopwords.contains(token)) continue;
    doc.tokens.push_back(stemmer.stem(token));
  }
  return doc;
}

TokenizedDocument preprocess(const IssueRecord& issue, const StopwordList& stopwords) {
  TokenizedDocument doc = preprocess(issue.key, issue.summary, issue.description, stopwords);
  doc.label = issue.subteam;
  return doc;
}

}  // namespace triage
