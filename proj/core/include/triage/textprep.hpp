// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "triage/corpus.hpp"

namespace triage {

class StopwordList {
 public:
  // Words are lowercased on insertion. Throws ValidationError when empty.
  explicit StopwordList(std::vector<std::string> words, std::string version = "custom");

  // One word per line, UTF-8, '#' starts a comment. A "# version: X" comment
  // sets version().
  static StopwordList parse(std::string_view text);
  static StopwordList load(const std::string& path);
  // Bundled snapshot of the Rainbow (SMART) list.
  static const StopwordList& rainbow();

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::string& version() const { return version_; }
  // FNV-1a over the sorted word list; identifies the list inside model artifacts.
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::vector<std::string> words() const { return {words_.begin(), words_.end()}; }

 private:
  std::set<std::string, std::less<>> words_;
  std::string version_;
  std::uint64_t fingerprint_ = 0;
};

struct TokenizedDocument {
  std::string issue_key;
  std::vector<std::string> tokens;
  std::optional<std::string> label;

  bool operator==(const TokenizedDocument&) const = default;
};

// Strips markup tags, folds diacritics to base letters, drops hexadecimal and
// decimal numerals, replaces punctuation and symbols with spaces and collapses
// whitespace. The result holds only ASCII letters separated by single spaces.
// Invalid UTF-8 bytes are dropped.
std::string clean(std::string_view text);

// Lovins (1968) stemmer: longest ending whose context condition holds and which
// leaves at least two letters, followed by undoubling and the recoding table.
// Input must be lowercase ASCII letters.
std::string lovins_stem(std::string_view token);

class Stemmer {
 public:
  virtual ~Stemmer() = default;
  virtual std::string stem(std::string_view token) const = 0;
};

class LovinsStemmer final : public Stemmer {
 public:
  std::string stem(std::string_view token) const override { return lovins_stem(token); }
};

// clean(summary) + " " + clean(description), lowercase, whitespace tokenize,
// drop tokens shorter than 3 letters, drop stopwords, stem.
TokenizedDocument preprocess(const IssueRecord& issue, const StopwordList& stopwords);
TokenizedDocument preprocess(std::string_view key, std::string_view summary,
                             std::string_view description, const StopwordList& stopwords,
                             const Stemmer& stemmer = LovinsStemmer{});

}  // namespace triage
