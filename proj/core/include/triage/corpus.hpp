// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triage/timeutil.hpp"

namespace triage {

enum class Priority { P0, P1, P2, P3 };
enum class IssueStatus { open, closed };

std::string_view to_string(Priority p);
std::string_view to_string(IssueStatus s);
std::optional<Priority> parse_priority(std::string_view s);
std::optional<IssueStatus> parse_status(std::string_view s);

struct IssueRecord {
  std::string key;
  std::string summary;
  std::string description;
  std::optional<std::string> assignee;
  std::string reporter;
  std::vector<std::string> components;
  Priority priority = Priority::P2;
  unsigned attach_count = 0;
  Timestamp created{};
  Timestamp updated{};
  std::optional<Timestamp> due_date;
  std::vector<std::string> labels;
  IssueStatus status = IssueStatus::closed;
  bool duplicate = false;
  std::optional<std::string> subteam;

  bool operator==(const IssueRecord&) const = default;
};

// Two teams, three sub-teams each: T_A = {ST1, ST2, ST3}, T_B = {ST4, ST5, ST6}.
class Taxonomy {
 public:
  static const Taxonomy& standard();

  const std::vector<std::string>& teams() const { return teams_; }
  const std::vector<std::string>& subteams() const { return subteams_; }
  const std::vector<std::string>& subteams_of(std::string_view team) const;

  // Throws ValidationError for labels outside the taxonomy.
  const std::string& team_of(std::string_view subteam) const;
  bool is_subteam(std::string_view label) const;
  bool is_team(std::string_view label) const;

 private:
  Taxonomy();
  std::vector<std::string> teams_;
  std::vector<std::string> subteams_;
  std::map<std::string, std::vector<std::string>, std::less<>> members_;
};

// Issues ordered by creation time (ties by key). Immutable once built.
class IssueCorpus {
 public:
  IssueCorpus() = default;
  // Sorts and validates: unique non-empty keys, updated >= created, known sub-team labels.
  explicit IssueCorpus(std::vector<IssueRecord> issues);

  const std::vector<IssueRecord>& issues() const { return issues_; }
  std::size_t size() const { return issues_.size(); }
  bool empty() const { return issues_.empty(); }
  const IssueRecord& operator[](std::size_t i) const { return issues_[i]; }

  // (min created, max created); both epoch for an empty corpus.
  std::pair<Timestamp, Timestamp> span() const;

  std::map<std::string, std::size_t> subteam_counts() const;
  std::map<std::string, std::size_t> team_counts() const;

 private:
  std::vector<IssueRecord> issues_;
};

struct RowError {
  std::size_t line = 0;
  std::string key;
  std::string message;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t retained = 0;
  std::size_t removed_open = 0;
  std::size_t removed_duplicate = 0;
  std::size_t removed_unassigned = 0;
  std::size_t removed_unlabeled = 0;
  std::vector<RowError> errors;
};

struct IngestResult {
  IssueCorpus corpus;
  IngestReport report;
};

// Keeps closed, non-duplicate, assigned, labeled issues. Each removed issue is
// counted once, under the first rule it fails (open, duplicate, unassigned,
// unlabeled). Rows that fail to parse are skipped and listed in report.errors.
IngestResult ingest(std::vector<IssueRecord> rows);

// Parses the tracker export CSV (see csv_header()). A missing required column
// or a document that is not CSV throws ValidationError.
IngestResult ingest_csv(std::string_view csv_text);

// key,summary,assignee,reporter,components,priority,attach#,created,updated,
// duedate,labels,description,status,duplicate,subteam
const std::vector<std::string>& csv_header();
std::string to_csv(const std::vector<IssueRecord>& issues);

// ---------------------------------------------------------------------------
// Synthetic corpus

struct SubteamProfile {
  std::string label;
  std::size_t count = 0;
  std::vector<std::string> core_terms;  // empty: generated from the seed
};

struct SyntheticSpec {
  std::vector<SubteamProfile> subteams;
  std::vector<std::string> noise_terms;  // empty: generated from the seed
  std::size_t core_terms_per_subteam = 60;
  std::size_t noise_vocabulary = 400;
  // Week-of-year arrival weights per team (52 entries each, index 0 = week 1).
  std::map<std::string, std::vector<double>> seasonality;
  Timestamp start{};
  Timestamp end{};
  // Probability that any generated word is drawn from the noise vocabulary.
  double noise_rate = 0.3;
  // Probability that a non-noise word comes from a sibling sub-team of the same
  // team (topic overlap inside a team). 0 keeps vocabularies disjoint.
  double crosstalk_rate = 0.0;
  std::size_t summary_words_min = 4;
  std::size_t summary_words_max = 10;
  std::size_t description_words_min = 12;
  std::size_t description_words_max = 40;

  std::size_t total() const;
  // Throws ValidationError on negative/out-of-range fields or unknown labels.
  void validate() const;

  // Reference distribution: ST1 1160, ST2 752, ST3 310, ST4 1691, ST5 1363,
  // ST6 408 over 2018-01-01 .. 2020-08-31, noise 0.65, crosstalk 0.35,
  // descriptions of 5..16 words.
  static SyntheticSpec reference_defaults();
};

// Deterministic for a given (spec, seed): the same inputs produce byte-identical
// corpora. Issue keys are assigned in creation order.
IssueCorpus generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Core vocabulary actually used for each sub-team (resolves generated terms).
std::map<std::string, std::vector<std::string>> synthetic_vocabulary(const SyntheticSpec& spec,
                                                                     std::uint64_t seed);
std::vector<std::string> synthetic_noise_terms(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace triage
