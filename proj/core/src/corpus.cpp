// SPDX-License-Identifier: Apache-2.0
#include "triage/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "triage/csv.hpp"
#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage {

std::string_view to_string(Priority p) {
  switch (p) {
    case Priority::P0: return "P0";
    case Priority::P1: return "P1";
    case Priority::P2: return "P2";
    case Priority::P3: return "P3";
  }
  return "P2";
}

std::string_view to_string(IssueStatus s) { return s == IssueStatus::open ? "open" : "closed"; }

std::optional<Priority> parse_priority(std::string_view s) {
  if (s == "P0") return Priority::P0;
  if (s == "P1") return Priority::P1;
  if (s == "P2") return Priority::P2;
  if (s == "P3") return Priority::P3;
  return std::nullopt;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view cell) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= cell.size()) {
    const std::size_t end = std::min(cell.find(';', start), cell.size());
    std::string item = trim(cell.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(';');
    out += items[i];
  }
  return out;
}

}  // namespace

std::optional<IssueStatus> parse_status(std::string_view s) {
  const std::string v = lower(trim(s));
  if (v == "closed" || v == "resolved" || v == "done") return IssueStatus::closed;
  if (v == "open" || v == "in progress" || v == "reopened" || v == "new") return IssueStatus::open;
  return std::nullopt;
}

// --- Taxonomy ------------------------------------------------------------------

Taxonomy::Taxonomy()
    : teams_{"T_A", "T_B"}, subteams_{"ST1", "ST2", "ST3", "ST4", "ST5", "ST6"} {
  members_["T_A"] = {"ST1", "ST2", "ST3"};
  members_["T_B"] = {"ST4", "ST5", "ST6"};
}

const Taxonomy& Taxonomy::standard() {
  static const Taxonomy taxonomy;
  return taxonomy;
}

const std::vector<std::string>& Taxonomy::subteams_of(std::string_view team) const {
  auto it = members_.find(team);
  if (it == members_.end()) throw ValidationError("unknown team '" + std::string(team) + "'");
  return it->second;
}

const std::string& Taxonomy::team_of(std::string_view subteam) const {
  for (const auto& [team, subs] : members_) {
    if (std::find(subs.begin(), subs.end(), subteam) != subs.end()) return team;
  }
  throw ValidationError("unknown sub-team '" + std::string(subteam) + "'");
}

bool Taxonomy::is_subteam(std::string_view label) const {
  return std::find(subteams_.begin(), subteams_.end(), label) != subteams_.end();
}

bool Taxonomy::is_team(std::string_view label) const {
  return std::find(teams_.begin(), teams_.end(), label) != teams_.end();
}

// --- IssueCorpus -------------------------------------------------------------------

namespace {

void sort_chronologically(std::vector<IssueRecord>& issues) {
  std::stable_sort(issues.begin(), issues.end(), [](const IssueRecord& a, const IssueRecord& b) {
    if (a.created != b.created) return a.created < b.created;
    return a.key < b.key;
  });
}

// Empty string when the record is valid on its own.
std::string record_problem(const IssueRecord& r) {
  if (r.key.empty()) return "missing key";
  if (r.updated < r.created) return "updated is earlier than created";
  if (r.subteam && !Taxonomy::standard().is_subteam(*r.subteam)) {
    return "unknown sub-team label '" + *r.subteam + "'";
  }
  return {};
}

}  // namespace

IssueCorpus::IssueCorpus(std::vector<IssueRecord> issues) : issues_(std::move(issues)) {
  std::set<std::string_view> keys;
  for (const auto& r : issues_) {
    if (auto problem = record_problem(r); !problem.empty()) {
      throw ValidationError("issue '" + r.key + "': " + problem);
    }
    if (!keys.insert(r.key).second) throw ValidationError("duplicate issue key '" + r.key + "'");
  }
  sort_chronologically(issues_);
}

std::pair<Timestamp, Timestamp> IssueCorpus::span() const {
  if (issues_.empty()) return {};
  return {issues_.front().created, issues_.back().created};
}

std::map<std::string, std::size_t> IssueCorpus::subteam_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : issues_) {
    if (r.subteam) ++counts[*r.subteam];
  }
  return counts;
}

std::map<std::string, std::size_t> IssueCorpus::team_counts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& [sub, n] : subteam_counts()) counts[Taxonomy::standard().team_of(sub)] += n;
  return counts;
}

// --- ingestion -------------------------------------------------------------------

namespace {

IngestResult filter_records(std::vector<IssueRecord> rows, std::vector<std::size_t> lines,
                            IngestReport report) {
  std::vector<IssueRecord> kept;
  std::set<std::string> keys;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    const std::size_t line = i < lines.size() ? lines[i] : i + 1;
    if (auto problem = record_problem(r); !problem.empty()) {
      report.errors.push_back({line, r.key, problem});
      continue;
    }
    if (keys.count(r.key)) {
      report.errors.push_back({line, r.key, "duplicate key"});
      continue;
    }
    keys.insert(r.key);
    if (r.status != IssueStatus::closed) {
      ++report.removed_open;
    } else if (r.duplicate) {
      ++report.removed_duplicate;
    } else if (!r.assignee || r.assignee->empty()) {
      ++report.removed_unassigned;
    } else if (!r.subteam) {
      ++report.removed_unlabeled;
    } else {
      kept.push_back(std::move(r));
    }
  }
  report.retained = kept.size();
  return {IssueCorpus(std::move(kept)), std::move(report)};
}

}  // namespace

IngestResult ingest(std::vector<IssueRecord> rows) {
  IngestReport report;
  report.rows_read = rows.size();
  return filter_records(std::move(rows), {}, std::move(report));
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header{
      "key",     "summary", "assignee", "reporter",    "components",
      "priority", "attach#", "created",  "updated",     "duedate",
      "labels",  "description", "status", "duplicate", "subteam"};
  return header;
}

IngestResult ingest_csv(std::string_view csv_text) {
  const csv::Table table = csv::parse(csv_text);
  for (const char* required : {"key", "created"}) {
    if (table.column(required) < 0) {
      throw ValidationError(std::string("ingest: header lacks required column '") + required + "'");
    }
  }
  auto cell = [&](const csv::Row& row, const char* name) -> std::string {
    const int c = table.column(name);
    if (c < 0 || static_cast<std::size_t>(c) >= row.size()) return {};
    return row[static_cast<std::size_t>(c)];
  };

  IngestReport report;
  report.rows_read = table.rows.size();
  std::vector<IssueRecord> records;
  std::vector<std::size_t> lines;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.lines[i];
    IssueRecord r;
    r.key = trim(cell(row, "key"));
    if (r.key.empty()) {
      report.errors.push_back({line, "", "missing key"});
      continue;
    }
    const auto created = parse_iso8601(cell(row, "created"));
    if (!created) {
      report.errors.push_back({line, r.key, "missing or invalid created timestamp"});
      continue;
    }
    r.created = *created;
    const std::string updated_cell = trim(cell(row, "updated"));
    if (updated_cell.empty()) {
      r.updated = r.created;
    } else if (auto updated = parse_iso8601(updated_cell)) {
      r.updated = *updated;
    } else {
      report.errors.push_back({line, r.key, "invalid updated timestamp"});
      continue;
    }
    r.summary = cell(row, "summary");
    r.description = cell(row, "description");
    if (auto a = trim(cell(row, "assignee")); !a.empty()) r.assignee = a;
    r.reporter = trim(cell(row, "reporter"));
    r.components = split_list(cell(row, "components"));
    r.priority = parse_priority(trim(cell(row, "priority"))).value_or(Priority::P2);
    try {
      const std::string n = trim(cell(row, "attach#"));
      r.attach_count = n.empty() ? 0u : static_cast<unsigned>(std::stoul(n));
    } catch (const std::exception&) {
      r.attach_count = 0;
    }
    r.due_date = parse_iso8601(cell(row, "duedate"));
    r.labels = split_list(cell(row, "labels"));
    r.status = parse_status(cell(row, "status")).value_or(IssueStatus::open);
    const std::string dup = lower(trim(cell(row, "duplicate")));
    r.duplicate = dup == "true" || dup == "1" || dup == "yes";
    if (auto s = trim(cell(row, "subteam")); !s.empty()) r.subteam = s;
    records.push_back(std::move(r));
    lines.push_back(line);
  }
  return filter_records(std::move(records), std::move(lines), std::move(report));
}

std::string to_csv(const std::vector<IssueRecord>& issues) {
  std::string out = csv::format_row(csv_header());
  out += "\r\n";
  for (const auto& r : issues) {
    csv::Row row{r.key,
                 r.summary,
                 r.assignee.value_or(""),
                 r.reporter,
                 join_list(r.components),
                 std::string(to_string(r.priority)),
                 std::to_string(r.attach_count),
                 format_iso8601(r.created),
                 format_iso8601(r.updated),
                 r.due_date ? format_iso8601(*r.due_date) : "",
                 join_list(r.labels),
                 r.description,
                 std::string(to_string(r.status)),
                 r.duplicate ? "true" : "false",
                 r.subteam.value_or("")};
    out += csv::format_row(row);
    out += "\r\n";
  }
  return out;
}

// --- synthetic corpus -------------------------------------------------------------

std::size_t SyntheticSpec::total() const {
  std::size_t n = 0;
  for (const auto& s : subteams) n += s.count;
  return n;
}

void SyntheticSpec::validate() const {
  std::vector<ValidationError::Field> problems;
  std::set<std::string> seen;
  for (const auto& s : subteams) {
    if (!Taxonomy::standard().is_subteam(s.label)) {
      problems.push_back({"subteams." + s.label, "unknown sub-team label"});
    }
    if (!seen.insert(s.label).second) problems.push_back({"subteams." + s.label, "listed twice"});
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
    problems.push_back({"noise_rate", "must be within [0, 1]"});
  }
  if (!(crosstalk_rate >= 0.0 && crosstalk_rate <= 1.0)) {
    problems.push_back({"crosstalk_rate", "must be within [0, 1]"});
  }
  if (end <= start) problems.push_back({"end", "must be after start"});
  if (summary_words_min > summary_words_max) {
    problems.push_back({"summary_words", "min exceeds max"});
  }
  if (description_words_min > description_words_max) {
    problems.push_back({"description_words", "min exceeds max"});
  }
  if (summary_words_max + description_words_max == 0) {
    problems.push_back({"summary_words", "documents would be empty"});
  }
  if (core_terms_per_subteam == 0) {
    problems.push_back({"core_terms_per_subteam", "must be positive"});
  }
  for (const auto& [team, weights] : seasonality) {
    if (!Taxonomy::standard().is_team(team)) {
      problems.push_back({"seasonality." + team, "unknown team"});
      continue;
    }
    if (weights.size() != 52) problems.push_back({"seasonality." + team, "needs 52 weekly weights"});
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) problems.push_back({"seasonality." + team, "weights must be non-negative"});
      sum += w;
    }
    if (!(sum > 0.0)) problems.push_back({"seasonality." + team, "weights sum to zero"});
  }
  if (!problems.empty()) throw ValidationError("invalid synthetic spec", std::move(problems));
}

SyntheticSpec SyntheticSpec::reference_defaults() {
  using namespace std::chrono;
  SyntheticSpec spec;
  spec.subteams = {{"ST1", 1160, {}}, {"ST2", 752, {}}, {"ST3", 310, {}},
                   {"ST4", 1691, {}}, {"ST5", 1363, {}}, {"ST6", 408, {}}};
  spec.start = Timestamp{sys_days{year{2018} / January / 1}};
  spec.end = Timestamp{sys_days{year{2020} / September / 1}};
  spec.noise_rate = 0.65;
  spec.crosstalk_rate = 0.35;
  spec.description_words_min = 5;
  spec.description_words_max = 16;
  constexpr double kTwoPi = 6.283185307179586;
  std::vector<double> a(52), b(52);
  for (int w = 0; w < 52; ++w) {
    a[w] = 1.0 + 0.35 * std::sin(kTwoPi * w / 52.0);
    b[w] = 1.0 + 0.35 * std::cos(kTwoPi * w / 52.0);
  }
  // Year-end slowdown.
  for (int w : {0, 50, 51}) {
    a[w] *= 0.25;
    b[w] *= 0.25;
  }
  spec.seasonality["T_A"] = a;
  spec.seasonality["T_B"] = b;
  return spec;
}

namespace {

// Pseudo-words built from consonant-vowel syllables with vowels a/o/u and a
// final b/g/k/p/z. No Lovins ending or recoding rule matches such a word, so
// they survive preprocessing unchanged and stay distinct.
std::string make_word(Rng& rng) {
  static constexpr std::string_view kOnset = "bdfgklmnprstvz";
  static constexpr std::string_view kVowel = "aou";
  static constexpr std::string_view kCoda = "bgkpz";
  const std::size_t syllables = 2 + rng.index(2);
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) {
    w.push_back(kOnset[rng.index(kOnset.size())]);
    w.push_back(kVowel[rng.index(kVowel.size())]);
  }
  w.push_back(kCoda[rng.index(kCoda.size())]);
  return w;
}

struct Vocabulary {
  std::map<std::string, std::vector<std::string>> core;
  std::vector<std::string> noise;
};

Vocabulary resolve_vocabulary(const SyntheticSpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xC0FE));
  std::set<std::string> used;
  for (const auto& s : spec.subteams) used.insert(s.core_terms.begin(), s.core_terms.end());
  used.insert(spec.noise_terms.begin(), spec.noise_terms.end());
  auto fresh = [&] {
    for (;;) {
      std::string w = make_word(rng);
      if (used.insert(w).second) return w;
    }
  };
  Vocabulary v;
  // Sorted label order keeps generated vocabularies independent of listing order.
  std::vector<const SubteamProfile*> profiles;
  for (const auto& s : spec.subteams) profiles.push_back(&s);
  std::sort(profiles.begin(), profiles.end(),
            [](auto* x, auto* y) { return x->label < y->label; });
  for (const auto* s : profiles) {
    auto terms = s->core_terms;
    if (terms.empty()) {
      for (std::size_t i = 0; i < spec.core_terms_per_subteam; ++i) terms.push_back(fresh());
    }
    v.core[s->label] = std::move(terms);
  }
  v.noise = spec.noise_terms;
  if (v.noise.empty()) {
    for (std::size_t i = 0; i < spec.noise_vocabulary; ++i) v.noise.push_back(fresh());
  }
  return v;
}

// Skewed draw: low indices are more frequent, like word frequencies.
std::size_t skewed_index(Rng& rng, std::size_t n) {
  const double u = rng.uniform();
  return std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * u * u));
}

std::string capitalize(std::string w) {
  if (!w.empty()) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
  return w;
}

}  // namespace

std::map<std::string, std::vector<std::string>> synthetic_vocabulary(const SyntheticSpec& spec,
                                                                     std::uint64_t seed) {
  return resolve_vocabulary(spec, seed).core;
}

std::vector<std::string> synthetic_noise_terms(const SyntheticSpec& spec, std::uint64_t seed) {
  return resolve_vocabulary(spec, seed).noise;
}

IssueCorpus generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.total() == 0) return IssueCorpus{};
  const Vocabulary vocab = resolve_vocabulary(spec, seed);
  const Taxonomy& tax = Taxonomy::standard();

  // Week blocks covering [start, end); the last one may be partial.
  struct Block {
    Timestamp begin;
    Seconds length;
    int week_of_year;
  };
  std::vector<Block> blocks;
  for (Timestamp t = spec.start; t < spec.end; t += weeks(1)) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const auto jan1 = std::chrono::sys_days{ymd.year() / std::chrono::January / 1};
    const int week = std::min(51, static_cast<int>((day - jan1).count() / 7));
    blocks.push_back({t, std::min<Seconds>(weeks(1), spec.end - t), week});
  }
  std::map<std::string, std::vector<double>> cumulative;
  for (const auto& team : tax.teams()) {
    auto it = spec.seasonality.find(team);
    std::vector<double> cum(blocks.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double w = it == spec.seasonality.end() ? 1.0 : it->second[blocks[i].week_of_year];
      acc += w * static_cast<double>(blocks[i].length.count()) / weeks(1).count();
      cum[i] = acc;
    }
    cumulative[team] = std::move(cum);
  }

  static const std::vector<std::string> kComponents{"ui", "network", "storage", "media",
                                                    "auth", "build", "power", "sensors"};
  static const std::vector<std::string> kLabels{"regression", "field", "customer", "crash"};

  Rng rng(seed);
  std::vector<IssueRecord> issues;
  issues.reserve(spec.total());
  for (const auto& profile : spec.subteams) {
    const std::string& team = tax.team_of(profile.label);
    const auto& core = vocab.core.at(profile.label);
    std::vector<const std::vector<std::string>*> siblings;
    for (const auto& s : tax.subteams_of(team)) {
      if (s != profile.label && vocab.core.count(s)) siblings.push_back(&vocab.core.at(s));
    }
    const auto& cum = cumulative.at(team);
    auto word = [&]() -> const std::string& {
      if (spec.noise_rate > 0.0 && rng.uniform() < spec.noise_rate) {
        return vocab.noise[rng.index(vocab.noise.size())];
      }
      if (!siblings.empty() && spec.crosstalk_rate > 0.0 && rng.uniform() < spec.crosstalk_rate) {
        const auto& other = *siblings[rng.index(siblings.size())];
        return other[skewed_index(rng, other.size())];
      }
      return core[skewed_index(rng, core.size())];
    };
    auto sentence = [&](std::size_t lo, std::size_t hi) {
      const std::size_t n = lo + rng.index(hi - lo + 1);
      std::string text;
      for (std::size_t i = 0; i < n; ++i) {
        if (i) text.push_back(' ');
        text += i == 0 ? capitalize(word()) : word();
      }
      return text;
    };

    for (std::size_t i = 0; i < profile.count; ++i) {
      IssueRecord r;
      const double target = rng.uniform() * cum.back();
      const std::size_t b = static_cast<std::size_t>(
          std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
      const Block& block = blocks[std::min(b, blocks.size() - 1)];
      r.created = block.begin + Seconds{static_cast<long long>(
                                    rng.index(static_cast<std::uint64_t>(block.length.count())))};
      r.updated = r.created + Seconds{static_cast<long long>(rng.index(30 * 24 * 3600))};
      r.summary = sentence(spec.summary_words_min, spec.summary_words_max);
      r.description = sentence(spec.description_words_min, spec.description_words_max);
      if (spec.noise_rate > 0.0) {
        // Tracker-style clutter that cleaning must strip.
        switch (rng.index(4)) {
          case 0: r.description += " <br/> build 0x" + std::to_string(1000 + rng.index(9000)); break;
          case 1: r.description += " (v" + std::to_string(rng.index(10)) + "." +
                                   std::to_string(rng.index(10)) + ")"; break;
          default: break;
        }
      }
      r.assignee = "lead-" + lower(profile.label);
      r.reporter = "reporter-" + std::to_string(1 + rng.index(80));
      r.components = {kComponents[rng.index(kComponents.size())]};
      r.priority = static_cast<Priority>(rng.index(4));
      r.attach_count = static_cast<unsigned>(rng.index(4));
      if (rng.index(5) == 0) r.labels = {kLabels[rng.index(kLabels.size())]};
      r.status = IssueStatus::closed;
      r.subteam = profile.label;
      issues.push_back(std::move(r));
    }
  }
  std::stable_sort(issues.begin(), issues.end(),
                   [](const IssueRecord& a, const IssueRecord& b) { return a.created < b.created; });
  const int width = std::max<int>(5, static_cast<int>(std::to_string(issues.size()).size()));
  for (std::size_t i = 0; i < issues.size(); ++i) {
    std::string n = std::to_string(i + 1);
    issues[i].key = "ISSUE-" + std::string(static_cast<std::size_t>(width) - n.size(), '0') + n;
  }
  return IssueCorpus(std::move(issues));
}

}  // namespace triage
