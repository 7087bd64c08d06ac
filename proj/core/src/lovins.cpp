// SPDX-License-Identifier: Apache-2.0
//
// Lovins, J. B. (1968), "Development of a stemming algorithm". Endings are tried
// longest first; an ending is removed when its context condition holds for the
// remaining stem and the stem keeps at least two letters. The stem is then
// undoubled and passed through the recoding (respelling) table.

#include <array>
#include <string>
#include <string_view>

#include "triage/textprep.hpp"

namespace triage {
namespace {

enum class Cond {
  A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P, Q, R, S, T, U, V, W, X, Y, Z, AA, BB, CC
};

struct Ending {
  std::string_view text;
  Cond cond;
};

// clang-format off
constexpr Ending kEndings[] = {
  {"alistically", Cond::B}, {"arizability", Cond::A}, {"izationally", Cond::B},

  {"antialness", Cond::A}, {"arisations", Cond::A}, {"arizations", Cond::A}, {"entialness", Cond::A},

  {"allically", Cond::C}, {"antaneous", Cond::A}, {"antiality", Cond::A}, {"arisation", Cond::A},
  {"arization", Cond::A}, {"ationally", Cond::B}, {"ativeness", Cond::A}, {"eableness", Cond::E},
  {"entations", Cond::A}, {"entiality", Cond::A}, {"entialize", Cond::A}, {"entiation", Cond::A},
  {"ionalness", Cond::A}, {"istically", Cond::A}, {"itousness", Cond::A}, {"izability", Cond::A},
  {"izational", Cond::A},

  {"ableness", Cond::A}, {"arizable", Cond::A}, {"entation", Cond::A}, {"entially", Cond::A},
  {"eousness", Cond::A}, {"ibleness", Cond::A}, {"icalness", Cond::A}, {"ionalism", Cond::A},
  {"ionality", Cond::A}, {"ionalize", Cond::A}, {"iousness", Cond::A}, {"izations", Cond::A},
  {"lessness", Cond::A},

  {"ability", Cond::A}, {"aically", Cond::A}, {"alistic", Cond::B}, {"alities", Cond::A},
  {"ariness", Cond::E}, {"aristic", Cond::A}, {"arizing", Cond::A}, {"ateness", Cond::A},
  {"atingly", Cond::A}, {"ational", Cond::B}, {"atively", Cond::A}, {"ativism", Cond::A},
  {"elihood", Cond::E}, {"encible", Cond::A}, {"entally", Cond::A}, {"entials", Cond::A},
  {"entiate", Cond::A}, {"entness", Cond::A}, {"fulness", Cond::A}, {"ibility", Cond::A},
  {"icalism", Cond::A}, {"icalist", Cond::A}, {"icality", Cond::A}, {"icalize", Cond::A},
  {"ication", Cond::G}, {"icianry", Cond::A}, {"ination", Cond::A}, {"ingness", Cond::A},
  {"ionally", Cond::A}, {"isation", Cond::A}, {"ishness", Cond::A}, {"istical", Cond::A},
  {"iteness", Cond::A}, {"iveness", Cond::A}, {"ivistic", Cond::A}, {"ivities", Cond::A},
  {"ization", Cond::F}, {"izement", Cond::A}, {"oidally", Cond::A}, {"ousness", Cond::A},

  {"aceous", Cond::A}, {"acious", Cond::B}, {"action", Cond::G}, {"alness", Cond::A},
  {"ancial", Cond::A}, {"ancies", Cond::A}, {"ancing", Cond::B}, {"ariser", Cond::A},
  {"arized", Cond::A}, {"arizer", Cond::A}, {"atable", Cond::A}, {"ations", Cond::B},
  {"atives", Cond::A}, {"eature", Cond::Z}, {"efully", Cond::A}, {"encies", Cond::A},
  {"encing", Cond::A}, {"ential", Cond::A}, {"enting", Cond::C}, {"entist", Cond::A},
  {"eously", Cond::A}, {"ialist", Cond::A}, {"iality", Cond::A}, {"ialize", Cond::A},
  {"ically", Cond::A}, {"icance", Cond::A}, {"icians", Cond::A}, {"icists", Cond::A},
  {"ifully", Cond::A}, {"ionals", Cond::A}, {"ionate", Cond::D}, {"ioning", Cond::A},
  {"ionist", Cond::A}, {"iously", Cond::A}, {"istics", Cond::A}, {"izable", Cond::E},
  {"lessly", Cond::A}, {"nesses", Cond::A}, {"oidism", Cond::A},

  {"acies", Cond::A}, {"acity", Cond::A}, {"aging", Cond::B}, {"aical", Cond::A},
  {"alist", Cond::A}, {"alism", Cond::B}, {"ality", Cond::A}, {"alize", Cond::A},
  {"allic", Cond::BB}, {"anced", Cond::B}, {"ances", Cond::B}, {"antic", Cond::C},
  {"arial", Cond::A}, {"aries", Cond::A}, {"arily", Cond::A}, {"arity", Cond::B},
  {"arize", Cond::A}, {"aroid", Cond::A}, {"ately", Cond::A}, {"ating", Cond::I},
  {"ation", Cond::B}, {"ative", Cond::A}, {"ators", Cond::A}, {"atory", Cond::A},
  {"ature", Cond::E}, {"early", Cond::Y}, {"ehood", Cond::A}, {"eless", Cond::A},
  {"elity", Cond::A}, {"ement", Cond::A}, {"enced", Cond::A}, {"ences", Cond::A},
  {"eness", Cond::E}, {"ening", Cond::E}, {"ental", Cond::A}, {"ented", Cond::C},
  {"ently", Cond::A}, {"fully", Cond::A}, {"ially", Cond::A}, {"icant", Cond::A},
  {"ician", Cond::A}, {"icide", Cond::A}, {"icism", Cond::A}, {"icist", Cond::A},
  {"icity", Cond::A}, {"idine", Cond::I}, {"iedly", Cond::A}, {"ihood", Cond::A},
  {"inate", Cond::A}, {"iness", Cond::A}, {"ingly", Cond::B}, {"inism", Cond::J},
  {"inity", Cond::CC}, {"ional", Cond::A}, {"ioned", Cond::A}, {"ished", Cond::A},
  {"istic", Cond::A}, {"ities", Cond::A}, {"itous", Cond::A}, {"ively", Cond::A},
  {"ivity", Cond::A}, {"izers", Cond::F}, {"izing", Cond::F}, {"oidal", Cond::A},
  {"oides", Cond::A}, {"otide", Cond::A}, {"ously", Cond::A},

  {"able", Cond::A}, {"ably", Cond::A}, {"ages", Cond::B}, {"ally", Cond::B},
  {"ance", Cond::B}, {"ancy", Cond::B}, {"ants", Cond::B}, {"aric", Cond::A},
  {"arly", Cond::K}, {"ated", Cond::I}, {"ates", Cond::A}, {"atic", Cond::B},
  {"ator", Cond::A}, {"ealy", Cond::Y}, {"edly", Cond::E}, {"eful", Cond::A},
  {"eity", Cond::A}, {"ence", Cond::A}, {"ency", Cond::A}, {"ened", Cond::E},
  {"enly", Cond::E}, {"eous", Cond::A}, {"hood", Cond::A}, {"ials", Cond::A},
  {"ians", Cond::A}, {"ible", Cond::A}, {"ibly", Cond::A}, {"ical", Cond::A},
  {"ides", Cond::L}, {"iers", Cond::A}, {"iful", Cond::A}, {"ines", Cond::M},
  {"ings", Cond::N}, {"ions", Cond::B}, {"ious", Cond::A}, {"isms", Cond::B},
  {"ists", Cond::A}, {"itic", Cond::H}, {"ized", Cond::F}, {"izer", Cond::F},
  {"less", Cond::A}, {"lily", Cond::A}, {"ness", Cond::A}, {"ogen", Cond::A},
  {"ward", Cond::A}, {"wise", Cond::A}, {"ying", Cond::B}, {"yish", Cond::A},

  {"acy", Cond::A}, {"age", Cond::B}, {"aic", Cond::A}, {"als", Cond::BB},
  {"ant", Cond::B}, {"ars", Cond::O}, {"ary", Cond::F}, {"ata", Cond::A},
  {"ate", Cond::A}, {"eal", Cond::Y}, {"ear", Cond::Y}, {"ely", Cond::E},
  {"ene", Cond::E}, {"ent", Cond::C}, {"ery", Cond::E}, {"ese", Cond::A},
  {"ful", Cond::A}, {"ial", Cond::A}, {"ian", Cond::A}, {"ics", Cond::A},
  {"ide", Cond::L}, {"ied", Cond::A}, {"ier", Cond::A}, {"ies", Cond::P},
  {"ily", Cond::A}, {"ine", Cond::M}, {"ing", Cond::N}, {"ion", Cond::Q},
  {"ish", Cond::C}, {"ism", Cond::B}, {"ist", Cond::A}, {"ite", Cond::AA},
  {"ity", Cond::A}, {"ium", Cond::A}, {"ive", Cond::A}, {"ize", Cond::F},
  {"oid", Cond::A}, {"one", Cond::R}, {"ous", Cond::A},

  {"ae", Cond::A}, {"al", Cond::BB}, {"ar", Cond::X}, {"as", Cond::B},
  {"ed", Cond::E}, {"en", Cond::F}, {"es", Cond::E}, {"ia", Cond::A},
  {"ic", Cond::A}, {"is", Cond::A}, {"ly", Cond::B}, {"on", Cond::S},
  {"or", Cond::T}, {"um", Cond::U}, {"us", Cond::V}, {"yl", Cond::R},

  {"a", Cond::A}, {"e", Cond::A}, {"i", Cond::A}, {"o", Cond::A},
  {"s", Cond::W}, {"y", Cond::B},
};
// clang-format on

constexpr std::size_t kLongestEnding = 11;

bool ends(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

char last(std::string_view s) { return s.empty() ? '\0' : s.back(); }

// Ending ...u?e, written u*e in the original condition table.
bool ends_u_any_e(std::string_view s) {
  return s.size() >= 3 && s[s.size() - 1] == 'e' && s[s.size() - 3] == 'u';
}

// `stem` is what remains after removing the ending; its length is already >= 2.
bool condition_holds(Cond cond, std::string_view stem) {
  const std::size_t n = stem.size();
  const char c = last(stem);
  switch (cond) {
    case Cond::A: return true;
    case Cond::B: return n >= 3;
    case Cond::C: return n >= 4;
    case Cond::D: return n >= 5;
    case Cond::E: return c != 'e';
    case Cond::F: return n >= 3 && c != 'e';
    case Cond::G: return n >= 3 && c == 'f';
    case Cond::H: return c == 't' || ends(stem, "ll");
    case Cond::I: return c != 'o' && c != 'e';
    case Cond::J: return c != 'a' && c != 'e';
    case Cond::K: return n >= 3 && (c == 'l' || c == 'i' || ends_u_any_e(stem));
    case Cond::L: return c != 'u' && c != 'x' && (c != 's' || ends(stem, "os"));
    case Cond::M: return c != 'a' && c != 'c' && c != 'e' && c != 'm';
    // Minimum stem length 4 when the stem reads s**, 3 otherwise.
    case Cond::N: return n >= 4 || (n == 3 && stem[0] != 's');
    case Cond::O: return c == 'l' || c == 'i';
    case Cond::P: return c != 'c';
    case Cond::Q: return n >= 3 && c != 'l' && c != 'n';
    case Cond::R: return c == 'n' || c == 'r';
    case Cond::S: return ends(stem, "dr") || (c == 't' && !ends(stem, "tt"));
    case Cond::T: return c == 's' || (c == 't' && !ends(stem, "ot"));
    case Cond::U: return c == 'l' || c == 'm' || c == 'n' || c == 'r';
    case Cond::V: return c == 'c';
    case Cond::W: return c != 's' && c != 'u';
    case Cond::X: return c == 'l' || c == 'i' || ends_u_any_e(stem);
    case Cond::Y: return ends(stem, "in");
    case Cond::Z: return c != 'f';
    case Cond::AA:
      return c == 'd' || c == 'f' || c == 'l' || c == 't' || ends(stem, "ph") ||
             ends(stem, "th") || ends(stem, "er") || ends(stem, "or") || ends(stem, "es");
    case Cond::BB: return n >= 3 && !ends(stem, "met") && !ends(stem, "ryst");
    case Cond::CC: return c == 'l';
  }
  return false;
}

std::string_view remove_ending(std::string_view word) {
  // kEndings is ordered by decreasing length, so the first hit is the longest.
  for (const Ending& e : kEndings) {
    if (e.text.size() + 2 > word.size() || !ends(word, e.text)) continue;
    const std::string_view stem = word.substr(0, word.size() - e.text.size());
    if (condition_holds(e.cond, stem)) return stem;
  }
  return word;
}

struct Respelling {
  std::string_view from;
  std::string_view to;
  std::string_view not_after;  // rule is skipped when preceded by one of these
};

// Longer patterns precede the shorter ones they end with (bex before ex, ...).
constexpr Respelling kRespellings[] = {
    Respelling{"iev", "ief", ""},   {"uct", "uc", ""},      {"umpt", "um", ""},
    {"rpt", "rb", ""},              {"urs", "ur", ""},      {"istr", "ister", ""},
    {"metr", "meter", ""},          {"olv", "olut", ""},    {"ul", "l", "aio"},
    {"bex", "bic", ""},             {"dex", "dic", ""},     {"pex", "pic", ""},
    {"tex", "tic", ""},             {"ax", "ac", ""},       {"ex", "ec", ""},
    {"ix", "ic", ""},               {"lux", "luc", ""},     {"uad", "uas", ""},
    {"vad", "vas", ""},             {"cid", "cis", ""},     {"lid", "lis", ""},
    {"erid", "eris", ""},           {"pand", "pans", ""},   {"end", "ens", "s"},
    {"ond", "ons", ""},             {"lud", "lus", ""},     {"rud", "rus", ""},
    {"her", "hes", "pt"},           {"mit", "mis", ""},     {"ent", "ens", "m"},
    {"ert", "ers", ""},             {"et", "es", "n"},      {"yt", "ys", ""},
    {"yz", "ys", ""},
};

void recode(std::string& stem) {
  static constexpr std::string_view kDoubles = "bdglmnprst";
  const std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && kDoubles.find(stem[n - 1]) != std::string_view::npos) {
    stem.pop_back();
  }

  // The longest matching pattern wins; when its context forbids it, nothing is
  // rewritten (no shorter pattern in the table is a suffix of a guarded one).
  const Respelling* best = nullptr;
  for (const auto& r : kRespellings) {
    if (ends(stem, r.from) && (!best || r.from.size() > best->from.size())) best = &r;
  }
  if (!best) return;
  const std::size_t at = stem.size() - best->from.size();
  if (!best->not_after.empty() && at > 0 &&
      best->not_after.find(stem[at - 1]) != std::string_view::npos) {
    return;
  }
  stem.replace(at, best->from.size(), best->to);
}

}  // namespace

std::string lovins_stem(std::string_view token) {
  std::string stem(remove_ending(token));
  recode(stem);
  return stem;
}

}  // namespace triage
