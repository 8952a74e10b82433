#pragma once

/// @file narrator.hpp
/// Stochastic template narration of games into plain English, corpus
/// splitting, and Flesch-Kincaid readability.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "chessmap/error.hpp"
#include "chessmap/random.hpp"
#include "chessmap/records.hpp"

namespace chessmap {

// Slot names a template may reference.
inline const std::set<std::string>& template_slot_vocabulary() {
  static const std::set<std::string> vocab = {
      "date_phrase", "white", "black", "high", "high_elo", "low", "low_elo", "elo",
      "player", "winner", "loser", "moves", "opening", "defense", "n",
      "Color", "color", "opp", "piece", "from", "to", "rook_from", "rook_to", "side"};
  return vocab;
}

/// Template lists per narrative event plus the selection seed.
struct TemplateSet {
  std::map<std::string, std::vector<std::string>> events;
  std::map<std::string, std::string> name_aliases;  // raw PGN name -> display name
  std::uint64_t seed = 1;

  static const std::vector<std::string>& event_names() {
    static const std::vector<std::string> names = {
        "header", "elo_high", "elo_low", "elo_equal", "elo_single", "result_win", "result_upset",
        "result_draw", "result_unknown", "opening", "opening_reply", "move_prefix", "move",
        "capture", "castle", "promotion", "capture_promotion", "check", "game_end_win",
        "game_end_draw", "game_end_unknown"};
    return names;
  }

  const std::vector<std::string>& templates(const std::string& event) const {
    auto it = events.find(event);
    if (it == events.end() || it->second.empty()) throw ConfigError("no templates for event '" + event + "'");
    return it->second;
  }

  /// Throws ConfigError on a missing event or an unknown slot.
  void validate() const {
    for (const auto& e : event_names()) templates(e);
    for (const auto& [event, list] : events) {
      for (const auto& t : list) {
        std::size_t pos = 0;
        while ((pos = t.find('{', pos)) != std::string::npos) {
          auto end = t.find('}', pos);
          if (end == std::string::npos) throw ConfigError("unterminated slot in '" + t + "'");
          auto slot = t.substr(pos + 1, end - pos - 1);
          if (!template_slot_vocabulary().count(slot))
            throw ConfigError("unknown slot '{" + slot + "}' in event '" + event + "'");
          pos = end + 1;
        }
      }
    }
  }

  static TemplateSet defaults() {
    TemplateSet t;
    t.seed = 1;
    t.name_aliases = {{"Vachier Lagrave,M", "Maxime Vachier-Lagrave"},
                      {"Vachier-Lagrave,M", "Maxime Vachier-Lagrave"}};
    auto& e = t.events;
    e["header"] = {"{date_phrase}, {white} played {black}.",
                   "{date_phrase}, {white} faced {black}.",
                   "{date_phrase}, {white} sat down against {black}."};
    e["elo_high"] = {"{high} was the higher-ranked player, with an Elo rating of {high_elo}.",
                     "{high}, with an Elo rating of {high_elo}, was the higher-ranked player.",
                     "{high} was rated higher, with an Elo rating of {high_elo}."};
    e["elo_low"] = {"{low} was the lower-ranked player, with an Elo rating of {low_elo}.",
                    "{low}, with an Elo rating of {low_elo}, was the lower-ranked player.",
                    "{low} was rated lower, with an Elo rating of {low_elo}."};
    e["elo_equal"] = {"Both players had an identical Elo rating of {elo}.",
                      "Both players entered the game with an Elo rating of {elo}.",
                      "Both players were evenly matched, with an Elo rating of {elo}."};
    e["elo_single"] = {"{player} had an Elo rating of {elo}.",
                       "{player} played with an Elo rating of {elo}.",
                       "{player} came into the game with an Elo rating of {elo}."};
    e["result_win"] = {"{winner} defeated {loser} in a game that lasted {moves} moves.",
                       "{winner} beat {loser} in a game that lasted {moves} moves.",
                       "{winner} overcame {loser} in a game that lasted {moves} moves."};
    e["result_upset"] = {
        "{winner} won in a surprise victory over {loser} in a game that lasted {moves} moves.",
        "{winner} pulled off an upset against {loser} in a game that lasted {moves} moves.",
        "{winner} surprised {loser} in a game that lasted {moves} moves."};
    e["result_draw"] = {"{white} and {black} drew in a game that lasted {moves} moves.",
                        "{white} and {black} agreed to a draw in a game that lasted {moves} moves.",
                        "{white} and {black} split the point in a game that lasted {moves} moves."};
    e["result_unknown"] = {"The game between {white} and {black} lasted {moves} moves.",
                           "The encounter between {white} and {black} lasted {moves} moves.",
                           "The contest between {white} and {black} lasted {moves} moves."};
    e["opening"] = {"The game begins as white uses the {opening} opening.",
                    "The game begins as white chooses the {opening} opening.",
                    "The game begins as white relies on the {opening} opening."};
    e["opening_reply"] = {
        "The game begins as white uses the {opening} opening, and black counters with the {defense}.",
        "The game begins as white chooses the {opening} opening, and black counters with the {defense}.",
        "The game begins as white relies on the {opening} opening, and black answers with the {defense}."};
    e["move_prefix"] = {"In move {n}, ", "On move {n}, ", "At move {n}, "};
    e["move"] = {
        "{Color} moves {piece} from {from} to {to}.",
        "{player} moves {color} {piece} from {from} to {to}.",
        "{player} moves the {piece} from {from} to {to}, continuing to develop the position.",
        "{Color} shifts the {piece} from {from} to {to} to gain some space.",
        "{Color} sends the {piece} from {from} to {to} to add to the threat."};
    e["capture"] = {
        "{Color} takes {opp} piece on {to} with {piece} from {from}.",
        "{player} moves {color} {piece} from {from} to {to}, taking a {opp} piece.",
        "{Color} takes on {to} with the {piece} from {from}, and a piece is gone.",
        "{player} moves the {piece} from {from} to {to}, capturing an opposing piece."};
    e["castle"] = {
        "{Color} castles {side}, moving king from {from} to {to} and rook from {rook_from} to {rook_to}.",
        "{player} castles {side}, with king from {from} to {to} and rook from {rook_from} to {rook_to}.",
        "{Color} castles {side}, so the king goes from {from} to {to} and the rook from {rook_from} to {rook_to}."};
    e["promotion"] = {
        "{Color} moves pawn from {from} to {to} and promotes it.",
        "{player} moves {color} pawn from {from} to {to}, promoting it to a new piece.",
        "{Color} pushes the pawn from {from} to {to}, where it turns into a new piece."};
    e["capture_promotion"] = {
        "{Color} takes {opp} piece on {to} with pawn from {from} and promotes it.",
        "{player} moves {color} pawn from {from} to {to}, taking a {opp} piece and promoting it.",
        "{Color} takes on {to} with the pawn from {from}, where it turns into a new piece."};
    e["check"] = {"Check.", "That is check.", "The king is now in check."};
    e["game_end_win"] = {"{winner} wins.", "In the end, {winner} wins.", "{winner} wins the game."};
    e["game_end_draw"] = {"The game ends in a draw.", "Neither player wins, and the game is drawn.",
                          "The players agree that the game is drawn."};
    e["game_end_unknown"] = {"The game ends.", "The game is over.", "That concludes the game."};
    return t;
  }

  static TemplateSet from_json(const nlohmann::json& j) {
    TemplateSet t = defaults();
    if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("name_aliases"))
      t.name_aliases = j.at("name_aliases").get<std::map<std::string, std::string>>();
    if (j.contains("events"))
      for (const auto& [k, v] : j.at("events").items()) t.events[k] = v.get<std::vector<std::string>>();
    t.validate();
    return t;
  }

  nlohmann::json to_json() const {
    return {{"seed", seed}, {"name_aliases", name_aliases}, {"events", events}};
  }
};

// ── Opening names ───────────────────────────────────────────────────────────

struct OpeningName {
  std::string opening;
  std::optional<std::string> defense;
};

inline std::optional<OpeningName> opening_for_eco(const std::optional<std::string>& eco) {
  if (!eco || eco->size() != 3 || (*eco)[0] < 'A' || (*eco)[0] > 'E' ||
      !std::isdigit(static_cast<unsigned char>((*eco)[1])) ||
      !std::isdigit(static_cast<unsigned char>((*eco)[2])))
    return std::nullopt;
  static const std::map<std::string, std::string> defenses = {
      {"A11", "Caro-Kann defensive system"}, {"B90", "Najdorf variation"},
      {"B12", "Advance variation"},          {"C65", "Berlin defense"},
      {"D37", "classical line"},             {"E60", "fianchetto system"}};
  struct Range {
    char letter;
    int lo, hi;
    const char* name;
  };
  static constexpr std::array<Range, 30> ranges = {{
      {'A', 0, 9, "Reti"},          {'A', 10, 39, "English"},       {'A', 40, 44, "Queen's Pawn"},
      {'A', 45, 49, "Indian"},      {'A', 50, 79, "Benoni"},        {'A', 80, 99, "Dutch"},
      {'B', 0, 0, "King's Pawn"},   {'B', 1, 1, "Scandinavian"},    {'B', 2, 5, "Alekhine"},
      {'B', 6, 6, "Modern"},        {'B', 7, 9, "Pirc"},            {'B', 10, 19, "Caro-Kann"},
      {'B', 20, 99, "Sicilian"},    {'C', 0, 19, "French"},         {'C', 20, 29, "King's Pawn"},
      {'C', 30, 39, "King's Gambit"}, {'C', 40, 41, "Philidor"},    {'C', 42, 43, "Petrov"},
      {'C', 44, 49, "Scotch"},      {'C', 50, 59, "Italian"},       {'C', 60, 99, "Ruy Lopez"},
      {'D', 0, 5, "Queen's Pawn"},  {'D', 6, 69, "Queen's Gambit"}, {'D', 70, 99, "Grunfeld"},
      {'E', 0, 9, "Catalan"},       {'E', 10, 19, "Queen's Indian"}, {'E', 20, 59, "Nimzo-Indian"},
      {'E', 60, 99, "King's Indian"}, {'Z', 0, 0, ""},              {'Z', 0, 0, ""}}};
  const int num = ((*eco)[1] - '0') * 10 + ((*eco)[2] - '0');
  for (const auto& r : ranges) {
    if (r.letter == (*eco)[0] && num >= r.lo && num <= r.hi) {
      OpeningName out{r.name, std::nullopt};
      if (auto it = defenses.find(*eco); it != defenses.end()) out.defense = it->second;
      return out;
    }
  }
  return std::nullopt;
}

// ── Names and dates ─────────────────────────────────────────────────────────

/// "Nepomniachtchi,Ian" -> "Ian Nepomniachtchi". Sentence punctuation is
/// stripped so a name never splits a sentence.
inline std::string display_name(const std::string& raw, const TemplateSet& t) {
  if (auto it = t.name_aliases.find(raw); it != t.name_aliases.end()) return it->second;
  std::string name = raw;
  if (auto comma = raw.find(','); comma != std::string::npos) {
    std::string last = raw.substr(0, comma), first = raw.substr(comma + 1);
    name = first + " " + last;
  }
  std::string out;
  for (char c : name) {
    if (c == '.' || c == '!' || c == '?' || c == ',' || c == '{' || c == '}') c = ' ';
    if (c == ' ' && (out.empty() || out.back() == ' ')) continue;
    out += c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

inline std::string_view month_name(int m) {
  static constexpr std::array<std::string_view, 12> names = {
      "January", "February", "March", "April", "May", "June", "July",
      "August", "September", "October", "November", "December"};
  return names[static_cast<std::size_t>(m - 1)];
}

inline std::string date_phrase(const GameDate& d) {
  if (d.year && d.month && d.day)
    return "On " + std::string(month_name(*d.month)) + " " + std::to_string(*d.day) + ", " +
           std::to_string(*d.year);
  if (d.year && d.month) return "In " + std::string(month_name(*d.month)) + " " + std::to_string(*d.year);
  if (d.year) return "In " + std::to_string(*d.year);
  return "On an unrecorded date";
}

// ── Rendering ───────────────────────────────────────────────────────────────

using Slots = std::map<std::string, std::string>;

inline std::string fill_template(const std::string& tmpl, const Slots& slots) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    auto open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    auto close = tmpl.find('}', open);
    auto key = tmpl.substr(open + 1, close - open - 1);
    auto it = slots.find(key);
    if (it == slots.end()) throw ConfigError("slot '{" + key + "}' has no value");
    out += it->second;
    pos = close + 1;
  }
  return out;
}

inline bool uses_slot(const std::string& tmpl, std::string_view slot) {
  return tmpl.find("{" + std::string(slot) + "}") != std::string::npos;
}

inline std::string capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

/// Context for rendering move sentences: player display names, or none when
/// the text carries no name-to-color binding (surrogate output).
struct MoveVoice {
  std::optional<std::string> white_name;
  std::optional<std::string> black_name;
};

inline const std::string& pick(const std::vector<std::string>& list, Rng& rng) {
  return list[rng.below(list.size())];
}

/// Picks a template for `event` that can be rendered with the names in
/// `voice` and fills it.
inline std::string render_move_event(const TemplateSet& t, const std::string& event, const Slots& base,
                                     bool names_available, Rng& rng) {
  const auto& list = t.templates(event);
  std::vector<const std::string*> usable;
  for (const auto& tmpl : list)
    if (names_available || !uses_slot(tmpl, "player")) usable.push_back(&tmpl);
  if (usable.empty()) throw ConfigError("event '" + event + "' needs a template without {player}");
  return fill_template(*usable[rng.below(usable.size())], base);
}

/// One move sentence for `rec`, plus its castle rook partner when present.
/// `with_number` prepends a move-number prefix.
inline std::string render_move_sentence(const TemplateSet& t, const MoveRecord& rec,
                                        const MoveRecord* castle_rook, const MoveVoice& voice,
                                        bool with_number, Rng& rng) {
  const auto& name = rec.color == Color::White ? voice.white_name : voice.black_name;
  Slots s;
  s["Color"] = capitalized(color_name(rec.color));
  s["color"] = std::string(color_name(rec.color));
  s["opp"] = std::string(color_name(opposite(rec.color)));
  s["piece"] = std::string(piece_name(rec.piece));
  s["from"] = rec.from.name();
  s["to"] = rec.to.name();
  if (name) s["player"] = *name;
  std::string event;
  if (is_castle(rec.special) && rec.piece == PieceKind::King) {
    event = "castle";
    s["side"] = rec.special == SpecialMove::CastleKingside ? "kingside" : "queenside";
    const int home = rec.from.rank();
    const bool king_side = rec.special == SpecialMove::CastleKingside;
    Square rf = castle_rook ? castle_rook->from : *Square::from_coords(king_side ? 7 : 0, home);
    Square rt = castle_rook ? castle_rook->to : *Square::from_coords(king_side ? 5 : 3, home);
    s["rook_from"] = rf.name();
    s["rook_to"] = rt.name();
  } else if (rec.special == SpecialMove::Promotion) {
    event = rec.is_capture ? "capture_promotion" : "promotion";
  } else {
    event = rec.is_capture ? "capture" : "move";
  }
  std::string sentence = render_move_event(t, event, s, name.has_value(), rng);
  if (with_number && rec.move_number) {
    Slots p{{"n", std::to_string(*rec.move_number)}};
    sentence = fill_template(pick(t.templates("move_prefix"), rng), p) + sentence;
  }
  if (rec.is_check) sentence += " " + pick(t.templates("check"), rng);
  return sentence;
}

/// Narrated lines for one game: header sentences, then one line per move
/// (a castle's king and rook share a line; a check marker stays on its
/// move's line), then the closing line.
inline std::vector<std::string> narrate_game_lines(const GameRecord& g, const TemplateSet& t) {
  Rng rng(derive_seed(t.seed, fnv1a(g.game_id)));
  std::vector<std::string> lines;
  const auto& m = g.meta;
  std::string white = display_name(m.white_name, t);
  std::string black = display_name(m.black_name, t);
  if (white.empty()) white = "White player";
  if (black.empty()) black = "Black player";
  const bool names_distinct = white != black;

  Slots h;
  h["date_phrase"] = date_phrase(m.date);
  h["white"] = white;
  h["black"] = black;
  h["moves"] = std::to_string(m.move_count);
  lines.push_back(fill_template(pick(t.templates("header"), rng), h));

  if (m.white_elo && m.black_elo) {
    if (*m.white_elo == *m.black_elo) {
      h["elo"] = std::to_string(*m.white_elo);
      lines.push_back(fill_template(pick(t.templates("elo_equal"), rng), h));
    } else {
      const bool white_high = *m.white_elo > *m.black_elo;
      h["high"] = white_high ? white : black;
      h["low"] = white_high ? black : white;
      h["high_elo"] = std::to_string(white_high ? *m.white_elo : *m.black_elo);
      h["low_elo"] = std::to_string(white_high ? *m.black_elo : *m.white_elo);
      lines.push_back(fill_template(pick(t.templates("elo_high"), rng), h));
      lines.push_back(fill_template(pick(t.templates("elo_low"), rng), h));
    }
  } else if (m.white_elo || m.black_elo) {
    h["player"] = m.white_elo ? white : black;
    h["elo"] = std::to_string(m.white_elo ? *m.white_elo : *m.black_elo);
    lines.push_back(fill_template(pick(t.templates("elo_single"), rng), h));
  }

  std::string end_event = "game_end_unknown";
  if (m.result == GameResult::WhiteWin || m.result == GameResult::BlackWin) {
    const bool white_won = m.result == GameResult::WhiteWin;
    h["winner"] = white_won ? white : black;
    h["loser"] = white_won ? black : white;
    const auto& we = white_won ? m.white_elo : m.black_elo;
    const auto& le = white_won ? m.black_elo : m.white_elo;
    const bool upset = we && le && *we < *le;
    lines.push_back(fill_template(pick(t.templates(upset ? "result_upset" : "result_win"), rng), h));
    end_event = "game_end_win";
  } else if (m.result == GameResult::Draw) {
    lines.push_back(fill_template(pick(t.templates("result_draw"), rng), h));
    end_event = "game_end_draw";
  } else {
    lines.push_back(fill_template(pick(t.templates("result_unknown"), rng), h));
  }

  if (auto op = opening_for_eco(m.eco_code)) {
    h["opening"] = op->opening;
    if (op->defense) {
      h["defense"] = *op->defense;
      lines.push_back(fill_template(pick(t.templates("opening_reply"), rng), h));
    } else {
      lines.push_back(fill_template(pick(t.templates("opening"), rng), h));
    }
  }

  MoveVoice voice;
  if (names_distinct) voice = {white, black};
  for (std::size_t i = 0; i < g.moves.size(); ++i) {
    const MoveRecord& rec = g.moves[i];
    if (is_castle_rook(g.moves, i)) continue;
    const MoveRecord* rook =
        (is_castle(rec.special) && i + 1 < g.moves.size() && is_castle_rook(g.moves, i + 1))
            ? &g.moves[i + 1]
            : nullptr;
    // White's moves carry the move number; Black's inherit it.
    lines.push_back(render_move_sentence(t, rec, rook, voice, rec.color == Color::White, rng));
  }
  if (!g.moves.empty()) lines.push_back(fill_template(pick(t.templates(end_event), rng), h));
  return lines;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

inline std::string narrate_game(const GameRecord& g, const TemplateSet& t) {
  return join_lines(narrate_game_lines(g, t));
}

// ── Corpus ──────────────────────────────────────────────────────────────────

struct NarrationStats {
  std::size_t games = 0;
  std::size_t train_games = 0;
  std::size_t eval_games = 0;
  std::size_t total_lines = 0;
  std::size_t train_lines = 0;
  std::size_t eval_lines = 0;
};

struct NarratedCorpus {
  std::vector<std::string> train;
  std::vector<std::string> eval;
  NarrationStats stats;
};

/// Narrates every game and splits whole games between train and eval so
/// that about `split_fraction` of the lines land in train.
inline NarratedCorpus narrate_corpus(const std::vector<GameRecord>& games, const TemplateSet& t,
                                     double split_fraction) {
  if (games.empty()) throw EmptyCorpus("no games to narrate");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw ConfigError("split fraction must lie in (0, 1)");
  std::vector<std::vector<std::string>> per_game;
  per_game.reserve(games.size());
  std::size_t total = 0;
  for (const auto& g : games) {
    per_game.push_back(narrate_game_lines(g, t));
    total += per_game.back().size();
  }
  std::vector<std::size_t> order(games.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(t.seed, 0x5eed));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  NarratedCorpus out;
  const double target = split_fraction * static_cast<double>(total);
  for (std::size_t idx : order) {
    auto& lines = per_game[idx];
    const bool to_train = static_cast<double>(out.train.size()) < target;
    auto& dst = to_train ? out.train : out.eval;
    dst.insert(dst.end(), lines.begin(), lines.end());
    ++(to_train ? out.stats.train_games : out.stats.eval_games);
  }
  out.stats.games = games.size();
  out.stats.total_lines = total;
  out.stats.train_lines = out.train.size();
  out.stats.eval_lines = out.eval.size();
  return out;
}

// ── Readability ─────────────────────────────────────────────────────────────

namespace readability_detail {

// Vowel-group count with silent-e correction. Tokens containing digits are
// read aloud character by character ("c4" -> "see four").
inline int syllables(std::string_view word) {
  bool has_digit = false;
  for (char c : word) has_digit |= std::isdigit(static_cast<unsigned char>(c)) != 0;
  if (has_digit) {
    int n = 0;
    for (char c : word) {
      if (std::isdigit(static_cast<unsigned char>(c))) n += (c == '7' || c == '0') ? 2 : 1;
      else if (std::isalpha(static_cast<unsigned char>(c))) n += (c == 'w' || c == 'W') ? 3 : 1;
    }
    return std::max(n, 1);
  }
  std::string w;
  for (char c : word)
    if (std::isalpha(static_cast<unsigned char>(c)))
      w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (w.empty()) return 0;
  auto vowel = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; };
  int count = 0;
  bool prev = false;
  for (char c : w) {
    const bool v = vowel(c);
    if (v && !prev) ++count;
    prev = v;
  }
  if (w.size() > 2 && w.back() == 'e' && !vowel(w[w.size() - 2]) &&
      !(w[w.size() - 2] == 'l' && w.size() > 3 && !vowel(w[w.size() - 3])))
    --count;
  if (w.size() > 3 && w.ends_with("es") && !vowel(w[w.size() - 3]) && w[w.size() - 3] != 's' &&
      w[w.size() - 3] != 'x' && w[w.size() - 3] != 'z' && w[w.size() - 3] != 'c' && w[w.size() - 3] != 'g')
    --count;
  if (w.size() > 3 && w.ends_with("ed") && w[w.size() - 3] != 't' && w[w.size() - 3] != 'd') --count;
  return std::max(count, 1);
}

}  // namespace readability_detail

struct TextCounts {
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t syllables = 0;
};

inline TextCounts count_text(std::string_view text) {
  TextCounts c;
  bool in_sentence = false;
  std::string word;
  auto end_word = [&] {
    bool any_alnum = false;
    for (char ch : word) any_alnum |= std::isalnum(static_cast<unsigned char>(ch)) != 0;
    if (any_alnum) {
      ++c.words;
      c.syllables += static_cast<std::size_t>(readability_detail::syllables(word));
      in_sentence = true;
    }
    word.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      end_word();
      continue;
    }
    const bool terminal = ch == '.' || ch == '!' || ch == '?';
    const bool at_break = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (terminal && at_break) {
      end_word();
      if (in_sentence) ++c.sentences;
      in_sentence = false;
      continue;
    }
    word += ch;
  }
  end_word();
  if (in_sentence) ++c.sentences;
  return c;
}

/// Flesch-Kincaid grade level. Throws EmptyText when there is no sentence.
inline double readability_score(std::string_view text) {
  auto c = count_text(text);
  if (c.words == 0 || c.sentences == 0) throw EmptyText("text has no sentences");
  return 0.39 * static_cast<double>(c.words) / static_cast<double>(c.sentences) +
         11.8 * static_cast<double>(c.syllables) / static_cast<double>(c.words) - 15.59;
}

}  // namespace chessmap
