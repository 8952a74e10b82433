#pragma once

/// @file extract.hpp
/// Tolerant sentence-level grammar that recovers move records and game
/// metadata from narrative text, whether narrated from PGN or generated.

#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "chessmap/core.hpp"
#include "chessmap/records.hpp"

namespace chessmap {

struct MetaFragments {
  std::optional<GameDate> date;
  std::optional<std::string> white_name;
  std::optional<std::string> black_name;
  std::optional<int> white_elo;
  std::optional<int> black_elo;
  std::optional<GameResult> result;
  std::optional<int> move_count;
  std::optional<std::string> opening;
  std::optional<std::string> defense;
};

struct TextSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  bool operator==(const TextSpan&) const = default;
};

struct LineProvenance {
  std::optional<std::string> prompt;
  std::optional<int> batch;
  std::optional<int> line;
};

struct ExtractionResult {
  std::vector<MoveRecord> moves;
  MetaFragments meta;
  std::vector<TextSpan> unparsed_spans;
  LineProvenance provenance;
};

struct ExtractOptions {
  MoveSource source = MoveSource::Human;
  std::string game_id;
  LineProvenance provenance;
};

namespace extract_detail {

struct Sentence {
  std::size_t offset;
  std::size_t length;
  bool terminated;
};

// Sentences end at . ! ? followed by whitespace or end of text, or at a
// newline. A trailing piece without terminal punctuation is unterminated.
inline std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end, bool terminated) {
    std::size_t b = start;
    while (b < end && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    std::size_t e = end;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    if (e > b) out.push_back({b, e - b, terminated});
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      emit(i, false);
      start = i + 1;
      continue;
    }
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
      emit(i + 1, true);
      start = i + 1;
    }
  }
  emit(text.size(), false);
  return out;
}

struct Token {
  std::string lower;
  std::size_t offset;  // relative to sentence start
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-' ||
           (static_cast<unsigned char>(c) >= 0x80);
  };
  while (i < s.size()) {
    if (!word_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string w;
    while (j < s.size() && word_char(s[j])) {
      w += static_cast<char>(std::tolower(static_cast<unsigned char>(s[j])));
      ++j;
    }
    out.push_back({std::move(w), i});
    i = j;
  }
  return out;
}

// Letter followed by digits: a square name, possibly off-board ("i9").
inline bool square_like(std::string_view w) {
  if (w.size() < 2 || w.size() > 3) return false;
  if (!std::isalpha(static_cast<unsigned char>(w[0]))) return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(w[i]))) return false;
  return true;
}

inline std::optional<Color> color_word(std::string_view w) {
  if (w == "white" || w == "white's") return Color::White;
  if (w == "black" || w == "black's") return Color::Black;
  return std::nullopt;
}

inline bool is_capture_word(std::string_view w) {
  return w == "takes" || w == "take" || w == "took" || w == "taking" || w == "captures" ||
         w == "capture" || w == "captured" || w == "capturing" || w == "x";
}

inline bool starts_with(std::string_view w, std::string_view p) { return w.substr(0, p.size()) == p; }

inline std::optional<int> to_int(std::string_view s) {
  if (s.empty() || s.size() > 6) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

inline std::optional<int> month_number(std::string_view name) {
  static constexpr std::array<std::string_view, 12> names = {
      "January", "February", "March", "April", "May", "June", "July",
      "August", "September", "October", "November", "December"};
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i) + 1;
  return std::nullopt;
}

struct MetaPatterns {
  std::regex header{R"(^(On|In) ([^,]*?)(?:, (\d{4}))?, (.+?) (?:played|faced|sat down against|met) (.+?)\.?$)"};
  std::regex elo_ranked{R"(^(.+?) was the (?:higher|higer|lower)-ranked player, with an Elo rating of (\d+))"};
  std::regex elo_ranked_inner{R"(^(.+?), with an Elo rating of (\d+), was the (?:higher|higer|lower)-ranked player)"};
  std::regex elo_rated{R"(^(.+?) was rated (?:higher|lower), with an Elo rating of (\d+))"};
  std::regex elo_single{R"(^(.+?) (?:had|played with|came into the game with) an Elo rating of (\d+))"};
  std::regex elo_both{R"(^Both players .*Elo rating of (\d+))"};
  std::regex win{R"(^(.+?) (?:defeated|beat|overcame|surprised|won in a surprise victory over|pulled off an upset against) (.+?) in a game)"};
  std::regex draw{R"(^(.+?) and (.+?) (?:drew|agreed to a draw|split the point))"};
  std::regex lasted{R"(lasted (\d+) moves)"};
  std::regex opening{R"(white (?:uses|chooses|relies on) the (.+?) opening)"};
  std::regex defense{R"(black (?:counters|countering|answers) with (?:the )?(.+?)\.?$)"};

  static const MetaPatterns& get() {
    static const MetaPatterns p;
    return p;
  }
};

struct Context {
  std::map<std::string, Color> names;  // display name -> color
  std::optional<int> move_number;
  std::optional<std::size_t> last_move_head;
};

inline std::string trim_name(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

// Returns true when the sentence was consumed as metadata.
inline bool parse_meta(const std::string& s, Context& ctx, MetaFragments& meta) {
  const auto& P = MetaPatterns::get();
  std::smatch m;
  bool consumed = false;
  auto name_color = [&](const std::string& name) -> std::optional<Color> {
    auto it = ctx.names.find(name);
    if (it == ctx.names.end()) return std::nullopt;
    return it->second;
  };
  auto set_elo = [&](const std::string& name, int elo) {
    auto c = name_color(trim_name(name));
    if (c == Color::White) meta.white_elo = elo;
    if (c == Color::Black) meta.black_elo = elo;
  };
  if (s.find(" Elo rating of ") != std::string::npos) {
    if (std::regex_search(s, m, P.elo_both)) {
      meta.white_elo = meta.black_elo = to_int(m[1].str());
    } else if (std::regex_search(s, m, P.elo_ranked) || std::regex_search(s, m, P.elo_ranked_inner) ||
               std::regex_search(s, m, P.elo_rated) || std::regex_search(s, m, P.elo_single)) {
      if (auto v = to_int(m[2].str())) set_elo(m[1].str(), *v);
    }
    return true;
  }
  if (s.find(" in a game that lasted ") != std::string::npos || s.find(" lasted ") != std::string::npos) {
    if (std::regex_search(s, m, P.win)) {
      auto c = name_color(trim_name(m[1].str()));
      if (c) meta.result = *c == Color::White ? GameResult::WhiteWin : GameResult::BlackWin;
      consumed = true;
    } else if (std::regex_search(s, m, P.draw)) {
      meta.result = GameResult::Draw;
      consumed = true;
    }
    if (std::regex_search(s, m, P.lasted)) {
      meta.move_count = to_int(m[1].str());
      consumed = true;
    }
    if (consumed) return true;
  }
  bool opening_info = false;
  if (s.find("opening") != std::string::npos && std::regex_search(s, m, P.opening)) {
    meta.opening = m[1].str();
    opening_info = true;
  }
  if (s.find("black") != std::string::npos && std::regex_search(s, m, P.defense)) {
    meta.defense = m[1].str();
    opening_info = true;
  }
  if (opening_info) return true;
  if ((s.starts_with("On ") || s.starts_with("In ")) &&
      (s.find(" played ") != std::string::npos || s.find(" faced ") != std::string::npos ||
       s.find(" sat down against ") != std::string::npos || s.find(" met ") != std::string::npos) &&
      std::regex_search(s, m, P.header)) {
    GameDate d;
    if (m[1].str() == "On" && m[3].matched) {
      // "April 21"
      auto md = m[2].str();
      auto sp = md.find(' ');
      if (sp != std::string::npos) {
        d.month = month_number(md.substr(0, sp));
        d.day = to_int(md.substr(sp + 1));
      }
      d.year = to_int(m[3].str());
    } else if (m[1].str() == "In") {
      auto md = m[2].str();
      auto sp = md.find(' ');
      if (sp != std::string::npos) {
        d.month = month_number(md.substr(0, sp));
        d.year = to_int(md.substr(sp + 1));
      } else {
        d.year = to_int(md);
      }
    }
    if (d.year || d.month || d.day) meta.date = d;
    ctx = Context{};
    const std::string white = trim_name(m[4].str()), black = trim_name(m[5].str());
    meta.white_name = white;
    meta.black_name = black;
    if (white != black) {
      ctx.names[white] = Color::White;
      ctx.names[black] = Color::Black;
    }
    return true;
  }
  return false;
}

// Color of the sentence subject from a name binding or a leading color word.
inline std::optional<Color> subject_color(std::string_view body, const std::vector<Token>& toks,
                                          std::size_t first, const Context& ctx) {
  std::optional<Color> best;
  std::size_t best_len = 0;
  for (const auto& [name, color] : ctx.names) {
    if (name.size() > best_len && body.substr(0, name.size()) == name &&
        (body.size() == name.size() || !std::isalnum(static_cast<unsigned char>(body[name.size()])))) {
      best = color;
      best_len = name.size();
    }
  }
  if (best) return best;
  if (first < toks.size()) return color_word(toks[first].lower);
  return std::nullopt;
}

}  // namespace extract_detail

/// Recovers moves and metadata from narrative text. Never throws; sentences
/// that look like moves but cannot be read land in `unparsed_spans`.
inline ExtractionResult extract_moves(std::string_view text, const ExtractOptions& opts = {}) {
  using namespace extract_detail;
  ExtractionResult result;
  result.provenance = opts.provenance;
  Context ctx;

  auto make_record = [&](PieceKind piece, Color color, Square from, Square to) {
    MoveRecord r;
    r.game_id = opts.game_id;
    r.move_number = ctx.move_number;
    r.color = color;
    r.piece = piece;
    r.from = from;
    r.to = to;
    r.source = opts.source;
    r.prompt = opts.provenance.prompt;
    r.batch = opts.provenance.batch;
    r.line = opts.provenance.line;
    return r;
  };

  for (const Sentence& sent : split_sentences(text)) {
    const std::string s(text.substr(sent.offset, sent.length));
    auto unparsed = [&] { result.unparsed_spans.push_back({sent.offset, sent.length}); };
    if (!sent.terminated) {
      unparsed();
      continue;
    }
    auto toks = tokenize(s);
    if (toks.empty()) continue;

    // "In move N," / "On move N" / "At move N"
    std::size_t first = 0;
    if (toks.size() >= 3 && (toks[0].lower == "in" || toks[0].lower == "on" || toks[0].lower == "at") &&
        toks[1].lower == "move") {
      if (auto n = to_int(toks[2].lower)) {
        ctx.move_number = *n;
        first = 3;
      }
    }
    std::string_view body = std::string_view(s).substr(first < toks.size() ? toks[first].offset : s.size());

    bool has_from = false, castle = false, capture = false, promotion = false, check = false;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const auto& t = toks[i];
      has_from |= t.lower == "from";
      // "where it turns into a new piece"
      promotion |= t.lower == "turns" && i + 1 < toks.size() && toks[i + 1].lower == "into";
      castle |= starts_with(t.lower, "castl");
      capture |= is_capture_word(t.lower);
      promotion |= starts_with(t.lower, "promot");
      check |= t.lower == "check" || t.lower == "checkmate";
    }

    if (!has_from && !castle) {
      if (check) {
        if (ctx.last_move_head) result.moves[*ctx.last_move_head].is_check = true;
        continue;
      }
      if (first == 0) parse_meta(s, ctx, result.meta);
      continue;
    }

    // "<piece> from <sq> to <sq>" anchored at the i-th "from"
    struct Leg {
      std::optional<PieceKind> piece;
      std::string from, to;
      std::size_t piece_pos;
    };
    std::vector<Leg> legs;
    bool malformed = false;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].lower != "from") continue;
      if (i + 1 >= toks.size() || !square_like(toks[i + 1].lower)) {
        malformed = true;
        continue;
      }
      Leg leg;
      leg.piece_pos = i > 0 ? i - 1 : 0;
      if (i > 0) leg.piece = piece_from_name(toks[i - 1].lower);
      // "the king goes from ..."
      if (!leg.piece && i > 1 && (leg.piece = piece_from_name(toks[i - 2].lower))) leg.piece_pos = i - 2;
      leg.from = toks[i + 1].lower;
      if (i + 3 < toks.size() && toks[i + 2].lower == "to" && square_like(toks[i + 3].lower))
        leg.to = toks[i + 3].lower;
      legs.push_back(leg);
    }
    if (legs.empty() || malformed) {
      unparsed();
      continue;
    }
    if (legs.front().to.empty()) {
      // "... on <sq> with <piece> from <sq>" / "<piece> from <sq> captures on <sq>"
      for (std::size_t i = 0; i + 1 < toks.size(); ++i)
        if (toks[i].lower == "on" && square_like(toks[i + 1].lower)) {
          legs.front().to = toks[i + 1].lower;
          break;
        }
    }

    auto resolve_color = [&](const Leg& leg) -> std::optional<Color> {
      if (leg.piece_pos > 0)
        if (auto c = color_word(toks[leg.piece_pos - 1].lower)) return c;
      return subject_color(body, toks, first, ctx);
    };

    if (castle) {
      const Leg* king = nullptr;
      const Leg* rook = nullptr;
      for (const auto& l : legs) {
        if (l.piece == PieceKind::King && !king) king = &l;
        if (l.piece == PieceKind::Rook && !rook) rook = &l;
      }
      auto color = subject_color(body, toks, first, ctx);
      auto kf = king ? Square::parse(king->from) : std::nullopt;
      auto kt = king ? Square::parse(king->to) : std::nullopt;
      if (!king || !kf || !kt || !color || *kf == *kt) {
        unparsed();
        continue;
      }
      SpecialMove side = kt->file() >= kf->file() ? SpecialMove::CastleKingside : SpecialMove::CastleQueenside;
      for (const auto& t : toks) {
        if (t.lower == "kingside" || t.lower == "short") side = SpecialMove::CastleKingside;
        if (t.lower == "queenside" || t.lower == "long") side = SpecialMove::CastleQueenside;
      }
      std::optional<MoveRecord> rook_rec;
      if (rook) {
        auto rf = Square::parse(rook->from), rt = Square::parse(rook->to);
        if (!rf || !rt || *rf == *rt) {
          unparsed();
          continue;
        }
        rook_rec = make_record(PieceKind::Rook, *color, *rf, *rt);
      }
      MoveRecord k = make_record(PieceKind::King, *color, *kf, *kt);
      k.special = side;
      ctx.last_move_head = result.moves.size();
      result.moves.push_back(k);
      if (rook_rec) result.moves.push_back(*rook_rec);
      continue;
    }

    const Leg& leg = legs.front();
    auto from = Square::parse(leg.from);
    auto to = Square::parse(leg.to);
    auto color = resolve_color(leg);
    if (!leg.piece || !from || !to || !color || *from == *to) {
      unparsed();
      continue;
    }
    MoveRecord r = make_record(*leg.piece, *color, *from, *to);
    r.is_capture = capture;
    if (promotion && r.piece == PieceKind::Pawn) r.special = SpecialMove::Promotion;
    ctx.last_move_head = result.moves.size();
    result.moves.push_back(r);
  }
  return result;
}

/// Metadata fragments only (names, ratings, result, length, opening).
inline MetaFragments extract_meta(std::string_view text) { return extract_moves(text).meta; }

}  // namespace chessmap
