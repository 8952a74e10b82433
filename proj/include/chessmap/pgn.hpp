#pragma once

/// @file pgn.hpp
/// PGN archive parsing with SAN origin resolution, and the per-move
/// geometric legality audit.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chessmap/core.hpp"
#include "chessmap/error.hpp"
#include "chessmap/position.hpp"
#include "chessmap/records.hpp"

namespace chessmap {

struct PgnFailure {
  std::size_t game_index = 0;
  std::string kind;  // "PgnSyntaxError" or "DisambiguationError"
  std::string token;
  std::string message;
};

struct PgnParseReport {
  std::vector<GameRecord> games;
  std::vector<PgnFailure> failures;
};

namespace pgn_detail {

struct RawGame {
  std::map<std::string, std::string> tags;
  std::vector<std::string> san;
  std::string terminator;
  std::optional<PgnFailure> failure;
};

inline GameDate parse_date(std::string_view s) {
  GameDate d;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    if (pos + len > s.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  d.year = field(0, 4);
  d.month = field(5, 2);
  d.day = field(8, 2);
  if (d.month && (*d.month < 1 || *d.month > 12)) d.month.reset();
  if (d.day && (*d.day < 1 || *d.day > 31)) d.day.reset();
  return d;
}

inline std::optional<int> parse_elo(const std::map<std::string, std::string>& tags, const char* key) {
  auto it = tags.find(key);
  if (it == tags.end() || it->second.empty()) return std::nullopt;
  int v = 0;
  for (char c : it->second) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
    if (v > 100000) return std::nullopt;
  }
  return v > 0 ? std::optional<int>(v) : std::nullopt;
}

inline bool is_result_token(std::string_view t) {
  return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*";
}

// Splits a document into raw games: tag pairs plus mainline SAN tokens.
// Comments, NAGs, variations and move numbers are dropped.
inline std::vector<RawGame> split_games(std::string_view text) {
  std::vector<RawGame> games;
  RawGame cur;
  bool in_movetext = false;
  bool has_content = false;
  auto flush = [&] {
    if (has_content) games.push_back(std::move(cur));
    cur = RawGame{};
    in_movetext = false;
    has_content = false;
  };
  auto fail = [&](std::string token) {
    if (!cur.failure)
      cur.failure = PgnFailure{games.size(), "PgnSyntaxError", token,
                               "unexpected token '" + token + "'"};
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  bool line_start = true;
  while (i < n) {
    const char c = text[i];
    if (c == '\n') {
      line_start = true;
      ++i;
      continue;
    }
    if (line_start && c == '%') {  // escape line
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    line_start = false;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '[') {
      if (in_movetext) flush();
      has_content = true;
      std::size_t j = i + 1;
      while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      std::size_t name_start = j;
      while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string name(text.substr(name_start, j - name_start));
      while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (name.empty() || j >= n || text[j] != '"') {
        std::size_t e = text.find('\n', i);
        fail(std::string(text.substr(i, (e == std::string_view::npos ? n : e) - i)));
        i = e == std::string_view::npos ? n : e;
        continue;
      }
      std::string value;
      ++j;
      while (j < n && text[j] != '"') {
        if (text[j] == '\\' && j + 1 < n) ++j;
        value += text[j++];
      }
      ++j;
      while (j < n && text[j] != ']' && text[j] != '\n') ++j;
      if (j >= n || text[j] != ']') {
        fail("[" + name);
        i = j;
        continue;
      }
      cur.tags[name] = value;
      i = j + 1;
      continue;
    }
    if (c == '{') {
      std::size_t e = text.find('}', i);
      i = e == std::string_view::npos ? n : e + 1;
      continue;
    }
    if (c == ';') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '(') {
      int depth = 0;
      while (i < n) {
        if (text[i] == '{') {
          std::size_t e = text.find('}', i);
          i = e == std::string_view::npos ? n : e + 1;
          continue;
        }
        if (text[i] == '(') ++depth;
        if (text[i] == ')' && --depth == 0) {
          ++i;
          break;
        }
        ++i;
      }
      continue;
    }
    // movetext token
    std::size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '{' &&
           text[j] != '(' && text[j] != ')' && text[j] != ';' && text[j] != '[')
      ++j;
    std::string tok(text.substr(i, j - i));
    i = j;
    if (tok.empty()) {
      fail(std::string(1, text[i]));
      ++i;
      continue;
    }
    in_movetext = true;
    has_content = true;
    if (is_result_token(tok)) {
      cur.terminator = tok;
      flush();
      continue;
    }
    if (tok[0] == '$') continue;  // NAG
    // strip a leading move number "12." / "12..."
    std::size_t k = 0;
    while (k < tok.size() && std::isdigit(static_cast<unsigned char>(tok[k]))) ++k;
    if (k > 0 && k < tok.size() && tok[k] == '.') {
      while (k < tok.size() && tok[k] == '.') ++k;
      tok = tok.substr(k);
    } else if (k == tok.size()) {
      continue;  // bare move number without dot
    }
    if (tok.empty()) continue;
    cur.san.push_back(tok);
  }
  flush();
  return games;
}

struct SanParts {
  std::optional<SpecialMove> castle;
  PieceKind piece = PieceKind::Pawn;
  std::optional<int> from_file;
  std::optional<int> from_rank;
  std::optional<Square> to;
  std::optional<PieceKind> promotion;
};

inline std::optional<SanParts> parse_san(std::string_view tok) {
  std::string s(tok);
  while (!s.empty() && (s.back() == '+' || s.back() == '#' || s.back() == '!' || s.back() == '?'))
    s.pop_back();
  SanParts out;
  if (s == "O-O" || s == "0-0") {
    out.castle = SpecialMove::CastleKingside;
    out.piece = PieceKind::King;
    return out;
  }
  if (s == "O-O-O" || s == "0-0-0") {
    out.castle = SpecialMove::CastleQueenside;
    out.piece = PieceKind::King;
    return out;
  }
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  if (std::isupper(static_cast<unsigned char>(s[0]))) {
    auto p = Position::piece_from_letter(s[0]);
    if (!p) return std::nullopt;
    out.piece = *p;
    pos = 1;
  }
  // promotion suffix "=Q" or "Q"
  if (s.size() >= 2 && out.piece == PieceKind::Pawn) {
    char last = s.back();
    if (std::isupper(static_cast<unsigned char>(last))) {
      auto p = Position::piece_from_letter(last);
      if (!p || *p == PieceKind::Pawn || *p == PieceKind::King) return std::nullopt;
      out.promotion = *p;
      s.pop_back();
      if (!s.empty() && s.back() == '=') s.pop_back();
    }
  }
  if (s.size() < pos + 2) return std::nullopt;
  out.to = Square::parse(std::string_view(s).substr(s.size() - 2));
  if (!out.to) return std::nullopt;
  std::string_view middle = std::string_view(s).substr(pos, s.size() - 2 - pos);
  for (char c : middle) {
    if (c == 'x' || c == ':' || c == '-') continue;
    if (c >= 'a' && c <= 'h' && !out.from_file) {
      out.from_file = c - 'a';
    } else if (c >= '1' && c <= '8' && !out.from_rank) {
      out.from_rank = c - '1';
    } else {
      return std::nullopt;
    }
  }
  return out;
}

inline std::optional<ChessMove> resolve(const Position& pos, const SanParts& san, std::string& why) {
  std::vector<ChessMove> hits;
  for (const ChessMove& m : pos.legal_moves()) {
    if (san.castle) {
      if (m.special == *san.castle) hits.push_back(m);
      continue;
    }
    if (m.piece != san.piece || is_castle(m.special) || m.to != *san.to) continue;
    if (san.from_file && m.from.file() != *san.from_file) continue;
    if (san.from_rank && m.from.rank() != *san.from_rank) continue;
    if (m.promotion != san.promotion) continue;
    hits.push_back(m);
  }
  if (hits.size() == 1) return hits.front();
  why = hits.empty() ? "no legal origin square" : "ambiguous origin square";
  return std::nullopt;
}

}  // namespace pgn_detail

/// Converts a resolved move into one record, or two for a castle (king then rook).
inline std::vector<MoveRecord> move_records(const Position& before, const ChessMove& m,
                                            const std::string& game_id, int move_number) {
  Position after = before;
  after.play(m);
  MoveRecord rec;
  rec.game_id = game_id;
  rec.move_number = move_number;
  rec.color = before.side_to_move();
  rec.piece = m.piece;
  rec.from = m.from;
  rec.to = m.to;
  rec.is_capture = m.is_capture;
  rec.special = m.special;
  rec.is_check = after.in_check(after.side_to_move());
  rec.source = MoveSource::Human;
  std::vector<MoveRecord> out{rec};
  if (is_castle(m.special)) {
    const int home = m.from.rank();
    const bool king_side = m.special == SpecialMove::CastleKingside;
    MoveRecord rook = rec;
    rook.piece = PieceKind::Rook;
    rook.special = SpecialMove::None;
    rook.is_check = false;
    rook.from = *Square::from_coords(king_side ? 7 : 0, home);
    rook.to = *Square::from_coords(king_side ? 5 : 3, home);
    out.push_back(rook);
  }
  return out;
}

/// Parses every game in a PGN document. Failed games are listed in
/// `failures` and omitted from `games`.
inline PgnParseReport parse_pgn_report(std::string_view text, std::string_view id_prefix = "g") {
  PgnParseReport report;
  auto raw = pgn_detail::split_games(text);
  for (std::size_t gi = 0; gi < raw.size(); ++gi) {
    auto& rg = raw[gi];
    if (rg.failure) {
      rg.failure->game_index = gi;
      report.failures.push_back(*rg.failure);
      continue;
    }
    GameRecord g;
    g.game_id = std::string(id_prefix) + std::to_string(gi);
    auto tag = [&](const char* k) {
      auto it = rg.tags.find(k);
      return it == rg.tags.end() ? std::string() : it->second;
    };
    g.meta.date = pgn_detail::parse_date(tag("Date"));
    g.meta.white_name = tag("White");
    g.meta.black_name = tag("Black");
    g.meta.result = result_from_token(tag("Result"));
    if (g.meta.result == GameResult::Unknown) g.meta.result = result_from_token(rg.terminator);
    g.meta.white_elo = pgn_detail::parse_elo(rg.tags, "WhiteElo");
    g.meta.black_elo = pgn_detail::parse_elo(rg.tags, "BlackElo");
    if (auto eco = tag("ECO"); eco.size() == 3) g.meta.eco_code = eco;

    Position pos = Position::initial();
    std::optional<PgnFailure> failure;
    int plies = 0;
    for (const std::string& tok : rg.san) {
      auto parts = pgn_detail::parse_san(tok);
      if (!parts) {
        failure = PgnFailure{gi, "PgnSyntaxError", tok, "unexpected token '" + tok + "'"};
        break;
      }
      std::string why;
      auto move = pgn_detail::resolve(pos, *parts, why);
      if (!move) {
        failure = PgnFailure{gi, "DisambiguationError", tok, why};
        break;
      }
      for (auto& rec : move_records(pos, *move, g.game_id, pos.fullmove_number()))
        g.moves.push_back(std::move(rec));
      pos.play(*move);
      ++plies;
    }
    if (failure) {
      report.failures.push_back(*failure);
      continue;
    }
    g.meta.move_count = (plies + 1) / 2;
    report.games.push_back(std::move(g));
  }
  return report;
}

/// Strict variant: throws the first PgnSyntaxError or DisambiguationError.
inline std::vector<GameRecord> parse_pgn(std::string_view text, std::string_view id_prefix = "g") {
  auto report = parse_pgn_report(text, id_prefix);
  if (!report.failures.empty()) {
    const auto& f = report.failures.front();
    if (f.kind == "DisambiguationError")
      throw DisambiguationError(f.game_index, f.token, f.message);
    throw PgnSyntaxError(f.game_index, f.token);
  }
  return std::move(report.games);
}

// ── Legality audit ──────────────────────────────────────────────────────────

struct AuditReport {
  std::size_t total = 0;
  std::size_t illegal = 0;
  std::array<std::size_t, 6> total_by_piece{};
  std::array<std::size_t, 6> illegal_by_piece{};
  std::vector<MoveRecord> illegal_moves;
};

inline void audit_move(AuditReport& r, const MoveRecord& m) {
  ++r.total;
  ++r.total_by_piece[piece_index(m.piece)];
  if (!is_legal_geometry(m.geometry())) {
    ++r.illegal;
    ++r.illegal_by_piece[piece_index(m.piece)];
    r.illegal_moves.push_back(m);
  }
}

inline AuditReport legality_audit(const std::vector<GameRecord>& games) {
  AuditReport r;
  for (const auto& g : games)
    for (const auto& m : g.moves) audit_move(r, m);
  return r;
}

inline AuditReport legality_audit(const std::vector<MoveRecord>& moves) {
  AuditReport r;
  for (const auto& m : moves) audit_move(r, m);
  return r;
}

}  // namespace chessmap
