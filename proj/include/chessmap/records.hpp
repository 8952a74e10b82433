#pragma once

/// @file records.hpp
/// Move and game records shared by ingestion, narration, extraction and storage.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chessmap/core.hpp"

namespace chessmap {

enum class MoveSource : std::uint8_t { Human, Synthetic };

inline std::string_view source_name(MoveSource s) noexcept {
  return s == MoveSource::Human ? "human" : "synthetic";
}

inline std::optional<MoveSource> source_from_name(std::string_view s) noexcept {
  if (s == "human") return MoveSource::Human;
  if (s == "synthetic") return MoveSource::Synthetic;
  return std::nullopt;
}

struct MoveRecord {
  std::string game_id;
  std::optional<int> move_number;  // absent for synthetic text without "In move N" context
  Color color = Color::White;
  PieceKind piece = PieceKind::Pawn;
  Square from;
  Square to;
  bool is_capture = false;
  SpecialMove special = SpecialMove::None;
  bool is_check = false;
  MoveSource source = MoveSource::Human;
  std::optional<std::string> prompt;
  std::optional<int> batch;
  std::optional<int> line;

  MoveGeometry geometry() const { return {piece, color, from, to, is_capture, special}; }
  bool operator==(const MoveRecord&) const = default;
};

enum class GameResult : std::uint8_t { WhiteWin, BlackWin, Draw, Unknown };

inline std::string_view result_token(GameResult r) noexcept {
  switch (r) {
    case GameResult::WhiteWin: return "1-0";
    case GameResult::BlackWin: return "0-1";
    case GameResult::Draw: return "1/2-1/2";
    case GameResult::Unknown: return "*";
  }
  return "*";
}

inline GameResult result_from_token(std::string_view s) noexcept {
  if (s == "1-0") return GameResult::WhiteWin;
  if (s == "0-1") return GameResult::BlackWin;
  if (s == "1/2-1/2") return GameResult::Draw;
  return GameResult::Unknown;
}

// PGN dates may be partial ("2020.??.??").
struct GameDate {
  std::optional<int> year;
  std::optional<int> month;
  std::optional<int> day;
  bool operator==(const GameDate&) const = default;
};

struct GameMeta {
  GameDate date;
  std::string white_name;
  std::string black_name;
  GameResult result = GameResult::Unknown;
  std::optional<int> white_elo;
  std::optional<int> black_elo;
  std::optional<std::string> eco_code;
  int move_count = 0;
  bool operator==(const GameMeta&) const = default;
};

struct GameRecord {
  std::string game_id;
  GameMeta meta;
  std::vector<MoveRecord> moves;
};

/// True when `moves[i]` is the rook half of a castle recorded just before it.
inline bool is_castle_rook(const std::vector<MoveRecord>& moves, std::size_t i) {
  return i > 0 && moves[i].piece == PieceKind::Rook && is_castle(moves[i - 1].special) &&
         moves[i - 1].color == moves[i].color;
}

}  // namespace chessmap
