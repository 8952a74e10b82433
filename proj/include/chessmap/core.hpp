#pragma once

/// @file core.hpp
/// Board coordinates, piece taxonomy and per-piece geometric move legality.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chessmap/error.hpp"

namespace chessmap {

// ── Square ──────────────────────────────────────────────────────────────────
// file 0..7 = a..h, rank 0..7 = 1..8. Only constructible through the checked
// factories, so an off-board Square cannot exist. Defaults to a1.
class Square {
 public:
  constexpr Square() noexcept : file_(0), rank_(0) {}

  static constexpr std::optional<Square> from_coords(int file, int rank) noexcept {
    if (file < 0 || file > 7 || rank < 0 || rank > 7) return std::nullopt;
    return Square(static_cast<std::uint8_t>(file), static_cast<std::uint8_t>(rank));
  }

  // Index in little-endian rank-file order: a1=0, b1=1, ..., h8=63.
  static constexpr Square from_index(int index) {
    if (index < 0 || index > 63) throw MalformedSquare("square index out of range");
    return Square(static_cast<std::uint8_t>(index & 7), static_cast<std::uint8_t>(index >> 3));
  }

  static constexpr std::optional<Square> parse(std::string_view name) noexcept {
    if (name.size() != 2) return std::nullopt;
    return from_coords(name[0] - 'a', name[1] - '1');
  }

  constexpr int file() const noexcept { return file_; }
  constexpr int rank() const noexcept { return rank_; }
  constexpr int index() const noexcept { return rank_ * 8 + file_; }

  std::string name() const {
    return {static_cast<char>('a' + file_), static_cast<char>('1' + rank_)};
  }

  constexpr auto operator<=>(const Square&) const = default;

 private:
  constexpr Square(std::uint8_t file, std::uint8_t rank) noexcept : file_(file), rank_(rank) {}

  std::uint8_t file_;
  std::uint8_t rank_;
};

inline constexpr std::array<Square, 64> all_squares() {
  std::array<Square, 64> out{};
  for (int i = 0; i < 64; ++i) out[static_cast<std::size_t>(i)] = Square::from_index(i);
  return out;
}

/// Parses a lowercase square name such as "d2". Throws MalformedSquare.
inline Square square_from_name(std::string_view name) {
  if (auto sq = Square::parse(name)) return *sq;
  throw MalformedSquare("malformed square name '" + std::string(name) + "'");
}

// ── Pieces and colors ───────────────────────────────────────────────────────
// Order matches the row order of the descriptive-statistics tables.
enum class PieceKind : std::uint8_t { Pawn, Rook, Bishop, Knight, Queen, King };

inline constexpr std::array<PieceKind, 6> kAllPieces = {
    PieceKind::Pawn, PieceKind::Rook, PieceKind::Bishop,
    PieceKind::Knight, PieceKind::Queen, PieceKind::King};

enum class Color : std::uint8_t { White, Black };

inline constexpr std::array<Color, 2> kAllColors = {Color::White, Color::Black};

constexpr Color opposite(Color c) noexcept {
  return c == Color::White ? Color::Black : Color::White;
}

constexpr std::size_t piece_index(PieceKind p) noexcept { return static_cast<std::size_t>(p); }
constexpr std::size_t color_index(Color c) noexcept { return static_cast<std::size_t>(c); }

inline std::string_view piece_name(PieceKind p) noexcept {
  switch (p) {
    case PieceKind::Pawn: return "pawn";
    case PieceKind::Rook: return "rook";
    case PieceKind::Bishop: return "bishop";
    case PieceKind::Knight: return "knight";
    case PieceKind::Queen: return "queen";
    case PieceKind::King: return "king";
  }
  return "?";
}

inline std::optional<PieceKind> piece_from_name(std::string_view s) noexcept {
  for (PieceKind p : kAllPieces)
    if (piece_name(p) == s) return p;
  return std::nullopt;
}

inline std::string_view color_name(Color c) noexcept {
  return c == Color::White ? "white" : "black";
}

inline std::optional<Color> color_from_name(std::string_view s) noexcept {
  if (s == "white") return Color::White;
  if (s == "black") return Color::Black;
  return std::nullopt;
}

enum class SpecialMove : std::uint8_t { None, CastleKingside, CastleQueenside, Promotion };

inline std::string_view special_name(SpecialMove s) noexcept {
  switch (s) {
    case SpecialMove::None: return "none";
    case SpecialMove::CastleKingside: return "castle_kingside";
    case SpecialMove::CastleQueenside: return "castle_queenside";
    case SpecialMove::Promotion: return "promotion";
  }
  return "none";
}

inline std::optional<SpecialMove> special_from_name(std::string_view s) noexcept {
  for (auto m : {SpecialMove::None, SpecialMove::CastleKingside, SpecialMove::CastleQueenside,
                 SpecialMove::Promotion})
    if (special_name(m) == s) return m;
  return std::nullopt;
}

constexpr bool is_castle(SpecialMove s) noexcept {
  return s == SpecialMove::CastleKingside || s == SpecialMove::CastleQueenside;
}

// ── Geometry ────────────────────────────────────────────────────────────────
struct MoveGeometry {
  PieceKind piece;
  Color color;
  Square from;
  Square to;
  bool is_capture = false;
  SpecialMove special = SpecialMove::None;
  bool operator==(const MoveGeometry&) const = default;
};

namespace detail {

constexpr bool rook_line(int df, int dr) noexcept { return (df == 0) != (dr == 0); }
constexpr bool bishop_line(int df, int dr) noexcept { return df != 0 && std::abs(df) == std::abs(dr); }

constexpr bool castle_geometry(Color color, Square from, Square to, SpecialMove special) noexcept {
  const int home = color == Color::White ? 0 : 7;
  if (from.rank() != home || to.rank() != home || from.file() != 4) return false;
  return special == SpecialMove::CastleKingside ? to.file() == 6 : to.file() == 2;
}

}  // namespace detail

/// Whether the displacement is permitted for the piece in isolation: no
/// occupancy, blocking, check or turn order. Castles are accepted only as the
/// king's two-square displacement from its home square.
constexpr bool is_legal_geometry(const MoveGeometry& m) noexcept {
  if (m.from == m.to) return false;
  const int df = m.to.file() - m.from.file();
  const int dr = m.to.rank() - m.from.rank();
  switch (m.piece) {
    case PieceKind::Rook: return detail::rook_line(df, dr);
    case PieceKind::Bishop: return detail::bishop_line(df, dr);
    case PieceKind::Queen: return detail::rook_line(df, dr) || detail::bishop_line(df, dr);
    case PieceKind::Knight: {
      const int a = std::abs(df), b = std::abs(dr);
      return (a == 1 && b == 2) || (a == 2 && b == 1);
    }
    case PieceKind::King:
      if (is_castle(m.special)) return detail::castle_geometry(m.color, m.from, m.to, m.special);
      return std::max(std::abs(df), std::abs(dr)) == 1;
    case PieceKind::Pawn: {
      const int forward = m.color == Color::White ? 1 : -1;
      const int start_rank = m.color == Color::White ? 1 : 6;
      if (m.is_capture) return std::abs(df) == 1 && dr == forward;
      if (df != 0) return false;
      return dr == forward || (dr == 2 * forward && m.from.rank() == start_rank);
    }
  }
  return false;
}

/// Euclidean distance in square units.
inline double board_distance(Square a, Square b) noexcept {
  return std::hypot(static_cast<double>(a.file() - b.file()),
                    static_cast<double>(a.rank() - b.rank()));
}

struct PieceColor {
  PieceKind piece;
  Color color;
  auto operator<=>(const PieceColor&) const = default;
};

/// Every (piece, color) that may make the plain move from -> to.
inline std::vector<PieceColor> pieces_capable(Square from, Square to, bool is_capture) {
  std::vector<PieceColor> out;
  for (PieceKind p : kAllPieces)
    for (Color c : kAllColors)
      if (is_legal_geometry({p, c, from, to, is_capture, SpecialMove::None})) out.push_back({p, c});
  return out;
}

/// Distinct piece kinds in a capability set, in table order.
inline std::vector<PieceKind> distinct_pieces(const std::vector<PieceColor>& set) {
  std::vector<PieceKind> out;
  for (PieceKind p : kAllPieces)
    for (const auto& pc : set)
      if (pc.piece == p) {
        out.push_back(p);
        break;
      }
  return out;
}

}  // namespace chessmap
