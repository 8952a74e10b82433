#pragma once

/// @file position.hpp
/// Full-rules board tracker. Used to resolve SAN origin squares and to
/// simulate legal games. Deliberately independent of is_legal_geometry so
/// the two can be checked against each other.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chessmap/core.hpp"

namespace chessmap {

struct Piece {
  PieceKind kind;
  Color color;
  bool operator==(const Piece&) const = default;
};

struct ChessMove {
  Square from;
  Square to;
  PieceKind piece = PieceKind::Pawn;
  bool is_capture = false;
  bool en_passant = false;
  SpecialMove special = SpecialMove::None;
  std::optional<PieceKind> promotion;
  bool operator==(const ChessMove&) const = default;
};

class Position {
 public:
  static Position initial() {
    Position p;
    constexpr std::array<PieceKind, 8> back = {PieceKind::Rook, PieceKind::Knight, PieceKind::Bishop,
                                               PieceKind::Queen, PieceKind::King, PieceKind::Bishop,
                                               PieceKind::Knight, PieceKind::Rook};
    for (int f = 0; f < 8; ++f) {
      p.set(f, 0, Piece{back[static_cast<std::size_t>(f)], Color::White});
      p.set(f, 1, Piece{PieceKind::Pawn, Color::White});
      p.set(f, 6, Piece{PieceKind::Pawn, Color::Black});
      p.set(f, 7, Piece{back[static_cast<std::size_t>(f)], Color::Black});
    }
    p.castle_ = {true, true, true, true};
    return p;
  }

  const std::optional<Piece>& at(Square s) const { return board_[static_cast<std::size_t>(s.index())]; }
  Color side_to_move() const noexcept { return side_; }
  int fullmove_number() const noexcept { return fullmove_; }
  std::optional<Square> en_passant_target() const noexcept { return ep_; }

  void put(Square s, std::optional<Piece> p) { board_[static_cast<std::size_t>(s.index())] = p; }

  bool is_attacked(Square target, Color by) const {
    const int tf = target.file(), tr = target.rank();
    // pawns
    const int pawn_dir = by == Color::White ? 1 : -1;
    for (int df : {-1, 1})
      if (match(tf - df, tr - pawn_dir, PieceKind::Pawn, by)) return true;
    for (auto [df, dr] : kKnightSteps)
      if (match(tf + df, tr + dr, PieceKind::Knight, by)) return true;
    for (auto [df, dr] : kKingSteps)
      if (match(tf + df, tr + dr, PieceKind::King, by)) return true;
    for (auto [df, dr] : kRookDirs)
      if (slider_hits(tf, tr, df, dr, PieceKind::Rook, by)) return true;
    for (auto [df, dr] : kBishopDirs)
      if (slider_hits(tf, tr, df, dr, PieceKind::Bishop, by)) return true;
    return false;
  }

  std::optional<Square> king_square(Color c) const {
    for (Square s : all_squares())
      if (at(s) == Piece{PieceKind::King, c}) return s;
    return std::nullopt;
  }

  bool in_check(Color c) const {
    auto k = king_square(c);
    return k && is_attacked(*k, opposite(c));
  }

  std::vector<ChessMove> legal_moves() const {
    std::vector<ChessMove> out;
    for (const ChessMove& m : pseudo_legal_moves()) {
      Position next = *this;
      next.apply(m);
      if (!next.in_check(side_)) out.push_back(m);
    }
    return out;
  }

  void play(const ChessMove& m) { apply(m); }

  /// SAN text for a legal move, including disambiguation and check suffix.
  std::string san(const ChessMove& m) const {
    std::string out;
    if (m.special == SpecialMove::CastleKingside) {
      out = "O-O";
    } else if (m.special == SpecialMove::CastleQueenside) {
      out = "O-O-O";
    } else {
      if (m.piece == PieceKind::Pawn) {
        if (m.is_capture) out += static_cast<char>('a' + m.from.file());
      } else {
        out += piece_letter(m.piece);
        bool ambiguous = false, same_file = false, same_rank = false;
        for (const ChessMove& o : legal_moves()) {
          if (o.piece != m.piece || o.to != m.to || o.from == m.from) continue;
          ambiguous = true;
          same_file |= o.from.file() == m.from.file();
          same_rank |= o.from.rank() == m.from.rank();
        }
        if (ambiguous) {
          if (!same_file) {
            out += static_cast<char>('a' + m.from.file());
          } else if (!same_rank) {
            out += static_cast<char>('1' + m.from.rank());
          } else {
            out += m.from.name();
          }
        }
      }
      if (m.is_capture) out += 'x';
      out += m.to.name();
      if (m.promotion) {
        out += '=';
        out += piece_letter(*m.promotion);
      }
    }
    Position next = *this;
    next.apply(m);
    if (next.in_check(next.side_)) out += next.legal_moves().empty() ? '#' : '+';
    return out;
  }

  static char piece_letter(PieceKind k) {
    switch (k) {
      case PieceKind::Pawn: return 'P';
      case PieceKind::Rook: return 'R';
      case PieceKind::Bishop: return 'B';
      case PieceKind::Knight: return 'N';
      case PieceKind::Queen: return 'Q';
      case PieceKind::King: return 'K';
    }
    return '?';
  }

  static std::optional<PieceKind> piece_from_letter(char c) {
    switch (c) {
      case 'P': return PieceKind::Pawn;
      case 'R': return PieceKind::Rook;
      case 'B': return PieceKind::Bishop;
      case 'N': return PieceKind::Knight;
      case 'Q': return PieceKind::Queen;
      case 'K': return PieceKind::King;
      default: return std::nullopt;
    }
  }

 private:
  using Step = std::pair<int, int>;
  static constexpr std::array<Step, 8> kKnightSteps = {
      {{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
  static constexpr std::array<Step, 8> kKingSteps = {
      {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  static constexpr std::array<Step, 4> kRookDirs = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  static constexpr std::array<Step, 4> kBishopDirs = {{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

  void set(int f, int r, Piece p) { put(*Square::from_coords(f, r), p); }

  bool match(int f, int r, PieceKind k, Color c) const {
    auto s = Square::from_coords(f, r);
    return s && at(*s) == Piece{k, c};
  }

  // Walks from (f, r) in direction (df, dr); true if the first piece met is an
  // enemy `line_kind` or queen.
  bool slider_hits(int f, int r, int df, int dr, PieceKind line_kind, Color by) const {
    for (int i = 1; i < 8; ++i) {
      auto s = Square::from_coords(f + df * i, r + dr * i);
      if (!s) return false;
      if (const auto& p = at(*s)) {
        return p->color == by && (p->kind == line_kind || p->kind == PieceKind::Queen);
      }
    }
    return false;
  }

  void push_pawn_move(std::vector<ChessMove>& out, Square from, Square to, bool capture) const {
    const int last = side_ == Color::White ? 7 : 0;
    if (to.rank() == last) {
      for (PieceKind k : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight})
        out.push_back({from, to, PieceKind::Pawn, capture, false, SpecialMove::Promotion, k});
    } else {
      out.push_back({from, to, PieceKind::Pawn, capture, false, SpecialMove::None, std::nullopt});
    }
  }

  std::vector<ChessMove> pseudo_legal_moves() const {
    std::vector<ChessMove> out;
    for (Square from : all_squares()) {
      const auto& p = at(from);
      if (!p || p->color != side_) continue;
      const int f = from.file(), r = from.rank();
      auto add_target = [&](int tf, int tr) {
        auto to = Square::from_coords(tf, tr);
        if (!to) return false;
        const auto& q = at(*to);
        if (q && q->color == side_) return false;
        out.push_back({from, *to, p->kind, q.has_value(), false, SpecialMove::None, std::nullopt});
        return !q.has_value();
      };
      auto slide = [&](auto dirs) {
        for (auto [df, dr] : dirs)
          for (int i = 1; i < 8 && add_target(f + df * i, r + dr * i); ++i) {
          }
      };
      switch (p->kind) {
        case PieceKind::Pawn: {
          const int dir = side_ == Color::White ? 1 : -1;
          const int start = side_ == Color::White ? 1 : 6;
          if (auto one = Square::from_coords(f, r + dir); one && !at(*one)) {
            push_pawn_move(out, from, *one, false);
            if (r == start) {
              auto two = *Square::from_coords(f, r + 2 * dir);
              if (!at(two)) out.push_back({from, two, PieceKind::Pawn, false, false, SpecialMove::None, std::nullopt});
            }
          }
          for (int df : {-1, 1}) {
            auto to = Square::from_coords(f + df, r + dir);
            if (!to) continue;
            const auto& q = at(*to);
            if (q && q->color != side_) {
              push_pawn_move(out, from, *to, true);
            } else if (!q && ep_ == *to) {
              out.push_back({from, *to, PieceKind::Pawn, true, true, SpecialMove::None, std::nullopt});
            }
          }
          break;
        }
        case PieceKind::Knight:
          for (auto [df, dr] : kKnightSteps) add_target(f + df, r + dr);
          break;
        case PieceKind::King:
          for (auto [df, dr] : kKingSteps) add_target(f + df, r + dr);
          add_castles(out, from);
          break;
        case PieceKind::Rook: slide(kRookDirs); break;
        case PieceKind::Bishop: slide(kBishopDirs); break;
        case PieceKind::Queen:
          slide(kRookDirs);
          slide(kBishopDirs);
          break;
      }
    }
    return out;
  }

  void add_castles(std::vector<ChessMove>& out, Square from) const {
    const int home = side_ == Color::White ? 0 : 7;
    if (from != *Square::from_coords(4, home)) return;
    const std::size_t base = side_ == Color::White ? 0 : 2;
    const Color enemy = opposite(side_);
    auto empty = [&](int f) { return !at(*Square::from_coords(f, home)); };
    auto safe = [&](int f) { return !is_attacked(*Square::from_coords(f, home), enemy); };
    auto rook_home = [&](int f) { return at(*Square::from_coords(f, home)) == Piece{PieceKind::Rook, side_}; };
    if (castle_[base] && rook_home(7) && empty(5) && empty(6) && safe(4) && safe(5) && safe(6))
      out.push_back({from, *Square::from_coords(6, home), PieceKind::King, false, false,
                     SpecialMove::CastleKingside, std::nullopt});
    if (castle_[base + 1] && rook_home(0) && empty(1) && empty(2) && empty(3) && safe(4) && safe(3) &&
        safe(2))
      out.push_back({from, *Square::from_coords(2, home), PieceKind::King, false, false,
                     SpecialMove::CastleQueenside, std::nullopt});
  }

  void apply(const ChessMove& m) {
    const int home = side_ == Color::White ? 0 : 7;
    std::optional<Piece> moving = at(m.from);
    put(m.from, std::nullopt);
    if (m.en_passant) put(*Square::from_coords(m.to.file(), m.from.rank()), std::nullopt);
    if (m.promotion) moving = Piece{*m.promotion, side_};
    put(m.to, moving);
    if (m.special == SpecialMove::CastleKingside) {
      put(*Square::from_coords(7, home), std::nullopt);
      put(*Square::from_coords(5, home), Piece{PieceKind::Rook, side_});
    } else if (m.special == SpecialMove::CastleQueenside) {
      put(*Square::from_coords(0, home), std::nullopt);
      put(*Square::from_coords(3, home), Piece{PieceKind::Rook, side_});
    }
    // Castling rights die when a king or rook leaves, or a rook is captured at home.
    auto revoke = [&](Square s) {
      if (s.index() == 4) castle_[0] = castle_[1] = false;
      if (s.index() == 7) castle_[0] = false;
      if (s.index() == 0) castle_[1] = false;
      if (s.index() == 60) castle_[2] = castle_[3] = false;
      if (s.index() == 63) castle_[2] = false;
      if (s.index() == 56) castle_[3] = false;
    };
    revoke(m.from);
    revoke(m.to);
    ep_.reset();
    if (m.piece == PieceKind::Pawn && std::abs(m.to.rank() - m.from.rank()) == 2)
      ep_ = Square::from_coords(m.from.file(), (m.from.rank() + m.to.rank()) / 2);
    if (side_ == Color::Black) ++fullmove_;
    side_ = opposite(side_);
  }

  std::array<std::optional<Piece>, 64> board_{};
  Color side_ = Color::White;
  std::array<bool, 4> castle_{};  // white K, white Q, black K, black Q
  std::optional<Square> ep_;
  int fullmove_ = 1;
};

}  // namespace chessmap
