#pragma once

// Weighted random legal games for fixtures and pilots. Weights push play
// toward human habits (development, captures, castling, central squares).

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "chessmap/pgn.hpp"
#include "chessmap/position.hpp"
#include "chessmap/random.hpp"
#include "chessmap/records.hpp"

namespace chessmap::fixtures {

struct SimulatedGame {
  GameRecord record;
  std::vector<std::string> san;
};

inline double piece_value(PieceKind k) {
  switch (k) {
    case PieceKind::Pawn: return 1;
    case PieceKind::Knight:
    case PieceKind::Bishop: return 3;
    case PieceKind::Rook: return 5;
    case PieceKind::Queen: return 9;
    case PieceKind::King: return 0;
  }
  return 0;
}

inline double move_weight(const Position& pos, const ChessMove& m) {
  double w = 1.0;
  const int moveno = pos.fullmove_number();
  const int back = pos.side_to_move() == Color::White ? 0 : 7;
  if (m.is_capture) {
    const auto& victim = pos.at(m.to);
    w *= 3.0 + (victim ? piece_value(victim->kind) : 1.0);
  }
  if (is_castle(m.special)) w *= 25.0;
  if (m.promotion) w *= *m.promotion == PieceKind::Queen ? 20.0 : 0.05;
  switch (m.piece) {
    case PieceKind::Pawn:
      if (moveno < 12) w *= (m.from.file() >= 2 && m.from.file() <= 5) ? 3.0 : 1.2;
      break;
    case PieceKind::Knight:
    case PieceKind::Bishop:
      if (moveno < 15 && m.from.rank() == back) w *= 3.0;
      break;
    case PieceKind::King:
      if (!is_castle(m.special) && moveno < 35) w *= 0.15;
      break;
    case PieceKind::Queen:
      if (moveno < 8) w *= 0.4;
      break;
    default:
      break;
  }
  if (m.to.file() >= 2 && m.to.file() <= 5 && m.to.rank() >= 2 && m.to.rank() <= 5) w *= 1.6;
  return w;
}

inline double material(const Position& pos, Color side) {
  double sum = 0;
  for (Square s : all_squares())
    if (const auto& p = pos.at(s); p && p->color == side) sum += piece_value(p->kind);
  return sum;
}

inline std::string fake_name(Rng& rng) {
  static constexpr std::array<const char*, 16> last = {
      "Kowalski", "Ivanov", "Smith", "Garcia", "Nakamura", "Petrov", "Larsen", "Haddad",
      "Moreau", "Schmidt", "Rossi", "Novak", "Silva", "Okafor", "Lindqvist", "Horvath"};
  static constexpr std::array<const char*, 12> first = {"Anna", "Boris", "C", "Dmitri", "Elena",
                                                        "F", "Gustav", "Hana", "Ivo", "J",
                                                        "Karin", "Luis"};
  return std::string(last[rng.below(last.size())]) + "," + first[rng.below(first.size())];
}

inline SimulatedGame simulate_game(std::uint64_t seed, const std::string& game_id,
                                   int max_plies = 160) {
  Rng rng(seed);
  SimulatedGame out;
  GameRecord& g = out.record;
  g.game_id = game_id;
  g.meta.white_name = fake_name(rng);
  do {
    g.meta.black_name = fake_name(rng);
  } while (g.meta.black_name == g.meta.white_name);
  g.meta.date = {2019 + static_cast<int>(rng.below(2)), 1 + static_cast<int>(rng.below(12)),
                 1 + static_cast<int>(rng.below(28))};
  if (rng.chance(0.9)) g.meta.white_elo = 2000 + static_cast<int>(rng.below(800));
  if (rng.chance(0.9)) g.meta.black_elo = 2000 + static_cast<int>(rng.below(800));
  static constexpr std::array<const char*, 8> ecos = {"A11", "B90", "C42", "D37",
                                                      "E60", "B12", "C65", "A45"};
  g.meta.eco_code = ecos[rng.below(ecos.size())];

  Position pos = Position::initial();
  int plies = 0;
  g.meta.result = GameResult::Draw;
  while (plies < max_plies) {
    auto moves = pos.legal_moves();
    if (moves.empty()) {
      if (pos.in_check(pos.side_to_move()))
        g.meta.result = pos.side_to_move() == Color::White ? GameResult::BlackWin : GameResult::WhiteWin;
      break;
    }
    std::vector<double> weights;
    double total = 0;
    for (const auto& m : moves) total += weights.emplace_back(move_weight(pos, m));
    double pick = rng.unit() * total;
    std::size_t idx = 0;
    while (idx + 1 < moves.size() && pick >= weights[idx]) pick -= weights[idx++];
    const ChessMove& m = moves[idx];
    out.san.push_back(pos.san(m));
    for (auto& rec : move_records(pos, m, g.game_id, pos.fullmove_number())) g.moves.push_back(rec);
    pos.play(m);
    ++plies;
    // players resign a clearly lost position rather than play it out
    if (plies >= 40) {
      const double balance = material(pos, Color::White) - material(pos, Color::Black);
      if (std::abs(balance) >= 6) {
        g.meta.result = balance > 0 ? GameResult::WhiteWin : GameResult::BlackWin;
        break;
      }
    }
  }
  g.meta.move_count = (plies + 1) / 2;
  return out;
}

inline std::vector<SimulatedGame> simulate_games(std::size_t count, std::uint64_t seed,
                                                 const std::string& id_prefix = "g") {
  std::vector<SimulatedGame> games;
  games.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    games.push_back(simulate_game(derive_seed(seed, i), id_prefix + std::to_string(i)));
  return games;
}

inline std::string two_digits(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

inline std::string to_pgn(const std::vector<SimulatedGame>& games) {
  std::ostringstream os;
  for (const auto& sg : games) {
    const auto& m = sg.record.meta;
    os << "[Event \"Simulated\"]\n";
    os << "[Date \"" << *m.date.year << '.' << two_digits(*m.date.month) << '.'
       << two_digits(*m.date.day) << "\"]\n";
    os << "[White \"" << m.white_name << "\"]\n";
    os << "[Black \"" << m.black_name << "\"]\n";
    os << "[Result \"" << result_token(m.result) << "\"]\n";
    if (m.white_elo) os << "[WhiteElo \"" << *m.white_elo << "\"]\n";
    if (m.black_elo) os << "[BlackElo \"" << *m.black_elo << "\"]\n";
    if (m.eco_code) os << "[ECO \"" << *m.eco_code << "\"]\n";
    os << '\n';
    for (std::size_t i = 0; i < sg.san.size(); ++i) {
      if (i % 2 == 0) os << (i / 2 + 1) << ". ";
      os << sg.san[i] << ((i % 12 == 11) ? "\n" : " ");
    }
    os << result_token(m.result) << "\n\n";
  }
  return os.str();
}

inline std::vector<MoveRecord> all_moves(const std::vector<SimulatedGame>& games) {
  std::vector<MoveRecord> out;
  for (const auto& g : games) out.insert(out.end(), g.record.moves.begin(), g.record.moves.end());
  return out;
}

}  // namespace chessmap::fixtures
