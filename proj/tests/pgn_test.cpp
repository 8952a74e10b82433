#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "chessmap/pgn.hpp"
#include "support/simulate.hpp"

using namespace chessmap;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string example_pgn() { return read_file(std::string(CHESSMAP_TEST_DATA) + "/example_game.pgn"); }

Square sq(const char* n) { return square_from_name(n); }

// Replays resolved from/to squares on a bare occupancy board.
void expect_sound_replay(const GameRecord& g) {
  Position board = Position::initial();
  std::array<std::optional<Piece>, 64> cells{};
  for (Square s : all_squares()) cells[s.index()] = board.at(s);
  for (const auto& m : g.moves) {
    auto& from = cells[m.from.index()];
    ASSERT_TRUE(from.has_value()) << g.game_id << " moves from empty " << m.from.name();
    ASSERT_EQ(from->color, m.color);
    auto& to = cells[m.to.index()];
    if (to) {
      ASSERT_NE(to->color, m.color) << g.game_id << " captures own piece on " << m.to.name();
    }
    if (m.piece == PieceKind::Pawn && m.is_capture && !to) {
      cells[Square::from_coords(m.to.file(), m.from.rank())->index()].reset();  // en passant
    }
    to = from;
    from.reset();
  }
}

}  // namespace

TEST(ParsePgn, ExampleGameMetadata) {
  auto games = parse_pgn(example_pgn());
  ASSERT_EQ(games.size(), 1u);
  const auto& meta = games[0].meta;
  EXPECT_EQ(meta.white_elo, 2784);
  EXPECT_EQ(meta.black_elo, 2778);
  EXPECT_EQ(meta.result, GameResult::BlackWin);
  EXPECT_EQ(meta.eco_code, "A11");
  EXPECT_EQ(meta.move_count, 58);
  EXPECT_EQ(meta.white_name, "Nepomniachtchi,Ian");
  EXPECT_EQ(meta.date, (GameDate{2020, 4, 21}));
}

TEST(ParsePgn, OpeningMovesResolveOrigins) {
  auto games = parse_pgn("1. c4 c6 *");
  ASSERT_EQ(games.size(), 1u);
  const auto& mv = games[0].moves;
  ASSERT_EQ(mv.size(), 2u);
  EXPECT_EQ(mv[0].move_number, 1);
  EXPECT_EQ(mv[0].color, Color::White);
  EXPECT_EQ(mv[0].piece, PieceKind::Pawn);
  EXPECT_EQ(mv[0].from, sq("c2"));
  EXPECT_EQ(mv[0].to, sq("c4"));
  EXPECT_EQ(mv[1].color, Color::Black);
  EXPECT_EQ(mv[1].from, sq("c7"));
  EXPECT_EQ(mv[1].to, sq("c6"));
}

TEST(ParsePgn, CastleBecomesKingAndRookRecords) {
  auto games = parse_pgn(example_pgn());
  const auto& mv = games[0].moves;
  auto it = std::find_if(mv.begin(), mv.end(), [](const MoveRecord& m) { return is_castle(m.special); });
  ASSERT_NE(it, mv.end());
  EXPECT_EQ(it->move_number, 5);
  EXPECT_EQ(it->piece, PieceKind::King);
  EXPECT_EQ(it->from, sq("e1"));
  EXPECT_EQ(it->to, sq("g1"));
  EXPECT_EQ(it->special, SpecialMove::CastleKingside);
  auto rook = std::next(it);
  EXPECT_EQ(rook->piece, PieceKind::Rook);
  EXPECT_EQ(rook->from, sq("h1"));
  EXPECT_EQ(rook->to, sq("f1"));
  EXPECT_EQ(rook->special, SpecialMove::None);
  // 5... Nbd7 resolves to the b8 knight
  auto nbd7 = std::next(rook);
  EXPECT_EQ(nbd7->piece, PieceKind::Knight);
  EXPECT_EQ(nbd7->from, sq("b8"));
  EXPECT_EQ(nbd7->to, sq("d7"));
}

TEST(ParsePgn, DisambiguatesByFileAndPinnedPieces) {
  // 12. Ngxf7: knights on g5 and e5 both reach f7
  auto games = parse_pgn(example_pgn());
  const auto& mv = games[0].moves;
  auto it = std::find_if(mv.begin(), mv.end(), [](const MoveRecord& m) {
    return m.move_number == 12 && m.color == Color::White;
  });
  ASSERT_NE(it, mv.end());
  EXPECT_EQ(it->from, sq("g5"));
  EXPECT_TRUE(it->is_capture);

  // Knight on c3 is pinned by the b4 bishop, so "Ne2" is unambiguous.
  auto pinned = parse_pgn("1. e4 e5 2. Nc3 Bb4 3. d3 Nf6 4. Ne2 *");
  EXPECT_EQ(pinned[0].moves.back().from, sq("g1")) << "pinned c3 knight must not be chosen";
}

TEST(ParsePgn, CheckAndCaptureFlags) {
  auto games = parse_pgn(example_pgn());
  const auto& mv = games[0].moves;
  auto it = std::find_if(mv.begin(), mv.end(), [](const MoveRecord& m) {
    return m.move_number == 17 && m.color == Color::White;
  });
  EXPECT_TRUE(it->is_capture);
  EXPECT_TRUE(it->is_check);
  EXPECT_EQ(it->piece, PieceKind::Queen);
}

TEST(ParsePgn, SkipsCommentsNagsAndVariations) {
  auto games = parse_pgn(
      "[White \"A\"]\n[Black \"B\"]\n\n1. e4 {best by test} e5 $1 2. Nf3 (2. f4 exf4 (2... d5)) "
      "Nc6 ; rest of line\n3. Bb5 a6 1/2-1/2\n");
  ASSERT_EQ(games.size(), 1u);
  EXPECT_EQ(games[0].moves.size(), 6u);
  EXPECT_EQ(games[0].meta.result, GameResult::Draw);
  EXPECT_FALSE(games[0].meta.white_elo.has_value());
}

TEST(ParsePgn, PromotionAndEnPassant) {
  auto games = parse_pgn("1. e4 d5 2. e5 f5 3. exf6 Nc6 4. fxg7 Nf6 5. gxh8=Q *");
  const auto& mv = games[0].moves;
  EXPECT_EQ(mv[4].from, sq("e5"));
  EXPECT_EQ(mv[4].to, sq("f6"));
  EXPECT_TRUE(mv[4].is_capture);
  EXPECT_EQ(mv.back().special, SpecialMove::Promotion);
  EXPECT_EQ(mv.back().to, sq("h8"));
  EXPECT_TRUE(is_legal_geometry(mv[4].geometry()));
}

TEST(ParsePgn, ReportsBadGamesWithIndex) {
  const std::string doc =
      "[White \"A\"]\n\n1. e4 e5 *\n\n[White \"B\"]\n\n1. e4 e5 2. Qh5 Nf9 *\n\n"
      "[White \"C\"]\n\n1. Nc4 *\n\n[White \"D\"]\n\n1. d4 *\n";
  auto report = parse_pgn_report(doc);
  EXPECT_EQ(report.games.size(), 2u);
  ASSERT_EQ(report.failures.size(), 2u);
  EXPECT_EQ(report.failures[0].game_index, 1u);
  EXPECT_EQ(report.failures[0].kind, "PgnSyntaxError");
  EXPECT_EQ(report.failures[0].token, "Nf9");
  EXPECT_EQ(report.failures[1].game_index, 2u);
  EXPECT_EQ(report.failures[1].kind, "DisambiguationError");

  try {
    parse_pgn(doc);
    FAIL() << "expected PgnSyntaxError";
  } catch (const PgnSyntaxError& e) {
    EXPECT_EQ(e.game_index(), 1u);
    EXPECT_EQ(e.token(), "Nf9");
  }
  EXPECT_THROW(parse_pgn("1. Nc4 *"), DisambiguationError);
}

TEST(ParsePgn, EmptyDocument) { EXPECT_TRUE(parse_pgn("").empty()); }

TEST(LegalityAudit, ExampleGameIsClean) {
  auto report = legality_audit(parse_pgn(example_pgn()));
  EXPECT_EQ(report.illegal, 0u);
  EXPECT_GT(report.total, 116u);
}

TEST(LegalityAudit, InjectedRookDiagonal) {
  GameRecord g;
  MoveRecord m;
  m.piece = PieceKind::Rook;
  m.from = sq("a1");
  m.to = sq("b2");
  g.moves.push_back(m);
  auto report = legality_audit(std::vector<GameRecord>{g});
  EXPECT_EQ(report.total, 1u);
  EXPECT_EQ(report.illegal, 1u);
  EXPECT_EQ(report.illegal_by_piece[piece_index(PieceKind::Rook)], 1u);
}

TEST(LegalityAudit, Empty) {
  auto report = legality_audit(std::vector<GameRecord>{});
  EXPECT_EQ(report.total, 0u);
  EXPECT_EQ(report.illegal, 0u);
}

// Simulated games written as SAN and parsed back must reproduce the
// simulator's own records, replay soundly, alternate colors per ply and be
// geometrically legal.
TEST(ParsePgn, SimulatedCorpusRoundTrips) {
  auto sims = fixtures::simulate_games(60, 99);
  auto games = parse_pgn(fixtures::to_pgn(sims));
  ASSERT_EQ(games.size(), sims.size());
  for (std::size_t i = 0; i < games.size(); ++i) {
    const auto& got = games[i];
    const auto& want = sims[i].record;
    EXPECT_EQ(got.meta.move_count, want.meta.move_count);
    ASSERT_EQ(got.moves.size(), want.moves.size());
    for (std::size_t k = 0; k < got.moves.size(); ++k) {
      MoveRecord a = got.moves[k];
      const MoveRecord& b = want.moves[k];
      a.game_id = b.game_id;
      EXPECT_EQ(a, b) << "game " << i << " record " << k;
    }
    expect_sound_replay(got);
    // alternation by ply; the castle rook record shares its king's ply
    std::optional<Color> last;
    for (std::size_t k = 0; k < got.moves.size(); ++k) {
      if (is_castle_rook(got.moves, k)) continue;
      if (last) {
        EXPECT_NE(*last, got.moves[k].color);
      }
      last = got.moves[k].color;
    }
    EXPECT_EQ(got.moves.front().color, Color::White);
  }
  EXPECT_EQ(legality_audit(games).illegal, 0u);
}
