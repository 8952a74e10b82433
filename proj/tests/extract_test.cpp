#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "chessmap/extract.hpp"
#include "chessmap/narrator.hpp"
#include "chessmap/pgn.hpp"
#include "support/simulate.hpp"

using namespace chessmap;

namespace {

GameRecord example_game() {
  std::ifstream in(std::string(CHESSMAP_TEST_DATA) + "/example_game.pgn");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pgn(ss.str()).at(0);
}

// Fields the narrated text carries; game id and provenance are supplied by the caller.
void expect_same_moves(const std::vector<MoveRecord>& want, const std::vector<MoveRecord>& got,
                       const std::string& ctx, bool numbers = true) {
  ASSERT_EQ(want.size(), got.size()) << ctx;
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto& a = want[i];
    const auto& b = got[i];
    if (numbers) EXPECT_EQ(a.move_number, b.move_number) << ctx << " #" << i;
    EXPECT_EQ(a.color, b.color) << ctx << " #" << i;
    EXPECT_EQ(a.piece, b.piece) << ctx << " #" << i;
    EXPECT_EQ(a.from, b.from) << ctx << " #" << i << " " << a.from.name() << " " << b.from.name();
    EXPECT_EQ(a.to, b.to) << ctx << " #" << i;
    EXPECT_EQ(a.is_capture, b.is_capture) << ctx << " #" << i;
    EXPECT_EQ(a.special, b.special) << ctx << " #" << i;
    EXPECT_EQ(a.is_check, b.is_check) << ctx << " #" << i;
    if (::testing::Test::HasFailure()) return;
  }
}

}  // namespace

TEST(Extract, SimpleMoveSentence) {
  auto r = extract_moves("In move 1, White moves pawn from c2 to c4.");
  ASSERT_EQ(r.moves.size(), 1u);
  const auto& m = r.moves[0];
  EXPECT_EQ(m.move_number, 1);
  EXPECT_EQ(m.color, Color::White);
  EXPECT_EQ(m.piece, PieceKind::Pawn);
  EXPECT_EQ(m.from.name(), "c2");
  EXPECT_EQ(m.to.name(), "c4");
  EXPECT_FALSE(m.is_capture);
  EXPECT_TRUE(r.unparsed_spans.empty());
}

TEST(Extract, NamedPlayerLine) {
  const std::string text =
      "On April 21, 2020, Ian Nepomniachtchi played Maxime Vachier-Lagrave.\n"
      "Maxime Vachier-Lagrave moves black pawn from c7 to c6.";
  auto r = extract_moves(text);
  ASSERT_EQ(r.moves.size(), 1u);
  EXPECT_EQ(r.moves[0].color, Color::Black);
  EXPECT_EQ(r.moves[0].from.name(), "c7");
  EXPECT_EQ(r.meta.white_name, "Ian Nepomniachtchi");
  EXPECT_EQ(r.meta.black_name, "Maxime Vachier-Lagrave");
}

TEST(Extract, NameWithoutColorWordResolvesFromHeader) {
  const std::string text =
      "On April 21, 2020, Ian Nepomniachtchi played Maxime Vachier-Lagrave.\n"
      "Maxime Vachier-Lagrave moves the knight from g8 to f6, continuing to develop the position.";
  auto r = extract_moves(text);
  ASSERT_EQ(r.moves.size(), 1u);
  EXPECT_EQ(r.moves[0].color, Color::Black);
  EXPECT_EQ(r.moves[0].piece, PieceKind::Knight);
}

TEST(Extract, OffBoardSquareIsUnparsed) {
  const std::string text = "White moves rook from a1 to i9. Black moves pawn from e7 to e5.";
  auto r = extract_moves(text);
  ASSERT_EQ(r.moves.size(), 1u);
  EXPECT_EQ(r.moves[0].color, Color::Black);
  ASSERT_EQ(r.unparsed_spans.size(), 1u);
  EXPECT_EQ(text.substr(r.unparsed_spans[0].offset, r.unparsed_spans[0].length),
            "White moves rook from a1 to i9.");
}

TEST(Extract, CaptureForms) {
  auto r = extract_moves(
      "Black takes white piece on c4 with pawn from d5. "
      "White moves white knight from f3 to e5, taking a black piece.");
  ASSERT_EQ(r.moves.size(), 2u);
  EXPECT_EQ(r.moves[0].color, Color::Black);
  EXPECT_EQ(r.moves[0].from.name(), "d5");
  EXPECT_EQ(r.moves[0].to.name(), "c4");
  EXPECT_TRUE(r.moves[0].is_capture);
  EXPECT_EQ(r.moves[1].piece, PieceKind::Knight);
  EXPECT_TRUE(r.moves[1].is_capture);
}

TEST(Extract, CastleYieldsKingAndRook) {
  auto r = extract_moves("White castles kingside, moving king from e1 to g1 and rook from h1 to f1.");
  ASSERT_EQ(r.moves.size(), 2u);
  EXPECT_EQ(r.moves[0].piece, PieceKind::King);
  EXPECT_EQ(r.moves[0].special, SpecialMove::CastleKingside);
  EXPECT_EQ(r.moves[1].piece, PieceKind::Rook);
  EXPECT_EQ(r.moves[1].special, SpecialMove::None);
  EXPECT_EQ(r.moves[1].from.name(), "h1");
}

TEST(Extract, CheckMarksPreviousMove) {
  auto r = extract_moves("White moves queen from d1 to h5. Check.");
  ASSERT_EQ(r.moves.size(), 1u);
  EXPECT_TRUE(r.moves[0].is_check);
}

TEST(Extract, NoFabrication) {
  EXPECT_TRUE(extract_moves("").moves.empty());
  EXPECT_TRUE(extract_moves("The cat sat on the mat.").moves.empty());
  EXPECT_TRUE(extract_moves("White wins.").moves.empty());
  // a piece word and one square is not a move
  EXPECT_TRUE(extract_moves("White moves the knight to f3.").moves.empty());
}

TEST(Extract, ProvenanceAndSourcePassThrough) {
  ExtractOptions opt;
  opt.source = MoveSource::Synthetic;
  opt.game_id = "syn-1";
  opt.provenance = {std::string("White moves "), 3, 17};
  auto r = extract_moves("White moves bishop from c1 to g5.", opt);
  ASSERT_EQ(r.moves.size(), 1u);
  EXPECT_EQ(r.moves[0].source, MoveSource::Synthetic);
  EXPECT_EQ(r.moves[0].game_id, "syn-1");
  EXPECT_EQ(r.moves[0].prompt, "White moves ");
  EXPECT_EQ(r.moves[0].batch, 3);
  EXPECT_EQ(r.moves[0].line, 17);
  EXPECT_FALSE(r.moves[0].move_number.has_value());
}

TEST(ExtractMeta, SyntheticSample) {
  const std::string text =
      "On March 3, 2019, D Yuffa played J Kollars. "
      "D Yuffa was the higer-ranked player, with an Elo rating of 2332. "
      "J Kollars was the lower-ranked player, with an Elo rating of 2105. "
      "The game begins as white uses the Sicilian opening. and black countering with Najdorf, Adams attack.";
  auto meta = extract_meta(text);
  EXPECT_EQ(meta.white_name, "D Yuffa");
  EXPECT_EQ(meta.black_name, "J Kollars");
  EXPECT_EQ(meta.white_elo, 2332);
  EXPECT_EQ(meta.black_elo, 2105);
  EXPECT_EQ(meta.opening, "Sicilian");
  EXPECT_EQ(meta.defense, "Najdorf, Adams attack");
  ASSERT_TRUE(meta.date.has_value());
  EXPECT_EQ(meta.date->year, 2019);
  EXPECT_EQ(meta.date->month, 3);
  EXPECT_EQ(meta.date->day, 3);
}

TEST(ExtractMeta, EmptyText) {
  auto meta = extract_meta("");
  EXPECT_FALSE(meta.white_name.has_value());
  EXPECT_FALSE(meta.date.has_value());
}

TEST(ExtractMeta, ResultAndLength) {
  auto meta = extract_meta(narrate_game(example_game(), TemplateSet::defaults()));
  EXPECT_EQ(meta.result, GameResult::BlackWin);
  EXPECT_EQ(meta.move_count, 58);
  EXPECT_EQ(meta.white_elo, 2784);
  EXPECT_EQ(meta.black_elo, 2778);
  EXPECT_EQ(meta.opening, "English");
}

TEST(RoundTrip, ExampleGame) {
  auto g = example_game();
  expect_same_moves(g.moves, extract_moves(narrate_game(g, TemplateSet::defaults())).moves, "example");
}

TEST(RoundTrip, SimulatedGamesAcrossSeeds) {
  auto sims = fixtures::simulate_games(250, 2024);
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    auto t = TemplateSet::defaults();
    t.seed = seed;
    for (const auto& s : sims) {
      const auto text = narrate_game(s.record, t);
      auto r = extract_moves(text);
      expect_same_moves(s.record.moves, r.moves, s.record.game_id + " seed " + std::to_string(seed));
      EXPECT_TRUE(r.unparsed_spans.empty()) << s.record.game_id;
      if (HasFailure()) {
        ADD_FAILURE() << text;
        return;
      }
    }
  }
}

TEST(RoundTrip, LineByLineKeepsOrder) {
  auto sims = fixtures::simulate_games(5, 9);
  for (const auto& s : sims) {
    std::vector<MoveRecord> got;
    std::string header;
    for (const auto& line : narrate_game_lines(s.record, TemplateSet::defaults())) {
      if (header.empty()) header = line;
      // each line carries the header so names resolve
      auto r = extract_moves(header + "\n" + line);
      got.insert(got.end(), r.moves.begin(), r.moves.end());
    }
    // black's line has no "In move N" prefix of its own
    expect_same_moves(s.record.moves, got, s.record.game_id, false);
  }
}
