#include <gtest/gtest.h>

#include <filesystem>

#include "chessmap/analytics.hpp"
#include "support/quadrature.hpp"
#include "support/simulate.hpp"

using namespace chessmap;

namespace {

// Descriptive statistics rows, human then generated.
PieceTable published_counts(bool human) {
  PieceTable t;
  t.label = human ? "Human" : "Generated";
  t.counts = human ? std::array<std::uint64_t, 6>{49386, 31507, 28263, 31493, 22818, 23608}
                   : std::array<std::uint64_t, 6>{51408, 25997, 19310, 23369, 16260, 19972};
  t.total = std::accumulate(t.counts.begin(), t.counts.end(), std::uint64_t{0});
  return t;
}

// Correlation through standardized scores, a different route from the library.
double zscore_r(const std::vector<double>& x, const std::vector<double>& y) {
  auto z = [](const std::vector<double>& v) {
    double m = 0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double var = 0;
    for (double a : v) var += (a - m) * (a - m);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    std::vector<double> out;
    for (double a : v) out.push_back((a - m) / sd);
    return out;
  };
  auto zx = z(x), zy = z(y);
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += zx[i] * zy[i];
  return s / static_cast<double>(x.size());
}

std::vector<double> vec(const std::array<double, 6>& a) { return {a.begin(), a.end()}; }

}  // namespace

TEST(Pearson, TrivialCases) {
  EXPECT_NEAR(pearson_r({1, 2, 3}, {1, 2, 3}).r, 1.0, 1e-15);
  EXPECT_NEAR(pearson_r({1, 2, 3}, {3, 2, 1}).r, -1.0, 1e-15);
  EXPECT_THROW(pearson_r({1, 1, 1}, {1, 2, 3}), DegenerateInput);
  EXPECT_THROW(pearson_r({1, 2, 3}, {1, 2}), DegenerateInput);
  EXPECT_THROW(pearson_r({1, 2}, {1, 2}), DegenerateInput);
}

TEST(Pearson, AffineInvarianceAndSymmetry) {
  std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6};
  std::vector<double> y{2, 7, 1, 8, 2, 8, 1, 8};
  const double r = pearson_r(x, y).r;
  EXPECT_NEAR(pearson_r(y, x).r, r, 1e-14);
  std::vector<double> up, down, ys;
  for (double v : x) {
    up.push_back(2.5 * v - 7);
    down.push_back(-0.5 * v + 3);
  }
  for (double v : y) ys.push_back(10 * v + 100);
  EXPECT_NEAR(pearson_r(x, up).r, 1.0, 1e-14);
  EXPECT_NEAR(pearson_r(x, down).r, -1.0, 1e-14);
  EXPECT_NEAR(pearson_r(x, ys).r, r, 1e-14);
  EXPECT_NEAR(r, zscore_r(x, y), 1e-12);
}

TEST(Pearson, PValueMatchesQuadrature) {
  const std::vector<std::pair<std::vector<double>, std::vector<double>>> cases = {
      {{1, 2, 3, 4, 5, 6}, {2, 1, 4, 3, 6, 5}},
      {{1, 2, 3, 4, 5, 6}, {6, 1, 5, 2, 4, 3}},
      {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {1, 3, 2, 5, 4, 7, 6, 9, 8, 10}},
      {{0.3, 1.1, 2.9, 3.0, 4.4}, {5.0, 3.9, 4.1, 1.2, 0.7}}};
  for (const auto& [x, y] : cases) {
    auto res = pearson_r(x, y);
    const double df = static_cast<double>(x.size()) - 2;
    const double t = res.r * std::sqrt(df / (1 - res.r * res.r));
    EXPECT_NEAR(res.p_two_tailed, fixtures::t_two_tailed(t, df), 1e-7);
  }
}

TEST(Pearson, DescriptiveTableCorrelation) {
  const auto h = published_counts(true), g = published_counts(false);
  auto cmp = compare_corpora(h, g);
  EXPECT_NEAR(cmp.on_percent.r, 0.97794, 0.005);
  EXPECT_NEAR(cmp.on_counts.r, 0.97794, 0.005);
  EXPECT_NEAR(cmp.on_percent.r, zscore_r(vec(h.percents()), vec(g.percents())), 1e-12);
  // 0.072% reported
  EXPECT_NEAR(cmp.on_percent.p_two_tailed, 0.00072, 0.0002);
  const double t = cmp.on_percent.r * std::sqrt(4 / (1 - cmp.on_percent.r * cmp.on_percent.r));
  EXPECT_NEAR(cmp.on_percent.p_two_tailed, fixtures::t_two_tailed(t, 4), 1e-8);
}

TEST(ChiSquare, DescriptiveTableRejectsIndependence) {
  auto cmp = compare_corpora(published_counts(true), published_counts(false));
  EXPECT_EQ(cmp.chi_square.dof, 5);
  EXPECT_LT(cmp.chi_square.p, 1e-4);
  EXPECT_NEAR(cmp.chi_square.statistic, 2122, 1.0);
  EXPECT_NEAR(cmp.chi_square.p, fixtures::chi2_upper(cmp.chi_square.statistic, 5), 1e-12);
}

TEST(ChiSquare, HandComputedCases) {
  auto two = chi_square_independence({{10, 0}, {0, 10}});
  EXPECT_DOUBLE_EQ(two.statistic, 20.0);
  EXPECT_EQ(two.dof, 1);
  auto same = chi_square_independence({{5, 7, 9, 2, 4, 6}, {5, 7, 9, 2, 4, 6}});
  EXPECT_NEAR(same.statistic, 0.0, 1e-12);
  EXPECT_NEAR(same.p, 1.0, 1e-12);
  auto prop = chi_square_independence({{1, 2, 3}, {3, 6, 9}});
  EXPECT_NEAR(prop.statistic, 0.0, 1e-12);
  for (double x : {0.5, 3.0, 11.07, 20.0})
    EXPECT_NEAR(boost::math::cdf(boost::math::complement(boost::math::chi_squared(5), x)), fixtures::chi2_upper(x, 5),
                1e-8);
  EXPECT_THROW(chi_square_independence({{0, 0}, {1, 2}}), DegenerateInput);
  EXPECT_THROW(chi_square_independence({{1, 0}, {1, 0}}), DegenerateInput);
}

TEST(PieceTable, Basics) {
  MoveRecord pawn;
  pawn.from = square_from_name("e2");
  pawn.to = square_from_name("e4");
  auto t = piece_table({pawn});
  EXPECT_DOUBLE_EQ(t.percent(PieceKind::Pawn), 100.0);
  auto h = published_counts(true);
  double sum = 0;
  for (double p : h.percents()) sum += p;
  EXPECT_NEAR(sum, 100.0, 0.1);
  const auto text = piece_tables_text({h, published_counts(false)});
  EXPECT_NE(text.find("Counts"), std::string::npos);
  EXPECT_NE(text.find("Percent"), std::string::npos);
  EXPECT_NE(text.find("49,386"), std::string::npos);
  EXPECT_NE(text.find("26.4%"), std::string::npos);  // of the row sum
  EXPECT_NE(text.find("32.9%"), std::string::npos);
  const auto csv = piece_tables_csv({h});
  EXPECT_NE(csv.find("Pawns,49386,"), std::string::npos);
}

TEST(Legality, TableFromMoves) {
  auto moves = fixtures::all_moves(fixtures::simulate_games(5, 1));
  auto t = legality_table(moves, "human");
  EXPECT_EQ(t.illegal_total(), 0u);
  EXPECT_EQ(t.grand_total(), moves.size());
  moves[0].piece = PieceKind::Bishop;
  moves[0].from = square_from_name("a1");
  moves[0].to = square_from_name("a2");
  t = legality_table(moves);
  EXPECT_EQ(t.illegal[piece_index(PieceKind::Bishop)], 1u);
  for (PieceKind p : kAllPieces) EXPECT_LE(t.illegal[piece_index(p)], t.total[piece_index(p)]);
  EXPECT_NE(legality_table_text(t).find("Totals"), std::string::npos);
}

TEST(Legality, PublishedLegalityArithmetic) {
  LegalityTable t;
  t.illegal = {14, 35, 68, 35, 332, 19};
  t.total = {51408, 25997, 19310, 23369, 16260, 19972};
  EXPECT_EQ(percent_text(t.percent(PieceKind::Queen), 2), "2.04%");
  EXPECT_EQ(percent_text(t.total_percent(), 2), "0.32%");
  EXPECT_EQ(t.illegal_total(), 503u);
  EXPECT_EQ(t.grand_total(), 156316u);
  // "Average" is the unweighted mean of the piece rows
  EXPECT_NEAR(t.average_percent(), 0.47, 0.005);
}

TEST(Ablation, SummaryFromStore) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "chessmap_ablation_test";
  fs::remove_all(dir);
  MoveStore s(dir);
  auto moves = fixtures::all_moves(fixtures::simulate_games(3, 2));
  s.register_tag("a", MoveSource::Human);
  s.append_moves("a", moves);
  auto sum = ablation_summary(s, {"a"});
  ASSERT_EQ(sum.columns.size(), 1u);
  EXPECT_EQ(sum.averages().front(), 0.0);
  EXPECT_THROW(ablation_summary(s, {"missing"}), UnknownTag);
  EXPECT_THROW(ablation_summary(s, {}), ConfigError);
  EXPECT_NE(ablation_text(sum).find("Average"), std::string::npos);
  fs::remove_all(dir);
}

TEST(ColumnOccupancy, Basics) {
  std::vector<Square> file_a;
  for (int r = 0; r < 8; ++r) file_a.push_back(*Square::from_coords(0, r));
  auto c = column_occupancy(std::vector<std::vector<Square>>{file_a});
  EXPECT_EQ(c[0], 8u);
  for (int f = 1; f < 8; ++f) EXPECT_EQ(c[static_cast<std::size_t>(f)], 0u);
  EXPECT_EQ(column_occupancy(std::vector<MoveRecord>{}), FileCounts{});
  EXPECT_NE(occupancy_csv(c).find("a,8"), std::string::npos);
}
