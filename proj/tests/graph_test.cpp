#include <gtest/gtest.h>

#include <numbers>

#include "chessmap/graph.hpp"
#include "support/corpus.hpp"

using namespace chessmap;

namespace {

MoveRecord mv(const char* from, const char* to, PieceKind p = PieceKind::Rook) {
  MoveRecord r;
  r.piece = p;
  r.from = square_from_name(from);
  r.to = square_from_name(to);
  return r;
}

bool same_edges(const std::vector<GraphEdge>& a, const std::vector<GraphEdge>& b) { return a == b; }

const BoardGraph& corpus_graph() {
  static const BoardGraph g = build_graph(fixtures::large_corpus());
  return g;
}

const LayoutMap& corpus_layout() {
  static const LayoutMap l = force_layout(corpus_graph());
  return l;
}

LayoutMap board_layout(const std::function<Vec2(Vec2)>& f) {
  LayoutMap l;
  for (Square s : all_squares()) l.set(s, f(board_point(s)));
  return l;
}

// Best similarity fit by scanning rotation angles, both handednesses.
double brute_procrustes(const LayoutMap& l) {
  const auto sq = l.squares();
  Vec2 cx{}, cy{};
  for (Square s : sq) {
    cx = cx + l.at(s);
    cy = cy + board_point(s);
  }
  cx = (1.0 / static_cast<double>(sq.size())) * cx;
  cy = (1.0 / static_cast<double>(sq.size())) * cy;
  double syy = 0;
  for (Square s : sq) syy += dot(board_point(s) - cy, board_point(s) - cy);
  double best = 1e300;
  for (int flip = 0; flip < 2; ++flip)
    for (int k = 0; k < 72000; ++k) {
      const double a = 2 * std::numbers::pi * k / 72000.0;
      double num = 0, den = 0;
      std::vector<Vec2> rx;
      for (Square s : sq) {
        Vec2 x = l.at(s) - cx;
        if (flip) x.y = -x.y;
        x = {std::cos(a) * x.x - std::sin(a) * x.y, std::sin(a) * x.x + std::cos(a) * x.y};
        rx.push_back(x);
        num += dot(x, board_point(s) - cy);
        den += dot(x, x);
      }
      const double scale = num / den;
      double res = 0;
      for (std::size_t i = 0; i < sq.size(); ++i) {
        const Vec2 d = scale * rx[i] - (board_point(sq[i]) - cy);
        res += dot(d, d);
      }
      best = std::min(best, res / syy);
    }
  return best;
}

}  // namespace

TEST(BuildGraph, PathHasNoTriangle) {
  auto g = build_graph({mv("a1", "b1"), mv("b1", "c1")});
  EXPECT_TRUE(g.edges().empty());
}

TEST(BuildGraph, TriangleKept) {
  auto g = build_graph({mv("a1", "b1"), mv("b1", "c1"), mv("a1", "c1"), mv("c1", "a1")});
  ASSERT_EQ(g.edges().size(), 3u);
  EXPECT_EQ(g.edge_weight(square_from_name("a1"), square_from_name("c1")), 2u);
  EXPECT_EQ(g.node_weight(square_from_name("a1")), 3u);
}

TEST(BuildGraph, FiveNodeFixture) {
  // triangle a1-b1-c1 with a tail c1-d1-e1 and a detached pair
  auto g = build_graph({mv("a1", "b1"), mv("b1", "c1"), mv("c1", "a1"), mv("c1", "d1"), mv("d1", "e1"),
                        mv("e1", "e2"), mv("a1", "a1")});
  std::vector<std::pair<std::string, std::string>> got;
  for (const auto& e : g.edges()) got.emplace_back(e.a.name(), e.b.name());
  std::vector<std::pair<std::string, std::string>> want{{"a1", "b1"}, {"a1", "c1"}, {"b1", "c1"}};
  EXPECT_EQ(got, want);
  EXPECT_TRUE(satisfies_triangle_condition(g));
  EXPECT_TRUE(same_edges(triangle_filter(g.edges()), g.edges()));
  EXPECT_TRUE(build_graph({}).empty());
}

TEST(BuildGraph, CorpusGraphInvariants) {
  const auto& g = corpus_graph();
  EXPECT_LE(g.node_count(), 64u);
  EXPECT_GT(g.edges().size(), 100u);
  EXPECT_TRUE(satisfies_triangle_condition(g));
  EXPECT_TRUE(same_edges(triangle_filter(g.edges()), g.edges()));
  for (const auto& e : g.edges()) EXPECT_NE(e.a, e.b);
}

TEST(BuildGraph, D2NeighbourhoodIsLocal) {
  const auto& g = corpus_graph();
  const Square d2 = square_from_name("d2");
  auto nb = g.neighbors(d2);
  EXPECT_TRUE(g.has_edge(d2, square_from_name("d7")) || g.has_edge(d2, square_from_name("d8")));
  // the heaviest links are short or along the file
  std::sort(nb.begin(), nb.end(), [&](Square a, Square b) { return g.edge_weight(d2, a) > g.edge_weight(d2, b); });
  int local = 0;
  for (std::size_t i = 0; i < 8 && i < nb.size(); ++i)
    local += board_distance(d2, nb[i]) <= std::sqrt(5.0) + 1e-9 || nb[i].file() == d2.file();
  EXPECT_GE(local, 6);
}

TEST(ForceLayout, TwoBodyEquilibrium) {
  std::array<std::uint64_t, 64> w{};
  BoardGraph g({{square_from_name("a1"), square_from_name("b1"), 1}}, w);
  LayoutParams p;
  p.iterations = 3000;
  auto l = force_layout(g, p);
  const double d = norm(l.at(square_from_name("a1")) - l.at(square_from_name("b1")));
  const double eq = two_body_equilibrium(p);
  EXPECT_NEAR(d, eq, 1e-3);
  // net outward force on one body: repulsion minus attraction minus gravity
  auto outward = [&](double s) { return p.repulsion * 4 / s - s - 2 * p.gravity; };
  EXPECT_GT(outward(eq * 0.99), 0);
  EXPECT_LT(outward(eq * 1.01), 0);
}

TEST(ForceLayout, ErrorsAndDeterminism) {
  EXPECT_THROW(force_layout(BoardGraph{}), DegenerateGraph);
  const auto& g = corpus_graph();
  LayoutParams p;
  p.iterations = 50;
  auto a = force_layout(g, p), b = force_layout(g, p);
  EXPECT_EQ(a.pos, b.pos);
  p.seed = 9;
  EXPECT_NE(force_layout(g, p).pos, a.pos);
  for (Square s : a.squares()) EXPECT_TRUE(std::isfinite(a.at(s).x) && std::isfinite(a.at(s).y));
}

TEST(LayoutFidelity, IdentityAndSimilarity) {
  auto id = layout_fidelity(board_layout([](Vec2 v) { return v; }));
  EXPECT_NEAR(id.spearman_rho, 1.0, 1e-12);
  EXPECT_NEAR(id.procrustes_residual, 0.0, 1e-12);
  auto rot = layout_fidelity(board_layout([](Vec2 v) { return Vec2{-3 * v.y + 5, 3 * v.x - 2}; }));
  EXPECT_NEAR(rot.spearman_rho, 1.0, 1e-12);
  EXPECT_NEAR(rot.procrustes_residual, 0.0, 1e-12);
  auto mirror = layout_fidelity(board_layout([](Vec2 v) { return Vec2{-0.5 * v.x, 0.5 * v.y}; }));
  EXPECT_NEAR(mirror.procrustes_residual, 0.0, 1e-12);
  LayoutMap few;
  for (int i = 0; i < 5; ++i) few.set(Square::from_index(i), {static_cast<double>(i), 0});
  EXPECT_THROW(layout_fidelity(few), DegenerateInput);
}

TEST(LayoutFidelity, ResidualMatchesBruteForce) {
  auto warped = board_layout([](Vec2 v) { return Vec2{v.x + 0.3 * std::sin(v.y), v.y * v.y * 0.2 + v.x * 0.1}; });
  const auto f = layout_fidelity(warped);
  EXPECT_GT(f.procrustes_residual, 0.01);
  EXPECT_NEAR(f.procrustes_residual, brute_procrustes(warped), 1e-6);
  EXPECT_NEAR(layout_fidelity(corpus_layout()).procrustes_residual, brute_procrustes(corpus_layout()), 1e-6);
}

TEST(LayoutFidelity, InvariantUnderSimilarity) {
  const auto& l = corpus_layout();
  LayoutMap moved;
  for (Square s : l.squares()) {
    const Vec2 v = l.at(s);
    moved.set(s, {0.3 * v.y - 7, 0.3 * v.x + 1});  // reflect, scale, translate
  }
  const auto a = layout_fidelity(l), b = layout_fidelity(moved);
  EXPECT_NEAR(a.spearman_rho, b.spearman_rho, 1e-9);
  EXPECT_NEAR(a.procrustes_residual, b.procrustes_residual, 1e-9);
}

TEST(ForceLayout, CorpusRecoversBoard) {
  const auto& l = corpus_layout();
  EXPECT_EQ(l.squares().size(), 64u);
  EXPECT_GE(layout_fidelity(l).spearman_rho, 0.8);
  const double angle = diagonal_angle(l);
  EXPECT_GE(angle, 60.0);
  EXPECT_LE(angle, 120.0);
  // files a and h sit at the two ends of the file axis
  std::array<Vec2, 8> centroid{};
  for (Square s : l.squares()) centroid[static_cast<std::size_t>(s.file())] = centroid[static_cast<std::size_t>(s.file())] + (1.0 / 8) * l.at(s);
  const Vec2 axis = centroid[7] - centroid[0];
  std::array<double, 8> t{};
  for (int f = 0; f < 8; ++f)
    t[static_cast<std::size_t>(f)] = dot(centroid[static_cast<std::size_t>(f)] - centroid[0], axis) / dot(axis, axis);
  for (int f = 1; f < 7; ++f) {
    EXPECT_GT(t[static_cast<std::size_t>(f)], -0.1) << f;
    EXPECT_LT(t[static_cast<std::size_t>(f)], 1.1) << f;
  }
  EXPECT_LT(t[1], t[3]);
  EXPECT_LT(t[3], t[5]);
}

TEST(GraphExport, JsonRoundTripAndGexf) {
  const auto& g = corpus_graph();
  const auto& l = corpus_layout();
  auto j = graph_to_json(g, &l);
  ASSERT_EQ(j["nodes"].size(), 64u);
  for (const auto& n : j["nodes"])
    for (const char* k : {"id", "weight", "x", "y"}) EXPECT_TRUE(n.contains(k));
  for (const auto& e : j["edges"])
    for (const char* k : {"source", "target", "weight"}) EXPECT_TRUE(e.contains(k));
  auto doc = graph_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(doc.graph.edges(), g.edges());
  ASSERT_TRUE(doc.layout.has_value());
  for (Square s : l.squares()) EXPECT_EQ(doc.layout->at(s), l.at(s));
  const auto gexf = graph_to_gexf(g, &l);
  EXPECT_NE(gexf.find("<gexf"), std::string::npos);
  EXPECT_NE(gexf.find("id=\"h8\""), std::string::npos);
  EXPECT_THROW(graph_from_json({{"nodes", {{{"id", "z9"}}}}, {"edges", nlohmann::json::array()}}), ConfigError);
}
