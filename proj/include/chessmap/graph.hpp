#pragma once

/// @file graph.hpp
/// Square-adjacency graph built from moves, filtered to edges that close a
/// triangle, and a ForceAtlas2-style layout of it.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "chessmap/core.hpp"
#include "chessmap/error.hpp"
#include "chessmap/random.hpp"
#include "chessmap/records.hpp"

namespace chessmap {

struct GraphEdge {
  Square a;  // a < b
  Square b;
  std::uint64_t weight = 0;
  bool operator==(const GraphEdge&) const = default;
};

/// Undirected, no self-loops, at most 64 nodes. Node weight counts the moves
/// touching the square; edge weight counts moves in either direction.
class BoardGraph {
 public:
  BoardGraph() = default;

  /// Keeps the given edges as they are; node weights are supplied separately
  /// (defaults to zero for nodes only seen through edges).
  BoardGraph(std::vector<GraphEdge> edges, const std::array<std::uint64_t, 64>& node_weight) {
    for (auto& e : edges) {
      if (e.a == e.b) throw DegenerateGraph("self-loop on " + e.a.name());
      if (e.b < e.a) std::swap(e.a, e.b);
      auto& w = edge_index_[{e.a.index(), e.b.index()}];
      if (w == 0) {
        edges_.push_back(e);
        w = edges_.size();
      } else {
        edges_[w - 1].weight += e.weight;
      }
    }
    std::sort(edges_.begin(), edges_.end(), [](const GraphEdge& x, const GraphEdge& y) {
      return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    edge_index_.clear();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      edge_index_[{e.a.index(), e.b.index()}] = i + 1;
      adj_[static_cast<std::size_t>(e.a.index())].insert(e.b.index());
      adj_[static_cast<std::size_t>(e.b.index())].insert(e.a.index());
    }
    for (int i = 0; i < 64; ++i) {
      const auto k = static_cast<std::size_t>(i);
      if (node_weight[k] > 0 || !adj_[k].empty()) {
        present_[k] = true;
        weight_[k] = node_weight[k];
      }
    }
  }

  const std::vector<GraphEdge>& edges() const { return edges_; }

  std::vector<Square> nodes() const {
    std::vector<Square> out;
    for (int i = 0; i < 64; ++i)
      if (present_[static_cast<std::size_t>(i)]) out.push_back(Square::from_index(i));
    return out;
  }

  bool has_node(Square s) const { return present_[static_cast<std::size_t>(s.index())]; }
  std::uint64_t node_weight(Square s) const { return weight_[static_cast<std::size_t>(s.index())]; }
  std::size_t degree(Square s) const { return adj_[static_cast<std::size_t>(s.index())].size(); }

  std::vector<Square> neighbors(Square s) const {
    std::vector<Square> out;
    for (int i : adj_[static_cast<std::size_t>(s.index())]) out.push_back(Square::from_index(i));
    return out;
  }

  bool has_edge(Square u, Square v) const {
    if (v < u) std::swap(u, v);
    return edge_index_.contains({u.index(), v.index()});
  }

  std::uint64_t edge_weight(Square u, Square v) const {
    if (v < u) std::swap(u, v);
    auto it = edge_index_.find({u.index(), v.index()});
    return it == edge_index_.end() ? 0 : edges_[it->second - 1].weight;
  }

  std::size_t node_count() const { return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), true)); }
  bool empty() const { return node_count() == 0; }

 private:
  std::vector<GraphEdge> edges_;
  std::map<std::pair<int, int>, std::size_t> edge_index_;  // -> position + 1
  std::array<std::set<int>, 64> adj_;
  std::array<bool, 64> present_{};
  std::array<std::uint64_t, 64> weight_{};
};

/// Drops edges with no triangle until every remaining edge has one.
inline std::vector<GraphEdge> triangle_filter(std::vector<GraphEdge> edges) {
  for (;;) {
    std::array<std::set<int>, 64> adj;
    for (const auto& e : edges) {
      adj[static_cast<std::size_t>(e.a.index())].insert(e.b.index());
      adj[static_cast<std::size_t>(e.b.index())].insert(e.a.index());
    }
    std::vector<GraphEdge> kept;
    for (const auto& e : edges) {
      const auto& na = adj[static_cast<std::size_t>(e.a.index())];
      const auto& nb = adj[static_cast<std::size_t>(e.b.index())];
      const bool closed = std::any_of(na.begin(), na.end(), [&](int w) { return nb.contains(w); });
      if (closed) kept.push_back(e);
    }
    if (kept.size() == edges.size()) return kept;
    edges = std::move(kept);
  }
}

/// Every distinct unordered (from, to) pair with its move count.
inline std::vector<GraphEdge> candidate_edges(const std::vector<MoveRecord>& moves) {
  std::map<std::pair<Square, Square>, std::uint64_t> count;
  for (const auto& m : moves) {
    if (m.from == m.to) continue;
    auto key = m.from < m.to ? std::pair(m.from, m.to) : std::pair(m.to, m.from);
    ++count[key];
  }
  std::vector<GraphEdge> out;
  for (const auto& [k, n] : count) out.push_back({k.first, k.second, n});
  return out;
}

inline BoardGraph build_graph(const std::vector<MoveRecord>& moves) {
  std::array<std::uint64_t, 64> weight{};
  for (const auto& m : moves) {
    ++weight[static_cast<std::size_t>(m.from.index())];
    if (m.to != m.from) ++weight[static_cast<std::size_t>(m.to.index())];
  }
  return BoardGraph(triangle_filter(candidate_edges(moves)), weight);
}

/// True when every edge of `g` closes a triangle.
inline bool satisfies_triangle_condition(const BoardGraph& g) {
  for (const auto& e : g.edges()) {
    const auto na = g.neighbors(e.a);
    if (std::none_of(na.begin(), na.end(), [&](Square w) { return w != e.b && g.has_edge(w, e.b); })) return false;
  }
  return true;
}

// ── Layout ──────────────────────────────────────────────────────────────────

struct Vec2 {
  double x = 0, y = 0;
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct LayoutParams {
  int iterations = 1000;
  double repulsion = 10.0;  // k_r
  double gravity = 0.5;     // k_g
  bool weighted_attraction = false;
  double initial_step = 1.0;  // fraction of the force applied on the first iteration
  double final_step = 0.01;   // ... and on the last; decays geometrically in between
  double max_displacement = 10.0;
  std::uint64_t seed = 1;
};

inline nlohmann::json to_json(const LayoutParams& p) {
  return {{"iterations", p.iterations},     {"repulsion", p.repulsion},   {"gravity", p.gravity},
          {"weighted_attraction", p.weighted_attraction}, {"initial_step", p.initial_step},
          {"final_step", p.final_step},     {"max_displacement", p.max_displacement}, {"seed", p.seed}};
}

inline LayoutParams layout_params_from_json(const nlohmann::json& j) {
  LayoutParams p;
  p.iterations = j.value("iterations", p.iterations);
  p.repulsion = j.value("repulsion", p.repulsion);
  p.gravity = j.value("gravity", p.gravity);
  p.weighted_attraction = j.value("weighted_attraction", p.weighted_attraction);
  p.initial_step = j.value("initial_step", p.initial_step);
  p.final_step = j.value("final_step", p.final_step);
  p.max_displacement = j.value("max_displacement", p.max_displacement);
  p.seed = j.value("seed", p.seed);
  if (p.iterations < 1 || !(p.repulsion > 0) || p.gravity < 0 || !(p.initial_step > 0) || !(p.final_step > 0) ||
      !(p.max_displacement > 0))
    throw ConfigError("invalid layout parameters");
  return p;
}

struct LayoutMap {
  std::array<std::optional<Vec2>, 64> pos;
  LayoutParams params;

  bool has(Square s) const { return pos[static_cast<std::size_t>(s.index())].has_value(); }
  Vec2 at(Square s) const {
    const auto& p = pos[static_cast<std::size_t>(s.index())];
    if (!p) throw DegenerateInput("square " + s.name() + " has no layout position");
    return *p;
  }
  void set(Square s, Vec2 v) { pos[static_cast<std::size_t>(s.index())] = v; }
  std::vector<Square> squares() const {
    std::vector<Square> out;
    for (int i = 0; i < 64; ++i)
      if (pos[static_cast<std::size_t>(i)]) out.push_back(Square::from_index(i));
    return out;
  }
};

/// Linear attraction along edges, repulsion k_r (deg u + 1)(deg v + 1) / d
/// between every pair, gravity k_g (deg + 1) toward the origin. Starts from a
/// seeded random circle and runs a fixed number of iterations with a
/// geometrically decaying step.
inline LayoutMap force_layout(const BoardGraph& g, const LayoutParams& params = {}) {
  if (g.edges().empty()) throw DegenerateGraph("layout needs at least one edge");
  const auto nodes = g.nodes();
  const std::size_t n = nodes.size();
  std::vector<int> slot(64, -1);
  for (std::size_t i = 0; i < n; ++i) slot[static_cast<std::size_t>(nodes[i].index())] = static_cast<int>(i);
  std::vector<double> mass(n);
  for (std::size_t i = 0; i < n; ++i) mass[i] = static_cast<double>(g.degree(nodes[i]) + 1);
  struct E {
    std::size_t u, v;
    double w;
  };
  std::vector<E> edges;
  for (const auto& e : g.edges())
    edges.push_back({static_cast<std::size_t>(slot[static_cast<std::size_t>(e.a.index())]),
                     static_cast<std::size_t>(slot[static_cast<std::size_t>(e.b.index())]),
                     params.weighted_attraction ? static_cast<double>(e.weight) : 1.0});

  Rng rng(params.seed);
  const double radius = std::sqrt(static_cast<double>(n)) * 2.0;
  std::vector<Vec2> p(n);
  for (auto& v : p) {
    const double a = 2 * std::numbers::pi * rng.unit();
    const double r = radius * std::sqrt(rng.unit());
    v = {r * std::cos(a), r * std::sin(a)};
  }

  const int iters = params.iterations;
  const double decay = iters > 1 ? std::pow(params.final_step / params.initial_step, 1.0 / (iters - 1)) : 1.0;
  double step = params.initial_step;
  std::vector<Vec2> f(n);
  for (int it = 0; it < iters; ++it) {
    std::fill(f.begin(), f.end(), Vec2{});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Vec2 d = p[i] - p[j];
        double dist = norm(d);
        if (dist < 1e-9) {
          // coincident nodes: separate along a fixed direction
          d = {1e-3 * static_cast<double>(j - i), 1e-3};
          dist = norm(d);
        }
        const double mag = params.repulsion * mass[i] * mass[j] / dist;
        const Vec2 push = (mag / dist) * d;
        f[i] = f[i] + push;
        f[j] = f[j] - push;
      }
    for (const auto& e : edges) {
      const Vec2 d = p[e.v] - p[e.u];  // attraction magnitude w * dist
      f[e.u] = f[e.u] + e.w * d;
      f[e.v] = f[e.v] - e.w * d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double dist = norm(p[i]);
      if (dist > 1e-12) f[i] = f[i] - (params.gravity * mass[i] / dist) * p[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      // forces scale with mass, as in ForceAtlas2 the node's own mass damps its motion
      Vec2 disp = (step / mass[i]) * f[i];
      const double len = norm(disp);
      if (len > params.max_displacement) disp = (params.max_displacement / len) * disp;
      p[i] = p[i] + disp;
    }
    step *= decay;
  }
  LayoutMap out;
  out.params = params;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i].x) || !std::isfinite(p[i].y)) throw DegenerateGraph("layout diverged");
    out.set(nodes[i], p[i]);
  }
  return out;
}

/// Separation of two connected degree-1 nodes at rest: attraction d and
/// gravity 2 k_g balance repulsion 4 k_r / d.
inline double two_body_equilibrium(const LayoutParams& p) {
  return -p.gravity + std::sqrt(p.gravity * p.gravity + 4 * p.repulsion);
}

// ── Fidelity ────────────────────────────────────────────────────────────────

struct LayoutFidelity {
  double spearman_rho = 0;
  double procrustes_residual = 0;  // normalized by the board's spread
};

namespace graph_detail {

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw DegenerateInput("constant distance vector");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace graph_detail

inline Vec2 board_point(Square s) { return {static_cast<double>(s.file()), static_cast<double>(s.rank())}; }

/// Spearman correlation of all-pairs layout distances against board
/// distances, and the residual of the best similarity transform (rotation,
/// reflection, scale, translation) of the layout onto the board, divided by
/// the board points' squared spread.
inline LayoutFidelity layout_fidelity(const LayoutMap& layout) {
  const auto sq = layout.squares();
  if (sq.size() < 8) throw DegenerateInput("layout_fidelity needs at least 8 nodes");
  std::vector<double> dl, db;
  for (std::size_t i = 0; i < sq.size(); ++i)
    for (std::size_t j = i + 1; j < sq.size(); ++j) {
      dl.push_back(norm(layout.at(sq[i]) - layout.at(sq[j])));
      db.push_back(board_distance(sq[i], sq[j]));
    }
  LayoutFidelity out;
  out.spearman_rho = graph_detail::pearson(graph_detail::average_ranks(dl), graph_detail::average_ranks(db));

  Vec2 cx{}, cy{};
  for (Square s : sq) {
    cx = cx + layout.at(s);
    cy = cy + board_point(s);
  }
  const double n = static_cast<double>(sq.size());
  cx = (1 / n) * cx;
  cy = (1 / n) * cy;
  double m11 = 0, m12 = 0, m21 = 0, m22 = 0, sxx = 0, syy = 0;
  for (Square s : sq) {
    const Vec2 x = layout.at(s) - cx, y = board_point(s) - cy;
    m11 += x.x * y.x;
    m12 += x.x * y.y;
    m21 += x.y * y.x;
    m22 += x.y * y.y;
    sxx += dot(x, x);
    syy += dot(y, y);
  }
  if (sxx == 0) throw DegenerateInput("layout collapsed to a point");
  // nuclear norm of the 2x2 cross-covariance
  const double e = std::hypot(m11 + m22, m21 - m12);
  const double f = std::hypot(m11 - m22, m21 + m12);
  const double nuclear = std::max(e, f);
  out.procrustes_residual = std::max(0.0, syy - nuclear * nuclear / sxx) / syy;
  return out;
}

/// Angle in degrees between the a1-h8 and a8-h1 segments of the layout.
inline double diagonal_angle(const LayoutMap& layout) {
  const Vec2 u = layout.at(square_from_name("h8")) - layout.at(square_from_name("a1"));
  const Vec2 v = layout.at(square_from_name("h1")) - layout.at(square_from_name("a8"));
  const double c = std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

// ── Export ──────────────────────────────────────────────────────────────────

inline nlohmann::json graph_to_json(const BoardGraph& g, const LayoutMap* layout = nullptr) {
  nlohmann::json nodes = nlohmann::json::array(), edges = nlohmann::json::array();
  for (Square s : g.nodes()) {
    nlohmann::json n = {{"id", s.name()}, {"weight", g.node_weight(s)}};
    if (layout && layout->has(s)) {
      n["x"] = layout->at(s).x;
      n["y"] = layout->at(s).y;
    }
    nodes.push_back(n);
  }
  for (const auto& e : g.edges()) edges.push_back({{"source", e.a.name()}, {"target", e.b.name()}, {"weight", e.weight}});
  nlohmann::json out = {{"nodes", nodes}, {"edges", edges}};
  if (layout) out["layout"] = to_json(layout->params);
  return out;
}

struct GraphDocument {
  BoardGraph graph;
  std::optional<LayoutMap> layout;
};

inline GraphDocument graph_from_json(const nlohmann::json& j) {
  try {
    std::array<std::uint64_t, 64> weight{};
    LayoutMap layout;
    bool any_pos = false;
    for (const auto& n : j.at("nodes")) {
      const Square s = square_from_name(n.at("id").get<std::string>());
      weight[static_cast<std::size_t>(s.index())] = n.value("weight", std::uint64_t{0});
      if (n.contains("x") && n.contains("y")) {
        layout.set(s, {n.at("x").get<double>(), n.at("y").get<double>()});
        any_pos = true;
      }
    }
    std::vector<GraphEdge> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({square_from_name(e.at("source").get<std::string>()),
                       square_from_name(e.at("target").get<std::string>()), e.value("weight", std::uint64_t{0})});
    if (j.contains("layout")) layout.params = layout_params_from_json(j.at("layout"));
    GraphDocument doc{BoardGraph(std::move(edges), weight), std::nullopt};
    if (any_pos) doc.layout = layout;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad graph document: ") + e.what());
  } catch (const MalformedSquare& e) {
    throw ConfigError(std::string("bad graph document: ") + e.what());
  }
}

/// GEXF 1.2 document with optional viz positions.
inline std::string graph_to_gexf(const BoardGraph& g, const LayoutMap* layout = nullptr) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://gexf.net/1.2\" xmlns:viz=\"http://gexf.net/1.2/viz\" version=\"1.2\">\n"
      << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n"
      << "    <attributes class=\"node\">\n"
      << "      <attribute id=\"weight\" title=\"weight\" type=\"long\"/>\n"
      << "    </attributes>\n"
      << "    <nodes>\n";
  for (Square s : g.nodes()) {
    out << "      <node id=\"" << s.name() << "\" label=\"" << s.name() << "\">\n"
        << "        <attvalues><attvalue for=\"weight\" value=\"" << g.node_weight(s) << "\"/></attvalues>\n";
    if (layout && layout->has(s))
      out << "        <viz:position x=\"" << layout->at(s).x << "\" y=\"" << layout->at(s).y << "\" z=\"0\"/>\n";
    out << "      </node>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  std::size_t id = 0;
  for (const auto& e : g.edges())
    out << "      <edge id=\"" << id++ << "\" source=\"" << e.a.name() << "\" target=\"" << e.b.name()
        << "\" weight=\"" << e.weight << "\"/>\n";
  out << "    </edges>\n  </graph>\n</gexf>\n";
  return out.str();
}

}  // namespace chessmap
