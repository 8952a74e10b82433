#pragma once

/// @file wayfinder.hpp
/// Greedy coarse and granular walks across a laid-out board graph that follow
/// the straight origin-to-target line.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chessmap/core.hpp"
#include "chessmap/error.hpp"
#include "chessmap/graph.hpp"

namespace chessmap {

enum class PathMode : std::uint8_t { Coarse, Granular };

inline std::string_view mode_name(PathMode m) noexcept { return m == PathMode::Coarse ? "coarse" : "granular"; }

inline std::optional<PathMode> mode_from_name(std::string_view s) noexcept {
  if (s == "coarse") return PathMode::Coarse;
  if (s == "granular") return PathMode::Granular;
  return std::nullopt;
}

enum class PathStatus : std::uint8_t { Reached, NoProgress, StepBudgetExceeded };

inline std::string_view status_name(PathStatus s) noexcept {
  switch (s) {
    case PathStatus::Reached: return "reached";
    case PathStatus::NoProgress: return "no_progress";
    case PathStatus::StepBudgetExceeded: return "step_budget_exceeded";
  }
  return "?";
}

struct PathQuery {
  Square origin;
  Square target;
  PathMode mode = PathMode::Coarse;
  int max_steps = 64;
};

struct PathStep {
  Square from;
  Square to;
  double layout_length = 0;
  double board_length = 0;
  std::vector<PieceKind> pieces;  // capable of the plain move from -> to
};

struct PathResult {
  std::vector<Square> nodes;
  std::vector<PathStep> steps;
  PathMode mode = PathMode::Coarse;
  PathStatus status = PathStatus::Reached;
  double total_layout_length = 0;

  bool reached() const { return status == PathStatus::Reached; }
};

namespace wayfinder_detail {

inline void check_query(const BoardGraph& g, const LayoutMap& layout, const PathQuery& q) {
  if (q.origin == q.target) throw ConfigError("origin and target must differ");
  if (q.max_steps < 1) throw ConfigError("max_steps must be >= 1");
  for (Square s : {q.origin, q.target}) {
    if (!g.has_node(s)) throw ConfigError("square " + s.name() + " is not in the graph");
    if (!layout.has(s)) throw ConfigError("square " + s.name() + " has no layout position");
  }
}

inline PathStep make_step(const LayoutMap& layout, Square a, Square b) {
  return {a, b, norm(layout.at(b) - layout.at(a)), board_distance(a, b), distinct_pieces(pieces_capable(a, b, false))};
}

inline PathResult walk(const BoardGraph& g, const LayoutMap& layout, const PathQuery& q) {
  check_query(g, layout, q);
  const Vec2 o = layout.at(q.origin);
  const Vec2 t = layout.at(q.target);
  const double span = norm(t - o);
  if (span == 0) throw DegenerateInput("origin and target share a layout position");
  const Vec2 u = (1 / span) * (t - o);
  auto proj = [&](Vec2 x) { return dot(x - o, u); };
  auto perp = [&](Vec2 x) { return norm(x - (o + proj(x) * u)); };

  PathResult r;
  r.mode = q.mode;
  r.nodes.push_back(q.origin);
  Square cur = q.origin;
  for (int step = 0; step < q.max_steps; ++step) {
    const Vec2 c = layout.at(cur);
    const double pc = proj(c);
    std::optional<Square> best;
    double best_score = 0;
    if (g.has_edge(cur, q.target)) {
      best = q.target;
    } else {
      for (Square n : g.neighbors(cur)) {
        if (!layout.has(n)) continue;
        const Vec2 x = layout.at(n);
        const double pn = proj(x);
        if (!(pn > pc) || pn > span) continue;
        const double dp = perp(x);
        const double score = q.mode == PathMode::Coarse ? dp : std::hypot(norm(x - c), dp);
        const double tol = 1e-12 * std::max(1.0, span);
        if (!best || score < best_score - tol ||
            (std::abs(score - best_score) <= tol && n.name() < best->name())) {
          best = n;
          best_score = score;
        }
      }
    }
    if (!best) {
      r.status = PathStatus::NoProgress;
      return r;
    }
    r.steps.push_back(make_step(layout, cur, *best));
    r.total_layout_length += r.steps.back().layout_length;
    r.nodes.push_back(*best);
    cur = *best;
    if (cur == q.target) {
      r.status = PathStatus::Reached;
      return r;
    }
  }
  r.status = PathStatus::StepBudgetExceeded;
  return r;
}

}  // namespace wayfinder_detail

/// At each node, among neighbors whose foot on the line lies strictly ahead
/// of the current foot and not past the target, picks the one closest to
/// the line. A neighboring target is always taken.
inline PathResult coarse_path(const BoardGraph& g, const LayoutMap& layout, PathQuery q) {
  q.mode = PathMode::Coarse;
  return wayfinder_detail::walk(g, layout, q);
}

/// As coarse_path, minimizing sqrt(step length^2 + distance to line^2).
inline PathResult granular_path(const BoardGraph& g, const LayoutMap& layout, PathQuery q) {
  q.mode = PathMode::Granular;
  return wayfinder_detail::walk(g, layout, q);
}

inline PathResult find_path(const BoardGraph& g, const LayoutMap& layout, const PathQuery& q) {
  return wayfinder_detail::walk(g, layout, q);
}

struct StepClass {
  std::vector<PieceKind> pieces;
  bool flagged = false;  // no piece can make this move
};

inline std::vector<StepClass> classify_path(const PathResult& p) {
  std::vector<StepClass> out;
  for (const auto& s : p.steps) {
    auto pieces = distinct_pieces(pieces_capable(s.from, s.to, false));
    const bool flagged = pieces.empty();
    out.push_back({std::move(pieces), flagged});
  }
  return out;
}

inline double mean_board_step(const PathResult& p) {
  if (p.steps.empty()) return 0;
  double s = 0;
  for (const auto& st : p.steps) s += st.board_length;
  return s / static_cast<double>(p.steps.size());
}

inline nlohmann::json to_json(const PathResult& p) {
  nlohmann::json nodes = nlohmann::json::array(), steps = nlohmann::json::array();
  for (Square s : p.nodes) nodes.push_back(s.name());
  for (const auto& s : p.steps) {
    nlohmann::json pieces = nlohmann::json::array();
    for (PieceKind k : s.pieces) pieces.push_back(piece_name(k));
    steps.push_back({{"from", s.from.name()},
                     {"to", s.to.name()},
                     {"layout_length", s.layout_length},
                     {"board_length", s.board_length},
                     {"pieces", pieces}});
  }
  return {{"mode", mode_name(p.mode)},
          {"status", status_name(p.status)},
          {"nodes", nodes},
          {"steps", steps},
          {"total_layout_length", p.total_layout_length}};
}

inline std::string path_csv(const PathResult& p) {
  std::ostringstream out;
  out << "step,from,to,layout_length,board_length,pieces\n";
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& s = p.steps[i];
    out << i + 1 << ',' << s.from.name() << ',' << s.to.name() << ',' << s.layout_length << ',' << s.board_length
        << ',';
    for (std::size_t k = 0; k < s.pieces.size(); ++k) out << (k ? "|" : "") << piece_name(s.pieces[k]);
    out << '\n';
  }
  return out.str();
}

}  // namespace chessmap
