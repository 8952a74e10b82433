#pragma once

/// @file analytics.hpp
/// Per-piece descriptive tables, Pearson correlation, chi-square test of
/// independence, illegal-move tables, ablation summaries and column counts.

#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "chessmap/core.hpp"
#include "chessmap/error.hpp"
#include "chessmap/records.hpp"
#include "chessmap/store.hpp"

namespace chessmap {

inline std::string_view piece_row_label(PieceKind p) noexcept {
  switch (p) {
    case PieceKind::Pawn: return "Pawns";
    case PieceKind::Rook: return "Rooks";
    case PieceKind::Bishop: return "Bishops";
    case PieceKind::Knight: return "Knights";
    case PieceKind::Queen: return "Queen";
    case PieceKind::King: return "King";
  }
  return "?";
}

// ── Descriptive table ───────────────────────────────────────────────────────

struct PieceTable {
  std::string label;
  std::array<std::uint64_t, 6> counts{};
  std::uint64_t total = 0;

  double percent(PieceKind p) const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(counts[piece_index(p)]) / static_cast<double>(total);
  }
  std::array<double, 6> percents() const {
    std::array<double, 6> out{};
    for (PieceKind p : kAllPieces) out[piece_index(p)] = percent(p);
    return out;
  }
};

inline PieceTable piece_table(const std::vector<MoveRecord>& moves, std::string label = {}) {
  PieceTable t;
  t.label = std::move(label);
  for (const auto& r : moves) ++t.counts[piece_index(r.piece)];
  t.total = moves.size();
  return t;
}

inline PieceTable piece_table(const MoveStore& store, const std::string& tag) {
  PieceTable t;
  t.label = tag;
  MoveFilter f;
  f.tags = {tag};
  store.for_each(f, [&](const StoredMove& m) {
    ++t.counts[piece_index(m.record.piece)];
    ++t.total;
  });
  return t;
}

// ── Tests ───────────────────────────────────────────────────────────────────

struct PearsonResult {
  double r = 0;
  double p_two_tailed = 1;
};

/// Product-moment correlation with a two-tailed p-value from Student's t
/// with n - 2 degrees of freedom.
inline PearsonResult pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DegenerateInput("pearson_r: length mismatch");
  if (x.size() < 3) throw DegenerateInput("pearson_r: need at least 3 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) throw DegenerateInput("pearson_r: constant vector");
  PearsonResult out;
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(out.r) >= 1.0) {
    out.p_two_tailed = 0.0;
    return out;
  }
  const double df = n - 2;
  const double t = out.r * std::sqrt(df / (1 - out.r * out.r));
  boost::math::students_t dist(df);
  out.p_two_tailed = std::min(1.0, 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  return out;
}

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p = 1;
};

/// Pearson chi-square test of independence on an r x c table of counts.
inline ChiSquareResult chi_square_independence(const std::vector<std::vector<double>>& table) {
  if (table.size() < 2 || table.front().size() < 2) throw DegenerateInput("chi-square: need at least 2x2");
  const std::size_t cols = table.front().size();
  std::vector<double> row_sum(table.size(), 0), col_sum(cols, 0);
  double total = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() != cols) throw DegenerateInput("chi-square: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (table[i][j] < 0) throw DegenerateInput("chi-square: negative count");
      row_sum[i] += table[i][j];
      col_sum[j] += table[i][j];
      total += table[i][j];
    }
  }
  for (double s : row_sum)
    if (s <= 0) throw DegenerateInput("chi-square: zero row marginal");
  for (double s : col_sum)
    if (s <= 0) throw DegenerateInput("chi-square: zero column marginal");
  ChiSquareResult out;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row_sum[i] * col_sum[j] / total;
      out.statistic += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  out.dof = static_cast<int>((table.size() - 1) * (cols - 1));
  boost::math::chi_squared dist(out.dof);
  out.p = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

struct CorpusComparison {
  PearsonResult on_percent;
  PearsonResult on_counts;
  ChiSquareResult chi_square;
};

/// Both correlation variants and the 2 x 6 chi-square for two corpora.
inline CorpusComparison compare_corpora(const PieceTable& a, const PieceTable& b) {
  std::vector<double> ca, cb, pa, pb;
  for (PieceKind p : kAllPieces) {
    ca.push_back(static_cast<double>(a.counts[piece_index(p)]));
    cb.push_back(static_cast<double>(b.counts[piece_index(p)]));
    pa.push_back(a.percent(p));
    pb.push_back(b.percent(p));
  }
  return {pearson_r(pa, pb), pearson_r(ca, cb), chi_square_independence({ca, cb})};
}

// ── Legality ────────────────────────────────────────────────────────────────

struct LegalityTable {
  std::string label;
  std::array<std::uint64_t, 6> illegal{};
  std::array<std::uint64_t, 6> total{};

  std::uint64_t illegal_total() const { return std::accumulate(illegal.begin(), illegal.end(), std::uint64_t{0}); }
  std::uint64_t grand_total() const { return std::accumulate(total.begin(), total.end(), std::uint64_t{0}); }
  double percent(PieceKind p) const {
    const auto n = total[piece_index(p)];
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(illegal[piece_index(p)]) / static_cast<double>(n);
  }
  double total_percent() const {
    const auto n = grand_total();
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(illegal_total()) / static_cast<double>(n);
  }
  /// Unweighted mean of the per-piece percentages over pieces that occur.
  double average_percent() const {
    double sum = 0;
    int k = 0;
    for (PieceKind p : kAllPieces)
      if (total[piece_index(p)] > 0) {
        sum += percent(p);
        ++k;
      }
    return k == 0 ? 0.0 : sum / k;
  }
};

inline LegalityTable legality_table(const std::vector<MoveRecord>& moves, std::string label = {}) {
  LegalityTable t;
  t.label = std::move(label);
  for (const auto& r : moves) {
    ++t.total[piece_index(r.piece)];
    if (!is_legal_geometry(r.geometry())) ++t.illegal[piece_index(r.piece)];
  }
  return t;
}

/// Group-by over the legality flags stored at ingest.
inline LegalityTable legality_table(const MoveStore& store, const std::string& tag) {
  LegalityTable t;
  t.label = tag;
  MoveFilter f;
  f.tags = {tag};
  store.for_each(f, [&](const StoredMove& m) {
    ++t.total[piece_index(m.record.piece)];
    if (!m.legal) ++t.illegal[piece_index(m.record.piece)];
  });
  return t;
}

struct AblationSummary {
  std::vector<LegalityTable> columns;  // in the order given
  std::vector<double> averages() const {
    std::vector<double> out;
    for (const auto& c : columns) out.push_back(c.average_percent());
    return out;
  }
};

inline AblationSummary ablation_summary(const MoveStore& store, const std::vector<std::string>& tags) {
  if (tags.empty()) throw ConfigError("ablation_summary needs at least one tag");
  AblationSummary s;
  for (const auto& t : tags) s.columns.push_back(legality_table(store, t));
  return s;
}

// ── Column occupancy ────────────────────────────────────────────────────────

using FileCounts = std::array<std::uint64_t, 8>;

/// Counts of destination files a..h.
inline FileCounts column_occupancy(const std::vector<MoveRecord>& moves) {
  FileCounts c{};
  for (const auto& r : moves) ++c[static_cast<std::size_t>(r.to.file())];
  return c;
}

/// Counts of visited-node files a..h over a set of paths.
inline FileCounts column_occupancy(const std::vector<std::vector<Square>>& paths) {
  FileCounts c{};
  for (const auto& p : paths)
    for (Square s : p) ++c[static_cast<std::size_t>(s.file())];
  return c;
}

// ── Output ──────────────────────────────────────────────────────────────────

inline std::string thousands(std::uint64_t v) {
  std::string s = std::to_string(v);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

inline std::string percent_text(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f%%", decimals, v);
  return buf;
}

namespace analytics_detail {

inline std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

inline std::string render_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size() + 2);
    }
  std::ostringstream out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) line += pad(r[i], width[i]);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
  return out.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace analytics_detail

/// Counts and percent columns per corpus, with a totals row.
inline std::string piece_tables_text(const std::vector<PieceTable>& tables) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> h1{""}, h2{""};
  for (std::size_t i = 0; i < tables.size(); ++i) h1.push_back(i == 0 ? "Counts" : "");
  for (std::size_t i = 0; i < tables.size(); ++i) h1.push_back(i == 0 ? "Percent" : "");
  for (int k = 0; k < 2; ++k)
    for (const auto& t : tables) h2.push_back(t.label);
  rows.push_back(h1);
  rows.push_back(h2);
  for (PieceKind p : kAllPieces) {
    std::vector<std::string> r{std::string(piece_row_label(p))};
    for (const auto& t : tables) r.push_back(thousands(t.counts[piece_index(p)]));
    for (const auto& t : tables) r.push_back(percent_text(t.percent(p), 1));
    rows.push_back(r);
  }
  std::vector<std::string> tot{"Totals"};
  for (const auto& t : tables) tot.push_back(thousands(t.total));
  for (const auto& t : tables) tot.push_back(percent_text(t.total ? 100.0 : 0.0, 1));
  rows.push_back(tot);
  return analytics_detail::render_rows(rows);
}

inline std::string piece_tables_csv(const std::vector<PieceTable>& tables) {
  std::ostringstream out;
  out << "piece";
  for (const auto& t : tables) out << ',' << analytics_detail::csv_field(t.label + " count");
  for (const auto& t : tables) out << ',' << analytics_detail::csv_field(t.label + " percent");
  out << '\n';
  for (PieceKind p : kAllPieces) {
    out << piece_row_label(p);
    for (const auto& t : tables) out << ',' << t.counts[piece_index(p)];
    for (const auto& t : tables) out << ',' << t.percent(p);
    out << '\n';
  }
  out << "Totals";
  for (const auto& t : tables) out << ',' << t.total;
  for (const auto& t : tables) out << ',' << (t.total ? 100.0 : 0.0);
  out << '\n';
  return out.str();
}

inline std::string legality_table_text(const LegalityTable& t) {
  std::vector<std::vector<std::string>> rows{{"", "Illegal", "Total", "Percent"}};
  for (PieceKind p : kAllPieces)
    rows.push_back({std::string(piece_row_label(p)), thousands(t.illegal[piece_index(p)]),
                    thousands(t.total[piece_index(p)]), percent_text(t.percent(p), 2)});
  rows.push_back({"Totals", thousands(t.illegal_total()), thousands(t.grand_total()), percent_text(t.total_percent(), 2)});
  return analytics_detail::render_rows(rows);
}

inline std::string legality_table_csv(const LegalityTable& t) {
  std::ostringstream out;
  out << "piece,illegal,total,percent\n";
  for (PieceKind p : kAllPieces)
    out << piece_row_label(p) << ',' << t.illegal[piece_index(p)] << ',' << t.total[piece_index(p)] << ','
        << t.percent(p) << '\n';
  out << "Totals," << t.illegal_total() << ',' << t.grand_total() << ',' << t.total_percent() << '\n';
  return out.str();
}

inline std::string ablation_text(const AblationSummary& s) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{""};
  for (const auto& c : s.columns) head.push_back(c.label);
  rows.push_back(head);
  for (PieceKind p : kAllPieces) {
    std::vector<std::string> r{std::string(piece_row_label(p))};
    for (const auto& c : s.columns) r.push_back(percent_text(c.percent(p), 2));
    rows.push_back(r);
  }
  std::vector<std::string> avg{"Average"};
  for (double a : s.averages()) avg.push_back(percent_text(a, 2));
  rows.push_back(avg);
  return analytics_detail::render_rows(rows);
}

inline std::string ablation_csv(const AblationSummary& s) {
  std::ostringstream out;
  out << "piece";
  for (const auto& c : s.columns) out << ',' << analytics_detail::csv_field(c.label);
  out << '\n';
  for (PieceKind p : kAllPieces) {
    out << piece_row_label(p);
    for (const auto& c : s.columns) out << ',' << c.percent(p);
    out << '\n';
  }
  out << "Average";
  for (double a : s.averages()) out << ',' << a;
  out << '\n';
  return out.str();
}

inline std::string occupancy_csv(const FileCounts& c) {
  std::ostringstream out;
  out << "file,count\n";
  for (int f = 0; f < 8; ++f) out << static_cast<char>('a' + f) << ',' << c[static_cast<std::size_t>(f)] << '\n';
  return out.str();
}

}  // namespace chessmap
