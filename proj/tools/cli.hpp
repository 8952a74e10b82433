#pragma once

// Pipeline driver behind the chessmap executable. Kept in a header so the
// test suite can run subcommands in-process.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include "chessmap/analytics.hpp"
#include "chessmap/extract.hpp"
#include "chessmap/graph.hpp"
#include "chessmap/narrator.hpp"
#include "chessmap/pgn.hpp"
#include "chessmap/store.hpp"
#include "chessmap/textgen.hpp"
#include "chessmap/wayfinder.hpp"

namespace chessmap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kBackend = 3 };

struct PipelineConfig {
  std::string store = "chessmap-store";
  std::string export_dir = ".";
  std::uint64_t seed = 1;
  std::string templates;  // path to a TemplateSet JSON file; empty = defaults
  LayoutParams layout;
  std::vector<std::string> prompts = prompt_battery();
  // generation
  std::string backend = "surrogate";
  std::string model;  // surrogate model JSON
  std::string url;    // remote endpoint
  int batches = 8;
  int lines = 100;
  int max_chars = 100;
  double temperature = 1.0;
  int max_in_flight = 4;
};

inline PipelineConfig load_config(const std::string& path) {
  PipelineConfig c;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
    c.store = j.value("store", c.store);
    c.export_dir = j.value("export_dir", c.export_dir);
    c.seed = j.value("seed", c.seed);
    c.templates = j.value("templates", c.templates);
    if (j.contains("layout")) c.layout = layout_params_from_json(j.at("layout"));
    if (j.contains("prompts")) c.prompts = j.at("prompts").get<std::vector<std::string>>();
    if (j.contains("generation")) {
      const auto& g = j.at("generation");
      c.backend = g.value("backend", c.backend);
      c.model = g.value("model", c.model);
      c.url = g.value("url", c.url);
      c.batches = g.value("batches", c.batches);
      c.lines = g.value("lines", c.lines);
      c.max_chars = g.value("max_chars", c.max_chars);
      c.temperature = g.value("temperature", c.temperature);
      c.max_in_flight = g.value("max_in_flight", c.max_in_flight);
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad config file " + path + ": " + e.what());
  }
  if (c.prompts.empty()) throw ConfigError("prompt battery is empty");
  return c;
}

inline TemplateSet load_templates(const PipelineConfig& c) {
  if (c.templates.empty()) return TemplateSet::defaults();
  std::ifstream in(c.templates);
  if (!in) throw ConfigError("cannot open template file " + c.templates);
  try {
    auto t = TemplateSet::from_json(json::parse(in));
    t.validate();
    return t;
  } catch (const json::exception& e) {
    throw ConfigError("bad template file: " + std::string(e.what()));
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw StorageError("bad JSON in " + path + ": " + e.what());
  }
}

// Files written through here appear only on commit(); anything left
// uncommitted is deleted, so a failed run leaves no partial artifacts.
class Outputs {
 public:
  ~Outputs() {
    for (const auto& [tmp, _] : pending_) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }

  void write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".partial";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw StorageError("cannot write " + path.string());
    pending_.emplace_back(tmp, path);
  }

  void commit() {
    std::size_t done = 0;
    try {
      for (; done < pending_.size(); ++done) fs::rename(pending_[done].first, pending_[done].second);
    } catch (const fs::filesystem_error& e) {
      std::error_code ec;
      for (std::size_t i = 0; i < done; ++i) fs::remove(pending_[i].second, ec);
      pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(done));
      throw StorageError(std::string("cannot place output: ") + e.what());
    }
    pending_.clear();
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> pending_;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::vector<MoveRecord> tag_moves(const MoveStore& store, const std::vector<std::string>& tags) {
  MoveFilter f;
  f.tags = tags;
  return store.records(f);
}

// ── SVG board overlay ───────────────────────────────────────────────────────

inline std::string render_svg(const std::vector<PathResult>& paths, const std::string& title) {
  constexpr int cell = 60, margin = 30;
  static const char* colors[] = {"#d1495b", "#00798c", "#edae49", "#30638e"};
  auto cx = [&](Square s) { return margin + s.file() * cell + cell / 2; };
  auto cy = [&](Square s) { return margin + (7 - s.rank()) * cell + cell / 2; };
  std::ostringstream o;
  const int size = 8 * cell + 2 * margin;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
    << "\" font-family=\"sans-serif\">\n";
  o << "<title>" << title << "</title>\n";
  for (Square s : all_squares())
    o << "<rect x=\"" << margin + s.file() * cell << "\" y=\"" << margin + (7 - s.rank()) * cell << "\" width=\""
      << cell << "\" height=\"" << cell << "\" fill=\"" << ((s.file() + s.rank()) % 2 ? "#f0d9b5" : "#b58863")
      << "\"/>\n";
  for (int f = 0; f < 8; ++f)
    o << "<text x=\"" << margin + f * cell + cell / 2 << "\" y=\"" << size - 10 << "\" text-anchor=\"middle\">"
      << static_cast<char>('a' + f) << "</text>\n";
  for (int r = 0; r < 8; ++r)
    o << "<text x=\"12\" y=\"" << margin + (7 - r) * cell + cell / 2 + 5 << "\">" << r + 1 << "</text>\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    const char* c = colors[i % 4];
    o << "<g class=\"path\" data-mode=\"" << mode_name(p.mode) << "\">\n<polyline fill=\"none\" stroke=\"" << c
      << "\" stroke-width=\"4\" stroke-opacity=\"0.8\" points=\"";
    for (Square s : p.nodes) o << cx(s) << ',' << cy(s) << ' ';
    o << "\"/>\n";
    for (Square s : p.nodes)
      o << "<circle cx=\"" << cx(s) << "\" cy=\"" << cy(s) << "\" r=\"8\" fill=\"" << c << "\"><title>" << s.name()
        << "</title></circle>\n";
    o << "</g>\n";
  }
  int y = size + 12;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    o << "<text x=\"" << margin + static_cast<int>(i) * 200 << "\" y=\"" << y << "\" fill=\"" << colors[i % 4]
      << "\">" << mode_name(p.mode) << ": " << p.nodes.front().name() << " to " << p.nodes.back().name() << " ("
      << status_name(p.status) << ")</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ── Serve ───────────────────────────────────────────────────────────────────

// Immutable state shared by all request handlers.
struct Snapshot {
  BoardGraph graph;
  LayoutMap layout;
  json graph_json;
  std::vector<std::pair<std::string, std::vector<MoveRecord>>> corpora;
};

inline json file_counts_json(const FileCounts& c) {
  json out = json::object();
  for (int f = 0; f < 8; ++f) out[std::string(1, static_cast<char>('a' + f))] = c[static_cast<std::size_t>(f)];
  return out;
}

inline json pieces_json(const Snapshot& s) {
  json out = json::array();
  for (const auto& [tag, moves] : s.corpora) {
    const auto t = piece_table(moves, tag);
    json counts = json::object(), percent = json::object();
    for (PieceKind p : kAllPieces) {
      counts[std::string(piece_name(p))] = t.counts[piece_index(p)];
      percent[std::string(piece_name(p))] = t.percent(p);
    }
    out.push_back({{"tag", tag}, {"total", t.total}, {"counts", counts}, {"percent", percent}});
  }
  return out;
}

inline std::vector<PathResult> corner_paths(const Snapshot& s) {
  std::vector<PathResult> out;
  for (auto [a, b] : {std::pair{"a1", "h8"}, std::pair{"a8", "h1"}})
    for (auto mode : {PathMode::Coarse, PathMode::Granular})
      out.push_back(find_path(s.graph, s.layout, {square_from_name(a), square_from_name(b), mode}));
  return out;
}

inline json columns_json(const Snapshot& s) {
  std::vector<MoveRecord> all;
  for (const auto& [_, m] : s.corpora) all.insert(all.end(), m.begin(), m.end());
  std::vector<std::vector<Square>> coarse, granular;
  for (const auto& p : corner_paths(s)) (p.mode == PathMode::Coarse ? coarse : granular).push_back(p.nodes);
  return {{"moves", file_counts_json(column_occupancy(all))},
          {"paths", {{"coarse", file_counts_json(column_occupancy(coarse))},
                     {"granular", file_counts_json(column_occupancy(granular))}}}};
}

inline void install_routes(httplib::Server& srv, const Snapshot& snap) {
  auto send_error = [](httplib::Response& res, int status, const std::string& kind, const std::string& msg) {
    res.status = status;
    res.set_content(json{{"error", kind}, {"message", msg}}.dump(), "application/json");
  };
  srv.Get("/graph", [&snap](const httplib::Request&, httplib::Response& res) {
    res.set_content(snap.graph_json.dump(), "application/json");
  });
  srv.Get("/path", [&snap, send_error](const httplib::Request& req, httplib::Response& res) {
    try {
      if (!req.has_param("from") || !req.has_param("to")) throw ConfigError("from and to are required");
      auto mode = mode_from_name(req.has_param("mode") ? req.get_param_value("mode") : "coarse");
      if (!mode) throw ConfigError("mode must be coarse or granular");
      PathQuery q{square_from_name(req.get_param_value("from")), square_from_name(req.get_param_value("to")), *mode};
      res.set_content(to_json(find_path(snap.graph, snap.layout, q)).dump(), "application/json");
    } catch (const Error& e) {
      send_error(res, 400, e.kind(), e.what());
    }
  });
  srv.Get("/stats/columns", [&snap, send_error](const httplib::Request& req, httplib::Response& res) {
    try {
      if (req.get_param_value("format") == "csv") {
        std::vector<MoveRecord> all;
        for (const auto& [_, m] : snap.corpora) all.insert(all.end(), m.begin(), m.end());
        res.set_content(occupancy_csv(column_occupancy(all)), "text/csv");
      } else {
        res.set_content(columns_json(snap).dump(), "application/json");
      }
    } catch (const Error& e) {
      send_error(res, 500, e.kind(), e.what());
    }
  });
  srv.Get("/stats/pieces", [&snap](const httplib::Request&, httplib::Response& res) {
    res.set_content(pieces_json(snap).dump(), "application/json");
  });
}

inline Snapshot load_snapshot(const std::string& graph_path, const PipelineConfig& cfg,
                              const std::vector<std::string>& tags) {
  Snapshot s;
  auto doc = graph_from_json(read_json(graph_path));
  if (!doc.layout) throw DegenerateInput("graph file has no layout; run the layout subcommand first");
  s.graph = std::move(doc.graph);
  s.layout = *doc.layout;
  s.graph_json = graph_to_json(s.graph, &s.layout);
  if (!tags.empty()) {
    MoveStore store(cfg.store);
    for (const auto& t : tags) s.corpora.emplace_back(t, tag_moves(store, {t}));
  }
  return s;
}

// ── Subcommands ─────────────────────────────────────────────────────────────

struct Context {
  std::ostream& out;
  std::ostream& err;
  PipelineConfig cfg;
  Outputs outputs;
};

inline void cmd_ingest(Context& c, const std::string& pgn, const std::string& tag) {
  const auto report = parse_pgn_report(read_file(pgn), tag);
  for (const auto& f : report.failures)
    c.err << json{{"warning", f.kind}, {"game", f.game_index}, {"token", f.token}, {"message", f.message}}.dump()
          << '\n';
  if (report.games.empty()) throw EmptyCorpus("no game in " + pgn + " could be parsed");
  std::vector<MoveRecord> moves;
  for (const auto& g : report.games) moves.insert(moves.end(), g.moves.begin(), g.moves.end());
  MoveStore store(c.cfg.store);
  store.register_tag(tag, MoveSource::Human,
                     {{"input", fs::path(pgn).filename().string()},
                      {"games", report.games.size()},
                      {"failed_games", report.failures.size()}});
  const auto n = store.append_moves(tag, moves);
  c.out << json{{"tag", tag}, {"games", report.games.size()}, {"failed_games", report.failures.size()},
                {"moves", n}}.dump()
        << '\n';
}

inline void cmd_narrate(Context& c, const std::string& pgn, const std::string& out_dir, double split) {
  const auto games = parse_pgn(read_file(pgn));
  auto corpus = narrate_corpus(games, load_templates(c.cfg), split);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& l : v) s += l + '\n';
    return s;
  };
  const fs::path dir(out_dir);
  c.outputs.write(dir / "train.txt", join(corpus.train));
  c.outputs.write(dir / "eval.txt", join(corpus.eval));
  const auto& st = corpus.stats;
  c.out << json{{"games", st.games},         {"train_games", st.train_games}, {"eval_games", st.eval_games},
                {"lines", st.total_lines},   {"train_lines", st.train_lines}, {"eval_lines", st.eval_lines}}
               .dump()
        << '\n';
}

inline void cmd_train(Context& c, const std::vector<std::string>& tags, double epsilon, const std::string& out) {
  MoveStore store(c.cfg.store);
  auto model = train_surrogate(tag_moves(store, tags), epsilon, load_templates(c.cfg));
  c.outputs.write(out, model.to_json().dump() + '\n');
  c.out << json{{"model", out}, {"epsilon", epsilon}, {"transitions", model.total_count()}}.dump() << '\n';
}

inline Backend make_backend(const PipelineConfig& cfg) {
  Backend b;
  if (cfg.backend == "surrogate") {
    if (cfg.model.empty()) throw ConfigError("surrogate backend needs --model");
    b.surrogate = SurrogateModel::from_json(read_json(cfg.model));
  } else if (cfg.backend == "remote") {
    if (cfg.url.empty()) throw ConfigError("remote backend needs --url");
    b.remote = RemoteConfig{cfg.url};
  } else {
    throw ConfigError("unknown backend '" + cfg.backend + "'");
  }
  return b;
}

inline void cmd_generate(Context& c, const std::string& tag) {
  const auto& cfg = c.cfg;
  if (cfg.batches < 1) throw ConfigError("batches must be >= 1");
  auto backend = make_backend(cfg);
  std::vector<GenerationRequest> reqs;
  for (int b = 0; b < cfg.batches; ++b) {
    GenerationRequest r;
    r.prompt = cfg.prompts[static_cast<std::size_t>(b) % cfg.prompts.size()];
    r.num_lines = cfg.lines;
    r.max_chars_per_line = cfg.max_chars;
    r.seed = cfg.seed;
    r.temperature = cfg.temperature;
    r.batch_index = b;
    r.validate();
    reqs.push_back(r);
  }
  auto batches = generate_batches(reqs, backend, static_cast<std::size_t>(std::max(1, cfg.max_in_flight)));
  MoveStore store(cfg.store);
  json run = {{"backend", cfg.backend}, {"seed", cfg.seed},   {"batches", cfg.batches},
              {"lines", cfg.lines},     {"max_chars", cfg.max_chars}, {"prompts", cfg.prompts}};
  if (backend.surrogate) run["epsilon"] = backend.surrogate->epsilon;
  store.register_tag(tag, MoveSource::Synthetic, run);
  std::size_t n = 0;
  for (const auto& b : batches) n += store.append_lines(tag, b);
  c.out << json{{"tag", tag}, {"lines", n}}.dump() << '\n';
}

inline void cmd_extract(Context& c, const std::string& tag, const std::string& input) {
  if (!input.empty()) {
    // free text: print the extraction, store nothing
    ExtractOptions opts;
    opts.game_id = fs::path(input).stem().string();
    auto r = extract_moves(read_file(input), opts);
    json moves = json::array();
    for (const auto& m : r.moves) moves.push_back(move_to_json(m));
    c.out << json{{"moves", moves}, {"unparsed_spans", r.unparsed_spans.size()}}.dump() << '\n';
    return;
  }
  MoveStore store(c.cfg.store);
  std::vector<MoveRecord> moves;
  std::size_t unparsed = 0;
  const auto lines = store.lines(tag);
  for (const auto& l : lines) {
    ExtractOptions opts;
    opts.source = MoveSource::Synthetic;
    opts.game_id = tag + "-" + std::to_string(l.batch_index) + "-" + std::to_string(l.line_index);
    opts.provenance = {l.prompt, l.batch_index, l.line_index};
    auto r = extract_moves(l.text, opts);
    unparsed += r.unparsed_spans.size();
    moves.insert(moves.end(), r.moves.begin(), r.moves.end());
  }
  const auto n = store.append_moves(tag, moves);
  c.out << json{{"tag", tag}, {"lines", lines.size()}, {"moves", n}, {"unparsed_spans", unparsed}}.dump() << '\n';
}

inline void cmd_validate(Context& c, const std::vector<std::string>& tags, const std::string& csv) {
  MoveStore store(c.cfg.store);
  auto s = ablation_summary(store, tags);
  for (const auto& t : s.columns) c.out << legality_table_text(t) << '\n';
  if (tags.size() > 1) c.out << ablation_text(s);
  if (!csv.empty()) c.outputs.write(csv, tags.size() > 1 ? ablation_csv(s) : legality_table_csv(s.columns.front()));
}

inline void cmd_stats(Context& c, const std::vector<std::string>& tags, const std::string& csv) {
  MoveStore store(c.cfg.store);
  std::vector<PieceTable> tables;
  for (const auto& t : tags) tables.push_back(piece_table(store, t));
  c.out << piece_tables_text(tables);
  if (tables.size() == 2) {
    const auto cmp = compare_corpora(tables[0], tables[1]);
    c.out << "\nPearson r (percent): " << cmp.on_percent.r << ", p = " << cmp.on_percent.p_two_tailed << '\n'
          << "Pearson r (counts): " << cmp.on_counts.r << ", p = " << cmp.on_counts.p_two_tailed << '\n'
          << "Chi-square: " << cmp.chi_square.statistic << ", dof = " << cmp.chi_square.dof
          << ", p = " << cmp.chi_square.p << '\n';
  }
  if (!csv.empty()) c.outputs.write(csv, piece_tables_csv(tables));
}

inline void cmd_graph(Context& c, const std::vector<std::string>& tags, const std::string& out,
                      const std::string& gexf) {
  MoveStore store(c.cfg.store);
  auto g = build_graph(tag_moves(store, tags));
  if (g.empty()) throw DegenerateGraph("no edge survives the triangle filter");
  c.outputs.write(out, graph_to_json(g).dump(2) + '\n');
  if (!gexf.empty()) c.outputs.write(gexf, graph_to_gexf(g));
  c.out << json{{"graph", out}, {"nodes", g.node_count()}, {"edges", g.edges().size()}}.dump() << '\n';
}

inline void cmd_layout(Context& c, const std::string& in, const std::string& out, const std::string& gexf) {
  auto doc = graph_from_json(read_json(in));
  auto l = force_layout(doc.graph, c.cfg.layout);
  c.outputs.write(out, graph_to_json(doc.graph, &l).dump(2) + '\n');
  if (!gexf.empty()) c.outputs.write(gexf, graph_to_gexf(doc.graph, &l));
  json report = {{"graph", out}};
  if (l.squares().size() >= 8) {
    const auto f = layout_fidelity(l);
    report["spearman_rho"] = f.spearman_rho;
    report["procrustes_residual"] = f.procrustes_residual;
  }
  if (l.has(square_from_name("a1")) && l.has(square_from_name("h8")) && l.has(square_from_name("a8")) &&
      l.has(square_from_name("h1")))
    report["diagonal_angle"] = diagonal_angle(l);
  c.out << report.dump() << '\n';
}

inline GraphDocument load_laid_out(const std::string& path) {
  auto doc = graph_from_json(read_json(path));
  if (!doc.layout) throw DegenerateInput("graph file has no layout; run the layout subcommand first");
  return doc;
}

inline PathMode parse_mode(const std::string& s) {
  auto m = mode_from_name(s);
  if (!m) throw ConfigError("mode must be coarse or granular");
  return *m;
}

inline void cmd_path(Context& c, const std::string& graph, const std::string& from, const std::string& to,
                     const std::string& mode, int max_steps, const std::string& svg, const std::string& csv) {
  auto doc = load_laid_out(graph);
  auto p = find_path(doc.graph, *doc.layout, {square_from_name(from), square_from_name(to), parse_mode(mode), max_steps});
  if (!svg.empty()) c.outputs.write(svg, render_svg({p}, from + " to " + to));
  if (!csv.empty()) c.outputs.write(csv, path_csv(p));
  c.out << to_json(p).dump() << '\n';
}

inline void cmd_render(Context& c, const std::string& graph, const std::string& from, const std::string& to,
                       const std::string& out) {
  auto doc = load_laid_out(graph);
  std::vector<PathResult> paths;
  for (auto m : {PathMode::Coarse, PathMode::Granular})
    paths.push_back(find_path(doc.graph, *doc.layout, {square_from_name(from), square_from_name(to), m}));
  c.outputs.write(out, render_svg(paths, from + " to " + to));
  c.out << json{{"svg", out}}.dump() << '\n';
}

// ── Entry point ─────────────────────────────────────────────────────────────

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"chessmap: chess moves as ground truth for text-derived belief maps"};
  app.require_subcommand(1);
  std::string config_path, store_flag;
  std::uint64_t seed_flag = 0;
  app.add_option("--config", config_path, "JSON pipeline config");
  app.add_option("--store", store_flag, "move store directory");
  auto* seed_opt = app.add_option("--seed", seed_flag, "base seed");

  std::string pgn, tag, out_path, csv, gexf, graph, from, to, mode = "coarse", input, svg, tags_s, host = "127.0.0.1";
  std::string model_flag, url_flag, backend_flag;
  double split = 0.9, epsilon = 0.0;
  int max_steps = 64, port = 8765, batches = 0, lines = 0, max_chars = 0;

  auto* ingest = app.add_subcommand("ingest", "parse a PGN file into a corpus tag");
  ingest->add_option("pgn", pgn)->required();
  ingest->add_option("--tag", tag)->required();

  auto* narrate = app.add_subcommand("narrate", "render games as training text");
  narrate->add_option("pgn", pgn)->required();
  narrate->add_option("--out-dir", out_path)->required();
  narrate->add_option("--split", split, "train fraction");

  auto* train = app.add_subcommand("train-surrogate", "fit the surrogate text model");
  train->add_option("--tags", tags_s)->required();
  train->add_option("--epsilon", epsilon);
  train->add_option("--out", out_path)->required();

  auto* gen = app.add_subcommand("generate", "generate raw lines into a new corpus tag");
  gen->add_option("--tag", tag)->required();
  gen->add_option("--backend", backend_flag);
  gen->add_option("--model", model_flag);
  gen->add_option("--url", url_flag);
  gen->add_option("--batches", batches);
  gen->add_option("--lines", lines);
  gen->add_option("--max-chars", max_chars);

  auto* ext = app.add_subcommand("extract", "extract moves from stored lines or a text file");
  auto* ext_tag = ext->add_option("--tag", tag);
  auto* ext_in = ext->add_option("--input", input);
  ext_tag->excludes(ext_in);

  auto* val = app.add_subcommand("validate", "legality tables per tag");
  val->add_option("--tags", tags_s)->required();
  val->add_option("--csv", csv);

  auto* stats = app.add_subcommand("stats", "piece frequency tables and corpus comparison");
  stats->add_option("--tags", tags_s)->required();
  stats->add_option("--csv", csv);

  auto* gr = app.add_subcommand("graph", "build the board graph");
  gr->add_option("--tags", tags_s)->required();
  gr->add_option("--out", out_path)->required();
  gr->add_option("--gexf", gexf);

  auto* lay = app.add_subcommand("layout", "force-directed layout of a graph file");
  lay->add_option("--graph", graph)->required();
  lay->add_option("--out", out_path)->required();
  lay->add_option("--gexf", gexf);

  auto* path = app.add_subcommand("path", "wayfinder query on a laid-out graph");
  path->add_option("--graph", graph)->required();
  path->add_option("--from", from)->required();
  path->add_option("--to", to)->required();
  path->add_option("--mode", mode);
  path->add_option("--max-steps", max_steps);
  path->add_option("--svg", svg);
  path->add_option("--csv", csv);

  auto* render = app.add_subcommand("render", "SVG overlay of coarse and granular paths");
  render->add_option("--graph", graph)->required();
  render->add_option("--from", from)->required();
  render->add_option("--to", to)->required();
  render->add_option("--out", out_path)->required();

  auto* serve = app.add_subcommand("serve", "read-only JSON service for the map UI");
  serve->add_option("--graph", graph)->required();
  serve->add_option("--tags", tags_s);
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  auto fail = [&](int code, const std::string& kind, const std::string& msg) {
    err << json{{"error", kind}, {"message", msg}}.dump() << '\n';
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "UsageError", e.what());
  }

  try {
    Context c{out, err, load_config(config_path), {}};
    if (!store_flag.empty()) c.cfg.store = store_flag;
    if (*seed_opt) c.cfg.seed = seed_flag;
    if (!backend_flag.empty()) c.cfg.backend = backend_flag;
    if (!model_flag.empty()) c.cfg.model = model_flag;
    if (!url_flag.empty()) c.cfg.url = url_flag;
    if (batches) c.cfg.batches = batches;
    if (lines) c.cfg.lines = lines;
    if (max_chars) c.cfg.max_chars = max_chars;
    const auto tags = split_list(tags_s);

    if (*ingest) cmd_ingest(c, pgn, tag);
    else if (*narrate) cmd_narrate(c, pgn, out_path, split);
    else if (*train) cmd_train(c, tags, epsilon, out_path);
    else if (*gen) cmd_generate(c, tag);
    else if (*ext) {
      if (tag.empty() && input.empty()) throw ConfigError("extract needs --tag or --input");
      cmd_extract(c, tag, input);
    } else if (*val) cmd_validate(c, tags, csv);
    else if (*stats) cmd_stats(c, tags, csv);
    else if (*gr) cmd_graph(c, tags, out_path, gexf);
    else if (*lay) cmd_layout(c, graph, out_path, gexf);
    else if (*path) cmd_path(c, graph, from, to, mode, max_steps, svg, csv);
    else if (*render) cmd_render(c, graph, from, to, out_path);
    else if (*serve) {
      const auto snap = load_snapshot(graph, c.cfg, tags);
      httplib::Server srv;
      install_routes(srv, snap);
      err << json{{"listening", host + ":" + std::to_string(port)}}.dump() << '\n';
      if (!srv.listen(host, port)) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
    }
    c.outputs.commit();
    return kOk;
  } catch (const ConfigError& e) {
    return fail(kUsage, e.kind(), e.what());
  } catch (const BackendUnreachable& e) {
    return fail(kBackend, e.kind(), e.what());
  } catch (const BackendProtocol& e) {
    return fail(kBackend, e.kind(), e.what());
  } catch (const Error& e) {
    return fail(kData, e.kind(), e.what());
  } catch (const std::exception& e) {
    return fail(kData, "IoError", e.what());
  }
}

}  // namespace chessmap::cli
