#pragma once

/// @file textgen.hpp
/// Text generator backends: a remote inference endpoint and a deterministic
/// surrogate that narrates moves sampled from an empirical corpus, with a
/// controllable rate of geometry-illegal destinations.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "chessmap/core.hpp"
#include "chessmap/error.hpp"
#include "chessmap/narrator.hpp"
#include "chessmap/random.hpp"
#include "chessmap/records.hpp"

namespace chessmap {

struct GenerationRequest {
  std::string prompt;
  int num_lines = 100;
  int max_chars_per_line = 100;
  std::uint64_t seed = 0;
  double temperature = 1.0;  // forwarded to remote only
  int batch_index = 0;

  void validate() const {
    if (num_lines < 1) throw ConfigError("num_lines must be >= 1");
    if (max_chars_per_line < 1) throw ConfigError("max_chars_per_line must be >= 1");
    if (!(temperature > 0)) throw ConfigError("temperature must be > 0");
    if (batch_index < 0) throw ConfigError("batch_index must be >= 0");
  }
};

enum class BackendKind : std::uint8_t { Remote, Surrogate };

inline std::string_view backend_name(BackendKind k) noexcept {
  return k == BackendKind::Remote ? "remote" : "surrogate";
}

struct GeneratedLine {
  std::string prompt;
  std::string text;
  int batch_index = 0;
  int line_index = 0;
  BackendKind source = BackendKind::Surrogate;
  bool operator==(const GeneratedLine&) const = default;
};

inline nlohmann::json to_json(const GeneratedLine& l) {
  return {{"prompt", l.prompt},
          {"text", l.text},
          {"batch", l.batch_index},
          {"line", l.line_index},
          {"backend", backend_name(l.source)}};
}

inline GeneratedLine generated_line_from_json(const nlohmann::json& j) {
  GeneratedLine l;
  l.prompt = j.at("prompt").get<std::string>();
  l.text = j.at("text").get<std::string>();
  l.batch_index = j.at("batch").get<int>();
  l.line_index = j.at("line").get<int>();
  l.source = j.value("backend", std::string("surrogate")) == "remote" ? BackendKind::Remote
                                                                       : BackendKind::Surrogate;
  return l;
}

/// The eight default prompts: four fixed openers plus four configurable defaults.
inline std::vector<std::string> prompt_battery() {
  return {"The game begins as", "In move 20 ", "Black takes white ", "Check. ",
          "wins. ",             "White moves ", "Black moves ",      "In move 1 "};
}

// ── Surrogate ───────────────────────────────────────────────────────────────

struct Transition {
  Square from;
  Square to;
  bool is_capture = false;
  SpecialMove special = SpecialMove::None;
  bool is_check = false;
  std::uint64_t count = 0;
  bool operator==(const Transition&) const = default;
};

struct SurrogateModel {
  // Counts per (piece, color), indexed piece_index * 2 + color_index. Castle
  // rook records are left out; a sampled castle recreates its rook leg.
  std::array<std::vector<Transition>, 12> transitions;
  double epsilon = 0.0;
  TemplateSet templates = TemplateSet::defaults();
  // Per-piece shares of the training corpus, rook legs of castles included.
  std::array<double, 6> piece_share{};

  static std::size_t slot(PieceKind p, Color c) { return piece_index(p) * 2 + color_index(c); }

  std::uint64_t total_count() const {
    std::uint64_t n = 0;
    for (const auto& v : transitions)
      for (const auto& t : v) n += t.count;
    return n;
  }

  /// Transition probabilities for one piece, both colors pooled; sums to 1.
  std::vector<std::pair<Transition, double>> piece_distribution(PieceKind p) const {
    std::vector<std::pair<Transition, double>> out;
    std::uint64_t n = 0;
    for (Color c : kAllColors)
      for (const auto& t : transitions[slot(p, c)]) n += t.count;
    for (Color c : kAllColors)
      for (const auto& t : transitions[slot(p, c)])
        out.emplace_back(t, static_cast<double>(t.count) / static_cast<double>(n));
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json tables = nlohmann::json::array();
    for (PieceKind p : kAllPieces)
      for (Color c : kAllColors)
        for (const auto& t : transitions[slot(p, c)])
          tables.push_back({{"piece", piece_name(p)},
                            {"color", color_name(c)},
                            {"from", t.from.name()},
                            {"to", t.to.name()},
                            {"capture", t.is_capture},
                            {"special", special_name(t.special)},
                            {"check", t.is_check},
                            {"count", t.count}});
    nlohmann::json shares = nlohmann::json::object();
    for (PieceKind p : kAllPieces) shares[std::string(piece_name(p))] = piece_share[piece_index(p)];
    return {{"epsilon", epsilon},
            {"piece_share", shares},
            {"transitions", tables},
            {"templates", templates.to_json()}};
  }

  static SurrogateModel from_json(const nlohmann::json& j) {
    SurrogateModel m;
    try {
      m.epsilon = j.at("epsilon").get<double>();
      for (const auto& row : j.at("transitions")) {
        auto p = piece_from_name(row.at("piece").get<std::string>());
        auto c = color_from_name(row.at("color").get<std::string>());
        auto sp = special_from_name(row.at("special").get<std::string>());
        if (!p || !c || !sp) throw ConfigError("bad surrogate transition row");
        Transition t;
        t.from = square_from_name(row.at("from").get<std::string>());
        t.to = square_from_name(row.at("to").get<std::string>());
        t.is_capture = row.at("capture").get<bool>();
        t.special = *sp;
        t.is_check = row.at("check").get<bool>();
        t.count = row.at("count").get<std::uint64_t>();
        m.transitions[slot(*p, *c)].push_back(t);
      }
      for (PieceKind p : kAllPieces)
        m.piece_share[piece_index(p)] = j.at("piece_share").at(std::string(piece_name(p))).get<double>();
      if (j.contains("templates")) m.templates = TemplateSet::from_json(j.at("templates"));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("surrogate model: ") + e.what());
    }
    if (!(m.epsilon >= 0.0 && m.epsilon < 1.0)) throw ConfigError("epsilon must be in [0, 1)");
    if (m.total_count() == 0) throw EmptyCorpus("surrogate model has no transitions");
    return m;
  }
};

/// Builds the surrogate tables from human move records in game order.
inline SurrogateModel train_surrogate(const std::vector<MoveRecord>& moves, double epsilon,
                                      TemplateSet templates = TemplateSet::defaults()) {
  if (moves.empty()) throw EmptyCorpus("no moves to train the surrogate on");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in [0, 1)");
  SurrogateModel m;
  m.epsilon = epsilon;
  m.templates = std::move(templates);
  std::array<std::map<std::tuple<int, int, bool, int, bool>, std::uint64_t>, 12> counts;
  std::array<std::uint64_t, 6> per_piece{};
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const auto& r = moves[i];
    if (r.source != MoveSource::Human) throw ConfigError("surrogate training needs human moves only");
    ++per_piece[piece_index(r.piece)];
    if (is_castle_rook(moves, i)) continue;
    ++counts[SurrogateModel::slot(r.piece, r.color)][{r.from.index(), r.to.index(), r.is_capture,
                                                      static_cast<int>(r.special), r.is_check}];
  }
  for (std::size_t s = 0; s < 12; ++s)
    for (const auto& [k, n] : counts[s]) {
      const auto& [f, t, cap, sp, chk] = k;
      m.transitions[s].push_back(
          {Square::from_index(f), Square::from_index(t), cap, static_cast<SpecialMove>(sp), chk, n});
    }
  for (PieceKind p : kAllPieces)
    m.piece_share[piece_index(p)] =
        static_cast<double>(per_piece[piece_index(p)]) / static_cast<double>(moves.size());
  return m;
}

namespace textgen_detail {

// Squares that `piece` cannot reach from `from` under the given flags.
inline std::vector<Square> illegal_destinations(const MoveRecord& r) {
  std::vector<Square> out;
  for (Square s : all_squares()) {
    if (s == r.from) continue;
    if (!is_legal_geometry({r.piece, r.color, r.from, s, r.is_capture, r.special})) out.push_back(s);
  }
  return out;
}

class Sampler {
 public:
  explicit Sampler(const SurrogateModel& m) : model_(m) {
    std::uint64_t acc = 0;
    for (std::size_t s = 0; s < 12; ++s)
      for (std::size_t i = 0; i < m.transitions[s].size(); ++i) {
        acc += m.transitions[s][i].count;
        cumulative_.push_back(acc);
        index_.emplace_back(s, i);
      }
    if (acc == 0) throw EmptyCorpus("surrogate model has no transitions");
  }

  // One move event: a single record, or king plus rook for a castle.
  std::vector<MoveRecord> sample(Rng& rng) const {
    const std::uint64_t x = rng.below(cumulative_.back());
    const auto pos = static_cast<std::size_t>(
        std::upper_bound(cumulative_.begin(), cumulative_.end(), x) - cumulative_.begin());
    const auto [s, i] = index_[pos];
    const Transition& t = model_.transitions[s][i];
    MoveRecord r;
    r.piece = kAllPieces[s / 2];
    r.color = kAllColors[s % 2];
    r.from = t.from;
    r.to = t.to;
    r.is_capture = t.is_capture;
    r.special = t.special;
    r.is_check = t.is_check;
    r.source = MoveSource::Synthetic;
    std::vector<MoveRecord> out{r};
    if (is_castle(r.special) && r.piece == PieceKind::King) {
      const bool king_side = r.special == SpecialMove::CastleKingside;
      MoveRecord rook = r;
      rook.piece = PieceKind::Rook;
      rook.special = SpecialMove::None;
      rook.is_check = false;
      rook.from = *Square::from_coords(king_side ? 7 : 0, r.from.rank());
      rook.to = *Square::from_coords(king_side ? 5 : 3, r.from.rank());
      out.push_back(rook);
    }
    // every emitted record is perturbed independently
    for (auto& rec : out)
      if (model_.epsilon > 0 && rng.chance(model_.epsilon)) {
        auto bad = illegal_destinations(rec);
        rec.to = bad[rng.below(bad.size())];
      }
    return out;
  }

 private:
  const SurrogateModel& model_;
  std::vector<std::uint64_t> cumulative_;
  std::vector<std::pair<std::size_t, std::size_t>> index_;
};

inline std::string render(const SurrogateModel& m, const std::vector<MoveRecord>& event, Rng& rng) {
  const MoveRecord* rook = event.size() > 1 ? &event[1] : nullptr;
  return render_move_sentence(m.templates, event.front(), rook, MoveVoice{}, false, rng);
}

inline std::string opening_sentence(const SurrogateModel& m, Rng& rng) {
  static const std::array<const char*, 10> ecos = {"A11", "A45", "B12", "B33", "B90",
                                                    "C42", "C65", "D37", "E32", "E60"};
  const auto op = opening_for_eco(std::string(ecos[rng.below(ecos.size())]));
  Slots s{{"opening", op->opening}};
  if (op->defense) {
    s["defense"] = *op->defense;
    return fill_template(pick(m.templates.templates("opening_reply"), rng), s);
  }
  return fill_template(pick(m.templates.templates("opening"), rng), s);
}

inline bool ends_sentence(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return !s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?');
}

// Tries hard enough that the narrowest battery prompt ("Black takes white ")
// is met essentially always.
constexpr int kMaxRejections = 20000;

/// First sentence of a line: the prompt followed by a continuation that
/// completes it.
inline std::string opening_text(const SurrogateModel& m, const Sampler& sampler, const std::string& prompt,
                                Rng& rng, std::vector<MoveRecord>& truth) {
  if (prompt.empty()) {
    auto ev = sampler.sample(rng);
    truth.insert(truth.end(), ev.begin(), ev.end());
    return render(m, ev, rng);
  }
  if (ends_sentence(prompt)) return prompt;
  static const std::regex numbered(R"(^(?:In|On|At) move (\d+),?\s*$)");
  if (std::regex_match(prompt, numbered)) {
    // narration numbers white's moves
    for (int i = 0; i < kMaxRejections; ++i) {
      auto ev = sampler.sample(rng);
      if (ev.front().color != Color::White) continue;
      truth.insert(truth.end(), ev.begin(), ev.end());
      std::string sep = std::isspace(static_cast<unsigned char>(prompt.back())) ? "" : " ";
      return prompt + sep + render(m, ev, rng);
    }
  }
  for (int i = 0; i < 64; ++i) {
    auto s = opening_sentence(m, rng);
    if (s.starts_with(prompt)) return s;
  }
  for (int i = 0; i < kMaxRejections; ++i) {
    auto ev = sampler.sample(rng);
    auto s = render(m, ev, rng);
    if (s.starts_with(prompt)) {
      truth.insert(truth.end(), ev.begin(), ev.end());
      return s;
    }
  }
  // nothing in the template vocabulary continues this prompt; close it off
  std::string p = prompt;
  while (!p.empty() && std::isspace(static_cast<unsigned char>(p.back()))) p.pop_back();
  return p + ".";
}

}  // namespace textgen_detail

/// One request against the surrogate. `truth`, when given, receives the move
/// records behind each line (after perturbation), in order.
inline std::vector<GeneratedLine> surrogate_generate(const SurrogateModel& m, const GenerationRequest& req,
                                                     std::vector<std::vector<MoveRecord>>* truth = nullptr) {
  req.validate();
  textgen_detail::Sampler sampler(m);
  Rng rng(derive_seed(req.seed, static_cast<std::uint64_t>(req.batch_index)));
  std::vector<GeneratedLine> out;
  out.reserve(static_cast<std::size_t>(req.num_lines));
  if (truth) truth->clear();
  const auto budget = static_cast<std::size_t>(req.max_chars_per_line);
  for (int li = 0; li < req.num_lines; ++li) {
    std::vector<MoveRecord> moves;
    std::string text = textgen_detail::opening_text(m, sampler, req.prompt, rng, moves);
    // Sample until the budget is reached; the sentence that crosses it is
    // completed. Stopping never looks at the candidate, so longer sentences
    // are not selected against.
    while (text.size() < budget) {
      auto ev = sampler.sample(rng);
      auto s = textgen_detail::render(m, ev, rng);
      const std::string sep = text.empty() || std::isspace(static_cast<unsigned char>(text.back())) ? "" : " ";
      text += sep + s;
      moves.insert(moves.end(), ev.begin(), ev.end());
    }
    out.push_back({req.prompt, std::move(text), req.batch_index, li, BackendKind::Surrogate});
    if (truth) truth->push_back(std::move(moves));
  }
  return out;
}

// ── Remote ──────────────────────────────────────────────────────────────────

struct RemoteConfig {
  std::string url;  // e.g. http://127.0.0.1:8080/generate
  std::string token_env = "CHESSMAP_BACKEND_TOKEN";
  int timeout_seconds = 120;
};

inline std::vector<GeneratedLine> remote_generate(const RemoteConfig& cfg, const GenerationRequest& req) {
  req.validate();
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg.url, m, url_re)) throw ConfigError("bad backend url: " + cfg.url);
  const std::string path = m[2].matched ? m[2].str() : "/";
  httplib::Client cli(m[1].str());
  cli.set_connection_timeout(cfg.timeout_seconds, 0);
  cli.set_read_timeout(cfg.timeout_seconds, 0);
  if (const char* tok = std::getenv(cfg.token_env.c_str()); tok && *tok) cli.set_bearer_token_auth(tok);
  nlohmann::json body = {{"prompt", req.prompt},
                         {"n", req.num_lines},
                         {"max_new_chars", req.max_chars_per_line},
                         {"seed", req.seed},
                         {"temperature", req.temperature}};
  auto res = cli.Post(path, body.dump(), "application/json");
  if (!res) throw BackendUnreachable("backend unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw BackendProtocol("backend returned HTTP " + std::to_string(res->status));
  std::vector<std::string> lines;
  try {
    lines = nlohmann::json::parse(res->body).at("lines").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendProtocol(std::string("malformed backend response: ") + e.what());
  }
  if (lines.size() != static_cast<std::size_t>(req.num_lines))
    throw BackendProtocol("backend returned " + std::to_string(lines.size()) + " lines, expected " +
                          std::to_string(req.num_lines));
  std::vector<GeneratedLine> out;
  for (std::size_t i = 0; i < lines.size(); ++i)
    out.push_back({req.prompt, lines[i], req.batch_index, static_cast<int>(i), BackendKind::Remote});
  return out;
}

/// Either backend behind one call.
struct Backend {
  std::optional<SurrogateModel> surrogate;
  std::optional<RemoteConfig> remote;

  std::vector<GeneratedLine> generate(const GenerationRequest& req) const {
    if (surrogate) return surrogate_generate(*surrogate, req);
    if (remote) return remote_generate(*remote, req);
    throw ConfigError("no generation backend configured");
  }
};

inline std::vector<GeneratedLine> generate(const GenerationRequest& req, const Backend& backend) {
  return backend.generate(req);
}

/// Runs requests with at most `max_in_flight` outstanding; results keep the
/// request order. The first failure is rethrown after all workers stop.
inline std::vector<std::vector<GeneratedLine>> generate_batches(const std::vector<GenerationRequest>& reqs,
                                                                const Backend& backend,
                                                                std::size_t max_in_flight = 4) {
  std::vector<std::vector<GeneratedLine>> out(reqs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= reqs.size()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        out[i] = backend.generate(reqs[i]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(max_in_flight, reqs.size()));
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < n; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace chessmap
