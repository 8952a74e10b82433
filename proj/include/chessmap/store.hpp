#pragma once

/// @file store.hpp
/// Append-only move database: one NDJSON file of moves and one of raw
/// generated lines per corpus tag, plus a JSON manifest.

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "chessmap/core.hpp"
#include "chessmap/error.hpp"
#include "chessmap/records.hpp"
#include "chessmap/textgen.hpp"

namespace chessmap {

inline nlohmann::json move_to_json(const MoveRecord& r, bool legal) {
  auto opt = [](const auto& o) -> nlohmann::json {
    if (o) return *o;
    return nullptr;
  };
  return {{"game_id", r.game_id},
          {"move_number", opt(r.move_number)},
          {"color", color_name(r.color)},
          {"piece", piece_name(r.piece)},
          {"from", r.from.name()},
          {"to", r.to.name()},
          {"capture", r.is_capture},
          {"special", special_name(r.special)},
          {"check", r.is_check},
          {"source", source_name(r.source)},
          {"prompt", opt(r.prompt)},
          {"batch", opt(r.batch)},
          {"line", opt(r.line)},
          {"legal", legal}};
}

inline nlohmann::json move_to_json(const MoveRecord& r) { return move_to_json(r, is_legal_geometry(r.geometry())); }

inline MoveRecord move_from_json(const nlohmann::json& j) {
  try {
    MoveRecord r;
    r.game_id = j.at("game_id").get<std::string>();
    if (!j.at("move_number").is_null()) r.move_number = j.at("move_number").get<int>();
    auto c = color_from_name(j.at("color").get<std::string>());
    auto p = piece_from_name(j.at("piece").get<std::string>());
    auto sp = special_from_name(j.at("special").get<std::string>());
    auto src = source_from_name(j.at("source").get<std::string>());
    if (!c || !p || !sp || !src) throw StorageError("bad enum value in move row");
    r.color = *c;
    r.piece = *p;
    r.special = *sp;
    r.source = *src;
    r.from = square_from_name(j.at("from").get<std::string>());
    r.to = square_from_name(j.at("to").get<std::string>());
    r.is_capture = j.at("capture").get<bool>();
    r.is_check = j.at("check").get<bool>();
    if (!j.at("prompt").is_null()) r.prompt = j.at("prompt").get<std::string>();
    if (!j.at("batch").is_null()) r.batch = j.at("batch").get<int>();
    if (!j.at("line").is_null()) r.line = j.at("line").get<int>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw StorageError(std::string("bad move row: ") + e.what());
  } catch (const MalformedSquare& e) {
    throw StorageError(std::string("bad move row: ") + e.what());
  }
}

struct StoredMove {
  std::string tag;
  MoveRecord record;
  bool legal = true;
};

struct MoveFilter {
  std::vector<std::string> tags;  // empty = every tag
  std::optional<PieceKind> piece;
  std::optional<Color> color;
  std::optional<std::string> prompt;
  std::optional<bool> legal;

  bool matches(const StoredMove& m) const {
    if (piece && m.record.piece != *piece) return false;
    if (color && m.record.color != *color) return false;
    if (prompt && m.record.prompt != *prompt) return false;
    if (legal && m.legal != *legal) return false;
    return true;
  }
};

/// Directory-backed store. Single writer per tag; readers re-read files.
class MoveStore {
 public:
  explicit MoveStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw StorageError("cannot create store directory " + root_.string() + ": " + ec.message());
    if (std::filesystem::exists(manifest_path())) {
      std::ifstream in(manifest_path());
      try {
        manifest_ = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw StorageError(std::string("corrupt manifest: ") + e.what());
      }
    } else {
      manifest_ = {{"tags", nlohmann::json::object()}};
    }
    for (const auto& [tag, _] : manifest_.at("tags").items()) load_keys(tag);
  }

  const std::filesystem::path& root() const { return root_; }

  bool has_tag(const std::string& tag) const { return manifest_.at("tags").contains(tag); }

  std::vector<std::string> tags() const {
    std::vector<std::string> out;
    for (const auto& [tag, _] : manifest_.at("tags").items()) out.push_back(tag);
    return out;
  }

  /// Registers a new corpus tag with run metadata (seeds, config hash, ...).
  void register_tag(const std::string& tag, MoveSource source, nlohmann::json run = nlohmann::json::object()) {
    std::lock_guard lock(mu_);
    if (tag.empty() || tag.find_first_of("/\\") != std::string::npos || tag.front() == '.')
      throw ConfigError("invalid corpus tag '" + tag + "'");
    if (has_tag(tag)) throw StorageError("corpus tag '" + tag + "' already registered");
    manifest_["tags"][tag] = {{"source", source_name(source)}, {"moves", 0}, {"lines", 0}, {"run", run}};
    keys_[tag];
    write_manifest();
  }

  const nlohmann::json& manifest() const { return manifest_; }

  /// Appends raw lines; lines whose (batch, line) key is already stored are
  /// skipped. Returns the number written.
  std::size_t append_lines(const std::string& tag, const std::vector<GeneratedLine>& lines) {
    std::lock_guard lock(mu_);
    require(tag);
    auto& k = keys_[tag];
    std::vector<const GeneratedLine*> fresh;
    std::set<std::pair<int, int>> batch_keys;
    for (const auto& l : lines) {
      const std::pair key{l.batch_index, l.line_index};
      if (k.lines.contains(key) || !batch_keys.insert(key).second) continue;
      fresh.push_back(&l);
    }
    std::size_t written = 0;
    {
      std::ofstream out(lines_path(tag), std::ios::app);
      for (const auto* l : fresh) {
        out << to_json(*l).dump() << '\n';
        if (!out) throw StorageError("write failed after " + std::to_string(written) + " lines");
        k.lines.insert({l->batch_index, l->line_index});
        ++written;
      }
      out.flush();
      if (!out) throw StorageError("flush failed after " + std::to_string(written) + " lines");
    }
    manifest_["tags"][tag]["lines"] = manifest_["tags"][tag]["lines"].get<std::size_t>() + written;
    write_manifest();
    return written;
  }

  /// Appends move records. Records are grouped by (game_id, batch, line);
  /// a group already present in the tag is skipped whole. Synthetic moves
  /// must reference a stored raw line. Returns the number written.
  std::size_t append_moves(const std::string& tag, const std::vector<MoveRecord>& moves) {
    std::lock_guard lock(mu_);
    require(tag);
    auto& k = keys_[tag];
    for (const auto& r : moves)
      if (r.source == MoveSource::Synthetic &&
          (!r.batch || !r.line || !k.lines.contains({*r.batch, *r.line})))
        throw StorageError("synthetic move in game '" + r.game_id + "' references no stored raw line");
    std::vector<const MoveRecord*> fresh;
    std::set<GroupKey> seen_now;
    for (const auto& r : moves) {
      GroupKey g{r.game_id, r.batch.value_or(-1), r.line.value_or(-1)};
      if (k.groups.contains(g) && !seen_now.contains(g)) continue;
      seen_now.insert(g);
      fresh.push_back(&r);
    }
    std::size_t written = 0;
    {
      std::ofstream out(moves_path(tag), std::ios::app);
      for (const auto* r : fresh) {
        out << move_to_json(*r).dump() << '\n';
        if (!out) throw StorageError("write failed after " + std::to_string(written) + " moves");
        ++written;
      }
      out.flush();
      if (!out) throw StorageError("flush failed after " + std::to_string(written) + " moves");
    }
    for (const auto& g : seen_now) k.groups.insert(g);
    manifest_["tags"][tag]["moves"] = manifest_["tags"][tag]["moves"].get<std::size_t>() + written;
    write_manifest();
    return written;
  }

  /// Streams matching moves in insertion order, tag by tag in filter order.
  void for_each(const MoveFilter& f, const std::function<void(const StoredMove&)>& fn) const {
    std::vector<std::string> which = f.tags.empty() ? tags() : f.tags;
    for (const auto& t : which)
      if (!has_tag(t)) throw UnknownTag("unknown corpus tag '" + t + "'");
    for (const auto& t : which) {
      std::ifstream in(moves_path(t));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
          throw StorageError("corrupt move row in tag '" + t + "': " + e.what());
        }
        StoredMove m{t, move_from_json(j), j.at("legal").get<bool>()};
        if (f.matches(m)) fn(m);
      }
    }
  }

  std::vector<StoredMove> query(const MoveFilter& f) const {
    std::vector<StoredMove> out;
    for_each(f, [&](const StoredMove& m) { out.push_back(m); });
    return out;
  }

  std::vector<MoveRecord> records(const MoveFilter& f) const {
    std::vector<MoveRecord> out;
    for_each(f, [&](const StoredMove& m) { out.push_back(m.record); });
    return out;
  }

  std::vector<GeneratedLine> lines(const std::string& tag) const {
    if (!has_tag(tag)) throw UnknownTag("unknown corpus tag '" + tag + "'");
    std::vector<GeneratedLine> out;
    std::ifstream in(lines_path(tag));
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) out.push_back(generated_line_from_json(nlohmann::json::parse(line)));
    return out;
  }

 private:
  using GroupKey = std::tuple<std::string, int, int>;
  struct Keys {
    std::set<std::pair<int, int>> lines;
    std::set<GroupKey> groups;
  };

  std::filesystem::path manifest_path() const { return root_ / "manifest.json"; }
  std::filesystem::path moves_path(const std::string& tag) const { return root_ / (tag + ".moves.ndjson"); }
  std::filesystem::path lines_path(const std::string& tag) const { return root_ / (tag + ".lines.ndjson"); }

  void require(const std::string& tag) const {
    if (!has_tag(tag)) throw UnknownTag("corpus tag '" + tag + "' is not registered");
  }

  void load_keys(const std::string& tag) {
    auto& k = keys_[tag];
    {
      std::ifstream in(lines_path(tag));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line);
        k.lines.insert({j.at("batch").get<int>(), j.at("line").get<int>()});
      }
    }
    std::ifstream in(moves_path(tag));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      k.groups.insert({j.at("game_id").get<std::string>(), j.at("batch").is_null() ? -1 : j.at("batch").get<int>(),
                       j.at("line").is_null() ? -1 : j.at("line").get<int>()});
    }
  }

  // Written to a temporary file and renamed so readers never see half a manifest.
  void write_manifest() {
    const auto tmp = root_ / "manifest.json.tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << manifest_.dump(2) << '\n';
      if (!out) throw StorageError("cannot write manifest");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, manifest_path(), ec);
    if (ec) throw StorageError("cannot replace manifest: " + ec.message());
  }

  std::filesystem::path root_;
  nlohmann::json manifest_;
  std::map<std::string, Keys> keys_;
  mutable std::mutex mu_;
};

}  // namespace chessmap
