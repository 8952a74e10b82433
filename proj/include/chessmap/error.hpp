#pragma once

#include <stdexcept>
#include <string>

namespace chessmap {

// Base of every error the library throws. `kind()` is a stable identifier
// used in machine-readable CLI output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CHESSMAP_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(#Name, what) {}      \
  };

CHESSMAP_DEFINE_ERROR(MalformedSquare)
CHESSMAP_DEFINE_ERROR(EmptyCorpus)
CHESSMAP_DEFINE_ERROR(EmptyText)
CHESSMAP_DEFINE_ERROR(ConfigError)
CHESSMAP_DEFINE_ERROR(BackendUnreachable)
CHESSMAP_DEFINE_ERROR(BackendProtocol)
CHESSMAP_DEFINE_ERROR(StorageError)
CHESSMAP_DEFINE_ERROR(UnknownTag)
CHESSMAP_DEFINE_ERROR(DegenerateInput)
CHESSMAP_DEFINE_ERROR(DegenerateGraph)

#undef CHESSMAP_DEFINE_ERROR

// PGN errors carry the index of the game they occurred in.
class PgnError : public Error {
 public:
  PgnError(std::string kind, std::size_t game_index, std::string token,
           const std::string& what)
      : Error(std::move(kind), what),
        game_index_(game_index),
        token_(std::move(token)) {}

  std::size_t game_index() const noexcept { return game_index_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t game_index_;
  std::string token_;
};

class PgnSyntaxError : public PgnError {
 public:
  PgnSyntaxError(std::size_t game_index, std::string token)
      : PgnError("PgnSyntaxError", game_index, token,
                 "game " + std::to_string(game_index) +
                     ": unexpected token '" + token + "'") {}
};

class DisambiguationError : public PgnError {
 public:
  DisambiguationError(std::size_t game_index, std::string token,
                      const std::string& why)
      : PgnError("DisambiguationError", game_index, token,
                 "game " + std::to_string(game_index) + ": move '" + token +
                     "': " + why) {}
};

}  // namespace chessmap
