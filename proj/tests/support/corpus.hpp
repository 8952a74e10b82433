#pragma once

// Shared large fixture: simulated legal games with at least 50,000 move records.

#include "support/simulate.hpp"

namespace chessmap::fixtures {

inline const std::vector<MoveRecord>& large_corpus() {
  static const std::vector<MoveRecord> moves = [] {
    std::vector<MoveRecord> out;
    std::uint64_t i = 0;
    while (out.size() < 50000) {
      auto g = simulate_game(derive_seed(20240, i), "c" + std::to_string(i));
      out.insert(out.end(), g.record.moves.begin(), g.record.moves.end());
      ++i;
    }
    return out;
  }();
  return moves;
}

}  // namespace chessmap::fixtures
