#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dln {

enum class Ordering { ascending, descending };

Ordering parse_ordering(std::string_view name);  // "asc" | "desc"
std::string to_string(Ordering o);

// Gauss-Seidel bookkeeping for block coordinate sweeps. `within` is the
// 1-based position inside the current sweep; the layer it maps to is l for
// ascending order and L - l + 1 for descending order.
struct SweepState {
  std::vector<std::int64_t> multi_index;  // updates applied to each layer
  std::int64_t sweep = 0;
  int within = 1;
  Ordering ordering = Ordering::ascending;

  static SweepState start(int depth, Ordering ordering);

  int depth() const { return static_cast<int>(multi_index.size()); }
  int layer_for(int position) const;
  int current_layer() const { return layer_for(within); }
  // Iterations completed so far.
  std::int64_t iterations() const { return sweep * depth() + (within - 1); }
  bool at_sweep_start() const { return within == 1; }

  // Records the update of current_layer() and moves to the next position.
  void advance();
};

}  // namespace dln
