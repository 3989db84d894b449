#include "dln/sweep.hpp"

#include "dln/errors.hpp"

namespace dln {

Ordering parse_ordering(std::string_view name) {
  if (name == "asc" || name == "ascending") return Ordering::ascending;
  if (name == "desc" || name == "descending") return Ordering::descending;
  throw DomainError("unknown ordering '" + std::string(name) + "' (expected asc or desc)");
}

std::string to_string(Ordering o) { return o == Ordering::ascending ? "asc" : "desc"; }

SweepState SweepState::start(int depth, Ordering ordering) {
  if (depth < 1) throw DomainError("SweepState: depth must be >= 1");
  SweepState s;
  s.multi_index.assign(static_cast<std::size_t>(depth), 0);
  s.ordering = ordering;
  return s;
}

int SweepState::layer_for(int position) const {
  if (position < 1 || position > depth()) throw DomainError("SweepState: position out of range");
  return ordering == Ordering::ascending ? position : depth() - position + 1;
}

void SweepState::advance() {
  ++multi_index[static_cast<std::size_t>(current_layer() - 1)];
  if (++within > depth()) {
    within = 1;
    ++sweep;
  }
}

}  // namespace dln
