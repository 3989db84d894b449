#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dln/network.hpp"

namespace dln {

enum class InitKind { orthogonal, orth_identity, identity, balanced, random };

struct InitScheme {
  InitKind kind = InitKind::orth_identity;
  // random: per-layer variances sigma_j^2; defaults to 1/n_{j-1}.
  std::vector<double> variance_overrides;
  // balanced: seed matrix W0 (n_L x n_0); drawn N(0, 1/n_0) when absent.
  std::optional<Matrix> balanced_seed;
};

InitKind parse_init_kind(std::string_view name);
std::string to_string(InitKind kind);

// Haar-distributed n x n orthogonal matrix (QR of a Gaussian with the
// R-diagonal sign correction).
Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed);

// Builds the network for `dims` (n_0, ..., n_L). Per-layer random draws use
// independent streams keyed by the layer index, so widening a layer does
// not change the blocks drawn for any layer.
Network initialize(const InitScheme& scheme, const DimChain& dims, std::uint64_t seed);

// The Gaussian seed matrix the balanced scheme draws when none is given.
Matrix default_balanced_seed(const DimChain& dims, std::uint64_t seed);

}  // namespace dln
