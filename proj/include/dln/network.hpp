#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dln/matcore.hpp"

namespace dln {

using DimChain = std::vector<Eigen::Index>;

// Deep linear network N(x) = W_L ... W_1 x. Layers are addressed 1..L;
// layer l has shape n_l x n_{l-1}.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<Matrix> layers);

  // All-zero network with the given dimension chain (n_0, ..., n_L).
  static Network zeros(const DimChain& dims);

  int depth() const { return static_cast<int>(layers_.size()); }
  DimChain dims() const;
  Eigen::Index dim(int l) const;  // n_l, 0 <= l <= L

  const Matrix& layer(int l) const;
  Matrix& layer(int l);
  const std::vector<Matrix>& layers() const { return layers_; }

  // Replaces layer l; shape must be unchanged.
  void set_layer(int l, Matrix w);

 private:
  void check_index(int l) const;
  std::vector<Matrix> layers_;
};

// W_i W_{i-1} ... W_j for 1 <= j <= i <= L. The empty product (i = j - 1)
// is the identity of size n_i, which covers W_{L:L+1} = I_{n_L} and
// W_{0:1} = I_{n_0}.
Matrix partial_product(const Network& net, int i, int j);

// W_{L:1}.
Matrix end_to_end(const Network& net);

enum class PadMode { plain, one };

// plain: A == [[B, 0], [0, 0]].
// one:   A == [[B, 0, 0], [0, I, 0], [0, 0, 0]] with the identity filling the
//        diagonal up to min(rows, cols); B must be square with size below
//        min(rows, cols).
bool pad_equiv(const Matrix& a, const Matrix& b, PadMode mode, double tol = 1e-12);

// Every intermediate width is at least max(n0, nL).
bool width_ok(const DimChain& dims, Eigen::Index n0, Eigen::Index nL);

// Partial products W_{i:1} X ("below") and W_{L:j} ("above") cached across
// single-layer updates. The network and X must outlive the cache; call
// invalidate(l) after changing layer l.
class ProductCache {
 public:
  ProductCache(const Network& net, const Matrix& x);

  // W_{i:1} X for 0 <= i <= L (i = 0 gives X).
  const Matrix& below(int i);
  // W_{L:j} for 1 <= j <= L + 1 (j = L + 1 gives I_{n_L}).
  const Matrix& above(int j);

  void invalidate(int l);
  void invalidate_all();

 private:
  const Network* net_;
  const Matrix* x_;
  std::vector<Matrix> below_;
  std::vector<bool> below_ok_;
  std::vector<Matrix> above_;
  std::vector<bool> above_ok_;
};

// Text format: header "dln-network 1", depth, dims, then each layer's rows
// with shortest round-trip decimals.
void write_network(std::ostream& out, const Network& net);
Network read_network(std::istream& in);
void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

}  // namespace dln
