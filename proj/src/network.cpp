#include "dln/network.hpp"

#include "dln/errors.hpp"
#include "dln/textio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace dln {

Network::Network(std::vector<Matrix> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DomainError("network needs at least one layer");
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    if (layers_[l].cols() != layers_[l - 1].rows()) {
      throw DomainError("layer " + std::to_string(l + 1) + " has " + std::to_string(layers_[l].cols()) +
                        " columns but layer " + std::to_string(l) + " has " + std::to_string(layers_[l - 1].rows()) +
                        " rows");
    }
  }
  for (const auto& w : layers_) {
    if (w.rows() == 0 || w.cols() == 0) throw DomainError("network layers must have nonzero dimensions");
  }
}

Network Network::zeros(const DimChain& dims) {
  if (dims.size() < 2) throw DomainError("dimension chain needs at least n_0 and n_1");
  std::vector<Matrix> layers;
  for (std::size_t l = 1; l < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l - 1] < 1) throw DomainError("layer widths must be >= 1");
    layers.push_back(Matrix::Zero(dims[l], dims[l - 1]));
  }
  return Network(std::move(layers));
}

DimChain Network::dims() const {
  DimChain d;
  if (layers_.empty()) return d;
  d.push_back(layers_.front().cols());
  for (const auto& w : layers_) d.push_back(w.rows());
  return d;
}

Eigen::Index Network::dim(int l) const {
  if (l < 0 || l > depth()) throw DomainError("dimension index " + std::to_string(l) + " out of range");
  return l == 0 ? layers_.front().cols() : layers_[static_cast<std::size_t>(l - 1)].rows();
}

void Network::check_index(int l) const {
  if (l < 1 || l > depth()) {
    throw DomainError("layer index " + std::to_string(l) + " outside 1.." + std::to_string(depth()));
  }
}

const Matrix& Network::layer(int l) const {
  check_index(l);
  return layers_[static_cast<std::size_t>(l - 1)];
}

Matrix& Network::layer(int l) {
  check_index(l);
  return layers_[static_cast<std::size_t>(l - 1)];
}

void Network::set_layer(int l, Matrix w) {
  Matrix& cur = layer(l);
  if (w.rows() != cur.rows() || w.cols() != cur.cols()) {
    throw DomainError("set_layer: shape mismatch on layer " + std::to_string(l));
  }
  cur = std::move(w);
}

Matrix partial_product(const Network& net, int i, int j) {
  const int L = net.depth();
  if (i < 0 || i > L + 1 || j < 0 || j > L + 1) {
    throw DomainError("partial_product: indices (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") outside 0.." + std::to_string(L + 1));
  }
  if (i < j) {
    if (i != j - 1) throw DomainError("partial_product: empty range must be (i, i+1)");
    const Eigen::Index n = net.dim(std::min(i, L));
    return Matrix::Identity(n, n);
  }
  if (j < 1 || i > L) throw DomainError("partial_product: nonempty range must lie in 1..L");
  Matrix p = net.layer(j);
  for (int k = j + 1; k <= i; ++k) p = net.layer(k) * p;
  return p;
}

Matrix end_to_end(const Network& net) { return partial_product(net, net.depth(), 1); }

bool pad_equiv(const Matrix& a, const Matrix& b, PadMode mode, double tol) {
  if (b.rows() > a.rows() || b.cols() > a.cols()) {
    throw DomainError("pad_equiv: B must not be larger than A");
  }
  Matrix expected = Matrix::Zero(a.rows(), a.cols());
  expected.topLeftCorner(b.rows(), b.cols()) = b;
  if (mode == PadMode::one) {
    const Eigen::Index k = b.rows();
    const Eigen::Index mn = std::min(a.rows(), a.cols());
    if (b.cols() != k || !(mn > k)) {
      throw DomainError("pad_equiv(one): B must be square with size below min(rows, cols) of A");
    }
    for (Eigen::Index d = k; d < mn; ++d) expected(d, d) = 1.0;
  }
  return ((a - expected).cwiseAbs().array() <= tol).all();
}

bool width_ok(const DimChain& dims, Eigen::Index n0, Eigen::Index nL) {
  const Eigen::Index need = std::max(n0, nL);
  for (std::size_t l = 1; l + 1 < dims.size(); ++l) {
    if (dims[l] < need) return false;
  }
  return true;
}

ProductCache::ProductCache(const Network& net, const Matrix& x)
    : net_(&net),
      x_(&x),
      below_(static_cast<std::size_t>(net.depth() + 1)),
      below_ok_(static_cast<std::size_t>(net.depth() + 1), false),
      above_(static_cast<std::size_t>(net.depth() + 2)),
      above_ok_(static_cast<std::size_t>(net.depth() + 2), false) {
  if (x.rows() != net.dim(0)) throw DomainError("ProductCache: X rows do not match n_0");
}

const Matrix& ProductCache::below(int i) {
  const int L = net_->depth();
  if (i < 0 || i > L) throw DomainError("ProductCache::below: index out of range");
  int start = i;
  while (start > 0 && !below_ok_[static_cast<std::size_t>(start)]) --start;
  if (start == 0 && !below_ok_[0]) {
    below_[0] = *x_;
    below_ok_[0] = true;
  }
  for (int k = start + 1; k <= i; ++k) {
    below_[static_cast<std::size_t>(k)] = net_->layer(k) * below_[static_cast<std::size_t>(k - 1)];
    below_ok_[static_cast<std::size_t>(k)] = true;
  }
  return below_[static_cast<std::size_t>(i)];
}

const Matrix& ProductCache::above(int j) {
  const int L = net_->depth();
  if (j < 1 || j > L + 1) throw DomainError("ProductCache::above: index out of range");
  int start = j;
  while (start < L + 1 && !above_ok_[static_cast<std::size_t>(start)]) ++start;
  if (start == L + 1 && !above_ok_[static_cast<std::size_t>(L + 1)]) {
    const Eigen::Index n = net_->dim(L);
    above_[static_cast<std::size_t>(L + 1)] = Matrix::Identity(n, n);
    above_ok_[static_cast<std::size_t>(L + 1)] = true;
  }
  for (int k = start - 1; k >= j; --k) {
    if (k == L) {
      above_[static_cast<std::size_t>(k)] = net_->layer(L);
    } else {
      above_[static_cast<std::size_t>(k)] = above_[static_cast<std::size_t>(k + 1)] * net_->layer(k);
    }
    above_ok_[static_cast<std::size_t>(k)] = true;
  }
  return above_[static_cast<std::size_t>(j)];
}

void ProductCache::invalidate(int l) {
  const int L = net_->depth();
  for (int k = l; k <= L; ++k) below_ok_[static_cast<std::size_t>(k)] = false;
  for (int k = 1; k <= l; ++k) above_ok_[static_cast<std::size_t>(k)] = false;
}

void ProductCache::invalidate_all() {
  std::fill(below_ok_.begin(), below_ok_.end(), false);
  std::fill(above_ok_.begin(), above_ok_.end(), false);
}

void write_network(std::ostream& out, const Network& net) {
  out << "dln-network 1\n" << net.depth() << '\n';
  const DimChain d = net.dims();
  for (std::size_t i = 0; i < d.size(); ++i) out << (i ? " " : "") << d[i];
  out << '\n';
  for (const auto& w : net.layers()) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << (c ? " " : "") << format_double(w(r, c));
      out << '\n';
    }
  }
}

Network read_network(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> std::string {
    if (!std::getline(in, line)) throw ParseError("unexpected end of network file", lineno + 1);
    ++lineno;
    return line;
  };
  if (trim(next()) != "dln-network 1") throw ParseError("not a dln-network file", lineno);
  const auto depth = static_cast<long>(parse_double(next(), lineno));
  if (depth < 1) throw ParseError("depth must be >= 1", lineno);
  DimChain dims;
  {
    std::istringstream ds(next());
    std::string tok;
    while (ds >> tok) dims.push_back(static_cast<Eigen::Index>(parse_double(tok, lineno)));
  }
  if (static_cast<long>(dims.size()) != depth + 1) throw ParseError("dimension chain length mismatch", lineno);
  std::vector<Matrix> layers;
  for (long l = 1; l <= depth; ++l) {
    Matrix w(dims[static_cast<std::size_t>(l)], dims[static_cast<std::size_t>(l - 1)]);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      std::istringstream rs(next());
      std::string tok;
      Eigen::Index c = 0;
      while (rs >> tok) {
        if (c >= w.cols()) throw ParseError("too many entries in row", lineno);
        w(r, c++) = parse_double(tok, lineno);
      }
      if (c != w.cols()) throw ParseError("too few entries in row", lineno);
    }
    layers.push_back(std::move(w));
  }
  return Network(std::move(layers));
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_network(out, net);
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_network(in);
}

}  // namespace dln
