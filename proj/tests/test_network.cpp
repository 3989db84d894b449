#include <doctest.h>

#include <sstream>

#include "dln/errors.hpp"
#include "dln/init.hpp"
#include "dln/network.hpp"
#include "helpers.hpp"

using namespace dln;
using testutil::gaussian;

namespace {

Network random_net(const DimChain& dims, std::mt19937_64& g) {
  std::vector<Matrix> layers;
  for (std::size_t l = 1; l < dims.size(); ++l) layers.push_back(gaussian(dims[l], dims[l - 1], g));
  return Network(std::move(layers));
}

}  // namespace

TEST_CASE("partial products") {
  std::mt19937_64 g(1);
  const Network net = random_net({3, 4, 5, 2}, g);
  CHECK((partial_product(net, 2, 1) - net.layer(2) * net.layer(1)).norm() == 0.0);
  CHECK(partial_product(net, 1, 2) == Matrix::Identity(4, 4));
  CHECK(partial_product(net, 3, 4) == Matrix::Identity(2, 2));
  CHECK(partial_product(net, 0, 1) == Matrix::Identity(3, 3));
  const Matrix left = (net.layer(3) * net.layer(2)) * net.layer(1);
  const Matrix right = net.layer(3) * (net.layer(2) * net.layer(1));
  CHECK((partial_product(net, 3, 1) - left).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_product(net, 3, 1) - right).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(partial_product(net, 3, 1) == end_to_end(net));
  CHECK_THROWS_AS(partial_product(net, 1, 3), DomainError);
  CHECK_THROWS_AS(partial_product(net, 4, 1), DomainError);
}

TEST_CASE("end_to_end") {
  Network id({Matrix::Identity(3, 3), Matrix::Identity(3, 3)});
  CHECK(end_to_end(id) == Matrix::Identity(3, 3));
  std::mt19937_64 g(2);
  const Network one = random_net({3, 2}, g);
  CHECK(end_to_end(one) == one.layer(1));

  InitScheme s;
  s.kind = InitKind::balanced;
  s.balanced_seed = gaussian(2, 3, g);
  const Network bal = initialize(s, {3, 5, 4, 2}, 0);
  CHECK((end_to_end(bal) - *s.balanced_seed).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pad_equiv") {
  Matrix a(2, 2);
  a << 1, 0, 0, 0;
  Matrix b(1, 1);
  b << 1;
  CHECK(pad_equiv(a, b, PadMode::plain));
  Matrix c(2, 3);
  c << 2, 0, 0, 0, 1, 0;
  Matrix two(1, 1);
  two << 2;
  CHECK(pad_equiv(c, two, PadMode::one));
  CHECK_FALSE(pad_equiv(c, two, PadMode::plain));
  Matrix d = a;
  d(1, 1) = 0.5;
  CHECK_FALSE(pad_equiv(d, b, PadMode::plain));
  c(0, 2) = 1e-3;
  CHECK_FALSE(pad_equiv(c, two, PadMode::one));
}

TEST_CASE("width_ok") {
  DimChain wide(11, 128);
  wide.back() = 10;
  CHECK(width_ok(wide, 128, 10));
  DimChain arch1(11, 20);
  arch1.front() = 128;
  CHECK_FALSE(width_ok(arch1, 128, 20));
  CHECK(width_ok({128, 10}, 128, 10));
}

TEST_CASE("padded networks compose to a padded product") {
  std::mt19937_64 g(3);
  const Network small = random_net({3, 3, 3}, g);
  std::vector<Matrix> wide_layers;
  const DimChain wide_dims = {3, 6, 3};
  for (int l = 1; l <= 2; ++l) {
    Matrix w = Matrix::Zero(wide_dims[l], wide_dims[l - 1]);
    w.topLeftCorner(3, 3) = small.layer(l);
    wide_layers.push_back(w);
  }
  const Network wide(std::move(wide_layers));
  CHECK(pad_equiv(end_to_end(wide), end_to_end(small), PadMode::plain));
}

TEST_CASE("product cache tracks single-layer updates") {
  std::mt19937_64 g(4);
  Network net = random_net({3, 4, 4, 4, 2}, g);
  const Matrix x = gaussian(3, 6, g);
  ProductCache cache(net, x);
  for (int i = 0; i <= 4; ++i) CHECK((cache.below(i) - partial_product(net, i, 1) * x).norm() < 1e-12);
  for (int j = 1; j <= 5; ++j) CHECK((cache.above(j) - partial_product(net, 4, j)).norm() < 1e-12);
  net.layer(2) += gaussian(4, 4, g);
  cache.invalidate(2);
  for (int i = 0; i <= 4; ++i) CHECK((cache.below(i) - partial_product(net, i, 1) * x).norm() < 1e-12);
  for (int j = 1; j <= 5; ++j) CHECK((cache.above(j) - partial_product(net, 4, j)).norm() < 1e-12);
}

TEST_CASE("network text round trip is exact") {
  std::mt19937_64 g(5);
  const Network net = random_net({2, 3, 1}, g);
  std::stringstream ss;
  write_network(ss, net);
  const Network back = read_network(ss);
  REQUIRE(back.depth() == 2);
  CHECK(back.layer(1) == net.layer(1));
  CHECK(back.layer(2) == net.layer(2));
  std::stringstream bad("dln-network 1\n2\n2 3\n");
  CHECK_THROWS(read_network(bad));
}

TEST_CASE("shape checks") {
  CHECK_THROWS_AS(Network({Matrix::Zero(2, 3), Matrix::Zero(2, 3)}), DomainError);
  Network net = Network::zeros({2, 3, 1});
  CHECK(net.dims() == DimChain{2, 3, 1});
  CHECK_THROWS_AS(net.set_layer(1, Matrix::Zero(2, 2)), DomainError);
  CHECK_THROWS_AS(net.layer(3), DomainError);
}
