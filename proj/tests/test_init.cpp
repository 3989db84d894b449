#include <doctest.h>

#include "dln/errors.hpp"
#include "dln/init.hpp"
#include "helpers.hpp"

using namespace dln;

namespace {

InitScheme scheme(InitKind k) {
  InitScheme s;
  s.kind = k;
  return s;
}

}  // namespace

TEST_CASE("random_orthogonal") {
  const Matrix one = random_orthogonal(1, 3);
  CHECK(std::abs(std::abs(one(0, 0)) - 1.0) < 1e-15);
  for (Eigen::Index n : {2, 5, 17}) {
    const Matrix q = random_orthogonal(n, 42);
    CHECK((q.transpose() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(std::abs(q.determinant()) - 1.0) < 1e-8);
  }
  CHECK(random_orthogonal(4, 1) == random_orthogonal(4, 1));
  CHECK(random_orthogonal(4, 1) != random_orthogonal(4, 2));
}

TEST_CASE("identity scheme pads identities") {
  const Network net = initialize(scheme(InitKind::identity), {2, 3, 2}, 0);
  Matrix w1(3, 2);
  w1 << 1, 0, 0, 1, 0, 0;
  Matrix w2(2, 3);
  w2 << 1, 0, 0, 0, 1, 0;
  CHECK(net.layer(1) == w1);
  CHECK(net.layer(2) == w2);
}

TEST_CASE("balanced scheme with identity seed") {
  InitScheme s = scheme(InitKind::balanced);
  s.balanced_seed = Matrix::Identity(3, 3);
  const Network net = initialize(s, {3, 3, 3, 3}, 0);
  for (int l = 1; l <= 3; ++l) CHECK(pad_equiv(net.layer(l).cwiseAbs(), Matrix::Identity(3, 3), PadMode::plain, 1e-12));
  const Network wide = initialize(s, {3, 5, 4, 3}, 0);
  for (int l = 1; l <= 3; ++l) {
    const Matrix& w = wide.layer(l);
    CHECK(std::abs(w.topLeftCorner(3, 3).cwiseAbs().sum() - 3.0) < 1e-12);
  }
}

TEST_CASE("balanced factors are balanced") {
  std::mt19937_64 g(7);
  InitScheme s = scheme(InitKind::balanced);
  s.balanced_seed = testutil::gaussian(3, 4, g);
  const Network net = initialize(s, {4, 5, 5, 3}, 0);
  for (int j = 1; j < net.depth(); ++j) {
    const Matrix lhs = net.layer(j + 1).transpose() * net.layer(j + 1);
    const Matrix rhs = net.layer(j) * net.layer(j).transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((end_to_end(net) - *s.balanced_seed).cwiseAbs().maxCoeff() < 1e-10);
  const Network single = initialize(s, {4, 3}, 0);
  CHECK(single.layer(1) == *s.balanced_seed);
  CHECK_THROWS_AS(initialize(s, {4, 2, 3}, 0), DomainError);
}

TEST_CASE("orth-identity layout and width independence") {
  const Network narrow = initialize(scheme(InitKind::orth_identity), {12, 12, 12, 3}, 5);
  const Network wide = initialize(scheme(InitKind::orth_identity), {12, 24, 20, 3}, 5);
  // W1 of the wide net: orthogonal 12-block atop zeros
  CHECK(wide.layer(1).rows() == 24);
  CHECK((wide.layer(1).topRows(12) - narrow.layer(1)).norm() == 0.0);
  CHECK(wide.layer(1).bottomRows(12).norm() == 0.0);
  // middle: orthogonal block then identity on the remaining diagonal
  CHECK(pad_equiv(wide.layer(2), narrow.layer(2), PadMode::one));
  CHECK(pad_equiv(wide.layer(3), narrow.layer(3), PadMode::plain));
  CHECK(pad_equiv(end_to_end(wide), end_to_end(narrow), PadMode::plain, 1e-12));

  const Vector s = singular_values(end_to_end(narrow));
  for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(std::abs(s(i) - 1.0) < 1e-12);
}

TEST_CASE("orthogonal scheme") {
  const Network net = initialize(scheme(InitKind::orthogonal), {4, 6, 3}, 2);
  const Matrix& w1 = net.layer(1);
  CHECK((w1.topRows(4).transpose() * w1.topRows(4) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(w1.bottomRows(2).norm() == 0.0);
}

TEST_CASE("random scheme row norms") {
  const Network net = initialize(scheme(InitKind::random), {200, 300, 300}, 9);
  for (int l = 1; l <= 2; ++l) {
    const double mean_sq = net.layer(l).rowwise().squaredNorm().mean();
    CHECK(mean_sq == doctest::Approx(1.0).epsilon(0.05));
  }
  InitScheme s = scheme(InitKind::random);
  s.variance_overrides = {1.0};
  CHECK_THROWS_AS(initialize(s, {2, 2, 2}, 0), DomainError);
}

TEST_CASE("initialization is deterministic and names parse") {
  const auto a = initialize(scheme(InitKind::orth_identity), {3, 5, 2}, 11);
  const auto b = initialize(scheme(InitKind::orth_identity), {3, 5, 2}, 11);
  CHECK(a.layer(1) == b.layer(1));
  CHECK(a.layer(2) == b.layer(2));
  CHECK(parse_init_kind("orth-identity") == InitKind::orth_identity);
  CHECK(parse_init_kind("balanced") == InitKind::balanced);
  CHECK(to_string(InitKind::random) == "random");
  CHECK_THROWS_AS(parse_init_kind("xavier"), DomainError);
}
