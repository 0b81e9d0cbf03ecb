#include <doctest.h>

#include <cmath>
#include <random>

#include "fdsm/transforms.hpp"
#include "oracles.hpp"

using namespace fdsm;

namespace {

// Q = W_{n,L} ... W_{n,1}, W_{n,k} = diag(W_{n/2^(k-1)}, I), assembled from the definition.
Eigen::MatrixXd haar_reference(std::size_t n, std::size_t levels) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t k = 1; k <= levels; ++k) {
    const std::size_t m = n >> (k - 1);
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n);
    w.topLeftCorner(m, m).setZero();
    for (std::size_t i = 0; i < m / 2; ++i) {
      w(i, 2 * i) = s;
      w(i, 2 * i + 1) = s;
      w(m / 2 + i, 2 * i) = s;
      w(m / 2 + i, 2 * i + 1) = -s;
    }
    q = w * q;
  }
  return q;
}

Vector grid3() { return {1, 2, 3, 4, 5, 6, 7, 8, 9}; }

}  // namespace

TEST_CASE("row differences") {
  const auto r = row_diff(3, 3);
  CHECK(r->apply(grid3()) == Vector{3, 3, 3, 3, 3, 3, 0, 0, 0});
  CHECK(norm1(r->apply(Vector(9, 0.7))) == 0.0);

  const auto r4 = row_diff(4, 4);
  const auto m4 = oracle::materialize(*r4);
  Vector e(16, 0.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < 16; ++j) {
    e[j] = 1.0;
    const Vector col = r4->adjoint(e);
    for (std::size_t i = 0; i < 16; ++i) worst = std::max(worst, std::abs(col[i] - m4(j, i)));
    e[j] = 0.0;
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("column differences") {
  const auto c = col_diff(3, 3);
  CHECK(c->apply(grid3()) == Vector{1, 1, 0, 1, 1, 0, 1, 1, 0});
  CHECK(norm1(c->apply(Vector(9, -2.5))) == 0.0);
  const auto rep = check_adjoint(*col_diff(5, 3), 1000, 11);
  CHECK(rep.pass);
  CHECK(rep.max_abs_error <= 1e-12);
}

TEST_CASE("differences are translation invariant in l1") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = oracle::random_vector(35, rng);
    Vector shifted = x;
    for (auto& v : shifted) v += 0.25;
    for (const auto& map : {row_diff(5, 7), col_diff(5, 7)}) {
      CHECK(norm1(map->apply(shifted)) == doctest::Approx(norm1(map->apply(x))).epsilon(1e-15));
    }
  }
}

TEST_CASE("haar 2x2 constant block") {
  const auto h = haar(2, 1);
  const Vector y = h->apply(Vector{1, 1, 1, 1});
  CHECK(y[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(y[1]) < 1e-15);
  CHECK(std::abs(y[2]) < 1e-15);
  CHECK(std::abs(y[3]) < 1e-15);
}

TEST_CASE("haar matrix matches the block definition and is orthogonal") {
  for (std::size_t n : {2, 4, 8, 16, 256}) {
    std::size_t p = 0;
    while ((std::size_t{1} << p) < n) ++p;
    for (std::size_t levels : {std::size_t{1}, p}) {
      const auto q = oracle::to_eigen(haar_matrix(n, levels));
      CHECK((q - haar_reference(n, levels)).cwiseAbs().maxCoeff() <= 1e-15);
      const Eigen::MatrixXd gram = q * q.transpose();
      CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("haar map is Q X Q^T") {
  std::mt19937_64 rng(9);
  for (std::size_t levels = 1; levels <= 3; ++levels) {
    const Vector x = oracle::random_vector(64, rng);
    Eigen::MatrixXd xm(8, 8);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) xm(i, j) = x[8 * i + j];
    }
    const auto q = haar_reference(8, levels);
    const Eigen::MatrixXd expect = q * xm * q.transpose();
    const Vector y = haar(8, levels)->apply(x);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) worst = std::max(worst, std::abs(y[8 * i + j] - expect(i, j)));
    }
    CHECK(worst <= 1e-13);
    CHECK(norm(y) == doctest::Approx(norm(x)).epsilon(1e-10));
    const Vector back = haar(8, levels)->adjoint(y);
    CHECK(dist(back, x) <= 1e-10);
  }
}

TEST_CASE("haar rejects bad shapes") {
  CHECK_THROWS_AS(haar(6, 1), InputError);
  CHECK_THROWS_AS(haar(8, 4), InputError);
  CHECK_THROWS_AS(haar(8, 0), InputError);
  CHECK_THROWS_AS(haar(1, 1), InputError);
}

TEST_CASE("stack") {
  const auto r = row_diff(6, 5);
  CHECK(stack({r}) == r);
  CHECK_THROWS_AS(stack({}), InputError);
  CHECK_THROWS_AS(stack({row_diff(2, 2), row_diff(3, 3)}), InputError);

  std::mt19937_64 rng(21);
  const auto l = tv_map(6, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = oracle::random_vector(30, rng);
    const Vector lx = l->apply(x);
    const Vector rx = row_diff(6, 5)->apply(x), cx = col_diff(6, 5)->apply(x);
    Vector cat = rx;
    cat.insert(cat.end(), cx.begin(), cx.end());
    CHECK(lx == cat);
  }
  const auto g = stack({haar(8, 3), tv_map(8, 8)});
  CHECK(g->out_dim() == 3 * 64);
  CHECK(check_adjoint(*g, 1000, 5).pass);
}

TEST_CASE("every map is adjoint-consistent against its dense transpose") {
  const std::vector<LinearMapPtr> maps = {row_diff(4, 6), col_diff(4, 6), haar(8, 2),
                                          tv_map(5, 5), stack({haar(4, 2), tv_map(4, 4)}),
                                          diagonal_map({1, -2, 0, 3})};
  for (const auto& m : maps) {
    CHECK(check_adjoint(*m, 1000, 17).pass);
    const auto a = oracle::materialize(*m);
    Eigen::MatrixXd at(m->in_dim(), m->out_dim());
    Vector e(m->out_dim(), 0.0);
    for (std::size_t j = 0; j < m->out_dim(); ++j) {
      e[j] = 1.0;
      const Vector col = m->adjoint(e);
      for (std::size_t i = 0; i < col.size(); ++i) at(i, j) = col[i];
      e[j] = 0.0;
    }
    CHECK((a.transpose() - at).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("checked wrappers reject wrong lengths") {
  CHECK_THROWS_AS(row_diff(3, 3)->apply(Vector(8)), InputError);
  CHECK_THROWS_AS(row_diff(3, 3)->adjoint(Vector(10)), InputError);
}
