#include <doctest.h>

#include <random>

#include "ibclab/fock_vector.hpp"
#include "support/ordered_oracle.hpp"

using namespace ibclab;

namespace {

FockSpacePtr small_space(int n_max = 2, int m = 4, double h = 0.3) {
  return FockSpace::build(RadialGrid{h, m, 0.0}, n_max);
}

FockVector random_state(FockSpacePtr sp, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uni = [&gen]() { return 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0; };
  FockVector v(sp);
  for (int n = 0; n <= sp->n_max(); ++n)
    for (std::int64_t i = 0; i < sp->sector_dim(n); ++i)
      v.sector(n)[i] = Complex(uni(), uni());
  return v;
}

}  // namespace

TEST_CASE("vacuum inner product and sector weights") {
  auto sp = small_space();
  FockVector v = vacuum_state(sp);
  CHECK(inner_product(v, v).real() == doctest::Approx(1.0));
  auto sw = sector_weights(v);
  CHECK(sw.p[0] == doctest::Approx(1.0));
  CHECK(sw.p[1] == 0.0);
  CHECK(sw.p[2] == 0.0);
}

TEST_CASE("states supported in different sectors are orthogonal") {
  auto sp = small_space();
  FockVector u(sp), w(sp);
  u.sector(1).setConstant(Complex(0.7, -0.1));
  w.sector(2).setConstant(Complex(0.3, 0.4));
  CHECK(std::abs(inner_product(u, w)) == 0.0);
}

TEST_CASE("multiset norm equals the ordered tensor-grid norm") {
  for (int n_max : {1, 2, 3}) {
    auto sp = small_space(n_max, 4, 0.37);
    FockVector v = random_state(sp, 11 + n_max);
    auto ordered = testing::symmetrize(v);
    CHECK(v.norm2() ==
          doctest::Approx(testing::ordered_norm2(ordered)).epsilon(1e-12));
  }
}

TEST_CASE("inner product is conjugate symmetric and positive definite") {
  auto sp = small_space(3, 3, 0.21);
  FockVector u = random_state(sp, 5);
  FockVector w = random_state(sp, 6);
  Complex a = inner_product(u, w);
  Complex b = inner_product(w, u);
  CHECK(a.real() == doctest::Approx(b.real()));
  CHECK(a.imag() == doctest::Approx(-b.imag()));
  CHECK(inner_product(u, u).real() > 0.0);
  CHECK(std::abs(inner_product(u, u).imag()) < 1e-15);
}

TEST_CASE("shape mismatch is rejected") {
  auto sp1 = small_space(2, 4, 0.3);
  auto sp2 = small_space(2, 5, 0.3);
  FockVector u(sp1), w(sp2);
  CHECK_THROWS_AS(inner_product(u, w), ShapeError);
}

TEST_CASE("product state: zero profile with vacuum weight is the vacuum") {
  auto sp = small_space();
  FockVector v = product_state_from_profile(sp, [](double) { return 0.0; },
                                            {1.0});
  CHECK(v.sector(0)[0] == Complex(1.0, 0.0));
  CHECK(v.sector(1).norm() == 0.0);
  CHECK(v.sector(2).norm() == 0.0);
}

TEST_CASE("product state: single-sector exponential profile") {
  auto sp = small_space(2, 6, 0.25);
  const double kappa = 0.9;
  FockVector v = product_state_from_profile(
      sp, [kappa](double r) { return std::exp(-kappa * r); }, {0.0, 1.0});
  for (int k = 1; k <= 6; ++k)
    CHECK(v.sector(1)[k - 1].real() ==
          doctest::Approx(std::exp(-kappa * 0.25 * k)));
  CHECK(v.sector(0)[0] == Complex(0.0, 0.0));
  // sector-2 coefficients are products over the multiset entries
  const auto& b = sp->basis(2);
  FockVector w = product_state_from_profile(
      sp, [kappa](double r) { return std::exp(-kappa * r); }, {0.0, 0.0, 2.0});
  for (std::int64_t i = 0; i < b.size(); ++i) {
    auto e = b.entry(i);
    double expect = 2.0;
    for (auto k : e) expect *= std::exp(-kappa * 0.25 * k);
    CHECK(w.sector(2)[i].real() == doctest::Approx(expect));
  }
}

TEST_CASE("sector weights of a normalized state sum to one") {
  auto sp = small_space(3, 4, 0.4);
  FockVector v = random_state(sp, 77);
  v.scale(1.0 / v.norm());
  CHECK(sector_weights(v).total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flatten / unflatten round trip") {
  auto sp = small_space(2, 5, 0.2);
  FockVector v = random_state(sp, 3);
  FockVector w = FockVector::unflatten(sp, v.flatten());
  for (int n = 0; n <= 2; ++n)
    CHECK((v.sector(n) - w.sector(n)).norm() == 0.0);
}
