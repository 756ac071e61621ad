#include "doctest.h"
#include "test_support.hpp"

#include "fsm/errors.hpp"
#include "fsm/linalg.hpp"
#include "fsm/planewave.hpp"

#include <cmath>
#include <numbers>

using namespace fsm;
using std::numbers::pi;

namespace {
const FourierPotential kT1 = FourierPotential::power_law(1.0, {1.0});
}

TEST_CASE("mode ordering puts every coarse basis in front of a finer one") {
  for (std::size_t i = 0; i < 41; ++i) CHECK(index_of_frequency(frequency_at(i)) == i);
  CHECK(frequency_at(0) == 0);
  CHECK(frequency_at(1) == 1);
  CHECK(frequency_at(2) == -1);
  CHECK(frequency_at(5) == 3);
  const PlanewaveBasis b(1.0, 3);
  CHECK(b.dimension() == 5);
  CHECK(PlanewaveBasis(1.0, 3, CutoffConvention::UpTo).dimension() == 7);
  CHECK_THROWS_AS(PlanewaveBasis(1.0, 0), ConfigError);
  CHECK(PlanewaveBasis(1.0, 0, CutoffConvention::UpTo).dimension() == 1);
}

TEST_CASE("laplacian_diagonal") {
  const RVector up = laplacian_diagonal(PlanewaveBasis(1.0, 1, CutoffConvention::UpTo));
  REQUIRE(up.size() == 3);
  CHECK(up[0] == 0.0);
  CHECK(up[1] == doctest::Approx(4 * pi * pi).epsilon(1e-15));
  CHECK(up[2] == doctest::Approx(4 * pi * pi).epsilon(1e-15));

  const RVector strict = laplacian_diagonal(PlanewaveBasis(1.0, 1));
  REQUIRE(strict.size() == 1);
  CHECK(strict[0] == 0.0);

  const PlanewaveBasis b2(2.0, 2, CutoffConvention::UpTo);
  const RVector d2 = laplacian_diagonal(b2);
  CHECK(d2[static_cast<Eigen::Index>(index_of_frequency(2))] == doctest::Approx(4 * pi * pi).epsilon(1e-15));
  CHECK(b2.rho() == doctest::Approx(4 * pi * pi).epsilon(1e-15));
  for (Eigen::Index i = 0; i < d2.size(); ++i) CHECK(d2[i] >= 0.0);
}

TEST_CASE("potential_block") {
  const PlanewaveBasis b(1.0, 2);  // modes {0, 1, -1}
  CHECK(potential_block(FourierPotential::zero(1.0), b, b).norm() == 0.0);

  const CMatrix c = potential_block(FourierPotential::constant(1.0, 2.5), b, b);
  CHECK((c - 2.5 * CMatrix::Identity(3, 3)).norm() == 0.0);

  const CMatrix v = potential_block(kT1, b, b);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(v(i, i) == cplx(-10.0));
  const auto at = [&](int k, int kp) {
    return v(static_cast<Eigen::Index>(index_of_frequency(k)), static_cast<Eigen::Index>(index_of_frequency(kp)));
  };
  CHECK(at(0, 1) == cplx(-5.0));
  CHECK(at(-1, 0) == cplx(-5.0));
  CHECK(at(1, -1) == cplx(-2.5));
  CHECK(at(-1, 1) == cplx(-2.5));

  // Complex coefficients: entry (k, k') = V_{k - k'}, Hermitian.
  const auto w = FourierPotential::from_coefficients(1.0, {{0, {1.0, 0.0}}, {1, {0.5, 0.25}}, {3, {0.0, -1.0}}});
  const PlanewaveBasis big(1.0, 5);
  const CMatrix m = potential_block(w, big, big);
  CHECK(hermitian_asymmetry(m) == 0.0);
  CHECK(m(static_cast<Eigen::Index>(index_of_frequency(2)), static_cast<Eigen::Index>(index_of_frequency(1))) ==
        cplx(0.5, 0.25));
  CHECK(m(static_cast<Eigen::Index>(index_of_frequency(-2)), static_cast<Eigen::Index>(index_of_frequency(1))) ==
        cplx(0.0, 1.0));

  CHECK_THROWS_AS(potential_block(kT1, b, PlanewaveBasis(1.0, 2, CutoffConvention::UpTo)), ConfigError);
  CHECK_THROWS_AS(potential_block(kT1, PlanewaveBasis(2.0, 2), PlanewaveBasis(2.0, 2)), ConfigError);
}

TEST_CASE("windows are the index range between two cutoffs") {
  const IndexWindow w(PlanewaveBasis(1.0, 2), PlanewaveBasis(1.0, 5));
  CHECK(w.offset() == 3);
  CHECK(w.dimension() == 6);
  CHECK(std::abs(w.frequency(0)) == 2);
  CHECK(w.lower_edge() == doctest::Approx(PlanewaveBasis(1.0, 2).rho()));
  const CMatrix block = potential_block(kT1, w, PlanewaveBasis(1.0, 2));
  const CMatrix full = potential_block(kT1, PlanewaveBasis(1.0, 5), PlanewaveBasis(1.0, 5));
  CHECK((block - full.block(3, 0, 6, 3)).norm() == 0.0);
  CHECK_THROWS_AS(IndexWindow(PlanewaveBasis(1.0, 5), PlanewaveBasis(1.0, 2)), ConfigError);
}

TEST_CASE("potential coefficients are validated") {
  CHECK_THROWS_AS(FourierPotential::from_coefficients(1.0, {{1, {1.0, 0.0}}, {-1, {2.0, 0.0}}}), ConfigError);
  CHECK_THROWS_AS(FourierPotential::from_coefficients(1.0, {{0, {1.0, 0.5}}}), ConfigError);
  const auto ok = FourierPotential::from_coefficients(1.0, {{2, {1.0, 1.0}}, {-2, {1.0, -1.0}}});
  CHECK(ok.coefficient(-2) == cplx(1.0, -1.0));
  CHECK(ok.coefficient(5) == cplx(0.0));
  CHECK(ok.max_stored_frequency() == 2);
  CHECK(!kT1.max_stored_frequency().has_value());
  CHECK(kT1.coefficient(4) == cplx(-1.25));
}

TEST_CASE("regularity_norm trivial cases") {
  CHECK(regularity_norm(FourierPotential::zero(1.0), 1.0, 50) == 0.0);
  CHECK(regularity_norm(FourierPotential::zero(1.0), 0.3, 50) == 0.0);
  CHECK(regularity_norm(FourierPotential::constant(1.0, -3.0), 1.0, 40) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK_THROWS_AS(regularity_norm(kT1, -0.1, 10), ConfigError);
}

TEST_CASE("regularity_norm matches the dense oracle and is monotone in the cutoff") {
  const auto& o = test::oracle()["norm_t1_r1"];
  double prev = 0.0;
  for (int c : {250, 500, 1000}) {
    const double n = regularity_norm(kT1, 1.0, c);
    CHECK(test::rel_diff(n, o[std::to_string(c)].get<double>()) < 1e-10);
    CHECK(n >= prev);
    prev = n;
  }
  const auto& o04 = test::oracle()["norm_t1_r0.4"];
  CHECK(test::rel_diff(regularity_norm(kT1, 0.4, 250), o04["250"].get<double>()) < 1e-10);
  CHECK(regularity_norm(kT1.scaled(-2.0), 1.0, 100) == doctest::Approx(2.0 * regularity_norm(kT1, 1.0, 100)));
}

TEST_CASE("regularity norm of the t=1 family does not converge at r=1") {
  // ||V_1||_1 grows by about 10 ln 2 per cutoff doubling, so the cutoff-halving
  // check must report non-convergence; at r = 0.4 it converges.
  const auto& o = test::oracle()["norm_t1_r1"];
  const double inc = o["1000"].get<double>() - o["500"].get<double>();
  CHECK(inc == doctest::Approx(10.0 * std::log(2.0)).epsilon(2e-3));
  const auto e = estimate_regularity_norm(kT1, 1.0, 500);
  CHECK(!e.converged);
  CHECK(e.relative_change > 0.05);
  const auto e04 = estimate_regularity_norm(kT1, 0.4, 500);
  CHECK(e04.converged);
}

TEST_CASE("kappa") {
  const PlanewaveBasis b(1.0, 2);
  CHECK(kappa(b, 1.0, 0.0) == b.rho());
  const PlanewaveBasis unit(2.0 * pi, 1);  // rho = 1
  CHECK(unit.rho() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kappa(unit, 0.0, 0.75) == doctest::Approx(1.0 - 2.0 * 0.75).epsilon(1e-14));
  const double nv = test::oracle()["norm_t1_r1"]["2000"].get<double>();
  CHECK(test::rel_diff(kappa(b, 1.0, nv), test::oracle()["kappa_t1_M2_r1"].get<double>()) < 1e-13);
}
