#include "doctest.h"
#include "test_support.hpp"

#include "fsm/eigensolver.hpp"
#include "fsm/errors.hpp"
#include "fsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace fsm;
using std::numbers::pi;

namespace {
const FourierPotential kT1 = FourierPotential::power_law(1.0, {1.0});
const FourierPotential kZero = FourierPotential::zero(1.0);
}  // namespace

TEST_CASE("reference_solve for the free particle") {
  const auto ref = reference_solve(kZero, 20, 3);
  CHECK(ref.eigenvalues[0] == doctest::Approx(0.0));
  CHECK(ref.eigenvalues[1] == doctest::Approx(4 * pi * pi).epsilon(1e-14));
  CHECK(ref.eigenvalues[2] == doctest::Approx(4 * pi * pi).epsilon(1e-14));
  CHECK(ref.gaps[0] == doctest::Approx(4 * pi * pi).epsilon(1e-14));
  // The degenerate pair is one cluster and both vectors are kept.
  CHECK(ref.cluster(1) == std::make_pair(Eigen::Index(1), Eigen::Index(3)));
  CHECK(ref.eigenvectors.cols() == 3);
  CHECK(ref.gaps[1] == doctest::Approx(4 * pi * pi).epsilon(1e-14));
}

TEST_CASE("reference_solve with a constant potential is a shifted free spectrum") {
  const auto free = reference_solve(kZero, 15, 5);
  const auto shifted = reference_solve(FourierPotential::constant(1.0, -3.5), 15, 5);
  CHECK(((shifted.eigenvalues - free.eigenvalues).array() + 3.5).abs().maxCoeff() < 1e-11);
}

TEST_CASE("reference_solve t=1 at N_e=1000 matches the dense oracle") {
  const auto ref = reference_solve(kT1, 1000, 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(std::abs(ref.eigenvalues[k] - test::oracle()["reference_t1_Ne1000"][k].get<double>()) < 1e-8);
  }
  CHECK(ref.eigenvectors.rows() == 1999);
  CHECK_THROWS_AS(reference_solve(kT1, 3, 10), ConfigError);
}

TEST_CASE("free particle fixed points take one iteration") {
  for (int i = 1; i <= 5; ++i) {
    const auto fp = fixed_point_by_index({3, 20, 3}, kZero, i);
    RVector lap = laplacian_diagonal(PlanewaveBasis(1.0, 3));
    std::sort(lap.data(), lap.data() + lap.size());
    CHECK(fp.converged);
    CHECK(fp.scf_count == 1);
    CHECK(fp.lambda_sigma == doctest::Approx(lap[i - 1]).epsilon(1e-14));
  }
  const auto t = fixed_point_by_target({3, 20, 3}, kZero, 4 * pi * pi - 0.5);
  CHECK(t.scf_count == 1);
  CHECK(t.lambda_sigma == doctest::Approx(4 * pi * pi).epsilon(1e-14));
  // Equidistant between 0 and 4 pi^2: the smaller one wins.
  CHECK(fixed_point_by_target({3, 20, 3}, kZero, 2 * pi * pi).lambda_sigma == 0.0);
}

TEST_CASE("pure Galerkin (M = N) converges in one iteration") {
  const auto fp = fixed_point_by_index({2, 2, 4}, kT1, 1);
  CHECK(fp.scf_count == 1);
  CHECK(fp.lambda_sigma == doctest::Approx(test::oracle()["galerkin_t1_M2"][0].get<double>()).epsilon(1e-13));
}

TEST_CASE("t=1 fixed points match the independent oracle") {
  const auto& o = test::oracle()["fixed_point_t1"];
  struct Case {
    FsParams p;
    int i;
    const char* key;
  };
  for (const Case& c : {Case{{2, 500, 4}, 1, "M2_N500_K4_i1"}, Case{{2, 500, 4}, 3, "M2_N500_K4_i3"},
                        Case{{4, 500, 4}, 1, "M4_N500_K4_i1"}, Case{{2, 60, 2}, 1, "M2_N60_K2_i1"}}) {
    CAPTURE(c.key);
    const FeshbachSchurOperator op(c.p, kT1);
    const auto fp = fixed_point_by_index(op, c.i);
    CHECK(fp.converged);
    CHECK(fp.scf_count <= 50);
    CHECK(fp.scf_count == o[c.key]["scf_count"].get<int>());
    CHECK(std::abs(fp.lambda_sigma - o[c.key]["lambda_sigma"].get<double>()) < 1e-10);
    // Fixed-point consistency and residual.
    CHECK(std::abs(fp.selected_eigenvalue - fp.lambda_sigma) <= 10 * 1e-12 * std::max(1.0, std::abs(fp.lambda_sigma)));
    const double hn = spectral_norm(op.hamiltonian(fp.lambda_sigma));
    CHECK(fp.residual <= 1e-10 * (std::abs(fp.lambda_sigma) + hn));
    CHECK(fp.iterates.size() == static_cast<std::size_t>(fp.scf_count + 1));
    CHECK(std::abs(fp.iterates.back() - fp.iterates[fp.iterates.size() - 2]) < 1e-12);
    CHECK(fp.lifted.fine.head(fp.phi_sigma.size()) == fp.phi_sigma);
    CHECK(fp.phi_sigma.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("by-target seeded at the by-index answer agrees") {
  const FeshbachSchurOperator op({2, 500, 4}, kT1);
  for (int i : {1, 2, 3}) {
    const auto a = fixed_point_by_index(op, i);
    const auto b = fixed_point_by_target(op, a.lambda_sigma);
    CHECK(std::abs(a.lambda_sigma - b.lambda_sigma) <= 1e-11);
  }
  const double galerkin1 = test::oracle()["galerkin_t1_M2"][0].get<double>();
  CHECK(std::abs(fixed_point_by_target(op, galerkin1).lambda_sigma - fixed_point_by_index(op, 1).lambda_sigma) <=
        1e-11);
}

TEST_CASE("iterates with the Schur-exact interaction alternate around the fixed point") {
  // U is nonincreasing in lambda, so the fixed-point map is nonincreasing and
  // successive increments change sign; the Galerkin value is an upper bound.
  const SchurComplementOracle oracle(2, 300, kT1);
  for (int i : {1, 2, 3}) {
    const auto fp = fixed_point_by_index(oracle, i);
    CHECK(fp.converged);
    CHECK(fp.lambda_sigma <= fp.iterates.front());
    for (std::size_t k = 2; k < fp.iterates.size(); ++k) {
      const double a = fp.iterates[k] - fp.iterates[k - 1];
      const double b = fp.iterates[k - 1] - fp.iterates[k - 2];
      CHECK(a * b <= 1e-24);
    }
  }
}

TEST_CASE("non-convergence is reported, leaving the domain throws") {
  FixedPointOptions opts;
  opts.max_iter = 1;
  const auto fp = fixed_point_by_index({1, 100, 10}, kT1, 1, opts);
  CHECK(!fp.converged);
  CHECK(fp.scf_count == 1);

  FixedPointOptions high;
  high.lambda0 = 1e4;
  CHECK_THROWS_AS(fixed_point_by_index({2, 100, 2}, kT1, 1, high), DomainError);
  CHECK_THROWS_AS(fixed_point_by_index({2, 100, 2}, kT1, 4), ConfigError);
}

TEST_CASE("degenerate eigenvalues keep a continuous branch") {
  // tiny V_2 splits the +-1 pair by ~2e-9, inside the tracking tolerance
  const auto v = FourierPotential::from_coefficients(1.0, {{0, {0.0, 0.0}}, {2, {1e-9, 0.0}}});
  const FeshbachSchurOperator op({3, 30, 4}, v);
  const auto a = fixed_point_by_index(op, 2);
  const auto b = fixed_point_by_index(op, 3);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(a.lambda_sigma - 4 * pi * pi) < 1e-6);
  CHECK(std::abs(b.lambda_sigma - 4 * pi * pi) < 1e-6);
}
