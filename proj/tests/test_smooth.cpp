#include "cgmom/smooth.hpp"

#include "cgmom/problems.hpp"

#include <doctest.h>

#include "oracles.hpp"

using namespace cgmom;

TEST_CASE("quad_grad") {
  Matrix a = Vector{{1.0, 2.0}}.asDiagonal();
  Vector b(2);
  b << 3, 4;
  QuadraticProblem p(a, b);
  Vector x = Vector::Ones(2);
  Vector g = quad_grad(p, x);
  CHECK(g(0) == doctest::Approx(4.0));
  CHECK(g(1) == doctest::Approx(6.0));

  // gradient vanishes at the minimizer -A^{-1} b
  Vector x_star(2);
  x_star << -3, -2;
  CHECK(quad_grad(p, x_star).norm() < 1e-12);
}

TEST_CASE("quad_grad matches finite differences on random SPD problems") {
  Xoshiro256pp rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 8;
    QuadraticProblem p(random_spd_matrix(n, rng.next()), oracles::uniform_vector(n, rng));
    Vector x = oracles::uniform_vector(n, rng, -2, 2);
    Vector g = quad_grad(p, x);
    Vector fd = oracles::finite_difference_gradient(
        [&](const Vector& v) { return quad_objective(p, v); }, x);
    CHECK((g - fd).norm() / std::max(1.0, g.norm()) < 1e-6);
  }
}

TEST_CASE("exact_line_search") {
  Vector b(2);
  b << -1, 0;
  QuadraticProblem p(Matrix::Identity(2, 2), b);
  Vector x0 = Vector::Zero(2);
  Vector dir(2);
  dir << 1, 0;
  auto alpha = exact_line_search(p, x0, dir);
  REQUIRE(alpha.has_value());
  CHECK(*alpha == doctest::Approx(1.0));
  Vector landed = x0 + *alpha * dir;
  CHECK(quad_grad(p, landed).norm() < 1e-12);

  // direction orthogonal to the gradient: zero step
  Vector perp(2);
  perp << 0, 1;
  auto alpha2 = exact_line_search(p, x0, perp);
  REQUIRE(alpha2.has_value());
  CHECK(*alpha2 == doctest::Approx(0.0));
}

TEST_CASE("exact_line_search minimizes along the ray") {
  Xoshiro256pp rng(13);
  QuadraticProblem p(random_spd_matrix(5, 99), oracles::uniform_vector(5, rng));
  Vector x = oracles::uniform_vector(5, rng);
  Vector dir = oracles::uniform_vector(5, rng);
  auto alpha = exact_line_search(p, x, dir);
  REQUIRE(alpha.has_value());
  const double best = quad_objective(p, x + *alpha * dir);
  for (int k = 0; k < 100; ++k) {
    const double other = -5.0 + 10.0 * rng.next_double();
    CHECK(best <= quad_objective(p, x + other * dir) + 1e-12);
  }
}

TEST_CASE("momentum coefficients") {
  Vector g(2), g_prev(2), x(2);
  g << 0.6, 0.8;
  g_prev << 2, 0;
  x << 1, 1;
  auto fr = momentum_coefficient(MomentumKind::FR, g, g_prev, x);
  REQUIRE(fr.has_value());
  CHECK(*fr == doctest::Approx(0.25));

  auto pr = momentum_coefficient(MomentumKind::PR, g_prev, g_prev, x);
  REQUIRE(pr.has_value());
  CHECK(*pr == doctest::Approx(0.0));

  // DY with the printed denominator <x, dg> = 0: zero-denominator error
  Vector gc(2), gp(2), xc(2);
  gc << 0, 1;
  gp << 1, 0;
  xc << 1, 1;
  CHECK_FALSE(momentum_coefficient(MomentumKind::DY, gc, gp, xc).has_value());

  // conventional form anchored on a search direction
  Vector dir(2);
  dir << 1, 0;
  auto hs = momentum_coefficient(MomentumKind::HS, gc, gp, dir, HsDyAnchor::DirectionConventional);
  REQUIRE(hs.has_value());
  CHECK(*hs == doctest::Approx(gc.dot(gc - gp) / dir.dot(gc - gp)));
}

TEST_CASE("gd with unit step solves the identity quadratic in one iteration") {
  Vector b(2);
  b << 0.7, -0.2;
  QuadraticProblem p(Matrix::Identity(2, 2), b);
  SmoothSolverSpec spec;
  spec.algorithm = SmoothAlgorithm::GD;
  spec.step = StepMode::fixed(1.0);
  spec.max_iters = 1;
  Trace t = run_smooth(p, spec, Vector::Zero(2));
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows.back().norm < 1e-14);  // gradient norm at the minimizer
}

TEST_CASE("frgd with exact line search reproduces conjugate gradient") {
  for (std::uint64_t seed : {1ull, 2ull}) {
    const Index n = 10;
    Matrix a = random_spd_matrix(n, seed);
    Vector b = gaussian_vector(n, derive_seed(seed, kRhsStream));
    QuadraticProblem p(a, b);

    SmoothSolverSpec spec;
    spec.algorithm = SmoothAlgorithm::FRGD;
    spec.step = StepMode::exact_line_search();
    spec.max_iters = n;
    spec.stop_tol = 1e-13;
    std::vector<Vector> iterates;
    Trace t = run_smooth(p, spec, Vector::Zero(n), &iterates);

    auto cg = oracles::conjugate_gradient(a, b, Vector::Zero(n), n, 1e-13);
    const std::size_t shared = std::min(iterates.size(), cg.size());
    REQUIRE(shared >= 2);
    for (std::size_t k = 0; k < shared; ++k) {
      CHECK((iterates[k] - cg[k]).norm() <= 1e-8 * std::max(1.0, cg[k].norm()));
    }

    // finite termination and mutually orthogonal residuals
    double min_grad = std::numeric_limits<double>::infinity();
    for (const auto& row : t.rows) min_grad = std::min(min_grad, row.norm);
    CHECK(min_grad <= 1e-8);
    for (std::size_t i = 0; i + 1 < shared; ++i) {
      Vector ri = a * iterates[i] + b;
      for (std::size_t j = i + 1; j < shared; ++j) {
        Vector rj = a * iterates[j] + b;
        if (ri.norm() > 1e-8 && rj.norm() > 1e-8) {
          CHECK(std::abs(ri.dot(rj)) / (ri.norm() * rj.norm()) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("line-search runs stop cleanly once the direction degenerates") {
  Vector b(2);
  b << 0.4, -1.1;
  QuadraticProblem p(Matrix::Identity(2, 2), b);
  SmoothSolverSpec spec;
  spec.algorithm = SmoothAlgorithm::SD;
  spec.step = StepMode::exact_line_search();
  spec.max_iters = 10;
  Trace t = run_smooth(p, spec, Vector::Zero(2));
  CHECK(t.has_flag(flag::kDegenerateDirection));
  CHECK(t.rows.back().norm < 1e-14);
  long prev = -1;
  for (const auto& row : t.rows) {
    CHECK(row.iter > prev);
    prev = row.iter;
  }
}

TEST_CASE("steepest descent is monotone on SPD problems") {
  QuadraticProblem p(random_spd_matrix(12, 5), gaussian_vector(12, 55));
  SmoothSolverSpec spec;
  spec.algorithm = SmoothAlgorithm::SD;
  spec.step = StepMode::exact_line_search();
  spec.max_iters = 60;
  Trace t = run_smooth(p, spec, Vector::Zero(12));
  for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
    CHECK(t.rows[i + 1].objective <= t.rows[i].objective + 1e-14);
  }
}

TEST_CASE("frgd leads the fixed-step field on the laplacian benchmark by iteration 1000") {
  const QuadraticProblem p = laplacian_quadratic(500);
  auto final_grad = [&](SmoothAlgorithm alg) {
    SmoothSolverSpec spec;
    spec.algorithm = alg;
    spec.step = StepMode::fixed(0.3);
    spec.max_iters = 1000;
    spec.record_every = 1000;
    return run_smooth(p, spec, Vector::Zero(500)).rows.back().norm;
  };
  const double frgd = final_grad(SmoothAlgorithm::FRGD);
  const double nag = final_grad(SmoothAlgorithm::NAG);
  const double gdm = final_grad(SmoothAlgorithm::GDM);
  const double gd = final_grad(SmoothAlgorithm::GD);
  CHECK(frgd < nag);
  CHECK(frgd < gdm);
  CHECK(frgd < gd);
}

TEST_CASE("nag t-sequence satisfies t'(t'-1) = t^2") {
  double t = 1.0;
  for (int k = 0; k < 50; ++k) {
    const double t_next = (1.0 + std::sqrt(4.0 * t * t + 1.0)) / 2.0;
    CHECK(t_next * (t_next - 1.0) == doctest::Approx(t * t).epsilon(1e-12));
    t = t_next;
  }
}

TEST_CASE("spec validation") {
  SmoothSolverSpec bad;
  bad.algorithm = SmoothAlgorithm::SD;
  bad.step = StepMode::fixed(0.1);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  SmoothSolverSpec neg;
  neg.step = StepMode::fixed(-1.0);
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}

TEST_CASE("convergence-bound report basics") {
  // l = 0 row holds trivially: rhs = 2 ||r0||
  QuadraticProblem p(random_spd_matrix(6, 3), gaussian_vector(6, 33));
  std::vector<Vector> only_start{Vector::Zero(6)};
  BoundReport report = verify_convergence_bound(p, only_start, 0.1);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].holds);
  CHECK(report.rows[0].rhs == doctest::Approx(2.0 * report.rows[0].lhs));

  // geometric factor for diag(1,4): (sqrt(4)-1)/(sqrt(4)+1) = 1/3
  Matrix d = Vector{{1.0, 4.0}}.asDiagonal();
  QuadraticProblem pd(d, Vector::Ones(2));
  BoundReport rd = verify_convergence_bound(pd, {Vector::Zero(2)}, 0.25);
  CHECK(rd.kappa_A == doctest::Approx(4.0));
  // a singular matrix is refused
  Matrix sing = Vector{{1.0, 0.0}}.asDiagonal();
  CHECK_THROWS_AS(verify_convergence_bound(QuadraticProblem(sing, Vector::Ones(2)), {Vector::Zero(2)}, 0.1),
                  std::invalid_argument);
}

TEST_CASE("fixed-step FRGD residual bound holds along recorded runs") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Matrix a = random_spd_matrix(50, seed);
    Vector b = gaussian_vector(50, derive_seed(seed, kRhsStream));
    QuadraticProblem p(a, b);
    const double alpha = 1.0 / svd_spectrum(a).spectral_norm();

    SmoothSolverSpec spec;
    spec.algorithm = SmoothAlgorithm::FRGD;
    spec.step = StepMode::fixed(alpha);
    spec.max_iters = 30;
    std::vector<Vector> iterates;
    run_smooth(p, spec, Vector::Zero(50), &iterates);

    BoundReport report = verify_convergence_bound(p, iterates, alpha);
    CHECK(report.rows.size() >= 2);
    CHECK(report.all_hold());
  }
}
