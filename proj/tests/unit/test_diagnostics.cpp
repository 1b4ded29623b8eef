#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "dense_oracle.hpp"
#include "sbppml/diagnostics.hpp"
#include "sbppml/scenario.hpp"

using namespace sbppml;
using Catch::Approx;

namespace {

Discretization square(std::size_t n, int order, double x0, double delta, double d0,
                      PenaltyParams p = {2.0, 2.0, 0.0, 0.0}) {
  const double half = x0 + delta;
  const auto g = Grid2D::from_counts(-half, half, n, -half, half, n);
  return Discretization(g, order, DampingProfile::make(g, x0, delta, d0), {}, p);
}

double sq(const Eigen::VectorXd& v, const Eigen::MatrixXd& w) { return v.dot(w * v); }

}  // namespace

TEST_CASE("norms of simple states") {
  const auto g = Grid2D::from_counts(0.0, 1.0, 9, 0.0, 1.0, 9);
  const Discretization d(g, 4, DampingProfile::none(g), {}, PenaltyParams::universal());
  auto z = FieldState::zeros(FieldModel::ModalUnsplit, 9, 9);
  const auto n0 = discrete_l2_norms(z, d.px(), d.py());
  CHECK(n0.ez == 0.0);
  CHECK(n0.hy == 0.0);
  CHECK(n0.hx == 0.0);
  CHECK(n0.aux == 0.0);
  z.ez.values.assign(81, 1.0);
  CHECK(discrete_l2_norms(z, d.px(), d.py()).ez == Approx(1.0).margin(1e-12));
}

TEST_CASE("norms match the dense oracle and use the total split field") {
  std::mt19937_64 rng(12);
  const auto d = square(8, 2, 1.0, 1.0, 1.0);
  const oracle::Blocks b(d);
  const auto s = oracle::random_state(FieldModel::SplitField, 8, 8, rng);
  const auto n = discrete_l2_norms(s, d.px(), d.py());
  CHECK(n.ez == Approx(std::sqrt(sq(oracle::to_vec(s.total_ez()), b.pxy))).margin(1e-13));
  CHECK(n.hy == Approx(std::sqrt(sq(oracle::to_vec(s.hy), b.pxy))).margin(1e-13));
  CHECK(n.aux == Approx(std::sqrt(sq(oracle::to_vec(*s.aux), b.pxy))).margin(1e-13));
}

TEST_CASE("modal energy") {
  std::mt19937_64 rng(19);
  const auto d = square(9, 4, 2.0, 2.0, 1.3);
  const oracle::Blocks b(d);
  SECTION("zero state") {
    const auto z = FieldState::zeros(FieldModel::ModalUnsplit, 9, 9);
    CHECK(modal_energy(z, z.ez, d, 1.0, 0.0) == 0.0);
  }
  SECTION("undamped energy is the standard one") {
    const auto d0 = square(9, 4, 2.0, 2.0, 0.0);
    const auto u = oracle::random_state(FieldModel::ModalUnsplit, 9, 9, rng);
    const auto r = evaluate_rhs({ModelKind::ModalUnsplit, 1.0}, u, d0, 0.0);
    const Eigen::VectorXd e = oracle::to_vec(u.ez);
    const double ref = sq(oracle::to_vec(r.ez), b.pxy) + sq(b.dx * e, b.pxy) + sq(b.dy * e, b.pxy);
    CHECK(modal_energy(u, r.ez, d0, 1.0, 0.25) == Approx(ref + 0.25).epsilon(1e-13));
  }
  SECTION("dense oracle with damping") {
    const auto u = oracle::random_state(FieldModel::ModalUnsplit, 9, 9, rng);
    const auto r = evaluate_rhs({ModelKind::ModalUnsplit, 1.0}, u, d, 0.0);
    const Eigen::VectorXd e = oracle::to_vec(u.ez);
    const Eigen::VectorXd hy = oracle::to_vec(u.hy);
    const Eigen::VectorXd hx = oracle::to_vec(u.hx);
    Eigen::MatrixXd wall = Eigen::MatrixXd::Zero(b.n, b.n);
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t j : {std::size_t{0}, std::size_t{8}}) {
        const auto k = static_cast<Eigen::Index>(i * 9 + j);
        wall(k, k) = d.px()[i] * d.sigma()[i];
      }
    }
    const double ref = sq(oracle::to_vec(r.ez), b.pxy) + sq(b.dx * e + b.sigma * hy, b.pxy) +
                       sq(b.dy * e + b.sigma * hx, b.pxy) + sq(b.sigma * hy, b.pxy) +
                       sq(b.sigma * hx, b.pxy) + 0.7 * sq(e, wall);
    CHECK(modal_energy(u, r.ez, d, 0.7, 0.0) == Approx(ref).epsilon(1e-13));
  }
  SECTION("gradient term vanishes for a balanced static state") {
    const auto g = Grid2D::from_counts(0.0, 1.0, 9, 0.0, 1.0, 9);
    DampingProfile prof = DampingProfile::none(g);
    for (std::size_t i = 0; i < 9; ++i) prof.sigma_values[i] = 0.5 + 0.1 * static_cast<double>(i);
    const Discretization dd(g, 4, prof, {}, {2.0, 2.0, 0.0, 0.0});
    const oracle::Blocks bb(dd);
    auto u = oracle::random_state(FieldModel::ModalUnsplit, 9, 9, rng);
    const auto gx = apply_derivative(dd.ox, u.ez, Axis::X);
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t j = 0; j < 9; ++j) u.hy(i, j) = -gx(i, j) / prof.sigma_values[i];
    }
    const auto r = evaluate_rhs({ModelKind::ModalUnsplit, 0.0}, u, dd, 0.0);
    const Eigen::VectorXd e = oracle::to_vec(u.ez);
    const Eigen::VectorXd hx = oracle::to_vec(u.hx);
    const Eigen::VectorXd hy = oracle::to_vec(u.hy);
    const double without_gx = sq(oracle::to_vec(r.ez), bb.pxy) +
                              sq(bb.dy * e + bb.sigma * hx, bb.pxy) + sq(bb.sigma * hy, bb.pxy) +
                              sq(bb.sigma * hx, bb.pxy);
    CHECK(modal_energy(u, r.ez, dd, 0.0, 0.0) == Approx(without_gx).epsilon(1e-12));
  }
}

TEST_CASE("physical energy") {
  std::mt19937_64 rng(23);
  const auto d = square(8, 2, 1.0, 1.0, 0.8);
  const oracle::Blocks b(d);
  const auto z = FieldState::zeros(FieldModel::PhysicallyMotivated, 8, 8);
  CHECK(phys_energy(z, d.px(), d.py(), 0.0) == 0.0);
  const auto u = oracle::random_state(FieldModel::PhysicallyMotivated, 8, 8, rng);
  double ref = 0.0;
  for (std::size_t c = 0; c < 4; ++c) ref += sq(oracle::to_vec(u.component(c)), b.pxy);
  CHECK(phys_energy(u, d.px(), d.py(), 0.5) == Approx(ref + 0.5).epsilon(1e-13));
  const auto v = oracle::random_state(FieldModel::Interior, 8, 8, rng);
  double vi = 0.0;
  for (std::size_t c = 0; c < 3; ++c) vi += sq(oracle::to_vec(v.component(c)), b.pxy);
  CHECK(phys_energy(v, d.px(), d.py(), 0.0) == Approx(vi).epsilon(1e-13));
}

TEST_CASE("growth bound examples") {
  const std::vector<double> t{0.0, 0.1, 0.2, 0.3, 0.4};
  SECTION("constant history") {
    const std::vector<double> e(5, 3.0);
    CHECK(growth_bound_check(t, e, 0.0).pass);
  }
  SECTION("saturated bound") {
    const double s = 0.7;
    std::vector<double> e;
    for (double ti : t) e.push_back(std::exp(2.0 * s * ti));
    const auto v = growth_bound_check(t, e, s);
    CHECK(v.pass);
    CHECK(v.worst_ratio == Approx(1.0).epsilon(1e-12));
  }
  SECTION("one violating jump") {
    const double s = 0.7;
    std::vector<double> e;
    for (double ti : t) e.push_back(std::exp(2.0 * s * ti));
    for (std::size_t k = 3; k < 5; ++k) e[k] *= 1.5 * 1.5;
    const auto v = growth_bound_check(t, e, s);
    CHECK_FALSE(v.pass);
    REQUIRE(v.first_violation);
    CHECK(*v.first_violation == 3);
    CHECK(v.worst_ratio == Approx(1.5).epsilon(1e-12));
  }
}

TEST_CASE("energy history csv and validation") {
  EnergyHistory h;
  h.append(0.0, {1.0, 2.0, 3.0, 0.0}, 14.0);
  h.append(0.5, {0.1, 0.2, 0.3, 0.0}, 0.14);
  CHECK_NOTHROW(h.validate());
  std::ostringstream os;
  h.write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("t,ez_norm,hy_norm,hx_norm,aux_norm,energy\n", 0) == 0);
  CHECK(s.find("0.14000000000000001") != std::string::npos);
  h.append(0.5, {}, 0.0);
  CHECK_THROWS(h.validate());
}

TEST_CASE("assembled matrix reproduces the operator") {
  std::mt19937_64 rng(29);
  const auto d = square(7, 2, 1.0, 1.0, 1.1, {0.8, 1.2, 0.5, 0.9});
  for (const ModelSpec spec : {ModelSpec{ModelKind::Interior, 0.0}, ModelSpec{ModelKind::ModalUnsplit, 1.0},
                               ModelSpec{ModelKind::PhysicallyMotivated, 0.0},
                               ModelSpec{ModelKind::SplitFieldStable, 0.0}}) {
    const Eigen::MatrixXd a = assemble_semidiscrete_matrix(spec, d);
    const Eigen::MatrixXd ref = oracle::model_matrix(spec, d);
    CHECK((a - ref).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + ref.cwiseAbs().maxCoeff()));
    const auto u = oracle::random_state(field_model(spec.kind), 7, 7, rng);
    const Eigen::VectorXd r = oracle::flat(evaluate_rhs(spec, u, d, 0.0));
    CHECK((a * oracle::flat(u) - r).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + r.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("undamped operator without penalties is the pure difference operator") {
  const auto d = square(9, 4, 2.0, 1.0, 0.0, {0.0, 0.0, 0.0, 0.0});
  const oracle::Blocks b(d);
  const Eigen::MatrixXd a = assemble_semidiscrete_matrix({ModelKind::Interior, 0.0}, d);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(3 * b.n, 3 * b.n);
  ref.block(0, b.n, b.n, b.n) = -b.dx;
  ref.block(0, 2 * b.n, b.n, b.n) = b.dy;
  ref.block(b.n, 0, b.n, b.n) = -b.dx;
  ref.block(2 * b.n, 0, b.n, b.n) = b.dy;
  CHECK((a - ref).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("assembly size guard") {
  const auto d = square(9, 2, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(assemble_semidiscrete_matrix({ModelKind::Interior, 0.0}, d, 100), std::length_error);
}

TEST_CASE("interior energy never increases for valid penalties") {
  std::mt19937_64 rng(37);
  const auto d = square(11, 4, 3.0, 2.0, 0.0);
  for (int t = 0; t < 100; ++t) {
    const auto u = oracle::random_state(FieldModel::Interior, 11, 11, rng);
    const auto r = evaluate_rhs({ModelKind::Interior, 0.0}, u, d, 0.0);
    double rate = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      rate += 2.0 * weighted_inner_product(u.component(c), r.component(c), d.px(), d.py());
    }
    CHECK(rate <= 1e-12);
  }
}

TEST_CASE("stabilized layers have no growing modes on small grids") {
  const double d0 = damping_coefficient(10.0, 1e-4);
  for (std::size_t n : {std::size_t{9}, std::size_t{11}, std::size_t{13}}) {
    for (int order : {2, 4, 6}) {
      if (n < SbpOperator1D::min_points(order)) continue;
      const auto d = square(n, order, 3.0, 2.0, d0);
      const auto modal = spectrum_summary(assemble_semidiscrete_matrix({ModelKind::ModalUnsplit, 1.0}, d));
      INFO("n " << n << " order " << order);
      CHECK(modal.max_real <= 1e-8);
      const auto du = square(n, order, 3.0, 2.0, d0, PenaltyParams::universal());
      const auto phys =
          spectrum_summary(assemble_semidiscrete_matrix({ModelKind::PhysicallyMotivated, 0.0}, du));
      CHECK(phys.max_real <= 1e-8);
    }
  }
}

TEST_CASE("unit penalties keep the spectral radius of the interior operator") {
  const auto cfg = ScenarioConfig::preset("cavity-small");
  const Grid2D g = cfg.grid();
  const DampingProfile prof = DampingProfile::make(g, cfg.x0, cfg.delta, damping_coefficient(10.0, 1e-4));
  const PenaltyParams matching{2.0, 2.0, 0.0, 0.0};
  auto radius = [](ModelKind k, const Discretization& d) {
    return spectrum_summary(assemble_semidiscrete_matrix({k, 0.0}, d)).spectral_radius;
  };
  for (int order : {4, 6}) {
    const double r0 = radius(ModelKind::Interior, Discretization(g, order, DampingProfile::none(g), {}, matching));
    const double ru =
        radius(ModelKind::PhysicallyMotivated, Discretization(g, order, prof, {}, PenaltyParams::universal()));
    const double rm = radius(ModelKind::PhysicallyMotivated, Discretization(g, order, prof, {}, matching));
    INFO("order " << order << " interior " << r0 << " unit " << ru << " matching " << rm);
    CHECK(ru <= 1.05 * r0);
    CHECK(rm > 1.05 * r0);
    CHECK(rm > ru);
  }
}

TEST_CASE("stabilized modal energy obeys the growth bound") {
  ScenarioConfig cfg = ScenarioConfig::preset("cavity-small");
  cfg.model = {ModelKind::ModalUnsplit, 1.0};
  cfg.t_final = 40.0;
  const auto out = simulate(cfg);
  REQUIRE_FALSE(out.blowup_step);
  const auto v = growth_bound_check(out.history, cfg.discretization().profile.max_sigma(), 1e-8);
  CHECK(v.pass);
}
