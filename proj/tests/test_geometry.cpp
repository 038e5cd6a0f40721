#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hiphome/errors.hpp"
#include "hiphome/geometry.hpp"

using namespace hiphome;

TEST_CASE("domain construction validates its ranges") {
  CHECK_THROWS_AS(make_domain(0.0, 0.1, 0.1), ArgumentError);
  CHECK_THROWS_AS(make_domain(-1.0, 0.1, 0.1), ArgumentError);
  CHECK_THROWS_AS(make_domain(2.0, 0.0, 0.1), ArgumentError);
  CHECK_THROWS_AS(make_domain(2.0, 2.0, 0.1), ArgumentError);   // width must stay below length
  CHECK_THROWS_AS(make_domain(2.0, 0.2, 0.0), ArgumentError);
  CHECK_THROWS_AS(make_domain(2.0, 0.2, 1.0), ArgumentError);
  ChannelDomain dom = make_domain(2.0, 0.2, 0.2);
  CHECK(dom.length == 2.0);
  CHECK(dom.width == 0.2);
  CHECK(dom.epsilon == 0.2);
}

TEST_CASE("two-argument factory defaults epsilon to the aspect ratio") {
  ChannelDomain dom = make_domain(2.0, 0.2);
  CHECK(dom.epsilon == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("rescaled half width follows Y = l / (2 epsilon)") {
  CHECK(make_domain(2.0, 0.2, 0.2).half_width_rescaled() == doctest::Approx(0.5));
  CHECK(make_domain(2.0, 0.4, 0.2).half_width_rescaled() == doctest::Approx(1.0));
}

TEST_CASE("fibre maps are affine bijections onto [0, 1]") {
  ChannelDomain dom = make_domain(2.0, 0.4, 0.2);
  CHECK(fibre_map_psi(dom, -0.2) == doctest::Approx(0.0));
  CHECK(fibre_map_psi(dom, 0.2) == doctest::Approx(1.0));
  CHECK(fibre_map_psi(dom, 0.0) == doctest::Approx(0.5));
  const double Y = dom.half_width_rescaled();
  CHECK(fibre_map_theta(dom, -Y) == doctest::Approx(0.0));
  CHECK(fibre_map_theta(dom, Y) == doctest::Approx(1.0));
  for (double z = -0.2; z <= 0.2; z += 0.04) {
    CHECK(fibre_map_psi_inverse(dom, fibre_map_psi(dom, z)) == doctest::Approx(z).epsilon(1e-14));
    // The rescaled map agrees with the physical one under y = z / epsilon.
    CHECK(fibre_map_theta(dom, z / dom.epsilon) ==
          doctest::Approx(fibre_map_psi(dom, z)).epsilon(1e-14));
  }
  for (double zhat = 0.0; zhat <= 1.0; zhat += 0.125)
    CHECK(fibre_map_theta(dom, fibre_map_theta_inverse(dom, zhat)) ==
          doctest::Approx(zhat).epsilon(1e-14));
}

TEST_CASE("problem data carries the epsilon-scaled diffusion") {
  ChannelDomain dom = make_domain(2.0, 0.2, 0.2);
  ProblemData pb = make_problem(dom, 1.0, 1.0, 0.0, 1.0);
  CHECK(pb.diffusion == 1.0);
  CHECK(pb.diffusion_eff == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(pb.reaction == 1.0);
  CHECK(pb.inlet_value == 1.0);
  CHECK(pb.initial_value == 0.0);
  // Global Peclet: u_mean L / (2 D_eps).
  CHECK(pb.peclet(10.0, dom.length) == doctest::Approx(50.0).epsilon(1e-14));
}

TEST_CASE("problem data validates signs") {
  ChannelDomain dom = make_domain(2.0, 0.2, 0.2);
  CHECK_THROWS_AS(make_problem(dom, 0.0, 1.0, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(make_problem(dom, -1.0, 1.0, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(make_problem(dom, 1.0, -0.5, 0.0, 1.0), ArgumentError);
}
