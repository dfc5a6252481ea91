// Copyright 2026 The CondGrad Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#include <doctest.h>

#include "condgrad/certificates.hpp"
#include "condgrad/solvers.hpp"

using namespace condgrad;

namespace {

Eigen::Vector2d vec2(double a, double b) { return Eigen::Vector2d(a, b); }

}  // namespace

TEST_CASE("certificate initialization") {
  const Certificate a = cert_init(0.693147);
  CHECK(a.lambda == 1.0);
  CHECK(a.V == 0.693147);
  CHECK(a.phi_star == 0.693147);
  CHECK(gap_bound(a, 0.693147) == std::numeric_limits<double>::infinity());

  const Certificate b = cert_init(0.0);
  CHECK(b.V == 0.0);
  CHECK(b.phi_star == 0.0);
}

TEST_CASE("lambda after one momentum update") {
  Certificate cert = cert_init(1.0);
  cert_update(cert, momentum_delta(0), 0.0, 0.0, 0.0);
  CHECK(cert.lambda == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("first prediction-correction step on the shifted quadratic") {
  // f(x) = 0.5 ||x - (2,0)||^2 from x0 = 0: f0 = 2, x1 = (2/3, 0),
  // f(x1) = 8/9, grad(x1) = (-4/3, 0), g1 = (-8/9, 0), v1 = (1, 0).
  Certificate cert = cert_init(2.0);
  cert_update(cert, 2.0 / 3.0, 8.0 / 9.0, vec2(-4.0 / 3.0, 0), vec2(2.0 / 3.0, 0),
              vec2(-8.0 / 9.0, 0), vec2(1, 0));
  CHECK(cert.V == doctest::Approx(50.0 / 27.0).epsilon(1e-14));
  CHECK(cert.phi_star == doctest::Approx(26.0 / 27.0).epsilon(1e-14));
  CHECK(cert.lambda == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("constant objective keeps V and phi_star pinned") {
  const double value = 4.25;
  Certificate cert = cert_init(value);
  for (int k = 0; k < 50; ++k) {
    cert_update(cert, momentum_delta(k), value, 0.0, 0.0);
    CHECK(cert.V == doctest::Approx(value).epsilon(1e-14));
    CHECK(cert.phi_star == doctest::Approx(value).epsilon(1e-14));
  }
}

TEST_CASE("lambda recursion matches its closed form for ten thousand steps") {
  Certificate cert = cert_init(0.0);
  for (int k = 0; k < 10000; ++k) {
    cert_update(cert, momentum_delta(k), 0.0, 0.0, 0.0);
    const double closed = 2.0 / (static_cast<double>(k + 2) * static_cast<double>(k + 3));
    CHECK(std::abs(cert.lambda - closed) <= 1e-12 * cert.lambda);
    CHECK(cert.lambda > 0.0);
    CHECK(cert.lambda < 1.0);
  }
}

TEST_CASE("duality gap on documented points") {
  CHECK(fw_duality_gap(vec2(-2, 0), vec2(0, 0), vec2(1, 0)) == doctest::Approx(2.0));
  CHECK(fw_duality_gap(vec2(0, 0), vec2(0.3, 0.4), vec2(-1, 0)) == 0.0);
  // At the constrained optimum the oracle returns the iterate itself.
  CHECK(fw_duality_gap(vec2(-1, 0), vec2(1, 0), vec2(1, 0)) == 0.0);
}

TEST_CASE("xi recursion accumulates the scaled squared steps") {
  XiRecursion xi;
  CHECK(xi.value == 0.0);
  xi.update(momentum_delta(0), 1.0, 2.0);  // (1/3)*0 + 6*(2/3)^2
  CHECK(xi.value == doctest::Approx(6.0 * 4.0 / 9.0).epsilon(1e-15));
  double expected = xi.value;
  for (int k = 1; k < 100; ++k) {
    const double delta = momentum_delta(k);
    expected = (1.0 - delta) * expected + 1.5 * 1.0 * 4.0 * delta * delta;
    xi.update(delta, 1.0, 2.0);
    CHECK(xi.value == doctest::Approx(expected).epsilon(1e-15));
  }
  // The closed-form envelope 6 L D^2 / (k + 2) dominates the recursion.
  XiRecursion envelope;
  for (int k = 0; k < 1000; ++k) {
    envelope.update(momentum_delta(k), 1.0, 2.0);
    CHECK(envelope.value <= 6.0 * 4.0 / static_cast<double>(k + 3) + 1e-12);
  }
}
