#include "doctest.h"

#include <cmath>

#include "sparsedom/kernels.hpp"
#include "sparsedom/lattice.hpp"
#include "sparsedom/operators.hpp"

using namespace sparsedom;

TEST_CASE("dini integral of the linear modulus") {
  CHECK(dini_norm([](double t) { return t; }) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("dini integral of the square-root modulus") {
  CHECK(dini_norm([](double t) { return std::sqrt(t); }) ==
        doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("log modulus diverges") {
  CHECK_THROWS_AS(dini_norm([](double t) {
                    return t <= 0.0 ? 0.0 : 1.0 / (1.0 - std::log(t));
                  }),
                  DiniDivergenceError);
}

TEST_CASE("dini integral of the log-square modulus") {
  // closed form: the log-square branch contributes 1/3, the tangent branch
  // (2e^2/27)(1 - e^-2) + 2/27
  const double exact = 1.0 / 3.0 +
                       2.0 * std::exp(2.0) / 27.0 * (1.0 - std::exp(-2.0)) +
                       2.0 / 27.0;
  const auto om = builtin_kernel("logdini").omega;
  CHECK(dini_norm(om) == doctest::Approx(exact).epsilon(1e-4));
}

TEST_CASE("dini norm is additive") {
  const auto o1 = [](double t) { return t; };
  const auto o2 = [](double t) { return std::sqrt(t); };
  const double sum = dini_norm([&](double t) { return o1(t) + o2(t); });
  CHECK(std::abs(sum - dini_norm(o1) - dini_norm(o2)) <= 1e-9);
}

TEST_CASE("builtin kernels pass their own audits") {
  const Window w(Cube::interval(0, 256, 8));
  for (const auto& name : builtin_kernel_names()) {
    const KernelSpec k = builtin_kernel(name);
    const auto rep = audit_kernel(k, w, 0xabcdef, 4000);
    INFO("kernel ", name, " worst size ", rep.worst_size_ratio, " worst smooth ",
         rep.worst_smooth_ratio);
    CHECK(rep.ok);
    CHECK(rep.size_checked > 1000);
  }
}

TEST_CASE("a dishonest modulus fails the audit") {
  KernelSpec k = builtin_kernel("hilbert");
  k.omega = [](double t) { return 0.5 * t; };  // too small for 1/(x-y)
  const Window w(Cube::interval(0, 256, 8));
  const auto rep = audit_kernel(k, w, 0xabcdef, 4000);
  CHECK(!rep.ok);
  CHECK(rep.smooth_violations > 0);
}

TEST_CASE("unknown kernels are rejected") {
  CHECK_THROWS_AS(builtin_kernel("laplace"), ConfigError);
}
