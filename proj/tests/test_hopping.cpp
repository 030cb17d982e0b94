#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "maghop/frozen.hpp"
#include "maghop/hopping.hpp"
#include "maghop/radial.hpp"
#include "oracles.hpp"

using namespace maghop;

namespace {

ModelConfig make_config(double lambda, double depth, double a, double dist) {
    ModelConfig c;
    c.lambda = lambda;
    c.well.depth = depth;
    c.well.radius = a;
    c.separation = dist;
    return c;
}

GroundState solve_ref(double lambda, double dist = 2.0) {
    return solve_ground_state(make_config(lambda, -2.0, 0.5, dist));
}

} // namespace

TEST_CASE("kernel r->0 limit: L(r) ~ 2 pi r phi_out(dist)") {
    auto gs = solve_ref(10.0);
    const double dist = 2.0;
    const double phi_d = evaluate_phi_out(gs, dist);
    const double r = 1e-5;
    CHECK(kernel_bessel(gs, dist, r) / (2.0 * oracle::pi * r) ==
          doctest::Approx(phi_d).epsilon(1e-5));
    // the kernel itself vanishes linearly with r
    CHECK(kernel_bessel(gs, dist, r) < 1e-4 * kernel_bessel(gs, dist, 0.25));
    // angular route has the same limit (constant integrand times r)
    CHECK(kernel_oscillatory(gs, dist, r) / (2.0 * oracle::pi * r) ==
          doctest::Approx(phi_d).epsilon(1e-5));
}

TEST_CASE("kernel positivity and cross-route agreement on a 5x5 grid") {
    auto gs = solve_ref(10.0);
    for (double dist : {1.5, 2.0, 2.5, 3.0, 3.5}) {
        for (double r : {0.1, 0.2, 0.3, 0.4, 0.5}) {
            KernelSample s;
            s.r = r;
            s.L_value = kernel_bessel(gs, dist, r);
            auto osc = kernel_oscillatory_full(gs, dist, r);
            s.L_oscillatory = osc.value;
            CHECK(s.L_value > 0.0);
            CHECK(std::abs(s.L_value - s.L_oscillatory) <= 1e-6 * s.L_value);
            CHECK(std::abs(osc.imag) <= 1e-9 * std::abs(osc.value));
        }
    }
}

TEST_CASE("kernel reference point dist=2 r=0.25") {
    auto gs = solve_ref(10.0);
    const double b = kernel_bessel(gs, 2.0, 0.25);
    const double o = kernel_oscillatory(gs, 2.0, 0.25);
    CHECK(std::abs(b - o) <= 1e-6 * b);
}

TEST_CASE("oscillatory kernel is deterministic and self-converged") {
    auto gs = solve_ref(10.0);
    auto k1 = kernel_oscillatory_full(gs, 2.0, 0.4);
    auto k2 = kernel_oscillatory_full(gs, 2.0, 0.4);
    CHECK(k1.value == k2.value);
    CHECK(k1.imag == k2.imag);
}

TEST_CASE("three hopping routes agree at lambda in {6, 10}") {
    for (double lambda : {6.0, 10.0}) {
        auto gs = solve_ref(lambda);
        auto h = hopping_all_routes(gs, 2.0);
        CHECK(h.direct_converged);
        CHECK(h.angular_converged);
        CHECK(h.bessel_converged);
        const double mag = std::abs(h.rho_bessel);
        CHECK(h.rho_bessel < 0.0); // phi>0, v<=0, L>0
        CHECK(std::abs(h.rho_angular - h.rho_bessel) <= 1e-4 * mag);
        CHECK(std::abs(h.rho_direct.real() - h.rho_bessel) <= 1e-4 * mag);
        CHECK(std::abs(h.rho_direct.imag()) <= 1e-8 * mag);
        // log form consistent with the plain double
        CHECK(h.rho_bessel_log.value() ==
              doctest::Approx(h.rho_bessel).epsilon(1e-12));
        CHECK(h.rho_bessel_log.sign < 0);
    }
}

TEST_CASE("depth=0: every route returns zero") {
    auto gs = solve_ground_state(make_config(10.0, 0.0, 0.5, 2.0));
    auto h = hopping_all_routes(gs, 2.0);
    CHECK(h.rho_bessel == 0.0);
    CHECK(h.rho_angular == 0.0);
    CHECK(h.rho_direct == std::complex<double>(0.0, 0.0));
    CHECK(h.rho_bessel_log.sign == 0);
}

TEST_CASE("hopping bound sandwich across lambda in {8,12,16,20}") {
    for (double lambda : {8.0, 12.0, 16.0, 20.0}) {
        auto gs = solve_ref(lambda);
        auto h = hopping_all_routes(gs, 2.0);
        const double log_rho = h.rho_bessel_log.log_magnitude;
        // frozen-prefactor envelopes with the committed x10-style margins
        CHECK(h.lower_bound_log <= log_rho);
        CHECK(log_rho <= h.upper_bound_log);
        // exponent gap between envelopes is strictly positive
        CHECK(h.upper_bound_log > h.lower_bound_log);
    }
}

TEST_CASE("exponent-rate sandwich with (c log lambda)/lambda slack") {
    const double a = 0.5, dist = 2.0;
    const double slack_c = 8.0; // frozen
    for (double lambda : {8.0, 12.0, 16.0, 20.0}) {
        auto gs = solve_ref(lambda);
        auto h = hopping_all_routes(gs, 2.0);
        const double rate =
            -4.0 / lambda * h.rho_bessel_log.log_magnitude;
        const double s = slack_c * std::log(lambda) / lambda;
        const double lo = (dist - a) * (dist - a) - a * a - s;
        const double hi = dist * dist + 4.0 * std::sqrt(2.0 * gs.nu) * dist +
                          a * a + s;
        CHECK(rate >= lo);
        CHECK(rate <= hi);
        if (lambda == 20.0) {
            // plain (slack-free) rate form at the largest grid point
            CHECK(-h.rho_bessel_log.log_magnitude / lambda >=
                  ((dist - a) * (dist - a) - a * a) / 4.0);
            CHECK(-h.rho_bessel_log.log_magnitude / lambda <=
                  (dist * dist + 4.0 * std::sqrt(2.0 * gs.nu) * dist + a * a) /
                      4.0);
        }
    }
}

TEST_CASE("gamma0_effective is lambda-stable") {
    auto ref = hopping_all_routes(solve_ref(10.0), 2.0);
    for (double lambda : {8.0, 12.0, 16.0, 20.0}) {
        auto h = hopping_all_routes(solve_ref(lambda), 2.0);
        CHECK(std::abs(h.gamma0_effective - ref.gamma0_effective) <= 0.2);
    }
}

TEST_CASE("ratio factorization: identity case x=1") {
    auto gs = solve_ref(10.0);
    auto rep = hopping_ratio_check(gs, 2.0, 1.0);
    CHECK(rep.log_ratio == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.log_bound >= 0.0); // requires committed K* >= 1 (with window)
    CHECK(rep.within_bound);
    CHECK(rep.kernel_monotone);
}

TEST_CASE("ratio factorization at x = sqrt(2) and sqrt(3)") {
    auto gs = solve_ref(10.0);
    auto r2 = hopping_ratio_check(gs, 2.0, std::sqrt(2.0));
    // log-ratio <= log(10 K*) - lambda (x^2-1) d^2/8 = log(10 K*) - 5
    CHECK(r2.log_bound ==
          doctest::Approx(std::log(10.0 * frozen::kRatioKStar) - 5.0)
              .epsilon(1e-12));
    CHECK(r2.within_bound);
    CHECK(r2.kernel_monotone);
    CHECK(r2.kernel_ratio_max <= 10.0 * frozen::kKernelCStar);

    auto r3 = hopping_ratio_check(gs, 2.0, std::sqrt(3.0));
    CHECK(r3.within_bound);
    CHECK(r3.kernel_monotone);
    // x = sqrt(3) exponent is stricter than x = sqrt(2)
    CHECK(r3.log_bound < r2.log_bound);
    CHECK_THROWS(hopping_ratio_check(gs, 2.0, 0.5));
}

TEST_CASE("laplace exterior asymptote at lambda=40") {
    auto gs = solve_ref(40.0);
    const double a = 0.5;
    for (double r = 1.5 * a; r <= 3.0 * a + 1e-12; r += 0.25 * a) {
        const double phi = evaluate_phi_out(gs, r);
        const double asym = laplace_exterior_asymptote(gs, r);
        CHECK(std::abs(asym - phi) <= 0.05 * phi);
    }
    // monotone decreasing in r on (a, 3a]
    double prev = laplace_exterior_asymptote(gs, 0.55);
    for (double r = 0.65; r <= 1.5; r += 0.1) {
        const double cur = laplace_exterior_asymptote(gs, r);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("laplace asymptote error shrinks as lambda doubles") {
    const double r = 1.5;
    double err20 = 0.0, err40 = 0.0;
    {
        auto gs = solve_ref(20.0);
        err20 = std::abs(laplace_exterior_asymptote(gs, r) /
                             evaluate_phi_out(gs, r) -
                         1.0);
    }
    {
        auto gs = solve_ref(40.0);
        err40 = std::abs(laplace_exterior_asymptote(gs, r) /
                             evaluate_phi_out(gs, r) -
                         1.0);
    }
    CHECK(err40 < err20);
}

TEST_CASE("laplace asymptote guard: out-of-regime throws") {
    auto gs = solve_ref(10.0);
    CHECK_THROWS(laplace_exterior_asymptote(gs, 30.0)); // lambda nu t* < 4
    CHECK_THROWS(laplace_exterior_asymptote(gs, 0.4));  // inside the well
}

TEST_CASE("removing the magnetic phase strictly increases |rho|") {
    auto gs = solve_ref(10.0);
    const double lambda = 10.0, a = 0.5, dist = 2.0;
    // phaseless direct route, quadrature local to the test:
    // lambda^2 |v| int_0^a phi(r) r [int phi_out(|x-d|) dtheta] dr
    auto ring = [&](double r) {
        const int n = 512;
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double th = 2.0 * oracle::pi * k / n;
            const double rr =
                std::sqrt(r * r + dist * dist - 2.0 * r * dist * std::cos(th));
            s += evaluate_phi_out(gs, rr);
        }
        return s * 2.0 * oracle::pi / n;
    };
    auto f = [&](double r) { return gs.phi(r) * r * ring(r); };
    const double rho0 =
        lambda * lambda * 2.0 * oracle::simpson(f, 1e-8, a, 2000);
    auto h = hopping_all_routes(gs, dist);
    const double mag = std::abs(h.rho_bessel);
    CHECK(rho0 > mag);
    CHECK(rho0 >= std::exp(lambda * a * a / 4.0) / 10.0 * mag);
}
