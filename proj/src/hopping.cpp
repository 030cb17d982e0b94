#include "maghop/hopping.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "maghop/frozen.hpp"
#include "maghop/specfun.hpp"
#include "gauss.hpp"

namespace maghop {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_kernel_args(const GroundState& gs, double dist, double r) {
    const double a = gs.config.well.radius;
    if (!(dist > 2.0 * a))
        throw std::invalid_argument("hopping kernel needs dist > 2a");
    if (!(r > 0.0 && r <= a))
        throw std::invalid_argument("hopping kernel needs 0 < r <= a");
}

// Log-integrand of the non-oscillatory kernel after t = e^s, with the
// exponential growth of I0 folded into the exponent:
//   h(s) = -A t + B sqrt(t(t+1)) + alpha s - alpha log(1+t) + log i0e(B ...)
struct KernelIntegrand {
    double A, B, alpha;

    double operator()(double s) const {
        const double t = std::exp(s);
        const double z = B * std::sqrt(t * (t + 1.0));
        const double log1pt =
            s > 30.0 ? s + std::log1p(std::exp(-s)) : std::log1p(t);
        return -A * t + z + alpha * s - alpha * log1pt +
               std::log(bessel_i0_scaled(z));
    }
};

double golden_max(const KernelIntegrand& f, double lo, double hi) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = f(c), fd = f(d);
    while (hi - lo > 1e-10) {
        if (fc > fd) {
            hi = d; d = c; fd = fc;
            c = hi - gr * (hi - lo); fc = f(c);
        } else {
            lo = c; c = d; fc = fd;
            d = lo + gr * (hi - lo); fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

// integral of exp(h(s)) ds, peak-relative, composite GL with doubling.
double kernel_integral_reduced(const KernelIntegrand& f, double s_lo,
                               double s_hi, double h0, double rel_tol) {
    auto sum_panels = [&](int panels) {
        LogAccumulator acc;
        const double dp = (s_hi - s_lo) / panels;
        for (int j = 0; j < panels; ++j) {
            const double c = s_lo + (j + 0.5) * dp;
            for (int i = 0; i < gauss::kN; ++i) {
                const double s = c + 0.5 * dp * gauss::kX[i];
                acc.add(f(s) - h0, gauss::kW[i] * 0.5 * dp);
            }
        }
        LogValue r = acc.result();
        return r.sign > 0 ? std::exp(r.log_magnitude) : 0.0;
    };
    int panels = std::max(8, static_cast<int>((s_hi - s_lo) * 2.0));
    double prev = sum_panels(panels);
    for (int iter = 0; iter < 8; ++iter) {
        panels *= 2;
        const double cur = sum_panels(panels);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
        prev = cur;
    }
    throw std::runtime_error("hopping kernel quadrature failed to converge");
}

} // namespace

LogValue kernel_bessel_log(const GroundState& gs, double dist, double r) {
    check_kernel_args(gs, dist, r);
    if (gs.free_case)
        throw std::invalid_argument(
            "kernel_bessel needs a binding well (alpha > 0)");
    const double lambda = gs.config.lambda;
    const KernelIntegrand f{0.5 * lambda * (r * r + dist * dist),
                            lambda * dist * r, gs.alpha};

    // Locate the interior maximizer: coarse scan, then golden refinement.
    double best_s = -30.0, best_h = f(-30.0);
    for (double s = -30.0; s <= 6.0; s += 0.25) {
        const double h = f(s);
        if (h > best_h) { best_h = h; best_s = s; }
    }
    const double s0 = golden_max(f, best_s - 0.5, best_s + 0.5);
    const double h0 = f(s0);

    double lo = s0, hi = s0;
    while (f(lo) - h0 > -50.0 && lo > -250.0) lo -= 0.5;
    while (f(hi) - h0 > -50.0 && hi < 250.0) hi += 0.5;

    const double reduced = kernel_integral_reduced(
        f, lo, hi, h0, gs.config.tolerances.quadrature_rel);
    const double log_integral = h0 + std::log(reduced);
    return LogValue::pos(gs.log_c_lambda + std::log(r) -
                         0.25 * lambda * (r * r + dist * dist) +
                         std::log(2.0 * kPi) + log_integral);
}

double kernel_bessel(const GroundState& gs, double dist, double r) {
    return kernel_bessel_log(gs, dist, r).value();
}

OscillatoryKernel kernel_oscillatory_full(const GroundState& gs, double dist,
                                          double r) {
    check_kernel_args(gs, dist, r);
    const double lambda = gs.config.lambda;
    const double xi = 0.5 * lambda * dist * r;

    auto radius = [&](double th) {
        return std::sqrt(r * r + dist * dist -
                         2.0 * r * dist * std::cos(th));
    };
    // Periodic trapezoid with incremental doubling; >= 16 nodes per
    // oscillation period of exp(i xi sin theta).
    int n = 64;
    while (n < 16.0 * xi / (2.0 * kPi) * 4.0) n *= 2;

    long double re = 0.0L, im = 0.0L;
    for (int j = 0; j < n; ++j) {
        const double th = 2.0 * kPi * j / n;
        const double phi = std::exp(gs.log_phi_out(radius(th)));
        re += std::cos(xi * std::sin(th)) * phi;
        im += std::sin(xi * std::sin(th)) * phi;
    }
    long double prev_re = 0.0L;
    bool converged = false;
    for (int iter = 0; iter < 12 && !converged; ++iter) {
        // midpoints of the current grid
        long double add_re = 0.0L, add_im = 0.0L;
        for (int j = 0; j < n; ++j) {
            const double th = 2.0 * kPi * (j + 0.5) / n;
            const double phi = std::exp(gs.log_phi_out(radius(th)));
            add_re += std::cos(xi * std::sin(th)) * phi;
            add_im += std::sin(xi * std::sin(th)) * phi;
        }
        prev_re = re / n;
        re += add_re;
        im += add_im;
        n *= 2;
        converged =
            std::abs(static_cast<double>(re / n - prev_re)) <=
            1e-11 * std::abs(static_cast<double>(re / n));
    }
    if (!converged)
        throw std::runtime_error(
            "kernel_oscillatory failed to converge (insufficient nodes)");
    OscillatoryKernel out;
    out.value = static_cast<double>(re * (2.0 * kPi / n) * r);
    out.imag = static_cast<double>(im * (2.0 * kPi / n) * r);
    return out;
}

double kernel_oscillatory(const GroundState& gs, double dist, double r) {
    return kernel_oscillatory_full(gs, dist, r).value;
}

double kernel_tilde_log(const GroundState& gs, double dist, double r) {
    const double lambda = gs.config.lambda;
    return kernel_bessel_log(gs, dist, r).log_magnitude +
           0.125 * lambda * (r * r + dist * dist);
}

namespace {

// lambda^2 |depth| * integral_0^a phi(r) L(r) dr in the log domain, where
// log_kernel(r) returns log L(r). Composite GL with one doubling check.
LogValue rho_radial_log(const GroundState& gs,
                        const std::function<double(double)>& log_kernel,
                        bool* converged) {
    const double a = gs.config.well.radius;
    const double lambda = gs.config.lambda;
    const double depth_mag = std::abs(gs.config.well.depth);
    auto sum_panels = [&](int panels) {
        LogAccumulator acc;
        const double dp = a / panels;
        for (int j = 0; j < panels; ++j) {
            const double c = (j + 0.5) * dp;
            for (int i = 0; i < gauss::kN; ++i) {
                const double r = c + 0.5 * dp * gauss::kX[i];
                acc.add(gs.log_phi(r) + log_kernel(r),
                        gauss::kW[i] * 0.5 * dp);
            }
        }
        return acc.result();
    };
    LogValue prev = sum_panels(4);
    *converged = false;
    LogValue cur = prev;
    for (int iter = 0; iter < 3; ++iter) {
        cur = sum_panels(8 << iter);
        if (std::abs(std::exp(cur.log_magnitude - prev.log_magnitude) - 1.0) <=
            1e-9) {
            *converged = true;
            break;
        }
        prev = cur;
    }
    // rho = lambda^2 int phi v L dr with v = -|depth|: negative real
    return LogValue{cur.log_magnitude + 2.0 * std::log(lambda) +
                        std::log(depth_mag),
                    -cur.sign};
}

std::complex<double> rho_direct_polar(const GroundState& gs, double dist,
                                      bool* converged) {
    const double a = gs.config.well.radius;
    const double lambda = gs.config.lambda;
    const double depth = gs.config.well.depth;
    auto eval = [&](int r_panels, int n_theta) {
        std::complex<long double> acc = 0.0L;
        const double dp = a / r_panels;
        for (int j = 0; j < r_panels; ++j) {
            const double c = (j + 0.5) * dp;
            for (int i = 0; i < gauss::kN; ++i) {
                const double r = c + 0.5 * dp * gauss::kX[i];
                const double wr = gauss::kW[i] * 0.5 * dp;
                const double xi = 0.5 * lambda * dist * r;
                const double phi_r = std::exp(gs.log_phi(r));
                std::complex<long double> ang = 0.0L;
                for (int k = 0; k < n_theta; ++k) {
                    const double th = 2.0 * kPi * k / n_theta;
                    const double rr = std::sqrt(
                        r * r + dist * dist - 2.0 * r * dist * std::cos(th));
                    const double phi_t = std::exp(gs.log_phi_out(rr));
                    const double ph = xi * std::sin(th);
                    ang += std::complex<long double>(std::cos(ph) * phi_t,
                                                     std::sin(ph) * phi_t);
                }
                acc += static_cast<long double>(phi_r * depth * r * wr *
                                                2.0 * kPi / n_theta) *
                       ang;
            }
        }
        return std::complex<double>(
            static_cast<double>(acc.real() * lambda * lambda),
            static_cast<double>(acc.imag() * lambda * lambda));
    };
    const double xi_max = 0.5 * lambda * dist * a;
    int n_theta = 64;
    while (n_theta < 16.0 * xi_max / (2.0 * kPi) * 2.0) n_theta *= 2;
    std::complex<double> prev = eval(4, n_theta);
    *converged = false;
    std::complex<double> cur = prev;
    for (int iter = 0; iter < 3; ++iter) {
        cur = eval(8 << iter, 2 * n_theta << iter);
        if (std::abs(cur - prev) <= 1e-8 * std::abs(cur)) {
            *converged = true;
            break;
        }
        prev = cur;
    }
    return cur;
}

} // namespace

HoppingResult hopping_all_routes(const GroundState& gs, double dist) {
    if (!(dist > 2.0 * gs.config.well.radius))
        throw std::invalid_argument("hopping needs dist > 2a");
    HoppingResult out;
    if (gs.config.well.depth == 0.0) {
        // v == 0: every route is identically zero.
        out.rho_bessel_log = LogValue::zero();
        out.direct_converged = out.angular_converged = out.bessel_converged =
            true;
        auto [lo, hi] = hopping_bounds_log(gs, dist);
        out.lower_bound_log = lo;
        out.upper_bound_log = hi;
        return out;
    }

    out.rho_bessel_log = rho_radial_log(
        gs, [&](double r) { return kernel_bessel_log(gs, dist, r).log_magnitude; },
        &out.bessel_converged);
    out.rho_bessel = out.rho_bessel_log.value();

    bool ang_ok = false;
    const LogValue ang = rho_radial_log(
        gs,
        [&](double r) {
            const double v = kernel_oscillatory(gs, dist, r);
            if (!(v > 0.0))
                throw std::runtime_error("oscillatory kernel not positive");
            return std::log(v);
        },
        &ang_ok);
    out.angular_converged = ang_ok;
    out.rho_angular = ang.value();

    out.rho_direct = rho_direct_polar(gs, dist, &out.direct_converged);

    auto [lo, hi] = hopping_bounds_log(gs, dist);
    out.lower_bound_log = lo;
    out.upper_bound_log = hi;
    const double nu = gs.nu;
    out.gamma0_effective = -4.0 / gs.config.lambda *
                               out.rho_bessel_log.log_magnitude -
                           dist * dist - 4.0 * std::sqrt(2.0 * nu) * dist;
    return out;
}

std::pair<double, double> hopping_bounds_log(const GroundState& gs,
                                             double dist) {
    const double lambda = gs.config.lambda;
    const double a = gs.config.well.radius;
    const double nu = gs.nu;
    double overlap_log = -std::numeric_limits<double>::infinity();
    if (gs.config.well.depth != 0.0)
        overlap_log = std::log(overlap_well_integral(gs).integral);
    const double lower =
        std::log(frozen::kHopLowerPrefactor) + gs.log_c_lambda +
        std::log(lambda) + overlap_log -
        0.25 * lambda *
            (dist * dist + 4.0 * std::sqrt(2.0 * nu) * dist + a * a);
    const double upper =
        std::log(frozen::kHopUpperPrefactor) + 2.5 * std::log(lambda) -
        0.25 * lambda * ((dist - a) * (dist - a) - a * a);
    return {lower, upper};
}

double laplace_exterior_asymptote_log(const GroundState& gs, double r) {
    if (!(r > gs.config.well.radius))
        throw std::invalid_argument("laplace asymptote needs r > a");
    const double lambda = gs.config.lambda;
    const double nu = gs.nu;
    const double ts = laplace_tstar(nu, r);
    if (!(lambda * nu * ts >= 4.0))
        throw std::domain_error(
            "laplace asymptote out of regime (lambda nu t_star < 4)");
    const double pref =
        0.5 * std::log(2.0 * kPi / (lambda * nu) *
                       (1.0 + ts * ts / (1.0 + 2.0 * ts)));
    return gs.log_c_lambda + pref -
           lambda * (0.25 * (1.0 + 2.0 * ts) * r * r +
                     nu * std::log(1.0 + 1.0 / ts));
}

double laplace_exterior_asymptote(const GroundState& gs, double r) {
    return std::exp(laplace_exterior_asymptote_log(gs, r));
}

RatioReport hopping_ratio_check(const GroundState& gs, double dist, double x) {
    if (!(x >= 1.0))
        throw std::invalid_argument("hopping_ratio_check needs x >= 1");
    RatioReport out;
    const double lambda = gs.config.lambda;
    bool ok1 = false, ok2 = false;
    const LogValue rho1 = rho_radial_log(
        gs, [&](double r) { return kernel_bessel_log(gs, dist, r).log_magnitude; },
        &ok1);
    const LogValue rho2 = rho_radial_log(
        gs,
        [&](double r) {
            return kernel_bessel_log(gs, x * dist, r).log_magnitude;
        },
        &ok2);
    if (!ok1 || !ok2)
        throw std::runtime_error("hopping_ratio_check: route not converged");
    out.log_ratio = rho2.log_magnitude - rho1.log_magnitude;
    out.log_bound = std::log(frozen::kRatioKStar * 10.0) -
                    0.125 * lambda * (x * x - 1.0) * dist * dist;
    out.within_bound = out.log_ratio <= out.log_bound;

    const double a = gs.config.well.radius;
    double worst = -std::numeric_limits<double>::infinity();
    for (double f : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        const double r = f * a;
        worst = std::max(worst, kernel_tilde_log(gs, x * dist, r) -
                                    kernel_tilde_log(gs, dist, r));
    }
    out.kernel_ratio_max = std::exp(worst);
    out.kernel_monotone = out.kernel_ratio_max <= frozen::kKernelCStar * 10.0;
    return out;
}

} // namespace maghop
