#ifndef MAGHOP_HOPPING_HPP
#define MAGHOP_HOPPING_HPP

#include <complex>
#include <utility>

#include "maghop/logvalue.hpp"
#include "maghop/radial.hpp"

namespace maghop {

// Hopping coefficient rho(d) for displacement d = dist * e1, computed by
// three independent quadrature routes.
struct HoppingResult {
    std::complex<double> rho_direct; // 2D polar quadrature, magnetic phase
    double rho_angular = 0.0;        // radial x angular-kernel route
    double rho_bessel = 0.0;         // radial x non-oscillatory kernel route
    LogValue rho_bessel_log;         // same, sign and log magnitude
    double lower_bound_log = 0.0;    // log of the closed-form lower envelope
    double upper_bound_log = 0.0;    // log of the closed-form upper envelope
    double gamma0_effective = 0.0;   // realized lower-exponent constant
    bool direct_converged = false;
    bool angular_converged = false;
    bool bessel_converged = false;
};

struct KernelSample {
    double r = 0.0;
    double L_value = 0.0;       // non-oscillatory route
    double L_oscillatory = 0.0; // angular route
};

// Non-oscillatory kernel
//   L_dist(r) = 2 pi C r e^{-lambda(r^2+dist^2)/4}
//     int_0^inf e^{-lambda(r^2+dist^2)t/2} t^{alpha-1}(1+t)^{-alpha}
//               I0(lambda dist r sqrt(t(t+1))) dt,
// assembled as a single log-domain exponent with the scaled I0.
LogValue kernel_bessel_log(const GroundState& gs, double dist, double r);
double kernel_bessel(const GroundState& gs, double dist, double r);

// Same kernel by the angular (oscillatory) route:
//   r int_0^{2pi} e^{i lambda dist r sin(theta)/2}
//                 phi_out(sqrt(r^2+dist^2-2 r dist cos(theta))) dtheta.
struct OscillatoryKernel {
    double value = 0.0; // real part
    double imag = 0.0;  // diagnostic, should vanish
};
OscillatoryKernel kernel_oscillatory_full(const GroundState& gs, double dist,
                                          double r);
double kernel_oscillatory(const GroundState& gs, double dist, double r);

// rho(dist) with the exp(-lambda(r^2+dist^2)/8) factor peeled off the kernel:
// tilde-L_dist(r) = e^{+lambda(r^2+dist^2)/8} L_dist(r).
double kernel_tilde_log(const GroundState& gs, double dist, double r);

HoppingResult hopping_all_routes(const GroundState& gs, double dist);

// (log lower, log upper) envelopes for |rho|, with frozen prefactors:
//   lower: prefac * C_lambda * lambda * overlap * e^{-lambda(dist^2 +
//          4 sqrt(2 nu) dist + a^2)/4}
//   upper: prefac * lambda^{5/2} * e^{-lambda((dist-a)^2 - a^2)/4}
std::pair<double, double> hopping_bounds_log(const GroundState& gs,
                                             double dist);

// Closed-form Laplace asymptote of the exterior wavefunction.
double laplace_exterior_asymptote_log(const GroundState& gs, double r);
double laplace_exterior_asymptote(const GroundState& gs, double r);

struct RatioReport {
    double log_ratio = 0.0;        // log |rho(x dist)/rho(dist)|
    double log_bound = 0.0;        // log K* - lambda (x^2-1) dist^2 / 8
    bool within_bound = false;
    double kernel_ratio_max = 0.0; // max over sample r of tilde-L ratio
    bool kernel_monotone = false;  // kernel_ratio_max <= C*
};
RatioReport hopping_ratio_check(const GroundState& gs, double dist, double x);

} // namespace maghop

#endif
