#ifndef MAGHOP_SPECFUN_HPP
#define MAGHOP_SPECFUN_HPP

#include "maghop/logvalue.hpp"

namespace maghop {

// e^{-z} I0(z), relative error <= 1e-12. Rejects z < 0.
double bessel_i0_scaled(double z);

// Integral of exp(i*xi*sin(t) + beta*cos(t)) over one period, as a real
// number; equals 2*pi*I0(sqrt(beta^2 - xi^2)) for beta > |xi|.
double ring_phase_integral(double xi, double beta, double rel_tol = 1e-11);

// W(alpha, y) = integral_0^inf e^{-yt} t^{alpha-1} (1+t)^{-alpha} dt,
// i.e. Gamma(alpha)*U_alpha(y) kept un-normalized. Log-domain result.
LogValue tricomi_u_log(double alpha, double y, double rel_tol = 1e-11);

// Same integrand with an extra factor t: d/dy of -W. Used for log-derivatives.
LogValue tricomi_u_dlog_num(double alpha, double y, double rel_tol = 1e-11);

// dlog W / dy = -W2/W where W2 carries the extra t factor.
double tricomi_u_log_derivative(double alpha, double y, double rel_tol = 1e-11);

struct KummerEval {
    LogValue m;  // M(alpha, 1; y)
    LogValue dm; // dM/dy
};

// Ascending-series evaluation of Kummer M(alpha, 1; y) and its y-derivative.
KummerEval kummer_m_eval(double alpha, double y);
LogValue kummer_m_log(double alpha, double y);

} // namespace maghop

#endif
