#include "maghop/specfun.hpp"

#include <cmath>
#include <complex>
#include <quadmath.h>
#include <functional>
#include <stdexcept>
#include <vector>

namespace maghop {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGlN = 16;
constexpr double kGlX[kGlN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGlW[kGlN] = {
    0.0271524594117540, 0.0622535239386477, 0.0951585116824926,
    0.1246289712555340, 0.1495959888165768, 0.1691565193950026,
    0.1826034150449236, 0.1894506104550686, 0.1894506104550686,
    0.1826034150449236, 0.1691565193950026, 0.1495959888165768,
    0.1246289712555340, 0.0951585116824926, 0.0622535239386477,
    0.0271524594117540};

double log1p_exp(double s) {
    return s > 30.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

// Log-integrand of integral_0^inf t^{p-1} (1+t)^{-q} e^{-yt} dt after
// t = e^s:  h(s) = -y e^s + p s - q log(1 + e^s).
double w_exponent(double p, double q, double y, double s) {
    return -y * std::exp(s) + p * s - q * log1p_exp(s);
}

// Interior maximizer of the exponent, in t: root of y t^2 + (y+q-p) t - p.
double w_peak_t(double p, double q, double y) {
    const double b = y + q - p;
    return (-b + std::sqrt(b * b + 4.0 * y * p)) / (2.0 * y);
}

// Composite Gauss-Legendre in s over [lo, hi] with n panels, exponents
// accumulated relative to the peak value h0.
double w_sum_panels(double p, double q, double y, double lo, double hi,
                    int panels, double h0) {
    LogAccumulator acc;
    const double dp = (hi - lo) / panels;
    for (int j = 0; j < panels; ++j) {
        const double c = lo + (j + 0.5) * dp;
        for (int i = 0; i < kGlN; ++i) {
            const double s = c + 0.5 * dp * kGlX[i];
            acc.add(w_exponent(p, q, y, s) - h0, kGlW[i] * 0.5 * dp);
        }
    }
    LogValue r = acc.result();
    return r.sign > 0 ? std::exp(r.log_magnitude) : 0.0;
}

LogValue w_general_log(double p, double q, double y, double rel_tol) {
    if (!(p > 0.0)) throw std::invalid_argument("W integral needs p > 0");
    if (!(y > 0.0)) throw std::invalid_argument("W integral needs y > 0");

    const double s0 = std::log(w_peak_t(p, q, y));
    const double h0 = w_exponent(p, q, y, s0);

    // Expand until the integrand has dropped by e^{-50} on both sides. The
    // left tail decays like e^{p s}, so the reach is bounded by 50/p.
    double lo = s0, hi = s0;
    while (w_exponent(p, q, y, lo) - h0 > -50.0) lo -= 0.5;
    while (w_exponent(p, q, y, hi) - h0 > -50.0) hi += 0.5;
    if (hi - lo > 5000.0)
        throw std::runtime_error("W integral: integrand support too wide");

    int panels = std::max(8, static_cast<int>((hi - lo) * 2.0));
    double prev = w_sum_panels(p, q, y, lo, hi, panels, h0);
    for (int iter = 0; iter < 8; ++iter) {
        panels *= 2;
        const double cur = w_sum_panels(p, q, y, lo, hi, panels, h0);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur))
            return LogValue::pos(h0 + std::log(cur));
        prev = cur;
    }
    throw std::runtime_error("W integral quadrature failed to converge");
}

// k = 0: W(alpha, y) itself; k = 1: the extra-t-factor integral.
LogValue w_integral_log(double alpha, double y, int k, double rel_tol) {
    if (!(alpha > 0.0)) throw std::invalid_argument("W integral needs alpha > 0");
    if (k == 1 || alpha >= 0.5)
        return w_general_log(alpha + k, alpha, y, rel_tol);
    // Small alpha: the t -> 0 tail ~ t^{alpha-1} spreads over an s-range of
    // order 1/alpha. Integrate by parts once to lift the origin exponent:
    //   W = (y/alpha) * I(alpha+1, alpha) + I(alpha+1, alpha+1).
    const LogValue j0 = w_general_log(alpha + 1.0, alpha, y, rel_tol);
    const LogValue j1 = w_general_log(alpha + 1.0, alpha + 1.0, y, rel_tol);
    LogAccumulator acc;
    acc.add(j0.log_magnitude + std::log(y) - std::log(alpha), 1.0);
    acc.add(j1.log_magnitude, 1.0);
    return acc.result();
}

} // namespace

double bessel_i0_scaled(double z) {
    if (z < 0.0) throw std::invalid_argument("bessel_i0_scaled needs z >= 0");
    if (z <= 20.0) {
        // Power series, all terms positive.
        const double q = 0.25 * z * z;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return std::exp(-z) * sum;
    }
    // Asymptotic series; smallest term ~ e^{-2z} < 1e-17 for z > 20.
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        const double num = 2.0 * k - 1.0;
        term *= num * num / (8.0 * k * z);
        if (term > sum) break; // divergent tail
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(2.0 * kPi * z);
}

double ring_phase_integral(double xi, double beta, double rel_tol) {
    rel_tol = std::max(rel_tol, 1e-11);
    xi = std::abs(xi);
    if (beta < xi || (beta == xi && beta != 0.0))
        throw std::invalid_argument("ring_phase_integral needs beta > |xi|");

    // Periodic trapezoid. For xi close to beta the oscillation cancels the
    // integral down to exp(-(beta - sqrt(beta^2-xi^2))) of the summand scale,
    // which exhausts double precision; the sum is carried in quad precision.
    auto eval = [&](int n) {
        __float128 sum = 0.0Q;
        const __float128 two_pi = 2.0Q * M_PIq;
        for (int i = 0; i < n; ++i) {
            const __float128 th = two_pi * i / n;
            sum += expq(beta * (cosq(th) - 1.0Q)) * cosq(xi * sinq(th));
        }
        return sum * (two_pi / n);
    };
    int n = 64;
    __float128 prev = eval(n);
    for (int iter = 0; iter < 14; ++iter) {
        n *= 2;
        const __float128 cur = eval(n);
        if (fabsq(cur - prev) <= rel_tol * fabsq(cur))
            return static_cast<double>(cur * expq(static_cast<__float128>(beta)));
        prev = cur;
    }
    throw std::runtime_error("ring_phase_integral failed to converge");
}

LogValue tricomi_u_log(double alpha, double y, double rel_tol) {
    return w_integral_log(alpha, y, 0, rel_tol);
}

LogValue tricomi_u_dlog_num(double alpha, double y, double rel_tol) {
    return w_integral_log(alpha, y, 1, rel_tol);
}

double tricomi_u_log_derivative(double alpha, double y, double rel_tol) {
    const LogValue w = w_integral_log(alpha, y, 0, rel_tol);
    const LogValue w2 = w_integral_log(alpha, y, 1, rel_tol);
    return -std::exp(w2.log_magnitude - w.log_magnitude);
}

KummerEval kummer_m_eval(double alpha, double y) {
    if (y < 0.0) throw std::invalid_argument("kummer_m_eval needs y >= 0");
    long double sum = 1.0L, dsum = 0.0L;
    long double term = 1.0L; // (alpha)_k y^k / (k!)^2
    long double peak = 1.0L;
    for (int k = 0; k < 100000; ++k) {
        const long double next =
            term * (alpha + k) * y /
            (static_cast<long double>(k + 1) * (k + 1));
        if (next == 0.0L) break;
        sum += next;
        dsum += next * (k + 1) / y;
        term = next;
        peak = std::max(peak, std::abs(term));
        if (k > y && std::abs(term) < 1e-19L * peak) break;
    }
    auto to_log = [](long double v) {
        if (v == 0.0L) return LogValue::zero();
        return LogValue{static_cast<double>(std::log(std::abs(v))),
                        v < 0.0L ? -1 : 1};
    };
    KummerEval out;
    out.m = to_log(sum);
    out.dm = to_log(dsum);
    return out;
}

LogValue kummer_m_log(double alpha, double y) {
    return kummer_m_eval(alpha, y).m;
}

} // namespace maghop
