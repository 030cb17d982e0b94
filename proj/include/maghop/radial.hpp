#ifndef MAGHOP_RADIAL_HPP
#define MAGHOP_RADIAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "maghop/model.hpp"

namespace maghop {

// Ground state of the single-well radial magnetic Hamiltonian.
// Interior (r < a): phi = scale * e^{-y/2} M(alpha_in, 1; y), y = lambda r^2/2.
// Exterior (r > a): phi = C_lambda * e^{-y/2} W(alpha, y) with
// W(alpha, y) = Gamma(alpha) U_alpha(y) kept un-normalized.
struct GroundState {
    ModelConfig config;
    double e0 = 0.0;
    double alpha = 0.0;    // (lambda - e0) / (2 lambda)
    double alpha_in = 0.0; // (lambda - (e0 - lambda^2 depth)) / (2 lambda)
    double nu = 0.0;       // alpha / lambda
    double c_lambda = 0.0;
    double log_c_lambda = 0.0;
    double log_interior_scale = 0.0; // multiplies e^{-y/2} M(alpha_in,1;y)
    double match_residual = 0.0;     // relative log-derivative mismatch at r=a
    bool free_case = false;          // depth == 0: pure lowest Landau state
    std::vector<std::pair<double, double>> interior_samples; // (r, phi(r))

    double phi_interior(double r) const;
    double log_phi_out(double r) const; // r > a
    // phi anywhere on [0, inf)
    double phi(double r) const;
    double log_phi(double r) const;
};

struct DecayBounds {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double lambda = 0.0;
    double a = 0.0;
    double log_lower(double r) const;
    double log_upper(double r) const;
    double lower(double r) const;
    double upper(double r) const;
};

GroundState solve_ground_state(const ModelConfig& config);

// C_lambda e^{-lambda r^2/4} W(alpha, lambda r^2/2); rejects r <= a.
double evaluate_phi_out(const GroundState& gs, double r);

DecayBounds decay_bounds(const GroundState& gs);

struct OverlapReport {
    double integral = 0.0; // int_0^a phi(r) (-v(r)) r dr
    double phi_sup = 0.0;  // max interior sample
};
OverlapReport overlap_well_integral(const GroundState& gs);

// Closed-form envelopes for C_lambda (shape only; prefactor windows are
// applied by the caller).
std::pair<double, double> normalization_bracket_log(const GroundState& gs);

// t minimizing  r^2 t / 2 + nu log(1 + 1/t):  (sqrt(1 + 8 nu/r^2) - 1)/2
double laplace_tstar(double nu, double r);

// L2 norm squared of the state, recomputed by quadrature (diagnostic).
double norm_squared(const GroundState& gs, int refine = 1);

std::string ground_state_to_json(const GroundState& gs);
GroundState ground_state_from_json(const std::string& text);

} // namespace maghop

#endif
