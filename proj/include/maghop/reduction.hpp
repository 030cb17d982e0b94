#ifndef MAGHOP_REDUCTION_HPP
#define MAGHOP_REDUCTION_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>

#include "maghop/model.hpp"
#include "maghop/planar.hpp"

namespace maghop {

// Two-dimensional orbital subspace V = span{phi0, phi_d}: phi0 is the
// discrete single-well ground orbital (the discrete magnetic translation
// commutes exactly with the stencil, so phi_d = R^d phi0 is an exact
// eigenvector of the shifted well); phi_tilde_d is its Gram-Schmidt partner.
struct OrbitalPair {
    GridVector phi0;        // unit norm
    GridVector phi_tilde_d; // unit norm, orthogonal to phi0 (<= 1e-12)
    GridVector phi_d;       // raw magnetic translate, unit norm
    std::complex<double> overlap; // <phi0, phi_d>
    double e0 = 0.0;              // discrete single-well ground energy
    double eigen_residual = 0.0;  // ||H phi0 - e0 phi0||
};

struct ReductionContext; // internal shared state behind the callables

// Effective 2x2 problem on V for the centered operator Hc = H_double - e0:
//   A     : zero diagonal, rho on the off-diagonal (grid inner product
//           lambda^2 <phi0, v0 phi_d>)
//   D(z)  : -Pi Hc Q (Q (Hc - z) Q)^{-1} Q Hc Pi via deflated CG solves,
//           Q = I - Pi the projector onto the orthogonal complement of V
//   B(z)  : Pi Hc Pi - A + D(z)
//   f, g  : the smallness functions of w = z/|rho| in
//           det(...)/|rho|^2 = w^2 - 1 - f(w) w - g(w)
//   det_w : det[((-z, rho), (conj rho, -z)) + B(z)] / |rho|^2 at z = w |rho|
struct EffectiveMatrices {
    Eigen::Matrix2cd A;
    Eigen::Matrix2cd PHP; // <phi_i, Hc phi_j> (consistent operator products)
    std::complex<double> rho;
    double rho_abs = 0.0;
    OrbitalPair orbitals;
    double rhs_norm0 = 0.0; // ||Q Hc phi0||
    double rhs_norm1 = 0.0; // ||Q Hc phi_tilde_d||
    std::function<Eigen::Matrix2cd(double)> D_of_z;
    std::function<Eigen::Matrix2cd(double)> B_of_z;
    std::function<std::complex<double>(double)> f;
    std::function<std::complex<double>(double)> g;
    std::function<std::complex<double>(double)> det_w;
    std::shared_ptr<ReductionContext> context;

    // max |<phi_i, u>| / ||u|| recorded over all deflated-solve iterates
    double deflation_leak() const;
};

OrbitalPair orbital_basis(const ModelConfig& config);

// centered = true (default): Hc = H - e0; callables take z with E = e0 + z.
// centered = false: callables take the absolute energy E directly.
EffectiveMatrices effective_matrices(const ModelConfig& config,
                                     bool centered = true);

struct ReductionResult {
    bool valid = false;     // false: no sign change in a bracket
    double E0 = 0.0, E1 = 0.0;
    double gap = 0.0;       // extrapolated from the two grids
    double gap_coarse = 0.0, gap_fine = 0.0;
    double w0 = 0.0, w1 = 0.0; // determinant roots in w = z/|rho| (fine grid)
    double rho_abs = 0.0;      // |rho| grid value (fine)
    double e0 = 0.0;           // discrete single-well reference energy (fine)
    double max_f = 0.0, max_g = 0.0; // over |w| <= 2, coarse grid
    double det_imag_rel = 0.0; // |Im det_w| at the roots, relative
    double deflation_leak = 0.0;
    double spacing = 0.0;      // coarse base spacing used
    std::string message;
};

// Finds the two real determinant roots near +-|rho| by bracketed
// bisection/secant in w on [1 - 1/2, 1 + 1/2] and mirrored; repeats on the
// h/sqrt(2) grid and extrapolates log(gap) like the planar route.
ReductionResult splitting_from_reduction(const ModelConfig& config);

struct ResolventProbe {
    double norm_bound = 0.0;    // ||(Q (Hc - z) Q)^{-1}|| estimate
    double sigma_min = 0.0;     // smallest eigenvalue of Q (Hc - z) Q on V-perp
    double quad_form_min = 0.0; // min sampled <psi, Hc psi>/||psi||^2, psi in V-perp
    int iterations = 0;
    bool converged = false;
};

// Inverse iteration on the deflated operator restricted to the complement of
// V. single_well = true probes the single-well variant with V = span{phi0},
// whose sigma_min is the single-well spectral gap e1 - e0 (at z = 0).
ResolventProbe resolvent_probe(const ModelConfig& config, double z,
                               bool single_well = false);

// Bracketed scalar root finder (Illinois variant of false position);
// requires fn(lo) and fn(hi) of opposite sign.
double bracketed_root(const std::function<double(double)>& fn, double lo,
                      double hi, double tol);

} // namespace maghop

#endif
