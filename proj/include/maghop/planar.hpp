#ifndef MAGHOP_PLANAR_HPP
#define MAGHOP_PLANAR_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "maghop/model.hpp"
#include "maghop/radial.hpp"

namespace maghop {

using GridVector = Eigen::VectorXcd;

enum class Wells { none, single, single_shifted, double_well };

// Sparse 5-point magnetic stencil: diagonal 4/h^2 + lambda^2 V(site), unit
// Peierls link phases from the midpoint rule in the symmetric gauge
// A(x) = (b/2)(-x2, x1). Hermitian by construction.
struct DiscreteOperator {
    int nx = 0, ny = 0;
    double h = 0.0;
    double x0 = 0.0, y0 = 0.0; // coordinates of site (0, 0)
    double lambda = 0.0, b = 0.0;
    std::vector<double> diag;
    std::vector<std::complex<double>> phase_x; // edge (i,j) -> (i+1,j)
    std::vector<std::complex<double>> phase_y; // edge (i,j) -> (i,j+1)

    int dimension() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }
    double x_of(int i) const { return x0 + i * h; }
    double y_of(int j) const { return y0 + j * h; }
    void apply(const GridVector& in, GridVector& out) const;
    GridVector apply(const GridVector& in) const;
    double norm_estimate() const; // Gershgorin bound on the spectral norm
};

// One well per entry: center on the x-axis, depth.
struct WellPlacement {
    double center_x = 0.0;
    double depth = 0.0;
};

DiscreteOperator build_hamiltonian(const ModelConfig& config, Wells wells);
DiscreteOperator build_hamiltonian_centers(
    const ModelConfig& config, const std::vector<WellPlacement>& wells);

struct EigenResult {
    std::vector<double> eigenvalues; // ascending
    std::vector<GridVector> eigenvectors;
    std::vector<double> residuals; // ||H psi - E psi||
    int iterations = 0;
    bool converged = false;
    // Residual improvement stalled above the target: the Ritz values are
    // resolved only to the width of a quasi-degenerate cluster (e.g. a
    // finite-domain Landau multiplet). Values are still returned.
    bool stagnated = false;
};

// Shift-invert subspace iteration (inner solves by conjugate gradients on the
// positive-definite shifted system). Deterministic: fixed seed start block.
// res_tol = 0 selects the default residual target; pass a smaller absolute
// target (down to ~1e-9 * ||H||) when eigenvector accuracy matters.
EigenResult lowest_eigenpairs(const DiscreteOperator& op, int k, double shift,
                              double res_tol = 0.0);

struct SplittingReport {
    double E0 = 0.0, E1 = 0.0;
    double gap = 0.0;
    double rho_abs = 0.0;             // from the hopping module
    double ratio = 0.0;               // gap / (2 |rho|)
    double lower_bound = 0.0;         // splitting envelope, frozen constants
    double upper_bound = 0.0;
    bool gap_resolved = false;        // gap >= 10 * eigen_rel * |E0|
    double max_residual = 0.0;
    double gap_coarse = 0.0;          // grid h, before extrapolation
    double gap_fine = 0.0;            // grid h/sqrt(2)
    double spacing = 0.0;             // base spacing actually used
    EigenResult eigen;                // the k=2 fine-grid eigenpairs
};

// Double-well splitting. The discrete tunneling gap carries a multiplicative
// e^{-c lambda^3 h^2} grid-dispersion error, so the default base spacing
// shrinks like l/8 * min(1, (8/lambda)^{3/2}) and the reported gap is the
// Richardson extrapolation of log(gap) from grids h and h/sqrt(2).
SplittingReport splitting(const ModelConfig& config);

// Discrete magnetic translation along axis 1 by steps cells:
// (R u)(x) = e^{i b (z /\ x)/2} u(x - z), z = steps * h * e1.
GridVector magnetic_translate(const DiscreteOperator& op, const GridVector& in,
                              int steps);

// Grid function sampled from the radial profile centered at (center_x, 0),
// with the magnetic-translate phase for center_x != 0:
// phi_c(x) = e^{i b c x2 / 2} phi(|x - c e1|). Not grid-normalized.
GridVector sample_radial_state(const DiscreteOperator& op,
                               const GroundState& gs, double center_x);

// Long-double accumulated inner product and norm over the grid.
std::complex<double> grid_dot(const GridVector& a, const GridVector& b);
double grid_norm(const GridVector& a);

} // namespace maghop

#endif
