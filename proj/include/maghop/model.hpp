#ifndef MAGHOP_MODEL_HPP
#define MAGHOP_MODEL_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace maghop {

// Piecewise-constant disc well: v0(r) = depth for r < radius, 0 otherwise.
// depth < 0 (energy units), radius > 0 (length units).
struct WellSpec {
    enum class Shape { disc };
    Shape shape = Shape::disc;
    double depth = -2.0;
    double radius = 0.5;

    double potential(double r) const { return r < radius ? depth : 0.0; }
};

struct GridSpec {
    double spacing = 0.0;        // h; 0 = auto (magnetic_length/8)
    double margin_lengths = 8.0; // domain margin in units of the magnetic length
    enum class Boundary { dirichlet };
    Boundary boundary = Boundary::dirichlet;
};

struct ToleranceSpec {
    double quadrature_rel = 1e-10;
    double eigen_rel = 1e-8;
    double match_rel = 1e-10;
    int max_iterations = 500;
};

struct ModelConfig {
    double lambda = 10.0;
    double b = 0.0; // 0 = default b = lambda
    WellSpec well;
    double separation = 2.0; // |d|, along axis 1
    GridSpec grid;
    ToleranceSpec tolerances;

    double field() const { return b > 0.0 ? b : lambda; }
    // ell = sqrt(2/lambda), the localization scale of Landau states
    double magnetic_length() const { return std::sqrt(2.0 / lambda); }
    double grid_spacing() const {
        return grid.spacing > 0.0 ? grid.spacing : magnetic_length() / 8.0;
    }
};

struct ValidationReport {
    bool valid = true;
    // |d| > 4(sqrt|v_min| + a): required for the splitting bound checks
    bool strict_spacing = false;
    std::vector<std::string> violations;
};

// Pure, deterministic; reports rather than throws.
ValidationReport validate(const ModelConfig& config);

// JSON config I/O. Unknown keys are an error.
ModelConfig config_from_json(const std::string& text);
std::string config_to_json(const ModelConfig& config);
ModelConfig load_config(const std::string& path);

} // namespace maghop

#endif
