#include "maghop/radial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "maghop/logvalue.hpp"
#include "maghop/specfun.hpp"
#include "gauss.hpp"

namespace maghop {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kInteriorSamples = 257;

double alpha_of(double lambda, double e) { return (lambda - e) / (2.0 * lambda); }

double alpha_in_of(double lambda, double depth, double e) {
    return (lambda - (e - lambda * lambda * depth)) / (2.0 * lambda);
}

// Log-derivative mismatch in y at y_a between the interior and exterior
// radial solutions; the shared Gaussian factor e^{-y/2} cancels.
struct Matcher {
    double lambda, depth, a, quad_rel;
    double y_a;

    struct Eval {
        double g = 0.0; // g_in - g_out
        double residual = 1.0;
        bool usable = false;
    };

    Eval operator()(double e) const {
        Eval out;
        const double al = alpha_of(lambda, e);
        if (!(al > 0.0)) return out;
        const KummerEval km = kummer_m_eval(alpha_in_of(lambda, depth, e), y_a);
        if (km.m.sign == 0) return out;
        const double g_in = (km.dm / km.m).value();
        const double g_out = tricomi_u_log_derivative(al, y_a, quad_rel);
        out.g = g_in - g_out;
        out.residual = std::abs(out.g) /
                       (std::abs(g_in) + std::abs(g_out) + 1.0);
        out.usable = std::isfinite(out.g);
        return out;
    }

    // Interior solution must be nodeless on (0, y_a] for the ground state.
    bool interior_positive(double e) const {
        const double ai = alpha_in_of(lambda, depth, e);
        for (int i = 1; i <= 48; ++i) {
            const double y = y_a * i / 48.0;
            if (kummer_m_eval(ai, y).m.sign <= 0) return false;
        }
        return true;
    }
};

struct Root {
    double e = 0.0;
    double residual = 1.0;
};

// Locate sign changes of the mismatch on (e_lo, e_hi), bisect each, keep the
// lowest one that is a genuine matching root (small residual, nodeless
// interior). Sign changes caused by poles of the log-derivative are rejected
// by the residual check.
Root find_ground_energy(const Matcher& match, double e_lo, double e_hi,
                        double accept_residual) {
    for (int panels : {64, 512, 4096}) {
        double e_prev = 0.0;
        Matcher::Eval prev;
        bool have_prev = false;
        for (int i = 0; i <= panels; ++i) {
            const double e = e_lo + (e_hi - e_lo) * i / panels;
            const Matcher::Eval cur = match(e);
            if (!cur.usable) {
                have_prev = false;
                continue;
            }
            if (have_prev && prev.g * cur.g < 0.0) {
                double lo = e_prev, hi = e;
                double glo = prev.g;
                Matcher::Eval best = (prev.residual < cur.residual) ? prev : cur;
                double e_best = (prev.residual < cur.residual) ? e_prev : e;
                for (int it = 0; it < 200 && hi - lo >
                                               1e-16 * (std::abs(lo) + std::abs(hi) + 1.0);
                     ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const Matcher::Eval em = match(mid);
                    if (!em.usable) break;
                    if (em.residual < best.residual) {
                        best = em;
                        e_best = mid;
                    }
                    if (glo * em.g <= 0.0) {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = em.g;
                    }
                }
                if (best.residual <= accept_residual &&
                    match.interior_positive(e_best)) {
                    return {e_best, best.residual};
                }
            }
            prev = cur;
            e_prev = e;
            have_prev = true;
        }
    }
    throw std::runtime_error(
        "solve_ground_state: no bound state found in the energy bracket");
}

// 2*pi * integral of exp(log_psi2(r)) * r dr over [lo, hi] by composite
// Gauss-Legendre, accumulated in the log domain.
template <typename F>
void accumulate_radial(LogAccumulator& acc, const F& log_psi2, double lo,
                       double hi, int panels) {
    const double dp = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = lo + (p + 0.5) * dp;
        for (int i = 0; i < gauss::kN; ++i) {
            const double r = c + 0.5 * dp * gauss::kX[i];
            acc.add(log_psi2(r), 2.0 * kPi * r * gauss::kW[i] * 0.5 * dp);
        }
    }
}

double outer_cutoff(double lambda, double a) {
    // Integrand of the norm drops like e^{-lambda(r^2-a^2)/2}; stop once it
    // is below e^{-120} of its value at r = a.
    return std::sqrt(a * a + 240.0 / lambda);
}

} // namespace

double laplace_tstar(double nu, double r) {
    return 0.5 * (std::sqrt(1.0 + 8.0 * nu / (r * r)) - 1.0);
}

double GroundState::log_phi(double r) const {
    if (r < 0.0) throw std::invalid_argument("log_phi needs r >= 0");
    const double lambda = config.lambda;
    const double y = 0.5 * lambda * r * r;
    if (free_case) return log_interior_scale - 0.5 * y;
    const double a = config.well.radius;
    if (r < a) {
        const LogValue m = kummer_m_log(alpha_in, y);
        if (m.sign <= 0)
            throw std::runtime_error("interior wavefunction not positive");
        return log_interior_scale - 0.5 * y + m.log_magnitude;
    }
    return log_c_lambda - 0.5 * y +
           tricomi_u_log(alpha, y, config.tolerances.quadrature_rel)
               .log_magnitude;
}

double GroundState::phi(double r) const { return std::exp(log_phi(r)); }

double GroundState::phi_interior(double r) const {
    if (!free_case && r >= config.well.radius)
        throw std::invalid_argument("phi_interior needs r < a");
    return std::exp(log_phi(r));
}

double GroundState::log_phi_out(double r) const {
    if (r <= config.well.radius && !free_case)
        throw std::invalid_argument("log_phi_out needs r > a");
    return log_phi(r);
}

GroundState solve_ground_state(const ModelConfig& config) {
    const ValidationReport report = validate(config);
    if (!report.valid)
        throw std::invalid_argument("solve_ground_state: invalid config: " +
                                    (report.violations.empty()
                                         ? std::string("unknown")
                                         : report.violations.front()));
    GroundState gs;
    gs.config = config;
    const double lambda = config.lambda;
    const double a = config.well.radius;
    const double depth = config.well.depth;

    if (depth == 0.0) {
        // Free (Landau) case: ground state of the lowest Landau level.
        gs.free_case = true;
        gs.e0 = lambda;
        gs.alpha = 0.0;
        gs.alpha_in = 0.0;
        gs.nu = 0.0;
        gs.c_lambda = std::sqrt(lambda / (2.0 * kPi));
        gs.log_c_lambda = std::log(gs.c_lambda);
        gs.log_interior_scale = gs.log_c_lambda;
        gs.match_residual = 0.0;
        gs.interior_samples.reserve(kInteriorSamples);
        for (int i = 0; i < kInteriorSamples; ++i) {
            const double r = a * i / (kInteriorSamples - 1);
            gs.interior_samples.emplace_back(
                r, gs.c_lambda * std::exp(-0.25 * lambda * r * r));
        }
        return gs;
    }

    Matcher match{lambda, depth, a, config.tolerances.quadrature_rel,
                  0.5 * lambda * a * a};
    const double e_lo = lambda * lambda * depth;
    const double e_hi = lambda - 1e-6 * std::max(1.0, lambda);
    const double accept = std::max(1e3 * config.tolerances.match_rel, 1e-9);
    const Root root = find_ground_energy(match, e_lo, e_hi, accept);

    gs.e0 = root.e;
    gs.match_residual = root.residual;
    gs.alpha = alpha_of(lambda, gs.e0);
    gs.alpha_in = alpha_in_of(lambda, depth, gs.e0);
    gs.nu = gs.alpha / lambda;

    const double y_a = match.y_a;
    const double quad_rel = config.tolerances.quadrature_rel;
    const double log_w_a = tricomi_u_log(gs.alpha, y_a, quad_rel).log_magnitude;
    const LogValue m_a = kummer_m_log(gs.alpha_in, y_a);
    if (m_a.sign <= 0)
        throw std::runtime_error("solve_ground_state: M(y_a) not positive");
    // Interior continuation scale so psi is continuous at r = a with the
    // un-normalized exterior psi_out = e^{-y/2} W(alpha, y).
    const double log_continue = log_w_a - m_a.log_magnitude;

    auto log_psi2_in = [&](double r) {
        const double y = 0.5 * lambda * r * r;
        const LogValue m = kummer_m_log(gs.alpha_in, y);
        return 2.0 * (log_continue - 0.5 * y + m.log_magnitude);
    };
    auto log_psi2_out = [&](double r) {
        const double y = 0.5 * lambda * r * r;
        return 2.0 * (-0.5 * y +
                      tricomi_u_log(gs.alpha, y, quad_rel).log_magnitude);
    };

    LogAccumulator norm;
    accumulate_radial(norm, log_psi2_in, 0.0, a, 32);
    accumulate_radial(norm, log_psi2_out, a, outer_cutoff(lambda, a), 64);
    const LogValue n2 = norm.result();
    if (n2.sign <= 0)
        throw std::runtime_error("solve_ground_state: non-positive norm");

    gs.log_c_lambda = -0.5 * n2.log_magnitude;
    gs.c_lambda = std::exp(gs.log_c_lambda);
    gs.log_interior_scale = gs.log_c_lambda + log_continue;

    gs.interior_samples.reserve(kInteriorSamples);
    for (int i = 0; i < kInteriorSamples; ++i) {
        const double r = a * i / (kInteriorSamples - 1);
        const double y = 0.5 * lambda * r * r;
        const LogValue m = kummer_m_log(gs.alpha_in, y);
        if (m.sign <= 0)
            throw std::runtime_error(
                "solve_ground_state: interior sample not positive");
        const double v =
            std::exp(gs.log_interior_scale - 0.5 * y + m.log_magnitude);
        gs.interior_samples.emplace_back(r, v);
    }
    return gs;
}

double evaluate_phi_out(const GroundState& gs, double r) {
    if (r <= gs.config.well.radius)
        throw std::invalid_argument("evaluate_phi_out needs r > a");
    return std::exp(gs.log_phi(r));
}

DecayBounds decay_bounds(const GroundState& gs) {
    DecayBounds b;
    b.lambda = gs.config.lambda;
    b.a = gs.config.well.radius;
    const double vmin = std::abs(gs.config.well.depth);
    b.mu0 = 2.0 * std::pow(vmin / 2.0, 0.75) * std::pow(b.a, -1.5);
    // The (1/4 + mu0) denominator keeps (1/4+mu0)((r^2-a^2)+mu1) equal to the
    // underlying exponent (1/4+mu0) r^2 + a( (a-2)^2/4 + 2 vmin )/2.
    b.mu1 = 0.5 * b.a * (0.25 * (b.a - 2.0) * (b.a - 2.0) + 2.0 * vmin) /
                (0.25 + b.mu0) +
            b.a * b.a;
    return b;
}

double DecayBounds::log_lower(double r) const {
    return -std::log(lambda) -
           (0.25 + mu0) * lambda * ((r * r - a * a) + mu1);
}

double DecayBounds::log_upper(double r) const {
    return 0.5 * std::log(lambda) - 0.25 * lambda * (r * r - a * a);
}

double DecayBounds::lower(double r) const { return std::exp(log_lower(r)); }
double DecayBounds::upper(double r) const { return std::exp(log_upper(r)); }

OverlapReport overlap_well_integral(const GroundState& gs) {
    OverlapReport out;
    const double a = gs.config.well.radius;
    const double depth = gs.config.well.depth;
    for (const auto& [r, v] : gs.interior_samples)
        out.phi_sup = std::max(out.phi_sup, v);
    if (depth == 0.0) return out; // v == 0: zero integrand
    // integral_0^a phi(r) * (-v(r)) * r dr with the analytic interior form.
    const int panels = 16;
    double sum = 0.0;
    const double dp = a / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = (p + 0.5) * dp;
        for (int i = 0; i < gauss::kN; ++i) {
            const double r = c + 0.5 * dp * gauss::kX[i];
            sum += gs.phi(r) * (-depth) * r * gauss::kW[i] * 0.5 * dp;
        }
    }
    if (!(sum > 0.0))
        throw std::runtime_error(
            "overlap_well_integral: non-positive result contradicts "
            "ground-state positivity");
    out.integral = sum;
    return out;
}

std::pair<double, double> normalization_bracket_log(const GroundState& gs) {
    const double lambda = gs.config.lambda;
    const double a = gs.config.well.radius;
    const double vmin = std::abs(gs.config.well.depth);
    const double nu = gs.free_case ? 0.0 : gs.nu;
    if (!(nu > 0.0))
        throw std::invalid_argument(
            "normalization_bracket needs a binding well (nu > 0)");
    const double ts = laplace_tstar(nu, a);
    const double qprime = a * (0.5 + ts); // d/dr of the exterior exponent rate
    const double pref = std::sqrt(
        (2.0 * kPi * a / (nu * qprime)) * (1.0 + ts * ts / (1.0 + 2.0 * ts)));
    const double log_upper =
        std::log(lambda) - std::log(pref) +
        lambda * (0.25 * (1.0 + 2.0 * ts) * a * a +
                  nu * std::log(1.0 + 1.0 / ts));
    const double log_lower =
        -0.5 * std::log(lambda) -
        0.5 * lambda * a * (0.25 * (a - 2.0) * (a - 2.0) + 2.0 * vmin);
    return {log_lower, log_upper};
}

double norm_squared(const GroundState& gs, int refine) {
    const double lambda = gs.config.lambda;
    const double a = gs.config.well.radius;
    LogAccumulator acc;
    auto log_phi2 = [&](double r) { return 2.0 * gs.log_phi(r); };
    if (gs.free_case) {
        accumulate_radial(acc, log_phi2, 0.0, outer_cutoff(lambda, a),
                          64 * refine);
    } else {
        accumulate_radial(acc, log_phi2, 0.0, a, 32 * refine);
        accumulate_radial(acc, log_phi2, a, outer_cutoff(lambda, a),
                          64 * refine);
    }
    return acc.result().value();
}

std::string ground_state_to_json(const GroundState& gs) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config_to_json(gs.config));
    j["e0"] = gs.e0;
    j["alpha"] = gs.alpha;
    j["alpha_in"] = gs.alpha_in;
    j["nu"] = gs.nu;
    j["c_lambda"] = gs.c_lambda;
    j["log_c_lambda"] = gs.log_c_lambda;
    j["log_interior_scale"] = gs.log_interior_scale;
    j["match_residual"] = gs.match_residual;
    j["free_case"] = gs.free_case;
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& [r, v] : gs.interior_samples)
        samples.push_back({r, v});
    j["interior_samples"] = std::move(samples);
    return j.dump(2) + "\n";
}

GroundState ground_state_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    GroundState gs;
    gs.config = config_from_json(j.at("config").dump());
    gs.e0 = j.at("e0").get<double>();
    gs.alpha = j.at("alpha").get<double>();
    gs.alpha_in = j.at("alpha_in").get<double>();
    gs.nu = j.at("nu").get<double>();
    gs.c_lambda = j.at("c_lambda").get<double>();
    gs.log_c_lambda = j.at("log_c_lambda").get<double>();
    gs.log_interior_scale = j.at("log_interior_scale").get<double>();
    gs.match_residual = j.at("match_residual").get<double>();
    gs.free_case = j.at("free_case").get<bool>();
    for (const auto& row : j.at("interior_samples"))
        gs.interior_samples.emplace_back(row.at(0).get<double>(),
                                         row.at(1).get<double>());
    return gs;
}

} // namespace maghop
