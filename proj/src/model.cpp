#include "maghop/model.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace maghop {

using nlohmann::json;

ValidationReport validate(const ModelConfig& config) {
    ValidationReport rep;
    auto fail = [&](const std::string& msg) {
        rep.valid = false;
        rep.violations.push_back(msg);
    };

    if (!(config.lambda > 0.0)) fail("lambda must be > 0");
    if (config.b < 0.0) fail("b must be > 0 (or 0 for b = lambda)");
    if (!(config.well.depth <= 0.0)) fail("well depth must be <= 0");
    if (!(config.well.radius > 0.0)) fail("well radius must be > 0");
    if (!(config.separation > 0.0)) fail("separation must be > 0");

    const double a = config.well.radius;
    if (config.separation <= 2.0 * a)
        fail("wells overlap: separation <= 2*radius");

    if (!(config.grid.margin_lengths >= 4.0))
        fail("grid margin must be >= 4 magnetic lengths");
    if (config.lambda > 0.0 &&
        config.grid_spacing() > config.magnetic_length() / 8.0 * (1.0 + 1e-12))
        fail("grid spacing must be <= magnetic_length/8");

    const ToleranceSpec& t = config.tolerances;
    if (!(t.quadrature_rel > 0.0 && t.eigen_rel > 0.0 && t.match_rel > 0.0))
        fail("tolerances must be strictly positive");
    if (t.max_iterations <= 0) fail("max_iterations must be positive");

    rep.strict_spacing =
        config.separation > 4.0 * (std::sqrt(std::abs(config.well.depth)) + a);
    return rep;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw std::runtime_error("unknown config key '" + it.key() +
                                     "' in " + where);
    }
}

} // namespace

ModelConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    check_keys(j, {"lambda", "b", "well", "separation", "grid", "tolerances"},
               "config");
    ModelConfig c;
    c.lambda = j.at("lambda").get<double>();
    if (j.contains("b")) c.b = j.at("b").get<double>();
    if (j.contains("separation")) c.separation = j.at("separation").get<double>();
    if (j.contains("well")) {
        const json& w = j.at("well");
        check_keys(w, {"shape", "depth", "radius"}, "well");
        if (w.contains("shape") && w.at("shape").get<std::string>() != "disc")
            throw std::runtime_error("only the disc well shape is implemented");
        c.well.depth = w.at("depth").get<double>();
        c.well.radius = w.at("radius").get<double>();
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"spacing", "margin_lengths", "boundary"}, "grid");
        if (g.contains("spacing")) c.grid.spacing = g.at("spacing").get<double>();
        if (g.contains("margin_lengths"))
            c.grid.margin_lengths = g.at("margin_lengths").get<double>();
        if (g.contains("boundary") &&
            g.at("boundary").get<std::string>() != "dirichlet")
            throw std::runtime_error("only dirichlet boundaries are implemented");
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        check_keys(t, {"quadrature_rel", "eigen_rel", "match_rel",
                       "max_iterations"}, "tolerances");
        if (t.contains("quadrature_rel"))
            c.tolerances.quadrature_rel = t.at("quadrature_rel").get<double>();
        if (t.contains("eigen_rel"))
            c.tolerances.eigen_rel = t.at("eigen_rel").get<double>();
        if (t.contains("match_rel"))
            c.tolerances.match_rel = t.at("match_rel").get<double>();
        if (t.contains("max_iterations"))
            c.tolerances.max_iterations = t.at("max_iterations").get<int>();
    }
    return c;
}

std::string config_to_json(const ModelConfig& c) {
    json j;
    j["lambda"] = c.lambda;
    j["b"] = c.b;
    j["separation"] = c.separation;
    j["well"] = {{"shape", "disc"},
                 {"depth", c.well.depth},
                 {"radius", c.well.radius}};
    j["grid"] = {{"spacing", c.grid.spacing},
                 {"margin_lengths", c.grid.margin_lengths},
                 {"boundary", "dirichlet"}};
    j["tolerances"] = {{"quadrature_rel", c.tolerances.quadrature_rel},
                       {"eigen_rel", c.tolerances.eigen_rel},
                       {"match_rel", c.tolerances.match_rel},
                       {"max_iterations", c.tolerances.max_iterations}};
    return j.dump(2);
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

} // namespace maghop
