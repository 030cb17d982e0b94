// maghop: batch front-end for the magnetic double-well toolkit.
// Subcommands: ground-state, hopping, splitting, bounds, reduce,
// landau-check, sweep. Exit codes: 0 all checks pass, 1 checks ran with
// failures, 2 invalid config, 3 solver non-convergence.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "maghop/frozen.hpp"
#include "maghop/hopping.hpp"
#include "maghop/model.hpp"
#include "maghop/planar.hpp"
#include "maghop/radial.hpp"
#include "maghop/reduction.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace maghop;

namespace {

constexpr const char* kVersion = "maghop 1.0.0";
constexpr int kExitOk = 0;
constexpr int kExitCheckFail = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitNoConverge = 3;

struct CommonOpts {
    std::string config;
    std::string out = ".";
    std::string format = "csv";
    std::string cache;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string fnv1a_hex(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

// command manifest: every output file listed, config hash byte-exact
struct Manifest {
    std::string command;
    std::string config_hash;
    std::string started = iso_now();
    std::vector<std::string> outputs;
    std::vector<std::pair<std::string, bool>> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.second) return false;
        return true;
    }
    void write(const std::string& out_dir) const {
        json j;
        j["command"] = command;
        j["config_hash"] = config_hash;
        j["tool_version"] = kVersion;
        j["started"] = started;
        j["finished"] = iso_now();
        j["outputs"] = outputs;
        json jc = json::object();
        for (const auto& c : checks) jc[c.first] = c.second ? "pass" : "fail";
        j["checks"] = jc;
        std::ofstream f(fs::path(out_dir) / "manifest.json");
        f << j.dump(2) << "\n";
    }
};

void write_text(Manifest& man, const std::string& out_dir,
                const std::string& name, const std::string& text) {
    fs::create_directories(out_dir);
    const auto path = fs::path(out_dir) / name;
    std::ofstream f(path);
    f << text;
    man.outputs.push_back(path.string());
}

// csv rows -> json array-of-objects when --format json is chosen
std::string render(const std::string& format,
                   const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
    if (format == "json") {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj = json::object();
            for (size_t i = 0; i < header.size(); ++i)
                obj[header[i]] = row[i];
            arr.push_back(obj);
        }
        return arr.dump(2) + "\n";
    }
    std::ostringstream ss;
    for (size_t i = 0; i < header.size(); ++i)
        ss << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (size_t i = 0; i < row.size(); ++i)
            ss << row[i] << (i + 1 < row.size() ? "," : "\n");
    return ss.str();
}

std::string table_name(const std::string& stem, const std::string& format) {
    return stem + (format == "json" ? ".json" : ".csv");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ModelConfig parse_config(const std::string& raw) {
    try {
        return config_from_json(raw);
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what()); // schema errors -> exit 2
    }
}

ModelConfig load_validated(const std::string& path, std::string& raw) {
    raw = read_file(path);
    ModelConfig c = parse_config(raw);
    auto rep = validate(c);
    if (!rep.valid) {
        std::string msg = "invalid config:";
        for (const auto& v : rep.violations) msg += " " + v;
        throw std::invalid_argument(msg);
    }
    return c;
}

// ground states cached per (well, lambda, b): sweeps over |d| reuse one solve
GroundState cached_ground_state(const ModelConfig& c,
                                const std::string& cache_dir) {
    if (cache_dir.empty()) return solve_ground_state(c);
    const std::string key = fnv1a_hex(
        fmt(c.lambda) + "|" + fmt(c.field()) + "|" + fmt(c.well.depth) + "|" +
        fmt(c.well.radius));
    fs::create_directories(cache_dir);
    const auto path = fs::path(cache_dir) / ("gs_" + key + ".json");
    if (fs::exists(path)) return ground_state_from_json(read_file(path));
    GroundState gs = solve_ground_state(c);
    std::ofstream f(path);
    f << ground_state_to_json(gs);
    return gs;
}

std::vector<std::string> hopping_row(const ModelConfig& c,
                                     const HoppingResult& hop) {
    return {fmt(c.lambda),
            fmt(c.separation),
            fmt(hop.rho_bessel),
            fmt(hop.rho_angular),
            fmt(hop.rho_direct.real()),
            fmt(hop.rho_direct.imag()),
            fmt(hop.lower_bound_log),
            fmt(hop.upper_bound_log),
            fmt(hop.gamma0_effective)};
}

const std::vector<std::string> kHoppingHeader = {
    "lambda",         "dist",           "rho_bessel",
    "rho_angular",    "rho_direct_re",  "rho_direct_im",
    "log_lower",      "log_upper",      "gamma0_effective"};

bool hopping_routes_agree(const HoppingResult& hop) {
    const double r1 = std::abs(hop.rho_bessel);
    const double r2 = std::abs(hop.rho_angular);
    const double r3 = std::abs(hop.rho_direct);
    const double scale = std::max({r1, r2, r3, 1e-300});
    const bool agree = std::abs(r1 - r2) <= 1e-4 * scale &&
                       std::abs(r1 - r3) <= 1e-4 * scale &&
                       std::abs(r2 - r3) <= 1e-4 * scale;
    return agree && std::abs(hop.rho_direct.imag()) <= 1e-8 * scale;
}

int run_ground_state(const CommonOpts& opt, Manifest& man,
                     const ModelConfig& c) {
    GroundState gs = cached_ground_state(c, opt.cache);
    std::vector<std::vector<std::string>> rows;
    rows.push_back({fmt(c.lambda), fmt(gs.e0), fmt(gs.alpha), fmt(gs.nu),
                    fmt(gs.c_lambda), fmt(gs.match_residual)});
    write_text(man, opt.out, table_name("ground_state", opt.format),
               render(opt.format,
                      {"lambda", "e0", "alpha", "nu", "c_lambda",
                       "match_residual"},
                      rows));
    // decay curve out to 2|d|
    std::vector<std::vector<std::string>> curve;
    for (int i = 0; i <= 200; ++i) {
        const double r = 2.0 * c.separation * i / 200.0;
        curve.push_back({fmt(r), fmt(gs.log_phi(r))});
    }
    write_text(man, opt.out, table_name("ground_state_curve", opt.format),
               render(opt.format, {"r", "log_phi"}, curve));
    man.checks.emplace_back("match_residual",
                            gs.match_residual <= 1e-6 || gs.free_case);
    return man.all_pass() ? kExitOk : kExitCheckFail;
}

int run_hopping(const CommonOpts& opt, Manifest& man, const ModelConfig& c) {
    GroundState gs = cached_ground_state(c, opt.cache);
    auto hop = hopping_all_routes(gs, c.separation);
    if (!hop.direct_converged || !hop.angular_converged ||
        !hop.bessel_converged)
        throw std::runtime_error("hopping quadrature did not converge");
    write_text(man, opt.out, table_name("hopping", opt.format),
               render(opt.format, kHoppingHeader, {hopping_row(c, hop)}));
    // exit criterion is route agreement; the envelope columns are reported
    // for plotting (their frozen prefactors cover the lambda >= 8 grid)
    man.checks.emplace_back("routes_agree", hopping_routes_agree(hop));
    return man.all_pass() ? kExitOk : kExitCheckFail;
}

int run_splitting(const CommonOpts& opt, Manifest& man,
                  const ModelConfig& c) {
    auto rep = splitting(c);
    if (!rep.eigen.converged)
        throw std::runtime_error("planar eigensolver did not converge");
    std::vector<std::vector<std::string>> rows;
    rows.push_back({fmt(c.lambda), fmt(c.separation), fmt(rep.E0),
                    fmt(rep.E1), fmt(rep.gap), fmt(rep.rho_abs),
                    fmt(rep.ratio), fmt(rep.lower_bound),
                    fmt(rep.upper_bound), rep.gap_resolved ? "1" : "0"});
    write_text(man, opt.out, table_name("splitting", opt.format),
               render(opt.format,
                      {"lambda", "dist", "E0", "E1", "gap", "rho_abs",
                       "ratio", "lower", "upper", "gap_resolved"},
                      rows));
    man.checks.emplace_back("ratio_window",
                            rep.ratio >= 0.5 && rep.ratio <= 1.5);
    man.checks.emplace_back("bounds_sandwich",
                            rep.lower_bound <= rep.gap &&
                                rep.gap <= rep.upper_bound);
    return man.all_pass() ? kExitOk : kExitCheckFail;
}

int run_bounds(const CommonOpts& opt, Manifest& man, const ModelConfig& c) {
    GroundState gs = cached_ground_state(c, opt.cache);
    auto bounds = decay_bounds(gs);
    const double window = std::log(10.0); // frozen prefactor window
    std::vector<std::vector<std::string>> rows;
    bool ok = true;
    const double a = c.well.radius;
    for (int i = 1; i <= 150; ++i) {
        const double r = a + (2.0 * c.separation - a) * i / 150.0;
        const double lp = gs.log_phi_out(r);
        const double lo = bounds.log_lower(r);
        const double hi = bounds.log_upper(r);
        rows.push_back({fmt(r), fmt(lp), fmt(lo), fmt(hi)});
        if (!(lo - window <= lp && lp <= hi + window)) ok = false;
    }
    write_text(man, opt.out, table_name("bounds", opt.format),
               render(opt.format, {"r", "log_phi_out", "log_lower",
                                   "log_upper"},
                      rows));
    man.checks.emplace_back("decay_sandwich", ok);
    return man.all_pass() ? kExitOk : kExitCheckFail;
}

int run_reduce(const CommonOpts& opt, Manifest& man, const ModelConfig& c) {
    auto red = splitting_from_reduction(c);
    std::vector<std::vector<std::string>> rows;
    rows.push_back({fmt(c.lambda), fmt(c.separation), fmt(red.E0),
                    fmt(red.E1), fmt(red.gap), fmt(red.gap_coarse),
                    fmt(red.gap_fine), fmt(red.rho_abs), fmt(red.max_f),
                    fmt(red.max_g), fmt(red.det_imag_rel),
                    fmt(red.deflation_leak)});
    write_text(man, opt.out, table_name("reduce", opt.format),
               render(opt.format,
                      {"lambda", "dist", "E0", "E1", "gap", "gap_coarse",
                       "gap_fine", "rho_abs", "max_f", "max_g",
                       "det_imag_rel", "deflation_leak"},
                      rows));
    man.checks.emplace_back("reduction_valid", red.valid);
    if (red.valid) {
        man.checks.emplace_back("roots_real", red.det_imag_rel <= 1e-10);
        man.checks.emplace_back("deflation_exact",
                                red.deflation_leak <= 1e-12);
    } else {
        std::fprintf(stderr, "%s\n", red.message.c_str());
    }
    return man.all_pass() ? kExitOk : kExitCheckFail;
}

int run_landau(const CommonOpts& opt, Manifest& man, const ModelConfig& c) {
    auto op = build_hamiltonian(c, Wells::none);
    auto eig = lowest_eigenpairs(op, 1, 0.5 * c.lambda);
    if (!eig.converged)
        throw std::runtime_error("Landau eigensolve did not converge");
    const double e0 = eig.eigenvalues[0];
    const double rel = std::abs(e0 / c.lambda - 1.0);
    std::printf("lowest eigenvalue %.10g  |E0/lambda - 1| = %.3e\n", e0, rel);
    std::vector<std::vector<std::string>> rows;
    rows.push_back({fmt(c.lambda), fmt(e0), fmt(rel)});
    write_text(man, opt.out, table_name("landau", opt.format),
               render(opt.format, {"lambda", "E0", "rel_error"}, rows));
    man.checks.emplace_back("landau_level", rel <= 0.01);
    return man.all_pass() ? kExitOk : kExitCheckFail;
}

// |ratio - 1| non-increasing with at most one inversion (noise floor 0.005),
// final point within +-0.2
bool ratio_trend_ok(const std::vector<double>& ratios) {
    if (ratios.empty()) return false;
    for (double r : ratios)
        if (r < 0.5 || r > 1.5) return false;
    int inversions = 0;
    for (size_t i = 1; i < ratios.size(); ++i) {
        const double prev = std::abs(ratios[i - 1] - 1.0);
        const double cur = std::abs(ratios[i] - 1.0);
        if (cur > prev + 0.005) ++inversions;
    }
    return inversions <= 1 && std::abs(ratios.back() - 1.0) <= 0.2;
}

int run_sweep(const CommonOpts& opt, Manifest& man, const std::string& raw) {
    json j = json::parse(raw);
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "base" && it.key() != "lambda" &&
            it.key() != "separation")
            throw std::invalid_argument("unknown sweep key '" + it.key() +
                                        "'");
    ModelConfig base = parse_config(j.value("base", json::object()).dump());
    std::vector<double> lambdas = j.value("lambda", std::vector<double>{});
    std::vector<double> dists = j.value("separation", std::vector<double>{});
    if (lambdas.empty()) lambdas = {base.lambda};
    if (dists.empty()) dists = {base.separation};

    // hopping table, cartesian over lambda x |d|
    std::vector<std::vector<std::string>> hop_rows;
    bool routes_ok = true;
    for (double lam : lambdas) {
        ModelConfig c = base;
        c.lambda = lam;
        GroundState gs = cached_ground_state(c, opt.cache);
        for (double d : dists) {
            c.separation = d;
            auto hop = hopping_all_routes(gs, d);
            hop_rows.push_back(hopping_row(c, hop));
            if (!hopping_routes_agree(hop)) routes_ok = false;
        }
    }
    write_text(man, opt.out, table_name("sweep_hopping", opt.format),
               render(opt.format, kHoppingHeader, hop_rows));
    man.checks.emplace_back("routes_agree", routes_ok);

    // headline diagnostics per lambda at the first |d|
    std::vector<std::vector<std::string>> diag_rows;
    std::vector<double> ratios;
    bool red_ok = true;
    for (double lam : lambdas) {
        ModelConfig c = base;
        c.lambda = lam;
        c.separation = dists.front();
        auto sp = splitting(c);
        auto red = splitting_from_reduction(c);
        auto probe = resolvent_probe(c, 0.0, false);
        if (!red.valid || !sp.eigen.converged || !probe.converged)
            red_ok = false;
        ratios.push_back(sp.ratio);
        diag_rows.push_back({fmt(lam), fmt(sp.rho_abs), fmt(sp.gap),
                             fmt(red.gap), fmt(sp.ratio), fmt(red.max_f),
                             fmt(red.max_g), fmt(probe.norm_bound)});
    }
    write_text(man, opt.out, table_name("sweep_diagnostics", opt.format),
               render(opt.format,
                      {"lambda", "rho_abs", "gap_planar", "gap_reduction",
                       "ratio", "max_f", "max_g", "resolvent_probe"},
                      diag_rows));
    man.checks.emplace_back("solvers_converged", red_ok);
    man.checks.emplace_back("ratio_trend", ratio_trend_ok(ratios));
    return man.all_pass() ? kExitOk : kExitCheckFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " - magnetic double-well numerical toolkit"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string cmd_name;
    for (const char* name :
         {"ground-state", "hopping", "splitting", "bounds", "reduce",
          "landau-check", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opt.config, "JSON config path")
            ->required();
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--format", opt.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--cache", opt.cache, "ground-state cache directory");
        sub->callback([&cmd_name, name] { cmd_name = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitBadConfig : kExitOk;
    }

    Manifest man;
    man.command = cmd_name;
    int code = kExitOk;
    try {
        std::string raw;
        if (cmd_name == "sweep") {
            raw = read_file(opt.config);
            man.config_hash = fnv1a_hex(raw);
            code = run_sweep(opt, man, raw);
        } else {
            ModelConfig c = load_validated(opt.config, raw);
            man.config_hash = fnv1a_hex(raw);
            if (cmd_name == "ground-state")
                code = run_ground_state(opt, man, c);
            else if (cmd_name == "hopping")
                code = run_hopping(opt, man, c);
            else if (cmd_name == "splitting")
                code = run_splitting(opt, man, c);
            else if (cmd_name == "bounds")
                code = run_bounds(opt, man, c);
            else if (cmd_name == "reduce")
                code = run_reduce(opt, man, c);
            else if (cmd_name == "landau-check")
                code = run_landau(opt, man, c);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitBadConfig;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitNoConverge;
    }
    man.write(opt.out);
    return code;
}
