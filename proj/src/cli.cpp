#include "otk/cli.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "otk/experiments.hpp"
#include "otk/functionals.hpp"
#include "otk/quadrature.hpp"
#include "otk/spectral.hpp"

namespace otk::cli {
namespace {

using json = nlohmann::ordered_json;
using experiments::ProcessConfig;
using funcspace::FunctionSpec;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw ConfigError(field + ": " + msg);
}

const json& need(const json& j, const std::string& field, const std::string& ctx) {
    const auto it = j.find(field);
    if (it == j.end()) fail(ctx.empty() ? field : ctx + "." + field, "missing");
    return *it;
}

double need_num(const json& j, const std::string& field, const std::string& ctx) {
    const json& v = need(j, field, ctx);
    if (!v.is_number()) fail(ctx + "." + field, "must be a number");
    return v.get<double>();
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------- registry ----------

struct RegistryEntry {
    const char* name;
    const char* schema;
};

constexpr RegistryEntry kProcesses[] = {
    {"bm", "init point|density with compact support; no invariant probability law"},
    {"euler-diffusion",
     "drift {kind: linear|zero, a, b}, sigma {kind: const, v}, bounds [lo, hi] (null = infinite)"},
    {"jump", "rate > 0, P row-stochastic SxS, mu optional (uniform when P symmetric)"},
    {"ou", "no parameters; drift -x, volatility sqrt(2), stationary N(0,1)"},
    {"reflected-bm", "halfwidth M > 0; barriers at -M, M"},
};

constexpr RegistryEntry kFunctions[] = {
    {"constant", "value"},
    {"hermite", "degree k >= 0 (orthonormal basis, mean-zero for k >= 1)"},
    {"holder_abs", "alpha in (0, 1], cap > 0; min(|x|, cap)^alpha"},
    {"identity", "no parameters"},
    {"indicator", "lo; hi optional (default +infinity); right-open [lo, hi)"},
    {"tabulated", "csv path of x,f(x) rows; linear interpolation"},
};

// ---------- parsing ----------

FunctionSpec parse_function(const json& cfg) {
    const json& j = need(cfg, "function", "");
    const std::string name = need(j, "name", "function").get<std::string>();
    if (name == "identity") return FunctionSpec::identity();
    if (name == "constant") return FunctionSpec::constant(need_num(j, "value", "function"));
    if (name == "indicator") {
        const double lo = need_num(j, "lo", "function");
        const double hi = j.contains("hi") ? j["hi"].get<double>() : kInf;
        return FunctionSpec::indicator(lo, hi);
    }
    if (name == "holder_abs") {
        const double alpha = need_num(j, "alpha", "function");
        const double cap = j.contains("cap") ? j["cap"].get<double>() : 4.0;
        return FunctionSpec::holder_abs(alpha, cap);
    }
    if (name == "hermite")
        return FunctionSpec::hermite(static_cast<int>(need_num(j, "degree", "function")));
    if (name == "tabulated") {
        const std::string path = need(j, "csv", "function").get<std::string>();
        std::ifstream in(path);
        if (!in) fail("function.csv", "cannot open " + path);
        std::vector<double> xs, ys;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            double x, y;
            if (std::sscanf(line.c_str(), "%lf,%lf", &x, &y) != 2)
                fail("function.csv", "bad row: " + line);
            xs.push_back(x);
            ys.push_back(y);
        }
        return FunctionSpec::tabulated(std::move(xs), std::move(ys));
    }
    fail("function.name", "unknown function '" + name + "'");
}

processes::InitialLaw parse_init(const json& pj) {
    if (!pj.contains("init")) return processes::InitialLaw::stationary();
    const json& j = pj["init"];
    const std::string kind = need(j, "kind", "process.init").get<std::string>();
    if (kind == "stationary") return processes::InitialLaw::stationary();
    if (kind == "point") return processes::InitialLaw::point(need_num(j, "x", "process.init"));
    if (kind == "density") {
        const std::string dens = need(j, "density", "process.init").get<std::string>();
        const double lo = need_num(j, "lo", "process.init");
        const double hi = need_num(j, "hi", "process.init");
        if (dens == "uniform") {
            const double h = hi - lo;
            return processes::InitialLaw::density([h](double) { return 1.0 / h; }, lo, hi);
        }
        if (dens == "normal") {
            const double mean = need_num(j, "mean", "process.init");
            const double sd = need_num(j, "sd", "process.init");
            return processes::InitialLaw::density(
                [mean, sd](double x) {
                    const double z = (x - mean) / sd;
                    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
                },
                lo, hi);
        }
        fail("process.init.density", "unknown density '" + dens + "'");
    }
    fail("process.init.kind", "unknown kind '" + kind + "'");
}

std::function<double(double)> parse_coeff(const json& j, const std::string& ctx) {
    const std::string kind = need(j, "kind", ctx).get<std::string>();
    if (kind == "zero") return [](double) { return 0.0; };
    if (kind == "const") {
        const double v = need_num(j, "v", ctx);
        return [v](double) { return v; };
    }
    if (kind == "linear") {
        const double a = j.contains("a") ? j["a"].get<double>() : 0.0;
        const double b = j.contains("b") ? j["b"].get<double>() : 0.0;
        return [a, b](double x) { return a * x + b; };
    }
    fail(ctx + ".kind", "unknown coefficient kind '" + kind + "'");
}

ProcessConfig parse_process(const json& cfg) {
    const json& j = need(cfg, "process", "");
    const std::string name = need(j, "name", "process").get<std::string>();
    ProcessConfig out;
    out.init = parse_init(j);
    if (name == "ou") {
        out.model = experiments::OuCfg{};
        return out;
    }
    if (name == "bm") {
        out.model = experiments::BmCfg{};
        if (!j.contains("init")) out.init = processes::InitialLaw::point(0.0);
        return out;
    }
    if (name == "reflected-bm") {
        out.model = experiments::ReflectedBmCfg{need_num(j, "halfwidth", "process")};
        return out;
    }
    if (name == "jump") {
        processes::JumpProcess jp;
        jp.rate_lambda = need_num(j, "rate", "process");
        const json& P = need(j, "P", "process");
        if (!P.is_array() || P.empty()) fail("process.P", "must be a matrix");
        jp.states = static_cast<int>(P.size());
        for (const auto& row : P) {
            if (!row.is_array() || static_cast<int>(row.size()) != jp.states)
                fail("process.P", "must be square");
            for (const auto& v : row) jp.transition_P.push_back(v.get<double>());
        }
        if (j.contains("mu")) {
            for (const auto& v : j["mu"]) jp.stationary_mu.push_back(v.get<double>());
        } else {
            jp.stationary_mu.assign(jp.states, 1.0 / jp.states);
        }
        try {
            jp.validate();
        } catch (const std::domain_error& e) {
            fail("process", e.what());
        }
        out.model = experiments::JumpCfg{std::move(jp)};
        return out;
    }
    if (name == "euler-diffusion") {
        experiments::DiffusionCfg dc;
        dc.b = parse_coeff(need(j, "drift", "process"), "process.drift");
        dc.sigma = parse_coeff(need(j, "sigma", "process"), "process.sigma");
        if (j.contains("bounds")) {
            const json& b = j["bounds"];
            if (!b.is_array() || b.size() != 2) fail("process.bounds", "must be [lo, hi]");
            dc.lo = b[0].is_null() ? -kInf : b[0].get<double>();
            dc.hi = b[1].is_null() ? kInf : b[1].get<double>();
        }
        out.model = std::move(dc);
        return out;
    }
    fail("process.name", "unknown process '" + name + "'");
}

std::vector<std::int64_t> parse_ns(const json& grid) {
    std::vector<std::int64_t> ns;
    for (const auto& v : need(grid, "ns", "grid")) ns.push_back(v.get<std::int64_t>());
    if (ns.empty()) fail("grid.ns", "must be non-empty");
    return ns;
}

// how the target f enters the jump spectral oracle: values at states 0..S-1
std::vector<double> f_on_states(const FunctionSpec& f, int S) {
    std::vector<double> v(static_cast<std::size_t>(S));
    for (int x = 0; x < S; ++x) v[static_cast<std::size_t>(x)] = f(static_cast<double>(x));
    return v;
}

// ---------- canonicalization ----------

json canonicalize_json(json c) {
    if (!c.is_object()) throw ConfigError("config: top level must be a JSON object");
    const std::string kind = need(c, "experiment", "").get<std::string>();
    const bool needs_process = kind != "psi-check" && kind != "norms";
    if (needs_process) (void)need(c, "process", "");
    if (kind != "psi-check") (void)need(c, "function", "");
    if (!c.contains("master_seed")) c["master_seed"] = 0;
    if (!c.contains("reps") && (kind == "rate" || kind == "ergodic" || kind == "oracle" ||
                                kind == "nonstationary"))
        fail("reps", "missing");
    if (!c.contains("output")) c["output"] = json::object();
    if (!c["output"].contains("dir")) c["output"]["dir"] = ".";
    if (!c["output"].contains("prefix")) c["output"]["prefix"] = "otk_" + kind;
    if (kind == "rate" || kind == "oracle" || kind == "nonstationary") {
        json& g = c["grid"];
        if (!g.contains("refinement")) g["refinement"] = 64;
    }
    if (kind == "psi-check" && !c.contains("samples")) c["samples"] = 10000;
    return c;
}

// ---------- output ----------

struct CsvRow {
    double abscissa = 0.0;
    double rms = 0.0;
    double stderr_v = 0.0;
    double bound_value = 0.0;
    double ratio = 0.0;
};

void write_outputs(const json& cfg, const std::vector<CsvRow>& rows, json summary,
                   const std::string& digest, double wall_seconds) {
    const std::string dir = cfg["output"]["dir"].get<std::string>();
    const std::string prefix = cfg["output"]["prefix"].get<std::string>();
    std::filesystem::create_directories(dir);
    const std::string base = dir + "/" + prefix;

    std::ofstream csv(base + ".csv");
    csv << "delta_or_T,rms,stderr,bound_value,ratio\n";
    for (const auto& r : rows)
        csv << fmt17(r.abscissa) << ',' << fmt17(r.rms) << ',' << fmt17(r.stderr_v) << ','
            << fmt17(r.bound_value) << ',' << fmt17(r.ratio) << '\n';

    summary["config_digest"] = digest;
    summary["software_version"] = kVersion;
    summary["wall_time_seconds"] = wall_seconds;
    summary["config"] = cfg;
    std::ofstream js(base + ".json");
    js << summary.dump(2) << '\n';
}

json fit_to_json(const experiments::RateFit& fit) {
    json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    json pts = json::array();
    for (const auto& p : fit.points) {
        json q;
        q["abscissa"] = p.abscissa;
        q["rms"] = p.rms;
        q["rms_std_error"] = p.rms_std_error;
        q["mean_sq"] = p.mean_sq;
        q["excluded"] = p.excluded;
        pts.push_back(q);
    }
    j["points"] = pts;
    return j;
}

// ---------- experiment runners; each returns (rows, summary, ok) ----------

struct RunResult {
    std::vector<CsvRow> rows;
    json summary;
    bool checks_passed = true;
};

double resolve_norm(const json& check, const ProcessConfig& pc, const FunctionSpec& f,
                    double s) {
    const json& nv = need(check, "norm", "check");
    if (nv.is_number()) return nv.get<double>();
    if (nv.is_string() && nv.get<std::string>() == "ds") {
        if (std::holds_alternative<experiments::OuCfg>(pc.model)) {
            const int K = (f.kind() == funcspace::FuncKind::indicator) ? 512 : 128;
            const auto model = spectral::hermite_decompose(f, K, std::max(2 * K, 512));
            return spectral::ds_norm(model, s).value;
        }
        if (const auto* jc = std::get_if<experiments::JumpCfg>(&pc.model)) {
            const auto model =
                spectral::jump_decompose(jc->jp, f_on_states(f, jc->jp.states));
            return spectral::ds_norm(model, s).value;
        }
        fail("check.norm", "'ds' needs an ou or jump process");
    }
    fail("check.norm", "must be a number or 'ds'");
}

RunResult run_rate(const json& cfg, const ProcessConfig& pc, const FunctionSpec& f,
                   SeedSpec seed, std::size_t reps) {
    const json& grid = need(cfg, "grid", "");
    const double T = need_num(grid, "T", "grid");
    const auto ns = parse_ns(grid);
    const int m = grid["refinement"].get<int>();
    const auto fit = experiments::rate_sweep(pc, f, T, ns, m, reps, seed);

    RunResult out;
    out.summary = fit_to_json(fit);
    double s = 1.0, norm = 1.0, constant = 8.0;
    bool have_bound = false;
    if (cfg.contains("check")) {
        const json& check = cfg["check"];
        if (check.contains("slope_window")) {
            const double lo = check["slope_window"][0].get<double>();
            const double hi = check["slope_window"][1].get<double>();
            const bool ok = fit.slope >= lo && fit.slope <= hi;
            out.summary["slope_ok"] = ok;
            out.checks_passed = out.checks_passed && ok;
        }
        if (check.contains("s") && check.contains("norm")) {
            s = check["s"].get<double>();
            norm = resolve_norm(check, pc, f, s);
            constant = check.contains("bound_constant") ? check["bound_constant"].get<double>()
                                                        : 8.0;
            const auto bound = experiments::bound_check(fit, T, s, norm, constant);
            out.summary["bound_ok"] = bound.ok;
            out.summary["bound_max_ratio"] = bound.max_ratio;
            out.summary["bound_norm_value"] = norm;
            out.checks_passed = out.checks_passed && bound.ok;
            have_bound = true;
        }
        if (check.contains("r_squared_min")) {
            const bool ok = fit.r_squared >= check["r_squared_min"].get<double>();
            out.summary["r_squared_ok"] = ok;
            out.checks_passed = out.checks_passed && ok;
        }
    }
    for (const auto& p : fit.points) {
        CsvRow row;
        row.abscissa = p.abscissa;
        row.rms = p.rms;
        row.stderr_v = p.rms_std_error;
        if (have_bound) {
            row.bound_value = constant * norm * std::sqrt(T) * std::pow(p.abscissa, 0.5 * (1 + s));
            row.ratio = p.rms / (norm * std::sqrt(T) * std::pow(p.abscissa, 0.5 * (1 + s)));
        }
        out.rows.push_back(row);
    }
    return out;
}

RunResult run_ergodic(const json& cfg, const ProcessConfig& pc, const FunctionSpec& f,
                      SeedSpec seed, std::size_t reps) {
    const json& grid = need(cfg, "grid", "");
    std::vector<double> Ts;
    for (const auto& v : need(grid, "Ts", "grid")) Ts.push_back(v.get<double>());
    const double delta = need_num(grid, "delta", "grid");
    const auto fit = experiments::ergodic_sweep(pc, f, Ts, delta, reps, seed);

    RunResult out;
    out.summary = fit_to_json(fit);
    if (cfg.contains("check") && cfg["check"].contains("slope_window")) {
        const double lo = cfg["check"]["slope_window"][0].get<double>();
        const double hi = cfg["check"]["slope_window"][1].get<double>();
        const bool ok = fit.slope >= lo && fit.slope <= hi;
        out.summary["slope_ok"] = ok;
        out.checks_passed = ok;
    }
    for (const auto& p : fit.points) {
        CsvRow row;
        row.abscissa = p.abscissa;
        row.rms = p.rms;
        row.stderr_v = p.rms_std_error;
        out.rows.push_back(row);
    }
    return out;
}

RunResult run_oracle(const json& cfg, const ProcessConfig& pc, const FunctionSpec& f,
                     SeedSpec seed, std::size_t reps) {
    const json& grid = need(cfg, "grid", "");
    const double T = need_num(grid, "T", "grid");
    const auto ns = parse_ns(grid);
    const int m = grid["refinement"].get<int>();
    const double sigma_window =
        cfg.contains("check") && cfg["check"].contains("sigma_window")
            ? cfg["check"]["sigma_window"].get<double>()
            : 3.0;

    spectral::SpectralModel model;
    std::optional<double> dual;  // matrix-exponential route for jump chains
    const experiments::JumpCfg* jc = std::get_if<experiments::JumpCfg>(&pc.model);
    if (std::holds_alternative<experiments::OuCfg>(pc.model)) {
        int K = 128, nq = 512;
        if (f.kind() == funcspace::FuncKind::indicator) K = 512, nq = 1280;
        if (cfg.contains("spectral")) {
            K = cfg["spectral"].value("K", K);
            nq = cfg["spectral"].value("quad_nodes", std::max(2 * K, nq));
        }
        model = spectral::hermite_decompose(f, K, nq);
    } else if (jc != nullptr) {
        model = spectral::jump_decompose(jc->jp, f_on_states(f, jc->jp.states));
    } else {
        fail("process.name", "oracle experiment needs an ou or jump process");
    }

    RunResult out;
    json points = json::array();
    for (const std::int64_t n : ns) {
        const TimeGrid g = make_grid(T, n);
        const auto est = experiments::mc_l2_error(pc, f, g, m, reps, seed);
        const double exact = spectral::exact_sq_error(model, g);
        const double z = est.std_error > 0.0 ? (est.mean_sq - exact) / est.std_error : 0.0;
        const bool ok = std::fabs(z) <= sigma_window;
        out.checks_passed = out.checks_passed && ok;
        json p;
        p["n"] = n;
        p["mc_mean_sq"] = est.mean_sq;
        p["mc_std_error"] = est.std_error;
        p["exact_sq_error"] = exact;
        p["z_score"] = z;
        p["agrees"] = ok;
        if (jc != nullptr) {
            const double brute = spectral::exact_sq_error_jump_bruteforce(
                jc->jp, f_on_states(f, jc->jp.states), g);
            p["bruteforce_sq_error"] = brute;
            const bool dual_ok = std::fabs(brute - exact) <= 1e-8 * std::fabs(brute);
            p["dual_oracle_ok"] = dual_ok;
            out.checks_passed = out.checks_passed && dual_ok;
            dual = brute;
        }
        points.push_back(p);
        CsvRow row;
        row.abscissa = g.delta;
        row.rms = std::sqrt(std::max(est.mean_sq, 0.0));
        row.stderr_v = est.mean_sq > 0.0 ? est.std_error / (2.0 * row.rms) : 0.0;
        row.bound_value = std::sqrt(std::max(exact, 0.0));
        row.ratio = z;
        out.rows.push_back(row);
    }
    out.summary["points"] = points;
    out.summary["parseval_defect"] = model.parseval_defect();
    out.summary["sigma_window"] = sigma_window;
    (void)dual;
    return out;
}

// quadrature oracle used by psi-check (independent of the closed forms)
std::complex<double> psi_diag_quad(std::complex<double> lam, std::int64_t n, double delta) {
    const auto& rule = otk::quad::gauss_legendre(48);
    std::complex<double> tri = 0.0, single = 0.0;
    for (int i = 0; i < 48; ++i) {
        const double h = 0.5 * delta * (rule.nodes[i] + 1.0);
        const double wh = 0.5 * delta * rule.weights[i];
        std::complex<double> inner = 0.0;
        for (int j = 0; j < 48; ++j) {
            const double t = 0.5 * (rule.nodes[j] + 1.0);
            inner += 0.5 * rule.weights[j] * (std::exp(lam * h * (1.0 - t)) - 1.0);
        }
        tri += wh * h * inner;
        single += wh * (1.0 - std::exp(lam * h));
    }
    return 2.0 * static_cast<double>(n) * (tri + delta * single);
}

RunResult run_psi_check(const json& cfg, SeedSpec seed) {
    const std::size_t samples = cfg["samples"].get<std::size_t>();
    std::int64_t n = 16;
    double T = 1.0;
    if (cfg.contains("grid")) {
        const json& grid = cfg["grid"];
        if (grid.contains("ns")) n = grid["ns"][0].get<std::int64_t>();
        if (grid.contains("T")) T = grid["T"].get<double>();
    }
    const double delta = T / static_cast<double>(n);

    std::mt19937_64 gen(seed.master_seed);
    std::uniform_real_distribution<double> logmod(std::log(1e-6), std::log(1e6));
    std::uniform_real_distribution<double> angle(M_PI / 2.0, 3.0 * M_PI / 2.0);
    std::uniform_real_distribution<double> sdist(0.0, 1.0);

    std::size_t exp_violations = 0, psi_violations = 0, erg_violations = 0;
    double max_ratio_exp = 0.0, max_ratio_psi = 0.0, offdiag_constant = 0.0;
    const double erg_constant = 4.0;  // |Psi| <= 4 /(|lambda| T) observed envelope, x2 slack
    for (std::size_t i = 0; i < samples; ++i) {
        const std::complex<double> z = std::polar(std::exp(logmod(gen)), angle(gen));
        const double s = sdist(gen);
        const double r1 = std::abs(1.0 - std::exp(z)) / (2.0 * std::pow(std::abs(z), s));
        max_ratio_exp = std::max(max_ratio_exp, r1);
        if (r1 > 1.0 + 1e-12) ++exp_violations;

        const std::complex<double> lam = z / delta;
        const double psi = std::abs(spectral::psi_diag(lam, n, delta));
        const double env = 4.0 * static_cast<double>(n) * std::pow(delta, 2.0 + s) *
                           std::pow(std::abs(lam), s);
        const double r2 = psi / env;
        max_ratio_psi = std::max(max_ratio_psi, r2);
        if (r2 > 1.0 + 1e-12) ++psi_violations;

        const double off = std::abs(spectral::psi_offdiag(lam, n, delta));
        offdiag_constant = std::max(
            offdiag_constant, off / (T * std::pow(std::abs(lam), s) * std::pow(delta, 1.0 + s)));

        const double erg = std::abs(spectral::psi_ergodic(lam, T));
        if (erg > erg_constant / (std::abs(lam) * T) + 1e-12) ++erg_violations;
    }

    // closed form vs quadrature on moderate moduli
    double max_quad_rel = 0.0;
    std::uniform_real_distribution<double> logmod2(std::log(1e-3), std::log(20.0));
    for (int i = 0; i < 64; ++i) {
        const std::complex<double> z = std::polar(std::exp(logmod2(gen)), angle(gen));
        const std::complex<double> lam = z / delta;
        const std::complex<double> closed = spectral::psi_diag(lam, n, delta);
        const std::complex<double> q = psi_diag_quad(lam, n, delta);
        max_quad_rel = std::max(max_quad_rel, std::abs(closed - q) / std::abs(q));
    }

    RunResult out;
    out.summary["samples"] = samples;
    out.summary["exp_bound_violations"] = exp_violations;
    out.summary["psi_bound_violations"] = psi_violations;
    out.summary["ergodic_bound_violations"] = erg_violations;
    out.summary["max_exp_bound_ratio"] = max_ratio_exp;
    out.summary["max_psi_bound_ratio"] = max_ratio_psi;
    out.summary["offdiag_fitted_constant"] = offdiag_constant;
    out.summary["max_quadrature_rel_error"] = max_quad_rel;
    out.checks_passed = exp_violations == 0 && psi_violations == 0 && erg_violations == 0 &&
                        max_quad_rel <= 1e-8 && std::isfinite(offdiag_constant);

    CsvRow row;
    row.abscissa = delta;
    row.rms = max_ratio_psi;
    row.bound_value = 1.0;
    row.ratio = max_ratio_exp;
    out.rows.push_back(row);
    return out;
}

RunResult run_norms(const json& cfg, const FunctionSpec& f) {
    const json& list = need(cfg, "norms", "");
    RunResult out;
    json entries = json::array();
    for (const auto& nj : list) {
        const std::string kind = need(nj, "kind", "norms[]").get<std::string>();
        json e;
        e["kind"] = kind;
        CsvRow row;
        if (kind == "holder") {
            const double alpha = need_num(nj, "alpha", "norms[]");
            const double lo = nj.contains("domain") ? nj["domain"][0].get<double>() : -8.0;
            const double hi = nj.contains("domain") ? nj["domain"][1].get<double>() : 8.0;
            const int gp = nj.value("grid_points", 512);
            const double v = funcspace::holder_norm(f, alpha, lo, hi, gp);
            e["alpha"] = alpha;
            e["value"] = v;
            row.abscissa = alpha;
            row.rms = v;
        } else if (kind == "sobolev") {
            const double s = need_num(nj, "s", "norms[]");
            const double lo = nj.contains("box") ? nj["box"][0].get<double>() : -32.0;
            const double hi = nj.contains("box") ? nj["box"][1].get<double>() : 32.0;
            const int fft = nj.value("fft_points", 1 << 16);
            const auto v = funcspace::sobolev_norm(f, s, lo, hi, fft);
            e["s"] = s;
            e["value"] = v.value;
            e["tail_warning"] = v.tail_warning;
            row.abscissa = s;
            row.rms = v.value;
        } else if (kind == "h1mu") {
            auto pdf = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); };
            const double v = funcspace::weighted_h1_norm(f, pdf, -12.0, 12.0);
            e["value"] = v;
            row.abscissa = 1.0;
            row.rms = v;
        } else if (kind == "ds") {
            const double s = need_num(nj, "s", "norms[]");
            const int K = nj.value("K", 128);
            const int nq = nj.value("quad_nodes", std::max(2 * K, 512));
            const auto model = spectral::hermite_decompose(f, K, nq);
            const auto v = spectral::ds_norm(model, s);
            e["s"] = s;
            e["value"] = v.value;
            e["truncation_K"] = v.truncation_K;
            e["parseval_defect"] = model.parseval_defect();
            row.abscissa = s;
            row.rms = v.value;
        } else {
            fail("norms[].kind", "unknown norm kind '" + kind + "'");
        }
        entries.push_back(e);
        out.rows.push_back(row);
    }
    out.summary["norms"] = entries;
    return out;
}

RunResult run_nonstationary(const json& cfg, const ProcessConfig& pc, const FunctionSpec& f,
                            SeedSpec seed, std::size_t reps) {
    const json& grid = need(cfg, "grid", "");
    const double T = need_num(grid, "T", "grid");
    const auto ns = parse_ns(grid);
    const int m = grid["refinement"].get<int>();
    const json& check = need(cfg, "check", "");
    const double s = need_num(check, "s", "check");
    const double norm = resolve_norm(check, pc, f, s);
    const double sup_density = need_num(check, "sup_density", "check");
    const double constant = check.value("bound_constant", 8.0);

    RunResult out;

    if (cfg.contains("halfwidths")) {
        // reflected-bm stability across barrier positions
        if (!std::holds_alternative<experiments::ReflectedBmCfg>(pc.model))
            fail("halfwidths", "only meaningful for reflected-bm");
        std::vector<double> Ms;
        for (const auto& v : cfg["halfwidths"]) Ms.push_back(v.get<double>());
        json sweeps = json::array();
        std::vector<std::vector<double>> rms_by_m;
        bool all_ok = true;
        for (const double M : Ms) {
            ProcessConfig pm = pc;
            pm.model = experiments::ReflectedBmCfg{M};
            const auto rep = experiments::nonstationary_check(pm, f, T, ns, m, reps, seed, s,
                                                              norm, sup_density, constant);
            json sj = fit_to_json(rep.fit);
            sj["halfwidth"] = M;
            sj["bound_max_ratio"] = rep.bound.max_ratio;
            sj["bound_ok"] = rep.bound.ok;
            sweeps.push_back(sj);
            all_ok = all_ok && rep.bound.ok;
            std::vector<double> rms;
            for (const auto& p : rep.fit.points) rms.push_back(p.rms);
            rms_by_m.push_back(rms);
            for (const auto& p : rep.fit.points) {
                CsvRow row;
                row.abscissa = p.abscissa;
                row.rms = p.rms;
                row.stderr_v = p.rms_std_error;
                row.bound_value = M;
                out.rows.push_back(row);
            }
        }
        double max_rel_change = 0.0;
        for (std::size_t i = 1; i < rms_by_m.size(); ++i)
            for (std::size_t k = 0; k < rms_by_m[i].size(); ++k)
                max_rel_change = std::max(
                    max_rel_change, std::fabs(rms_by_m[i][k] - rms_by_m[i - 1][k]) /
                                        std::max(rms_by_m[i - 1][k], 1e-300));
        out.summary["sweeps"] = sweeps;
        out.summary["stability_max_rel_change"] = max_rel_change;
        if (check.contains("stability_rel_max")) {
            const bool ok = max_rel_change <= check["stability_rel_max"].get<double>();
            out.summary["stability_ok"] = ok;
            all_ok = all_ok && ok;
        }
        out.checks_passed = all_ok;
        return out;
    }

    const auto rep =
        experiments::nonstationary_check(pc, f, T, ns, m, reps, seed, s, norm, sup_density,
                                         constant);
    out.summary = fit_to_json(rep.fit);
    out.summary["bound_max_ratio"] = rep.bound.max_ratio;
    out.summary["bound_ok"] = rep.bound.ok;
    out.summary["sup_density"] = rep.sup_density;
    out.checks_passed = rep.bound.ok;
    for (const auto& p : rep.fit.points) {
        CsvRow row;
        row.abscissa = p.abscissa;
        row.rms = p.rms;
        row.stderr_v = p.rms_std_error;
        const double envelope =
            std::sqrt(sup_density) * norm * std::sqrt(T) * std::pow(p.abscissa, 0.5 * (1 + s));
        row.bound_value = constant * envelope;
        row.ratio = p.rms / envelope;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace

std::string list_registry() {
    std::ostringstream os;
    os << "processes:\n";
    for (const auto& p : kProcesses)
        os << "  " << p.name << std::string(18 - std::strlen(p.name), ' ') << p.schema << "\n";
    os << "functions:\n";
    for (const auto& f : kFunctions)
        os << "  " << f.name << std::string(18 - std::strlen(f.name), ' ') << f.schema << "\n";
    return os.str();
}

std::string canonical_config(const std::string& config_text) {
    json c;
    try {
        c = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return canonicalize_json(std::move(c)).dump(2);
}

std::string config_digest(const std::string& config_text) {
    return experiments::digest_string(canonical_config(config_text));
}

int run_config_file(const std::string& path, const RunOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();

    json cfg;
    try {
        cfg = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    cfg = canonicalize_json(std::move(cfg));
    if (overrides.master_seed) cfg["master_seed"] = *overrides.master_seed;
    if (overrides.reps) cfg["reps"] = *overrides.reps;
    if (overrides.out_dir) cfg["output"]["dir"] = *overrides.out_dir;
    if (overrides.threads) experiments::set_worker_threads(*overrides.threads);

    const std::string digest = experiments::digest_string(cfg.dump(2));
    const std::string kind = cfg["experiment"].get<std::string>();
    const SeedSpec seed{cfg["master_seed"].get<std::uint64_t>(), 0};
    const std::size_t reps = cfg.contains("reps") ? cfg["reps"].get<std::size_t>() : 0;

    const auto t0 = std::chrono::steady_clock::now();
    RunResult result;
    try {
        if (kind == "rate") {
            result = run_rate(cfg, parse_process(cfg), parse_function(cfg), seed, reps);
        } else if (kind == "ergodic") {
            result = run_ergodic(cfg, parse_process(cfg), parse_function(cfg), seed, reps);
        } else if (kind == "oracle") {
            result = run_oracle(cfg, parse_process(cfg), parse_function(cfg), seed, reps);
        } else if (kind == "psi-check") {
            result = run_psi_check(cfg, seed);
        } else if (kind == "norms") {
            result = run_norms(cfg, parse_function(cfg));
        } else if (kind == "nonstationary") {
            result = run_nonstationary(cfg, parse_process(cfg), parse_function(cfg), seed, reps);
        } else {
            fail("experiment", "unknown experiment kind '" + kind + "'");
        }
    } catch (const std::domain_error& e) {
        // invalid parameter combination reached the library
        throw ConfigError(e.what());
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    result.summary["experiment"] = kind;
    result.summary["checks_passed"] = result.checks_passed;
    write_outputs(cfg, result.rows, std::move(result.summary), digest, wall);
    return result.checks_passed ? 0 : 2;
}

}  // namespace otk::cli
