#include "kronmde/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "kronmde/model_io.hpp"
#include "kronmde/output.hpp"
#include "kronmde/sampler.hpp"
#include "kronmde/stability.hpp"

namespace kronmde {

using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kNoConverge = 3;
constexpr int kPartialGrid = 4;
constexpr int kVerifyFail = 5;

double parse_real_strict(const std::string& s, const std::string& what) {
    if (s.empty()) throw ContractError("cannot parse " + what + ": empty field");
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size())
        throw ContractError("cannot parse " + what + ": '" + s + "'");
    return v;
}

// Seconds on the wall since start; volatile, header-only.
struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

int default_threads() {
    if (const char* env = std::getenv("KRONMDE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
        std::cerr << "warning: ignoring invalid KRONMDE_THREADS='" << env << "'\n";
    }
    return 1;
}

KroneckerModel load_and_validate(const std::string& path) {
    KroneckerModel model = load_model_file(path);
    ValidationReport rep = validate(model);
    if (!rep.ok()) {
        std::string msg = "model validation failed:";
        for (const auto& e : rep.dimension_errors) msg += "\n  [dimension] " + e;
        for (const auto& e : rep.bound_violations) msg += "\n  [bound] " + e;
        throw ContractError(msg);
    }
    return model;
}

// Hermitian models solve directly; anything else needs a --zeta to hermitize.
HermitianDysonData resolve_data(const KroneckerModel& model, bool have_zeta,
                                cx zeta) {
    if (have_zeta) return hermitize(model, zeta);
    if (is_hermitian_model(model)) return direct_dyson_data(model);
    throw ContractError(
        "model is not Hermitian; pass --zeta to work with the Hermitization");
}

ordered_json complex_json(cx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json matrix_json(const Mat& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

ordered_json base_report(const char* command, const KroneckerModel& model,
                         ordered_json config) {
    ordered_json j;
    j["tool"] = std::string(version_string);
    j["command"] = command;
    j["model_hash"] = model_hash(model);
    j["config"] = std::move(config);
    return j;
}

void finish_report(ordered_json& j, const Stopwatch& sw) {
    j["wall_clock_seconds"] = sw.seconds();
    j["timestamp"] = utc_timestamp();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        write_text_file(out_path, text);
    }
}

void emit_report(ordered_json& j, const Stopwatch& sw, const std::string& out_path) {
    finish_report(j, sw);
    emit(j.dump(2) + "\n", out_path);
}

void stamp_csv_meta(CsvReport& csv, const KroneckerModel& model,
                    const ordered_json& config, const Stopwatch& sw) {
    csv.meta("model_hash", model_hash(model));
    csv.meta("config", config.dump());
    csv.volatile_meta("timestamp", utc_timestamp());
    csv.volatile_meta("wall_clock_seconds", format_double(sw.seconds()));
}

SolverOptions solver_options_from(double tol, int max_iter, double damping,
                                  double eta_start, double eta_ratio) {
    SolverOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    opts.damping_init = damping;
    opts.eta_start = eta_start;
    opts.eta_ratio = eta_ratio;
    return opts;
}

Distribution parse_distribution(const std::string& name) {
    if (name == "complex-gaussian") return Distribution::ComplexGaussian;
    if (name == "real-gaussian") return Distribution::RealGaussian;
    if (name == "rademacher") return Distribution::Rademacher;
    throw ContractError("unknown distribution '" + name +
                        "' (complex-gaussian|real-gaussian|rademacher)");
}

// ---------------------------------------------------------------- preset --

int cmd_preset(const std::string& name, bool list, int N, const std::string& out) {
    if (list) {
        std::string text;
        for (const auto& n : preset_names()) text += n + "\n";
        emit(text, out);
        return kOk;
    }
    if (name.empty()) throw ContractError("preset: give a name or --list");
    KroneckerModel model = make_preset(name, N);
    emit(serialize_model(model), out);
    return kOk;
}

// ----------------------------------------------------------------- solve --

int cmd_solve(const std::string& model_path, const std::string& z_str,
              const std::string& zeta_str, const SolverOptions& opts,
              const std::string& out) {
    Stopwatch sw;
    KroneckerModel model = load_and_validate(model_path);
    const bool have_zeta = !zeta_str.empty();
    const cx zeta = have_zeta ? parse_complex(zeta_str) : cx{0, 0};
    const cx z = parse_complex(z_str);
    if (!(z.imag() > 0)) throw ContractError("z must lie in the upper half-plane");

    HermitianDysonData data = resolve_data(model, have_zeta, zeta);
    ContinuationResult cres = solve_continuation(data, z.real(), {z.imag()}, opts);
    const MdeSolution& sol = cres.at_targets.at(0);

    ordered_json config;
    config["model"] = model_path;
    config["z"] = z_str;
    config["zeta"] = have_zeta ? ordered_json(zeta_str) : ordered_json(nullptr);
    config["tol"] = opts.tol;
    config["max_iter"] = opts.max_iter;
    config["damping"] = opts.damping_init;
    config["eta_start"] = opts.eta_start;
    config["eta_ratio"] = opts.eta_ratio;

    ordered_json j = base_report("solve", model, config);
    j["z"] = complex_json(z);
    j["dimensions"] = {{"N", data.N}, {"K", data.K}};
    j["converged"] = sol.converged;
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    j["min_im_eig"] = sol.min_im_eig;
    j["rho"] = rho_of(sol);
    ordered_json blocks = ordered_json::array();
    for (const auto& b : sol.m.b) blocks.push_back(matrix_json(b));
    j["m"] = std::move(blocks);
    emit_report(j, sw, out);

    if (!sol.converged) {
        std::cerr << "solve: not converged (residual " << sol.residual << ")\n";
        return kNoConverge;
    }
    return kOk;
}

// ------------------------------------------------------------------- dos --

int cmd_dos(const std::string& model_path, const std::string& erange_str,
            const std::string& zeta_str, double eta, const SolverOptions& sopts,
            const std::string& out) {
    Stopwatch sw;
    KroneckerModel model = load_and_validate(model_path);
    const bool have_zeta = !zeta_str.empty();
    const cx zeta = have_zeta ? parse_complex(zeta_str) : cx{0, 0};
    if (!(eta > 0)) throw ContractError("eta must be positive");

    HermitianDysonData data = resolve_data(model, have_zeta, zeta);

    double e0, e1;
    int points;
    if (erange_str.empty()) {
        auto bracket = support_bracket(data);
        e0 = bracket.first;
        e1 = bracket.second;
        points = 601;
    } else {
        // reuse the 1-D half of the grid syntax: "min:max:count"
        GridSpec g = parse_grid(erange_str + ",0:0:1");
        e0 = g.re0;
        e1 = g.re1;
        points = g.nre;
    }

    ScanOptions opts;
    opts.solver = sopts;
    DosCurve curve = dos_curve(data, e0, e1, points, eta, opts);

    ordered_json config;
    config["model"] = model_path;
    config["zeta"] = have_zeta ? ordered_json(zeta_str) : ordered_json(nullptr);
    config["e_min"] = e0;
    config["e_max"] = e1;
    config["points"] = points;
    config["eta"] = eta;
    config["tol"] = sopts.tol;

    CsvReport csv(std::string(version_string) + " dos");
    stamp_csv_meta(csv, model, config, sw);
    csv.columns({"E", "rho", "max_im_over_eta"});
    for (std::size_t i = 0; i < curve.E_grid.size(); ++i)
        csv.row({format_double(curve.E_grid[i]), format_double(curve.rho[i]),
                 format_double(curve.max_im_over_eta[i])});
    emit(csv.str(), out);

    if (curve.any_failed) {
        std::cerr << "dos: some grid points failed to converge (NaN rows)\n";
        return kPartialGrid;
    }
    return kOk;
}

// --------------------------------------------------------------- support --

int cmd_support(const std::string& model_path, const std::string& zeta_str,
                double step, double eta_floor, double threshold,
                const SolverOptions& sopts, const std::string& out) {
    Stopwatch sw;
    KroneckerModel model = load_and_validate(model_path);
    const bool have_zeta = !zeta_str.empty();
    const cx zeta = have_zeta ? parse_complex(zeta_str) : cx{0, 0};
    if (!(step > 0)) throw ContractError("step must be positive");

    HermitianDysonData data = resolve_data(model, have_zeta, zeta);
    auto bracket = support_bracket(data);

    ScanOptions opts;
    opts.eta_floor = eta_floor;
    opts.growth_threshold = threshold;
    opts.solver = sopts;
    SupportEstimate est = estimate_support(data, bracket.first, bracket.second, step, opts);

    ordered_json config;
    config["model"] = model_path;
    config["zeta"] = have_zeta ? ordered_json(zeta_str) : ordered_json(nullptr);
    config["step"] = step;
    config["eta_floor"] = eta_floor;
    config["threshold"] = threshold;

    ordered_json j = base_report("support", model, config);
    j["bracket"] = {est.bracket.first, est.bracket.second};
    ordered_json ivals = ordered_json::array();
    for (const auto& iv : est.intervals) ivals.push_back({iv.first, iv.second});
    j["intervals"] = std::move(ivals);
    j["eta_floor"] = est.eta_floor;
    emit_report(j, sw, out);
    return kOk;
}

// -------------------------------------------------------- pseudospectrum --

int cmd_pseudospectrum(const std::string& model_path, const std::string& grid_str,
                       double epsilon, double eta_floor, double threshold,
                       double step, int threads, const SolverOptions& sopts,
                       const std::string& out, const std::string& json_out) {
    Stopwatch sw;
    KroneckerModel model = load_and_validate(model_path);
    if (!(epsilon > 0)) throw ContractError("epsilon must be positive");
    GridSpec grid = parse_grid(grid_str);

    ScanOptions opts;
    opts.eta_floor = eta_floor;
    opts.growth_threshold = threshold;
    opts.step = step;
    opts.threads = threads;
    opts.solver = sopts;
    PseudospectrumGrid ps = pseudospectrum(model, grid, epsilon, opts);

    ordered_json config;
    config["model"] = model_path;
    config["grid"] = grid_str;
    config["epsilon"] = epsilon;
    config["eta_floor"] = eta_floor;
    config["threshold"] = threshold;
    config["step"] = step > 0 ? step : epsilon / 4;
    config["threads"] = threads;

    CsvReport csv(std::string(version_string) + " pseudospectrum");
    stamp_csv_meta(csv, model, config, sw);
    csv.columns({"re", "im", "dist0", "member", "member_tilde"});
    int n_member = 0, n_tilde = 0, n_unknown = 0;
    for (int p = 0; p < grid.size(); ++p) {
        cx zeta = grid.at(p);
        csv.row({format_double(zeta.real()), format_double(zeta.imag()),
                 format_double(ps.dist0[p]), ps.member[p] ? "1" : "0",
                 ps.member_tilde[p] ? "1" : "0"});
        n_member += ps.member[p];
        n_tilde += ps.member_tilde[p];
        n_unknown += ps.unknown[p];
    }
    emit(csv.str(), out);

    if (!json_out.empty()) {
        ordered_json j = base_report("pseudospectrum", model, config);
        j["grid"] = {{"re", {grid.re0, grid.re1, grid.nre}},
                     {"im", {grid.im0, grid.im1, grid.nim}}};
        j["epsilon"] = ps.epsilon;
        j["eta_floor"] = ps.eta_floor;
        j["tilde_threshold"] = ps.tilde_threshold;
        j["member_count"] = n_member;
        j["member_tilde_count"] = n_tilde;
        j["unknown_count"] = n_unknown;
        emit_report(j, sw, json_out);
    }

    if (n_unknown > 0) {
        std::cerr << "pseudospectrum: " << n_unknown
                  << " grid points UNKNOWN (counted as members)\n";
        return kPartialGrid;
    }
    return kOk;
}

// ---------------------------------------------------------------- verify --

struct VerifyFlags {
    double epsilon = 0.1;
    int trials = 5;
    uint64_t seed = 1;
    std::string distribution = "complex-gaussian";
    std::string oracle = "auto";
    double kolmogorov_bound = 0.03;
    double eta = 1e-2;
    int points = 601;
    bool override_caps = false;
    bool skip_global = false;
    bool skip_containment = false;
};

int cmd_verify(const std::string& model_path, const VerifyFlags& vf,
               const SolverOptions& sopts, const std::string& out) {
    Stopwatch sw;
    KroneckerModel model = load_and_validate(model_path);
    if (!(vf.epsilon > 0)) throw ContractError("epsilon must be positive");
    if (vf.trials < 1) throw ContractError("trials must be >= 1");

    SampleConfig cfg;
    cfg.seed = vf.seed;
    cfg.trials = vf.trials;
    cfg.distribution = parse_distribution(vf.distribution);
    cfg.override_caps = vf.override_caps;
    if (vf.override_caps)
        std::cerr << "warning: eigensolver dimension caps overridden; large "
                     "matrices may take a long time\n";

    // Resolve the membership oracle for containment.
    bool have_oracle = false;
    OracleSpec oracle;
    if (!vf.skip_containment) {
        if (vf.oracle == "auto") {
            if (auto zetas = example_zeta_set(model)) {
                oracle.kind = OracleSpec::ExampleSet;
                oracle.zeta_points = *zetas;
                oracle.L = static_cast<double>(model.L());
                have_oracle = true;
            }
        } else if (vf.oracle.rfind("disk:", 0) == 0) {
            oracle.kind = OracleSpec::Disk;
            oracle.radius = parse_real_strict(vf.oracle.substr(5), "disk radius");
            if (!(oracle.radius > 0)) throw ContractError("disk radius must be positive");
            have_oracle = true;
        } else {
            throw ContractError("unknown oracle '" + vf.oracle +
                                "' (auto | disk:RADIUS)");
        }
    }

    const bool hermitian = is_hermitian_model(model);
    const bool run_global = hermitian && !vf.skip_global;
    if (!have_oracle && !run_global)
        throw ContractError(
            "nothing to verify: no membership oracle resolved and the model is "
            "not Hermitian (or --skip-global given)");

    ordered_json config;
    config["model"] = model_path;
    config["epsilon"] = vf.epsilon;
    config["trials"] = vf.trials;
    config["seed"] = vf.seed;
    config["distribution"] = vf.distribution;
    config["oracle"] = vf.oracle;
    config["kolmogorov_bound"] = vf.kolmogorov_bound;
    config["eta"] = vf.eta;
    config["points"] = vf.points;
    config["override_caps"] = vf.override_caps;

    ordered_json j = base_report("verify", model, config);
    bool pass = true;

    if (have_oracle) {
        ContainmentReport rep = containment_report(model, cfg, vf.epsilon, oracle);
        ordered_json jc;
        jc["ran"] = true;
        if (oracle.kind == OracleSpec::ExampleSet) {
            ordered_json pts = ordered_json::array();
            for (cx p : oracle.zeta_points) pts.push_back(complex_json(p));
            jc["oracle"] = {{"kind", "example-set"}, {"zeta_points", pts}, {"L", oracle.L}};
        } else {
            jc["oracle"] = {{"kind", "disk"}, {"radius", oracle.radius}};
        }
        ordered_json jt = ordered_json::array();
        for (const auto& t : rep.trials) {
            ordered_json o;
            o["eigenvalues"] = t.eigenvalue_count;
            o["outside"] = t.outside;
            o["max_distance"] = t.max_distance;
            ordered_json outl = ordered_json::array();
            for (cx w : t.outliers) outl.push_back(complex_json(w));
            o["outliers"] = std::move(outl);
            jt.push_back(std::move(o));
        }
        jc["trials"] = std::move(jt);
        jc["total_outside"] = rep.total_outside;
        jc["outlier_rate"] = rep.outlier_rate;
        jc["pass"] = rep.total_outside == 0;
        j["containment"] = std::move(jc);
        if (rep.total_outside != 0) pass = false;
    } else {
        j["containment"] = {{"ran", false}};
    }

    if (run_global) {
        HermitianDysonData data = direct_dyson_data(model);
        auto bracket = support_bracket(data);
        ScanOptions opts;
        opts.solver = sopts;
        DosCurve curve =
            dos_curve(data, bracket.first, bracket.second, vf.points, vf.eta, opts);
        double dist = global_law_distance(model, cfg, curve, 0);
        ordered_json jg;
        jg["ran"] = true;
        jg["kolmogorov"] = dist;
        jg["bound"] = vf.kolmogorov_bound;
        jg["eta"] = vf.eta;
        jg["points"] = vf.points;
        jg["pass"] = dist < vf.kolmogorov_bound;
        j["global_law"] = std::move(jg);
        if (!(dist < vf.kolmogorov_bound)) pass = false;
    } else {
        j["global_law"] = {{"ran", false}};
    }

    j["pass"] = pass;
    emit_report(j, sw, out);
    if (!pass) {
        std::cerr << "verify: FAILED\n";
        return kVerifyFail;
    }
    return kOk;
}

// -------------------------------------------------------------- diagnose --

int cmd_diagnose(const std::string& model_path, const std::string& z_str,
                 const std::string& zeta_str, const SolverOptions& opts,
                 const std::string& out) {
    Stopwatch sw;
    KroneckerModel model = load_and_validate(model_path);
    const bool have_zeta = !zeta_str.empty();
    const cx zeta = have_zeta ? parse_complex(zeta_str) : cx{0, 0};
    const cx z = parse_complex(z_str);
    if (!(z.imag() > 0)) throw ContractError("z must lie in the upper half-plane");

    HermitianDysonData data = resolve_data(model, have_zeta, zeta);
    ContinuationResult cres = solve_continuation(data, z.real(), {z.imag()}, opts);
    const MdeSolution& sol = cres.at_targets.at(0);

    ordered_json config;
    config["model"] = model_path;
    config["z"] = z_str;
    config["zeta"] = have_zeta ? ordered_json(zeta_str) : ordered_json(nullptr);
    config["tol"] = opts.tol;

    ordered_json j = base_report("diagnose", model, config);
    j["z"] = complex_json(z);
    j["converged"] = sol.converged;
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    j["min_im_eig"] = sol.min_im_eig;

    if (sol.converged) {
        StabilityDiagnostics diag = f_operator_analysis(data, sol);
        j["norm_S_max"] = diag.norm_S_max;
        j["norm_F"] = diag.norm_F;
        j["gap_F"] = diag.gap_F;
        j["gap_identity_residual"] = diag.gap_identity_residual;
        j["power_iterations"] = diag.power_iterations;
        j["decomposition_defect"] = verify_decomposition(data, sol, 3, 12345);
        const long nk2 = static_cast<long>(data.N) * data.K * data.K;
        if (nk2 <= 4096) {
            j["stability_inverse_norm"] = linv_norm_hs(data, sol.m, sol.z);
        }
    }
    emit_report(j, sw, out);
    return sol.converged ? kOk : kNoConverge;
}

}  // namespace

// ----------------------------------------------------------- public API --

cx parse_complex(const std::string& text) {
    std::string s;
    s.reserve(text.size());
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ContractError("cannot parse complex number: empty string");

    if (s.back() != 'i') return {parse_real_strict(s, "complex number"), 0.0};

    std::string body = s.substr(0, s.size() - 1);
    // Split before the sign of the imaginary part: the last '+'/'-' that is
    // neither leading nor part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_value = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_real_strict(t, "imaginary part");
    };
    if (split == std::string::npos) return {0.0, imag_value(body)};
    return {parse_real_strict(body.substr(0, split), "real part"),
            imag_value(body.substr(split))};
}

GridSpec parse_grid(const std::string& text) {
    auto split_on = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t k = 0; k <= s.size(); ++k) {
            if (k == s.size() || s[k] == sep) {
                parts.push_back(s.substr(start, k - start));
                start = k + 1;
            }
        }
        return parts;
    };
    auto axes = split_on(text, ',');
    if (axes.size() != 2)
        throw ContractError("grid must be 're0:re1:n,im0:im1:m', got '" + text + "'");
    auto parse_axis = [&](const std::string& a, const char* name, double& lo,
                          double& hi, int& n) {
        auto f = split_on(a, ':');
        if (f.size() != 3)
            throw ContractError(std::string("grid ") + name +
                                " axis must be 'min:max:count', got '" + a + "'");
        lo = parse_real_strict(f[0], std::string(name) + " min");
        hi = parse_real_strict(f[1], std::string(name) + " max");
        double cnt = parse_real_strict(f[2], std::string(name) + " count");
        n = static_cast<int>(cnt);
        if (n < 1 || cnt != n) throw ContractError(std::string("grid ") + name +
                                                   " count must be a positive integer");
        if (hi < lo) throw ContractError(std::string("grid ") + name + " max < min");
        if (n == 1 && hi != lo)
            throw ContractError(std::string("grid ") + name +
                                " count 1 requires min == max");
    };
    GridSpec g;
    parse_axis(axes[0], "re", g.re0, g.re1, g.nre);
    parse_axis(axes[1], "im", g.im0, g.im1, g.nim);
    return g;
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"self-consistent spectra and pseudospectra of Kronecker random "
                 "matrix models"};
    app.require_subcommand(1);
    const int threads_default = default_threads();

    // shared solver flags
    double tol = 1e-10, damping = 0.5, eta_start = 8.0, eta_ratio = 0.7;
    int max_iter = 50000;
    auto add_solver_flags = [&](CLI::App* sub) {
        sub->add_option("--tol", tol, "convergence tolerance on the residual")
            ->capture_default_str();
        sub->add_option("--max-iter", max_iter, "iteration cap per spectral point")
            ->capture_default_str();
        sub->add_option("--damping", damping, "initial damping of the fixed-point step")
            ->capture_default_str();
        sub->add_option("--eta-start", eta_start, "continuation ladder start height")
            ->capture_default_str();
        sub->add_option("--eta-ratio", eta_ratio, "continuation descent ratio")
            ->capture_default_str();
    };

    std::string model_path, out_path, json_out;

    // preset
    auto* preset = app.add_subcommand("preset", "emit a built-in model file");
    std::string preset_name;
    bool preset_list = false;
    int preset_n = 100;
    preset->add_option("name", preset_name,
                       "wigner|ginibre|fig1a|fig1b|fig1c|fig1d|two-band");
    preset->add_flag("--list", preset_list, "list preset names");
    preset->add_option("--n", preset_n, "random-matrix dimension N")
        ->capture_default_str();
    preset->add_option("-o,--output", out_path, "output path (default stdout)");

    // solve
    auto* solve = app.add_subcommand("solve", "solve the Dyson equation at one z");
    std::string z_str = "i", zeta_str;
    solve->add_option("-m,--model", model_path, "model JSON file")->required();
    solve->add_option("--z", z_str, "spectral parameter 'a+bi', Im z > 0")
        ->capture_default_str();
    solve->add_option("--zeta", zeta_str,
                      "hermitize the model at this shift (required for "
                      "non-Hermitian models)");
    solve->add_option("-o,--output", out_path, "report path (default stdout)");
    add_solver_flags(solve);

    // dos
    auto* dos = app.add_subcommand("dos", "density-of-states curve over an E range");
    std::string erange_str;
    double dos_eta = 1e-3;
    dos->add_option("-m,--model", model_path, "model JSON file")->required();
    dos->add_option("--erange", erange_str,
                    "'min:max:count' (default: support bracket, 601 points)");
    dos->add_option("--eta", dos_eta, "imaginary offset of the scan line")
        ->capture_default_str();
    dos->add_option("--zeta", zeta_str, "hermitize the model at this shift");
    dos->add_option("-o,--output", out_path, "CSV path (default stdout)");
    add_solver_flags(dos);

    // support
    auto* support = app.add_subcommand("support", "estimate supp rho as intervals");
    double sup_step = 0.01, sup_eta_floor = 1e-5, sup_threshold = 50;
    support->add_option("-m,--model", model_path, "model JSON file")->required();
    support->add_option("--step", sup_step, "E-grid step")->capture_default_str();
    support->add_option("--eta-floor", sup_eta_floor, "classification height")
        ->capture_default_str();
    support->add_option("--threshold", sup_threshold, "growth threshold for IN")
        ->capture_default_str();
    support->add_option("--zeta", zeta_str, "hermitize the model at this shift");
    support->add_option("-o,--output", out_path, "report path (default stdout)");
    add_solver_flags(support);

    // pseudospectrum
    auto* ps = app.add_subcommand("pseudospectrum",
                                  "epsilon-pseudospectrum membership over a zeta grid");
    std::string grid_str;
    double ps_eps = 0.02, ps_eta_floor = 1e-5, ps_threshold = 50, ps_step = 0;
    int threads = threads_default;
    ps->add_option("-m,--model", model_path, "model JSON file")->required();
    ps->add_option("--grid", grid_str, "'re0:re1:n,im0:im1:m'")->required();
    ps->add_option("--epsilon", ps_eps, "pseudospectrum scale")->capture_default_str();
    ps->add_option("--eta-floor", ps_eta_floor, "descent floor")->capture_default_str();
    ps->add_option("--threshold", ps_threshold, "raw growth threshold for dist0")
        ->capture_default_str();
    ps->add_option("--step", ps_step, "dist0 scan step (0: epsilon/4)")
        ->capture_default_str();
    ps->add_option("--threads", threads,
                   "worker threads (default: KRONMDE_THREADS or 1)");
    ps->add_option("-o,--output", out_path, "CSV path (default stdout)");
    ps->add_option("--json", json_out, "also write a JSON summary here");
    add_solver_flags(ps);

    // verify
    auto* verify = app.add_subcommand(
        "verify", "Monte Carlo checks: eigenvalue containment and the global law");
    VerifyFlags vf;
    verify->add_option("-m,--model", model_path, "model JSON file")->required();
    verify->add_option("--epsilon", vf.epsilon, "pseudospectrum dilation")
        ->capture_default_str();
    verify->add_option("--trials", vf.trials, "independent samples")
        ->capture_default_str();
    verify->add_option("--seed", vf.seed, "base RNG seed")->capture_default_str();
    verify
        ->add_option("--distribution", vf.distribution,
                     "complex-gaussian|real-gaussian|rademacher")
        ->capture_default_str();
    verify
        ->add_option("--oracle", vf.oracle,
                     "containment oracle: auto (closed-form set when the model "
                     "admits one) or disk:RADIUS")
        ->capture_default_str();
    verify
        ->add_option("--kolmogorov", vf.kolmogorov_bound,
                     "global-law distance bound (Hermitian models)")
        ->capture_default_str();
    verify->add_option("--eta", vf.eta, "dos height for the global-law reference")
        ->capture_default_str();
    verify->add_option("--points", vf.points, "dos points for the global-law reference")
        ->capture_default_str();
    verify->add_flag("--override-caps", vf.override_caps,
                     "lift eigensolver dimension guard rails (slow)");
    verify->add_flag("--skip-global", vf.skip_global, "containment only");
    verify->add_flag("--skip-containment", vf.skip_containment, "global law only");
    verify->add_option("-o,--output", out_path, "report path (default stdout)");
    add_solver_flags(verify);

    // diagnose
    auto* diagnose = app.add_subcommand(
        "diagnose", "stability-operator diagnostics at a solved point");
    diagnose->add_option("-m,--model", model_path, "model JSON file")->required();
    diagnose->add_option("--z", z_str, "spectral parameter 'a+bi', Im z > 0")
        ->capture_default_str();
    diagnose->add_option("--zeta", zeta_str, "hermitize the model at this shift");
    diagnose->add_option("-o,--output", out_path, "report path (default stdout)");
    add_solver_flags(diagnose);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("kronmde");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        SolverOptions sopts =
            solver_options_from(tol, max_iter, damping, eta_start, eta_ratio);
        if (app.got_subcommand(preset))
            return cmd_preset(preset_name, preset_list, preset_n, out_path);
        if (app.got_subcommand(solve))
            return cmd_solve(model_path, z_str, zeta_str, sopts, out_path);
        if (app.got_subcommand(dos))
            return cmd_dos(model_path, erange_str, zeta_str, dos_eta, sopts, out_path);
        if (app.got_subcommand(support))
            return cmd_support(model_path, zeta_str, sup_step, sup_eta_floor,
                               sup_threshold, sopts, out_path);
        if (app.got_subcommand(ps))
            return cmd_pseudospectrum(model_path, grid_str, ps_eps, ps_eta_floor,
                                      ps_threshold, ps_step, threads, sopts, out_path,
                                      json_out);
        if (app.got_subcommand(verify))
            return cmd_verify(model_path, vf, sopts, out_path);
        if (app.got_subcommand(diagnose))
            return cmd_diagnose(model_path, z_str, zeta_str, sopts, out_path);
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;  // unreachable: require_subcommand(1)
}

}  // namespace kronmde
