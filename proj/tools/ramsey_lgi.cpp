// ramsey_lgi — command-line front end: correlation scans, Leggett-Garg
// sweeps, Wigner-function grids, classical baselines, decoherence curves and
// the analytic-vs-oracle verification harness. Every command writes CSV data
// plus a JSON metadata sidecar echoing the effective configuration, and is
// deterministic given its configuration and seed.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rlg/classical_model.hpp"
#include "rlg/decoherence.hpp"
#include "rlg/fock_oracle.hpp"
#include "rlg/io.hpp"
#include "rlg/lgi.hpp"
#include "rlg/phase_space.hpp"
#include "rlg/ramsey.hpp"
#include "rlg/rng.hpp"
#include "rlg/serialize.hpp"

namespace {

using namespace rlg;

constexpr const char* kVersion = "0.1.0";
constexpr double kPi = std::numbers::pi;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitVerification = 2;
constexpr int kExitTruncation = 3;

template <typename T>
void from_config(const Json& section, const char* key, T& out) {
    if (section.contains(key)) {
        out = section.at(key).get<T>();
    }
}

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;

    std::vector<double> points() const {
        std::vector<double> p(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            p[static_cast<std::size_t>(i)] =
                n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        }
        return p;
    }
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos) {
        throw CLI::ValidationError("grid", "expected lo:hi:n, got '" + text + "'");
    }
    g.lo = std::stod(text.substr(0, a));
    g.hi = std::stod(text.substr(a + 1, b - a - 1));
    g.n = std::stoi(text.substr(b + 1));
    if (g.n < 1) {
        throw CLI::ValidationError("grid", "need at least one point");
    }
    return g;
}

ComplexAmp parse_amp(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        return {std::stod(text), 0.0};
    }
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
}

int default_threads() {
    if (const char* env = std::getenv("RAMSEY_LGI_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return n;
        }
    }
    return 1;
}

void write_sidecar(const std::filesystem::path& data_path, const Json& meta) {
    std::filesystem::path side = data_path;
    side += ".meta.json";
    io::write_file_atomic(side, meta.dump(2) + "\n");
}

Json base_meta(const std::string& command, const Json& config) {
    return Json{{"command", command}, {"version", kVersion}, {"config", config}};
}

// ---------------------------------------------------------------------------
// correlate

struct CorrelateOptions {
    double alpha = 1.0;
    double nbar = 0.0;
    double phibar1 = 0.0;
    double phibar2 = 0.0;
    std::string theta_grid = "0.0:6.2832:64";
    std::string alpha1;
    std::string alpha2_re;
    std::string alpha2_im;
    std::string request_file;
    double omega = 1.0;
    double lambda = 0.0;
    std::string engine = "analytic";
    double tol = 1e-6;
    int dim = 0;
    std::string out = "correlate.csv";
};

// Full n-point request loaded from JSON: {"params": {...}, "initial": {...},
// "specs": [...]}; evaluates the analytic expansion and, on request, the
// matrix oracle.
int run_correlate_request(const CorrelateOptions& opt) {
    std::ifstream in(opt.request_file);
    if (!in) {
        std::cerr << "cannot open request file " << opt.request_file << "\n";
        return kExitConfig;
    }
    Json doc;
    in >> doc;
    SystemParams params{opt.omega, opt.lambda};
    if (doc.contains("params")) {
        from_config(doc.at("params"), "omega", params.omega);
        from_config(doc.at("params"), "lambda", params.lambda);
    }
    const CorrelationRequest request = correlation_request_from_json(doc);

    const bool with_oracle = opt.engine == "oracle" || opt.engine == "both";
    const bool with_analytic = opt.engine == "analytic" || opt.engine == "both";
    std::vector<std::string> columns{"n"};
    std::vector<double> row{static_cast<double>(request.specs.size())};
    double analytic = 0.0, oracle = 0.0;
    if (with_analytic) {
        analytic = correlation(request, params);
        columns.push_back("c_analytic");
        row.push_back(analytic);
    }
    if (with_oracle) {
        oracle = fock::oracle_correlation(request, params, nullptr, opt.dim);
        columns.push_back("c_oracle");
        row.push_back(oracle);
    }
    double delta = 0.0;
    if (opt.engine == "both") {
        delta = std::abs(analytic - oracle);
        columns.push_back("abs_delta");
        row.push_back(delta);
    }
    io::CsvWriter csv(columns);
    csv.add_row(row);
    io::write_file_atomic(opt.out, csv.content());

    Json meta = base_meta("correlate", Json{{"request", opt.request_file},
                                            {"engine", opt.engine},
                                            {"tol", opt.tol},
                                            {"omega", params.omega},
                                            {"lambda", params.lambda},
                                            {"out", opt.out}});
    meta["request_document"] = doc;
    if (opt.engine == "both") {
        meta["max_abs_delta"] = delta;
    }
    write_sidecar(opt.out, meta);
    if (opt.engine == "both" && delta > opt.tol) {
        std::cerr << "correlate: engines disagree, |delta| = " << delta << "\n";
        return kExitVerification;
    }
    return kExitOk;
}

int run_correlate(const CorrelateOptions& opt) {
    if (!opt.request_file.empty()) {
        return run_correlate_request(opt);
    }
    Json config{{"alpha", opt.alpha},       {"nbar", opt.nbar},
                {"phibar1", opt.phibar1},   {"phibar2", opt.phibar2},
                {"theta_grid", opt.theta_grid}, {"alpha1", opt.alpha1},
                {"alpha2_re", opt.alpha2_re},   {"alpha2_im", opt.alpha2_im},
                {"engine", opt.engine},     {"tol", opt.tol},
                {"dim", opt.dim},           {"out", opt.out}};
    const bool with_oracle = opt.engine == "oracle" || opt.engine == "both";
    const bool with_analytic = opt.engine == "analytic" || opt.engine == "both";
    if (!with_oracle && !with_analytic) {
        throw CLI::ValidationError("engine", "must be analytic, oracle or both");
    }
    const OscillatorState state =
        opt.nbar > 0.0 ? OscillatorState{Thermal{opt.nbar}} : OscillatorState{Ground{}};

    struct Row {
        std::vector<double> keys;
        ComplexAmp a1, a2;
    };
    std::vector<Row> rows;
    std::vector<std::string> key_names;

    if (!opt.alpha1.empty()) {
        // map mode: fixed first amplitude, complex grid over the second
        const ComplexAmp a1 = parse_amp(opt.alpha1);
        const GridSpec re = parse_grid(opt.alpha2_re.empty() ? "-8:8:33" : opt.alpha2_re);
        const GridSpec im = parse_grid(opt.alpha2_im.empty() ? "-8:8:33" : opt.alpha2_im);
        key_names = {"alpha2_re", "alpha2_im"};
        for (const double r : re.points()) {
            for (const double i : im.points()) {
                rows.push_back({{r, i}, a1, {r, i}});
            }
        }
    } else {
        const GridSpec thetas = parse_grid(opt.theta_grid);
        key_names = {"theta"};
        for (const double theta : thetas.points()) {
            const ComplexAmp a1{opt.alpha, 0.0};
            const ComplexAmp a2 = opt.alpha * std::exp(std::complex<double>(0.0, theta));
            rows.push_back({{theta}, a1, a2});
        }
    }

    std::optional<fock::FockDensity> rho;
    if (with_oracle) {
        double budget = 0.0;
        for (const auto& row : rows) {
            budget = std::max(budget, std::abs(row.a1) + std::abs(row.a2));
        }
        const int dim = opt.dim > 0 ? opt.dim : fock::adequate_dim(budget, opt.nbar);
        rho = fock::fock_state(dim, state);
    }

    std::vector<std::string> columns = key_names;
    if (with_analytic) {
        columns.push_back("c_analytic");
    }
    if (with_oracle) {
        columns.push_back("c_oracle");
    }
    if (opt.engine == "both") {
        columns.push_back("abs_delta");
    }
    io::CsvWriter csv(columns);

    double max_delta = 0.0;
    for (const auto& row : rows) {
        std::vector<double> values = row.keys;
        double analytic = 0.0, oracle = 0.0;
        if (with_analytic) {
            analytic =
                two_time_closed_form(row.a1, row.a2, opt.phibar1, opt.phibar2, state);
            values.push_back(analytic);
        }
        if (with_oracle) {
            oracle = fock::oracle_two_time(row.a1, row.a2, opt.phibar1, opt.phibar2, *rho);
            values.push_back(oracle);
        }
        if (opt.engine == "both") {
            const double delta = std::abs(analytic - oracle);
            max_delta = std::max(max_delta, delta);
            values.push_back(delta);
        }
        csv.add_row(values);
    }

    io::write_file_atomic(opt.out, csv.content());
    Json meta = base_meta("correlate", config);
    if (opt.engine == "both") {
        meta["max_abs_delta"] = max_delta;
    }
    if (rho) {
        meta["oracle_dim"] = rho->dim();
    }
    write_sidecar(opt.out, meta);

    if (opt.engine == "both" && max_delta > opt.tol) {
        std::cerr << "correlate: engines disagree, max |delta| = " << max_delta << "\n";
        return kExitVerification;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// lgi-sweep

struct LgiSweepOptions {
    std::string alpha_grid = "0.0:3.0:60";
    std::string theta_grid = "0.0:6.2832:60";
    double alpha_point = -1.0;
    double nbar = 0.0;
    int resolution = 24;
    int threads = default_threads();
    bool check_asymptote = false;
    std::string out = "lgi_sweep.csv";
};

int run_lgi_sweep(const LgiSweepOptions& opt) {
    Json config{{"alpha_grid", opt.alpha_grid}, {"theta_grid", opt.theta_grid},
                {"alpha", opt.alpha_point},     {"nbar", opt.nbar},
                {"resolution", opt.resolution}, {"threads", opt.threads},
                {"check_asymptote", opt.check_asymptote}, {"out", opt.out}};
    lgi::OptimizerOpts opts;
    opts.grid_resolution = opt.resolution;

    std::vector<lgi::LgiPoint> table;
    if (opt.alpha_point >= 0.0) {
        const double alpha = opt.alpha_point;
        const double theta = alpha > 0.5 ? kPi - kPi / (2.0 * alpha * alpha) : 0.75 * kPi;
        table.push_back(lgi::maximize_w(alpha, theta, opt.nbar, opts));
    } else {
        const auto alphas = parse_grid(opt.alpha_grid).points();
        const auto thetas = parse_grid(opt.theta_grid).points();
        table = lgi::sweep(alphas, thetas, opt.nbar, opts, opt.threads);
    }

    io::CsvWriter csv({"alpha", "theta", "nbar", "w_max", "phi1", "phi2", "phi3"});
    for (const auto& p : table) {
        csv.add_row(std::array<double, 7>{p.alpha, p.theta, p.nbar, p.w_max,
                                          p.argmax_phases[0], p.argmax_phases[1],
                                          p.argmax_phases[2]});
    }
    io::write_file_atomic(opt.out, csv.content());

    Json meta = base_meta("lgi-sweep", config);
    meta["optimizer"] = Json{{"grid_resolution", opts.grid_resolution},
                             {"refine_starts", opts.refine_starts},
                             {"tol_w", opts.tol_w}};
    std::string failure;
    if (opt.check_asymptote) {
        Json checks = Json::array();
        for (const auto& p : table) {
            if (p.alpha >= 5.0) {
                const double asym = 1.5 * (1.0 - kPi * kPi / (4.0 * p.alpha * p.alpha) *
                                                     (2.0 * opt.nbar + 1.0));
                const double rel = std::abs(p.w_max - asym) / asym;
                checks.push_back({{"alpha", p.alpha},
                                  {"law", "large_alpha"},
                                  {"expected", asym},
                                  {"observed", p.w_max},
                                  {"rel_error", rel}});
                if (rel > 0.02) {
                    failure = "large-alpha asymptote off by " + std::to_string(rel);
                }
            } else if (p.alpha > 0.0 && p.alpha <= 0.1) {
                const double small =
                    1.0 + p.alpha * p.alpha *
                              (std::sin(p.theta) - std::sin(2.0 * p.theta) - 1.0 -
                               2.0 * opt.nbar);
                const double err = std::abs(p.w_max - std::max(small, 1.0));
                checks.push_back({{"alpha", p.alpha},
                                  {"law", "small_alpha"},
                                  {"expected", std::max(small, 1.0)},
                                  {"observed", p.w_max},
                                  {"abs_error", err}});
                if (err > 0.1 * p.alpha * p.alpha + 1e-9) {
                    failure = "small-alpha law off by " + std::to_string(err);
                }
            }
        }
        meta["asymptote_checks"] = checks;
    }
    write_sidecar(opt.out, meta);
    if (!failure.empty()) {
        std::cerr << "lgi-sweep: " << failure << "\n";
        return kExitVerification;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// wigner

struct WignerOptions {
    std::string alpha1 = "5,5";
    double phibar1 = 0.0;
    double gamma = 0.01;
    double n_eq = 0.0;
    std::vector<double> gamma_th_dt{0.0};
    double extent = -1.0;
    int resolution = 201;
    std::string engine = "analytic";
    double tol = 1e-3;
    int max_dim = 220;
    std::string out = "wigner.csv";
};

int run_wigner(const WignerOptions& opt) {
    Json config{{"alpha1", opt.alpha1},   {"phibar1", opt.phibar1},
                {"gamma", opt.gamma},     {"n_eq", opt.n_eq},
                {"gamma_th_dt", opt.gamma_th_dt}, {"extent", opt.extent},
                {"resolution", opt.resolution},   {"engine", opt.engine},
                {"tol", opt.tol},         {"max_dim", opt.max_dim},
                {"out", opt.out}};
    const ComplexAmp alpha1 = parse_amp(opt.alpha1);
    const double p_plus =
        0.5 * (1.0 + std::cos(opt.phibar1) * std::exp(-0.5 * std::norm(alpha1)));
    const double extent = opt.extent > 0.0 ? opt.extent : std::abs(alpha1) + 5.0;
    const WignerGridSpec grid{-extent, extent, -extent, extent, opt.resolution,
                              opt.resolution};
    const bool with_oracle = opt.engine == "oracle" || opt.engine == "both";

    const std::filesystem::path base(opt.out);
    int index = 0;
    for (const double gtd : opt.gamma_th_dt) {
        // Gamma_th dt = N Gamma dt; at N = 0 the value is read as Gamma dt.
        const double rate = opt.n_eq > 0.0 ? opt.n_eq * opt.gamma : opt.gamma;
        const double dt = gtd > 0.0 ? gtd / rate : 0.0;
        const deco::BathParams bath{opt.gamma, opt.n_eq};
        const double nu = 1.0 + 2.0 * opt.n_eq * (1.0 - std::exp(-opt.gamma * dt));

        const WignerGrid closed =
            deco::cat_wigner(alpha1, opt.phibar1, p_plus, dt, bath, grid);

        double max_delta = 0.0;
        std::optional<WignerGrid> oracle;
        int dim = 0;
        if (with_oracle) {
            dim = fock::adequate_dim(std::numbers::sqrt2 * extent + std::abs(alpha1),
                                     opt.n_eq);
            if (dim > opt.max_dim) {
                std::cerr << "wigner: oracle needs dim " << dim << " > max-dim "
                          << opt.max_dim << "; reduce |alpha1| or the extent\n";
                return kExitTruncation;
            }
            const double scale = 1.0 / std::sqrt(4.0 * p_plus);
            const OscillatorState cat = make_cat(
                {{scale, {0.0, 0.0}},
                 {scale * std::exp(std::complex<double>(0.0, opt.phibar1)), alpha1}},
                1e-8);
            fock::FockDensity rho = fock::fock_state(dim, cat);
            if (dt > 0.0) {
                const SystemParams osc{1.0, 0.0};
                rho = fock::rotate_frame(fock::lindblad_propagate(rho, dt, osc, bath),
                                         osc.omega * dt);
            }
            oracle = fock::wigner_displaced_parity(rho, grid);
            for (std::size_t i = 0; i < closed.values.size(); ++i) {
                max_delta = std::max(max_delta,
                                     std::abs(closed.values[i] - oracle->values[i]));
            }
        }

        const WignerGrid& out_grid = opt.engine == "oracle" ? *oracle : closed;
        std::vector<std::string> columns(static_cast<std::size_t>(grid.np));
        for (int j = 0; j < grid.np; ++j) {
            columns[static_cast<std::size_t>(j)] = "p" + std::to_string(j);
        }
        io::CsvWriter csv(columns);
        std::vector<double> row(static_cast<std::size_t>(grid.np));
        for (int i = 0; i < grid.nx; ++i) {
            for (int j = 0; j < grid.np; ++j) {
                row[static_cast<std::size_t>(j)] = out_grid.at(i, j);
            }
            csv.add_row(row);
        }

        std::filesystem::path path = base;
        if (opt.gamma_th_dt.size() > 1) {
            path = base.parent_path() /
                   (base.stem().string() + "_" + std::to_string(index) +
                    base.extension().string());
        }
        io::write_file_atomic(path, csv.content());

        Json meta = base_meta("wigner", config);
        meta["gamma_th_dt"] = gtd;
        meta["dt"] = dt;
        meta["nu"] = nu;
        meta["p_plus"] = p_plus;
        meta["grid"] = Json{{"x_min", grid.x_min}, {"x_max", grid.x_max},
                            {"p_min", grid.p_min}, {"p_max", grid.p_max},
                            {"nx", grid.nx},       {"np", grid.np}};
        meta["integral"] = out_grid.integral();
        if (with_oracle) {
            meta["oracle_dim"] = dim;
            meta["max_abs_delta"] = max_delta;
            meta["truncation_warning"] = oracle->truncation_warning;
        }
        write_sidecar(path, meta);

        if (opt.engine == "both" && max_delta > opt.tol) {
            std::cerr << "wigner: closed form vs displaced parity disagree, max |delta| = "
                      << max_delta << "\n";
            return kExitVerification;
        }
        ++index;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// classical

struct ClassicalOptions {
    double alpha = 1.0;
    double nbar = 0.0;
    double variance = -1.0;
    std::string theta_grid = "0.3:6.0:32";
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
    std::int64_t mc_samples = 100000;
    std::uint64_t seed = 1;
    int threads = default_threads();
    std::string out = "classical.csv";
};

int run_classical(const ClassicalOptions& opt) {
    Json config{{"alpha", opt.alpha},   {"nbar", opt.nbar},
                {"variance", opt.variance}, {"theta_grid", opt.theta_grid},
                {"phi1", opt.phi1},     {"phi2", opt.phi2},
                {"phi3", opt.phi3},     {"mc_samples", opt.mc_samples},
                {"seed", opt.seed},     {"threads", opt.threads},
                {"out", opt.out}};
    const double variance =
        opt.variance >= 0.0 ? opt.variance : 0.5 * (2.0 * opt.nbar + 1.0);
    const double nbar_pair = std::max(0.0, variance - 0.5);

    // Narrow windows so every theta in the grid leaves the windows disjoint.
    const double omega = 1.0;
    const double omega_tau = 0.1;
    const double lambda =
        opt.alpha * omega / (2.0 * std::sin(0.5 * omega_tau));
    const classical::ClassicalFieldParams params{variance, omega, lambda};

    io::CsvWriter csv({"theta", "c_classical", "c_quantum", "mc_estimate", "mc_stderr",
                       "z", "w_classical"});
    double max_abs_z = 0.0;
    double max_w = -10.0;
    const double tau = omega_tau / omega;
    for (const double theta : parse_grid(opt.theta_grid).points()) {
        const double closed =
            classical::classical_two_time(opt.phi1, opt.phi2, tau, theta, params);
        const double quantum =
            lgi::thermal_two_time(opt.alpha, theta, nbar_pair, opt.phi1, opt.phi2);

        std::vector<MeasurementSpec> specs{
            MeasurementSpec{opt.phi1, tau, tau, static_window(tau)},
            MeasurementSpec{opt.phi2, tau, tau + theta / omega, static_window(tau)}};
        const auto mc = classical::monte_carlo_correlation(specs, params,
                                                           opt.mc_samples, opt.seed,
                                                           opt.threads);
        const double z =
            mc.std_error > 0.0 ? (mc.value - closed) / mc.std_error : 0.0;
        const double w = classical::classical_lgi_w(
            opt.alpha, theta, variance, {opt.phi1, opt.phi2, opt.phi3});
        max_abs_z = std::max(max_abs_z, std::abs(z));
        max_w = std::max(max_w, w);
        csv.add_row(std::array<double, 7>{theta, closed, quantum, mc.value,
                                          mc.std_error, z, w});
    }
    io::write_file_atomic(opt.out, csv.content());

    Json meta = base_meta("classical", config);
    meta["model"] = "classical";
    meta["variance"] = variance;
    meta["paired_nbar"] = nbar_pair;
    meta["max_abs_z"] = max_abs_z;
    meta["max_w_classical"] = max_w;
    write_sidecar(opt.out, meta);

    if (max_abs_z > 4.0) {
        std::cerr << "classical: Monte-Carlo deviates from the closed form, max |z| = "
                  << max_abs_z << "\n";
        return kExitVerification;
    }
    if (max_w > 1.0 + 1e-9) {
        std::cerr << "classical: macrorealistic bound exceeded, W = " << max_w << "\n";
        return kExitVerification;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// decoherence

struct DecoherenceOptions {
    double omega = 1.0;
    double lambda = 1.0;
    double gamma = 0.01;
    double n_eq = 1.0;
    double t2 = 0.0;  // 0 means infinite
    double phi = 0.0;
    std::string t_grid = "0.1:125.66:400";
    std::string out = "decoherence.csv";
};

int run_decoherence(const DecoherenceOptions& opt) {
    Json config{{"omega", opt.omega},   {"lambda", opt.lambda}, {"gamma", opt.gamma},
                {"n_eq", opt.n_eq},     {"t2", opt.t2},         {"phi", opt.phi},
                {"t_grid", opt.t_grid}, {"out", opt.out}};
    const SystemParams params{opt.omega, opt.lambda};
    deco::BathParams bath{opt.gamma, opt.n_eq};
    if (opt.t2 > 0.0) {
        bath.t2 = opt.t2;
    }

    io::CsvWriter csv({"t", "z", "zeta", "zeta_weak_damping", "phase"});
    for (const double t : parse_grid(opt.t_grid).points()) {
        const MeasurementSpec spec{opt.phi, t, t, static_window(t)};
        const double z = deco::measurement_window_expectation(spec, params, bath,
                                                              Thermal{opt.n_eq});
        const auto sol = deco::propagate_window(spec.schedule, params, bath);
        csv.add_row(std::array<double, 5>{
            t, z, sol.zeta, deco::zeta_weak_damping(params, opt.gamma, t), sol.phase});
    }
    io::write_file_atomic(opt.out, csv.content());

    const auto rate = deco::effective_decoherence_rate(params, bath);
    Json meta = base_meta("decoherence", config);
    meta["quoted_rate"] = rate.quoted;
    meta["fitted_slope"] = rate.fitted_slope;
    meta["gamma_th"] = bath.gamma_th();
    write_sidecar(opt.out, meta);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
    std::string out_dir = "verify_out";
    std::uint64_t seed = 1;
    int threads = default_threads();
};

struct CheckRow {
    std::string name;
    double value;
    double threshold;
};

int run_verify(const VerifyOptions& opt) {
    Json config{{"out_dir", opt.out_dir}, {"seed", opt.seed}, {"threads", opt.threads}};
    std::filesystem::create_directories(opt.out_dir);
    std::vector<CheckRow> checks;

    // Kraus completeness and probability normalization on random windows.
    {
        CounterRng rng(opt.seed);
        double max_defect = 0.0;
        double max_prob_err = 0.0;
        for (int i = 0; i < 25; ++i) {
            const SystemParams params{1.0, rng.uniform(0.05, 0.5)};
            PulseSchedule schedule;
            int f_e = 1;
            const int n_seg = 1 + static_cast<int>(rng.uniform01() * 3.0);
            for (int s = 0; s < n_seg; ++s) {
                schedule.segments.push_back(
                    Segment{rng.uniform(0.3, 2.0), f_e, 1 - f_e, 0.0});
                f_e = 1 - f_e;
            }
            const double tau = schedule.total_duration();
            const MeasurementSpec spec{rng.uniform(0.0, 2.0 * kPi), tau, tau, schedule};
            const double nbar = rng.uniform(0.0, 1.0);
            const auto rec = integrate_schedule(params, spec.schedule);
            const int dim = fock::adequate_dim(
                                std::abs(rec.alpha_e) + std::abs(rec.alpha_g)) +
                            60;
            const auto pair = fock::build_kraus(dim, spec, params);
            const fock::Matrix defect =
                pair.e_plus.mat.adjoint() * pair.e_plus.mat +
                pair.e_minus.mat.adjoint() * pair.e_minus.mat -
                fock::Matrix::Identity(dim, dim);
            max_defect = std::max(max_defect, fock::non_tail_norm(defect));
            const auto outcome =
                fock::kraus_measure(fock::fock_thermal(dim, nbar), spec, params);
            max_prob_err =
                std::max(max_prob_err, std::abs(outcome.p_plus + outcome.p_minus - 1.0));
        }
        checks.push_back({"kraus_completeness_non_tail", max_defect, 1e-10});
        checks.push_back({"probability_normalization", max_prob_err, 1e-12});
    }

    // Analytic correlation vs matrix oracle.
    {
        double max_delta = 0.0;
        const double omega_tau = kPi / 8.0;
        for (const double alpha : {0.5, 1.0}) {
            for (const double theta : {kPi / 2.0, kPi}) {
                for (const double nbar : {0.0, 0.5}) {
                    const SystemParams params{
                        1.0, alpha / (2.0 * std::sin(0.5 * omega_tau))};
                    for (int n = 1; n <= 2; ++n) {
                        CorrelationRequest req;
                        double t = omega_tau;
                        for (int k = 0; k < n; ++k) {
                            MeasurementSpec spec{0.4 + 0.3 * k, omega_tau, t,
                                                 static_window(omega_tau)};
                            req.specs.push_back(spec);
                            t += theta;
                        }
                        req.initial = nbar > 0.0 ? OscillatorState{Thermal{nbar}}
                                                 : OscillatorState{Ground{}};
                        const double a = correlation(req, params);
                        const double o = fock::oracle_correlation(req, params);
                        max_delta = std::max(max_delta, std::abs(a - o));
                    }
                }
            }
        }
        checks.push_back({"analytic_vs_oracle_correlation", max_delta, 1e-6});
    }

    // Closed-form two-time vs the superoperator expansion.
    {
        CounterRng rng(opt.seed + 1);
        double max_delta = 0.0;
        for (int i = 0; i < 200; ++i) {
            const SystemParams params{1.0, rng.uniform(0.05, 1.0)};
            const double tau1 = rng.uniform(0.2, 1.5);
            const double tau2 = rng.uniform(0.2, 1.5);
            const double t1 = tau1;
            const double t2 = t1 + tau2 + rng.uniform(0.0, 2.0);
            const MeasurementSpec s1{rng.uniform(0.0, 2.0 * kPi), tau1, t1,
                                     static_window(tau1)};
            const MeasurementSpec s2{rng.uniform(0.0, 2.0 * kPi), tau2, t2,
                                     static_window(tau2)};
            const OscillatorState state = Thermal{rng.uniform(0.0, 1.5)};
            const auto w1 = window_ops(s1, params);
            const auto w2 = window_ops(s2, params);
            const double direct = two_time_closed_form(w1.alpha_rel, w2.alpha_rel,
                                                       w1.phibar, w2.phibar, state);
            max_delta = std::max(
                max_delta, std::abs(direct - correlation({{s1, s2}, state}, params)));
        }
        checks.push_back({"two_time_routes", max_delta, 1e-12});
    }

    // Witness vs the correlation route.
    {
        CounterRng rng(opt.seed + 2);
        double max_delta = 0.0;
        const double omega_tau = 0.02;
        for (int i = 0; i < 20; ++i) {
            const double alpha = rng.uniform(0.05, 1.5);
            const double theta = rng.uniform(0.05, kPi);
            const double nbar = rng.uniform(0.0, 1.0);
            const std::array<double, 3> phases{rng.uniform(0.0, 2.0 * kPi),
                                               rng.uniform(0.0, 2.0 * kPi),
                                               rng.uniform(0.0, 2.0 * kPi)};
            const SystemParams params{1.0,
                                      alpha / (2.0 * std::sin(0.5 * omega_tau))};
            auto c_pair = [&](double pa, double pb, double dt) {
                CorrelationRequest req;
                MeasurementSpec m1{0.0, omega_tau, omega_tau, static_window(omega_tau)};
                m1.phi = pa - integrate_schedule(params, m1.schedule).phi_tot;
                MeasurementSpec m2 = m1;
                m2.t_end = omega_tau + dt;
                m2.phi = pb - integrate_schedule(params, m2.schedule).phi_tot;
                req.specs = {m1, m2};
                req.initial = Thermal{nbar};
                return correlation(req, params);
            };
            const double via_corr = c_pair(phases[0], phases[1], theta) +
                                    c_pair(phases[1], phases[2], theta) -
                                    c_pair(phases[0], phases[2], 2.0 * theta);
            max_delta = std::max(
                max_delta, std::abs(via_corr - lgi::lgi_w(alpha, theta, nbar, phases)));
        }
        checks.push_back({"lgi_vs_correlation", max_delta, 1e-12});
    }

    // Classical Monte Carlo vs closed form.
    {
        const classical::ClassicalFieldParams params{0.7, 1.0, 0.5};
        const double tau = kPi;
        double max_abs_z = 0.0;
        for (int s = 0; s < 3; ++s) {
            std::vector<MeasurementSpec> specs{
                MeasurementSpec{0.2, tau, tau, static_window(tau)},
                MeasurementSpec{1.0, tau, tau + 4.0, static_window(tau)}};
            const auto mc = classical::monte_carlo_correlation(
                specs, params, 100000, opt.seed + 10 + s, opt.threads);
            const double theta = 4.0;  // omega (t2 - t1)
            const double closed =
                classical::classical_two_time(0.2, 1.0, tau, theta, params);
            const double z = (mc.value - closed) / mc.std_error;
            max_abs_z = std::max(max_abs_z, std::abs(z));
        }
        checks.push_back({"classical_mc_max_z", max_abs_z, 4.0});
    }

    // Cat Wigner closed form vs displaced parity.
    {
        const ComplexAmp alpha1{1.5, 0.5};
        const double phibar1 = 0.3;
        const double p_plus =
            0.5 * (1.0 + std::cos(phibar1) * std::exp(-0.5 * std::norm(alpha1)));
        const double extent = std::abs(alpha1) + 3.0;
        const WignerGridSpec grid{-extent, extent, -extent, extent, 21, 21};
        const double scale = 1.0 / std::sqrt(4.0 * p_plus);
        const OscillatorState cat = make_cat(
            {{scale, {0.0, 0.0}},
             {scale * std::exp(std::complex<double>(0.0, phibar1)), alpha1}},
            1e-8);
        const int dim =
            fock::adequate_dim(std::numbers::sqrt2 * extent + std::abs(alpha1));
        const auto oracle = fock::wigner_displaced_parity(fock::fock_state(dim, cat), grid);
        const auto closed =
            deco::cat_wigner(alpha1, phibar1, p_plus, 0.0, deco::BathParams{}, grid);
        double max_delta = 0.0;
        for (std::size_t i = 0; i < oracle.values.size(); ++i) {
            max_delta =
                std::max(max_delta, std::abs(oracle.values[i] - closed.values[i]));
        }
        checks.push_back({"wigner_closed_vs_parity", max_delta, 1e-6});
    }

    io::CsvWriter csv({"check", "value", "threshold", "pass"});
    bool all_pass = true;
    Json summary = Json::array();
    for (const auto& check : checks) {
        const bool pass = check.value <= check.threshold;
        all_pass = all_pass && pass;
        const std::array<std::string, 4> row{check.name, io::format_double(check.value),
                                             io::format_double(check.threshold),
                                             pass ? "1" : "0"};
        csv.add_row(row);
        summary.push_back({{"check", check.name},
                           {"value", check.value},
                           {"threshold", check.threshold},
                           {"pass", pass}});
    }
    const std::filesystem::path details = std::filesystem::path(opt.out_dir) / "verify_details.csv";
    io::write_file_atomic(details, csv.content());
    Json meta = base_meta("verify", config);
    meta["checks"] = summary;
    meta["all_pass"] = all_pass;
    io::write_file_atomic(std::filesystem::path(opt.out_dir) / "verify_summary.json",
                          meta.dump(2) + "\n");

    for (const auto& check : checks) {
        std::cout << (check.value <= check.threshold ? "[PASS] " : "[FAIL] ")
                  << check.name << ": " << check.value << " (threshold "
                  << check.threshold << ")\n";
    }
    return all_pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ramsey-correlation simulator for modular variables, Leggett-Garg "
                 "violations and decoherence"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override");

    // The config file is applied before parsing so that flags override it:
    // a single JSON document with one section per subcommand.
    Json file_config = Json::object();
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) {
                std::cerr << "cannot open config file " << argv[i + 1] << "\n";
                return kExitConfig;
            }
            try {
                in >> file_config;
            } catch (const std::exception& e) {
                std::cerr << "config parse error: " << e.what() << "\n";
                return kExitConfig;
            }
        }
    }
    auto section = [&](const char* name) {
        return file_config.contains(name) ? file_config.at(name) : Json::object();
    };

    CorrelateOptions correlate;
    {
        const Json s = section("correlate");
        from_config(s, "alpha", correlate.alpha);
        from_config(s, "nbar", correlate.nbar);
        from_config(s, "phibar1", correlate.phibar1);
        from_config(s, "phibar2", correlate.phibar2);
        from_config(s, "theta_grid", correlate.theta_grid);
        from_config(s, "alpha1", correlate.alpha1);
        from_config(s, "alpha2_re", correlate.alpha2_re);
        from_config(s, "alpha2_im", correlate.alpha2_im);
        from_config(s, "engine", correlate.engine);
        from_config(s, "tol", correlate.tol);
        from_config(s, "dim", correlate.dim);
        from_config(s, "out", correlate.out);
    }
    auto* cmd_correlate = app.add_subcommand("correlate", "two-time correlation scans");
    cmd_correlate->add_option("--alpha", correlate.alpha, "common displacement magnitude");
    cmd_correlate->add_option("--nbar", correlate.nbar, "initial thermal occupation");
    cmd_correlate->add_option("--phibar1", correlate.phibar1, "first full phase");
    cmd_correlate->add_option("--phibar2", correlate.phibar2, "second full phase");
    cmd_correlate->add_option("--theta-grid", correlate.theta_grid, "lo:hi:n");
    cmd_correlate->add_option("--alpha1", correlate.alpha1,
                              "re,im of the first amplitude (enables map mode)");
    cmd_correlate->add_option("--alpha2-re", correlate.alpha2_re, "lo:hi:n");
    cmd_correlate->add_option("--alpha2-im", correlate.alpha2_im, "lo:hi:n");
    cmd_correlate->add_option("--request", correlate.request_file,
                              "JSON correlation request (full n-point mode)");
    cmd_correlate->add_option("--omega", correlate.omega, "oscillator frequency");
    cmd_correlate->add_option("--lambda", correlate.lambda, "coupling");
    cmd_correlate->add_option("--engine", correlate.engine, "analytic | oracle | both");
    cmd_correlate->add_option("--tol", correlate.tol, "engine agreement tolerance");
    cmd_correlate->add_option("--dim", correlate.dim, "oracle truncation override");
    cmd_correlate->add_option("-o,--out", correlate.out, "output CSV");

    LgiSweepOptions lgi_sweep;
    {
        const Json s = section("lgi_sweep");
        from_config(s, "alpha_grid", lgi_sweep.alpha_grid);
        from_config(s, "theta_grid", lgi_sweep.theta_grid);
        from_config(s, "alpha", lgi_sweep.alpha_point);
        from_config(s, "nbar", lgi_sweep.nbar);
        from_config(s, "resolution", lgi_sweep.resolution);
        from_config(s, "threads", lgi_sweep.threads);
        from_config(s, "check_asymptote", lgi_sweep.check_asymptote);
        from_config(s, "out", lgi_sweep.out);
    }
    auto* cmd_lgi = app.add_subcommand("lgi-sweep", "maximized Leggett-Garg witness");
    cmd_lgi->add_option("--alpha-grid", lgi_sweep.alpha_grid, "lo:hi:n");
    cmd_lgi->add_option("--theta-grid", lgi_sweep.theta_grid, "lo:hi:n");
    cmd_lgi->add_option("--alpha", lgi_sweep.alpha_point,
                        "single-point mode at theta = pi - pi/(2 alpha^2)");
    cmd_lgi->add_option("--nbar", lgi_sweep.nbar, "thermal occupation");
    cmd_lgi->add_option("--res", lgi_sweep.resolution, "phase grid resolution");
    cmd_lgi->add_option("--threads", lgi_sweep.threads, "sweep workers");
    cmd_lgi->add_flag("--check-asymptote", lgi_sweep.check_asymptote,
                      "verify the large- and small-alpha laws");
    cmd_lgi->add_option("-o,--out", lgi_sweep.out, "output CSV");

    WignerOptions wigner;
    {
        const Json s = section("wigner");
        from_config(s, "alpha1", wigner.alpha1);
        from_config(s, "phibar1", wigner.phibar1);
        from_config(s, "gamma", wigner.gamma);
        from_config(s, "n_eq", wigner.n_eq);
        from_config(s, "gamma_th_dt", wigner.gamma_th_dt);
        from_config(s, "extent", wigner.extent);
        from_config(s, "resolution", wigner.resolution);
        from_config(s, "engine", wigner.engine);
        from_config(s, "tol", wigner.tol);
        from_config(s, "max_dim", wigner.max_dim);
        from_config(s, "out", wigner.out);
    }
    auto* cmd_wigner = app.add_subcommand("wigner", "conditioned-cat Wigner grids");
    cmd_wigner->add_option("--alpha1", wigner.alpha1, "re,im");
    cmd_wigner->add_option("--phibar1", wigner.phibar1, "superposition phase");
    cmd_wigner->add_option("--gamma", wigner.gamma, "mechanical damping rate");
    cmd_wigner->add_option("--n-eq", wigner.n_eq, "bath occupation");
    cmd_wigner->add_option("--gamma-th-dt", wigner.gamma_th_dt,
                           "list of Gamma_th dt values (0 = no waiting)");
    cmd_wigner->add_option("--extent", wigner.extent, "grid half-width");
    cmd_wigner->add_option("--res", wigner.resolution, "grid resolution per axis");
    cmd_wigner->add_option("--engine", wigner.engine, "analytic | oracle | both");
    cmd_wigner->add_option("--tol", wigner.tol, "engine agreement tolerance");
    cmd_wigner->add_option("--max-dim", wigner.max_dim, "oracle truncation cap");
    cmd_wigner->add_option("-o,--out", wigner.out, "output CSV (suffixed per dt)");

    ClassicalOptions classical_opt;
    {
        const Json s = section("classical");
        from_config(s, "alpha", classical_opt.alpha);
        from_config(s, "nbar", classical_opt.nbar);
        from_config(s, "variance", classical_opt.variance);
        from_config(s, "theta_grid", classical_opt.theta_grid);
        from_config(s, "phi1", classical_opt.phi1);
        from_config(s, "phi2", classical_opt.phi2);
        from_config(s, "phi3", classical_opt.phi3);
        from_config(s, "mc_samples", classical_opt.mc_samples);
        from_config(s, "seed", classical_opt.seed);
        from_config(s, "threads", classical_opt.threads);
        from_config(s, "out", classical_opt.out);
    }
    auto* cmd_classical = app.add_subcommand("classical", "macrorealistic baseline");
    cmd_classical->add_option("--alpha", classical_opt.alpha, "displacement magnitude");
    cmd_classical->add_option("--nbar", classical_opt.nbar,
                              "quantum pairing occupation (variance = nbar + 1/2)");
    cmd_classical->add_option("--variance", classical_opt.variance,
                              "field variance override");
    cmd_classical->add_option("--theta-grid", classical_opt.theta_grid, "lo:hi:n");
    cmd_classical->add_option("--phi1", classical_opt.phi1, "first pulse phase");
    cmd_classical->add_option("--phi2", classical_opt.phi2, "second pulse phase");
    cmd_classical->add_option("--phi3", classical_opt.phi3, "third pulse phase");
    cmd_classical->add_option("--mc-samples", classical_opt.mc_samples,
                              "Monte-Carlo sample count");
    cmd_classical->add_option("--seed", classical_opt.seed, "Monte-Carlo seed");
    cmd_classical->add_option("--threads", classical_opt.threads, "Monte-Carlo workers");
    cmd_classical->add_option("-o,--out", classical_opt.out, "output CSV");

    DecoherenceOptions deco_opt;
    {
        const Json s = section("decoherence");
        from_config(s, "omega", deco_opt.omega);
        from_config(s, "lambda", deco_opt.lambda);
        from_config(s, "gamma", deco_opt.gamma);
        from_config(s, "n_eq", deco_opt.n_eq);
        from_config(s, "t2", deco_opt.t2);
        from_config(s, "phi", deco_opt.phi);
        from_config(s, "t_grid", deco_opt.t_grid);
        from_config(s, "out", deco_opt.out);
    }
    auto* cmd_deco = app.add_subcommand("decoherence", "measurement-window decay");
    cmd_deco->add_option("--omega", deco_opt.omega, "oscillator frequency");
    cmd_deco->add_option("--lambda", deco_opt.lambda, "coupling");
    cmd_deco->add_option("--gamma", deco_opt.gamma, "damping rate");
    cmd_deco->add_option("--n-eq", deco_opt.n_eq, "bath occupation");
    cmd_deco->add_option("--t2", deco_opt.t2, "qubit dephasing time (0 = infinite)");
    cmd_deco->add_option("--phi", deco_opt.phi, "pulse phase");
    cmd_deco->add_option("--t-grid", deco_opt.t_grid, "lo:hi:n window durations");
    cmd_deco->add_option("-o,--out", deco_opt.out, "output CSV");

    VerifyOptions verify;
    {
        const Json s = section("verify");
        from_config(s, "out_dir", verify.out_dir);
        from_config(s, "seed", verify.seed);
        from_config(s, "threads", verify.threads);
    }
    auto* cmd_verify = app.add_subcommand("verify", "analytic-vs-oracle harness");
    cmd_verify->add_option("--out-dir", verify.out_dir, "output directory");
    cmd_verify->add_option("--seed", verify.seed, "random draw seed");
    cmd_verify->add_option("--threads", verify.threads, "Monte-Carlo workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cmd_correlate->parsed()) {
            return run_correlate(correlate);
        }
        if (cmd_lgi->parsed()) {
            return run_lgi_sweep(lgi_sweep);
        }
        if (cmd_wigner->parsed()) {
            return run_wigner(wigner);
        }
        if (cmd_classical->parsed()) {
            return run_classical(classical_opt);
        }
        if (cmd_deco->parsed()) {
            return run_decoherence(deco_opt);
        }
        if (cmd_verify->parsed()) {
            return run_verify(verify);
        }
    } catch (const fock::truncation_error& e) {
        std::cerr << "truncation: " << e.what() << " (required dim " << e.required_dim
                  << ")\n";
        return kExitTruncation;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
