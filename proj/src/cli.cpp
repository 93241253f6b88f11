#include "pdcphase/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "pdcphase/angular.hpp"
#include "pdcphase/bayes.hpp"
#include "pdcphase/fock_sim.hpp"
#include "pdcphase/loss_model.hpp"
#include "pdcphase/parallel.hpp"
#include "pdcphase/pdc_source.hpp"
#include "pdcphase/singlet_probe.hpp"

namespace pdcphase::cli {

namespace {

using nlohmann::json;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct TableOutput {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    json manifest;
    std::vector<std::string> comments;  // extra '#' lines after the manifest
};

struct OutputOptions {
    std::string format = "csv";
    std::string out_path;
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--format", opts.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", opts.out_path,
                    "Output file (default stdout); relative paths resolve against "
                    "$PDCPHASE_OUT_DIR when it is set");
}

std::string render(const TableOutput& table, const std::string& format) {
    std::ostringstream os;
    if (format == "json") {
        json doc;
        doc["manifest"] = table.manifest;
        doc["columns"] = table.columns;
        doc["rows"] = table.rows;
        os << doc.dump(2) << "\n";
        return os.str();
    }
    os << "# manifest: " << table.manifest.dump() << "\n";
    for (const auto& c : table.comments) os << "# " << c << "\n";
    for (size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    return os.str();
}

void emit(const TableOutput& table, const OutputOptions& opts) {
    const std::string text = render(table, opts.format);
    if (opts.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::filesystem::path path(opts.out_path);
    if (path.is_relative()) {
        if (const char* dir = std::getenv("PDCPHASE_OUT_DIR")) path = std::filesystem::path(dir) / path;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    out << text;
}

json base_manifest(const std::string& subcommand) {
    json m;
    m["subcommand"] = subcommand;
    m["schema"] = subcommand + "/1";
    m["version"] = kVersion;
    m["timestamp"] = iso_timestamp();
    return m;
}

/// Shared spin option: --j takes "2" or "3/2", --2j the doubled integer.
struct SpinOption {
    std::string j_text;
    int twice_j = -1;

    void attach(CLI::App* cmd) {
        auto* jopt = cmd->add_option("--j", j_text, "Spin j as integer or half-integer (e.g. 1/2)");
        auto* tjopt = cmd->add_option("--2j", twice_j, "Doubled spin 2j")->check(CLI::NonNegativeNumber);
        jopt->excludes(tjopt);
    }
    HalfInt resolve() const {
        if (!j_text.empty()) return parse_half_int(j_text);
        if (twice_j >= 0) return HalfInt{twice_j};
        throw CLI::ValidationError("spin", "one of --j or --2j is required");
    }
};

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1) throw std::runtime_error("points must be >= 1");
    std::vector<double> g(static_cast<size_t>(points));
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    for (int i = 0; i < points; ++i) g[static_cast<size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    return g;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi >= lo)) throw std::runtime_error("log grid needs 0 < min <= max");
    auto g = linear_grid(std::log(lo), std::log(hi), points);
    for (auto& v : g) v = std::exp(v);
    return g;
}

// ---------------------------------------------------------------- dmatrix

struct DmatrixCmd {
    SpinOption spin;
    double phi = 0.0;
    OutputOptions out;

    void run() const {
        const HalfInt j = spin.resolve();
        DMatrix d = wigner_d(j, phi);
        TableOutput table;
        table.columns = {"two_mp", "two_m", "value"};
        for (int r = 0; r < d.dim(); ++r)
            for (int c = 0; c < d.dim(); ++c)
                table.rows.push_back({static_cast<double>(d.m_at(r).twice),
                                      static_cast<double>(d.m_at(c).twice), d.entries(r, c)});
        table.manifest = base_manifest("dmatrix");
        table.manifest["params"] = {{"j", to_string(j)}, {"phi", phi}};
        emit(table, out);
    }
};

// -------------------------------------------------------------------- cfi

struct CfiCmd {
    SpinOption spin;
    std::optional<double> phi;
    double phi_min = 0.05, phi_max = 3.09;
    int points = 50;
    OutputOptions out;

    void run() const {
        const HalfInt j = spin.resolve();
        std::vector<double> grid = phi ? std::vector<double>{*phi} : linear_grid(phi_min, phi_max, points);
        TableOutput table;
        table.columns = {"phi", "i_cl"};
        for (double p : grid) table.rows.push_back({p, classical_fisher(j, p)});
        table.manifest = base_manifest("cfi");
        table.manifest["params"] = {{"j", to_string(j)},
                                    {"phi_min", grid.front()},
                                    {"phi_max", grid.back()},
                                    {"points", grid.size()}};
        emit(table, out);
    }
};

// ------------------------------------------------------------ pdc-weights

struct PdcWeightsCmd {
    double tau = 0.0;
    int max_twice_j = -1;  // -1: auto cutoff with tail < 1e-12
    OutputOptions out;

    void run() const {
        PdcParams pdc{tau, 0.0};
        const int cutoff = max_twice_j >= 0 ? max_twice_j : default_weight_cutoff(pdc);
        PdcWeights w = singlet_weights(pdc, cutoff);
        TableOutput table;
        table.columns = {"two_j", "weight"};
        for (int n = 0; n <= cutoff; ++n)
            table.rows.push_back({static_cast<double>(n), w.weights[static_cast<size_t>(n)]});
        table.manifest = base_manifest("pdc-weights");
        table.manifest["params"] = {{"tau", tau}, {"max_two_j", cutoff}};
        table.manifest["tails"] = {{"weight_tail", w.tail}};
        emit(table, out);
    }
};

// ------------------------------------------------------------------- flux

struct FluxCmd {
    std::optional<double> tau;
    double tau_min = 0.0, tau_max = 2.0;
    int points = 50;
    OutputOptions out;

    void run() const {
        std::vector<double> grid = tau ? std::vector<double>{*tau} : linear_grid(tau_min, tau_max, points);
        TableOutput table;
        table.columns = {"tau", "mean_n", "var_n"};
        for (double t : grid) {
            FluxMoments m = flux_moments(PdcParams{t, 0.0});
            table.rows.push_back({t, m.mean, m.variance});
        }
        table.manifest = base_manifest("flux");
        table.manifest["params"] = {{"tau_min", grid.front()}, {"tau_max", grid.back()}, {"points", grid.size()}};
        emit(table, out);
    }
};

// -------------------------------------------------------------------- qfi

struct QfiCmd {
    std::optional<double> tau;
    std::optional<double> flux;
    double eta = 1.0;
    std::optional<double> flux_min;
    std::optional<double> flux_max;
    int points = 50;
    OutputOptions out;

    void run() const {
        std::vector<double> fluxes;
        if (flux_min && flux_max) {
            fluxes = log_grid(*flux_min, *flux_max, points);
        } else if (flux) {
            fluxes = {*flux};
        } else if (tau) {
            fluxes = {detected_flux(PdcParams{*tau, 0.0}, LossParams{eta})};
        } else {
            throw CLI::ValidationError("qfi", "one of --tau, --flux or --flux-min/--flux-max is required");
        }
        TableOutput table;
        table.columns = {"tau", "eta", "flux", "i_qu"};
        for (double f : fluxes) {
            const double t = eta > 0.0 ? tau_from_flux(f, eta) : std::nan("");
            table.rows.push_back({t, eta, f, lossy_qfi_from_flux(f, eta)});
        }
        table.manifest = base_manifest("qfi");
        table.manifest["params"] = {{"eta", eta}, {"points", fluxes.size()}};
        emit(table, out);
    }
};

// ---------------------------------------------------------------- scaling

struct ScalingCmd {
    std::vector<double> etas{1.0};
    double flux_min = 0.1, flux_max = 100.0;
    int points = 200;
    OutputOptions out;

    void run() const {
        const std::vector<double> fluxes = log_grid(flux_min, flux_max, points);
        TableOutput table;
        table.columns = {"eta", "flux", "i_qu", "gamma"};
        table.rows.resize(etas.size() * fluxes.size());
        parallel_for_index(table.rows.size(), [&](size_t idx) {
            const double eta = etas[idx / fluxes.size()];
            const double f = fluxes[idx % fluxes.size()];
            table.rows[idx] = {eta, f, lossy_qfi_from_flux(f, eta), scaling_exponent(eta, f)};
        });
        table.manifest = base_manifest("scaling");
        table.manifest["params"] = {
            {"etas", etas}, {"flux_min", flux_min}, {"flux_max", flux_max}, {"points", points}};
        emit(table, out);
    }
};

// ------------------------------------------------------------- joint-dist

struct JointDistCmd {
    double tau = 1.83;
    double eta = 0.75;
    int cutoff = 40;
    int max_n = 16;
    OutputOptions out;

    void run() const {
        PdcParams pdc{tau, 0.0};
        Eigen::MatrixXd p = joint_count_distribution(pdc, LossParams{eta}, cutoff, max_n);
        TableOutput table;
        table.columns = {"n_a", "n_b", "p"};
        for (int a = 0; a <= max_n; ++a)
            for (int b = 0; b <= max_n; ++b)
                table.rows.push_back({static_cast<double>(a), static_cast<double>(b), p(a, b)});
        table.manifest = base_manifest("joint-dist");
        table.manifest["params"] = {{"tau", tau}, {"eta", eta}, {"cutoff", cutoff}, {"max_n", max_n}};
        table.manifest["tails"] = {{"source_tail", weight_tail(pdc, cutoff)}};
        emit(table, out);
    }
};

// --------------------------------------------------------------- subspace

struct SubspaceCmd {
    int n_a = 4, n_b = 4;
    double tau = 1.0;
    std::optional<double> theta;
    double theta_min = 0.0, theta_max = 0.3;
    int theta_points = 7;
    double phi_min = 0.02, phi_max = 3.12;
    int phi_points = 40;
    int cutoff = 16;
    OutputOptions out;

    void run() const {
        const PdcParams pdc{tau, 0.0};
        const std::vector<double> thetas =
            theta ? std::vector<double>{*theta} : linear_grid(theta_min, theta_max, theta_points);
        const std::vector<double> phis = linear_grid(phi_min, phi_max, phi_points);
        const double lam = std::tanh(tau);
        struct ThetaRow {
            double weight = 0.0, qfi = 0.0, max_cfi = 0.0;
            std::vector<double> cfi;
        };
        std::vector<double> etas(thetas.size());
        for (size_t ti = 0; ti < thetas.size(); ++ti) {
            etas[ti] = 1.0 - thetas[ti] / lam;
            if (!(etas[ti] >= 0.0 && etas[ti] <= 1.0))
                throw std::runtime_error("theta out of range for this tau: eta would leave [0,1]");
        }
        std::vector<ThetaRow> rows(thetas.size());
        parallel_for_index(thetas.size(), [&](size_t ti) {
            SubspaceDensity rho = subspace_density(pdc, LossParams{etas[ti]}, n_a, n_b, cutoff);
            rows[ti].weight = rho.weight;
            rows[ti].qfi = subspace_qfi(rho);
            rows[ti].cfi.resize(phis.size());
            for (size_t pi = 0; pi < phis.size(); ++pi) {
                const double c = conditional_cfi(rho, phis[pi]);
                rows[ti].cfi[pi] = c;
                rows[ti].max_cfi = std::max(rows[ti].max_cfi, c);
            }
        });
        const std::string suffix = std::to_string(n_a) + std::to_string(n_b);
        TableOutput table;
        table.columns = {"phi",       "theta",        "cfi_" + suffix, "weighted_cfi",
                         "qfi_" + suffix, "max_cfi_over_phi"};
        for (size_t ti = 0; ti < thetas.size(); ++ti)
            for (size_t pi = 0; pi < phis.size(); ++pi)
                table.rows.push_back({phis[pi], thetas[ti], rows[ti].cfi[pi],
                                      rows[ti].cfi[pi] * rows[ti].weight, rows[ti].qfi,
                                      rows[ti].max_cfi});
        table.manifest = base_manifest("subspace");
        table.manifest["params"] = {{"n_a", n_a},           {"n_b", n_b},
                                    {"tau", tau},           {"theta_min", thetas.front()},
                                    {"theta_max", thetas.back()}, {"theta_points", thetas.size()},
                                    {"phi_min", phi_min},   {"phi_max", phi_max},
                                    {"phi_points", phi_points}, {"cutoff", cutoff}};
        table.manifest["tails"] = {{"source_tail", weight_tail(pdc, cutoff)}};
        emit(table, out);
    }
};

// ------------------------------------------------------------------ bayes

struct BayesCmd {
    SpinOption spin;
    int k = 20;
    int trials = 250;
    double phi_true = 1.2;
    uint64_t seed = 20110711;
    int grid_size = 2048;
    OutputOptions out;

    void run() const {
        TrialConfig config{spin.resolve(), k, trials, phi_true, seed, grid_size};
        TrialStats stats = run_experiment(config);
        TableOutput table;
        table.columns = {"trial", "estimate"};
        for (size_t i = 0; i < stats.estimates.size(); ++i)
            table.rows.push_back({static_cast<double>(i), stats.estimates[i]});
        table.manifest = base_manifest("bayes");
        table.manifest["params"] = {{"j", to_string(config.j)}, {"k", k},
                                    {"trials", trials},         {"phi_true", phi_true},
                                    {"grid", grid_size}};
        table.manifest["seed"] = seed;
        table.manifest["summary"] = {{"mean", stats.mean},
                                     {"rmse", stats.rmse},
                                     {"theoretical_limit", stats.theoretical_limit}};
        table.comments.push_back("summary: mean=" + format_double(stats.mean) +
                                 " rmse=" + format_double(stats.rmse) +
                                 " dphi_m=" + format_double(stats.theoretical_limit));
        emit(table, out);
    }
};

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Spin-singlet phase estimation toolkit: exact outcome distributions, "
                 "Fisher information with and without photon loss, and Bayesian simulation"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    DmatrixCmd dmatrix;
    auto* dm = app.add_subcommand("dmatrix", "Wigner small-d rotation matrix entries");
    dmatrix.spin.attach(dm);
    dm->add_option("--phi", dmatrix.phi, "Rotation angle (radians)")->required();
    add_output_options(dm, dmatrix.out);

    CfiCmd cfi;
    auto* cf = app.add_subcommand("cfi", "Classical Fisher information of the singlet protocol");
    cfi.spin.attach(cf);
    cf->add_option("--phi", cfi.phi, "Single phase value");
    cf->add_option("--phi-min", cfi.phi_min, "Grid start")->capture_default_str();
    cf->add_option("--phi-max", cfi.phi_max, "Grid end")->capture_default_str();
    cf->add_option("--points", cfi.points, "Grid size")->capture_default_str();
    add_output_options(cf, cfi.out);

    PdcWeightsCmd weights;
    auto* pw = app.add_subcommand("pdc-weights", "Singlet mixture weights of the source");
    pw->add_option("--tau", weights.tau, "Interaction time")->required();
    pw->add_option("--max-2j", weights.max_twice_j, "Weight cutoff (default: tail < 1e-12)");
    add_output_options(pw, weights.out);

    FluxCmd flux;
    auto* fl = app.add_subcommand("flux", "Source flux mean and variance");
    fl->add_option("--tau", flux.tau, "Single tau value");
    fl->add_option("--tau-min", flux.tau_min, "Grid start")->capture_default_str();
    fl->add_option("--tau-max", flux.tau_max, "Grid end")->capture_default_str();
    fl->add_option("--points", flux.points, "Grid size")->capture_default_str();
    add_output_options(fl, flux.out);

    QfiCmd qfi;
    auto* qf = app.add_subcommand("qfi", "Ensemble quantum Fisher information under loss");
    qf->add_option("--tau", qfi.tau, "Interaction time (flux derived)");
    qf->add_option("--flux", qfi.flux, "Detected flux");
    qf->add_option("--eta", qfi.eta, "Transmission")->capture_default_str();
    qf->add_option("--flux-min", qfi.flux_min, "Log-grid start");
    qf->add_option("--flux-max", qfi.flux_max, "Log-grid end");
    qf->add_option("--points", qfi.points, "Log-grid size")->capture_default_str();
    add_output_options(qf, qfi.out);

    ScalingCmd scaling;
    auto* sc = app.add_subcommand("scaling", "Local scaling exponent gamma over a flux grid");
    sc->add_option("--eta", scaling.etas, "Transmission values")->capture_default_str();
    sc->add_option("--flux-min", scaling.flux_min, "Log-grid start")->capture_default_str();
    sc->add_option("--flux-max", scaling.flux_max, "Log-grid end")->capture_default_str();
    sc->add_option("--points", scaling.points, "Log-grid size")->capture_default_str();
    add_output_options(sc, scaling.out);

    JointDistCmd joint;
    auto* jd = app.add_subcommand("joint-dist", "Detected photon-number weights P(n_a, n_b)");
    jd->add_option("--tau", joint.tau, "Interaction time")->capture_default_str();
    jd->add_option("--eta", joint.eta, "Transmission")->capture_default_str();
    jd->add_option("--cutoff", joint.cutoff, "Source photon cutoff per arm")->capture_default_str();
    jd->add_option("--max-n", joint.max_n, "Largest detected count tabulated")->capture_default_str();
    add_output_options(jd, joint.out);

    SubspaceCmd subspace;
    auto* ss = app.add_subcommand("subspace",
                                  "Conditional Fisher information in one detected subspace");
    ss->add_option("--na", subspace.n_a, "Detected photons in arm a")->capture_default_str();
    ss->add_option("--nb", subspace.n_b, "Detected photons in arm b")->capture_default_str();
    ss->add_option("--tau", subspace.tau, "Interaction time")->capture_default_str();
    ss->add_option("--theta", subspace.theta, "Single decoherence value");
    ss->add_option("--theta-min", subspace.theta_min, "Theta grid start")->capture_default_str();
    ss->add_option("--theta-max", subspace.theta_max, "Theta grid end")->capture_default_str();
    ss->add_option("--theta-points", subspace.theta_points, "Theta grid size")->capture_default_str();
    ss->add_option("--phi-min", subspace.phi_min, "Phi grid start")->capture_default_str();
    ss->add_option("--phi-max", subspace.phi_max, "Phi grid end")->capture_default_str();
    ss->add_option("--phi-points", subspace.phi_points, "Phi grid size")->capture_default_str();
    ss->add_option("--cutoff", subspace.cutoff, "Source photon cutoff per arm")->capture_default_str();
    add_output_options(ss, subspace.out);

    BayesCmd bayes;
    auto* by = app.add_subcommand("bayes", "Monte Carlo Bayesian phase-estimation experiment");
    bayes.spin.attach(by);
    by->add_option("--k", bayes.k, "Updates per estimate")->capture_default_str();
    by->add_option("--trials", bayes.trials, "Independent trials")->capture_default_str();
    by->add_option("--phi-true", bayes.phi_true, "True phase")->capture_default_str();
    by->add_option("--seed", bayes.seed, "Base RNG seed")->capture_default_str();
    by->add_option("--grid", bayes.grid_size, "Posterior grid size")->capture_default_str();
    add_output_options(by, bayes.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (dm->parsed()) dmatrix.run();
        if (cf->parsed()) cfi.run();
        if (pw->parsed()) weights.run();
        if (fl->parsed()) flux.run();
        if (qf->parsed()) qfi.run();
        if (sc->parsed()) scaling.run();
        if (jd->parsed()) joint.run();
        if (ss->parsed()) subspace.run();
        if (by->parsed()) bayes.run();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int dispatch(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("pdcphase");
    for (const auto& a : args) argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace pdcphase::cli
