// despeckle: estimate functions under speckle noise, run Monte Carlo rate
// experiments, and audit the lower-bound constructions.
//
// Exit codes: 0 success, 1 a report-level check failed, 2 invalid
// configuration or malformed input, 3 singular design matrix.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "despeckle/estimators.hpp"
#include "despeckle/io.hpp"
#include "despeckle/lower_bound.hpp"
#include "despeckle/risk_harness.hpp"
#include "despeckle/rng.hpp"

namespace {

using despeckle::EstimatorKind;
using despeckle::Loss;
using despeckle::SigmaRule;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

Loss parse_loss(const std::string& s) {
    if (s == "l2") return Loss::L2;
    if (s == "sup") return Loss::Sup;
    throw CLI::ValidationError("--loss", "must be 'l2' or 'sup'");
}

EstimatorKind parse_estimator(const std::string& s) {
    if (s == "despeckle") return EstimatorKind::Despeckle;
    if (s == "denoise") return EstimatorKind::Denoise;
    throw CLI::ValidationError("--estimator", "must be 'despeckle' or 'denoise'");
}

SigmaRule make_rule(const std::optional<double>& sigma, const std::optional<double>& power) {
    if (sigma.has_value() == power.has_value())
        throw CLI::ValidationError("--sigma/--sigma-power", "give exactly one of the two");
    if (sigma) return {SigmaRule::Kind::Fixed, *sigma};
    return {SigmaRule::Kind::Power, *power};
}

void write_text(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string in_path;
    std::string out_path = "-";
    double sigma = 0;
    double beta = 0;
    double l = 1.0;
    double hfloor = 0.25;
    std::string loss = "l2";
    std::string estimator = "despeckle";
    int grid = 512;
};

int run_estimate(const EstimateArgs& args) {
    const Loss loss = parse_loss(args.loss);
    const EstimatorKind kind = parse_estimator(args.estimator);
    const despeckle::NoiseModel model = kind == EstimatorKind::Despeckle
                                            ? despeckle::NoiseModel::Speckle
                                            : despeckle::NoiseModel::AdditiveOnly;

    std::ifstream in(args.in_path);
    if (!in) {
        std::cerr << "error: cannot open " << args.in_path << "\n";
        return 2;
    }
    despeckle::ObservationSet obs;
    try {
        obs = despeckle::io::read_observations_csv(in, args.sigma, model);
    } catch (const despeckle::CsvError& e) {
        std::cerr << "error: malformed CSV: " << e.what() << "\n";
        return 2;
    }

    const despeckle::HolderSpec spec{args.beta, args.l, args.hfloor};
    spec.validate();
    double h = 0;
    if (kind == EstimatorKind::Despeckle)
        h = loss == Loss::L2 ? despeckle::bandwidth_l2(obs.n, args.sigma, args.beta)
                             : despeckle::bandwidth_sup(obs.n, args.sigma, args.beta);
    else
        h = loss == Loss::L2 ? despeckle::bandwidth_l2_additive(obs.n, args.sigma, args.beta)
                             : despeckle::bandwidth_sup_additive(obs.n, args.sigma, args.beta);

    const Eigen::VectorXd grid = despeckle::uniform_grid(args.grid);
    despeckle::EstimateCurve curve;
    try {
        curve = kind == EstimatorKind::Despeckle
                    ? despeckle::despeckle_estimate(obs, grid, spec, h)
                    : despeckle::denoise_estimate(obs, grid, spec, h);
    } catch (const despeckle::SingularDesign& e) {
        std::cerr << "error: singular design at x=" << despeckle::io::format_double(e.x())
                  << " (min eigenvalue " << e.min_eigenvalue() << "); enlarge the bandwidth\n";
        return 3;
    }

    std::ostringstream csv;
    despeckle::io::write_curve_csv(csv, curve);
    write_text(args.out_path, csv.str());

    // config echo goes to stderr so `--out -` still emits clean CSV
    std::cerr << "estimate: n=" << obs.n << " sigma=" << despeckle::io::format_double(args.sigma)
              << " beta=" << args.beta << " l=" << args.l << " hfloor=" << args.hfloor
              << " loss=" << args.loss << " estimator=" << args.estimator
              << " grid=" << args.grid
              << " bandwidth=" << despeckle::io::format_double(h) << "\n";
    return 0;
}

// ----------------------------------------------------------- simulate-risk

struct SimulateArgs {
    double beta = 2.0;
    double l = 1.0;
    double hfloor = 0.25;
    std::vector<int> ns;
    std::optional<double> sigma;
    std::optional<double> sigma_power;
    int trials = 200;
    std::uint64_t seed = 1234;
    std::string loss = "l2";
    int grid = 512;
    int workers = 0;
    double multiplier = 1.0;
    double slope_tol = 0.15;
    std::string out = "risk";
};

int run_simulate(const SimulateArgs& args) {
    const Loss loss = parse_loss(args.loss);
    const SigmaRule rule = make_rule(args.sigma, args.sigma_power);
    despeckle::McConfig mc;
    mc.grid_size = args.grid;
    mc.workers = args.workers;
    mc.bandwidth_multiplier = args.multiplier;

    Timer timer;
    const despeckle::RegimeReport report = despeckle::regime_sweep(
        args.beta, args.l, args.hfloor, args.ns, rule, args.trials, args.seed, loss, mc);

    {
        std::ostringstream csv;
        despeckle::io::write_risk_csv(csv, report.despeckle_points, loss);
        write_text(args.out + ".despeckle.csv", csv.str());
    }
    {
        std::ostringstream csv;
        despeckle::io::write_risk_csv(csv, report.denoise_points, loss);
        write_text(args.out + ".denoise.csv", csv.str());
    }
    const nlohmann::json j = despeckle::io::regime_report_json(report, args.slope_tol);
    write_json(args.out + ".json", j);

    const bool pass = j["checks"]["despeckle_slope_within_tolerance"].get<bool>() &&
                      j["checks"]["denoise_slope_within_tolerance"].get<bool>();
    std::cerr << "simulate-risk: despeckle slope " << report.despeckle_fit.slope << " (target "
              << report.despeckle_fit.theoretical_slope << "), denoise slope "
              << report.denoise_fit.slope << " (target " << report.denoise_fit.theoretical_slope
              << "), " << (pass ? "PASS" : "FAIL") << " [" << timer.seconds() << " s]\n";
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------- rate-fit

struct RateFitArgs {
    std::string in_path;
    double beta = 2.0;
    std::optional<double> sigma;
    std::optional<double> sigma_power;
    std::string loss = "l2";
    std::string estimator = "despeckle";
    double slope_tol = 0.15;
    std::string out = "-";
};

int run_rate_fit(const RateFitArgs& args) {
    const Loss loss = parse_loss(args.loss);
    const SigmaRule rule = make_rule(args.sigma, args.sigma_power);
    std::ifstream in(args.in_path);
    if (!in) {
        std::cerr << "error: cannot open " << args.in_path << "\n";
        return 2;
    }
    std::vector<despeckle::RiskPoint> points;
    try {
        points = despeckle::io::read_risk_csv(in);
    } catch (const despeckle::CsvError& e) {
        std::cerr << "error: malformed CSV: " << e.what() << "\n";
        return 2;
    }
    // read_risk_csv stores the selected loss column in risk_l2.
    if (loss == Loss::Sup) {
        for (auto& p : points) {
            p.risk_sup = p.risk_l2;
            p.se_sup = p.se_l2;
        }
    }
    const despeckle::RateFit fit =
        despeckle::rate_fit(points, loss, args.beta, rule, parse_estimator(args.estimator));
    const bool pass = std::abs(fit.slope - fit.theoretical_slope) <= args.slope_tol;
    nlohmann::json j = {{"schema_version", despeckle::io::kSchemaVersion},
                        {"config",
                         {{"beta", args.beta},
                          {"sigma_rule", rule.describe()},
                          {"loss", args.loss},
                          {"estimator", args.estimator},
                          {"slope_tolerance", args.slope_tol},
                          {"in", args.in_path}}},
                        {"fit", despeckle::io::rate_fit_json(fit)},
                        {"pass", pass}};
    write_json(args.out, j);
    return pass ? 0 : 1;
}

// ----------------------------------------------------------------- packing

struct PackingArgs {
    int m = 16;
    std::uint64_t seed = 1;
    double delta = 0.0;  // 0 -> 1/m
    double beta = 2.0;
    double l = 1.0;
    std::string out = "-";
};

int run_packing(const PackingArgs& args) {
    const double delta = args.delta > 0.0 ? args.delta : 1.0 / args.m;
    despeckle::PackingSet set;
    try {
        set = despeckle::gilbert_varshamov(args.m, args.seed);
    } catch (const despeckle::SearchExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const despeckle::BasicFunction bf = despeckle::build_basic_function(args.beta, args.l);
    const double separation = despeckle::packing_l2_separation(set, delta, bf);
    const double phi_l2 = despeckle::phi_l2_norm(bf);
    const double required =
        std::sqrt(args.m / 16.0) * std::pow(delta, args.beta + 0.5) * phi_l2 * 0.98;

    nlohmann::json j = despeckle::io::packing_json(set);
    j["config"] = {{"m", args.m},   {"seed", args.seed}, {"delta", delta},
                   {"beta", args.beta}, {"l", args.l}};
    j["separation"] = {{"min_l2_distance", separation},
                       {"required", required},
                       {"phi_l2", phi_l2},
                       {"pass", separation >= required}};
    write_json(args.out, j);
    const bool pass = j["audit_pass"].get<bool>() && separation >= required;
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------- lr-check

struct LrCheckArgs {
    int n = 16384;
    double sigma = 1.0;
    double beta = 1.0;
    double l = 1.0;
    int trials = 500;
    int index = 1;
    int oracle_instances = 200;
    std::uint64_t seed = 7;
    std::string out = "-";
};

int run_lr_check(const LrCheckArgs& args) {
    Timer timer;
    const double max_rel = despeckle::lr_oracle_max_rel_error(args.oracle_instances, args.seed);

    const double delta = despeckle::delta_l2(args.n, args.sigma, args.beta);
    const int m = despeckle::bump_count(delta);
    nlohmann::json j = {{"schema_version", despeckle::io::kSchemaVersion},
                        {"config",
                         {{"n", args.n},
                          {"sigma", args.sigma},
                          {"beta", args.beta},
                          {"l", args.l},
                          {"trials", args.trials},
                          {"index", args.index},
                          {"oracle_instances", args.oracle_instances},
                          {"seed", args.seed}}},
                        {"oracle_max_rel_error", max_rel},
                        {"oracle_pass", max_rel < 1e-8}};
    if (m >= 8) {
        const despeckle::PackingSet packing =
            despeckle::gilbert_varshamov(m, despeckle::rng::derive(args.seed, 0xC0DE));
        const despeckle::LrDiagnostic diag = despeckle::lr_lemma_diagnostic(
            args.index, packing, args.n, args.sigma, args.beta, args.trials,
            despeckle::rng::derive(args.seed, 0xD1A6), args.l);
        j["diagnostic"] = despeckle::io::lr_diagnostic_json(diag);
    } else {
        j["diagnostic"] = nullptr;
        std::cerr << "note: m=" << m << " < 8, skipping the packing diagnostic\n";
    }
    write_json(args.out, j);
    std::cerr << "lr-check: oracle max rel error " << max_rel << " [" << timer.seconds()
              << " s]\n";
    return max_rel < 1e-8 ? 0 : 1;
}

// --------------------------------------------------------------- mle-check

struct MleArgs {
    double theta0 = 0.5;
    double sigma = 1.0;
    int n = 10000;
    int trials = 10000;
    std::uint64_t seed = 99;
    double tol = 0.10;
    int workers = 0;
    std::string out = "-";
};

int run_mle_check(const MleArgs& args) {
    Timer timer;
    const despeckle::MleCheck check = despeckle::mle_delta_method_check(
        args.theta0, args.sigma, args.n, args.trials, args.seed, args.workers);
    const bool pass = std::abs(check.ratio() - 1.0) <= args.tol;
    nlohmann::json j = {{"schema_version", despeckle::io::kSchemaVersion},
                        {"config",
                         {{"theta0", args.theta0},
                          {"sigma", args.sigma},
                          {"n", args.n},
                          {"trials", args.trials},
                          {"seed", args.seed},
                          {"tol", args.tol}}},
                        {"sample_variance", check.sample_variance},
                        {"oracle_variance", check.oracle_variance},
                        {"ratio", check.ratio()},
                        {"mean_estimate", check.mean_estimate},
                        {"pass", pass}};
    write_json(args.out, j);
    std::cerr << "mle-check: variance ratio " << check.ratio() << " ("
              << (pass ? "PASS" : "FAIL") << ") [" << timer.seconds() << " s]\n";
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"De-speckling estimators and minimax-rate experiments"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value configuration file");

    EstimateArgs est;
    CLI::App* cmd_est = app.add_subcommand("estimate", "fit a curve to an x,y CSV");
    cmd_est->add_option("--in", est.in_path, "input CSV with header x,y")->required();
    cmd_est->add_option("--out", est.out_path, "output CSV path or -");
    cmd_est->add_option("--sigma", est.sigma, "additive noise std")->required();
    cmd_est->add_option("--beta", est.beta, "Holder smoothness")->required();
    cmd_est->add_option("--l", est.l, "Holder constant");
    cmd_est->add_option("--hfloor", est.hfloor, "class floor h");
    cmd_est->add_option("--loss", est.loss, "l2|sup (bandwidth rule)");
    cmd_est->add_option("--estimator", est.estimator, "despeckle|denoise");
    cmd_est->add_option("--grid", est.grid, "evaluation grid size");

    SimulateArgs sim;
    CLI::App* cmd_sim = app.add_subcommand("simulate-risk", "Monte Carlo risk sweep + rate fits");
    cmd_sim->add_option("--beta", sim.beta, "Holder smoothness");
    cmd_sim->add_option("--l", sim.l, "Holder constant");
    cmd_sim->add_option("--hfloor", sim.hfloor, "class floor h");
    cmd_sim->add_option("--ns", sim.ns, "sample sizes, increasing")->required()->expected(-1);
    cmd_sim->add_option("--sigma", sim.sigma, "fixed sigma");
    cmd_sim->add_option("--sigma-power", sim.sigma_power, "sigma_n = n^a");
    cmd_sim->add_option("--trials", sim.trials, "trials per point");
    cmd_sim->add_option("--seed", sim.seed, "master seed");
    cmd_sim->add_option("--loss", sim.loss, "l2|sup");
    cmd_sim->add_option("--grid", sim.grid, "evaluation grid size");
    cmd_sim->add_option("--workers", sim.workers, "worker threads (0 = auto)");
    cmd_sim->add_option("--multiplier", sim.multiplier, "bandwidth multiplier");
    cmd_sim->add_option("--slope-tol", sim.slope_tol, "slope tolerance for pass/fail");
    cmd_sim->add_option("--out", sim.out, "output prefix");

    RateFitArgs rf;
    CLI::App* cmd_rf = app.add_subcommand("rate-fit", "fit a slope to a risk CSV");
    cmd_rf->add_option("--in", rf.in_path, "risk CSV from simulate-risk")->required();
    cmd_rf->add_option("--beta", rf.beta, "Holder smoothness");
    cmd_rf->add_option("--sigma", rf.sigma, "fixed sigma");
    cmd_rf->add_option("--sigma-power", rf.sigma_power, "sigma_n = n^a");
    cmd_rf->add_option("--loss", rf.loss, "l2|sup");
    cmd_rf->add_option("--estimator", rf.estimator, "despeckle|denoise (slope target)");
    cmd_rf->add_option("--slope-tol", rf.slope_tol, "slope tolerance");
    cmd_rf->add_option("--out", rf.out, "output JSON path or -");

    PackingArgs pk;
    CLI::App* cmd_pk = app.add_subcommand("packing", "Gilbert-Varshamov packing + audit");
    cmd_pk->add_option("--m", pk.m, "code length, >= 8")->required()->check(CLI::Range(8, 1 << 20));
    cmd_pk->add_option("--seed", pk.seed, "search seed");
    cmd_pk->add_option("--delta", pk.delta, "bump spacing (default 1/m)");
    cmd_pk->add_option("--beta", pk.beta, "Holder smoothness for phi");
    cmd_pk->add_option("--l", pk.l, "Holder constant for phi");
    cmd_pk->add_option("--out", pk.out, "output JSON path or -");

    LrCheckArgs lr;
    CLI::App* cmd_lr = app.add_subcommand("lr-check", "likelihood-ratio oracle + lemma diagnostic");
    cmd_lr->add_option("--n", lr.n, "sample size for the diagnostic");
    cmd_lr->add_option("--sigma", lr.sigma, "additive noise std");
    cmd_lr->add_option("--beta", lr.beta, "Holder smoothness");
    cmd_lr->add_option("--l", lr.l, "Holder constant");
    cmd_lr->add_option("--trials", lr.trials, "diagnostic trials");
    cmd_lr->add_option("--index", lr.index, "hypothesis index (0 = degenerate)");
    cmd_lr->add_option("--oracle-instances", lr.oracle_instances, "random oracle instances");
    cmd_lr->add_option("--seed", lr.seed, "master seed");
    cmd_lr->add_option("--out", lr.out, "output JSON path or -");

    MleArgs mle;
    CLI::App* cmd_mle = app.add_subcommand("mle-check", "scalar MLE delta-method check");
    cmd_mle->add_option("--theta0", mle.theta0, "true theta");
    cmd_mle->add_option("--sigma", mle.sigma, "additive noise std");
    cmd_mle->add_option("--n", mle.n, "observations per trial");
    cmd_mle->add_option("--trials", mle.trials, "Monte Carlo trials");
    cmd_mle->add_option("--seed", mle.seed, "master seed");
    cmd_mle->add_option("--tol", mle.tol, "relative variance tolerance");
    cmd_mle->add_option("--workers", mle.workers, "worker threads (0 = auto)");
    cmd_mle->add_option("--out", mle.out, "output JSON path or -");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_est->parsed()) return run_estimate(est);
        if (cmd_sim->parsed()) return run_simulate(sim);
        if (cmd_rf->parsed()) return run_rate_fit(rf);
        if (cmd_pk->parsed()) return run_packing(pk);
        if (cmd_lr->parsed()) return run_lr_check(lr);
        if (cmd_mle->parsed()) return run_mle_check(mle);
    } catch (const despeckle::SingularDesign& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const despeckle::CsvError& e) {
        std::cerr << "error: malformed CSV: " << e.what() << "\n";
        return 2;
    } catch (const despeckle::SearchExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const despeckle::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
