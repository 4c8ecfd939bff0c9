// Command-line front end: instance ingestion, solver and verification
// orchestration, parameter sweeps, CSV/JSON emission.
//
// Exit codes: 0 success / verdict true, 2 verdict false, 1 usage or I/O error.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "plap/io.hpp"
#include "plap/plap.hpp"

namespace fs = std::filesystem;
using plap::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerdictFalse = 2;

int default_grid_n() {
    if (const char* env = std::getenv("PLAP_DEFAULT_GRID_N")) {
        const int n = std::atoi(env);
        if (n >= 11 && n % 2 == 1) return n;
        std::cerr << "warning: ignoring PLAP_DEFAULT_GRID_N='" << env
                  << "' (need an odd integer >= 11)\n";
    }
    return 2001;
}

struct CsvWriter {
    std::ofstream out;

    explicit CsvWriter(const std::string& path) : out(path) {
        if (!out) throw plap::BadInput("cannot open output file: " + path);
        out.precision(17);
    }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << "\n";
    }

    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << vals[i];
        out << "\n";
    }
};

void write_atomically(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw plap::BadInput("cannot open output file: " + tmp);
        out << contents;
    }
    fs::rename(tmp, path);
}

bool is_plateau_token(const std::string& s) { return s == "girg" || s == "plateau"; }
bool is_theta_token(const std::string& s) { return s == "one" || s == "theta"; }

// ---------------------------------------------------------------- solve

int cmd_solve(const std::string& instance_path, const std::string& method, int grid_n, double tol,
              const std::string& out_path) {
    const plap::ProblemInstance inst = plap::load_instance(instance_path);
    plap::NumericPolicy policy;
    policy.grid_n = grid_n;
    policy.tol_solve = tol;
    policy.validate();

    plap::SolutionProfile sol;
    if (method == "shooting") {
        if (!inst.has_constant_drift()) {
            std::cerr << "shooting requires constant drift\n";
            return kExitUsage;
        }
        if (!inst.phi.is_zero()) {
            std::cerr << "shooting requires a zero reaction term\n";
            return kExitUsage;
        }
        sol = plap::solve_shooting(inst, policy);
    } else if (method == "newton") {
        sol = plap::solve_newton_fd(inst, policy);
    } else if (method == "auto") {
        sol = plap::solve_auto(inst, policy);
    } else {
        std::cerr << "unknown method '" << method << "'\n";
        return kExitUsage;
    }

    const plap::OperatorResidual res = plap::apply_operator(inst, sol);
    CsvWriter csv(out_path);
    csv.header({"x", "u", "du", "residual"});
    for (std::size_t i = 0; i < sol.u.nodes.size(); ++i)
        csv.row({sol.u.nodes[i], sol.u.values[i], sol.du[i], res.grid.values[i]});
    std::cout << "method=" << plap::to_string(sol.method)
              << " nodes=" << sol.u.nodes.size() << " residual_sup=" << sol.residual_sup
              << " regularization=" << sol.regularization_final << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const std::string& instance_path, const std::string& g_path,
                const std::string& out_path, int grid_n, double tol) {
    plap::ProblemInstance inst_u = plap::load_instance(instance_path);
    plap::ProblemInstance inst_v = inst_u;
    inst_v.f = plap::load_field(g_path);

    plap::NumericPolicy policy;
    policy.grid_n = grid_n;
    policy.tol_solve = tol;
    policy.validate();

    std::vector<double> bps = inst_u.data_breakpoints();
    const auto more = inst_v.data_breakpoints();
    bps.insert(bps.end(), more.begin(), more.end());
    std::vector<double> nodes = plap::refined_nodes(policy, bps);

    const plap::SolutionProfile u = plap::solve_auto(inst_u, policy, nodes);
    const plap::SolutionProfile v = plap::solve_auto(inst_v, policy, nodes);
    const plap::ComparisonVerdict verdict = plap::compare(u, v, policy);
    plap::write_json(out_path, plap::verdict_to_json(verdict));
    std::cout << "wcp_holds=" << (verdict.wcp_holds ? "true" : "false")
              << " min_gap=" << verdict.min_gap << " P1_count=" << verdict.P1_intervals.size()
              << "\n";
    return verdict.wcp_holds ? kExitOk : kExitVerdictFalse;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const std::string& family, double p, double theta1, double theta2, double lambda,
               int grid_n, const std::string& out_path) {
    plap::NumericPolicy policy;
    policy.grid_n = grid_n;
    json report;
    bool pass = false;
    if (is_plateau_token(family)) {
        const auto rep = plap::verify_plateau_counterexample(plap::Exponent(p), policy);
        report = plap::plateau_report_to_json(rep);
        report["policy"] = plap::policy_to_json(policy);
        pass = rep.pass;
    } else if (is_theta_token(family)) {
        plap::ThetaFamilyParams prm;
        prm.p = plap::Exponent(p);
        prm.theta1 = theta1;
        prm.theta2 = theta2;
        prm.lambda = lambda >= 0.0 ? lambda : plap::ThetaFamilyParams::lambda_min(p, theta2);
        const auto rep = plap::verify_theta_counterexample(prm, policy);
        report = plap::theta_report_to_json(rep);
        report["policy"] = plap::policy_to_json(policy);
        pass = rep.pass;
    } else {
        std::cerr << "unknown family '" << family << "' (expected one|girg)\n";
        return kExitUsage;
    }
    if (!out_path.empty()) plap::write_json(out_path, report);
    std::cout << report.dump(2) << "\n";
    return pass ? kExitOk : kExitVerdictFalse;
}

// ---------------------------------------------------------------- emit-example

int cmd_emit_example(const std::string& family, double p, double theta1, double theta2,
                     double lambda, int grid_n, const std::string& out_path) {
    plap::NumericPolicy policy;
    policy.grid_n = grid_n;
    CsvWriter csv(out_path);
    csv.header({"x", "u", "v", "f", "g", "b"});
    if (is_plateau_token(family)) {
        const plap::Exponent pe(p);
        const auto nodes = plap::plateau_grid(pe, policy);
        const double b0 = plap::plateau_b0(pe);
        for (double x : nodes) {
            const auto [f, g] = plap::plateau_sources(pe, x);
            csv.row({x, plap::plateau_u(pe, x), plap::plateau_v(pe, x), f, g, b0});
        }
    } else if (is_theta_token(family)) {
        plap::ThetaFamilyParams prm;
        prm.p = plap::Exponent(p);
        prm.theta1 = theta1;
        prm.theta2 = theta2;
        prm.lambda = lambda >= 0.0 ? lambda : plap::ThetaFamilyParams::lambda_min(p, theta2);
        prm.validate();
        const plap::ScalarField b = plap::theta_drift_field(prm);
        const plap::ReactionField phi = plap::ReactionField::linear(prm.lambda);
        const auto nodes = plap::theta_grid(policy);
        for (double x : nodes) {
            csv.row({x, plap::u_theta(prm.theta1, x), plap::u_theta(prm.theta2, x),
                     plap::f_theta(prm.p, prm.theta1, b, phi, x),
                     plap::f_theta(prm.p, prm.theta2, b, phi, x), b(x)});
        }
    } else {
        std::cerr << "unknown family '" << family << "' (expected theta|girg)\n";
        return kExitUsage;
    }
    return kExitOk;
}

// ---------------------------------------------------------------- check-hypotheses

int cmd_check_hypotheses(const std::string& instance_path, const std::string& g_path) {
    const plap::ProblemInstance inst = plap::load_instance(instance_path);
    plap::NumericPolicy policy;
    json out;
    const double s_span = 2.0 * (1.0 + std::max(std::abs(inst.bc_left), std::abs(inst.bc_right)));
    try {
        const auto m = plap::check_hypothesis_M(inst, -s_span, s_span);
        out["M"] = {{"holds", m.holds}, {"margin", m.margin}};
    } catch (const plap::MissingDerivative& e) {
        out["M"] = {{"holds", nullptr}, {"error", e.what()}};
    }
    if (!g_path.empty()) {
        const plap::ScalarField g = plap::load_field(g_path);
        out["H0"] = plap::check_hypothesis_H0(inst.f, g, inst.b, inst.phi, policy).holds;
        out["Hpm1"] = plap::check_hypothesis_Hpm1(inst.f, g, {0.01, 0.05, 0.25}, policy).holds;
    }
    std::cout << out.dump(2) << "\n";
    const bool m_holds = out["M"].contains("holds") && out["M"]["holds"].is_boolean() &&
                         out["M"]["holds"].get<bool>();
    return m_holds ? kExitOk : kExitVerdictFalse;
}

// ---------------------------------------------------------------- sweep

struct SweepRow {
    double value = 0.0;
    std::string verdict;
    double min_gap = 0.0;
    double residual_sup = 0.0;
    double runtime_s = 0.0;
};

int cmd_sweep(const std::string& family, const std::string& parameter,
              const std::vector<double>& values, int grid_n, const std::string& out_dir,
              int jobs) {
    if (values.empty()) {
        std::cerr << "sweep: empty values list\n";
        return kExitUsage;
    }
    if (!(is_plateau_token(family) || is_theta_token(family))) {
        std::cerr << "sweep: unknown family '" << family << "'\n";
        return kExitUsage;
    }
    fs::create_directories(out_dir);

    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};

    auto run_one = [&](std::size_t idx) {
        SweepRow& row = rows[idx];
        row.value = values[idx];
        plap::NumericPolicy policy;
        policy.grid_n = grid_n;
        const auto t0 = std::chrono::steady_clock::now();
        json report;
        try {
            if (is_plateau_token(family)) {
                double p = 4.0;
                if (parameter == "p")
                    p = row.value;
                else if (parameter == "grid_n")
                    policy.grid_n = static_cast<int>(row.value);
                else
                    throw plap::BadInput("sweep: parameter '" + parameter +
                                         "' not valid for this family");
                const auto rep = plap::verify_plateau_counterexample(plap::Exponent(p), policy);
                report = plap::plateau_report_to_json(rep);
                report["policy"] = plap::policy_to_json(policy);
                row.verdict = rep.pass ? "pass" : "fail";
                row.residual_sup = std::max(rep.residual_u, rep.residual_v);
                const auto u = plap::plateau_u_profile(plap::Exponent(p), policy);
                const auto v = plap::plateau_v_profile(plap::Exponent(p), policy);
                row.min_gap = plap::compare(u, v, policy).min_gap;
            } else {
                plap::ThetaFamilyParams prm = plap::ThetaFamilyParams::reference();
                if (parameter == "p")
                    prm.p = plap::Exponent(row.value);
                else if (parameter == "theta1")
                    prm.theta1 = row.value;
                else if (parameter == "theta2")
                    prm.theta2 = row.value;
                else if (parameter == "lambda")
                    prm.lambda = row.value;
                else if (parameter == "grid_n")
                    policy.grid_n = static_cast<int>(row.value);
                else
                    throw plap::BadInput("sweep: parameter '" + parameter +
                                         "' not valid for this family");
                const auto rep = plap::verify_theta_counterexample(prm, policy);
                report = plap::theta_report_to_json(rep);
                report["policy"] = plap::policy_to_json(policy);
                row.verdict = rep.degenerate ? "degenerate" : (rep.pass ? "pass" : "fail");
                row.min_gap = rep.solution_gap_min;
            }
        } catch (const std::exception& e) {
            row.verdict = std::string("error: ") + e.what();
            report = json{{"error", e.what()}, {"value", row.value}};
        }
        row.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream name;
        name << "row_" << idx << ".json";
        write_atomically((fs::path(out_dir) / name.str()).string(), report.dump(2) + "\n");
    };

    if (jobs < 1) jobs = 1;
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1))
                run_one(i);
        });
    for (auto& th : pool) th.join();

    std::ostringstream summary;
    summary.precision(17);
    summary << "value,verdict,min_gap,residual_sup,runtime_s\n";
    bool all_pass = true;
    for (const auto& row : rows) {
        std::string v = row.verdict;
        for (char& c : v)
            if (c == ',') c = ';';
        summary << row.value << "," << v << "," << row.min_gap << "," << row.residual_sup << ","
                << row.runtime_s << "\n";
        if (row.verdict != "pass") all_pass = false;
    }
    write_atomically((fs::path(out_dir) / "summary.csv").string(), summary.str());
    std::cout << summary.str();
    return all_pass ? kExitOk : kExitVerdictFalse;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D degenerate p-Laplacian BVP solver and comparison-principle verifier"};
    app.require_subcommand(1);

    const int grid_default = default_grid_n();

    // solve
    auto* solve = app.add_subcommand("solve", "solve an instance and write x,u,du,residual CSV");
    std::string solve_instance, solve_method = "auto", solve_out = "solution.csv";
    int solve_grid = grid_default;
    double solve_tol = 1e-8;
    solve->add_option("--instance", solve_instance, "instance JSON")->required();
    solve->add_option("--method", solve_method, "shooting|newton|auto");
    solve->add_option("--grid-n", solve_grid, "grid resolution (odd)");
    solve->add_option("--tol", solve_tol, "solver tolerance");
    solve->add_option("--out", solve_out, "output CSV path");

    // compare
    auto* cmp = app.add_subcommand("compare", "solve two sources and emit a comparison verdict");
    std::string cmp_instance, cmp_g, cmp_out = "verdict.json";
    int cmp_grid = grid_default;
    double cmp_tol = 1e-8;
    cmp->add_option("--instance", cmp_instance, "instance JSON (source f)")->required();
    cmp->add_option("--g", cmp_g, "fieldspec JSON for the larger source g")->required();
    cmp->add_option("--grid-n", cmp_grid, "grid resolution (odd)");
    cmp->add_option("--tol", cmp_tol, "solver tolerance");
    cmp->add_option("--out", cmp_out, "verdict JSON path");

    // verify-counterexample
    auto* verify = app.add_subcommand("verify-counterexample",
                                      "run the closed-form counterexample checks");
    std::string verify_family;
    double verify_p = 4.0, verify_t1 = 3.0, verify_t2 = 4.0, verify_lambda = -1.0;
    int verify_grid = grid_default;
    std::string verify_out;
    verify->add_option("family", verify_family, "one|girg")->required();
    verify->add_option("--p", verify_p, "diffusion exponent p > 2");
    verify->add_option("--theta1", verify_t1, "lower family exponent");
    verify->add_option("--theta2", verify_t2, "upper family exponent");
    verify->add_option("--lambda", verify_lambda, "reaction coefficient (default: minimal)");
    verify->add_option("--grid-n", verify_grid, "grid resolution (odd)");
    verify->add_option("--out", verify_out, "report JSON path");

    // emit-example
    auto* emit = app.add_subcommand("emit-example", "write x,u,v,f,g,b CSV for a family");
    std::string emit_family, emit_out = "example.csv";
    double emit_p = 4.0, emit_t1 = 3.0, emit_t2 = 4.0, emit_lambda = -1.0;
    int emit_grid = grid_default;
    emit->add_option("family", emit_family, "theta|girg")->required();
    emit->add_option("--p", emit_p, "diffusion exponent p > 2");
    emit->add_option("--theta1", emit_t1, "lower family exponent");
    emit->add_option("--theta2", emit_t2, "upper family exponent");
    emit->add_option("--lambda", emit_lambda, "reaction coefficient (default: minimal)");
    emit->add_option("--grid-n", emit_grid, "grid resolution (odd)");
    emit->add_option("--out", emit_out, "output CSV path")->required();

    // check-hypotheses
    auto* hyp = app.add_subcommand("check-hypotheses", "print {M, H0, Hpm1} verdicts as JSON");
    std::string hyp_instance, hyp_g;
    hyp->add_option("--instance", hyp_instance, "instance JSON")->required();
    hyp->add_option("--g", hyp_g, "fieldspec JSON for g (enables H0 and Hpm1)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a verification per parameter value");
    std::string sweep_family = "girg", sweep_param = "p", sweep_out = "sweep";
    std::vector<double> sweep_values;
    int sweep_grid = grid_default, sweep_jobs = static_cast<int>(std::thread::hardware_concurrency());
    sweep->add_option("--family", sweep_family, "girg|theta");
    sweep->add_option("--parameter", sweep_param, "p|theta1|theta2|lambda|grid_n");
    sweep->add_option("--values", sweep_values, "parameter values")->delimiter(',');
    sweep->add_option("--grid-n", sweep_grid, "grid resolution (odd)");
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--jobs", sweep_jobs, "worker count (default: logical cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(solve_instance, solve_method, solve_grid, solve_tol, solve_out);
        if (*cmp) return cmd_compare(cmp_instance, cmp_g, cmp_out, cmp_grid, cmp_tol);
        if (*verify)
            return cmd_verify(verify_family, verify_p, verify_t1, verify_t2, verify_lambda,
                              verify_grid, verify_out);
        if (*emit)
            return cmd_emit_example(emit_family, emit_p, emit_t1, emit_t2, emit_lambda, emit_grid,
                                    emit_out);
        if (*hyp) return cmd_check_hypotheses(hyp_instance, hyp_g);
        if (*sweep)
            return cmd_sweep(sweep_family, sweep_param, sweep_values, sweep_grid, sweep_out,
                             sweep_jobs);
    } catch (const plap::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
