#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hitprob/config.hpp"
#include "hitprob/errors.hpp"
#include "hitprob/functional.hpp"
#include "hitprob/gradient.hpp"
#include "hitprob/pmp.hpp"
#include "hitprob/problem.hpp"

namespace {

using hitprob::FullConfig;
using hitprob::McConfig;
using nlohmann::ordered_json;

using clock_type = std::chrono::steady_clock;

struct Phases {
    clock_type::time_point start = clock_type::now();
    clock_type::time_point last = clock_type::now();
    ordered_json timings = ordered_json::object();

    void mark(const std::string& name) {
        const auto now = clock_type::now();
        timings[name] = std::chrono::duration<double>(now - last).count();
        last = now;
    }
    void finish() {
        timings["total_s"] = std::chrono::duration<double>(clock_type::now() - start).count();
    }
};

struct ReportSink {
    ordered_json report = ordered_json::object();
    std::string out_path;

    void emit(Phases& phases) {
        phases.finish();
        report["timings"] = phases.timings;
        const std::string text = report.dump(2) + "\n";
        std::cout << text;
        if (!out_path.empty()) {
            std::ofstream out(out_path, std::ios::binary);
            out << text;
        }
    }
};

void apply_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("HITPROB_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

ordered_json estimate_json(const hitprob::ProbEstimate& est) {
    return {{"value", est.value},
            {"std_error", est.std_error},
            {"samples", est.samples},
            {"boundary_hits", est.boundary_hits}};
}

struct CommonArgs {
    std::string config_path;
    std::string control_path;
    std::string out_path;
    int threads = 0;
    std::int64_t samples = -1;
    std::int64_t seed = -1;
    bool antithetic = false;
};

// Flags override file values.
McConfig merged_mc(const FullConfig& cfg, const CommonArgs& args) {
    McConfig mc = cfg.mc;
    if (args.samples >= 0) mc.samples = args.samples;
    if (args.seed >= 0) mc.seed = static_cast<std::uint64_t>(args.seed);
    if (args.antithetic) mc.antithetic = true;
    return mc;
}

hitprob::Control load_control_or_default(const CommonArgs& args, const FullConfig& cfg,
                                         const hitprob::ProblemInstance& problem) {
    if (args.control_path.empty()) return hitprob::default_control(problem);
    return hitprob::load_control_file(args.control_path, cfg.problem.vset);
}

std::vector<double> control_breaks(const CommonArgs& args, const FullConfig& cfg) {
    if (args.control_path.empty()) return {};
    const auto c = hitprob::load_control_file(args.control_path, cfg.problem.vset);
    return c.grid();
}

int run_compile(const CommonArgs& args, ReportSink& sink, Phases& phases) {
    std::string raw;
    const FullConfig cfg = hitprob::load_config_file(args.config_path, &raw);
    sink.report["config_digest"] = hitprob::fnv1a_digest(raw);
    phases.mark("load_s");

    const auto problem = hitprob::compile(cfg.problem, control_breaks(args, cfg));
    phases.mark("compile_s");

    ordered_json results;
    results["n"] = problem.n();
    results["m"] = problem.m();
    results["num_intervals"] = problem.N();
    results["xhat0"] = hitprob::vector_to_json(problem.fund.xhat0);
    auto residuals = ordered_json::array();
    for (std::size_t i = 1; i <= static_cast<std::size_t>(problem.N()); ++i) {
        const auto& psi = problem.fund.psi[i - 1];
        const auto& phi_ti = problem.fund.phi[problem.grid.switch_indices()[i]];
        residuals.push_back((psi * phi_ti - problem.fund.phi_at_1).cwiseAbs().maxCoeff());
    }
    results["psi_residuals"] = residuals;
    results["grid"] = {{"nodes", problem.grid.nodes().size()},
                       {"segments", problem.grid.segment_bounds().size() - 1},
                       {"steps_per_interval", problem.steps_per_interval},
                       {"switch_times", cfg.problem.system.switch_times}};
    sink.report["results"] = results;
    return 0;
}

int run_eval(const CommonArgs& args, ReportSink& sink, Phases& phases) {
    std::string raw;
    const FullConfig cfg = hitprob::load_config_file(args.config_path, &raw);
    sink.report["config_digest"] = hitprob::fnv1a_digest(raw);
    const McConfig mc = merged_mc(cfg, args);
    sink.report["seed"] = mc.seed;
    phases.mark("load_s");

    const auto problem = hitprob::compile(cfg.problem, control_breaks(args, cfg));
    const auto control = load_control_or_default(args, cfg, problem);
    phases.mark("compile_s");

    const auto z = hitprob::problem_z_vectors(problem, control);
    const auto y = hitprob::propagate_y(problem.system, control, problem.grid);
    const auto cmp = hitprob::compare_g_G(z, y, problem.fund.psi, problem.fund.xhat0, problem.noise,
                                          problem.goal, mc);
    phases.mark("evaluate_s");

    ordered_json results;
    results["phi"] = estimate_json(cmp.g);
    results["phi_trajectory_route"] = estimate_json(cmp.G);
    results["g_vs_G"] = {{"samples", cmp.samples},
                         {"disagreements", cmp.disagreements},
                         {"nonboundary_disagreements", cmp.nonboundary_disagreements},
                         {"agreement_fraction",
                          1.0 - static_cast<double>(cmp.disagreements) / static_cast<double>(cmp.samples)}};
    if (problem.goal.kind() == hitprob::GoalSet::Kind::Halfspace && problem.noise.gaussian_family())
        results["exact_value"] =
            hitprob::evaluate_gaussian_halfspace_exact(z, problem.fund.xhat0, problem.noise, problem.goal);
    sink.report["results"] = results;
    return 0;
}

int run_grad_check(const CommonArgs& args, int k_one_based, double fd_step, ReportSink& sink,
                   Phases& phases) {
    std::string raw;
    const FullConfig cfg = hitprob::load_config_file(args.config_path, &raw);
    sink.report["config_digest"] = hitprob::fnv1a_digest(raw);
    const McConfig mc = merged_mc(cfg, args);
    sink.report["seed"] = mc.seed;
    phases.mark("load_s");

    const auto problem = hitprob::compile(cfg.problem, control_breaks(args, cfg));
    const auto control = load_control_or_default(args, cfg, problem);
    const auto z = hitprob::problem_z_vectors(problem, control);
    phases.mark("compile_s");

    const int N = problem.N();
    if (k_one_based < 1 || k_one_based > N)
        throw hitprob::ValidationError("--k: must be in 1.." + std::to_string(N));
    const int k = k_one_based - 1;

    const bool has_exact = problem.goal.kind() == hitprob::GoalSet::Kind::Halfspace &&
                           problem.noise.gaussian_family();
    Eigen::VectorXd exact_grad;
    if (has_exact)
        exact_grad = hitprob::gaussian_halfspace_exact_grad(z, problem.fund.xhat0, problem.noise,
                                                            problem.goal, k);

    auto rows = ordered_json::array();
    bool all_agree = true;
    for (int j = 0; j < N; ++j) {
        const auto score = hitprob::directional_derivative_mc(k, j, z, problem.fund.xhat0,
                                                              problem.noise, problem.goal, mc);
        const auto fd = hitprob::finite_difference_directional(k, j, z, problem.fund.xhat0,
                                                               problem.noise, problem.goal, mc, fd_step);
        const double tol = 3.0 * std::sqrt(score.std_error * score.std_error +
                                           fd.std_error * fd.std_error);
        bool agree = std::abs(score.value - fd.value) <= tol;
        ordered_json row = {{"j", j + 1},
                            {"score_estimator", score.value},
                            {"score_se", score.std_error},
                            {"finite_difference", fd.value},
                            {"fd_se", fd.std_error}};
        if (has_exact) {
            const double exact_dir = exact_grad.dot(z.z[static_cast<std::size_t>(j)]);
            row["closed_form"] = exact_dir;
            agree = agree && std::abs(score.value - exact_dir) <= 3.0 * score.std_error + 1e-12;
        }
        row["agree"] = agree;
        all_agree = all_agree && agree;
        rows.push_back(std::move(row));
    }
    phases.mark("estimate_s");

    ordered_json results;
    results["k"] = k_one_based;
    results["fd_step"] = fd_step;
    results["rows"] = rows;
    results["all_agree"] = all_agree;
    sink.report["results"] = results;
    return 0;
}

int run_pmp_check(const CommonArgs& args, ReportSink& sink, Phases& phases) {
    std::string raw;
    const FullConfig cfg = hitprob::load_config_file(args.config_path, &raw);
    sink.report["config_digest"] = hitprob::fnv1a_digest(raw);
    const McConfig mc = merged_mc(cfg, args);
    sink.report["seed"] = mc.seed;
    phases.mark("load_s");

    const auto problem = hitprob::compile(cfg.problem, control_breaks(args, cfg));
    const auto control = load_control_or_default(args, cfg, problem);
    const auto z = hitprob::problem_z_vectors(problem, control);
    phases.mark("compile_s");

    ordered_json results;
    const auto verdict = hitprob::check_degeneracy(z, problem.fund.xhat0, problem.goal);
    results["degeneracy"] = hitprob::to_string(verdict);

    if (verdict == hitprob::Degeneracy::Nontrivial) {
        const auto report = hitprob::pmp_residual(problem, control, mc);
        results["residual"] = report.residual;
        auto gaps = ordered_json::array();
        for (const auto& g : report.gaps)
            gaps.push_back({{"t_mid", g.t_mid},
                            {"gap", g.gap},
                            {"argmax", hitprob::vector_to_json(g.argmax_value)}});
        results["gaps"] = gaps;
        auto grads = ordered_json::array();
        for (const auto& g : report.terminal_grads) grads.push_back(hitprob::vector_to_json(g));
        results["terminal_grads"] = grads;
    } else {
        results["residual"] = nullptr;
        results["phi"] = verdict == hitprob::Degeneracy::TrivialOptimal ? 1.0 : 0.0;
    }
    phases.mark("check_s");
    sink.report["results"] = results;
    return 0;
}

int run_optimize(const CommonArgs& args, int iters_flag, double tol_flag, ReportSink& sink,
                 Phases& phases) {
    std::string raw;
    const FullConfig cfg = hitprob::load_config_file(args.config_path, &raw);
    sink.report["config_digest"] = hitprob::fnv1a_digest(raw);
    McConfig mc = merged_mc(cfg, args);
    sink.report["seed"] = mc.seed;
    phases.mark("load_s");

    const auto problem = hitprob::compile(cfg.problem, control_breaks(args, cfg));
    const auto init = load_control_or_default(args, cfg, problem);
    phases.mark("compile_s");

    const int iters = iters_flag > 0 ? iters_flag : cfg.opt.iters;
    const double tol = tol_flag >= 0.0 ? tol_flag : cfg.opt.residual_tol;
    hitprob::McSchedule schedule = cfg.opt.schedule;
    if (args.samples >= 0) {
        schedule.initial_samples = args.samples;
        if (schedule.max_samples < args.samples) schedule.max_samples = args.samples;
    }

    const auto result = hitprob::optimize(problem, init, iters, schedule, mc.seed, tol);
    phases.mark("optimize_s");

    const auto final_phi = hitprob::phi(problem, result.control,
                                        McConfig{schedule.max_samples, mc.seed, false});
    ordered_json results;
    results["status"] = hitprob::to_string(result.status);
    if (!result.note.empty()) results["note"] = result.note;
    results["accepted_steps"] = result.accepted_steps;
    results["iterations"] = result.trace.size();
    results["phi_final"] = estimate_json(final_phi);
    auto trace = ordered_json::array();
    for (const auto& it : result.trace)
        trace.push_back({{"iteration", it.iteration},
                         {"samples", it.samples},
                         {"phi_before", it.phi_before},
                         {"phi_after", it.phi_after},
                         {"std_error", it.std_error},
                         {"residual", it.residual},
                         {"alpha", it.alpha}});
    results["trace"] = trace;
    results["control"] = hitprob::control_to_json(result.control);
    sink.report["results"] = results;

    if (!args.out_path.empty()) {
        // Control file next to the report plus a plot-ready trace table.
        std::ofstream ctrl(args.out_path + ".control.json", std::ios::binary);
        ctrl << hitprob::control_to_json(result.control).dump(2) << "\n";
        std::ofstream tr(args.out_path + ".trace.dat", std::ios::binary);
        tr << "iteration samples phi_before phi_after residual alpha\n";
        for (const auto& it : result.trace)
            tr << it.iteration << " " << it.samples << " " << it.phi_before << " " << it.phi_after
               << " " << it.residual << " " << it.alpha << "\n";
    }
    return 0;
}

int run_examples(const std::string& which, const CommonArgs& args, ReportSink& sink, Phases& phases) {
    McConfig mc;
    mc.samples = args.samples >= 0 ? args.samples : 1000000;
    mc.seed = args.seed >= 0 ? static_cast<std::uint64_t>(args.seed) : 0;
    sink.report["seed"] = mc.seed;

    std::vector<int> ids;
    if (which == "all")
        ids = {1, 2, 3};
    else
        ids = {std::stoi(which)};

    auto arr = ordered_json::array();
    for (int id : ids) {
        const auto rep = hitprob::nonsmoothness_suite(id, mc);
        ordered_json r;
        r["example"] = rep.example;
        r["h_at_z"] = rep.h_at_z;
        r["h_at_z_se"] = rep.h_at_z_se;
        if (id == 1) {
            r["perturbations"] = rep.perturbations;
            r["h_perturbed"] = rep.h_perturbed;
            r["downward_jump"] = rep.downward_jump;
        } else {
            r["forward_quotient"] = rep.quotients.forward;
            r["forward_se"] = rep.quotients.forward_se;
            r["backward_quotient"] = rep.quotients.backward;
            r["backward_se"] = rep.quotients.backward_se;
            r["quotient_gap"] = rep.quotients.gap();
            r["one_sided_mismatch"] = rep.one_sided_mismatch;
            r["region"] = {rep.region_lo, rep.region_hi};
        }
        arr.push_back(std::move(r));
    }
    phases.mark("suite_s");
    sink.report["results"] = {{"examples", arr}};
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Terminal hitting-probability toolkit for linear systems with a randomly "
                 "modulated control channel"};
    app.require_subcommand(1);

    CommonArgs args;
    int k_flag = 1;
    double fd_step = 1e-2;
    int iters_flag = -1;
    double tol_flag = -1.0;
    std::string examples_which = "all";

    const auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("config", args.config_path, "problem config file")->required();
        cmd->add_option("--threads", args.threads, "OpenMP thread count (0: library default)");
        cmd->add_option("--out", args.out_path, "write the report to this file as well");
        cmd->add_option("--samples", args.samples, "Monte Carlo sample count override");
        cmd->add_option("--seed", args.seed, "sample stream seed override");
    };

    auto* c_compile = app.add_subcommand("compile", "validate a config and precompute the flow");
    add_common(c_compile, true);

    auto* c_eval = app.add_subcommand("eval", "estimate the hitting probability of a control");
    add_common(c_eval, true);
    c_eval->add_option("--control", args.control_path, "control file (default: zero control)");
    c_eval->add_flag("--antithetic", args.antithetic, "antithetic pairing (gaussian only)");

    auto* c_grad = app.add_subcommand("grad-check", "directional derivatives: score estimator vs finite differences");
    add_common(c_grad, true);
    c_grad->add_option("--control", args.control_path, "control file (default: zero control)");
    c_grad->add_option("--k", k_flag, "interval index of the moved z-vector (1-based)");
    c_grad->add_option("--fd-step", fd_step, "central-difference step");

    auto* c_pmp = app.add_subcommand("pmp-check", "maximum-condition residual and degeneracy verdict");
    add_common(c_pmp, true);
    c_pmp->add_option("--control", args.control_path, "control file (default: zero control)");

    auto* c_opt = app.add_subcommand("optimize", "conditional-gradient ascent on the hitting probability");
    add_common(c_opt, true);
    c_opt->add_option("--control", args.control_path, "initial control file (default: zero control)");
    c_opt->add_option("--iters", iters_flag, "iteration limit override");
    c_opt->add_option("--residual-tol", tol_flag, "stop once the residual drops below this");

    auto* c_ex = app.add_subcommand("examples", "nonsmooth geometry suite");
    c_ex->add_option("which", examples_which, "1, 2, 3 or all")->check(CLI::IsMember({"1", "2", "3", "all"}));
    add_common(c_ex, false);

    CLI11_PARSE(app, argc, argv);
    apply_threads(args.threads);

    auto* sub = app.get_subcommands().front();
    Phases phases;
    ReportSink sink;
    sink.out_path = args.out_path;
    sink.report["subcommand"] = sub->get_name();
    sink.report["config_digest"] = nullptr;
    sink.report["seed"] = args.seed >= 0 ? args.seed : 0;
    sink.report["results"] = ordered_json::object();
    sink.report["errors"] = ordered_json::array();

    int code = 0;
    try {
        if (sub == c_compile) code = run_compile(args, sink, phases);
        else if (sub == c_eval) code = run_eval(args, sink, phases);
        else if (sub == c_grad) code = run_grad_check(args, k_flag, fd_step, sink, phases);
        else if (sub == c_pmp) code = run_pmp_check(args, sink, phases);
        else if (sub == c_opt) code = run_optimize(args, iters_flag, tol_flag, sink, phases);
        else if (sub == c_ex) code = run_examples(examples_which, args, sink, phases);
    } catch (const hitprob::ValidationError& e) {
        sink.report["errors"].push_back({{"kind", "validation"}, {"message", e.what()}});
        code = 1;
    } catch (const hitprob::NotABasisError& e) {
        sink.report["errors"].push_back({{"kind", "numerical"},
                                         {"message", e.what()},
                                         {"subspace_dimension", e.rank()}});
        code = 2;
    } catch (const hitprob::NumericalError& e) {
        sink.report["errors"].push_back({{"kind", "numerical"}, {"message", e.what()}});
        code = 2;
    }

    sink.emit(phases);
    return code;
}
