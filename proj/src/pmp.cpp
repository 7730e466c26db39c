#include "hitprob/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hitprob/errors.hpp"

namespace hitprob {

namespace {

// One backward RK4 step of d theta/dt = -A(t)^T theta from t1 to t0 = t1 + h
// (h < 0), with A sampled at the stage times.
void adjoint_step(Eigen::VectorXd& th, double h, const Eigen::MatrixXd& A1,
                  const Eigen::MatrixXd& Am, const Eigen::MatrixXd& A0) {
    const Eigen::VectorXd k1 = -A1.transpose() * th;
    const Eigen::VectorXd k2 = -Am.transpose() * (th + (0.5 * h) * k1);
    const Eigen::VectorXd k3 = -Am.transpose() * (th + (0.5 * h) * k2);
    const Eigen::VectorXd k4 = -A0.transpose() * (th + h * k3);
    th += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_control_refines_switches(const LinearSystem& system, const Control& control) {
    for (double t : system.switch_times) {
        const auto& g = control.grid();
        if (!std::binary_search(g.begin(), g.end(), t))
            throw ValidationError("control.grid: must contain every switch time (missing " +
                                  std::to_string(t) + ")");
    }
}

}  // namespace

AdjointTrajectory adjoint_solve(const LinearSystem& system, const TimeGrid& grid,
                                const std::vector<Eigen::VectorXd>& terminal_grads) {
    const std::size_t N = grid.num_noise_intervals();
    if (terminal_grads.size() != N)
        throw ValidationError("terminal_grads: need one gradient per switch interval");
    for (const auto& g : terminal_grads)
        if (g.size() != system.n) throw ValidationError("terminal_grads: dimension differs from n");

    const auto& nodes = grid.nodes();
    AdjointTrajectory adj;
    adj.terminal_grads = terminal_grads;
    adj.theta.assign(N, std::vector<Eigen::VectorXd>(nodes.size()));

    Eigen::MatrixXd A0, Am, A1;
    for (std::size_t k = 0; k < N; ++k) {
        Eigen::VectorXd th = terminal_grads[k];
        adj.theta[k][nodes.size() - 1] = th;
        for (std::size_t s = nodes.size() - 1; s > 0; --s) {
            const double h = nodes[s - 1] - nodes[s];
            system.A.eval_into(nodes[s], A1);
            system.A.eval_into(nodes[s] + 0.5 * h, Am);
            system.A.eval_into(nodes[s - 1], A0);
            adjoint_step(th, h, A1, Am, A0);
            adj.theta[k][s - 1] = th;
        }
    }

    adj.assembled.resize(nodes.size());
    std::size_t interval = 0;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
        while (interval + 1 < N && nodes[s] >= grid.switch_time(interval + 1)) ++interval;
        adj.assembled[s] = adj.theta[interval][s];
    }
    return adj;
}

Eigen::VectorXd hamiltonian_argmax(const Eigen::VectorXd& theta, const Eigen::MatrixXd& Bt,
                                   const ControlSet& vset) {
    const Eigen::VectorXd w = Bt.transpose() * theta;
    switch (vset.kind()) {
        case ControlSet::Kind::Box: {
            Eigen::VectorXd v(w.size());
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                if (w[i] > 0.0)
                    v[i] = vset.hi()[i];
                else if (w[i] < 0.0)
                    v[i] = vset.lo()[i];
                else
                    v[i] = 0.5 * (vset.lo()[i] + vset.hi()[i]);
            }
            return v;
        }
        case ControlSet::Kind::Ball: {
            const double nrm = w.norm();
            if (nrm == 0.0) return Eigen::VectorXd::Zero(w.size());
            return (vset.radius() / nrm) * w;
        }
        case ControlSet::Kind::Finite: {
            std::size_t best = 0;
            double best_val = w.dot(vset.points()[0]);
            for (std::size_t i = 1; i < vset.points().size(); ++i) {
                const double val = w.dot(vset.points()[i]);
                if (val > best_val) {
                    best_val = val;
                    best = i;
                }
            }
            return vset.points()[best];
        }
    }
    return Eigen::VectorXd::Zero(w.size());
}

namespace {

// Interpolates theta_k between the grid nodes bracketing t.
Eigen::VectorXd theta_at(const AdjointTrajectory& adj, const TimeGrid& grid, std::size_t k,
                         double t) {
    const auto& nodes = grid.nodes();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
    if (hi == 0) return adj.theta[k].front();
    if (hi >= nodes.size()) return adj.theta[k].back();
    const std::size_t lo = hi - 1;
    const double w = (t - nodes[lo]) / (nodes[hi] - nodes[lo]);
    return (1.0 - w) * adj.theta[k][lo] + w * adj.theta[k][hi];
}

struct PmpCore {
    PmpReport report;
    AdjointTrajectory adjoint;
};

PmpCore pmp_core(const ProblemInstance& problem, const Control& control, const ZVectors& z,
                 const McConfig& mc, mc::Exec exec) {
    const std::size_t N = static_cast<std::size_t>(problem.N());

    std::vector<Eigen::VectorXd> grads(N), grad_se(N);
    for (std::size_t k = 0; k < N; ++k) {
        try {
            auto res = gradient_hk(static_cast<int>(k), z, {}, problem.fund.xhat0, problem.noise,
                                   problem.goal, mc, exec);
            grads[k] = std::move(res.grad);
            grad_se[k] = std::move(res.std_error);
        } catch (const NumericalError& e) {
            throw NumericalError("problem is not regular for this control: gradient of h_" +
                                 std::to_string(k + 1) + " failed (" + e.what() + ")");
        }
    }

    PmpCore core;
    core.adjoint = adjoint_solve(problem.system, problem.grid, grads);
    core.report.terminal_grads = grads;
    core.report.terminal_grad_se = grad_se;

    const auto& cgrid = control.grid();
    std::vector<Eigen::VectorXd> argmax_values;
    argmax_values.reserve(control.num_intervals());
    Eigen::MatrixXd Bmid;
    double residual = 0.0;
    for (std::size_t l = 0; l < control.num_intervals(); ++l) {
        const double t_mid = 0.5 * (cgrid[l] + cgrid[l + 1]);
        const std::size_t k = problem.grid.noise_interval_at(t_mid);
        const Eigen::VectorXd th = theta_at(core.adjoint, problem.grid, k, t_mid);
        problem.system.B.eval_into(t_mid, Bmid);
        const Eigen::VectorXd vstar = hamiltonian_argmax(th, Bmid, problem.vset);
        const double gap = th.dot(Bmid * vstar) - th.dot(Bmid * control.values()[l]);
        core.report.gaps.push_back({t_mid, gap, vstar});
        argmax_values.push_back(vstar);
        residual += gap * (cgrid[l + 1] - cgrid[l]);
    }
    core.report.residual = residual;
    core.report.argmax_control = Control(cgrid, std::move(argmax_values), problem.vset);
    return core;
}

}  // namespace

PmpReport pmp_residual(const ProblemInstance& problem, const Control& control, const McConfig& mc,
                       mc::Exec exec) {
    check_control_refines_switches(problem.system, control);
    const ZVectors z = problem_z_vectors(problem, control);
    return pmp_core(problem, control, z, mc, exec).report;
}

std::string to_string(Degeneracy d) {
    switch (d) {
        case Degeneracy::TrivialOptimal: return "trivial_optimal";
        case Degeneracy::TrivialSuboptimalCertificate: return "trivial_suboptimal_certificate";
        case Degeneracy::Nontrivial: return "nontrivial";
    }
    return "?";
}

Degeneracy check_degeneracy(const ZVectors& z, const Eigen::VectorXd& xhat0, const GoalSet& q) {
    if (z.max_norm() <= 1e-12)
        return q.contains(xhat0) ? Degeneracy::TrivialOptimal
                                 : Degeneracy::TrivialSuboptimalCertificate;
    return Degeneracy::Nontrivial;
}

std::int64_t McSchedule::at(int iteration) const {
    double s = static_cast<double>(initial_samples) * std::pow(growth, iteration);
    s = std::min(s, static_cast<double>(max_samples));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(s));
}

std::string to_string(OptimizeStatus s) {
    switch (s) {
        case OptimizeStatus::Converged: return "converged";
        case OptimizeStatus::NoImprovement: return "no_improvement";
        case OptimizeStatus::IterationLimit: return "iteration_limit";
        case OptimizeStatus::RegularityFailure: return "regularity_failure";
    }
    return "?";
}

namespace {

std::vector<Eigen::VectorXd> extreme_points(const ControlSet& vset) {
    std::vector<Eigen::VectorXd> pts;
    const int m = vset.dimension();
    switch (vset.kind()) {
        case ControlSet::Kind::Box: {
            pts.push_back(vset.lo());
            pts.push_back(vset.hi());
            for (int i = 0; i < m; ++i) {
                Eigen::VectorXd mid = 0.5 * (vset.lo() + vset.hi());
                mid[i] = vset.hi()[i];
                pts.push_back(mid);
                mid[i] = vset.lo()[i];
                pts.push_back(mid);
            }
            break;
        }
        case ControlSet::Kind::Ball:
            for (int i = 0; i < m; ++i) {
                pts.push_back(vset.radius() * Eigen::VectorXd::Unit(m, i));
                pts.push_back(-vset.radius() * Eigen::VectorXd::Unit(m, i));
            }
            break;
        case ControlSet::Kind::Finite:
            pts = vset.points();
            break;
    }
    return pts;
}

}  // namespace

OptimizeResult optimize(const ProblemInstance& problem, const Control& init, int iters,
                        const McSchedule& schedule, std::uint64_t seed, double residual_tol,
                        mc::Exec exec) {
    if (iters < 1) throw ValidationError("iters: must be >= 1");
    check_control_refines_switches(problem.system, init);

    OptimizeResult result{init, {}, OptimizeStatus::IterationLimit, 0, ""};
    Control u = init;

    for (int iter = 0; iter < iters; ++iter) {
        McConfig mc{schedule.at(iter), seed, false};
        OptimizeIteration rec;
        rec.iteration = iter;
        rec.samples = mc.samples;
        rec.residual = -1.0;

        const ZVectors z = problem_z_vectors(problem, u);
        const Degeneracy deg = check_degeneracy(z, problem.fund.xhat0, problem.goal);

        if (deg == Degeneracy::TrivialOptimal) {
            rec.phi_before = rec.phi_after = 1.0;
            result.trace.push_back(rec);
            result.status = OptimizeStatus::Converged;
            result.note = "trivial z-set with xhat0 in Q: the functional equals 1";
            result.control = u;
            return result;
        }

        if (deg == Degeneracy::TrivialSuboptimalCertificate) {
            // No gradient exists at a trivial z-set; probe extreme constant
            // controls for a strict improvement before giving up.
            const auto phi_u = phi(problem, u, mc, exec);
            rec.phi_before = phi_u.value;
            double best_val = phi_u.value;
            std::optional<Control> best;
            for (const auto& v : extreme_points(problem.vset)) {
                Control cand(u.grid(), std::vector<Eigen::VectorXd>(u.num_intervals(), v),
                             problem.vset);
                const auto est = phi(problem, cand, mc, exec);
                if (est.value > best_val) {
                    best_val = est.value;
                    best = std::move(cand);
                }
            }
            if (!best) {
                rec.phi_after = phi_u.value;
                result.trace.push_back(rec);
                result.status = OptimizeStatus::NoImprovement;
                result.note = "trivial z-set and no probing control improved the estimate";
                result.control = u;
                return result;
            }
            u = *best;
            rec.phi_after = best_val;
            rec.alpha = 1.0;
            result.trace.push_back(rec);
            ++result.accepted_steps;
            continue;
        }

        PmpCore core;
        try {
            core = pmp_core(problem, u, z, mc, exec);
        } catch (const NumericalError& e) {
            result.status = OptimizeStatus::RegularityFailure;
            result.note = e.what();
            result.control = u;
            return result;
        }
        rec.residual = core.report.residual;

        const auto phi_u = phi(problem, u, mc, exec);
        rec.phi_before = phi_u.value;
        rec.std_error = phi_u.std_error;

        if (core.report.residual <= residual_tol) {
            rec.phi_after = phi_u.value;
            result.trace.push_back(rec);
            result.status = OptimizeStatus::Converged;
            result.control = u;
            return result;
        }

        // Halving line search toward the Hamiltonian argmax control.
        const auto& vstar = core.report.argmax_control->values();
        bool accepted = false;
        for (int p = 0; p <= 8 && !accepted; ++p) {
            const double alpha = std::ldexp(1.0, -p);
            std::vector<Eigen::VectorXd> vals(u.num_intervals());
            for (std::size_t l = 0; l < u.num_intervals(); ++l)
                vals[l] = u.values()[l] + alpha * (vstar[l] - u.values()[l]);
            Control cand(u.grid(), std::move(vals), problem.vset);
            const auto est = phi(problem, cand, mc, exec);
            if (est.value > phi_u.value) {
                u = std::move(cand);
                rec.phi_after = est.value;
                rec.alpha = alpha;
                accepted = true;
            }
        }

        if (!accepted) {
            rec.phi_after = phi_u.value;
            result.trace.push_back(rec);
            result.status = OptimizeStatus::NoImprovement;
            result.control = u;
            return result;
        }

        result.trace.push_back(rec);
        ++result.accepted_steps;
    }

    result.control = u;
    return result;
}

}  // namespace hitprob
