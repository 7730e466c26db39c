#include "hitprob/linsys.hpp"

#include <cmath>
#include <string>

#include "hitprob/errors.hpp"

namespace hitprob {

void LinearSystem::validate() const {
    if (n < 1 || m < 1) throw ValidationError("system: n and m must be positive");
    if (A.rows() != n || A.cols() != n) throw ValidationError("system.A: expected " + std::to_string(n) + "x" + std::to_string(n));
    if (B.rows() != n || B.cols() != m) throw ValidationError("system.B: expected " + std::to_string(n) + "x" + std::to_string(m));
    if (f.rows() != n || f.cols() != 1) throw ValidationError("system.f: expected " + std::to_string(n) + "x1");
    if (x0.size() != n) throw ValidationError("system.x0: expected length " + std::to_string(n));
    if (switch_times.size() < 2 || switch_times.front() != 0.0 || switch_times.back() != 1.0)
        throw ValidationError("system.switch_times: must run from 0 to 1");
    for (std::size_t i = 1; i < switch_times.size(); ++i)
        if (!(switch_times[i] > switch_times[i - 1]))
            throw ValidationError("system.switch_times: not strictly increasing");
}

Eigen::MatrixXd ZVectors::as_matrix() const {
    Eigen::MatrixXd Z(dim(), static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) Z.col(static_cast<Eigen::Index>(i)) = z[i];
    return Z;
}

double ZVectors::max_norm() const {
    double m = 0.0;
    for (const auto& v : z) m = std::max(m, v.norm());
    return m;
}

namespace {

void check_grid_has_switch_times(const LinearSystem& system, const TimeGrid& grid) {
    if (grid.num_noise_intervals() != static_cast<std::size_t>(system.num_intervals()))
        throw ValidationError("grid: switch-interval count differs from system.switch_times");
    for (std::size_t i = 0; i < system.switch_times.size(); ++i)
        if (grid.switch_time(i) != system.switch_times[i])
            throw ValidationError("grid: missing switch time t_" + std::to_string(i));
}

void check_control_on_grid(const Control& control, const TimeGrid& grid) {
    const auto& nodes = grid.nodes();
    for (double t : control.grid()) {
        const auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
        if (it == nodes.end() || *it != t)
            throw ValidationError("control.grid: breakpoint " + std::to_string(t) +
                                  " is not a grid node (rebuild the grid with this control)");
    }
}

// One classical RK4 step for dX/dt = A(t) X + G(t), where A and rhs samples
// are supplied at (t, t+h/2, t+h).
template <class State, class Rhs>
void rk4_step(State& x, double h, const Eigen::MatrixXd& A0, const Eigen::MatrixXd& Am,
              const Eigen::MatrixXd& A1, const Rhs& g0, const Rhs& gm, const Rhs& g1) {
    const State k1 = A0 * x + g0;
    const State k2 = Am * (x + (0.5 * h) * k1) + gm;
    const State k3 = Am * (x + (0.5 * h) * k2) + gm;
    const State k4 = A1 * (x + h * k3) + g1;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

FundamentalSolution solve_fundamental(const LinearSystem& system, const TimeGrid& grid) {
    system.validate();
    check_grid_has_switch_times(system, grid);

    const auto& nodes = grid.nodes();
    const int n = system.n;

    FundamentalSolution fund;
    fund.phi.reserve(nodes.size());
    fund.phi.push_back(Eigen::MatrixXd::Identity(n, n));

    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd A0, Am, A1;
    const Eigen::MatrixXd zero_rhs = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const double h = nodes[s + 1] - nodes[s];
        system.A.eval_into(nodes[s], A0);
        system.A.eval_into(nodes[s] + 0.5 * h, Am);
        system.A.eval_into(nodes[s + 1], A1);
        rk4_step(phi, h, A0, Am, A1, zero_rhs, zero_rhs, zero_rhs);
        if (!phi.allFinite()) throw NumericalError("fundamental matrix blew up during integration");
        fund.phi.push_back(phi);
    }
    fund.phi_at_1 = fund.phi.back();

    // Psi_i = Phi(1) Phi(t_i)^{-1} via Phi(t_i)^T X^T = Phi(1)^T.
    const std::size_t N = grid.num_noise_intervals();
    fund.psi.reserve(N);
    for (std::size_t i = 1; i <= N; ++i) {
        const Eigen::MatrixXd& phi_ti = fund.phi[grid.switch_indices()[i]];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(phi_ti.transpose());
        if (!lu.isInvertible())
            throw NumericalError("Phi(t_" + std::to_string(i) + ") is singular (integrator blow-up)");
        fund.psi.push_back(lu.solve(fund.phi_at_1.transpose()).transpose());
    }

    // xhat0 = Phi(1) (x0 + int_0^1 Phi^{-1}(s) f(s) ds), composite Simpson
    // per segment on the shared node set.
    Eigen::VectorXd drift = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd fs;
    const auto& seg = grid.segment_bounds();
    for (std::size_t si = 0; si + 1 < seg.size(); ++si) {
        const std::size_t a = seg[si];
        const std::size_t b = seg[si + 1];
        const double h = (nodes[b] - nodes[a]) / static_cast<double>(b - a);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        for (std::size_t k = a; k <= b; ++k) {
            system.f.eval_into(nodes[k], fs);
            const Eigen::VectorXd v = fund.phi[k].fullPivLu().solve(fs.col(0));
            const double w = (k == a || k == b) ? 1.0 : (((k - a) % 2 == 1) ? 4.0 : 2.0);
            acc += w * v;
        }
        drift += (h / 3.0) * acc;
    }
    fund.xhat0 = fund.phi_at_1 * (system.x0 + drift);
    return fund;
}

std::vector<Eigen::VectorXd> propagate_y(const LinearSystem& system, const Control& control,
                                         const TimeGrid& grid) {
    system.validate();
    check_grid_has_switch_times(system, grid);
    check_control_on_grid(control, grid);
    if (control.dimension() != system.m) throw ValidationError("control: dimension differs from system.m");

    const auto& nodes = grid.nodes();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(system.n);
    std::vector<Eigen::VectorXd> out;
    out.reserve(grid.num_noise_intervals());

    Eigen::MatrixXd A0, Am, A1, B0, Bm, B1;
    std::size_t next_switch = 1;
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const double h = nodes[s + 1] - nodes[s];
        const Eigen::VectorXd& u = control.at(nodes[s]);
        system.A.eval_into(nodes[s], A0);
        system.A.eval_into(nodes[s] + 0.5 * h, Am);
        system.A.eval_into(nodes[s + 1], A1);
        system.B.eval_into(nodes[s], B0);
        system.B.eval_into(nodes[s] + 0.5 * h, Bm);
        system.B.eval_into(nodes[s + 1], B1);
        const Eigen::VectorXd g0 = B0 * u;
        const Eigen::VectorXd gm = Bm * u;
        const Eigen::VectorXd g1 = B1 * u;
        rk4_step(y, h, A0, Am, A1, g0, gm, g1);
        if (s + 1 == grid.switch_indices()[next_switch]) {
            out.push_back(y);
            ++next_switch;
        }
    }
    return out;
}

ZVectors compute_z_vectors(const FundamentalSolution& fund, const LinearSystem& system,
                           const Control& control, const TimeGrid& grid) {
    system.validate();
    check_grid_has_switch_times(system, grid);
    check_control_on_grid(control, grid);
    if (fund.phi.size() != grid.nodes().size())
        throw ValidationError("fundamental solution built on a different grid");
    if (control.dimension() != system.m) throw ValidationError("control: dimension differs from system.m");

    const auto& nodes = grid.nodes();
    const int n = system.n;
    const std::size_t N = grid.num_noise_intervals();

    ZVectors zv;
    zv.z.assign(N, Eigen::VectorXd::Zero(n));

    Eigen::MatrixXd Bs;
    const auto& seg = grid.segment_bounds();
    std::size_t interval = 0;
    for (std::size_t si = 0; si + 1 < seg.size(); ++si) {
        const std::size_t a = seg[si];
        const std::size_t b = seg[si + 1];
        while (nodes[a] >= grid.switch_time(interval + 1)) ++interval;
        // Control is constant on the whole segment; boundary nodes use the
        // segment's own value.
        const Eigen::VectorXd& u = control.at(nodes[a]);
        const double h = (nodes[b] - nodes[a]) / static_cast<double>(b - a);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        for (std::size_t k = a; k <= b; ++k) {
            system.B.eval_into(nodes[k], Bs);
            const Eigen::VectorXd v = fund.phi[k].fullPivLu().solve(Bs * u);
            const double w = (k == a || k == b) ? 1.0 : (((k - a) % 2 == 1) ? 4.0 : 2.0);
            acc += w * v;
        }
        zv.z[interval] += (h / 3.0) * acc;
    }
    for (auto& zi : zv.z) zi = fund.phi_at_1 * zi;
    return zv;
}

Eigen::VectorXd terminal_state(const FundamentalSolution& fund, const ZVectors& z,
                               const Eigen::VectorXd& xi) {
    if (static_cast<std::size_t>(xi.size()) != z.size())
        throw ValidationError("xi: length differs from the number of z-vectors");
    Eigen::VectorXd x = fund.xhat0;
    for (std::size_t i = 0; i < z.size(); ++i) x += xi[static_cast<Eigen::Index>(i)] * z.z[i];
    return x;
}

}  // namespace hitprob
