#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracles {

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
    const double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (nrm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Eigen::MatrixXd a = scale * m;
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(m.rows(), m.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = (a * term) / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double bivariate_normal_disc_probability(double cx, double cy, double radius) {
    // Simpson in rho and alpha; the integrand is smooth and periodic.
    const int nr = 400;   // even
    const int na = 720;   // even
    const double dr = radius / nr;
    const double da = 2.0 * M_PI / na;
    double total = 0.0;
    for (int i = 0; i <= nr; ++i) {
        const double rho = i * dr;
        const double wr = (i == 0 || i == nr) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        double ring = 0.0;
        for (int j = 0; j <= na; ++j) {
            const double alpha = j * da;
            const double wa = (j == 0 || j == na) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            const double x = cx + rho * std::cos(alpha);
            const double y = cy + rho * std::sin(alpha);
            ring += wa * std::exp(-0.5 * (x * x + y * y));
        }
        total += wr * rho * ring * (da / 3.0);
    }
    return total * (dr / 3.0) / (2.0 * M_PI);
}

DirectSimulator::DirectSimulator(const hitprob::LinearSystem& system,
                                 const hitprob::Control& control, const hitprob::TimeGrid& grid)
    : x0_(system.x0) {
    const auto& nodes = grid.nodes();
    steps_.reserve(nodes.size() - 1);
    Eigen::MatrixXd B0, Bm, B1, F0, Fm, F1;
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        Step st;
        st.h = nodes[s + 1] - nodes[s];
        const double tm = nodes[s] + 0.5 * st.h;
        system.A.eval_into(nodes[s], st.A0);
        system.A.eval_into(tm, st.Am);
        system.A.eval_into(nodes[s + 1], st.A1);
        system.B.eval_into(nodes[s], B0);
        system.B.eval_into(tm, Bm);
        system.B.eval_into(nodes[s + 1], B1);
        system.f.eval_into(nodes[s], F0);
        system.f.eval_into(tm, Fm);
        system.f.eval_into(nodes[s + 1], F1);
        const Eigen::VectorXd& u = control.at(nodes[s]);
        st.bu0 = B0 * u;
        st.bum = Bm * u;
        st.bu1 = B1 * u;
        st.f0 = F0.col(0);
        st.fm = Fm.col(0);
        st.f1 = F1.col(0);
        st.noise_interval = grid.noise_interval_at(nodes[s]);
        steps_.push_back(std::move(st));
    }
}

Eigen::VectorXd DirectSimulator::terminal_state(const Eigen::VectorXd& xi) const {
    Eigen::VectorXd x = x0_;
    for (const auto& st : steps_) {
        const double s = xi[static_cast<Eigen::Index>(st.noise_interval)];
        const Eigen::VectorXd k1 = st.A0 * x + s * st.bu0 + st.f0;
        const Eigen::VectorXd k2 = st.Am * (x + (0.5 * st.h) * k1) + s * st.bum + st.fm;
        const Eigen::VectorXd k3 = st.Am * (x + (0.5 * st.h) * k2) + s * st.bum + st.fm;
        const Eigen::VectorXd k4 = st.A1 * (x + st.h * k3) + s * st.bu1 + st.f1;
        x += (st.h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

std::uint64_t TestRng::next_u64() {
    // xorshift64*
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
}

double TestRng::uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double TestRng::normal() {
    // Box-Muller on two fresh uniforms.
    const double u1 = std::max(uniform(0.0, 1.0), 1e-300);
    const double u2 = uniform(0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

RandomInstance make_random_instance(std::uint64_t seed, int steps_per_interval) {
    TestRng rng(seed);
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);  // 2..4
    const int m = 1 + static_cast<int>(rng.next_u64() % 2);  // 1..2
    const int N = 2 + static_cast<int>(rng.next_u64() % 2);  // 2..3

    hitprob::LinearSystem sys;
    sys.n = n;
    sys.m = m;
    Eigen::MatrixXd A(n, n), B(n, m), f(n, 1);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) A(r, c) = rng.uniform(-1.0, 1.0);
        for (int c = 0; c < m; ++c) B(r, c) = rng.uniform(-1.0, 1.0);
        f(r, 0) = rng.uniform(-0.5, 0.5);
    }
    sys.A = hitprob::MatrixFunction::constant(A);
    sys.B = hitprob::MatrixFunction::constant(B);
    sys.f = hitprob::MatrixFunction::constant(f);
    sys.x0 = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return rng.uniform(-1.0, 1.0); });

    sys.switch_times.push_back(0.0);
    double t = 0.0;
    for (int i = 1; i < N; ++i) {
        t += (1.0 - t) * rng.uniform(0.3, 0.6);
        sys.switch_times.push_back(t);
    }
    sys.switch_times.push_back(1.0);

    Eigen::VectorXd mu(N);
    for (int i = 0; i < N; ++i) mu[i] = rng.uniform(-0.5, 0.5);
    Eigen::MatrixXd G(N, N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) G(r, c) = rng.uniform(-0.5, 0.5);
    const Eigen::MatrixXd cov =
        G * G.transpose() + 0.4 * Eigen::MatrixXd::Identity(N, N);

    // Ball around a point the dynamics can reach, wide enough to keep the
    // probability away from 0 and 1.
    hitprob::ProblemConfig cfg{std::move(sys),
                               hitprob::NoiseModel::gaussian(mu, cov),
                               hitprob::GoalSet::ball(
                                   Eigen::VectorXd::NullaryExpr(
                                       n, [&](Eigen::Index) { return rng.uniform(-0.8, 0.8); }),
                                   rng.uniform(1.0, 2.5)),
                               hitprob::ControlSet::box(-Eigen::VectorXd::Ones(m),
                                                        Eigen::VectorXd::Ones(m)),
                               steps_per_interval,
                               {}};

    // Piecewise-constant control on a refinement of the switch grid.
    std::vector<double> cg = cfg.system.switch_times;
    const std::size_t base = cg.size() - 1;
    for (std::size_t i = 0; i < base; ++i)
        cg.push_back(0.5 * (cfg.system.switch_times[i] + cfg.system.switch_times[i + 1]));
    std::sort(cg.begin(), cg.end());
    std::vector<Eigen::VectorXd> vals;
    for (std::size_t i = 0; i + 1 < cg.size(); ++i)
        vals.push_back(Eigen::VectorXd::NullaryExpr(m, [&](Eigen::Index) { return rng.uniform(-1.0, 1.0); }));
    hitprob::Control control(cg, std::move(vals), cfg.vset);
    cfg.control_grid = control.grid();

    return {std::move(cfg), std::move(control)};
}

}  // namespace oracles
