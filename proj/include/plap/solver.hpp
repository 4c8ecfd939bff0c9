#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/families.hpp"
#include "plap/field.hpp"
#include "plap/op.hpp"
#include "plap/problem.hpp"

namespace plap {

/// Integration constant and source antiderivative of the first-order form
///   flux(u') + b0 u = C - int_{-1}^x f.
struct ShootingState {
    double C = 0.0;
    GridFunction F;
};

struct ShootingDiagnostics {
    ShootingState state;
    double bc_residual = 0.0;
    int bracket_escalations = 0;
    int iterations = 0;
    bool non_monotone = false;  // u(1;C) not monotone across the bracket samples
};

struct NewtonConfig {
    std::vector<double> eps_schedule = {1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
    double damping_factor = 0.5;
    int max_halvings = 40;
    int max_iter = 200;

    void validate() const {
        if (eps_schedule.empty()) throw BadInput("NewtonConfig: empty eps schedule");
        for (std::size_t i = 1; i < eps_schedule.size(); ++i)
            if (!(eps_schedule[i] < eps_schedule[i - 1]))
                throw BadInput("NewtonConfig: eps schedule must be strictly decreasing");
        if (eps_schedule.back() > 1e-10)
            throw BadInput("NewtonConfig: schedule must end at or below 1e-10");
    }
};

/// Composite Simpson antiderivative anchored at F(-1) = 0, with panels that
/// never straddle a breakpoint of f (the node set is expected to contain
/// them; sampling nudges off kink nodes).
inline GridFunction antiderivative_on(const ScalarField& f, const std::vector<double>& nodes) {
    GridFunction F;
    F.nodes = nodes;
    F.values.assign(nodes.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double a = nodes[i - 1], b = nodes[i];
        const double nudge = 1e-9 * (b - a);
        acc += (b - a) / 6.0 *
               (f(a + nudge) + 4.0 * f(0.5 * (a + b)) + f(b - nudge));
        F.values[i] = acc;
    }
    return F;
}

inline GridFunction antiderivative(const ScalarField& f, const NumericPolicy& policy) {
    return antiderivative_on(f, refined_nodes(policy, f.breakpoints()));
}

namespace detail {

/// One classical fourth-order step of the coupled system
///   u' = flux_inverse(D - b0 u),  D' = -f(x),
/// where D tracks C - int f. Slopes inside the plateau deadband are clamped
/// to exactly zero so flat segments do not dither.
struct ShootMarch {
    const Exponent& p;
    double b0;
    const ScalarField& f;
    double deadband;

    double slope(double D, double u) const {
        const double A = D - b0 * u;
        if (std::abs(A) <= deadband) return 0.0;
        return flux_inverse(p, A);
    }

    void rk4(double x, double h, double& u, double& D) const {
        const double k1u = slope(D, u), k1D = -f(x);
        const double k2u = slope(D + 0.5 * h * k1D, u + 0.5 * h * k1u), k2D = -f(x + 0.5 * h);
        const double k3u = slope(D + 0.5 * h * k2D, u + 0.5 * h * k2u), k3D = k2D;
        const double k4u = slope(D + h * k3D, u + h * k3u), k4D = -f(x + h);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        D += h / 6.0 * (k1D + 2.0 * k2D + 2.0 * k3D + k4D);
    }
};

struct BandedRow {
    double sub = 0.0, diag = 0.0, sup1 = 0.0, sup2 = 0.0;
};

/// Tridiagonal solve with partial pivoting (one band of fill-in).
inline void solve_tridiag_pivoted(std::vector<BandedRow>& m, std::vector<double>& rhs) {
    const std::size_t n = m.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(m[k + 1].sub) > std::abs(m[k].diag)) {
            std::swap(m[k].diag, m[k + 1].sub);
            std::swap(m[k].sup1, m[k + 1].diag);
            std::swap(m[k].sup2, m[k + 1].sup1);
            std::swap(rhs[k], rhs[k + 1]);
        }
        if (m[k].diag == 0.0) throw NewtonDiverged("singular Jacobian in tridiagonal solve");
        const double l = m[k + 1].sub / m[k].diag;
        m[k + 1].sub = 0.0;
        m[k + 1].diag -= l * m[k].sup1;
        m[k + 1].sup1 -= l * m[k].sup2;
        rhs[k + 1] -= l * rhs[k];
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = rhs[i];
        if (i + 1 < n) v -= m[i].sup1 * rhs[i + 1];
        if (i + 2 < n) v -= m[i].sup2 * rhs[i + 2];
        if (m[i].diag == 0.0) throw NewtonDiverged("singular Jacobian in tridiagonal solve");
        rhs[i] = v / m[i].diag;
    }
}

/// Weights of the second-order three-point first derivative at the middle of
/// (x0, x1, x2).
inline void central3_weights(double x0, double x1, double x2, double& w0, double& w1, double& w2) {
    const double dm = x1 - x0, dp = x2 - x1;
    w0 = -dp / (dm * (dm + dp));
    w2 = dm / (dp * (dm + dp));
    w1 = -(w0 + w2);
}

}  // namespace detail

/// Shooting solver for constant drift and zero reaction, root-finding on the
/// integration constant C of the first-order form until the free boundary
/// value is met within tol_solve.
///
/// The march runs from x = +1 leftward. For b0 <= 0 perturbations of the
/// trajectory decay in that direction, while marching rightward they grow
/// like exp(int flux_inverse'(A)) and blow up through any degenerate point
/// with A -> 0 (flat or tangent segments), which puts a floor of order 1e-4
/// under the reachable boundary mismatch. Positive constant drift is handled
/// by solving the reflected problem and mirroring back, so the march is
/// always on the stable side; this also makes reflection equivariance exact.
inline SolutionProfile solve_shooting(const ProblemInstance& inst, const NumericPolicy& policy,
                                      std::vector<double> nodes = {},
                                      ShootingDiagnostics* diag = nullptr) {
    policy.validate();
    if (!inst.phi.is_zero())
        throw BadInput("solve_shooting: requires a zero reaction term");
    double b0 = 0.0;
    if (!inst.has_constant_drift(&b0))
        throw BadInput("solve_shooting: shooting requires constant drift");

    if (b0 > 0.0) {
        std::vector<double> mirrored;
        mirrored.reserve(nodes.size());
        for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) mirrored.push_back(-*it);
        if (!mirrored.empty()) {
            mirrored.front() = -1.0;
            mirrored.back() = 1.0;
        }
        SolutionProfile sol =
            solve_shooting(reflect_problem(inst), policy, std::move(mirrored), diag);
        return reflect_profile(sol);
    }

    if (nodes.empty()) nodes = plain_nodes(policy, inst.data_breakpoints());
    const std::size_t n = nodes.size();

    const GridFunction F = antiderivative_on(inst.f, nodes);
    const double f_total = F.values.back();
    const double f_l1 = [&] {
        double acc = 0.0;
        for (std::size_t i = 1; i < n; ++i)
            acc += 0.5 * (std::abs(inst.f(nodes[i - 1])) + std::abs(inst.f(nodes[i]))) *
                   (nodes[i] - nodes[i - 1]);
        return acc;
    }();
    const double bc_scale = std::max({std::abs(inst.bc_left), std::abs(inst.bc_right), 1.0});

    // March x = +1 -> -1 and return u(-1); optionally record the path.
    // D tracks C - int_{-1}^x f, so D(1) = C - f_total and D' = -f.
    auto shoot = [&](double C, SolutionProfile* record) {
        const double deadband = 8.0 * std::numeric_limits<double>::epsilon() *
                                (1.0 + std::abs(C) + f_l1 + std::abs(b0) * bc_scale);
        detail::ShootMarch march{inst.p, b0, inst.f, deadband};
        double u = inst.bc_right;
        double D = C - f_total;
        if (record) {
            record->u.nodes = nodes;
            record->u.values.assign(n, 0.0);
            record->du.assign(n, 0.0);
            record->u.values[n - 1] = u;
            record->du[n - 1] = march.slope(D, u);
        }
        for (std::size_t i = n - 1; i > 0; --i) {
            const double h = (nodes[i - 1] - nodes[i]) / 4.0;
            double x = nodes[i];
            for (int s = 0; s < 4; ++s) {
                march.rk4(x, h, u, D);
                x += h;
            }
            if (record) {
                record->u.values[i - 1] = u;
                record->du[i - 1] = march.slope(D, u);
            }
        }
        return u;
    };

    // Bracket the boundary-value mismatch in C.
    double c_max = f_l1 + std::abs(b0) * bc_scale + 1.0;
    double err_lo = 0.0, err_hi = 0.0;
    int escalations = 0;
    bool bracketed = false;
    for (; escalations <= 6; ++escalations) {
        err_lo = shoot(-c_max, nullptr) - inst.bc_left;
        err_hi = shoot(c_max, nullptr) - inst.bc_left;
        if (err_lo == 0.0 || err_hi == 0.0 || (err_lo < 0.0) != (err_hi < 0.0)) {
            bracketed = true;
            break;
        }
        c_max *= 10.0;
    }
    if (!bracketed)
        throw NoBracket("solve_shooting: u(-1;C) does not change sign over [-" +
                        std::to_string(c_max) + ", " + std::to_string(c_max) + "]");

    bool non_monotone = false;
    {
        double prev = err_lo;
        bool increasing = err_hi > err_lo;
        for (int k = 1; k <= 7; ++k) {
            const double c = -c_max + 2.0 * c_max * k / 8.0;
            const double e = shoot(c, nullptr) - inst.bc_left;
            if (increasing ? e < prev - 1e-12 : e > prev + 1e-12) non_monotone = true;
            prev = e;
        }
    }

    // Bisect to interval collapse (the polish beyond tol_solve costs a few
    // iterations and leaves the profile truncation-limited, not root-limited);
    // on ties prefer the side with u at or above the prescribed value.
    double lo = -c_max, hi = c_max;
    if (err_lo > err_hi) std::swap(lo, hi);  // orient so err(lo) <= 0 <= err(hi)
    double best_c = 0.0, best_err = std::numeric_limits<double>::infinity();
    int iters = 0;
    for (; iters < 220; ++iters) {
        const double mid = 0.5 * (lo + hi);
        const double err = shoot(mid, nullptr) - inst.bc_left;
        const bool upper = err >= 0.0;
        if (std::abs(err) < std::abs(best_err) || (std::abs(err) <= std::abs(best_err) && upper)) {
            best_c = mid;
            best_err = err;
        }
        if (err == 0.0) break;
        if (err < 0.0)
            lo = mid;
        else
            hi = mid;
        if (std::abs(hi - lo) <=
            4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lo) + std::abs(hi)))
            break;
    }
    if (std::abs(best_err) > policy.tol_solve)
        throw NoBracket("solve_shooting: bisection stalled, |u(-1)-bc| = " +
                        std::to_string(std::abs(best_err)));

    SolutionProfile sol;
    shoot(best_c, &sol);
    sol.method = SolveMethod::shooting;
    sol.regularization_final = 0.0;
    sol.breakpoints = inst.data_breakpoints();
    const OperatorResidual res = apply_operator(inst, sol);
    sol.residual_sup = res.sup_norm;

    if (diag) {
        diag->state.C = best_c;
        diag->state.F = F;
        diag->bc_residual = best_err;
        diag->bracket_escalations = escalations;
        diag->iterations = iters;
        diag->non_monotone = non_monotone;
    }
    return sol;
}

/// Damped Newton on the central-difference system with the flux regularized
/// as flux_eps, continuing eps down the schedule with warm starts.
inline SolutionProfile solve_newton_fd(const ProblemInstance& inst, const NumericPolicy& policy,
                                       const NewtonConfig& config = {},
                                       std::vector<double> nodes = {}) {
    policy.validate();
    config.validate();
    if (nodes.empty()) nodes = plain_nodes(policy, inst.data_breakpoints());
    const std::size_t n = nodes.size();
    if (n < 3) throw BadInput("solve_newton_fd: need at least 3 nodes");

    const double f_sup = probe_sup(inst.f, policy.grid_n);
    const double target = policy.tol_solve * (1.0 + f_sup);

    std::vector<double> fvals(n), bvals(n);
    for (std::size_t i = 0; i < n; ++i) {
        fvals[i] = inst.f(nodes[i]);
        bvals[i] = inst.b(nodes[i]);
    }

    // Warm start from the linearized problem -u'' - b u' + phi_s(x,0) u = f.
    std::vector<double> u(n, 0.0);
    {
        std::vector<detail::BandedRow> lin(n);
        std::vector<double> rhs(n, 0.0);
        lin[0].diag = 1.0;
        rhs[0] = inst.bc_left;
        lin[n - 1].diag = 1.0;
        rhs[n - 1] = inst.bc_right;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double dm = nodes[i] - nodes[i - 1];
            const double dp = nodes[i + 1] - nodes[i];
            const double hbar = 0.5 * (dm + dp);
            double w0, w1, w2;
            detail::central3_weights(nodes[i - 1], nodes[i], nodes[i + 1], w0, w1, w2);
            lin[i].sub = -1.0 / (dm * hbar) - bvals[i] * w0;
            lin[i].diag = (1.0 / dp + 1.0 / dm) / hbar - bvals[i] * w1 +
                          std::max(0.0, inst.phi.partial_s(nodes[i], 0.0));
            lin[i].sup1 = -1.0 / (dp * hbar) - bvals[i] * w2;
            rhs[i] = fvals[i];
        }
        detail::solve_tridiag_pivoted(lin, rhs);
        u = rhs;
        u.front() = inst.bc_left;
        u.back() = inst.bc_right;
    }

    auto residual = [&](const std::vector<double>& uu, double eps, std::vector<double>& out) {
        out[0] = uu[0] - inst.bc_left;
        out[n - 1] = uu[n - 1] - inst.bc_right;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double dm = nodes[i] - nodes[i - 1];
            const double dp = nodes[i + 1] - nodes[i];
            const double hbar = 0.5 * (dm + dp);
            const double sm = (uu[i] - uu[i - 1]) / dm;
            const double sp = (uu[i + 1] - uu[i]) / dp;
            double w0, w1, w2;
            detail::central3_weights(nodes[i - 1], nodes[i], nodes[i + 1], w0, w1, w2);
            const double du_c = w0 * uu[i - 1] + w1 * uu[i] + w2 * uu[i + 1];
            out[i] = -(flux_eps(inst.p, sp, eps) - flux_eps(inst.p, sm, eps)) / hbar -
                     bvals[i] * du_c + inst.phi.value(nodes[i], uu[i]) - fvals[i];
        }
    };

    auto sup_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    auto l2_norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    std::vector<double> res(n), res_trial(n), delta(n), trial(n);
    std::vector<detail::BandedRow> jac(n);
    double last_eps = config.eps_schedule.back();

    for (double eps : config.eps_schedule) {
        last_eps = eps;
        residual(u, eps, res);
        double rnorm = sup_norm(res);
        int it = 0;
        for (; it < config.max_iter && rnorm > target; ++it) {
            for (std::size_t i = 0; i < n; ++i) jac[i] = detail::BandedRow{};
            jac[0].diag = 1.0;
            jac[n - 1].diag = 1.0;
            for (std::size_t i = 1; i + 1 < n; ++i) {
                const double dm = nodes[i] - nodes[i - 1];
                const double dp = nodes[i + 1] - nodes[i];
                const double hbar = 0.5 * (dm + dp);
                const double sm = (u[i] - u[i - 1]) / dm;
                const double sp = (u[i + 1] - u[i]) / dp;
                const double wm = flux_eps_prime(inst.p, sm, eps);
                const double wp = flux_eps_prime(inst.p, sp, eps);
                double w0, w1, w2;
                detail::central3_weights(nodes[i - 1], nodes[i], nodes[i + 1], w0, w1, w2);
                jac[i].sub = -wm / (dm * hbar) - bvals[i] * w0;
                jac[i].diag = (wp / dp + wm / dm) / hbar - bvals[i] * w1 +
                              inst.phi.partial_s(nodes[i], u[i]);
                jac[i].sup1 = -wp / (dp * hbar) - bvals[i] * w2;
            }
            for (std::size_t i = 0; i < n; ++i) delta[i] = -res[i];
            detail::solve_tridiag_pivoted(jac, delta);

            const double r2 = l2_norm(res);
            double step = 1.0;
            bool accepted = false;
            for (int half = 0; half <= config.max_halvings; ++half) {
                for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * delta[i];
                residual(trial, eps, res_trial);
                const double tnorm = sup_norm(res_trial);
                if (l2_norm(res_trial) < r2 * (1.0 - 1e-4 * step) || tnorm <= target) {
                    u.swap(trial);
                    res.swap(res_trial);
                    rnorm = tnorm;
                    accepted = true;
                    break;
                }
                step *= config.damping_factor;
            }
            if (!accepted)
                throw NewtonDiverged("solve_newton_fd: damping exhausted at eps = " +
                                     std::to_string(eps) + ", residual = " + std::to_string(rnorm));
        }
        if (rnorm > target && it >= config.max_iter)
            throw NewtonDiverged("solve_newton_fd: no convergence at eps = " + std::to_string(eps) +
                                 ", residual = " + std::to_string(rnorm));
    }

    // Nodal derivative from the averaged interface fluxes of the converged
    // discrete system: the conservation form keeps the nodal flux smooth in i,
    // so the operator residual of the returned profile stays clean.
    SolutionProfile sol;
    sol.u.nodes = nodes;
    sol.u.values = u;
    sol.du.assign(n, 0.0);
    std::vector<double> iface(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        iface[i] = flux_eps(inst.p, (u[i + 1] - u[i]) / (nodes[i + 1] - nodes[i]), last_eps);
    for (std::size_t i = 1; i + 1 < n; ++i)
        sol.du[i] = flux_inverse(inst.p, 0.5 * (iface[i - 1] + iface[i]));
    sol.du[0] = flux_inverse(inst.p, 1.5 * iface[0] - 0.5 * iface[1]);
    sol.du[n - 1] = flux_inverse(inst.p, 1.5 * iface[n - 2] - 0.5 * iface[n - 3]);
    sol.method = SolveMethod::newton_fd;
    sol.regularization_final = last_eps;
    sol.breakpoints = inst.data_breakpoints();
    sol.residual_sup = apply_operator(inst, sol).sup_norm;
    return sol;
}

/// Shooting when the instance is constant-drift with zero reaction, Newton
/// otherwise.
inline SolutionProfile solve_auto(const ProblemInstance& inst, const NumericPolicy& policy,
                                  std::vector<double> nodes = {}) {
    if (inst.phi.is_zero() && inst.has_constant_drift())
        return solve_shooting(inst, policy, std::move(nodes));
    return solve_newton_fd(inst, policy, {}, std::move(nodes));
}

}  // namespace plap
