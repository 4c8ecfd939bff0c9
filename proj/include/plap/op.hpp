#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/field.hpp"
#include "plap/problem.hpp"

namespace plap {

/// Monotone flux s -> |s|^{p-2} s; flux(0) = 0.
inline double flux(const Exponent& p, double s) {
    if (s == 0.0) return 0.0;
    return std::pow(std::abs(s), p.value() - 2.0) * s;
}

/// Inverse of the flux, t -> |t|^{p'-2} t with p' = p/(p-1).
inline double flux_inverse(const Exponent& p, double t) {
    if (t == 0.0) return 0.0;
    const double pp = conjugate_exponent(p);
    return std::pow(std::abs(t), pp - 2.0) * t;
}

/// Regularized flux s -> (s^2 + eps^2)^{(p-2)/2} s used by the Newton solver.
inline double flux_eps(const Exponent& p, double s, double eps) {
    return std::pow(s * s + eps * eps, 0.5 * (p.value() - 2.0)) * s;
}

inline double flux_eps_prime(const Exponent& p, double s, double eps) {
    const double q = s * s + eps * eps;
    return std::pow(q, 0.5 * (p.value() - 4.0)) * ((p.value() - 1.0) * s * s + eps * eps);
}

/// Diffusion coefficient of the linearized equation,
///   D = (p-1) * integral_0^1 |(1-t) a + t b|^{p-2} dt,
/// evaluated through the flux difference quotient; collapses to the point
/// formula when the arguments are numerically equal.
inline double mean_value_coefficient(const Exponent& p, double a, double b) {
    if (std::abs(b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)))
        return (flux(p, b) - flux(p, a)) / (b - a);
    return (p.value() - 1.0) * std::pow(std::abs(a), p.value() - 2.0);
}

/// integral_0^1 d phi/du (x, (1-t) a + t b) dt by the same quotient strategy.
inline double mean_value_reaction(const ReactionField& phi, double x, double a, double b) {
    if (std::abs(b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b)))
        return (phi.value(x, b) - phi.value(x, a)) / (b - a);
    return phi.partial_s(x, a);
}

namespace detail {

/// Finite-difference weights for the first derivative at z from arbitrary
/// nodes xs (Fornberg's recursion, first-derivative column).
inline std::vector<double> fd_weights_first(double z, const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    std::vector<double> c0(n, 0.0), cw(n, 0.0);
    double c1 = 1.0;
    double c4 = xs[0] - z;
    c0[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j + 1 == i) {
                cw[i] = c1 * (c0[i - 1] - c5 * cw[i - 1]) / c2;
                c0[i] = -c1 * c5 * c0[i - 1] / c2;
            }
            cw[j] = (c4 * cw[j] - c0[j]) / c3;
            c0[j] = c4 * c0[j] / c3;
        }
        c1 = c2;
    }
    return cw;
}

}  // namespace detail

/// Pointwise residual of the differential operator applied to a profile.
struct OperatorResidual {
    GridFunction grid;  // residual values L[u](x) - f(x) at every node
    double sup_norm = 0.0;
    std::vector<std::size_t> excluded_nodes;

    bool is_excluded(std::size_t i) const {
        return std::binary_search(excluded_nodes.begin(), excluded_nodes.end(), i);
    }
};

/// residual(x) = -(d/dx) flux(u') - b(x) u' + phi(x,u) - f(x) at the nodes.
/// The flux derivative is a centered difference of the nodal flux values:
/// a five-point stencil on smooth runs, narrowing near the ends of each
/// smooth piece so that no stencil straddles a kink of the data or of the
/// profile. Endpoints and nodes within 2h of a breakpoint are excluded from
/// the reported sup norm.
inline OperatorResidual apply_operator(const ProblemInstance& inst, const SolutionProfile& prof) {
    prof.validate();
    const std::vector<double>& xs = prof.u.nodes;
    const std::size_t n = xs.size();
    if (prof.du.size() != n) throw GridMismatch("apply_operator: du size mismatch");

    std::vector<double> bps = inst.data_breakpoints();
    bps.insert(bps.end(), prof.breakpoints.begin(), prof.breakpoints.end());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              bps.end());

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = flux(inst.p, prof.du[i]);

    // Piece id per node: pieces are the open intervals between breakpoints.
    // Nodes sitting exactly on a breakpoint get id -1 and never join stencils.
    std::vector<int> piece(n, 0);
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (k < bps.size() && xs[i] > bps[k] + 1e-13) ++k;
            if (k < bps.size() && std::abs(xs[i] - bps[k]) <= 1e-13)
                piece[i] = -1;
            else
                piece[i] = static_cast<int>(k);
        }
    }

    const double h = prof.u.max_spacing();
    OperatorResidual out;
    out.grid.nodes = xs;
    out.grid.values.assign(n, 0.0);

    auto near_breakpoint = [&](double x) {
        for (double bp : bps)
            if (std::abs(x - bp) <= 2.0 * h + 1e-15) return true;
        return false;
    };

    for (std::size_t i = 0; i < n; ++i) {
        bool excluded = (i == 0) || (i + 1 == n) || piece[i] < 0 || near_breakpoint(xs[i]);

        // Collect up to five stencil nodes inside the same smooth piece.
        std::size_t lo = i, hi = i;
        if (piece[i] >= 0) {
            int want_left = 2, want_right = 2;
            while (want_left > 0 && lo > 0 && piece[lo - 1] == piece[i]) {
                --lo;
                --want_left;
            }
            while (want_right > 0 && hi + 1 < n && piece[hi + 1] == piece[i]) {
                ++hi;
                --want_right;
            }
            while (want_left > 0 && hi + 1 < n && piece[hi + 1] == piece[i]) {
                ++hi;
                --want_left;
            }
            while (want_right > 0 && lo > 0 && piece[lo - 1] == piece[i]) {
                --lo;
                --want_right;
            }
        }

        double dflux = 0.0;
        if (hi - lo + 1 >= 3) {
            std::vector<double> pts(xs.begin() + static_cast<std::ptrdiff_t>(lo),
                                    xs.begin() + static_cast<std::ptrdiff_t>(hi + 1));
            const auto wts = detail::fd_weights_first(xs[i], pts);
            for (std::size_t j = 0; j < pts.size(); ++j) dflux += wts[j] * w[lo + j];
        } else if (i > 0 && i + 1 < n) {
            dflux = (w[i + 1] - w[i - 1]) / (xs[i + 1] - xs[i - 1]);
            excluded = true;
        } else {
            excluded = true;
        }

        out.grid.values[i] = -dflux - inst.b(xs[i]) * prof.du[i] +
                             inst.phi.value(xs[i], prof.u.values[i]) - inst.f(xs[i]);
        if (excluded) out.excluded_nodes.push_back(i);
    }

    out.sup_norm = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (k < out.excluded_nodes.size() && out.excluded_nodes[k] == i) {
            ++k;
            continue;
        }
        out.sup_norm = std::max(out.sup_norm, std::abs(out.grid.values[i]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hypothesis checkers
// ---------------------------------------------------------------------------

struct MonotonicityVerdict {
    bool holds = false;
    double margin = 0.0;  // min over the probe grid of b'/2 + d phi/du
    int x_probes = 201;
    int s_probes = 41;
};

/// Sufficient condition for the weak comparison principle:
/// b'(x)/2 + d phi/du (x,s) >= 0, probed on a 201 x 41 grid.
inline MonotonicityVerdict check_hypothesis_M(const ProblemInstance& inst, double s_lo,
                                              double s_hi) {
    if (!inst.b.has_derivative())
        throw MissingDerivative("check_hypothesis_M: drift has no derivative representation");
    MonotonicityVerdict v;
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < v.x_probes; ++i) {
        const double x = -1.0 + 2.0 * i / (v.x_probes - 1);
        const double half_db = 0.5 * inst.b.derivative(x);
        for (int j = 0; j < v.s_probes; ++j) {
            const double s = s_lo + (s_hi - s_lo) * j / (v.s_probes - 1);
            margin = std::min(margin, half_db + inst.phi.partial_s(x, s));
        }
    }
    v.margin = margin;
    v.holds = margin >= 0.0;
    return v;
}

struct OrderedSourceVerdict {
    bool holds = false;
    bool ordered = false;         // 0 <= f <= g on the probe grid
    int gap_points = 0;           // probe points with g - f > tol_contact * scale
    std::vector<int> edge_gap_points;  // per delta: min of left/right window counts
    std::string detail;
};

/// Boundary-window hypothesis: 0 <= f <= g with f != g near both endpoints.
/// "Positive measure" is approximated by counting probe points at policy
/// resolution inside each window.
inline OrderedSourceVerdict check_hypothesis_Hpm1(const ScalarField& f, const ScalarField& g,
                                                  const std::vector<double>& delta_list,
                                                  const NumericPolicy& policy = {}) {
    for (double d : delta_list)
        if (!(d > 0.0 && d < 1.0)) throw BadInput("check_hypothesis_Hpm1: need 0 < delta < 1");
    OrderedSourceVerdict v;
    const int n = policy.grid_n;
    const double scale = 1.0 + std::max(probe_sup(f, n), probe_sup(g, n));
    const double slack = 1e-12 * scale;
    const double gap_tol = policy.tol_contact * scale;
    v.ordered = true;
    std::vector<double> gap_xs;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        const double fv = f(x), gv = g(x);
        if (fv < -slack || gv - fv < -slack) {
            v.ordered = false;
            v.detail = "ordering 0 <= f <= g fails near x = " + std::to_string(x);
        }
        if (gv - fv > gap_tol) {
            ++v.gap_points;
            gap_xs.push_back(x);
        }
    }
    bool windows_ok = true;
    for (double d : delta_list) {
        int left = 0, right = 0;
        for (double x : gap_xs) {
            if (x > -1.0 && x < -1.0 + d) ++left;
            if (x > 1.0 - d && x < 1.0) ++right;
        }
        v.edge_gap_points.push_back(std::min(left, right));
        if (left == 0 || right == 0) windows_ok = false;
    }
    v.holds = v.ordered && windows_ok;
    if (v.holds == false && v.detail.empty()) v.detail = "no strict gap in a boundary window";
    return v;
}

struct ConstantDriftVerdict {
    bool holds = false;
    double b0 = 0.0;
    int gap_points = 0;
    std::string detail;
};

/// Constant-drift hypothesis: 0 <= f <= g, f != g somewhere, zero reaction,
/// constant convection velocity.
inline ConstantDriftVerdict check_hypothesis_H0(const ScalarField& f, const ScalarField& g,
                                                const ScalarField& b, const ReactionField& phi,
                                                const NumericPolicy& policy = {}) {
    ConstantDriftVerdict v;
    const int n = policy.grid_n;
    const double scale = 1.0 + std::max(probe_sup(f, n), probe_sup(g, n));
    const double slack = 1e-12 * scale;
    const double gap_tol = policy.tol_contact * scale;
    bool ordered = true;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        const double fv = f(x), gv = g(x);
        if (fv < -slack || gv - fv < -slack) ordered = false;
        if (gv - fv > gap_tol) ++v.gap_points;
    }
    const bool b_const = probe_oscillation(b, n) < 1e-12;
    v.b0 = b(0.0);
    if (!ordered)
        v.detail = "ordering 0 <= f <= g fails";
    else if (v.gap_points == 0)
        v.detail = "f = g at probe resolution";
    else if (!phi.is_zero())
        v.detail = "reaction is not identically zero";
    else if (!b_const)
        v.detail = "drift is not constant";
    else
        v.holds = true;
    return v;
}

// ---------------------------------------------------------------------------
// Energy functional (variational case only)
// ---------------------------------------------------------------------------

/// (1/p) int |u'|^p + int Phi(x,u) - int f u, composite trapezoid on the
/// profile grid. Only defined for b identically zero.
inline double evaluate_energy(const ProblemInstance& inst, const SolutionProfile& prof) {
    if (probe_sup(inst.b) > 1e-14)
        throw NonVariational("evaluate_energy: drift term present, not a variational problem");
    prof.validate();
    const double p = inst.p.value();
    const std::size_t n = prof.u.nodes.size();
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = prof.u.nodes[i];
        const double u = prof.u.values[i];
        const double integrand = std::pow(std::abs(prof.du[i]), p) / p +
                                 inst.phi.primitive(x, u) - inst.f(x) * u;
        if (i > 0) acc += 0.5 * (prev + integrand) * (x - prof.u.nodes[i - 1]);
        prev = integrand;
    }
    return acc;
}

}  // namespace plap
