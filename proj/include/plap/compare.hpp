#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/families.hpp"
#include "plap/op.hpp"
#include "plap/problem.hpp"

namespace plap {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ContactPoint {
    double x0 = 0.0;
    double u_val = 0.0;
    double du_u = 0.0;
    double du_v = 0.0;
};

enum class DichotomyAlternative { alt1, alt2, both, neither, not_applicable };

inline const char* to_string(DichotomyAlternative a) {
    switch (a) {
        case DichotomyAlternative::alt1: return "alt1";
        case DichotomyAlternative::alt2: return "alt2";
        case DichotomyAlternative::both: return "both";
        case DichotomyAlternative::neither: return "neither";
        case DichotomyAlternative::not_applicable: return "not-applicable";
    }
    return "?";
}

/// Full comparison verdict for an ordered pair of solutions on one grid.
struct ComparisonVerdict {
    bool wcp_holds = false;
    double min_gap = 0.0;  // min over nodes of v - u
    std::vector<Interval> P1_intervals;
    std::vector<Interval> P0_intervals;
    std::vector<ContactPoint> contact_points;
    double du_u_left = 0.0, du_v_left = 0.0;   // one-sided derivatives at x = -1
    double du_u_right = 0.0, du_v_right = 0.0;  // one-sided derivatives at x = +1
    bool hopf_ordering_holds = false;
    DichotomyAlternative dichotomy = DichotomyAlternative::not_applicable;
    NumericPolicy tolerances_used;
    double contact_tol_abs = 0.0;  // tol_contact * (1 + max sup scale)
};

namespace detail {

/// Second-order one-sided first derivative from the first/last three nodes.
inline double one_sided_derivative(const GridFunction& g, bool left) {
    const std::size_t n = g.nodes.size();
    std::size_t i0 = left ? 0 : n - 3;
    const double x0 = g.nodes[i0], x1 = g.nodes[i0 + 1], x2 = g.nodes[i0 + 2];
    const double y0 = g.values[i0], y1 = g.values[i0 + 1], y2 = g.values[i0 + 2];
    const double z = left ? x0 : x2;
    // derivative of the quadratic through the three points, evaluated at z
    const double d01 = x1 - x0, d02 = x2 - x0, d12 = x2 - x1;
    const double w0 = (2.0 * z - x1 - x2) / (d01 * d02);
    const double w1 = (2.0 * z - x0 - x2) / (-d01 * d12);
    const double w2 = (2.0 * z - x0 - x1) / (d02 * d12);
    return w0 * y0 + w1 * y1 + w2 * y2;
}

inline void require_same_grid(const SolutionProfile& u, const SolutionProfile& v) {
    if (u.u.nodes.size() != v.u.nodes.size())
        throw GridMismatch("compare: profiles on different grids");
    for (std::size_t i = 0; i < u.u.nodes.size(); ++i)
        if (std::abs(u.u.nodes[i] - v.u.nodes[i]) > 1e-14)
            throw GridMismatch("compare: profiles on different grids");
}

}  // namespace detail

/// Classify every node as contact or strict, merge runs into intervals, and
/// compute boundary derivatives. Strict runs separated by at most 3 contact
/// nodes are merged, so rounding at a tangency cannot split P1.
inline ComparisonVerdict compare(const SolutionProfile& u, const SolutionProfile& v,
                                 const NumericPolicy& policy) {
    policy.validate();
    u.validate();
    v.validate();
    detail::require_same_grid(u, v);
    const std::vector<double>& xs = u.u.nodes;
    const std::size_t n = xs.size();

    ComparisonVerdict out;
    out.tolerances_used = policy;
    const double scale = std::max(u.sup_abs(), v.sup_abs());
    out.contact_tol_abs = policy.tol_contact * (1.0 + scale);

    out.min_gap = std::numeric_limits<double>::infinity();
    std::vector<char> strict(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = v.u.values[i] - u.u.values[i];
        out.min_gap = std::min(out.min_gap, gap);
        strict[i] = std::abs(gap) > out.contact_tol_abs ? 1 : 0;
    }
    out.wcp_holds = out.min_gap >= -out.contact_tol_abs;

    // Absorb contact runs of <= 3 nodes that separate two strict runs.
    for (std::size_t i = 1; i + 1 < n;) {
        if (!strict[i] && strict[i - 1]) {
            std::size_t j = i;
            while (j < n && !strict[j]) ++j;
            if (j < n && strict[j] && j - i <= 3)
                for (std::size_t k = i; k < j; ++k) strict[k] = 1;
            i = j;
        } else {
            ++i;
        }
    }

    // Merge runs over the interior (-1,1); endpoints bound the intervals.
    auto push_run = [&](std::vector<Interval>& dst, std::size_t a, std::size_t b) {
        dst.push_back({xs[a], xs[b]});
    };
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || strict[i] != strict[run_start]) {
            if (strict[run_start])
                push_run(out.P1_intervals, run_start, i - 1);
            else
                push_run(out.P0_intervals, run_start, i - 1);
            run_start = i;
        }
    }

    // Contact points of interest: ends of contact runs that touch a strict run.
    for (std::size_t i = 0; i < n; ++i) {
        const bool at_boundary = (i == 0 || i + 1 == n);
        if (strict[i] || at_boundary) continue;
        const bool left_strict = strict[i - 1];
        const bool right_strict = strict[i + 1];
        if (left_strict || right_strict)
            out.contact_points.push_back({xs[i], u.u.values[i], u.du[i], v.du[i]});
    }

    out.du_u_left = detail::one_sided_derivative(u.u, true);
    out.du_v_left = detail::one_sided_derivative(v.u, true);
    out.du_u_right = detail::one_sided_derivative(u.u, false);
    out.du_v_right = detail::one_sided_derivative(v.u, false);
    out.hopf_ordering_holds =
        out.du_v_right < out.du_u_right - policy.tol_contact &&
        out.du_u_right <= policy.tol_contact && -policy.tol_contact <= out.du_u_left &&
        out.du_u_left < out.du_v_left - policy.tol_contact;
    return out;
}

enum class IntervalStructure {
    empty,          // P1 empty: u = v and f = g throughout
    full,           // P1 = (-1,1): strict comparison everywhere
    left_contact,   // contact up to a_{-1} > -1, strict to the right
    right_contact,  // strict up to a_1 < 1, contact beyond
    both_contacts,  // contact on both sides of one strict interval
    not_covered     // nonzero reaction: no interval structure guaranteed
};

inline const char* to_string(IntervalStructure s) {
    switch (s) {
        case IntervalStructure::empty: return "empty";
        case IntervalStructure::full: return "full";
        case IntervalStructure::left_contact: return "left-contact";
        case IntervalStructure::right_contact: return "right-contact";
        case IntervalStructure::both_contacts: return "both-contacts";
        case IntervalStructure::not_covered: return "not-covered";
    }
    return "?";
}

struct IntervalStructureReport {
    bool single_interval = false;
    IntervalStructure classification = IntervalStructure::not_covered;
    double a_left = -1.0;   // left end of P1 (when nonempty)
    double a_right = 1.0;   // right end of P1
    double du_u_at_contact = 0.0;
    double du_v_at_contact = 0.0;
    bool contact_derivatives_vanish = true;  // both stay below deriv_tol
};

/// Structure of P1 for a zero reaction: a single open interval whose interior
/// contact endpoints carry vanishing derivatives. With a nonzero reaction the
/// classification is "not-covered" (the theta family shows P1 can split).
inline IntervalStructureReport check_interval_structure(const ComparisonVerdict& verdict,
                                                        const SolutionProfile& u,
                                                        const SolutionProfile& v,
                                                        bool phi_is_zero,
                                                        double deriv_tol = 1e-4) {
    IntervalStructureReport rep;
    if (!phi_is_zero) {
        rep.classification = IntervalStructure::not_covered;
        return rep;
    }
    const auto& P1 = verdict.P1_intervals;
    if (P1.empty()) {
        rep.single_interval = true;
        rep.classification = IntervalStructure::empty;
        return rep;
    }
    if (P1.size() > 1) {
        // Components separated by more than the merge width: either a numerics
        // bug or a genuine counterexample; surface loudly.
        double sep = 0.0;
        for (std::size_t i = 1; i < P1.size(); ++i) sep = std::max(sep, P1[i].lo - P1[i - 1].hi);
        throw StructureViolation("interval structure: P1 has " + std::to_string(P1.size()) +
                                 " components (max separation " + std::to_string(sep) +
                                 ") with zero reaction");
    }
    rep.single_interval = true;
    rep.a_left = P1.front().lo;
    rep.a_right = P1.front().hi;

    const std::vector<double>& xs = u.u.nodes;
    const double h = u.u.max_spacing();
    const bool touches_left = rep.a_left <= xs.front() + 1.5 * h;
    const bool touches_right = rep.a_right >= xs.back() - 1.5 * h;

    // Smallest |du| within one spacing of the detected interface: the true
    // tangency point sits within a node of the tolerance crossing.
    auto derivative_near = [&](double x, const SolutionProfile& prof) {
        const auto it = std::lower_bound(xs.begin(), xs.end(), x - h);
        std::size_t i = static_cast<std::size_t>(it - xs.begin());
        double best = std::numeric_limits<double>::infinity();
        for (; i < xs.size() && xs[i] <= x + h; ++i) best = std::min(best, std::abs(prof.du[i]));
        return best;
    };

    if (touches_left && touches_right) {
        rep.classification = IntervalStructure::full;
    } else if (!touches_left && touches_right) {
        rep.classification = IntervalStructure::left_contact;
        rep.du_u_at_contact = derivative_near(rep.a_left, u);
        rep.du_v_at_contact = derivative_near(rep.a_left, v);
    } else if (touches_left && !touches_right) {
        rep.classification = IntervalStructure::right_contact;
        rep.du_u_at_contact = derivative_near(rep.a_right, u);
        rep.du_v_at_contact = derivative_near(rep.a_right, v);
    } else {
        rep.classification = IntervalStructure::both_contacts;
        rep.du_u_at_contact = derivative_near(rep.a_left, u);
        rep.du_v_at_contact = derivative_near(rep.a_left, v);
    }
    if (rep.classification != IntervalStructure::full)
        rep.contact_derivatives_vanish = std::abs(rep.du_u_at_contact) <= deriv_tol &&
                                         std::abs(rep.du_v_at_contact) <= deriv_tol;
    return rep;
}

struct ContactDiagnostics {
    double x0 = 0.0;
    double abs_du_u = 0.0;
    double abs_du_v = 0.0;
    bool derivatives_vanish = false;  // both below deriv_tol
    double f_at_x0 = 0.0;
    double g_at_x0 = 0.0;
    double fg_gap = 0.0;
    bool sources_agree = false;  // |f - g| at x0 below the contact tolerance
    double flux_rate_u = 0.0;    // d/dx flux(u') near x0, to compare with -f(x0)
    double flux_rate_v = 0.0;
    bool one_sided_strict_left = false;
    bool one_sided_strict_right = false;
};

/// Diagnostics at a detected contact point with a strict side: both
/// derivatives must vanish there and, when f and g are continuous at x0,
/// the sources must agree.
inline ContactDiagnostics contact_point_diagnostics(const Exponent& p, const SolutionProfile& u,
                                                    const SolutionProfile& v, const ScalarField& f,
                                                    const ScalarField& g, double x0,
                                                    const NumericPolicy& policy,
                                                    double deriv_tol = 1e-4) {
    detail::require_same_grid(u, v);
    const std::vector<double>& xs = u.u.nodes;
    const std::size_t n = xs.size();
    const auto it = std::lower_bound(xs.begin(), xs.end(), x0);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (i > 0 && (i >= n || std::abs(xs[i - 1] - x0) < std::abs(xs[i] - x0))) --i;
    if (i == 0 || i + 1 >= n)
        throw NotAContactPoint("contact diagnostics: x0 must be interior");

    const double scale = std::max(u.sup_abs(), v.sup_abs());
    const double ctol = policy.tol_contact * (1.0 + scale);
    if (std::abs(v.u.values[i] - u.u.values[i]) > ctol)
        throw NotAContactPoint("contact diagnostics: u != v at x0 = " + std::to_string(x0));

    // One-sided strictness adjacent to x0: the nearest strict node within a
    // fixed window, with strictness persisting over the next few nodes (the
    // gap decays continuously into a tangency, so nearby nodes may sit below
    // the contact tolerance).
    ContactDiagnostics rep;
    const double window = 0.45;
    auto strict_side = [&](int dir) {
        for (std::size_t k = 1;; ++k) {
            const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + dir * static_cast<std::ptrdiff_t>(k);
            if (j <= 0 || j + 1 >= static_cast<std::ptrdiff_t>(n)) return false;
            const std::size_t ju = static_cast<std::size_t>(j);
            if (std::abs(xs[ju] - xs[i]) > window) return false;
            if (v.u.values[ju] - u.u.values[ju] > ctol) {
                int run = 0;
                for (std::size_t m = 0; m < 5; ++m) {
                    const std::ptrdiff_t jj = j + dir * static_cast<std::ptrdiff_t>(m);
                    if (jj <= 0 || jj + 1 >= static_cast<std::ptrdiff_t>(n)) break;
                    const std::size_t jju = static_cast<std::size_t>(jj);
                    if (v.u.values[jju] - u.u.values[jju] > ctol) ++run;
                }
                return run >= 3;
            }
        }
    };
    rep.one_sided_strict_left = strict_side(-1);
    rep.one_sided_strict_right = strict_side(+1);
    if (!rep.one_sided_strict_left && !rep.one_sided_strict_right)
        throw HypothesisNotMet("contact diagnostics: no strict side adjacent to x0");

    rep.x0 = xs[i];
    rep.abs_du_u = std::abs(u.du[i]);
    rep.abs_du_v = std::abs(v.du[i]);
    rep.derivatives_vanish = rep.abs_du_u <= deriv_tol && rep.abs_du_v <= deriv_tol;
    rep.f_at_x0 = f(rep.x0);
    rep.g_at_x0 = g(rep.x0);
    rep.fg_gap = std::abs(rep.g_at_x0 - rep.f_at_x0);
    const double fg_scale = 1.0 + std::max(std::abs(rep.f_at_x0), std::abs(rep.g_at_x0));
    rep.sources_agree = rep.fg_gap <= policy.tol_contact * fg_scale;

    // Flux rates across x0 from the nodal flux, compared against -f and -g.
    auto flux_rate = [&](const SolutionProfile& prof) {
        const double wl = flux(p, prof.du[i - 1]);
        const double wr = flux(p, prof.du[i + 1]);
        return (wr - wl) / (xs[i + 1] - xs[i - 1]);
    };
    rep.flux_rate_u = flux_rate(u);
    rep.flux_rate_v = flux_rate(v);
    return rep;
}

enum class HopfStatus { holds, fails, hypothesis_not_met };

inline const char* to_string(HopfStatus s) {
    switch (s) {
        case HopfStatus::holds: return "holds";
        case HopfStatus::fails: return "fails";
        case HopfStatus::hypothesis_not_met: return "hypothesis-not-met";
    }
    return "?";
}

struct HopfVerdict {
    HopfStatus status = HopfStatus::fails;
    double du_u_left = 0.0, du_v_left = 0.0, du_u_right = 0.0, du_v_right = 0.0;
    double left_gap = 0.0;   // v'(-1) - u'(-1) > 0 required
    double right_gap = 0.0;  // u'(1) - v'(1) > 0 required
    bool interior_strict = false;
    std::string detail;
};

/// Boundary-ordering form of the strong comparison principle:
/// v'(1) < u'(1) <= 0 <= u'(-1) < v'(-1) and u < v at all interior nodes.
/// Requires the boundary-window hypothesis on the sources.
inline HopfVerdict check_hopf_global(const SolutionProfile& u, const SolutionProfile& v,
                                     const ScalarField& f, const ScalarField& g,
                                     const NumericPolicy& policy,
                                     const std::vector<double>& delta_list = {0.01, 0.05, 0.25}) {
    HopfVerdict rep;
    const OrderedSourceVerdict hyp = check_hypothesis_Hpm1(f, g, delta_list, policy);
    detail::require_same_grid(u, v);
    rep.du_u_left = detail::one_sided_derivative(u.u, true);
    rep.du_v_left = detail::one_sided_derivative(v.u, true);
    rep.du_u_right = detail::one_sided_derivative(u.u, false);
    rep.du_v_right = detail::one_sided_derivative(v.u, false);
    rep.left_gap = rep.du_v_left - rep.du_u_left;
    rep.right_gap = rep.du_u_right - rep.du_v_right;
    rep.interior_strict = true;
    for (std::size_t i = 1; i + 1 < u.u.nodes.size(); ++i)
        if (!(v.u.values[i] - u.u.values[i] > 0.0)) {
            rep.interior_strict = false;
            rep.detail = "u < v fails at x = " + std::to_string(u.u.nodes[i]);
            break;
        }
    if (!hyp.holds) {
        rep.status = HopfStatus::hypothesis_not_met;
        rep.detail = hyp.detail;
        return rep;
    }
    const double tol = policy.tol_contact;
    const bool ordering = rep.du_v_right < rep.du_u_right - tol && rep.du_u_right <= tol &&
                          -tol <= rep.du_u_left && rep.du_u_left < rep.du_v_left - tol;
    rep.status = (ordering && rep.interior_strict) ? HopfStatus::holds : HopfStatus::fails;
    if (rep.status == HopfStatus::fails && rep.detail.empty())
        rep.detail = "boundary derivative ordering fails";
    return rep;
}

struct DichotomyReport {
    DichotomyAlternative alternative = DichotomyAlternative::neither;
    double x0 = 0.0;
    double du_u_at_x0 = 0.0;
    double du_v_at_x0 = 0.0;
    double max_u_gap = 0.0;  // max |v-u| on the asserted contact side
    double max_fg_gap = 0.0;  // max |g-f| on the asserted contact side
    std::string detail;
};

/// Constant-drift dichotomy: with a contact point x0 and b0 <= 0, u = v and
/// f = g on (-1, x0]; with b0 >= 0, on [x0, 1); both when b0 = 0.
inline DichotomyReport check_constant_drift_dichotomy(const SolutionProfile& u,
                                                      const SolutionProfile& v,
                                                      const ScalarField& f, const ScalarField& g,
                                                      double b0, const NumericPolicy& policy) {
    detail::require_same_grid(u, v);
    const std::vector<double>& xs = u.u.nodes;
    const std::size_t n = xs.size();
    const double scale = std::max(u.sup_abs(), v.sup_abs());
    const double ctol = policy.tol_contact * (1.0 + scale);
    const double fg_scale = 1.0 + std::max(probe_sup(f, policy.grid_n), probe_sup(g, policy.grid_n));
    const double fg_tol = policy.tol_contact * fg_scale;

    DichotomyReport rep;

    auto side_check = [&](bool left_side, double& x0_out, double& ugap, double& fggap) {
        // Largest x0 with contact on all of (-1, x0] (left) or smallest x0
        // with contact on [x0, 1) (right).
        std::ptrdiff_t idx = -1;
        if (left_side) {
            std::size_t i = 1;
            if (std::abs(v.u.values[1] - u.u.values[1]) > ctol) return false;
            while (i + 2 < n && std::abs(v.u.values[i + 1] - u.u.values[i + 1]) <= ctol) ++i;
            idx = static_cast<std::ptrdiff_t>(i);
        } else {
            std::size_t i = n - 2;
            if (std::abs(v.u.values[i] - u.u.values[i]) > ctol) return false;
            while (i > 1 && std::abs(v.u.values[i - 1] - u.u.values[i - 1]) <= ctol) --i;
            idx = static_cast<std::ptrdiff_t>(i);
        }
        const std::size_t i0 = static_cast<std::size_t>(idx);
        if (i0 == 0 || i0 + 1 >= n) return false;
        x0_out = xs[i0];
        ugap = 0.0;
        fggap = 0.0;
        if (left_side) {
            for (std::size_t k = 1; k <= i0; ++k) {
                ugap = std::max(ugap, std::abs(v.u.values[k] - u.u.values[k]));
                fggap = std::max(fggap, std::abs(g(xs[k]) - f(xs[k])));
            }
        } else {
            for (std::size_t k = i0; k + 1 < n; ++k) {
                ugap = std::max(ugap, std::abs(v.u.values[k] - u.u.values[k]));
                fggap = std::max(fggap, std::abs(g(xs[k]) - f(xs[k])));
            }
        }
        return ugap <= ctol && fggap <= fg_tol;
    };

    bool any_contact = false;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (std::abs(v.u.values[i] - u.u.values[i]) <= ctol) {
            any_contact = true;
            break;
        }
    if (!any_contact)
        throw NoContactPoint("constant-drift dichotomy: no interior contact point detected");

    double x0l = 0.0, x0r = 0.0, ug = 0.0, fg = 0.0, ugr = 0.0, fgr = 0.0;
    const bool alt1 = b0 <= 0.0 && side_check(true, x0l, ug, fg);
    const bool alt2 = b0 >= 0.0 && side_check(false, x0r, ugr, fgr);

    if (alt1 && alt2)
        rep.alternative = DichotomyAlternative::both;
    else if (alt1)
        rep.alternative = DichotomyAlternative::alt1;
    else if (alt2)
        rep.alternative = DichotomyAlternative::alt2;
    else
        rep.alternative = DichotomyAlternative::neither;

    if (alt1) {
        rep.x0 = x0l;
        rep.max_u_gap = ug;
        rep.max_fg_gap = fg;
    } else if (alt2) {
        rep.x0 = x0r;
        rep.max_u_gap = ugr;
        rep.max_fg_gap = fgr;
    }
    if (alt1 || alt2) {
        // Report the smallest |du| within one spacing: the tolerance-detected
        // edge sits within a node of the true tangency.
        const double h = u.u.max_spacing();
        const auto it = std::lower_bound(xs.begin(), xs.end(), rep.x0 - h);
        double best_u = std::numeric_limits<double>::infinity();
        double best_v = best_u;
        for (std::size_t i = static_cast<std::size_t>(it - xs.begin());
             i < n && xs[i] <= rep.x0 + h; ++i) {
            if (std::abs(u.du[i]) < std::abs(best_u)) best_u = u.du[i];
            if (std::abs(v.du[i]) < std::abs(best_v)) best_v = v.du[i];
        }
        rep.du_u_at_x0 = best_u;
        rep.du_v_at_x0 = best_v;
    } else {
        rep.detail = "no one-sided contact interval anchored at the boundary";
    }
    return rep;
}

}  // namespace plap
