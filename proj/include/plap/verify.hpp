#pragma once

// End-to-end verification drivers for the two closed-form families: they tie
// fields, profiles, the operator residual, and the comparison verdicts into
// one report per family.

#include <cmath>
#include <string>
#include <vector>

#include "plap/compare.hpp"
#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/families.hpp"
#include "plap/op.hpp"
#include "plap/problem.hpp"

namespace plap {

struct ThetaCounterexampleReport {
    bool degenerate = false;  // theta1 == theta2: identical family members
    bool source_gap_ok = false;
    double source_gap_min = 0.0;  // min over probe x != 0 of f_theta2 - f_theta1
    int source_probes = 0;
    bool wcp_ok = false;
    double solution_gap_min = 0.0;  // min over x != 0,+-1 of u_theta2 - u_theta1
    double gap_at_zero = 0.0;
    bool scp_fails_at_zero = false;
    bool pass = false;
};

/// The ordered-family counterexample: sources strictly ordered away from 0,
/// solutions ordered with equality exactly at x = 0 where the strong
/// comparison fails.
inline ThetaCounterexampleReport verify_theta_counterexample(const ThetaFamilyParams& prm,
                                                             const NumericPolicy& policy) {
    ThetaCounterexampleReport rep;
    if (prm.theta1 == prm.theta2) {
        rep.degenerate = true;
        return rep;
    }
    prm.validate();
    policy.validate();

    const ScalarField b = theta_drift_field(prm);
    const ReactionField phi = ReactionField::linear(prm.lambda);

    rep.source_gap_min = std::numeric_limits<double>::infinity();
    rep.solution_gap_min = std::numeric_limits<double>::infinity();
    const int n = policy.grid_n;
    for (int i = 1; i + 1 < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        if (x == 0.0) continue;
        ++rep.source_probes;
        const double gap = f_theta(prm.p, prm.theta2, b, phi, x) -
                           f_theta(prm.p, prm.theta1, b, phi, x);
        rep.source_gap_min = std::min(rep.source_gap_min, gap);
        rep.solution_gap_min =
            std::min(rep.solution_gap_min, u_theta(prm.theta2, x) - u_theta(prm.theta1, x));
    }
    rep.source_gap_ok = rep.source_gap_min > 0.0;

    const SolutionProfile u1 = theta_profile(prm, prm.theta1, policy);
    const SolutionProfile u2 = theta_profile(prm, prm.theta2, policy);
    const ComparisonVerdict verdict = compare(u1, u2, policy);
    rep.wcp_ok = verdict.wcp_holds && rep.solution_gap_min >= 0.0;

    rep.gap_at_zero = u_theta(prm.theta2, 0.0) - u_theta(prm.theta1, 0.0);
    rep.scp_fails_at_zero = std::abs(rep.gap_at_zero) <= 1e-15 && rep.solution_gap_min > 0.0;
    rep.pass = rep.source_gap_ok && rep.wcp_ok && rep.scp_fails_at_zero;
    return rep;
}

struct PlateauCounterexampleReport {
    double x_s = 0.0;
    double b0 = 0.0;
    double residual_u = 0.0;
    double residual_v = 0.0;
    double residual_tol = 0.0;
    bool residuals_ok = false;
    bool sources_ordered = false;  // f <= g with f != g
    bool contact_set_ok = false;   // P0 covers (-1,-1/2], P1 = (-1/2,1) within a node
    double p1_left_end = 0.0;
    double contact_du_u = 0.0;
    double contact_du_v = 0.0;
    bool contact_derivatives_ok = false;
    bool alt1_ok = false;
    IntervalStructure structure = IntervalStructure::not_covered;
    bool structure_ok = false;
    bool pass = false;
};

/// Residual tolerance for the plateau family: the base tolerance at the
/// reference exponent p = 4, relaxed tenfold elsewhere (the fractional
/// exponents amplify rounding away from the reference case).
inline double plateau_residual_tol(const Exponent& p, const NumericPolicy& policy) {
    return std::abs(p.value() - 4.0) < 1e-12 ? policy.tol_residual : 10.0 * policy.tol_residual;
}

/// Full verification of the plateau counterexample at a given exponent:
/// operator residuals of the closed forms, source ordering, contact-set
/// geometry, vanishing contact derivatives, the constant-drift dichotomy,
/// and the interval-structure classification.
inline PlateauCounterexampleReport verify_plateau_counterexample(const Exponent& p,
                                                                 const NumericPolicy& policy) {
    policy.validate();
    PlateauCounterexampleReport rep;
    rep.x_s = plateau_xs(p);
    rep.b0 = plateau_b0(p);
    rep.residual_tol = plateau_residual_tol(p, policy);

    const SolutionProfile u = plateau_u_profile(p, policy);
    const SolutionProfile v = plateau_v_profile(p, policy);
    const ProblemInstance inst_f = plateau_instance(p, false);
    const ProblemInstance inst_g = plateau_instance(p, true);

    rep.residual_u = apply_operator(inst_f, u).sup_norm;
    rep.residual_v = apply_operator(inst_g, v).sup_norm;
    rep.residuals_ok = rep.residual_u <= rep.residual_tol && rep.residual_v <= rep.residual_tol;

    const OrderedSourceVerdict h0ish =
        check_hypothesis_Hpm1(inst_f.f, inst_g.f, {0.25}, policy);
    rep.sources_ordered = h0ish.ordered && h0ish.gap_points > 0;

    // Contact-set geometry. The tolerance-detected edge of P1 drifts right of
    // -1/2 when the tangency is very flat (small p-2), so the asserted facts
    // are: exact contact on (-1,-1/2], raw strict ordering on (-1/2,1), and
    // no strict node left of -1/2.
    const ComparisonVerdict verdict = compare(u, v, policy);
    const double h = u.u.max_spacing();
    rep.contact_set_ok = !verdict.P1_intervals.empty() && verdict.P1_intervals.size() == 1;
    if (!verdict.P1_intervals.empty()) {
        const Interval p1 = verdict.P1_intervals.front();
        rep.p1_left_end = p1.lo;
        rep.contact_set_ok = rep.contact_set_ok && p1.lo >= -0.5 - h - 1e-12 &&
                             p1.hi >= 1.0 - 1.5 * h;
    }
    for (std::size_t i = 1; i + 1 < u.u.nodes.size(); ++i) {
        const double x = u.u.nodes[i];
        const double gap = v.u.values[i] - u.u.values[i];
        if (x <= -0.5 && std::abs(gap) != 0.0) rep.contact_set_ok = false;
        if (gap < 0.0) rep.contact_set_ok = false;  // ordering never inverts
    }

    const ContactDiagnostics diag =
        contact_point_diagnostics(p, u, v, inst_f.f, inst_g.f, -0.5, policy);
    rep.contact_du_u = diag.abs_du_u;
    rep.contact_du_v = diag.abs_du_v;
    rep.contact_derivatives_ok = diag.derivatives_vanish;

    const DichotomyReport dich =
        check_constant_drift_dichotomy(u, v, inst_f.f, inst_g.f, rep.b0, policy);
    rep.alt1_ok = dich.alternative == DichotomyAlternative::alt1 ||
                  dich.alternative == DichotomyAlternative::both;

    const IntervalStructureReport structure = check_interval_structure(verdict, u, v, true);
    rep.structure = structure.classification;
    rep.structure_ok = structure.classification == IntervalStructure::left_contact &&
                       structure.contact_derivatives_vanish;

    rep.pass = rep.residuals_ok && rep.sources_ordered && rep.contact_set_ok &&
               rep.contact_derivatives_ok && rep.alt1_ok && rep.structure_ok;
    return rep;
}

}  // namespace plap
