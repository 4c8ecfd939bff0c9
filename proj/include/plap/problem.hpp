#pragma once

#include <cmath>
#include <vector>

#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/field.hpp"

namespace plap {

/// Full description of the two-point boundary value problem
///   -(|u'|^{p-2} u')' - b(x) u' + phi(x,u) = f(x) on (-1,1),
///   u(-1) = bc_left, u(1) = bc_right.
struct ProblemInstance {
    Exponent p{4.0};
    ScalarField b = ScalarField::constant(0.0);
    ReactionField phi = ReactionField::zero();
    ScalarField f = ScalarField::constant(0.0);
    double bc_left = 0.0;
    double bc_right = 0.0;

    void validate(int probe_n = 201) const {
        const double sup_f = probe_sup(f, probe_n);
        if (!std::isfinite(sup_f)) throw BadInput("ProblemInstance: f unbounded on probe grid");
        if (!std::isfinite(bc_left) || !std::isfinite(bc_right))
            throw BadInput("ProblemInstance: boundary values must be finite");
    }

    /// Kinks of the data, used for breakpoint-aware grids and residual exclusion.
    std::vector<double> data_breakpoints() const {
        std::vector<double> bps = f.breakpoints();
        const auto& bb = b.breakpoints();
        bps.insert(bps.end(), bb.begin(), bb.end());
        std::sort(bps.begin(), bps.end());
        bps.erase(std::unique(bps.begin(), bps.end(),
                              [](double a, double c) { return std::abs(a - c) < 1e-12; }),
                  bps.end());
        return bps;
    }

    bool has_constant_drift(double* b0_out = nullptr, int probe_n = 201) const {
        const bool constant = probe_is_constant(b, probe_n);
        if (constant && b0_out) *b0_out = b(0.0);
        return constant;
    }
};

/// x -> -x transported to the data: if u solves inst, then x -> u(-x) solves
/// the reflected instance. Applying it twice gives back the original problem.
inline ProblemInstance reflect_problem(const ProblemInstance& inst) {
    ProblemInstance out;
    out.p = inst.p;
    out.b = inst.b.reflected_odd();
    out.f = inst.f.reflected_even();
    out.phi = inst.phi.reflected();
    out.bc_left = inst.bc_right;
    out.bc_right = inst.bc_left;
    return out;
}

/// Mirror a profile through x -> -x onto the mirrored grid.
inline SolutionProfile reflect_profile(const SolutionProfile& in) {
    SolutionProfile out;
    const std::size_t n = in.u.nodes.size();
    out.u.nodes.resize(n);
    out.u.values.resize(n);
    out.du.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        out.u.nodes[i] = -in.u.nodes[j];
        out.u.values[i] = in.u.values[j];
        out.du[i] = -in.du[j];
    }
    out.u.nodes.front() = -1.0;
    out.u.nodes.back() = 1.0;
    out.method = in.method;
    out.residual_sup = in.residual_sup;
    out.regularization_final = in.regularization_final;
    for (double bp : in.breakpoints) out.breakpoints.push_back(-bp);
    std::sort(out.breakpoints.begin(), out.breakpoints.end());
    return out;
}

}  // namespace plap
