#pragma once

// Exact evaluators for the two closed-form construction families used as
// ground truth throughout the test suite:
//
//  * the theta family u_theta = 1 - |x|^theta with a power-law drift and a
//    linear reaction, ordered in theta but touching at x = 0;
//  * the plateau family: a pair (u,v) with constant negative drift and zero
//    reaction that coincide on [-1,-1/2], where v has a flat segment
//    [-1/2, x_s] and u does not.

#include <cmath>
#include <string>
#include <vector>

#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/field.hpp"
#include "plap/problem.hpp"

namespace plap {

// ---------------------------------------------------------------------------
// Theta family
// ---------------------------------------------------------------------------

struct ThetaFamilyParams {
    Exponent p{4.0};
    double theta1 = 3.0;
    double theta2 = 4.0;
    double lambda = 3456.0;

    /// Smallest admissible reaction coefficient for these exponents.
    static double lambda_min(double p, double theta2) {
        return 2.0 * (p - 1.0) * (p - 1.0) * (theta2 - 1.0) * std::pow(theta2, p - 1.0);
    }

    void validate() const {
        const double pv = p.value();
        if (!(pv / (pv - 2.0) < theta1))
            throw ParamsViolateFamilyBounds("theta family: need p/(p-2) < theta1");
        if (!(theta1 < theta2))
            throw ParamsViolateFamilyBounds("theta family: need theta1 < theta2");
        if (!(lambda >= lambda_min(pv, theta2) * (1.0 - 1e-12)))
            throw ParamsViolateFamilyBounds(
                "theta family: lambda below 2(p-1)^2(theta2-1)theta2^{p-1}");
    }

    /// Default test instance: the minimal lambda allowed for (p=4, 3, 4).
    static ThetaFamilyParams reference() {
        ThetaFamilyParams out;
        out.lambda = lambda_min(4.0, 4.0);  // 3456
        return out;
    }
};

inline double u_theta(double theta, double x) {
    if (!(theta > 1.0)) throw DomainError("u_theta: theta must be > 1");
    if (std::abs(x) > 1.0 + 1e-12) throw DomainError("u_theta: x outside [-1,1]");
    return 1.0 - std::pow(std::abs(x), theta);
}

inline double du_theta(double theta, double x) {
    if (!(theta > 1.0)) throw DomainError("du_theta: theta must be > 1");
    if (x == 0.0) return 0.0;
    return -theta * std::pow(std::abs(x), theta - 1.0) * sgn(x);
}

/// Drift b(x) = (p-1)^2 (theta1-1) theta1^{p-2} |x|^{(p-2)(theta2-1)-1} sgn(x),
/// with its exact derivative; odd, vanishing at 0 together with b'.
inline ScalarField theta_drift_field(const ThetaFamilyParams& prm) {
    const double p = prm.p.value();
    const double coeff = (p - 1.0) * (p - 1.0) * (prm.theta1 - 1.0) * std::pow(prm.theta1, p - 2.0);
    const double expo = (p - 2.0) * (prm.theta2 - 1.0) - 1.0;
    auto fn = [coeff, expo](double x) {
        if (x == 0.0) return 0.0;
        return coeff * std::pow(std::abs(x), expo) * sgn(x);
    };
    auto dfn = [coeff, expo](double x) {
        if (x == 0.0) return 0.0;
        return coeff * expo * std::pow(std::abs(x), expo - 1.0);
    };
    return ScalarField::native(fn, dfn, {0.0}, "theta-drift");
}

inline double theta_drift(const ThetaFamilyParams& prm, double x) {
    const double p = prm.p.value();
    if (std::abs(x) > 1.0 + 1e-12) throw DomainError("theta_drift: x outside [-1,1]");
    if (x == 0.0) return 0.0;
    const double coeff = (p - 1.0) * (p - 1.0) * (prm.theta1 - 1.0) * std::pow(prm.theta1, p - 2.0);
    return coeff * std::pow(std::abs(x), (p - 2.0) * (prm.theta2 - 1.0) - 1.0) * sgn(x);
}

/// Source that makes u_theta an exact solution:
///   f = (p-1) theta^{p-1}(theta-1)|x|^{(theta-1)(p-1)-1}
///     + theta b(x) sgn(x) |x|^{theta-1} + phi(x, 1-|x|^theta).
/// At x = 0 the continuous limit is returned when the leading exponent is
/// positive; otherwise the value is singular.
inline double f_theta(const Exponent& p, double theta, const ScalarField& b,
                      const ReactionField& phi, double x) {
    const double pv = p.value();
    if (std::abs(x) > 1.0 + 1e-12) throw DomainError("f_theta: x outside [-1,1]");
    const double lead_expo = (theta - 1.0) * (pv - 1.0) - 1.0;
    if (x == 0.0) {
        if (lead_expo > 0.0) return phi.value(0.0, 1.0);
        throw SingularAtZero("f_theta: leading exponent <= 0 at x = 0");
    }
    const double ax = std::abs(x);
    const double diffusion =
        (pv - 1.0) * std::pow(theta, pv - 1.0) * (theta - 1.0) * std::pow(ax, lead_expo);
    const double drift = theta * b(x) * sgn(x) * std::pow(ax, theta - 1.0);
    return diffusion + drift + phi.value(x, u_theta(theta, x));
}

struct ThetaSlopeTerms {
    double brace1 = 0.0;  // multiplies |x|^{theta-1}
    double brace2 = 0.0;  // multiplies |x|^{theta-1} log|x|
    double value = 0.0;
};

/// d f_theta / d theta for a linear reaction with coefficient lambda,
/// in the grouped two-brace form whose signs drive the ordering argument.
inline ThetaSlopeTerms dftheta_dtheta_terms(const Exponent& p, double theta, const ScalarField& b,
                                            double lambda, double x) {
    const double pv = p.value();
    if (x == 0.0 || std::abs(std::abs(x) - 1.0) < 1e-15)
        throw DomainError("dftheta_dtheta: x must satisfy 0 < |x| < 1");
    if (std::abs(x) > 1.0) throw DomainError("dftheta_dtheta: x outside [-1,1]");
    const double ax = std::abs(x);
    const double inner = std::pow(ax, (theta - 1.0) * (pv - 2.0) - 1.0);
    const double bsgn = b(x) * sgn(x);
    ThetaSlopeTerms out;
    out.brace1 = (pv - 1.0) *
                     (pv * std::pow(theta, pv - 1.0) - (pv - 1.0) * std::pow(theta, pv - 2.0)) *
                     inner +
                 bsgn;
    out.brace2 = (pv - 1.0) * (pv - 1.0) * std::pow(theta, pv - 1.0) * (theta - 1.0) * inner +
                 theta * bsgn - lambda * ax;
    const double w = std::pow(ax, theta - 1.0);
    out.value = w * out.brace1 + w * std::log(ax) * out.brace2;
    return out;
}

inline double dftheta_dtheta(const Exponent& p, double theta, const ScalarField& b, double lambda,
                             double x) {
    return dftheta_dtheta_terms(p, theta, b, lambda, x).value;
}

/// Two-sided envelope on b(x)/x that keeps d f_theta/d theta positive for the
/// given (theta, lambda); lower bound strict, upper bound non-strict.
struct DriftEnvelope {
    double lower = 0.0;
    double upper = 0.0;
};

inline DriftEnvelope theta_drift_envelope(const Exponent& p, double theta, double lambda,
                                          double x) {
    const double pv = p.value();
    const double ax = std::abs(x);
    if (!(ax > 0.0 && ax < 1.0)) throw DomainError("theta_drift_envelope: need 0 < |x| < 1");
    const double inner = std::pow(ax, (theta - 1.0) * (pv - 2.0) - 2.0);
    DriftEnvelope env;
    env.lower = -(pv - 1.0) *
                (pv * std::pow(theta, pv - 1.0) - (pv - 1.0) * std::pow(theta, pv - 2.0)) * inner;
    env.upper = -(pv - 1.0) * (pv - 1.0) * std::pow(theta, pv - 2.0) * (theta - 1.0) * inner +
                lambda / theta;
    return env;
}

struct AdmissibilityReport {
    bool admissible = false;
    double worst_derivative = 0.0;  // min of b' over the probe grid
    double worst_ratio_low = 0.0;   // min of b(x)/x
    double worst_ratio_high = 0.0;  // max of b(x)/x - envelope
    std::string detail;
};

/// Generalized drift admissibility: b(0) = b'(0) = 0, b' >= 0, and
/// 0 <= b(x)/x <= (p-1)^2 (theta1-1) theta1^{p-2} |x|^{(p-2)(theta2-1)-2}.
inline AdmissibilityReport drift_is_admissible(const ScalarField& b,
                                               const ThetaFamilyParams& prm, int probe_n = 401) {
    if (!b.has_derivative())
        throw MissingDerivative("drift_is_admissible: drift must declare a derivative");
    const double p = prm.p.value();
    const double coeff = (p - 1.0) * (p - 1.0) * (prm.theta1 - 1.0) * std::pow(prm.theta1, p - 2.0);
    const double expo = (p - 2.0) * (prm.theta2 - 1.0) - 2.0;
    AdmissibilityReport rep;
    rep.worst_derivative = std::numeric_limits<double>::infinity();
    rep.worst_ratio_low = std::numeric_limits<double>::infinity();
    rep.worst_ratio_high = -std::numeric_limits<double>::infinity();
    const double tol = 1e-10 * (1.0 + probe_sup(b));

    if (std::abs(b(0.0)) > tol) {
        rep.detail = "b(0) != 0";
        return rep;
    }
    if (std::abs(b.derivative(0.0)) > tol) {
        rep.detail = "b'(0) != 0";
        return rep;
    }
    for (int i = 0; i < probe_n; ++i) {
        const double x = -1.0 + 2.0 * i / (probe_n - 1);
        rep.worst_derivative = std::min(rep.worst_derivative, b.derivative(x));
        if (x == 0.0) continue;
        const double ratio = b(x) / x;
        rep.worst_ratio_low = std::min(rep.worst_ratio_low, ratio);
        rep.worst_ratio_high =
            std::max(rep.worst_ratio_high, ratio - coeff * std::pow(std::abs(x), expo));
    }
    if (rep.worst_derivative < -tol)
        rep.detail = "b' negative on probe grid";
    else if (rep.worst_ratio_low < -tol)
        rep.detail = "b(x)/x negative on probe grid";
    else if (rep.worst_ratio_high > tol)
        rep.detail = "b(x)/x exceeds the envelope";
    else
        rep.admissible = true;
    return rep;
}

// ---------------------------------------------------------------------------
// Plateau family (constant drift, zero reaction)
// ---------------------------------------------------------------------------

struct PlateauParams {
    Exponent p{4.0};

    double x_s() const {
        const double pp = conjugate_exponent(p);
        return 1.0 - 3.0 / std::pow(2.0, pp);
    }

    /// Constant convection velocity; negative for every p > 2.
    double b0() const {
        const double pv = p.value();
        return -std::pow(1.5, 1.0 - pv) * std::pow((pv - 2.0) / (pv - 1.0), 1.0 - pv);
    }

    void validate() const {
        const double xs = x_s();
        if (!(xs > -0.5 && xs < 1.0)) throw ParamsViolateFamilyBounds("plateau family: bad x_s");
    }
};

inline double plateau_b0(const Exponent& p) { return PlateauParams{p}.b0(); }
inline double plateau_xs(const Exponent& p) { return PlateauParams{p}.x_s(); }

namespace detail {

struct PlateauCoeffs {
    double p, m, xs, b0;
    double au;  // 3^{(1-p)/(p-2)}
    double kv;  // 2^{p/(p-2)} 3^{(1-p)/(p-2)}
    double cf;  // 2^{2p-1}(p-1), parabola-piece diffusion coefficient
    double cg;  // coefficient of (x-x_s)^{1/(p-2)} in g

    explicit PlateauCoeffs(const Exponent& pe) {
        p = pe.value();
        m = (p - 1.0) / (p - 2.0);
        PlateauParams prm{pe};
        xs = prm.x_s();
        b0 = prm.b0();
        au = std::pow(3.0, (1.0 - p) / (p - 2.0));
        kv = std::pow(2.0, p / (p - 2.0)) * au;
        cf = std::pow(2.0, 2.0 * p - 1.0) * (p - 1.0);
        const double q = (p - 1.0) * (p - 1.0);
        cg = std::pow(2.0, (q + 1.0) / (p - 2.0)) * std::pow(3.0, -q / (p - 2.0)) *
             std::pow((p - 1.0) / (p - 2.0), p);
    }
};

inline void check_domain(double x, const char* who) {
    if (std::abs(x) > 1.0 + 1e-12) throw DomainError(std::string(who) + ": x outside [-1,1]");
}

}  // namespace detail

inline double plateau_u(const Exponent& p, double x) {
    detail::check_domain(x, "plateau_u");
    const detail::PlateauCoeffs c(p);
    if (x < -0.5) return -4.0 * x * (x + 1.0);
    return 1.0 - c.au * std::pow(2.0 * x + 1.0, c.m);
}

inline double plateau_du(const Exponent& p, double x) {
    detail::check_domain(x, "plateau_du");
    const detail::PlateauCoeffs c(p);
    if (x < -0.5) return -4.0 * (2.0 * x + 1.0);
    return -2.0 * c.au * c.m * std::pow(2.0 * x + 1.0, c.m - 1.0);
}

inline double plateau_v(const Exponent& p, double x) {
    detail::check_domain(x, "plateau_v");
    const detail::PlateauCoeffs c(p);
    if (x < -0.5) return -4.0 * x * (x + 1.0);
    if (x <= c.xs) return 1.0;
    return 1.0 - c.kv * std::pow(x - c.xs, c.m);
}

inline double plateau_dv(const Exponent& p, double x) {
    detail::check_domain(x, "plateau_dv");
    const detail::PlateauCoeffs c(p);
    if (x < -0.5) return -4.0 * (2.0 * x + 1.0);
    if (x <= c.xs) return 0.0;
    return -c.kv * c.m * std::pow(x - c.xs, c.m - 1.0);
}

/// Sources (f,g) for the plateau pair. Both vanish on [-1/2, x_s]; they agree
/// on (-1,-1/2) and g alone is positive on (x_s, 1). The drift part of the
/// shared branch carries the coefficient 4 b0 so that u and v reproduce f and
/// g exactly under the differential operator.
inline std::pair<double, double> plateau_sources(const Exponent& p, double x) {
    detail::check_domain(x, "plateau_sources");
    const detail::PlateauCoeffs c(p);
    double f = 0.0, g = 0.0;
    if (x < -0.5) {
        const double t = -(2.0 * x + 1.0);
        const double shared = c.cf * std::pow(t, c.p - 2.0) + 4.0 * c.b0 * (2.0 * x + 1.0);
        f = shared;
        g = shared;
    } else if (x > c.xs) {
        g = c.cg * std::pow(x - c.xs, 1.0 / (c.p - 2.0));
    }
    return {f, g};
}

inline double plateau_f(const Exponent& p, double x) { return plateau_sources(p, x).first; }
inline double plateau_g(const Exponent& p, double x) { return plateau_sources(p, x).second; }

// ---------------------------------------------------------------------------
// Fields, grids, instances, profiles
// ---------------------------------------------------------------------------

inline ScalarField theta_source_field(const ThetaFamilyParams& prm, double theta) {
    const Exponent p = prm.p;
    const ScalarField b = theta_drift_field(prm);
    const ReactionField phi = ReactionField::linear(prm.lambda);
    return ScalarField::native([p, theta, b, phi](double x) { return f_theta(p, theta, b, phi, x); },
                               {}, {0.0}, "theta-source");
}

inline ProblemInstance theta_instance(const ThetaFamilyParams& prm, double theta) {
    ProblemInstance inst;
    inst.p = prm.p;
    inst.b = theta_drift_field(prm);
    inst.phi = ReactionField::linear(prm.lambda);
    inst.f = theta_source_field(prm, theta);
    inst.bc_left = 0.0;
    inst.bc_right = 0.0;
    return inst;
}

inline ScalarField plateau_f_field(const Exponent& p) {
    return ScalarField::native([p](double x) { return plateau_f(p, x); }, {},
                               {-0.5, plateau_xs(p)}, "plateau-f");
}

inline ScalarField plateau_g_field(const Exponent& p) {
    return ScalarField::native([p](double x) { return plateau_g(p, x); }, {},
                               {-0.5, plateau_xs(p)}, "plateau-g");
}

/// Instance solved by plateau_u (source f); use_g swaps in the source solved
/// by plateau_v.
inline ProblemInstance plateau_instance(const Exponent& p, bool use_g = false) {
    ProblemInstance inst;
    inst.p = p;
    inst.b = ScalarField::constant(plateau_b0(p));
    inst.phi = ReactionField::zero();
    inst.f = use_g ? plateau_g_field(p) : plateau_f_field(p);
    inst.bc_left = 0.0;
    inst.bc_right = 0.0;
    return inst;
}

/// Grid for the plateau pair: uniform resolution plus breakpoints and kink
/// ladders at -1/2 and x_s.
inline std::vector<double> plateau_grid(const Exponent& p, const NumericPolicy& policy) {
    return refined_nodes(policy, {-0.5, plateau_xs(p)});
}

inline std::vector<double> theta_grid(const NumericPolicy& policy) {
    return refined_nodes(policy, {0.0});
}

inline SolutionProfile profile_from_closed_form(const std::vector<double>& nodes,
                                                const std::function<double(double)>& u,
                                                const std::function<double(double)>& du,
                                                std::vector<double> breakpoints) {
    SolutionProfile prof;
    prof.u.nodes = nodes;
    prof.u.values.resize(nodes.size());
    prof.du.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        prof.u.values[i] = u(nodes[i]);
        prof.du[i] = du(nodes[i]);
    }
    prof.method = SolveMethod::closed_form;
    prof.breakpoints = std::move(breakpoints);
    return prof;
}

inline SolutionProfile plateau_u_profile(const Exponent& p, const NumericPolicy& policy) {
    const auto nodes = plateau_grid(p, policy);
    return profile_from_closed_form(
        nodes, [p](double x) { return plateau_u(p, x); }, [p](double x) { return plateau_du(p, x); },
        {-0.5, plateau_xs(p)});
}

inline SolutionProfile plateau_v_profile(const Exponent& p, const NumericPolicy& policy) {
    const auto nodes = plateau_grid(p, policy);
    return profile_from_closed_form(
        nodes, [p](double x) { return plateau_v(p, x); }, [p](double x) { return plateau_dv(p, x); },
        {-0.5, plateau_xs(p)});
}

inline SolutionProfile theta_profile(const ThetaFamilyParams&, double theta,
                                     const NumericPolicy& policy) {
    const auto nodes = theta_grid(policy);
    return profile_from_closed_form(
        nodes, [theta](double x) { return u_theta(theta, x); },
        [theta](double x) { return du_theta(theta, x); }, {0.0});
}

}  // namespace plap
