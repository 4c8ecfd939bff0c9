#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "plap/families.hpp"
#include "plap/op.hpp"
#include "plap/verify.hpp"

using namespace plap;

namespace {

const ThetaFamilyParams kRef = ThetaFamilyParams::reference();

// Independent term-by-term evaluation of the theta-family source.
double f_theta_by_terms(double p, double theta1, double theta2, double lambda, double theta,
                        double x) {
    const double ax = std::abs(x);
    const double diffusion = (p - 1.0) * std::pow(theta, p - 1.0) * (theta - 1.0) *
                             std::pow(ax, (theta - 1.0) * (p - 1.0) - 1.0);
    const double bx = (p - 1.0) * (p - 1.0) * (theta1 - 1.0) * std::pow(theta1, p - 2.0) *
                      std::pow(ax, (p - 2.0) * (theta2 - 1.0) - 1.0) * (x > 0 ? 1.0 : -1.0);
    const double drift = theta * bx * (x > 0 ? 1.0 : -1.0) * std::pow(ax, theta - 1.0);
    const double reaction = lambda * (1.0 - std::pow(ax, theta));
    return diffusion + drift + reaction;
}

}  // namespace

TEST_CASE("theta family parameter bounds") {
    CHECK(kRef.lambda == doctest::Approx(3456.0));  // 2*(p-1)^2*(theta2-1)*theta2^{p-1}
    CHECK_NOTHROW(kRef.validate());

    ThetaFamilyParams low_lambda = kRef;
    low_lambda.lambda = 3455.0;
    CHECK_THROWS_AS(low_lambda.validate(), ParamsViolateFamilyBounds);

    ThetaFamilyParams bad_order = kRef;
    bad_order.theta1 = 4.5;
    CHECK_THROWS_AS(bad_order.validate(), ParamsViolateFamilyBounds);

    ThetaFamilyParams small_theta = kRef;
    small_theta.theta1 = 1.9;  // p/(p-2) = 2 for p = 4
    CHECK_THROWS_AS(small_theta.validate(), ParamsViolateFamilyBounds);
}

TEST_CASE("u_theta values") {
    CHECK(u_theta(2.0, 0.0) == 1.0);
    CHECK(u_theta(2.0, 1.0) == 0.0);
    CHECK(u_theta(2.0, -1.0) == 0.0);
    CHECK(u_theta(3.0, 0.5) == doctest::Approx(0.875));
    CHECK_THROWS_AS(u_theta(3.0, 1.5), DomainError);
    CHECK_THROWS_AS(u_theta(0.5, 0.0), DomainError);
    // derivative consistent with a central difference
    for (double x : {-0.7, -0.2, 0.4, 0.9}) {
        const double fd =
            oracles::central_fd([](double t) { return u_theta(3.0, t); }, x, 1e-6);
        CHECK(du_theta(3.0, x) == doctest::Approx(fd).epsilon(1e-8));
    }
    CHECK(du_theta(3.0, 0.0) == 0.0);
}

TEST_CASE("f_theta values") {
    const Exponent p(4.0);
    const ScalarField b0 = ScalarField::constant(0.0);
    const ReactionField none = ReactionField::zero();

    // (p=4, theta=2, b=0, phi=0, x=1/2): 3 * 8 * 1 * (1/2)^2 = 6
    CHECK(f_theta(p, 2.0, b0, none, 0.5) == doctest::Approx(6.0));

    // x = 0 with a linear reaction: all power terms vanish, u_theta(0) = 1
    const ReactionField lin = ReactionField::linear(kRef.lambda);
    CHECK(f_theta(p, 3.0, b0, lin, 0.0) == doctest::Approx(kRef.lambda));

    // reference parameters, drift from the family: term-by-term oracle
    const ScalarField b = theta_drift_field(kRef);
    for (double theta : {kRef.theta1, kRef.theta2}) {
        for (double x : {-0.75, -0.5, 0.25, 0.5, 0.9}) {
            const double expect =
                f_theta_by_terms(4.0, kRef.theta1, kRef.theta2, kRef.lambda, theta, x);
            CHECK(f_theta(p, theta, b, lin, x) == doctest::Approx(expect).epsilon(1e-13));
        }
    }

    // leading exponent <= 0 at x = 0 is singular: (theta-1)(p-1) = 1 exactly
    const Exponent p_low(2.5);
    CHECK_THROWS_AS(f_theta(p_low, 1.4, b0, none, 0.0), SingularAtZero);
    CHECK_THROWS_AS(f_theta(p, 3.0, b0, none, 1.5), DomainError);
}

TEST_CASE("theta drift field") {
    const ScalarField b = theta_drift_field(kRef);
    CHECK(b(0.0) == 0.0);
    CHECK(b(1.0) == doctest::Approx(162.0));   // 9 * 2 * 9 * 1
    CHECK(b(-1.0) == doctest::Approx(-162.0));  // odd symmetry
    CHECK(b.derivative(0.0) == 0.0);
    CHECK(derivative_consistency_gap(b) < 1e-6);
    // b' >= 0 on a probe grid
    for (int i = 0; i <= 200; ++i) {
        const double x = -1.0 + i / 100.0;
        CHECK(b.derivative(x) >= 0.0);
    }
    for (double x : {-0.9, 0.01, 0.3}) CHECK(theta_drift(kRef, x) == doctest::Approx(b(x)));
}

TEST_CASE("dftheta_dtheta matches a finite difference in theta") {
    const Exponent p(4.0);
    const ScalarField b = theta_drift_field(kRef);
    const ReactionField lin = ReactionField::linear(kRef.lambda);
    const double h = 1e-5;
    for (int j = 1; j <= 99; ++j) {
        const double x = -1.0 + (2.0 * j - 1.0) / 100.0;
        const double theta = kRef.theta1 + 0.37 * (kRef.theta2 - kRef.theta1);
        const double fd = (f_theta(p, theta + h, b, lin, x) - f_theta(p, theta - h, b, lin, x)) /
                          (2.0 * h);
        const double exact = dftheta_dtheta(p, theta, b, kRef.lambda, x);
        CHECK(exact == doctest::Approx(fd).epsilon(1e-5));
        CHECK(exact > 0.0);
    }
    CHECK_THROWS_AS(dftheta_dtheta(p, 3.5, b, kRef.lambda, 0.0), DomainError);
    CHECK_THROWS_AS(dftheta_dtheta(p, 3.5, b, kRef.lambda, 1.0), DomainError);
}

TEST_CASE("dftheta braces carry the proven signs") {
    const Exponent p(4.0);
    const ScalarField b = theta_drift_field(kRef);
    for (int k = 1; k <= 9; ++k) {
        const double theta = kRef.theta1 + k * (kRef.theta2 - kRef.theta1) / 10.0;
        for (int j = 1; j <= 99; ++j) {
            const double x = -1.0 + (2.0 * j - 1.0) / 100.0;
            const auto terms = dftheta_dtheta_terms(p, theta, b, kRef.lambda, x);
            CHECK(terms.brace1 > 0.0);
            CHECK(terms.brace2 <= 1e-12);
        }
    }
}

TEST_CASE("two-sided drift envelope holds for the family drift") {
    const Exponent p(4.0);
    for (int k = 1; k <= 9; ++k) {
        const double theta = kRef.theta1 + k * (kRef.theta2 - kRef.theta1) / 10.0;
        for (int j = 1; j <= 99; ++j) {
            const double x = -1.0 + (2.0 * j - 1.0) / 100.0;
            if (x == 0.0) continue;
            const auto env = theta_drift_envelope(p, theta, kRef.lambda, x);
            const double ratio = theta_drift(kRef, x) / x;
            CHECK(ratio > env.lower);
            CHECK(ratio <= env.upper + 1e-12);
        }
    }
}

TEST_CASE("drift admissibility") {
    // the family's own drift satisfies the generalized conditions
    CHECK(drift_is_admissible(theta_drift_field(kRef), kRef).admissible);
    // zero drift trivially passes
    CHECK(drift_is_admissible(ScalarField::constant(0.0), kRef).admissible);
    // b(x) = x already fails the b'(0) = 0 condition
    const ScalarField linear_b = ScalarField::expression("x", "1");
    const auto rep = drift_is_admissible(linear_b, kRef);
    CHECK_FALSE(rep.admissible);
    CHECK(rep.detail == "b'(0) != 0");
    // b(x) = x^3 passes the derivative conditions but breaks the envelope near 0
    const ScalarField cubic_b = ScalarField::expression("x*x*x", "3*x*x");
    const auto rep3 = drift_is_admissible(cubic_b, kRef);
    CHECK_FALSE(rep3.admissible);
    CHECK(rep3.detail == "b(x)/x exceeds the envelope");
    // a drift without a derivative cannot be tested
    CHECK_THROWS_AS(drift_is_admissible(ScalarField::table({-1.0, 0.0, 1.0}, {0.0, 0.0, 0.0}), kRef),
                    MissingDerivative);
}

TEST_CASE("monotone family ordering") {
    for (int i = 1; i < 200; ++i) {
        const double x = -1.0 + i / 100.0;
        if (x == 0.0) continue;
        CHECK(u_theta(kRef.theta1, x) < u_theta(kRef.theta2, x));
    }
    CHECK(u_theta(kRef.theta1, 0.0) == u_theta(kRef.theta2, 0.0));
    CHECK(u_theta(kRef.theta1, 1.0) == u_theta(kRef.theta2, 1.0));
}

TEST_CASE("counterexample source ordering") {
    const Exponent p(4.0);
    const ScalarField b = theta_drift_field(kRef);
    const ReactionField lin = ReactionField::linear(kRef.lambda);
    for (int i = 1; i < 2000; ++i) {
        const double x = -1.0 + i / 1000.0;
        if (x == 0.0) continue;
        CHECK(f_theta(p, kRef.theta1, b, lin, x) < f_theta(p, kRef.theta2, b, lin, x));
    }
}

TEST_CASE("plateau junction continuity") {
    for (double pv : {2.12, 3.0, 4.0, 4.74}) {
        const Exponent p(pv);
        const double xs = plateau_xs(p);
        CAPTURE(pv);
        CHECK(plateau_u(p, std::nextafter(-0.5, -1.0)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(plateau_u(p, -0.5) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(plateau_v(p, std::nextafter(xs, -1.0)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(plateau_v(p, std::nextafter(xs, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(plateau_u(p, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(plateau_u(p, -1.0) == 0.0);
        CHECK(std::abs(plateau_v(p, 1.0)) < 1e-12);
        CHECK(plateau_v(p, -1.0) == 0.0);
        CHECK(xs > -0.5);
        CHECK(xs < 1.0);
        CHECK(plateau_b0(p) < 0.0);
    }
}

TEST_CASE("plateau derivatives are C1 at the junctions") {
    for (double pv : {3.0, 4.0, 4.74}) {
        const Exponent p(pv);
        const double xs = plateau_xs(p);
        // exact one-sided derivatives vanish from both sides of each junction
        CHECK(plateau_du(p, -0.5) == 0.0);
        CHECK(plateau_du(p, std::nextafter(-0.5, -1.0)) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(plateau_dv(p, xs) == 0.0);
        // right of x_s the slope vanishes at a Hoelder rate 1/(p-2)
        CHECK(std::abs(plateau_dv(p, xs + 1e-9)) < 2e-3);
        CHECK(plateau_dv(p, -0.4999999) == 0.0);  // plateau side
        // one-sided secant slopes agree across the junction; the curvature is
        // unbounded on the degenerate side, so they converge like sqrt(h)
        const double h = 1e-7;
        const double left_at_half = (plateau_u(p, -0.5) - plateau_u(p, -0.5 - h)) / h;
        const double right_at_half = (plateau_u(p, -0.5 + h) - plateau_u(p, -0.5)) / h;
        CHECK(std::abs(left_at_half - right_at_half) < 5e-3);
        const double v_left = (plateau_v(p, xs) - plateau_v(p, xs - h)) / h;
        const double v_right = (plateau_v(p, xs + h) - plateau_v(p, xs)) / h;
        CHECK(std::abs(v_left - v_right) < 5e-3);
    }
}

TEST_CASE("plateau constant drift in closed form") {
    // p=4: -(3/2)^{-3} (2/3)^{-3} = -1; p=3: -(4/9)*4 = -16/9
    CHECK(plateau_b0(Exponent(4.0)) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(plateau_b0(Exponent(3.0)) == doctest::Approx(-16.0 / 9.0).epsilon(1e-15));
    CHECK(plateau_xs(Exponent(4.0)) ==
          doctest::Approx(1.0 - 3.0 / std::pow(2.0, 4.0 / 3.0)).epsilon(1e-15));
}

TEST_CASE("plateau profile values against an extended-precision oracle") {
    // v(0) for p = 4: 1 - 2^2 3^{-3/2} (0 - x_s)^{3/2} in long double
    const long double xs = 1.0L - 3.0L / std::pow(2.0L, 4.0L / 3.0L);
    const long double v0 = 1.0L - std::pow(2.0L, 2.0L) * std::pow(3.0L, -1.5L) *
                                      std::pow(0.0L - xs, 1.5L);
    CHECK(plateau_v(Exponent(4.0), 0.0) == doctest::Approx(static_cast<double>(v0)).epsilon(1e-14));
}

TEST_CASE("plateau sources") {
    const Exponent p(4.0);
    const double xs = plateau_xs(p);
    // shared branch at x = -3/4, term by term: 2^{2p-1}(p-1) t^{p-2} + 4 b0 (2x+1)
    const double expect = std::pow(2.0, 7.0) * 3.0 * 0.25 + 4.0 * plateau_b0(p) * (-0.5);
    CHECK(expect == doctest::Approx(98.0));
    const auto [f34, g34] = plateau_sources(p, -0.75);
    CHECK(f34 == doctest::Approx(expect).epsilon(1e-14));
    CHECK(g34 == doctest::Approx(expect).epsilon(1e-14));

    // both vanish on the plateau
    for (double x : {-0.5, -0.4, -0.3, xs}) {
        const auto [f, g] = plateau_sources(p, x);
        CHECK(f == 0.0);
        CHECK(g == 0.0);
    }

    // g's third branch at x -> 1
    const double q = 9.0;  // (p-1)^2
    const double cg = std::pow(2.0, (q + 1.0) / 2.0) * std::pow(3.0, -q / 2.0) *
                      std::pow(1.5, 4.0);
    const auto [f1, g1] = plateau_sources(p, std::nextafter(1.0, 0.0));
    CHECK(f1 == 0.0);
    CHECK(g1 == doctest::Approx(cg * std::sqrt(1.0 - xs)).epsilon(1e-12));

    // ordering invariants: f <= g, f = g on (-1, x_s], g > f = 0 on (x_s, 1)
    for (double pv : {2.12, 3.0, 4.0, 4.74}) {
        const Exponent pe(pv);
        const double xse = plateau_xs(pe);
        for (int i = 1; i < 400; ++i) {
            const double x = -1.0 + i / 200.0;
            const auto [f, g] = plateau_sources(pe, x);
            CHECK(f <= g);
            CHECK(f >= 0.0);
            if (x <= xse) CHECK(f == g);
            if (x > xse && x < 1.0) {
                CHECK(f == 0.0);
                CHECK(g > 0.0);
            }
        }
    }
}

TEST_CASE("plateau ordering of the pair") {
    for (double pv : {3.0, 4.0, 4.74}) {
        const Exponent p(pv);
        for (int i = 1; i < 400; ++i) {
            const double x = -1.0 + i / 200.0;
            const double gap = plateau_v(p, x) - plateau_u(p, x);
            CHECK(gap >= 0.0);
            if (x <= -0.5) CHECK(gap == 0.0);
            if (x >= -0.25 && x < 1.0) CHECK(gap > 0.0);
        }
    }
}

TEST_CASE("closed-form profiles satisfy their equations through the operator") {
    NumericPolicy policy;
    policy.grid_n = 2001;
    for (double pv : {2.12, 3.0, 4.0, 4.74}) {
        const Exponent p(pv);
        CAPTURE(pv);
        const double tol = plateau_residual_tol(p, policy);
        CHECK(apply_operator(plateau_instance(p, false), plateau_u_profile(p, policy)).sup_norm <
              tol);
        CHECK(apply_operator(plateau_instance(p, true), plateau_v_profile(p, policy)).sup_norm <
              tol);
    }
    // theta family: u_theta is the exact solution of its own source
    for (double theta : {kRef.theta1, kRef.theta2}) {
        const auto inst = theta_instance(kRef, theta);
        const auto prof = theta_profile(kRef, theta, policy);
        CHECK(apply_operator(inst, prof).sup_norm < policy.tol_residual);
    }
}

TEST_CASE("profile derivative consistency") {
    NumericPolicy policy;
    policy.grid_n = 501;
    const Exponent p(4.0);
    for (const auto& prof : {plateau_u_profile(p, policy), plateau_v_profile(p, policy),
                             theta_profile(kRef, 3.0, policy)}) {
        prof.validate();
        const double h = prof.u.max_spacing();
        const double tol = std::max(10.0 * h * h, 1e-6) * (1.0 + prof.sup_abs());
        // du matches central differences of u away from breakpoints
        for (std::size_t i = 1; i + 1 < prof.u.nodes.size(); ++i) {
            bool near_bp = false;
            for (double bp : prof.breakpoints)
                if (std::abs(prof.u.nodes[i] - bp) < 2.0 * h) near_bp = true;
            if (near_bp) continue;
            const double dm = prof.u.nodes[i] - prof.u.nodes[i - 1];
            const double dp = prof.u.nodes[i + 1] - prof.u.nodes[i];
            if (std::abs(dm - dp) > 1e-12) continue;
            const double fd = (prof.u.values[i + 1] - prof.u.values[i - 1]) / (dm + dp);
            CHECK(std::abs(prof.du[i] - fd) < tol);
        }
    }
}
