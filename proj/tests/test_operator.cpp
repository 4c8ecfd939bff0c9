#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plap/families.hpp"
#include "plap/op.hpp"
#include "plap/solver.hpp"

using namespace plap;

TEST_CASE("flux values and symmetry") {
    const Exponent p(4.0);
    CHECK(flux(p, 0.0) == 0.0);
    CHECK(flux(p, -2.0) == doctest::Approx(-8.0));
    CHECK(flux(p, 2.0) == doctest::Approx(8.0));
    for (double s : {-3.0, -0.5, 0.7, 10.0}) CHECK(flux(p, -s) == doctest::Approx(-flux(p, s)));
}

TEST_CASE("flux and flux_inverse are mutually inverse and increasing") {
    for (double pv : {2.5, 3.0, 4.0, 4.74}) {
        const Exponent p(pv);
        CHECK(flux_inverse(p, 0.0) == 0.0);
        double prev_f = -1e300, prev_i = -1e300;
        for (int k = -24; k <= 24; ++k) {
            const double t = (k == 0) ? 0.0 : ((k > 0) - (k < 0)) * std::pow(10.0, std::abs(k) / 4.0 - 6.0);
            const double round_trip = flux(p, flux_inverse(p, t));
            if (t != 0.0) CHECK(std::abs(round_trip - t) <= 1e-12 * std::abs(t));
            const double fwd = flux(p, t), inv = flux_inverse(p, t);
            CHECK(fwd > prev_f);
            CHECK(inv > prev_i);
            prev_f = fwd;
            prev_i = inv;
        }
    }
    CHECK(flux_inverse(Exponent(4.0), -8.0) == doctest::Approx(-2.0));
}

TEST_CASE("mean value coefficient closed forms") {
    const Exponent p4(4.0);
    CHECK(mean_value_coefficient(p4, 1.0, 1.0) == doctest::Approx(3.0));  // (p-1)|a|^{p-2}
    CHECK(mean_value_coefficient(p4, 1.0, -1.0) == doctest::Approx(1.0));
    // exactly the point formula at the switch
    CHECK(mean_value_coefficient(p4, 0.5, 0.5) == 3.0 * 0.25);
}

TEST_CASE("mean value coefficient against graded Gauss quadrature") {
    std::mt19937 rng(20240819);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (double pv : {2.5, 3.0, 4.0, 4.74}) {
        const Exponent p(pv);
        int done = 0;
        while (done < 100) {
            const double a = U(rng), b = U(rng);
            if (std::abs(b - a) < 1e-3) continue;  // keep the quotient well conditioned
            ++done;
            const double closed = mean_value_coefficient(p, a, b);
            const double quad = oracles::mean_value_coefficient_quadrature(pv, a, b);
            CHECK(std::abs(closed - quad) <= 1e-10 * std::abs(quad));
        }
    }
}

TEST_CASE("mean value coefficient properties") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (double pv : {2.5, 3.0, 4.0}) {
        const Exponent p(pv);
        for (int k = 0; k < 200; ++k) {
            const double a = U(rng), b = U(rng);
            const double d = mean_value_coefficient(p, a, b);
            CHECK(d >= 0.0);
            CHECK(d == mean_value_coefficient(p, b, a));
            if (std::max(std::abs(a), std::abs(b)) > 0.0) CHECK(d > 0.0);
            if (a * b >= 0.0) {
                const double lower =
                    std::pow(2.0, 1.0 - pv) * std::pow(std::max(std::abs(a), std::abs(b)), pv - 2.0);
                CHECK(d >= lower * (1.0 - 1e-12));
            }
        }
    }
}

TEST_CASE("mean value reaction") {
    const ReactionField lin = ReactionField::linear(5.0);
    CHECK(mean_value_reaction(lin, 0.3, -2.0, 7.0) == doctest::Approx(5.0));
    CHECK(mean_value_reaction(ReactionField::zero(), 0.0, 1.0, 2.0) == 0.0);
    const ReactionField pw = ReactionField::power(5.0, 4.0);
    // (phi(b)-phi(a))/(b-a) for a=0, b=1 equals lambda
    CHECK(mean_value_reaction(pw, 0.0, 0.0, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("finite difference weights differentiate polynomials exactly") {
    // five arbitrary nodes, derivative of a quartic at the middle one
    const std::vector<double> xs = {-0.9, -0.35, 0.1, 0.4, 1.0};
    auto f = [](double x) { return 1.0 + x - 2.0 * x * x + 0.5 * x * x * x + x * x * x * x; };
    auto df = [](double x) { return 1.0 - 4.0 * x + 1.5 * x * x + 4.0 * x * x * x; };
    const auto w = detail::fd_weights_first(xs[2], xs);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += w[i] * f(xs[i]);
    CHECK(acc == doctest::Approx(df(0.1)).epsilon(1e-12));
}

TEST_CASE("pivoted tridiagonal solve against dense elimination") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 12;
        std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
        std::vector<detail::BandedRow> band(n);
        std::vector<double> rhs(n), rhs2(n);
        for (std::size_t i = 0; i < n; ++i) {
            band[i].diag = U(rng) * 0.2;  // small diagonals force pivoting
            band[i].sub = (i > 0) ? U(rng) + 2.0 : 0.0;
            band[i].sup1 = (i + 1 < n) ? U(rng) + 2.0 : 0.0;
            rhs[i] = rhs2[i] = U(rng);
            dense[i][i] = band[i].diag;
            if (i > 0) dense[i][i - 1] = band[i].sub;
            if (i + 1 < n) dense[i][i + 1] = band[i].sup1;
        }
        detail::solve_tridiag_pivoted(band, rhs);
        // dense Gaussian elimination with partial pivoting
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t r = k + 1; r < n; ++r)
                if (std::abs(dense[r][k]) > std::abs(dense[piv][k])) piv = r;
            std::swap(dense[k], dense[piv]);
            std::swap(rhs2[k], rhs2[piv]);
            for (std::size_t r = k + 1; r < n; ++r) {
                const double m = dense[r][k] / dense[k][k];
                for (std::size_t c = k; c < n; ++c) dense[r][c] -= m * dense[k][c];
                rhs2[r] -= m * rhs2[k];
            }
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t c = i + 1; c < n; ++c) rhs2[i] -= dense[i][c] * rhs2[c];
            rhs2[i] /= dense[i][i];
        }
        for (std::size_t i = 0; i < n; ++i) CHECK(rhs[i] == doctest::Approx(rhs2[i]).epsilon(1e-9));
    }
}

TEST_CASE("operator residual of trivial data") {
    NumericPolicy policy;
    policy.grid_n = 101;
    ProblemInstance inst;
    inst.p = Exponent(4.0);
    SolutionProfile zero;
    zero.u.nodes = uniform_nodes(policy.grid_n);
    zero.u.values.assign(zero.u.nodes.size(), 0.0);
    zero.du.assign(zero.u.nodes.size(), 0.0);
    const auto res = apply_operator(inst, zero);
    CHECK(res.sup_norm == 0.0);
}

TEST_CASE("operator residual is linear in the source") {
    NumericPolicy policy;
    policy.grid_n = 101;
    ProblemInstance base;
    base.p = Exponent(3.0);
    base.b = ScalarField::constant(-0.5);
    SolutionProfile prof;
    prof.u.nodes = uniform_nodes(policy.grid_n);
    prof.u.values.resize(prof.u.nodes.size());
    prof.du.resize(prof.u.nodes.size());
    for (std::size_t i = 0; i < prof.u.nodes.size(); ++i) {
        const double x = prof.u.nodes[i];
        prof.u.values[i] = (1.0 - x * x);
        prof.du[i] = -2.0 * x;
    }
    ProblemInstance i1 = base, i2 = base, i12 = base, i0 = base;
    i1.f = ScalarField::expression("1 + x");
    i2.f = ScalarField::expression("x*x");
    i12.f = ScalarField::expression("1 + x + x*x");
    const auto r1 = apply_operator(i1, prof);
    const auto r2 = apply_operator(i2, prof);
    const auto r12 = apply_operator(i12, prof);
    const auto r0 = apply_operator(i0, prof);
    for (std::size_t i = 0; i < prof.u.nodes.size(); ++i) {
        const double lhs = r12.grid.values[i];
        const double rhs = r1.grid.values[i] + r2.grid.values[i] - r0.grid.values[i];
        CHECK(std::abs(lhs - rhs) <= 8e-15 * (1.0 + std::abs(r0.grid.values[i]) +
                                              std::abs(r1.grid.values[i]) +
                                              std::abs(r2.grid.values[i])));
    }
}

TEST_CASE("operator rejects mismatched profiles") {
    ProblemInstance inst;
    inst.p = Exponent(4.0);
    SolutionProfile bad;
    bad.u.nodes = uniform_nodes(11);
    bad.u.values.assign(11, 0.0);
    bad.du.assign(7, 0.0);
    CHECK_THROWS_AS(apply_operator(inst, bad), GridMismatch);
}

TEST_CASE("monotonicity hypothesis") {
    // the reference family instance holds with margin >= lambda
    const auto prm = ThetaFamilyParams::reference();
    const auto inst = theta_instance(prm, prm.theta1);
    const auto v = check_hypothesis_M(inst, -2.0, 2.0);
    CHECK(v.holds);
    CHECK(v.margin >= prm.lambda);

    // constant drift with zero reaction holds with margin exactly 0
    ProblemInstance flat;
    flat.p = Exponent(4.0);
    flat.b = ScalarField::constant(-1.0);
    const auto vz = check_hypothesis_M(flat, -1.0, 1.0);
    CHECK(vz.holds);
    CHECK(vz.margin == 0.0);

    // b(x) = -x fails with margin -1/2
    ProblemInstance down;
    down.p = Exponent(4.0);
    down.b = ScalarField::expression("-x", "-1");
    const auto vd = check_hypothesis_M(down, -1.0, 1.0);
    CHECK_FALSE(vd.holds);
    CHECK(vd.margin == doctest::Approx(-0.5));

    // tabulated drift has no derivative to probe
    ProblemInstance tab;
    tab.p = Exponent(4.0);
    tab.b = ScalarField::table({-1.0, 1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(check_hypothesis_M(tab, -1.0, 1.0), MissingDerivative);
}

TEST_CASE("boundary-window hypothesis") {
    NumericPolicy policy;
    policy.grid_n = 1001;
    const ScalarField zero = ScalarField::constant(0.0);
    const ScalarField one = ScalarField::constant(1.0);
    CHECK(check_hypothesis_Hpm1(zero, one, {0.01, 0.25}, policy).holds);
    CHECK_FALSE(check_hypothesis_Hpm1(one, one, {0.1}, policy).holds);

    const Exponent p(4.0);
    const auto girg = check_hypothesis_Hpm1(plateau_f_field(p), plateau_g_field(p), {0.1}, policy);
    CHECK_FALSE(girg.holds);  // f = g on (-1, x_s]
    CHECK(girg.ordered);

    CHECK_THROWS_AS(check_hypothesis_Hpm1(zero, one, {1.5}, policy), BadInput);
}

TEST_CASE("constant-drift hypothesis") {
    NumericPolicy policy;
    policy.grid_n = 1001;
    const Exponent p(4.0);
    const auto inst = plateau_instance(p, false);
    const auto ok = check_hypothesis_H0(plateau_f_field(p), plateau_g_field(p), inst.b, inst.phi,
                                        policy);
    CHECK(ok.holds);
    CHECK(ok.b0 == doctest::Approx(-1.0));

    const auto same = check_hypothesis_H0(plateau_f_field(p), plateau_f_field(p), inst.b, inst.phi,
                                          policy);
    CHECK_FALSE(same.holds);

    const auto varying = check_hypothesis_H0(plateau_f_field(p), plateau_g_field(p),
                                             ScalarField::expression("x"), inst.phi, policy);
    CHECK_FALSE(varying.holds);
}

TEST_CASE("energy functional") {
    NumericPolicy policy;
    ProblemInstance zero_data;
    zero_data.p = Exponent(4.0);
    SolutionProfile zero;
    zero.u.nodes = uniform_nodes(policy.grid_n);
    zero.u.values.assign(zero.u.nodes.size(), 0.0);
    zero.du.assign(zero.u.nodes.size(), 0.0);
    CHECK(evaluate_energy(zero_data, zero) == 0.0);

    // u = 1 - |x| with p = 4 and zero data: (1/4) * int 1 dx = 1/2
    SolutionProfile tent;
    tent.u.nodes = uniform_nodes(policy.grid_n);
    tent.u.values.resize(tent.u.nodes.size());
    tent.du.resize(tent.u.nodes.size());
    for (std::size_t i = 0; i < tent.u.nodes.size(); ++i) {
        const double x = tent.u.nodes[i];
        tent.u.values[i] = 1.0 - std::abs(x);
        tent.du[i] = x == 0.0 ? 0.0 : -sgn(x);
    }
    tent.breakpoints = {0.0};
    CHECK(evaluate_energy(zero_data, tent) == doctest::Approx(0.5).epsilon(2e-3));

    ProblemInstance with_drift = zero_data;
    with_drift.b = ScalarField::constant(-1.0);
    CHECK_THROWS_AS(evaluate_energy(with_drift, tent), NonVariational);
}

TEST_CASE("reflection transforms the data correctly") {
    const Exponent p(4.0);
    const auto inst = plateau_instance(p, false);
    const auto refl = reflect_problem(inst);
    CHECK(refl.b(0.3) == doctest::Approx(1.0));  // constant -b0
    for (double x : {-0.9, -0.5, -0.1, 0.2, 0.7}) {
        CHECK(refl.f(x) == doctest::Approx(inst.f(-x)));
    }
    const auto twice = reflect_problem(refl);
    for (double x : {-0.8, -0.3, 0.0, 0.4, 0.9}) {
        CHECK(std::abs(twice.f(x) - inst.f(x)) <= 1e-12 * (1.0 + std::abs(inst.f(x))));
        CHECK(std::abs(twice.b(x) - inst.b(x)) <= 1e-12);
    }
    CHECK(twice.bc_left == inst.bc_left);
    CHECK(twice.bc_right == inst.bc_right);
}
