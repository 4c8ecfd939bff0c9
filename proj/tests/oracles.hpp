#pragma once

// Test-only oracles, independent of the library's computation paths.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// 16-point Gauss-Legendre abscissas/weights on [-1,1].
inline const std::array<double, 8>& gl16_x() {
    static const std::array<double, 8> x = {
        0.095012509837637440185, 0.281603550779258913230, 0.458016777657227386342,
        0.617876244402643748447, 0.755404408355003033895, 0.865631202387831743880,
        0.944575023073232576078, 0.989400934991649932596};
    return x;
}

inline const std::array<double, 8>& gl16_w() {
    static const std::array<double, 8> w = {
        0.189450610455068496285, 0.182603415044923588867, 0.169156519395002538189,
        0.149595988816576732081, 0.124628971255533872052, 0.095158511682492784810,
        0.062253523938647892863, 0.027152459411754094852};
    return w;
}

inline double gl16(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 8; ++k) {
        acc += gl16_w()[k] * (f(mid + half * gl16_x()[k]) + f(mid - half * gl16_x()[k]));
    }
    return acc * half;
}

/// Composite 16-point Gauss-Legendre with panels geometrically graded toward
/// a possible zero of the integrand's argument at one end of [a,b].
inline double gl16_graded(const std::function<double(double)>& f, double a, double b,
                          bool zero_at_a, bool zero_at_b) {
    if (!(b > a)) return 0.0;
    if (!zero_at_a && !zero_at_b) return gl16(f, a, b);
    double acc = 0.0;
    const int levels = 64;
    if (zero_at_a) {
        double hi = b;
        for (int k = 0; k < levels; ++k) {
            const double edge = a + (b - a) * std::pow(0.5, k + 1);
            acc += gl16(f, edge, hi);
            hi = edge;
        }
        acc += gl16(f, a, hi);
    } else {
        double lo = a;
        for (int k = 0; k < levels; ++k) {
            const double edge = b - (b - a) * std::pow(0.5, k + 1);
            acc += gl16(f, lo, edge);
            lo = edge;
        }
        acc += gl16(f, lo, b);
    }
    return acc;
}

/// Panels graded toward both ends; handles integrands whose derivatives are
/// singular or merely steep at either endpoint.
inline double gl16_graded_both(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    return gl16_graded(f, a, mid, true, false) + gl16_graded(f, mid, b, false, true);
}

/// (p-1) * integral_0^1 |(1-t)a + t b|^{p-2} dt by sign-split graded panels;
/// the independent check of the mean-value diffusion coefficient.
inline double mean_value_coefficient_quadrature(double p, double a, double b) {
    auto integrand = [&](double t) {
        const double s = (1.0 - t) * a + t * b;
        return std::pow(std::abs(s), p - 2.0);
    };
    double cross = 2.0;  // crossing of the argument, outside [0,1] by default
    if (a != b) cross = a / (a - b);
    double acc = 0.0;
    if (cross > 0.0 && cross < 1.0) {
        acc += gl16_graded_both(integrand, 0.0, cross);
        acc += gl16_graded_both(integrand, cross, 1.0);
    } else {
        acc += gl16_graded_both(integrand, 0.0, 1.0);
    }
    return (p - 1.0) * acc;
}

/// Central finite difference.
inline double central_fd(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles
