#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

/// sgn with sgn(0) = 0.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// Conjugate of a Hoelder exponent, q -> q/(q-1), as a formal map on (1,inf).
inline double holder_conjugate(double q) {
    if (!(q > 1.0)) throw DomainError("holder_conjugate: exponent must be > 1");
    return q / (q - 1.0);
}

/// Diffusion exponent p, restricted to the degenerate range p > 2.
class Exponent {
  public:
    explicit Exponent(double p) : p_(p) {
        if (!(p > 2.0) || !std::isfinite(p))
            throw UnsupportedExponent("Exponent: p must be finite and > 2, got " +
                                      std::to_string(p));
    }

    double value() const { return p_; }
    operator double() const { return p_; }

  private:
    double p_;
};

/// p/(p-1), always in (1,2) for p > 2.
inline double conjugate_exponent(const Exponent& p) { return holder_conjugate(p.value()); }

/// Tolerances and resolution shared by solvers and verdicts.
struct NumericPolicy {
    int grid_n = 2001;
    double tol_solve = 1e-8;
    double tol_contact = 1e-7;
    double tol_residual = 1e-6;
    int quadrature_order = 16;

    void validate() const {
        if (grid_n < 11 || grid_n % 2 == 0)
            throw BadInput("NumericPolicy: grid_n must be odd and >= 11");
        if (!(tol_solve > 0.0) || !(tol_contact > 0.0) || !(tol_residual > 0.0))
            throw BadInput("NumericPolicy: tolerances must be > 0");
        if (quadrature_order < 2) throw BadInput("NumericPolicy: quadrature_order must be >= 2");
    }
};

/// Nodes and values on [-1,1]; nodes strictly increasing with both endpoints present.
struct GridFunction {
    std::vector<double> nodes;
    std::vector<double> values;

    std::size_t size() const { return nodes.size(); }

    void validate() const {
        if (nodes.size() < 3) throw BadInput("GridFunction: need at least 3 nodes");
        if (nodes.size() != values.size())
            throw GridMismatch("GridFunction: nodes/values length mismatch");
        if (nodes.front() != -1.0 || nodes.back() != 1.0)
            throw BadInput("GridFunction: endpoints must be exactly -1 and 1");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw BadInput("GridFunction: nodes must be strictly increasing");
    }

    double max_spacing() const {
        double h = 0.0;
        for (std::size_t i = 1; i < nodes.size(); ++i) h = std::max(h, nodes[i] - nodes[i - 1]);
        return h;
    }

    double sup_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

enum class SolveMethod { shooting, newton_fd, closed_form };

inline const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::shooting: return "shooting";
        case SolveMethod::newton_fd: return "newton-fd";
        case SolveMethod::closed_form: return "closed-form";
    }
    return "?";
}

/// A solution with nodal derivative values and solver metadata.
struct SolutionProfile {
    GridFunction u;
    std::vector<double> du;
    SolveMethod method = SolveMethod::closed_form;
    double residual_sup = 0.0;
    double regularization_final = 0.0;
    /// Kink locations of the underlying data; stencils never straddle these.
    std::vector<double> breakpoints;

    void validate() const {
        u.validate();
        if (du.size() != u.nodes.size())
            throw GridMismatch("SolutionProfile: du length mismatch");
    }

    double sup_abs() const { return u.sup_abs(); }
};

/// Uniform nodes on [-1,1]; odd count keeps 0 and +-1/2 on the grid.
inline std::vector<double> uniform_nodes(int n) {
    if (n < 3) throw BadInput("uniform_nodes: n must be >= 3");
    std::vector<double> xs(static_cast<std::size_t>(n));
    const double h = 2.0 / (n - 1);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = -1.0 + h * i;
    xs.front() = -1.0;
    xs.back() = 1.0;
    const int mid = (n - 1) / 2;
    if (n % 2 == 1) xs[static_cast<std::size_t>(mid)] = 0.0;
    return xs;
}

/// Insert extra nodes into a sorted node set, dropping near-duplicates.
inline void insert_nodes(std::vector<double>& nodes, const std::vector<double>& extra,
                         double min_gap = 1e-12) {
    for (double x : extra) {
        if (x <= -1.0 || x >= 1.0) continue;
        nodes.push_back(x);
    }
    std::sort(nodes.begin(), nodes.end());
    std::vector<double> out;
    out.reserve(nodes.size());
    for (double x : nodes) {
        if (out.empty() || x - out.back() > min_gap)
            out.push_back(x);
        else if (x == 1.0) {
            out.back() = 1.0;  // keep the exact endpoint
        }
    }
    nodes.swap(out);
}

/// Geometric ladder of nodes on both sides of a breakpoint. Spacing grows by a
/// fixed ratio until it reaches the base spacing h, so that difference stencils
/// stay accurate where derivatives of the flux blow up at the kink.
inline std::vector<double> kink_ladder(double bp, double h) {
    std::vector<double> out;
    const double ratio = std::pow(2.0, 1.0 / 12.0);
    double d = h / 4096.0;
    while (true) {
        out.push_back(bp - d);
        out.push_back(bp + d);
        const double step = d * (ratio - 1.0);
        if (step >= h) break;
        d *= ratio;
        if (d > 0.5) break;
    }
    return out;
}

/// Uniform grid of policy resolution with exact breakpoints inserted.
inline std::vector<double> plain_nodes(const NumericPolicy& policy,
                                       const std::vector<double>& breakpoints) {
    policy.validate();
    std::vector<double> nodes = uniform_nodes(policy.grid_n);
    insert_nodes(nodes, breakpoints);
    return nodes;
}

/// Uniform grid of policy resolution with breakpoints and kink ladders inserted.
inline std::vector<double> refined_nodes(const NumericPolicy& policy,
                                         const std::vector<double>& breakpoints) {
    policy.validate();
    std::vector<double> nodes = uniform_nodes(policy.grid_n);
    const double h = 2.0 / (policy.grid_n - 1);
    std::vector<double> extra;
    for (double bp : breakpoints) {
        if (bp <= -1.0 || bp >= 1.0) continue;
        extra.push_back(bp);
        const auto ladder = kink_ladder(bp, h);
        extra.insert(extra.end(), ladder.begin(), ladder.end());
    }
    insert_nodes(nodes, extra);
    return nodes;
}

}  // namespace plap
