#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/expr.hpp"

namespace plap {

/// A coefficient or source function on [-1,1], with an optional exact derivative
/// and a list of interior kink locations.
class ScalarField {
  public:
    enum class Kind { constant, expression, piecewise, table, native };

    struct Piece {
        double lo = -1.0;
        double hi = 1.0;
        ExprPtr value;
        ExprPtr deriv;  // may be null
        std::string value_src;
        std::string deriv_src;
    };

    ScalarField() : ScalarField(constant(0.0)) {}

    static ScalarField constant(double c) {
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::constant;
        impl->c = c;
        return ScalarField(std::move(impl));
    }

    static ScalarField expression(const std::string& expr, const std::string& deriv = "") {
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::expression;
        impl->expr_src = expr;
        impl->expr = parse_expression(expr);
        if (!deriv.empty()) {
            impl->dexpr_src = deriv;
            impl->dexpr = parse_expression(deriv);
        }
        return ScalarField(std::move(impl));
    }

    static ScalarField piecewise(std::vector<Piece> pieces) {
        if (pieces.empty()) throw BadInput("ScalarField: piecewise needs at least one piece");
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::piecewise;
        impl->pieces = std::move(pieces);
        double cursor = -1.0;
        for (const auto& pc : impl->pieces) {
            if (std::abs(pc.lo - cursor) > 1e-12)
                throw BadInput("ScalarField: piecewise pieces must tile [-1,1] in order");
            if (!(pc.hi > pc.lo)) throw BadInput("ScalarField: empty piece");
            if (!pc.value) throw BadInput("ScalarField: piece without expression");
            cursor = pc.hi;
            if (pc.hi < 1.0) impl->breakpoints.push_back(pc.hi);
        }
        if (std::abs(cursor - 1.0) > 1e-12)
            throw BadInput("ScalarField: piecewise pieces must cover up to x = 1");
        return ScalarField(std::move(impl));
    }

    static ScalarField table(std::vector<double> xs, std::vector<double> ys) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw BadInput("ScalarField: table needs matching x/y of length >= 2");
        if (std::abs(xs.front() + 1.0) > 1e-12 || std::abs(xs.back() - 1.0) > 1e-12)
            throw BadInput("ScalarField: table samples must cover [-1,1]");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i] > xs[i - 1])) throw BadInput("ScalarField: table x must increase");
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::table;
        impl->tx = std::move(xs);
        impl->ty = std::move(ys);
        impl->breakpoints.assign(impl->tx.begin() + 1, impl->tx.end() - 1);
        return ScalarField(std::move(impl));
    }

    /// Closed-form field backed by plain functions (not serializable).
    static ScalarField native(std::function<double(double)> fn,
                              std::function<double(double)> dfn = {},
                              std::vector<double> breakpoints = {}, std::string label = "native") {
        if (!fn) throw BadInput("ScalarField: null function");
        auto impl = std::make_shared<Impl>();
        impl->kind = Kind::native;
        impl->fn = std::move(fn);
        impl->dfn = std::move(dfn);
        impl->breakpoints = std::move(breakpoints);
        impl->label = std::move(label);
        return ScalarField(std::move(impl));
    }

    double operator()(double x) const {
        x = clamp_to_domain(x);
        switch (impl_->kind) {
            case Kind::constant: return impl_->c;
            case Kind::expression: return impl_->expr->eval(x);
            case Kind::piecewise: return piece_at(x).value->eval(x);
            case Kind::table: return interp(x);
            case Kind::native: return impl_->fn(x);
        }
        return 0.0;
    }

    bool has_derivative() const {
        switch (impl_->kind) {
            case Kind::constant: return true;
            case Kind::expression: return impl_->dexpr != nullptr;
            case Kind::piecewise:
                for (const auto& pc : impl_->pieces)
                    if (!pc.deriv) return false;
                return true;
            case Kind::table: return false;
            case Kind::native: return static_cast<bool>(impl_->dfn);
        }
        return false;
    }

    double derivative(double x) const {
        if (!has_derivative())
            throw MissingDerivative("ScalarField '" + impl_->label + "': no derivative declared");
        x = clamp_to_domain(x);
        switch (impl_->kind) {
            case Kind::constant: return 0.0;
            case Kind::expression: return impl_->dexpr->eval(x);
            case Kind::piecewise: return piece_at(x).deriv->eval(x);
            case Kind::native: return impl_->dfn(x);
            case Kind::table: break;
        }
        throw MissingDerivative("ScalarField: no derivative");
    }

    const std::vector<double>& breakpoints() const { return impl_->breakpoints; }
    Kind kind() const { return impl_->kind; }
    const std::string& label() const { return impl_->label; }

    // Introspection used by serialization.
    double constant_value() const { return impl_->c; }
    const std::string& expr_source() const { return impl_->expr_src; }
    const std::string& deriv_source() const { return impl_->dexpr_src; }
    const std::vector<Piece>& pieces() const { return impl_->pieces; }
    const std::vector<double>& table_x() const { return impl_->tx; }
    const std::vector<double>& table_y() const { return impl_->ty; }

    /// Field x -> -this(-x) (how a drift transforms under reflection).
    ScalarField reflected_odd() const {
        ScalarField inner = *this;
        std::function<double(double)> dfn;
        if (has_derivative()) dfn = [inner](double x) { return inner.derivative(-x); };
        return native([inner](double x) { return -inner(-x); }, std::move(dfn),
                      negated_breakpoints(), impl_->label + "~odd");
    }

    /// Field x -> this(-x) (how a source transforms under reflection).
    ScalarField reflected_even() const {
        ScalarField inner = *this;
        std::function<double(double)> dfn;
        if (has_derivative()) dfn = [inner](double x) { return -inner.derivative(-x); };
        return native([inner](double x) { return inner(-x); }, std::move(dfn),
                      negated_breakpoints(), impl_->label + "~even");
    }

  private:
    struct Impl {
        Kind kind = Kind::constant;
        double c = 0.0;
        std::string expr_src, dexpr_src;
        ExprPtr expr, dexpr;
        std::vector<Piece> pieces;
        std::vector<double> tx, ty;
        std::function<double(double)> fn, dfn;
        std::vector<double> breakpoints;
        std::string label = "field";
    };

    explicit ScalarField(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

    static double clamp_to_domain(double x) {
        if (x < -1.0 || x > 1.0) {
            if (std::abs(x) <= 1.0 + 1e-12) return x < 0.0 ? -1.0 : 1.0;
            throw DomainError("ScalarField: evaluation outside [-1,1] at x = " +
                              std::to_string(x));
        }
        return x;
    }

    const Piece& piece_at(double x) const {
        for (const auto& pc : impl_->pieces) {
            const bool last = (&pc == &impl_->pieces.back());
            if (x >= pc.lo - 1e-15 && (x < pc.hi || (last && x <= pc.hi + 1e-15))) return pc;
        }
        return impl_->pieces.back();
    }

    double interp(double x) const {
        const auto& tx = impl_->tx;
        const auto& ty = impl_->ty;
        auto it = std::upper_bound(tx.begin(), tx.end(), x);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - tx.begin()));
        if (i >= tx.size()) i = tx.size() - 1;
        const double t = (x - tx[i - 1]) / (tx[i] - tx[i - 1]);
        return ty[i - 1] + t * (ty[i] - ty[i - 1]);
    }

    std::vector<double> negated_breakpoints() const {
        std::vector<double> b;
        for (double x : impl_->breakpoints) b.push_back(-x);
        std::sort(b.begin(), b.end());
        return b;
    }

    std::shared_ptr<const Impl> impl_;
};

/// Reaction term phi(x,s) with its partial derivative in s and its primitive in s.
class ReactionField {
  public:
    enum class Kind { zero, linear, power, custom };

    ReactionField() = default;  // zero

    static ReactionField zero() { return ReactionField(); }

    static ReactionField linear(double lambda) {
        ReactionField r;
        r.kind_ = Kind::linear;
        r.lambda_ = lambda;
        return r;
    }

    /// phi(x,s) = lambda * |s|^{p-2} s.
    static ReactionField power(double lambda, double p) {
        if (!(p > 2.0)) throw UnsupportedExponent("ReactionField::power: p must be > 2");
        ReactionField r;
        r.kind_ = Kind::power;
        r.lambda_ = lambda;
        r.power_p_ = p;
        return r;
    }

    static ReactionField custom(std::function<double(double, double)> value,
                                std::function<double(double, double)> partial_s) {
        if (!value || !partial_s) throw BadInput("ReactionField::custom: null function");
        ReactionField r;
        r.kind_ = Kind::custom;
        r.value_ = std::move(value);
        r.partial_ = std::move(partial_s);
        return r;
    }

    Kind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double power_p() const { return power_p_; }
    bool is_zero() const { return kind_ == Kind::zero; }

    double value(double x, double s) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::linear: return lambda_ * s;
            case Kind::power: return lambda_ * std::pow(std::abs(s), power_p_ - 2.0) * s;
            case Kind::custom: return value_(x, s);
        }
        return 0.0;
    }

    double partial_s(double x, double s) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::linear: return lambda_;
            case Kind::power: return lambda_ * (power_p_ - 1.0) * std::pow(std::abs(s), power_p_ - 2.0);
            case Kind::custom: return partial_(x, s);
        }
        return 0.0;
    }

    /// Primitive in s anchored at 0; closed form except for custom reactions,
    /// which fall back to composite Simpson.
    double primitive(double x, double s) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::linear: return 0.5 * lambda_ * s * s;
            case Kind::power: return lambda_ * std::pow(std::abs(s), power_p_) / power_p_;
            case Kind::custom: {
                const int n = 64;
                const double h = s / n;
                double acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double a = i * h, b = (i + 1) * h;
                    acc += (h / 6.0) *
                           (value_(x, a) + 4.0 * value_(x, 0.5 * (a + b)) + value_(x, b));
                }
                return acc;
            }
        }
        return 0.0;
    }

    ReactionField reflected() const {
        if (kind_ != Kind::custom) return *this;
        auto v = value_;
        auto d = partial_;
        return custom([v](double x, double s) { return v(-x, s); },
                      [d](double x, double s) { return d(-x, s); });
    }

  private:
    Kind kind_ = Kind::zero;
    double lambda_ = 0.0;
    double power_p_ = 3.0;
    std::function<double(double, double)> value_, partial_;
};

/// Max |f| over an n-point uniform probe of [-1,1].
inline double probe_sup(const ScalarField& f, int n = 201) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        m = std::max(m, std::abs(f(x)));
    }
    return m;
}

/// sup - inf over a probe grid; used to detect constant drifts.
inline double probe_oscillation(const ScalarField& f, int n = 201) {
    double lo = f(-1.0), hi = lo;
    for (int i = 1; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        const double v = f(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

inline bool probe_is_constant(const ScalarField& f, int n = 201, double tol = 1e-12) {
    return probe_oscillation(f, n) < tol;
}

/// Largest |f' - central difference| over probe points away from breakpoints.
/// The consistency requirement on fields that declare a derivative.
inline double derivative_consistency_gap(const ScalarField& f, int n = 101) {
    if (!f.has_derivative()) throw MissingDerivative("derivative_consistency_gap");
    const double step = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = -0.999 + 1.998 * i / (n - 1);
        bool near_kink = false;
        for (double bp : f.breakpoints())
            if (std::abs(x - bp) < 1e-3) near_kink = true;
        if (near_kink) continue;
        const double fd = (f(x + step) - f(x - step)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - f.derivative(x)));
    }
    return worst;
}

}  // namespace plap
