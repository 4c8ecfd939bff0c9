#pragma once

// Tiny closed-form expression language used by field specs:
//   expr     := term (('+'|'-') term)*
//   term     := unary (('*'|'/') unary)*
//   unary    := '-' unary | primary
//   primary  := number | 'x' | 'abs' '(' expr ')' | 'sgn' '(' expr ')'
//             | 'pow' '(' expr ',' expr ')' | '(' expr ')'

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "plap/core.hpp"
#include "plap/errors.hpp"

namespace plap {

class Expr {
  public:
    enum class Kind { number, var_x, add, sub, mul, div, neg, abs, sgn, pow };

    static std::shared_ptr<const Expr> number(double v) {
        auto e = std::make_shared<Expr>();
        e->kind_ = Kind::number;
        e->value_ = v;
        return e;
    }

    static std::shared_ptr<const Expr> make(Kind k, std::shared_ptr<const Expr> a,
                                            std::shared_ptr<const Expr> b = nullptr) {
        auto e = std::make_shared<Expr>();
        e->kind_ = k;
        e->a_ = std::move(a);
        e->b_ = std::move(b);
        return e;
    }

    double eval(double x) const {
        switch (kind_) {
            case Kind::number: return value_;
            case Kind::var_x: return x;
            case Kind::add: return a_->eval(x) + b_->eval(x);
            case Kind::sub: return a_->eval(x) - b_->eval(x);
            case Kind::mul: return a_->eval(x) * b_->eval(x);
            case Kind::div: return a_->eval(x) / b_->eval(x);
            case Kind::neg: return -a_->eval(x);
            case Kind::abs: return std::abs(a_->eval(x));
            case Kind::sgn: return sgn(a_->eval(x));
            case Kind::pow: return std::pow(a_->eval(x), b_->eval(x));
        }
        return 0.0;
    }

    Kind kind_ = Kind::number;
    double value_ = 0.0;
    std::shared_ptr<const Expr> a_;
    std::shared_ptr<const Expr> b_;
};

using ExprPtr = std::shared_ptr<const Expr>;

namespace detail {

class ExprParser {
  public:
    explicit ExprParser(const std::string& src) : src_(src) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            throw BadInput("expression: trailing input at position " + std::to_string(pos_) +
                           " in '" + src_ + "'");
        return e;
    }

  private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        while (true) {
            if (eat('+'))
                lhs = Expr::make(Expr::Kind::add, lhs, parse_term());
            else if (eat('-'))
                lhs = Expr::make(Expr::Kind::sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        while (true) {
            if (eat('*'))
                lhs = Expr::make(Expr::Kind::mul, lhs, parse_unary());
            else if (eat('/'))
                lhs = Expr::make(Expr::Kind::div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (eat('-')) return Expr::make(Expr::Kind::neg, parse_unary());
        return parse_primary();
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw BadInput("expression: unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        if (eat('(')) {
            ExprPtr e = parse_expr();
            if (!eat(')')) throw BadInput("expression: expected ')'");
            return e;
        }
        throw BadInput(std::string("expression: unexpected character '") + c + "'");
    }

    ExprPtr parse_number() {
        std::size_t end = 0;
        double v = 0.0;
        try {
            v = std::stod(src_.substr(pos_), &end);
        } catch (const std::exception&) {
            throw BadInput("expression: bad numeric literal");
        }
        pos_ += end;
        return Expr::number(v);
    }

    ExprPtr parse_ident() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               std::isalnum(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (name == "x") return Expr::make(Expr::Kind::var_x, nullptr);
        if (name == "abs" || name == "sgn") {
            if (!eat('(')) throw BadInput("expression: expected '(' after " + name);
            ExprPtr a = parse_expr();
            if (!eat(')')) throw BadInput("expression: expected ')'");
            return Expr::make(name == "abs" ? Expr::Kind::abs : Expr::Kind::sgn, a);
        }
        if (name == "pow") {
            if (!eat('(')) throw BadInput("expression: expected '(' after pow");
            ExprPtr a = parse_expr();
            if (!eat(',')) throw BadInput("expression: expected ',' in pow");
            ExprPtr b = parse_expr();
            if (!eat(')')) throw BadInput("expression: expected ')'");
            return Expr::make(Expr::Kind::pow, a, b);
        }
        throw BadInput("expression: unknown identifier '" + name + "'");
    }

    const std::string& src_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expression(const std::string& src) { return detail::ExprParser(src).parse(); }

}  // namespace plap
