#pragma once

// Expression DSL for user-supplied Finsler norms F^2(v1..vn).
//
// Grammar:
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := '-' factor | atom ('^' rational)?
//   atom     := number | 'v' digit+ | '(' expr ')'
//             | ('sqrt'|'abs'|'pow') '(' args ')'
//   rational := integer ('/' integer)?
//
// The rational after '^' is read greedily, so "a^2/3" is the exponent 2/3;
// write "(a^2)/3" for the quotient. Integer literals are kept as exact
// rationals, decimal literals as doubles.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"

namespace finsler {

struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational reduced(long long n, long long d) {
        if (d < 0) { n = -n; d = -d; }
        long long g = std::gcd(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        return Rational{n, d};
    }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    bool operator==(const Rational&) const = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Constant, Var, Add, Sub, Neg, Mul, Div, Pow, Sqrt, Abs };

    Kind kind;
    // Constant payload: exact rational when written as an integer (or built
    // programmatically as p/q), decimal double otherwise.
    bool const_is_rational = false;
    Rational const_rat{};
    double const_dbl = 0.0;
    int var_index = 0;  // 0-based
    Rational exponent{};
    ExprPtr a, b;

    static ExprPtr rational(Rational r) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Constant;
        e->const_is_rational = true;
        e->const_rat = r;
        return e;
    }
    static ExprPtr decimal(double d) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Constant;
        e->const_dbl = d;
        return e;
    }
    static ExprPtr var(int idx0) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Var;
        e->var_index = idx0;
        return e;
    }
    static ExprPtr node(Kind k, ExprPtr x, ExprPtr y = nullptr) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->a = std::move(x);
        e->b = std::move(y);
        return e;
    }
    static ExprPtr pow(ExprPtr base, Rational r) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Pow;
        e->a = std::move(base);
        e->exponent = r;
        return e;
    }

    double constant_value() const {
        return const_is_rational ? const_rat.to_double() : const_dbl;
    }

    int depth() const {
        int d = 0;
        if (a) d = a->depth();
        if (b) d = std::max(d, b->depth());
        return d + 1;
    }
};

inline bool structurally_equal(const Expr& x, const Expr& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Expr::Kind::Constant:
            if (x.const_is_rational != y.const_is_rational) return false;
            return x.const_is_rational ? x.const_rat == y.const_rat
                                       : x.const_dbl == y.const_dbl;
        case Expr::Kind::Var:
            return x.var_index == y.var_index;
        case Expr::Kind::Pow:
            return x.exponent == y.exponent && structurally_equal(*x.a, *y.a);
        case Expr::Kind::Neg:
        case Expr::Kind::Sqrt:
        case Expr::Kind::Abs:
            return structurally_equal(*x.a, *y.a);
        default:
            return structurally_equal(*x.a, *y.a) && structurally_equal(*x.b, *y.b);
    }
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

struct Token {
    enum class Type { Number, Integer, Var, Ident, Op, End };
    Type type = Type::End;
    std::size_t pos = 0;
    double number = 0.0;       // Number
    long long integer = 0;     // Integer
    int var_index = 0;         // Var, 0-based
    std::string text;          // Ident / Op
};

class Lexer {
public:
    Lexer(const std::string& src, int dim) : src_(src), dim_(dim) {
        advance();
        next_ = tok_;
        advance();
        std::swap(tok_, next_);
    }

    const Token& peek() const { return tok_; }
    const Token& peek2() const { return next_; }

    Token take() {
        Token t = tok_;
        tok_ = next_;
        advance_into_next();
        return t;
    }

private:
    void advance_into_next() {
        std::swap(tok_, next_);
        advance();
        std::swap(tok_, next_);
    }

    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        tok_ = Token{};
        tok_.pos = pos_;
        if (pos_ >= src_.size()) return;
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            lex_number();
            return;
        }
        if (c == 'v' && pos_ + 1 < src_.size() &&
            std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            std::size_t s = ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            long long idx = std::stoll(src_.substr(s, pos_ - s));
            if (idx < 1 || idx > dim_)
                throw Error(ErrorCode::DimensionError,
                            "variable v" + std::to_string(idx) + " exceeds dimension " +
                                std::to_string(dim_) + " at position " + std::to_string(s - 1));
            tok_.type = Token::Type::Var;
            tok_.var_index = static_cast<int>(idx) - 1;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t s = pos_;
            while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            tok_.type = Token::Type::Ident;
            tok_.text = src_.substr(s, pos_ - s);
            return;
        }
        static const std::string ops = "+-*/^(),";
        if (ops.find(c) != std::string::npos) {
            tok_.type = Token::Type::Op;
            tok_.text = std::string(1, c);
            ++pos_;
            return;
        }
        throw Error(ErrorCode::SyntaxError, std::string("unexpected character '") + c +
                                                "' at position " + std::to_string(pos_));
    }

    void lex_number() {
        std::size_t s = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        bool is_int = true;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            is_int = false;
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            is_int = false;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw Error(ErrorCode::SyntaxError,
                            "malformed exponent in numeric literal at position " +
                                std::to_string(s));
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        std::string text = src_.substr(s, pos_ - s);
        if (is_int) {
            tok_.type = Token::Type::Integer;
            tok_.integer = std::stoll(text);
        } else {
            tok_.type = Token::Type::Number;
            tok_.number = std::stod(text);
        }
    }

    const std::string& src_;
    int dim_;
    std::size_t pos_ = 0;
    Token tok_;
    Token next_;
};

class Parser {
public:
    static constexpr int kMaxDepth = 64;

    Parser(const std::string& src, int dim) : lex_(src, dim) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr();
        if (lex_.peek().type != Token::Type::End)
            throw err("end of input or an operator");
        return e;
    }

private:
    struct DepthGuard {
        explicit DepthGuard(Parser& p) : p_(p) {
            if (++p_.depth_ > kMaxDepth)
                throw Error(ErrorCode::SyntaxError,
                            "expression nesting exceeds depth " + std::to_string(kMaxDepth));
        }
        ~DepthGuard() { --p_.depth_; }
        Parser& p_;
    };

    Error err(const std::string& expected) {
        const Token& t = lex_.peek();
        std::string got = t.type == Token::Type::End ? "end of input"
                                                     : "'" + describe(t) + "'";
        return Error(ErrorCode::SyntaxError, "expected " + expected + " but found " + got +
                                                 " at position " + std::to_string(t.pos));
    }

    static std::string describe(const Token& t) {
        switch (t.type) {
            case Token::Type::Integer: return std::to_string(t.integer);
            case Token::Type::Number: return "number";
            case Token::Type::Var: return "v" + std::to_string(t.var_index + 1);
            case Token::Type::Ident: return t.text;
            case Token::Type::Op: return t.text;
            default: return "";
        }
    }

    bool at_op(const char* s) const {
        return lex_.peek().type == Token::Type::Op && lex_.peek().text == s;
    }

    void expect_op(const char* s) {
        if (!at_op(s)) throw err(std::string("'") + s + "'");
        lex_.take();
    }

    ExprPtr parse_expr() {
        DepthGuard g(*this);
        ExprPtr e = parse_term();
        while (at_op("+") || at_op("-")) {
            bool plus = at_op("+");
            lex_.take();
            e = Expr::node(plus ? Expr::Kind::Add : Expr::Kind::Sub, e, parse_term());
        }
        return e;
    }

    ExprPtr parse_term() {
        DepthGuard g(*this);
        ExprPtr e = parse_factor();
        while (at_op("*") || at_op("/")) {
            bool times = at_op("*");
            lex_.take();
            e = Expr::node(times ? Expr::Kind::Mul : Expr::Kind::Div, e, parse_factor());
        }
        return e;
    }

    ExprPtr parse_factor() {
        DepthGuard g(*this);
        if (at_op("-")) {
            lex_.take();
            return Expr::node(Expr::Kind::Neg, parse_factor());
        }
        ExprPtr e = parse_atom();
        if (at_op("^")) {
            lex_.take();
            e = Expr::pow(e, parse_rational());
        }
        return e;
    }

    Rational parse_rational() {
        bool negate = false;
        if (at_op("-")) {
            lex_.take();
            negate = true;
        }
        if (lex_.peek().type != Token::Type::Integer) throw err("an integer exponent");
        long long num = lex_.take().integer;
        if (negate) num = -num;
        long long den = 1;
        // the p/q form binds the slash to the exponent, but only when an
        // integer literal follows; otherwise the slash belongs to the term
        if (at_op("/") && lex_.peek2().type == Token::Type::Integer) {
            lex_.take();
            den = lex_.take().integer;
            if (den == 0)
                throw Error(ErrorCode::SyntaxError, "zero denominator in exponent at position " +
                                                        std::to_string(lex_.peek().pos));
        }
        return Rational::reduced(num, den);
    }

    ExprPtr parse_atom() {
        DepthGuard g(*this);
        const Token& t = lex_.peek();
        switch (t.type) {
            case Token::Type::Integer: {
                long long v = lex_.take().integer;
                return Expr::rational(Rational{v, 1});
            }
            case Token::Type::Number:
                return Expr::decimal(lex_.take().number);
            case Token::Type::Var:
                return Expr::var(lex_.take().var_index);
            case Token::Type::Op:
                if (t.text == "(") {
                    lex_.take();
                    ExprPtr e = parse_expr();
                    expect_op(")");
                    return e;
                }
                throw err("a number, variable, '(' or function");
            case Token::Type::Ident: {
                std::string name = lex_.take().text;
                if (name == "sqrt" || name == "abs") {
                    expect_op("(");
                    ExprPtr arg = parse_expr();
                    expect_op(")");
                    return Expr::node(name == "sqrt" ? Expr::Kind::Sqrt : Expr::Kind::Abs, arg);
                }
                if (name == "pow") {
                    expect_op("(");
                    ExprPtr base = parse_expr();
                    expect_op(",");
                    Rational r = parse_rational();
                    expect_op(")");
                    return Expr::pow(base, r);
                }
                throw Error(ErrorCode::SyntaxError,
                            "unknown function '" + name + "' at position " +
                                std::to_string(t.pos) + "; expected sqrt, abs or pow");
            }
            default:
                throw err("a number, variable, '(' or function");
        }
    }

    Lexer lex_;
    int depth_ = 0;
};

}  // namespace detail

inline ExprPtr parse_expression(const std::string& text, int dim) {
    if (text.empty()) throw Error(ErrorCode::SyntaxError, "empty metric expression");
    return detail::Parser(text, dim).parse();
}

// ---------------------------------------------------------------------------
// Printer: fully parenthesized canonical form; parse(print(t)) is
// structurally identical to t for every parser-producible tree.

inline std::string print_expression(const Expr& e) {
    using K = Expr::Kind;
    auto rat = [](const Rational& r) {
        std::string s = std::to_string(r.num);
        if (r.den != 1) s += "/" + std::to_string(r.den);
        return s;
    };
    switch (e.kind) {
        case K::Constant: {
            if (e.const_is_rational) return rat(e.const_rat);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", e.const_dbl);
            std::string s = buf;
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
                s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
                s += ".0";  // keep the decimal-literal kind on reparse
            return s;
        }
        case K::Var: return "v" + std::to_string(e.var_index + 1);
        case K::Add: return "(" + print_expression(*e.a) + " + " + print_expression(*e.b) + ")";
        case K::Sub: return "(" + print_expression(*e.a) + " - " + print_expression(*e.b) + ")";
        case K::Mul: return "(" + print_expression(*e.a) + " * " + print_expression(*e.b) + ")";
        case K::Div: return "(" + print_expression(*e.a) + " / " + print_expression(*e.b) + ")";
        case K::Neg: return "(-" + print_expression(*e.a) + ")";
        // parenthesized so a following '/' can never merge into the exponent
        case K::Pow: return "(" + print_expression(*e.a) + "^" + rat(e.exponent) + ")";
        case K::Sqrt: return "sqrt(" + print_expression(*e.a) + ")";
        case K::Abs: return "abs(" + print_expression(*e.a) + ")";
    }
    return "";
}

// ---------------------------------------------------------------------------
// Evaluation over jet-valued arguments.

inline Jet3 eval_expression(const Expr& e, const std::vector<Jet3>& args) {
    using K = Expr::Kind;
    const int n = args.empty() ? 0 : args[0].n;
    const int order = args.empty() ? 0 : args[0].order;
    switch (e.kind) {
        case K::Constant: return Jet3::constant(n, order, e.constant_value());
        case K::Var: return args[static_cast<std::size_t>(e.var_index)];
        case K::Add: return jet_ops::add(eval_expression(*e.a, args), eval_expression(*e.b, args));
        case K::Sub: return jet_ops::sub(eval_expression(*e.a, args), eval_expression(*e.b, args));
        case K::Neg: return jet_ops::neg(eval_expression(*e.a, args));
        case K::Mul: return jet_ops::mul(eval_expression(*e.a, args), eval_expression(*e.b, args));
        case K::Div: return jet_ops::div(eval_expression(*e.a, args), eval_expression(*e.b, args));
        case K::Pow: {
            Jet3 base = eval_expression(*e.a, args);
            if (e.exponent.is_integer()) return jet_ops::powi(base, e.exponent.num);
            return jet_ops::powr(base, e.exponent.to_double());
        }
        case K::Sqrt: return jet_ops::sqrt(eval_expression(*e.a, args));
        case K::Abs: return jet_ops::abs(eval_expression(*e.a, args));
    }
    throw Error(ErrorCode::DomainError, "unreachable expression kind");
}

}  // namespace finsler
