#pragma once

/// @file text.hpp
/// @brief Infix text form of expression trees.
///
/// Grammar (whitespace-insensitive):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' NUMBER            negative literal (unless followed by '^')
///              | '-' unary             Minus
///              | '+' unary             single-child Plus (template root)
///              | postfix
///     postfix := primary ('^' '2')*
///     primary := NUMBER | NAME | 'sqrt(' expr ')' | 'inv(' expr ')' | '(' expr ')'
///
/// Chains of '+' (or '*') inside one parenthesis level build a single
/// variadic node, chunked at five operands. format() parenthesises so that
/// parse(format(t)) == t for every valid tree.

#include <cctype>
#include <charconv>
#include <cmath>
#include <span>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "expression.hpp"

namespace pgp {

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t position)
        : InputError(what + " at position " + std::to_string(position)), position_(position) {}
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

// Binding strength of the text produced for a node; higher binds tighter.
enum Level { kAdditive = 1, kMultiplicative = 2, kPrefix = 3, kPostfix = 4, kAtom = 5 };

inline Level level_of(const Tree& t, std::size_t i) {
    const Node& n = t[i];
    switch (n.op) {
    case Op::Plus: return n.arity == 1 ? kPrefix : kAdditive;
    case Op::Subtract: return kAdditive;
    case Op::Times: return n.arity == 1 ? kPrefix : kMultiplicative;
    case Op::Divide: return kMultiplicative;
    case Op::Minus: return kPrefix;
    case Op::Square: return kPostfix;
    case Op::Constant: return (n.value < 0.0 || std::signbit(n.value)) ? kPrefix : kAtom;
    default: return kAtom;
    }
}

class Formatter {
public:
    Formatter(const Tree& t, std::span<const std::string> names) : t_(t), names_(names) {}

    void emit(std::size_t i, std::string& out) const {
        const Node& n = t_[i];
        switch (n.op) {
        case Op::Constant: out += format_number(n.value); return;
        case Op::Variable:
            if (n.var < names_.size()) out += names_[n.var];
            else out += "x" + std::to_string(n.var);
            return;
        case Op::Plus:
        case Op::Times:
            if (n.arity == 1) {
                out += n.op == Op::Plus ? "+(" : "*(";
                emit(i + 1, out);
                out += ')';
                return;
            }
            join(i, n.op == Op::Plus ? " + " : "*", n.op == Op::Plus ? kAdditive : kMultiplicative, out);
            return;
        case Op::Subtract: join(i, " - ", kAdditive, out); return;
        case Op::Divide: join(i, "/", kMultiplicative, out); return;
        case Op::Minus:
            out += "-(";
            emit(i + 1, out);
            out += ')';
            return;
        case Op::Sqrt:
        case Op::Inverse:
            out += n.op == Op::Sqrt ? "sqrt(" : "inv(";
            emit(i + 1, out);
            out += ')';
            return;
        case Op::Square:
            wrap(i + 1, kPostfix, out);
            out += "^2";
            return;
        }
    }

private:
    void wrap(std::size_t c, Level max_paren, std::string& out) const {
        const bool paren = level_of(t_, c) <= max_paren;
        if (paren) out += '(';
        emit(c, out);
        if (paren) out += ')';
    }
    void join(std::size_t i, const char* sep, Level max_paren, std::string& out) const {
        bool first = true;
        for (auto c : t_.children(i)) {
            if (!first) out += sep;
            first = false;
            wrap(c, max_paren, out);
        }
    }

    const Tree& t_;
    std::span<const std::string> names_;
};

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> names) : s_(text), names_(names) {}

    Tree run() {
        Tree t = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("parse error: " + msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static Tree fold(Op op, std::vector<Tree> operands) {
        if (operands.size() == 1) return std::move(operands.front());
        while (operands.size() > kMaxVariadicArity) {
            std::vector<Tree> head(std::make_move_iterator(operands.begin()),
                                   std::make_move_iterator(operands.begin() + kMaxVariadicArity));
            operands.erase(operands.begin(), operands.begin() + kMaxVariadicArity);
            operands.insert(operands.begin(), Tree::make(op, std::move(head)));
        }
        return Tree::make(op, std::move(operands));
    }

    // Shared shape of the additive and multiplicative levels.
    template <typename Next>
    Tree chain(char join_op, char binary_op, Op variadic, Op binary, Next next) {
        std::vector<Tree> run;
        run.push_back((this->*next)());
        for (;;) {
            if (accept(join_op)) {
                run.push_back((this->*next)());
            } else if (accept(binary_op)) {
                Tree lhs = fold(variadic, std::move(run));
                Tree rhs = (this->*next)();
                run.clear();
                run.push_back(Tree::make(binary, {std::move(lhs), std::move(rhs)}));
            } else {
                return fold(variadic, std::move(run));
            }
        }
    }

    Tree expr() { return chain('+', '-', Op::Plus, Op::Subtract, &Parser::term); }
    Tree term() { return chain('*', '/', Op::Times, Op::Divide, &Parser::unary); }

    Tree unary() {
        skip_ws();
        if (accept('-')) {
            if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
                const std::size_t save = pos_;
                const double v = number();
                if (!peek('^')) return Tree::constant(-v);
                pos_ = save;
            }
            return Tree::make(Op::Minus, {unary()});
        }
        if (accept('+')) return Tree::make(Op::Plus, {unary()});
        if (peek('*') && pos_ + 1 < s_.size() && s_[pos_ + 1] == '(') {
            ++pos_;
            return Tree::make(Op::Times, {unary()});
        }
        return postfix();
    }

    Tree postfix() {
        Tree t = primary();
        while (accept('^')) {
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != '2' ||
                (pos_ + 1 < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '.')))
                fail("only the exponent 2 is supported");
            ++pos_;
            t = Tree::make(Op::Square, {std::move(t)});
        }
        return t;
    }

    double number() {
        const char* first = s_.data() + pos_;
        double v = 0.0;
        auto res = std::from_chars(first, s_.data() + s_.size(), v);
        if (res.ec != std::errc{}) fail("malformed number");
        pos_ += static_cast<std::size_t>(res.ptr - first);
        return v;
    }

    Tree primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Tree::constant(number());
        if (accept('(')) {
            Tree t = expr();
            expect(')');
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string_view name = s_.substr(start, pos_ - start);
            if ((name == "sqrt" || name == "inv") && peek('(')) {
                expect('(');
                Tree arg = expr();
                expect(')');
                return Tree::make(name == "sqrt" ? Op::Sqrt : Op::Inverse, {std::move(arg)});
            }
            for (std::size_t v = 0; v < names_.size(); ++v)
                if (names_[v] == name) return Tree::variable(static_cast<std::uint32_t>(v));
            if (names_.empty() && name.size() > 1 && name[0] == 'x') {
                std::uint32_t idx = 0;
                auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
                if (res.ec == std::errc{} && res.ptr == name.data() + name.size()) return Tree::variable(idx);
            }
            pos_ = start;
            fail("unknown variable '" + std::string(name) + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    std::span<const std::string> names_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Infix rendering. Variables print as `names[i]`, or `x<i>` when no name is given.
inline std::string format(const Tree& t, std::span<const std::string> names = {}) {
    std::string out;
    detail::Formatter(t, names).emit(0, out);
    return out;
}

/// Parses infix text. With an empty `names` list, variables must be spelled `x<i>`.
inline Tree parse(std::string_view text, std::span<const std::string> names = {}) {
    return detail::Parser(text, names).run();
}

}  // namespace pgp
