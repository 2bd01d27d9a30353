#pragma once

// Recursive-descent parser for parameter expressions: rational literals,
// symbols, + - * / ^ and parentheses.  Used for kinematic table entries,
// masses, --set bindings, and round-tripping serialized field elements; the
// renders produced by ParamPoly/ParamField parse back to equal values.

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "paramfield.hpp"

namespace twistpf {

class ExprError : public std::runtime_error {
  public:
    ExprError(std::size_t pos, const std::string& msg)
        : std::runtime_error("column " + std::to_string(pos + 1) + ": " + msg), position(pos) {}
    std::size_t position;
};

namespace detail {

class ExprParser {
  public:
    explicit ExprParser(const std::string& src) : s_(src) {}

    ParamField parse() {
        ParamField v = expression();
        skip_ws();
        if (pos_ != s_.size()) throw ExprError(pos_, "unexpected trailing input");
        return v;
    }

  private:
    ParamField expression() {
        skip_ws();
        bool neg = false;
        while (peek() == '+' || peek() == '-') {
            if (get() == '-') neg = !neg;
            skip_ws();
        }
        ParamField v = term();
        if (neg) v = -v;
        while (true) {
            skip_ws();
            char c = peek();
            if (c == '+' || c == '-') {
                get();
                ParamField rhs = term();
                v = (c == '+') ? v + rhs : v - rhs;
            } else {
                return v;
            }
        }
    }

    ParamField term() {
        ParamField v = factor();
        while (true) {
            skip_ws();
            char c = peek();
            if (c == '*' || c == '/') {
                get();
                ParamField rhs = factor();
                if (c == '/') {
                    if (rhs.is_zero()) throw ExprError(pos_, "division by zero");
                    v = v / rhs;
                } else {
                    v = v * rhs;
                }
            } else {
                return v;
            }
        }
    }

    ParamField factor() {
        skip_ws();
        if (peek() == '-') {
            get();
            return -factor();
        }
        ParamField base = atom();
        skip_ws();
        if (peek() == '^') {
            get();
            skip_ws();
            bool neg = false;
            if (peek() == '-') {
                get();
                neg = true;
            }
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                throw ExprError(pos_, "expected integer exponent after '^'");
            long e = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                e = e * 10 + (get() - '0');
                if (e > 1000000) throw ExprError(pos_, "exponent too large");
            }
            if (neg && base.is_zero()) throw ExprError(pos_, "zero to a negative power");
            return base.pow(neg ? -e : e);
        }
        return base;
    }

    ParamField atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            get();
            ParamField v = expression();
            skip_ws();
            if (peek() != ')') throw ExprError(pos_, "expected ')'");
            get();
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string digits;
            while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(get());
            return ParamField(rat_parse(digits));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                name.push_back(get());
            return ParamField::variable(sym(name));
        }
        if (c == '\0') throw ExprError(pos_, "unexpected end of expression");
        throw ExprError(pos_, std::string("unexpected character '") + c + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline ParamField parse_field(const std::string& src) { return detail::ExprParser(src).parse(); }

// Parse an expression that must be a polynomial (used for operator
// coefficients in certificates).
inline ParamPoly parse_poly(const std::string& src) {
    ParamField f = parse_field(src);
    if (!f.is_polynomial()) throw std::invalid_argument("expected polynomial, got fraction: " + src);
    return f.num();
}

}  // namespace twistpf
