#include "spherepde/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

namespace spherepde {

namespace {

using Fn = std::function<Complex(Complex)>;

struct Parser {
    const std::string& text;
    size_t pos = 0;
    bool allow_u = true;
    bool used_u = false;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("expression error at position " + std::to_string(pos) + ": " +
                                    what + " in \"" + text + "\"");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    Fn parse_expr() {
        Fn lhs = parse_term();
        while (true) {
            if (eat('+')) {
                Fn rhs = parse_term();
                lhs = [lhs, rhs](Complex u) { return lhs(u) + rhs(u); };
            } else if (eat('-')) {
                Fn rhs = parse_term();
                lhs = [lhs, rhs](Complex u) { return lhs(u) - rhs(u); };
            } else {
                return lhs;
            }
        }
    }

    Fn parse_term() {
        Fn lhs = parse_power();
        while (true) {
            if (eat('*')) {
                Fn rhs = parse_power();
                lhs = [lhs, rhs](Complex u) { return lhs(u) * rhs(u); };
            } else if (eat('/')) {
                Fn rhs = parse_power();
                lhs = [lhs, rhs](Complex u) { return lhs(u) / rhs(u); };
            } else {
                return lhs;
            }
        }
    }

    Fn parse_power() {
        Fn base = parse_unary();
        if (!eat('^')) return base;
        skip_ws();
        bool neg = eat('-');
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("integer exponent expected after ^");
        int exp = std::stoi(text.substr(start, pos - start));
        if (neg) exp = -exp;
        return [base, exp](Complex u) {
            const Complex b = base(u);
            Complex acc(1.0, 0.0);
            for (int k = 0; k < std::abs(exp); ++k) acc *= b;
            return exp >= 0 ? acc : Complex(1.0, 0.0) / acc;
        };
    }

    Fn parse_unary() {
        if (eat('-')) {
            Fn inner = parse_unary();
            return [inner](Complex u) { return -inner(u); };
        }
        return parse_primary();
    }

    Fn parse_primary() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of expression");
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            Fn inner = parse_expr();
            if (!eat(')')) fail("missing )");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        fail("unexpected character");
    }

    Fn parse_number() {
        size_t end = pos;
        auto is_num = [&](size_t i) {
            const char ch = text[i];
            if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return true;
            if ((ch == 'e' || ch == 'E') && i + 1 < text.size()) {
                const char nxt = text[i + 1];
                return std::isdigit(static_cast<unsigned char>(nxt)) || nxt == '+' || nxt == '-';
            }
            if ((ch == '+' || ch == '-') && i > pos && (text[i - 1] == 'e' || text[i - 1] == 'E')) {
                return true;
            }
            return false;
        };
        while (end < text.size() && is_num(end)) ++end;
        const double value = std::stod(text.substr(pos, end - pos));
        pos = end;
        if (pos < text.size() && text[pos] == 'i') {
            ++pos;
            return [value](Complex) { return Complex(0.0, value); };
        }
        return [value](Complex) { return Complex(value, 0.0); };
    }

    Fn parse_ident() {
        size_t end = pos;
        while (end < text.size() && std::isalpha(static_cast<unsigned char>(text[end]))) ++end;
        const std::string name = text.substr(pos, end - pos);
        pos = end;
        if (name == "u") {
            if (!allow_u) fail("u is not allowed in a constant expression");
            used_u = true;
            return [](Complex u) { return u; };
        }
        if (name == "i") return [](Complex) { return Complex(0.0, 1.0); };
        if (name == "abs" || name == "conj" || name == "re" || name == "real" || name == "im" ||
            name == "imag") {
            if (!eat('(')) fail(name + " needs parentheses");
            Fn inner = parse_expr();
            if (!eat(')')) fail("missing )");
            if (name == "abs") return [inner](Complex u) { return Complex(std::abs(inner(u)), 0.0); };
            if (name == "conj") return [inner](Complex u) { return std::conj(inner(u)); };
            if (name == "re" || name == "real") {
                return [inner](Complex u) { return Complex(inner(u).real(), 0.0); };
            }
            return [inner](Complex u) { return Complex(inner(u).imag(), 0.0); };
        }
        fail("unknown identifier '" + name + "'");
    }
};

}  // namespace

PointwiseNonlinearity parse_nonlinearity(const std::string& text) {
    Parser parser(text);
    Fn fn = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    return fn;
}

Complex parse_complex_constant(const std::string& text) {
    Parser parser(text);
    parser.allow_u = false;
    Fn fn = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    return fn(Complex(0.0, 0.0));
}

}  // namespace spherepde
