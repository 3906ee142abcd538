#pragma once

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include "harmsurf/analytic.hpp"
#include "harmsurf/errors.hpp"

namespace harmsurf {

/// Recursive-descent parser for the analytic-expression grammar used by the
/// CLI (Weierstrass data and friends):
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := '-' base | number | 'i' | 'pi' | 'z'
///           | fn '(' expr ')' | 'sn(' expr ';' number ')' | '(' expr ')'
///   fn     := exp | log | sin | cos | sinh | cosh
///
/// Division is supported when the divisor is structurally invertible
/// (constants, powers, affine maps and products thereof); sn takes an affine
/// argument and a numeric modulus after ';'. AnalyticFn::str() emits this
/// grammar, and parse(print(f)) evaluates identically to f.
class ExprParser {
 public:
  static AnalyticFn parse(std::string_view text) {
    ExprParser p(text);
    AnalyticFn f = p.parse_expr();
    p.skip_ws();
    if (!p.done()) throw ParseError("unexpected trailing input at '" + std::string(p.rest()) + "'");
    return f;
  }

 private:
  explicit ExprParser(std::string_view text) : s_(text) {}

  std::string_view s_;
  size_t pos_ = 0;

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  char take() { return s_[pos_++]; }
  std::string_view rest() const { return s_.substr(pos_); }
  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool consume(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c, const char* where) {
    if (!consume(c))
      throw ParseError(std::string("expected '") + c + "' " + where + " near '" +
                       std::string(rest().substr(0, 12)) + "'");
  }

  AnalyticFn parse_expr() {
    AnalyticFn acc = parse_term();
    for (;;) {
      skip_ws();
      if (consume('+'))
        acc = acc + parse_term();
      else if (consume('-'))
        acc = acc - parse_term();
      else
        return acc;
    }
  }

  AnalyticFn parse_term() {
    AnalyticFn acc = parse_factor();
    for (;;) {
      skip_ws();
      if (consume('*')) {
        acc = acc * parse_factor();
      } else if (consume('/')) {
        acc = acc * invert(parse_factor());
      } else {
        return acc;
      }
    }
  }

  AnalyticFn parse_factor() {
    AnalyticFn base = parse_base();
    skip_ws();
    if (consume('^')) {
      skip_ws();
      bool paren = consume('(');
      skip_ws();
      int sign = 1;
      if (consume('-')) sign = -1;
      skip_ws();
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError("exponent must be an integer literal");
      long n = 0;
      while (!done() && std::isdigit(static_cast<unsigned char>(peek())))
        n = n * 10 + (take() - '0');
      if (paren) expect(')', "after exponent");
      if (n > 64) throw ParseError("exponent too large (|n| <= 64)");
      return pow(base, static_cast<int>(sign * n));
    }
    return base;
  }

  AnalyticFn parse_base() {
    skip_ws();
    if (consume('-')) return -parse_base();
    if (consume('(')) {
      AnalyticFn f = parse_expr();
      expect(')', "to close group");
      return f;
    }
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return AnalyticFn::constant(parse_number());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string name = parse_ident();
      if (name == "z") return AnalyticFn::z();
      if (name == "i") return AnalyticFn::constant(Cplx(0.0, 1.0));
      if (name == "pi") return AnalyticFn::constant(kPi);
      if (name == "sn" || name == "cn" || name == "dn") {
        expect('(', "after function name");
        AnalyticFn arg = parse_expr();
        expect(';', "between sn argument and modulus");
        const double k = parse_number();
        expect(')', "to close function call");
        if (!arg.as_affine())
          throw ParseError(name + " requires an affine argument a*z + b");
        if (name == "sn") return sn(arg, k);
        if (name == "cn") return cn(arg, k);
        return dn(arg, k);
      }
      expect('(', "after function name");
      AnalyticFn arg = parse_expr();
      expect(')', "to close function call");
      if (name == "exp") return exp(arg);
      if (name == "log") return log(arg);
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "sinh") return sinh(arg);
      if (name == "cosh") return cosh(arg);
      throw ParseError("unknown function '" + name + "'");
    }
    throw ParseError("unexpected input near '" + std::string(rest().substr(0, 12)) + "'");
  }

  std::string parse_ident() {
    std::string out;
    while (!done() && std::isalpha(static_cast<unsigned char>(peek()))) out += take();
    return out;
  }

  double parse_number() {
    skip_ws();
    const char* begin = s_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a number near '" +
                                       std::string(rest().substr(0, 12)) + "'");
    pos_ += static_cast<size_t>(end - begin);
    return v;
  }

  /// Structural inverse: constants, affine maps, powers, and products of
  /// those. Anything else cannot be divided by inside this grammar.
  static AnalyticFn invert(const AnalyticFn& f) {
    if (f.is_const()) {
      const Cplx c = f.const_value();
      if (c == Cplx(0.0, 0.0)) throw ParseError("division by zero constant");
      return AnalyticFn::constant(1.0 / c);
    }
    switch (f.kind()) {
      case AnalyticFn::Kind::Affine:
        return pow(f, -1);
      case AnalyticFn::Kind::Pow:
      case AnalyticFn::Kind::Exp:
      case AnalyticFn::Kind::Sin:
      case AnalyticFn::Kind::Cos:
      case AnalyticFn::Kind::Sinh:
      case AnalyticFn::Kind::Cosh:
      case AnalyticFn::Kind::Sn:
      case AnalyticFn::Kind::Cn:
      case AnalyticFn::Kind::Dn:
        return pow(f, -1);
      default:
        throw ParseError("cannot divide by this expression; rewrite with negative powers");
    }
  }
};

inline AnalyticFn parse_expression(std::string_view text) { return ExprParser::parse(text); }

}  // namespace harmsurf
