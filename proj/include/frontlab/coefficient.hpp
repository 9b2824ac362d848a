#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/errors.hpp"

namespace frontlab {

/// One separable harmonic amp * cos(2*pi*k_t*t/omega + phase_t)
///                        * cos(2*pi*k_x*x/L + phase_x).
/// A factor with k = 0 and phase = 0 is the constant 1.
struct Harmonic {
  double amp = 0.0;
  int k_t = 0;
  double phase_t = 0.0;
  int k_x = 0;
  double phase_x = 0.0;
};

/// A space-time periodic coefficient as a finite trigonometric sum. Periodic
/// in t with period omega and in x with period L by construction; the periods
/// are owned by the enclosing medium and passed at evaluation time.
class Coefficient {
 public:
  Coefficient() = default;
  explicit Coefficient(double constant) : constant_(constant) {}
  Coefficient(double constant, std::vector<Harmonic> harmonics)
      : constant_(constant), harmonics_(std::move(harmonics)) {}

  double constant_term() const { return constant_; }
  const std::vector<Harmonic>& harmonics() const { return harmonics_; }
  bool is_constant() const { return harmonics_.empty(); }

  /// Evaluates at (t, x). Arguments are reduced with fmod before the phase is
  /// formed, so shifting t by omega or x by L reproduces the value exactly
  /// whenever the shifted input is exact in floating point.
  double eval(double t, double x, double omega, double L) const {
    double v = constant_;
    if (harmonics_.empty()) return v;
    const double tf = reduced(t, omega);
    const double xf = reduced(x, L);
    for (const Harmonic& h : harmonics_) {
      double factor = h.amp;
      if (h.k_t != 0 || h.phase_t != 0.0)
        factor *= std::cos(2.0 * std::numbers::pi * h.k_t * tf + h.phase_t);
      if (h.k_x != 0 || h.phase_x != 0.0)
        factor *= std::cos(2.0 * std::numbers::pi * h.k_x * xf + h.phase_x);
      v += factor;
    }
    return v;
  }

  /// Interval bounds: constant +- sum |amp|. Conservative; sharp for a single
  /// harmonic with nonzero frequencies in both factors.
  double lower_bound() const {
    double b = constant_;
    for (const Harmonic& h : harmonics_) b -= std::fabs(h.amp);
    return b;
  }
  double upper_bound() const {
    double b = constant_;
    for (const Harmonic& h : harmonics_) b += std::fabs(h.amp);
    return b;
  }

  /// (kappa1, kappa2) with kappa1 > 0, or nullopt when the lower bound is not
  /// strictly positive.
  std::optional<std::pair<double, double>> positive_bounds() const {
    const double lo = lower_bound();
    if (lo <= 0.0) return std::nullopt;
    return std::make_pair(lo, upper_bound());
  }

 private:
  static double reduced(double s, double period) {
    double r = std::fmod(s, period);
    if (r < 0.0) r += period;
    return r / period;
  }

  double constant_ = 0.0;
  std::vector<Harmonic> harmonics_;
};

namespace detail {

class CoeffLexer {
 public:
  explicit CoeffLexer(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  bool consume_word(const char* w) {
    skip_ws();
    std::size_t n = std::string(w).size();
    if (text_.compare(pos_, n, w) == 0) {
      pos_ += n;
      return true;
    }
    return false;
  }
  double number() {
    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
  std::size_t pos() const { return pos_; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("coefficient expression error at position " +
                      std::to_string(pos_) + ": " + msg + " in \"" + text_ + "\"");
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the coefficient grammar
///   const ( ('+'|'-') amp '*cos(' k 't' [('+'|'-') phase] ')'
///                     ['*cos(' k 'x' [('+'|'-') phase] ')'] )*
/// where k is an integer multiple of the base frequency and either factor may
/// be omitted. Examples: "1", "1 + 0.5*cos(1x)", "1 + 0.5*cos(1t)*cos(2x)".
inline Coefficient parse_coefficient(const std::string& text) {
  detail::CoeffLexer lex(text);
  if (lex.done()) lex.fail("empty expression");
  double constant = lex.number();
  std::vector<Harmonic> harmonics;
  while (!lex.done()) {
    double sign = 1.0;
    if (lex.consume('+')) {
    } else if (lex.consume('-')) {
      sign = -1.0;
    } else {
      lex.fail("expected '+' or '-' between terms");
    }
    Harmonic h;
    h.amp = sign * lex.number();
    lex.expect('*');
    bool saw_t = false, saw_x = false;
    auto parse_factor = [&] {
      if (!lex.consume_word("cos(")) lex.fail("expected 'cos('");
      double k = lex.number();
      if (k != std::floor(k))
        lex.fail("non-integer harmonic index " + std::to_string(k));
      char var = lex.peek();
      if (var == 't') {
        if (saw_t) lex.fail("duplicate t factor");
        lex.consume('t');
        h.k_t = static_cast<int>(k);
        saw_t = true;
      } else if (var == 'x') {
        if (saw_x) lex.fail("duplicate x factor");
        lex.consume('x');
        h.k_x = static_cast<int>(k);
        saw_x = true;
      } else {
        lex.fail("expected 't' or 'x' after the harmonic index");
      }
      double phase = 0.0;
      if (lex.consume('+'))
        phase = lex.number();
      else if (lex.consume('-'))
        phase = -lex.number();
      lex.expect(')');
      if (var == 't')
        h.phase_t = phase;
      else
        h.phase_x = phase;
    };
    parse_factor();
    if (lex.consume('*')) parse_factor();
    harmonics.push_back(h);
  }
  return Coefficient(constant, std::move(harmonics));
}

/// Serializes back to the grammar; parse(serialize(c)) evaluates identically.
inline std::string serialize_coefficient(const Coefficient& c) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out = num(c.constant_term());
  for (const Harmonic& h : c.harmonics()) {
    out += (h.amp < 0.0 ? " - " : " + ") + num(std::fabs(h.amp));
    auto factor = [&](int k, double phase, char var) {
      out += "*cos(" + std::to_string(k) + var;
      if (phase != 0.0) out += (phase < 0.0 ? " - " : " + ") + num(std::fabs(phase));
      out += ")";
    };
    bool have_t = h.k_t != 0 || h.phase_t != 0.0;
    bool have_x = h.k_x != 0 || h.phase_x != 0.0;
    if (!have_t && !have_x) have_x = true;  // keep a factor so the term parses
    if (have_t) factor(h.k_t, h.phase_t, 't');
    if (have_x) factor(h.k_x, h.phase_x, 'x');
  }
  return out;
}

}  // namespace frontlab
