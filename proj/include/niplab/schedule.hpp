#pragma once

#include <string>
#include <utility>
#include <vector>

namespace niplab {

/// Scalar function of time with exact first and (where defined) second
/// derivatives.
class Schedule {
 public:
  enum class Kind { polynomial, exponential, sinusoidal, piecewise_linear };

  /// c0 + c1 t + c2 t^2 + ...
  static Schedule polynomial(std::vector<double> coeffs);
  /// a exp(rate t)
  static Schedule exponential(double a, double rate);
  /// base + amp sin(freq t)
  static Schedule sinusoidal(double base, double amp, double freq);
  /// Linear interpolation through knots with strictly increasing times;
  /// constant continuation outside the knot range.
  static Schedule piecewise_linear(std::vector<std::pair<double, double>> knots);
  static Schedule constant(double value) { return polynomial({value}); }

  /// Parses poly:c0,c1,...  exp:a,rate  sin:base,amp,freq  pwl:t0,v0;t1,v1;...
  static Schedule parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  Schedule& with_domain(double t0, double t1);

  double value(double t) const;
  /// Throws a derivative error at a piecewise-linear kink.
  double derivative(double t) const;
  /// Throws unsupported for piecewise-linear schedules.
  double second_derivative(double t) const;

  bool is_constant() const;
  /// g(t) > 0 at 1000 interior samples and both endpoints of the domain.
  bool positive_on_domain() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::polynomial;
  std::vector<double> params_;
  std::vector<std::pair<double, double>> knots_;
  double t0_ = 0.0;
  double t1_ = 1.0;
};

}  // namespace niplab
