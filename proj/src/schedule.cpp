#include "niplab/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "niplab/errors.hpp"

namespace niplab {

namespace {

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::invalid_configuration, "bad number '" + std::string(s) + "' in schedule");
  }
  return v;
}

std::vector<double> parse_list(std::string_view s, char sep) {
  std::vector<double> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(parse_number(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

// Relative distance under which a time counts as sitting on a knot.
constexpr double kink_tolerance = 1e-12;

}  // namespace

Schedule Schedule::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw Error(ErrorCode::invalid_configuration, "polynomial schedule needs a coefficient");
  Schedule s;
  s.kind_ = Kind::polynomial;
  s.params_ = std::move(coeffs);
  return s;
}

Schedule Schedule::exponential(double a, double rate) {
  Schedule s;
  s.kind_ = Kind::exponential;
  s.params_ = {a, rate};
  return s;
}

Schedule Schedule::sinusoidal(double base, double amp, double freq) {
  Schedule s;
  s.kind_ = Kind::sinusoidal;
  s.params_ = {base, amp, freq};
  return s;
}

Schedule Schedule::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw Error(ErrorCode::invalid_configuration, "piecewise-linear schedule needs two knots");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first)) {
      throw Error(ErrorCode::invalid_configuration, "piecewise-linear knot times must increase");
    }
  }
  Schedule s;
  s.kind_ = Kind::piecewise_linear;
  s.knots_ = std::move(knots);
  return s;
}

Schedule Schedule::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::invalid_configuration, "schedule '" + text + "' lacks a kind prefix");
  }
  const std::string kind = text.substr(0, colon);
  const std::string_view body = std::string_view(text).substr(colon + 1);
  if (kind == "poly") return polynomial(parse_list(body, ','));
  if (kind == "exp" || kind == "sin") {
    const auto v = parse_list(body, ',');
    if (kind == "exp") {
      if (v.size() != 2) throw Error(ErrorCode::invalid_configuration, "exp schedule takes a,rate");
      return exponential(v[0], v[1]);
    }
    if (v.size() != 3) throw Error(ErrorCode::invalid_configuration, "sin schedule takes base,amp,freq");
    return sinusoidal(v[0], v[1], v[2]);
  }
  if (kind == "pwl") {
    std::vector<std::pair<double, double>> knots;
    std::string_view rest = body;
    while (true) {
      const auto pos = rest.find(';');
      const auto v = parse_list(rest.substr(0, pos), ',');
      if (v.size() != 2) throw Error(ErrorCode::invalid_configuration, "pwl knots are t,v pairs");
      knots.emplace_back(v[0], v[1]);
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    return piecewise_linear(std::move(knots));
  }
  throw Error(ErrorCode::invalid_configuration, "unknown schedule kind '" + kind + "'");
}

Schedule& Schedule::with_domain(double t0, double t1) {
  if (!(t1 > t0)) throw Error(ErrorCode::invalid_configuration, "schedule domain must have t1 > t0");
  t0_ = t0;
  t1_ = t1;
  return *this;
}

double Schedule::value(double t) const {
  switch (kind_) {
    case Kind::polynomial: {
      double acc = 0.0;
      for (auto it = params_.rbegin(); it != params_.rend(); ++it) acc = acc * t + *it;
      return acc;
    }
    case Kind::exponential:
      return params_[0] * std::exp(params_[1] * t);
    case Kind::sinusoidal:
      return params_[0] + params_[1] * std::sin(params_[2] * t);
    case Kind::piecewise_linear: {
      if (t <= knots_.front().first) return knots_.front().second;
      if (t >= knots_.back().first) return knots_.back().second;
      const auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                                       [](double x, const auto& kn) { return x < kn.first; });
      const auto lo = hi - 1;
      const double f = (t - lo->first) / (hi->first - lo->first);
      return lo->second + f * (hi->second - lo->second);
    }
  }
  return 0.0;
}

double Schedule::derivative(double t) const {
  switch (kind_) {
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t i = params_.size(); i-- > 1;) acc = acc * t + static_cast<double>(i) * params_[i];
      return acc;
    }
    case Kind::exponential:
      return params_[0] * params_[1] * std::exp(params_[1] * t);
    case Kind::sinusoidal:
      return params_[1] * params_[2] * std::cos(params_[2] * t);
    case Kind::piecewise_linear: {
      const double scale = std::max(1.0, std::abs(knots_.back().first - knots_.front().first));
      for (const auto& kn : knots_) {
        if (std::abs(t - kn.first) <= kink_tolerance * scale) {
          throw Error(ErrorCode::derivative, "piecewise-linear schedule is not differentiable at t = " +
                                                 std::to_string(kn.first));
        }
      }
      if (t < knots_.front().first || t > knots_.back().first) return 0.0;
      const auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                                       [](double x, const auto& kn) { return x < kn.first; });
      const auto lo = hi - 1;
      return (hi->second - lo->second) / (hi->first - lo->first);
    }
  }
  return 0.0;
}

double Schedule::second_derivative(double t) const {
  switch (kind_) {
    case Kind::polynomial: {
      double acc = 0.0;
      for (std::size_t i = params_.size(); i-- > 2;) acc = acc * t + static_cast<double>(i * (i - 1)) * params_[i];
      return acc;
    }
    case Kind::exponential:
      return params_[0] * params_[1] * params_[1] * std::exp(params_[1] * t);
    case Kind::sinusoidal:
      return -params_[1] * params_[2] * params_[2] * std::sin(params_[2] * t);
    case Kind::piecewise_linear:
      throw Error(ErrorCode::unsupported, "piecewise-linear schedules have no second derivative");
  }
  return 0.0;
}

bool Schedule::is_constant() const {
  switch (kind_) {
    case Kind::polynomial:
      return std::all_of(params_.begin() + 1, params_.end(), [](double c) { return c == 0.0; });
    case Kind::exponential:
      return params_[0] == 0.0 || params_[1] == 0.0;
    case Kind::sinusoidal:
      return params_[1] == 0.0 || params_[2] == 0.0;
    case Kind::piecewise_linear:
      return std::all_of(knots_.begin(), knots_.end(),
                         [&](const auto& kn) { return kn.second == knots_.front().second; });
  }
  return false;
}

bool Schedule::positive_on_domain() const {
  constexpr int samples = 1000;
  if (!(value(t0_) > 0.0) || !(value(t1_) > 0.0)) return false;
  for (int i = 1; i <= samples; ++i) {
    const double t = t0_ + (t1_ - t0_) * i / (samples + 1.0);
    if (!(value(t) > 0.0)) return false;
  }
  return true;
}

std::string Schedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto join = [&os](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  switch (kind_) {
    case Kind::polynomial:
      os << "poly:";
      join(params_);
      break;
    case Kind::exponential:
      os << "exp:";
      join(params_);
      break;
    case Kind::sinusoidal:
      os << "sin:";
      join(params_);
      break;
    case Kind::piecewise_linear:
      os << "pwl:";
      for (std::size_t i = 0; i < knots_.size(); ++i) os << (i ? ";" : "") << knots_[i].first << "," << knots_[i].second;
      break;
  }
  return os.str();
}

}  // namespace niplab
