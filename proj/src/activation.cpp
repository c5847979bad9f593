#include "ufa/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numfmt.hpp"
#include "ufa/error.hpp"

namespace ufa {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double zero_threshold = 1e-12;

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::pair<double, double> parse_pair(std::string_view text, std::string_view what) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos)
    fail(errc::parse_error, "expected '<a>,<b>' in " + std::string(what) + ": '" + std::string(text) + "'");
  auto a = detail::parse_real(text.substr(0, comma));
  auto b = detail::parse_real(text.substr(comma + 1));
  if (!a || !b)
    fail(errc::parse_error, "malformed number in " + std::string(what) + ": '" + std::string(text) + "'");
  return {*a, *b};
}

} // namespace

interval::interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) // also rejects NaN
    fail(errc::invalid_argument,
         "degenerate interval [" + detail::format_real(lo) + ", " + detail::format_real(hi) + "]");
}

bool interval::finite() const { return std::isfinite(lo) && std::isfinite(hi); }

bool interval::contains(double x, double slack) const { return x >= lo - slack && x <= hi + slack; }

bool interval::contains(const interval& other, double slack) const {
  return contains(other.lo, slack) && contains(other.hi, slack);
}

bool value_range::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

bool value_range::admits(double y, double margin) const {
  if (!std::isfinite(y)) return false;
  const bool above = lo_open ? (std::isinf(lo) || y - lo > margin) : y >= lo;
  const bool below = hi_open ? (std::isinf(hi) || hi - y > margin) : y <= hi;
  return above && below;
}

activation::activation(activation_kind kind, double p0, double p1, std::shared_ptr<const activation> base)
    : kind_(kind), p0_(p0), p1_(p1), base_(std::move(base)), domain_(-inf, inf) {
  refresh_range();
}

activation activation::sigmoid() { return {activation_kind::sigmoid, 0, 0, nullptr}; }
activation activation::tanh() { return {activation_kind::tanh, 0, 0, nullptr}; }
activation activation::identity() { return {activation_kind::identity, 0, 0, nullptr}; }
activation activation::exp() { return {activation_kind::exp, 0, 0, nullptr}; }
activation activation::softplus() { return {activation_kind::softplus, 0, 0, nullptr}; }

activation activation::affine(double slope, double offset) {
  if (!std::isfinite(slope) || !std::isfinite(offset))
    fail(errc::invalid_argument, "affine parameters must be finite");
  return {activation_kind::affine, slope, offset, nullptr};
}

activation activation::scaled(double c, double d, const activation& base) {
  if (!std::isfinite(c) || !std::isfinite(d))
    fail(errc::invalid_argument, "scale parameters must be finite");
  // The wrapper owns the domain and the inverse strategy; the stored base is canonical.
  auto stripped = std::make_shared<activation>(base);
  stripped->domain_ = interval(-inf, inf);
  stripped->strategy_ = inverse_strategy::analytic;
  stripped->refresh_range();
  activation out{activation_kind::scaled, c, d, std::move(stripped)};
  if (base.domain_.lo != -inf || base.domain_.hi != inf) out = out.with_domain(base.domain_);
  return out;
}

activation activation::with_domain(const interval& domain) const {
  activation out = *this;
  out.domain_ = domain;
  out.refresh_range();
  return out;
}

activation activation::with_inverse(inverse_strategy strategy) const {
  activation out = *this;
  out.strategy_ = strategy;
  return out;
}

activation activation::parse(std::string_view text) {
  text = trim(text);
  if (text.starts_with("bisect:"))
    return parse(text.substr(7)).with_inverse(inverse_strategy::bisection);

  // Domain suffix binds to the whole expression.
  if (auto at = text.rfind('@'); at != std::string_view::npos) {
    auto [lo, hi] = parse_pair(text.substr(at + 1), "domain suffix");
    if (!(lo < hi)) fail(errc::parse_error, "empty domain in '" + std::string(text) + "'");
    return parse(text.substr(0, at)).with_domain(interval(lo, hi));
  }

  if (text == "sigmoid") return sigmoid();
  if (text == "tanh") return tanh();
  if (text == "identity") return identity();
  if (text == "exp") return exp();
  if (text == "softplus") return softplus();
  if (text.starts_with("affine:")) {
    auto [a, b] = parse_pair(text.substr(7), "affine");
    return affine(a, b);
  }
  if (text.starts_with("scale:")) {
    auto rest = text.substr(6);
    auto colon = rest.find(':');
    if (colon == std::string_view::npos)
      fail(errc::parse_error, "expected 'scale:<c>,<d>:<base>', got '" + std::string(text) + "'");
    auto [c, d] = parse_pair(rest.substr(0, colon), "scale");
    return scaled(c, d, parse(rest.substr(colon + 1)));
  }
  fail(errc::parse_error, "unknown activation '" + std::string(text) + "'");
}

std::string activation::to_string() const {
  std::string core;
  switch (kind_) {
    case activation_kind::sigmoid: core = "sigmoid"; break;
    case activation_kind::tanh: core = "tanh"; break;
    case activation_kind::identity: core = "identity"; break;
    case activation_kind::exp: core = "exp"; break;
    case activation_kind::softplus: core = "softplus"; break;
    case activation_kind::affine:
      core = "affine:" + detail::format_real(p0_) + "," + detail::format_real(p1_);
      break;
    case activation_kind::scaled:
      core = "scale:" + detail::format_real(p0_) + "," + detail::format_real(p1_) + ":" + base_->to_string();
      break;
  }
  if (domain_.lo != -inf || domain_.hi != inf)
    core += "@" + detail::format_real(domain_.lo) + "," + detail::format_real(domain_.hi);
  if (strategy_ == inverse_strategy::bisection) core = "bisect:" + core;
  return core;
}

bool activation::monotone() const {
  switch (kind_) {
    case activation_kind::affine: return p0_ != 0.0;
    case activation_kind::scaled: return p0_ != 0.0 && base_->monotone();
    default: return true;
  }
}

bool activation::increasing() const {
  switch (kind_) {
    case activation_kind::affine: return p0_ > 0.0;
    case activation_kind::scaled: return (p0_ > 0.0) == base_->increasing();
    default: return true;
  }
}

void activation::refresh_range() {
  if (!monotone()) {
    const double c = raw(0.0);
    range_ = {c, c, false, false};
    return;
  }
  const bool incr = increasing();
  const double at_lo = raw(domain_.lo);
  const double at_hi = raw(domain_.hi);
  const bool lo_open = std::isinf(domain_.lo);
  const bool hi_open = std::isinf(domain_.hi);
  if (incr)
    range_ = {at_lo, at_hi, lo_open, hi_open};
  else
    range_ = {at_hi, at_lo, hi_open, lo_open};
}

double activation::raw(double x) const {
  switch (kind_) {
    case activation_kind::sigmoid: return stable_sigmoid(x);
    case activation_kind::tanh: return std::tanh(x);
    case activation_kind::identity: return x;
    case activation_kind::affine: return p0_ == 0.0 ? p1_ : p0_ * x + p1_;
    case activation_kind::exp: return std::exp(x);
    case activation_kind::softplus: return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case activation_kind::scaled: return p0_ == 0.0 ? p1_ : p0_ * base_->raw(x) + p1_;
  }
  return 0.0;
}

double activation::raw_derivative(double x) const {
  switch (kind_) {
    case activation_kind::sigmoid: {
      const double s = stable_sigmoid(x);
      return s * (1.0 - s);
    }
    case activation_kind::tanh: {
      const double c = std::cosh(x);
      return 1.0 / (c * c);
    }
    case activation_kind::identity: return 1.0;
    case activation_kind::affine: return p0_;
    case activation_kind::exp: return std::exp(x);
    case activation_kind::softplus: return stable_sigmoid(x);
    case activation_kind::scaled: return p0_ * base_->raw_derivative(x);
  }
  return 0.0;
}

double activation::raw_inverse(double y) const {
  switch (kind_) {
    case activation_kind::sigmoid: return std::log(y) - std::log1p(-y);
    case activation_kind::tanh: return std::atanh(y);
    case activation_kind::identity: return y;
    case activation_kind::affine: return (y - p1_) / p0_;
    case activation_kind::exp: return std::log(y);
    case activation_kind::softplus: return y > 30.0 ? y + std::log(-std::expm1(-y)) : std::log(std::expm1(y));
    case activation_kind::scaled: return base_->raw_inverse((y - p1_) / p0_);
  }
  return 0.0;
}

double activation::bisect_inverse(double y) const {
  const bool incr = increasing();
  // Oriented so that h is increasing in x.
  auto h = [&](double x) { return incr ? raw(x) - y : y - raw(x); };

  double a = domain_.lo;
  double b = domain_.hi;
  if (std::isinf(a)) {
    a = std::min(-1.0, std::isfinite(b) ? b - 1.0 : -1.0);
    for (int i = 0; i < 2100 && std::isfinite(a) && h(a) > 0.0; ++i) a *= 2.0;
  }
  if (std::isinf(b)) {
    b = std::max(1.0, std::isfinite(a) ? a + 1.0 : 1.0);
    for (int i = 0; i < 2100 && std::isfinite(b) && h(b) < 0.0; ++i) b *= 2.0;
  }
  if (!std::isfinite(a) || !std::isfinite(b))
    fail(errc::range_violation, "could not bracket inverse of " + to_string() + " at " + detail::format_real(y));

  const double tol = 1e-14 * std::max(1.0, b - a);
  while (b - a > tol) {
    const double mid = a + 0.5 * (b - a);
    if (mid <= a || mid >= b) break;
    const double v = h(mid);
    if (v == 0.0) return mid;
    if (v < 0.0)
      a = mid;
    else
      b = mid;
  }
  return a + 0.5 * (b - a);
}

void activation::check_domain(double x) const {
  if (!domain_.contains(x))
    fail(errc::domain_violation, to_string() + " evaluated at " + detail::format_real(x) + " outside [" +
                                     detail::format_real(domain_.lo) + ", " + detail::format_real(domain_.hi) + "]");
}

double activation::eval(double x) const {
  check_domain(x);
  return raw(std::clamp(x, domain_.lo, domain_.hi));
}

double activation::derivative(double x) const {
  check_domain(x);
  return raw_derivative(std::clamp(x, domain_.lo, domain_.hi));
}

double activation::invert(double y) const {
  if (!monotone()) fail(errc::not_invertible, to_string() + " is not strictly monotone");
  if (!range_.admits(y))
    fail(errc::range_violation, "value " + detail::format_real(y) + " outside the range of " + to_string() + " (" +
                                    (range_.lo_open ? "(" : "[") + detail::format_real(range_.lo) + ", " +
                                    detail::format_real(range_.hi) + (range_.hi_open ? ")" : "]") + ")");
  const double x = strategy_ == inverse_strategy::analytic ? raw_inverse(y) : bisect_inverse(y);
  return std::clamp(x, domain_.lo, domain_.hi);
}

const char* property_name(certified_property p) noexcept {
  switch (p) {
    case certified_property::derivative_nonvanishing: return "derivative-nonvanishing";
    case certified_property::value_nonvanishing: return "value-nonvanishing";
    case certified_property::monotone: return "monotone";
  }
  return "unknown";
}

namespace {

template <class Fn>
certification_report grid_scan(const activation& f, const interval& where, std::size_t grid, certified_property prop,
                               Fn&& sample) {
  if (grid < 2) fail(errc::invalid_argument, "certification grid needs at least 2 points");
  if (!where.finite()) fail(errc::invalid_argument, "certification interval must be finite");
  if (!f.domain().contains(where))
    fail(errc::invalid_argument, "certification interval leaves the domain of " + f.to_string());

  certification_report rep;
  rep.grid_size = grid;
  rep.property = prop;
  rep.passed = true;
  double best = inf;
  int sign = 0;
  const double step = where.width() / static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = i + 1 == grid ? where.hi : where.lo + static_cast<double>(i) * step;
    const double v = sample(x);
    const int s = (v > 0.0) - (v < 0.0);
    if (!(std::abs(v) > zero_threshold) || (sign != 0 && s != sign)) rep.passed = false;
    if (sign == 0) sign = s;
    if (std::abs(v) < best || i == 0) {
      best = std::abs(v);
      rep.worst_point = x;
      rep.worst_value = v;
    }
  }
  return rep;
}

} // namespace

certification_report check_invertible(const activation& f, const interval& where, std::size_t grid) {
  return grid_scan(f, where, grid, certified_property::derivative_nonvanishing,
                   [&](double x) { return f.derivative(x); });
}

certification_report check_nonvanishing(const activation& f, const interval& where, std::size_t grid) {
  return grid_scan(f, where, grid, certified_property::value_nonvanishing, [&](double x) { return f.eval(x); });
}

} // namespace ufa
