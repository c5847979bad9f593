#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace ufa {

// Closed interval with lo < hi. Either end may be infinite.
struct interval {
  double lo;
  double hi;

  interval(double lo_, double hi_);

  double width() const { return hi - lo; }
  bool finite() const;
  bool contains(double x, double slack = 1e-12) const;
  bool contains(const interval& other, double slack = 1e-12) const;
};

// Image of an activation's domain. Ends reached only asymptotically are open.
// lo == hi is allowed here (constant functions).
struct value_range {
  double lo;
  double hi;
  bool lo_open;
  bool hi_open;

  bool bounded() const;
  // Strict interiority with `margin` past every open end; closed ends are inclusive.
  bool admits(double y, double margin = 1e-15) const;
};

enum class activation_kind { sigmoid, tanh, identity, affine, exp, softplus, scaled };
enum class inverse_strategy { analytic, bisection };

// Immutable description of a scalar activation on an interval domain.
//
// Text form: sigmoid | tanh | identity | exp | softplus | affine:<a>,<b> |
// scale:<c>,<d>:<base>, optionally prefixed by `bisect:` to force the
// numerical inverse and suffixed by `@<lo>,<hi>` to restrict the domain.
class activation {
public:
  static activation sigmoid();
  static activation tanh();
  static activation identity();
  static activation affine(double slope, double offset);
  static activation exp();
  static activation softplus();
  // c * base(x) + d
  static activation scaled(double c, double d, const activation& base);

  static activation parse(std::string_view text);

  activation with_domain(const interval& domain) const;
  activation with_inverse(inverse_strategy strategy) const;

  std::string to_string() const;
  activation_kind kind() const { return kind_; }
  const interval& domain() const { return domain_; }
  const value_range& range() const { return range_; }
  inverse_strategy strategy() const { return strategy_; }
  // Strictly monotone by construction (every kind except zero-slope variants).
  bool monotone() const;

  double eval(double x) const;
  double derivative(double x) const;
  double invert(double y) const;

  friend bool operator==(const activation& a, const activation& b) { return a.to_string() == b.to_string(); }

private:
  activation(activation_kind kind, double p0, double p1, std::shared_ptr<const activation> base);

  bool increasing() const;
  double raw(double x) const;
  double raw_derivative(double x) const;
  double raw_inverse(double y) const;
  double bisect_inverse(double y) const;
  void check_domain(double x) const;
  void refresh_range();

  activation_kind kind_;
  double p0_ = 0.0;
  double p1_ = 0.0;
  std::shared_ptr<const activation> base_;
  interval domain_;
  value_range range_{};
  inverse_strategy strategy_ = inverse_strategy::analytic;
};

enum class certified_property { derivative_nonvanishing, value_nonvanishing, monotone };

struct certification_report {
  bool passed = false;
  std::size_t grid_size = 0;
  double worst_point = 0.0;
  double worst_value = 0.0;
  certified_property property = certified_property::derivative_nonvanishing;
};

const char* property_name(certified_property p) noexcept;

inline constexpr std::size_t default_certification_grid = 1001;

// Grid heuristics, not proofs: the derivative (resp. the value) is sampled on
// `grid` uniformly spaced points of `where`.
certification_report check_invertible(const activation& f, const interval& where, std::size_t grid);
certification_report check_nonvanishing(const activation& f, const interval& where, std::size_t grid);

inline double eval_activation(const activation& f, double x) { return f.eval(x); }
inline double eval_derivative(const activation& f, double x) { return f.derivative(x); }
inline double invert_activation(const activation& f, double y) { return f.invert(y); }

} // namespace ufa
