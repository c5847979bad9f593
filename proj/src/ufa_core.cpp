#include "ufa/ufa_core.hpp"

#include <cmath>

#include "numfmt.hpp"
#include "ufa/error.hpp"

namespace ufa {

namespace {

[[noreturn]] void rethrow_at(const error& e, const std::string& where, std::size_t index, bool as_output) {
  error out(e.code(), where + std::to_string(index) + ": " + e.what());
  out.index = as_output ? e.index : std::optional<std::size_t>(index);
  out.output_index = as_output ? std::optional<std::size_t>(index) : e.output_index;
  throw out;
}

} // namespace

double inner_product(std::span<const double> x, std::span<const double> delta) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * delta[k];
  return acc;
}

theta_result compute_theta_multivariate(double f_value, std::span<const double> x, std::span<const double> delta,
                                        const activation& g, const activation& sigma) {
  if (x.empty() || x.size() != delta.size())
    fail(errc::dimension_mismatch, "input has " + std::to_string(x.size()) + " coordinates but delta has " +
                                       std::to_string(delta.size()));

  const double pre = inner_product(x, delta);
  theta_result r;
  r.hidden_value = g.eval(pre);
  if (!(std::abs(r.hidden_value) > weight_threshold))
    fail(errc::weight_undefined, "hidden activation " + g.to_string() + "(" + detail::format_real(pre) +
                                     ") = " + detail::format_real(r.hidden_value) + " vanishes");
  r.sigma_inverse_value = sigma.invert(f_value);
  r.theta = r.sigma_inverse_value / r.hidden_value;
  r.residual = std::abs(sigma.eval(r.hidden_value * r.theta) - f_value);
  return r;
}

theta_result compute_theta_scalar(double f_value, double x, double delta, const activation& g,
                                  const activation& sigma) {
  return compute_theta_multivariate(f_value, std::span<const double>(&x, 1), std::span<const double>(&delta, 1), g,
                                    sigma);
}

std::vector<theta_result> compute_theta_vector(std::span<const double> y, std::span<const double> x,
                                               std::span<const double> delta, const activation& g,
                                               std::span<const activation> sigmas) {
  if (y.empty() || y.size() != sigmas.size())
    fail(errc::dimension_mismatch, std::to_string(y.size()) + " outputs but " + std::to_string(sigmas.size()) +
                                       " output activations");
  std::vector<theta_result> out;
  out.reserve(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    try {
      out.push_back(compute_theta_multivariate(y[j], x, delta, g, sigmas[j]));
    } catch (const error& e) {
      rethrow_at(e, "output ", j, true);
    }
  }
  return out;
}

theta_function_table compute_theta_function(std::span<const double> f_values, std::span<const double> xs,
                                            std::span<const double> delta_values, const activation& g,
                                            const activation& sigma) {
  if (xs.empty() || f_values.size() != xs.size() || delta_values.size() != xs.size())
    fail(errc::dimension_mismatch, "weight-function grid lists must be non-empty and of equal length");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      fail(errc::invalid_argument, "grid not strictly increasing at index " + std::to_string(i));

  theta_function_table table;
  table.xs.assign(xs.begin(), xs.end());
  table.delta_values.assign(delta_values.begin(), delta_values.end());
  table.thetas.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    try {
      table.thetas.push_back(compute_theta_scalar(f_values[i], xs[i], delta_values[i], g, sigma).theta);
    } catch (const error& e) {
      rethrow_at(e, "grid index ", i, false);
    }
  }
  return table;
}

delta_policy delta_policy::fixed(std::vector<double> delta) {
  delta_policy p;
  p.kind = mode::fixed;
  p.shared = std::move(delta);
  return p;
}

delta_policy delta_policy::per_point(std::vector<std::vector<double>> deltas) {
  delta_policy p;
  p.kind = mode::per_point;
  p.per_anchor = std::move(deltas);
  return p;
}

delta_policy delta_policy::parse(std::string_view text) {
  if (text.empty() || text == "default") return automatic();
  if (text.starts_with("fixed:")) {
    std::vector<double> values;
    auto rest = text.substr(6);
    while (true) {
      auto comma = rest.find(',');
      auto v = detail::parse_real(rest.substr(0, comma));
      if (!v) fail(errc::parse_error, "malformed delta policy '" + std::string(text) + "'");
      values.push_back(*v);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return fixed(std::move(values));
  }
  fail(errc::parse_error, "unknown delta policy '" + std::string(text) + "' (expected default or fixed:<d1>,...)");
}

std::string delta_policy::to_string() const {
  switch (kind) {
    case mode::automatic: return "default";
    case mode::fixed: {
      std::string s = "fixed:";
      for (std::size_t k = 0; k < shared.size(); ++k) s += (k ? "," : "") + detail::format_real(shared[k]);
      return s;
    }
    case mode::per_point: return "per-point";
  }
  return "default";
}

std::vector<std::vector<double>> resolve_deltas(const delta_policy& policy,
                                                std::span<const std::vector<double>> anchors, std::size_t n,
                                                const activation& g) {
  switch (policy.kind) {
    case delta_policy::mode::fixed:
      if (policy.shared.size() != n)
        fail(errc::dimension_mismatch, "fixed delta has " + std::to_string(policy.shared.size()) +
                                           " entries, inputs have " + std::to_string(n));
      return std::vector<std::vector<double>>(anchors.size(), policy.shared);

    case delta_policy::mode::per_point:
      if (policy.per_anchor.size() != anchors.size())
        fail(errc::dimension_mismatch, "per-point delta list has " + std::to_string(policy.per_anchor.size()) +
                                           " entries for " + std::to_string(anchors.size()) + " anchors");
      for (std::size_t i = 0; i < anchors.size(); ++i)
        if (policy.per_anchor[i].size() != n) {
          error e(errc::dimension_mismatch, "delta for anchor " + std::to_string(i) + " has wrong length");
          e.index = i;
          throw e;
        }
      return policy.per_anchor;

    case delta_policy::mode::automatic: break;
  }

  double scale = 1.0;
  for (int attempt = 0;; ++attempt, scale *= 0.5) {
    const std::vector<double> delta(n, scale);
    std::optional<error> problem;
    for (std::size_t i = 0; i < anchors.size() && !problem; ++i) {
      const double pre = inner_product(anchors[i], delta);
      if (!g.domain().contains(pre)) {
        problem.emplace(errc::domain_violation, "sample " + std::to_string(i) + ": <x, delta> = " +
                                                    detail::format_real(pre) + " outside the domain of " +
                                                    g.to_string());
        problem->index = i;
      } else if (!(std::abs(g.eval(pre)) > weight_threshold)) {
        problem.emplace(errc::weight_undefined, "sample " + std::to_string(i) + ": " + g.to_string() + "(" +
                                                    detail::format_real(pre) +
                                                    ") vanishes for every tried delta scale");
        problem->index = i;
      }
    }
    if (!problem) return std::vector<std::vector<double>>(anchors.size(), delta);
    if (attempt == delta_policy::max_halvings) throw *problem;
  }
}

} // namespace ufa
