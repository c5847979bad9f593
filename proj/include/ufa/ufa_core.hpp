#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ufa/activation.hpp"

namespace ufa {

// Below this magnitude the hidden activation is treated as zero and the
// output weight as undefined.
inline constexpr double weight_threshold = 1e-12;

struct theta_result {
  double theta = 0.0;
  double hidden_value = 0.0;        // g(<x, delta>)
  double sigma_inverse_value = 0.0; // sigma^-1(f(x))
  double residual = 0.0;            // |sigma(hidden_value * theta) - f(x)|, measured at construction
};

struct theta_function_table {
  std::vector<double> xs;
  std::vector<double> thetas;
  std::vector<double> delta_values;
};

theta_result compute_theta_scalar(double f_value, double x, double delta, const activation& g,
                                  const activation& sigma);

theta_result compute_theta_multivariate(double f_value, std::span<const double> x, std::span<const double> delta,
                                        const activation& g, const activation& sigma);

// One output weight per component; sigmas may differ per component. A
// failing component aborts the call and is reported via error::output_index.
std::vector<theta_result> compute_theta_vector(std::span<const double> y, std::span<const double> x,
                                               std::span<const double> delta, const activation& g,
                                               std::span<const activation> sigmas);

// Weight function sampled on a strictly increasing grid, with a per-point delta.
theta_function_table compute_theta_function(std::span<const double> f_values, std::span<const double> xs,
                                            std::span<const double> delta_values, const activation& g,
                                            const activation& sigma);

// How input weights are chosen for each anchor.
//
// automatic: all-ones, halved (at most max_halvings times) while g vanishes
//            at some anchor.
// fixed:     one vector shared by every anchor, no retry.
// per_point: one vector per anchor, no retry.
struct delta_policy {
  enum class mode { automatic, fixed, per_point };

  static constexpr int max_halvings = 8;

  mode kind = mode::automatic;
  std::vector<double> shared;
  std::vector<std::vector<double>> per_anchor;

  static delta_policy automatic() { return {}; }
  static delta_policy fixed(std::vector<double> delta);
  static delta_policy per_point(std::vector<std::vector<double>> deltas);

  // "default" | "fixed:<d1>,<d2>,..."
  static delta_policy parse(std::string_view text);
  std::string to_string() const;
};

// One delta per anchor. Throws WeightUndefined / DomainViolation (with the
// anchor index) when the automatic policy runs out of halvings.
std::vector<std::vector<double>> resolve_deltas(const delta_policy& policy,
                                                std::span<const std::vector<double>> anchors, std::size_t n,
                                                const activation& g);

double inner_product(std::span<const double> x, std::span<const double> delta);

} // namespace ufa
