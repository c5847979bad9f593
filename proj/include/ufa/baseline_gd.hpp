#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ufa/activation.hpp"
#include "ufa/network.hpp"
#include "ufa/samples.hpp"

namespace ufa {

struct gd_config {
  std::size_t hidden_width = 16;
  double learning_rate = 0.5;
  std::size_t max_iterations = 2000;
  double target_mse = 0.0;
  std::uint64_t seed = 42;
  double init_scale = 1.0;
  activation hidden = activation::sigmoid();

  void validate() const;
};

// Conventional shared hidden layer with biases and a linear output layer:
// y = V * act(W x + b) + c.
struct gd_model {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t width = 0;
  std::vector<double> input_weights;  // width x n, row-major
  std::vector<double> hidden_bias;    // width
  std::vector<double> output_weights; // m x width, row-major
  std::vector<double> output_bias;    // m
  activation hidden_activation = activation::sigmoid();

  std::size_t parameter_count() const;
  // Flattened order: input_weights, hidden_bias, output_weights, output_bias.
  double& parameter(std::size_t k);
  double parameter(std::size_t k) const;

  std::vector<double> predict(std::span<const double> x) const;
};

// Uniform in [-init_scale, init_scale] from a seeded mt19937_64.
gd_model init_model(std::size_t n, std::size_t m, const gd_config& config);

// (1/p) * sum_i ||yhat_i - y_i||^2
double mse(const gd_model& model, const sample_set& samples);

// Analytic gradient of mse, in parameter() order.
std::vector<double> mse_gradient(const gd_model& model, const sample_set& samples);

struct gd_report {
  std::vector<double> loss_history; // mse after each update
  double initial_mse = 0.0;
  double final_mse = 0.0;
  std::size_t iterations_run = 0;
  bool converged = false;
  bool loss_increased = false; // some update raised the loss
  double wall_seconds = 0.0;
  std::uint64_t sample_fingerprint = 0;
  std::size_t p = 0;
};

struct gd_result {
  gd_model model;
  gd_report report;
};

// Full-batch gradient descent. Throws NumericalDivergence (error::index =
// iteration) once the loss or a parameter becomes non-finite.
gd_result train_gd(const sample_set& samples, const gd_config& config);

// Max relative error between mse_gradient and central differences with
// h = 1e-6 * max(1, |w|); relative to max(|analytic|, |numeric|, 1e-4).
double gradient_check(const gd_model& model, const sample_set& samples);

struct comparison {
  double ufa_mse = 0.0; // sse / p
  double gd_mse = 0.0;
  std::size_t ufa_steps = 1;
  std::size_t gd_iterations = 0;
  double ufa_seconds = 0.0;
  double gd_seconds = 0.0;
  bool gd_converged = false;
  bool ufa_wins_loss = false; // ties count as wins
};

// Throws SampleMismatch unless both reports come from the same samples.
comparison compare(const reconstruction_report& ufa, const gd_report& gd);

std::string render_text(const comparison& c);
std::string render_kv(const comparison& c);

} // namespace ufa
