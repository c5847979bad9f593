#include "ufa/baseline_gd.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <random>
#include <sstream>

#include "numfmt.hpp"
#include "ufa/error.hpp"

namespace ufa {

using detail::format_real;

void gd_config::validate() const {
  if (hidden_width == 0) fail(errc::invalid_argument, "hidden width must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    fail(errc::invalid_argument, "learning rate must be positive");
  if (!(target_mse >= 0.0)) fail(errc::invalid_argument, "target mse must be non-negative");
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) fail(errc::invalid_argument, "init scale must be positive");
}

std::size_t gd_model::parameter_count() const {
  return input_weights.size() + hidden_bias.size() + output_weights.size() + output_bias.size();
}

double& gd_model::parameter(std::size_t k) {
  for (auto* block : {&input_weights, &hidden_bias, &output_weights, &output_bias}) {
    if (k < block->size()) return (*block)[k];
    k -= block->size();
  }
  fail(errc::invalid_argument, "parameter index out of range");
}

double gd_model::parameter(std::size_t k) const { return const_cast<gd_model&>(*this).parameter(k); }

std::vector<double> gd_model::predict(std::span<const double> x) const {
  std::vector<double> out(output_bias);
  for (std::size_t h = 0; h < width; ++h) {
    double z = hidden_bias[h];
    for (std::size_t k = 0; k < n; ++k) z += input_weights[h * n + k] * x[k];
    const double a = hidden_activation.eval(z);
    for (std::size_t j = 0; j < m; ++j) out[j] += output_weights[j * width + h] * a;
  }
  return out;
}

gd_model init_model(std::size_t n, std::size_t m, const gd_config& config) {
  config.validate();
  gd_model model;
  model.n = n;
  model.m = m;
  model.width = config.hidden_width;
  model.hidden_activation = config.hidden;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(-config.init_scale, config.init_scale);
  auto fill = [&](std::vector<double>& v, std::size_t count) {
    v.resize(count);
    for (auto& w : v) w = dist(rng);
  };
  fill(model.input_weights, model.width * n);
  fill(model.hidden_bias, model.width);
  fill(model.output_weights, m * model.width);
  fill(model.output_bias, m);
  return model;
}

double mse(const gd_model& model, const sample_set& samples) {
  double total = 0.0;
  for (const auto& pt : samples.points()) {
    const auto yhat = model.predict(pt.x);
    for (std::size_t j = 0; j < model.m; ++j) {
      const double r = yhat[j] - pt.y[j];
      total += r * r;
    }
  }
  return total / static_cast<double>(samples.size());
}

std::vector<double> mse_gradient(const gd_model& model, const sample_set& samples) {
  const std::size_t n = model.n, m = model.m, width = model.width;
  std::vector<double> grad(model.parameter_count(), 0.0);
  double* g_w = grad.data();
  double* g_b = g_w + width * n;
  double* g_v = g_b + width;
  double* g_c = g_v + m * width;

  const double scale = 2.0 / static_cast<double>(samples.size());
  std::vector<double> z(width), a(width), r(m);
  for (const auto& pt : samples.points()) {
    for (std::size_t h = 0; h < width; ++h) {
      z[h] = model.hidden_bias[h];
      for (std::size_t k = 0; k < n; ++k) z[h] += model.input_weights[h * n + k] * pt.x[k];
      a[h] = model.hidden_activation.eval(z[h]);
    }
    for (std::size_t j = 0; j < m; ++j) {
      double yhat = model.output_bias[j];
      for (std::size_t h = 0; h < width; ++h) yhat += model.output_weights[j * width + h] * a[h];
      r[j] = scale * (yhat - pt.y[j]);
      g_c[j] += r[j];
      for (std::size_t h = 0; h < width; ++h) g_v[j * width + h] += r[j] * a[h];
    }
    for (std::size_t h = 0; h < width; ++h) {
      double back = 0.0;
      for (std::size_t j = 0; j < m; ++j) back += model.output_weights[j * width + h] * r[j];
      const double dz = back * model.hidden_activation.derivative(z[h]);
      g_b[h] += dz;
      for (std::size_t k = 0; k < n; ++k) g_w[h * n + k] += dz * pt.x[k];
    }
  }
  return grad;
}

gd_result train_gd(const sample_set& samples, const gd_config& config) {
  const auto t0 = std::chrono::steady_clock::now();
  gd_result res{init_model(samples.n(), samples.m(), config), {}};
  auto& model = res.model;
  auto& rep = res.report;
  rep.p = samples.size();
  rep.sample_fingerprint = samples.fingerprint();
  rep.initial_mse = mse(model, samples);

  double current = rep.initial_mse;
  for (std::size_t it = 0; it < config.max_iterations && current > config.target_mse; ++it) {
    const auto grad = mse_gradient(model, samples);
    bool finite = true;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      double& w = model.parameter(k);
      w -= config.learning_rate * grad[k];
      finite = finite && std::isfinite(w);
    }
    const double loss = finite ? mse(model, samples) : std::numeric_limits<double>::infinity();
    if (!std::isfinite(loss)) {
      error e(errc::numerical_divergence, "loss became non-finite at iteration " + std::to_string(it + 1) +
                                              " (learning rate " + format_real(config.learning_rate) + ")");
      e.index = it + 1;
      throw e;
    }
    if (loss > current) rep.loss_increased = true;
    rep.loss_history.push_back(loss);
    current = loss;
  }

  rep.iterations_run = rep.loss_history.size();
  rep.final_mse = current;
  rep.converged = rep.final_mse <= config.target_mse;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

double gradient_check(const gd_model& model, const sample_set& samples) {
  const auto analytic = mse_gradient(model, samples);
  gd_model probe = model;
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const double w = model.parameter(k);
    const double h = 1e-6 * std::max(1.0, std::abs(w));
    probe.parameter(k) = w + h;
    const double up = mse(probe, samples);
    const double w_up = probe.parameter(k);
    probe.parameter(k) = w - h;
    const double down = mse(probe, samples);
    const double w_down = probe.parameter(k);
    probe.parameter(k) = w;
    const double numeric = (up - down) / (w_up - w_down);
    const double denom = std::max({std::abs(analytic[k]), std::abs(numeric), 1e-4});
    worst = std::max(worst, std::abs(analytic[k] - numeric) / denom);
  }
  return worst;
}

comparison compare(const reconstruction_report& ufa, const gd_report& gd) {
  if (ufa.sample_fingerprint != gd.sample_fingerprint || ufa.p != gd.p)
    fail(errc::sample_mismatch, "reports were produced from different sample sets");
  comparison c;
  c.ufa_mse = ufa.mse();
  c.gd_mse = gd.final_mse;
  c.gd_iterations = gd.iterations_run;
  c.ufa_seconds = ufa.construction_seconds;
  c.gd_seconds = gd.wall_seconds;
  c.gd_converged = gd.converged;
  c.ufa_wins_loss = c.ufa_mse <= c.gd_mse;
  return c;
}

std::string render_text(const comparison& c) {
  std::ostringstream os;
  os << "                 closed-form     gradient descent\n";
  os << "mse              " << format_real(c.ufa_mse) << "     " << format_real(c.gd_mse) << "\n";
  os << "steps            " << c.ufa_steps << "     " << c.gd_iterations << "\n";
  os << "seconds          " << format_real(c.ufa_seconds) << "     " << format_real(c.gd_seconds) << "\n";
  os << "gd converged: " << (c.gd_converged ? "yes" : "no") << "\n";
  os << "closed-form wins on loss: " << (c.ufa_wins_loss ? "yes" : "no") << "\n";
  return os.str();
}

std::string render_kv(const comparison& c) {
  std::ostringstream os;
  os << "ufa_mse=" << format_real(c.ufa_mse) << "\n";
  os << "gd_mse=" << format_real(c.gd_mse) << "\n";
  os << "ufa_steps=" << c.ufa_steps << "\n";
  os << "gd_iterations=" << c.gd_iterations << "\n";
  os << "ufa_seconds=" << format_real(c.ufa_seconds) << "\n";
  os << "gd_seconds=" << format_real(c.gd_seconds) << "\n";
  os << "gd_converged=" << (c.gd_converged ? "true" : "false") << "\n";
  os << "ufa_wins_loss=" << (c.ufa_wins_loss ? "true" : "false") << "\n";
  return os.str();
}

} // namespace ufa
