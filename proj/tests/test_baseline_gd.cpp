#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "ufa/baseline_gd.hpp"
#include "ufa/dataio.hpp"
#include "ufa/error.hpp"
#include "ufa/network.hpp"

using namespace ufa;

namespace {

error catch_error(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e;
  }
  FAIL("expected a ufa::error");
  return error(errc::invalid_argument, "");
}

sample_set sine_task(std::size_t per_axis = 101) {
  return sample_builtin(builtin_target::get(builtin_id::sine_bump), per_axis, 1.0);
}

// Loss recomputed from the raw parameter arrays with the series sigmoid.
double mse_oracle(const gd_model& md, const sample_set& s) {
  double total = 0.0;
  for (const auto& pt : s.points()) {
    std::vector<double> h(md.width);
    for (std::size_t k = 0; k < md.width; ++k) {
      double z = md.hidden_bias[k];
      for (std::size_t i = 0; i < md.n; ++i) z += md.input_weights[k * md.n + i] * pt.x[i];
      h[k] = oracle::sigmoid_ref(z);
    }
    for (std::size_t j = 0; j < md.m; ++j) {
      double out = md.output_bias[j];
      for (std::size_t k = 0; k < md.width; ++k) out += md.output_weights[j * md.width + k] * h[k];
      total += (out - pt.y[j]) * (out - pt.y[j]);
    }
  }
  return total / static_cast<double>(s.size());
}

// Central differences on the oracle loss, relative error against mse_gradient.
double fd_oracle_error(const gd_model& md, const sample_set& s) {
  const auto g = mse_gradient(md, s);
  gd_model probe = md;
  double worst = 0.0;
  for (std::size_t k = 0; k < md.parameter_count(); ++k) {
    const double w = md.parameter(k);
    const double h = 1e-6 * std::max(1.0, std::abs(w));
    probe.parameter(k) = w + h;
    const double up = mse_oracle(probe, s);
    probe.parameter(k) = w - h;
    const double down = mse_oracle(probe, s);
    probe.parameter(k) = w;
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(g[k] - fd) / std::max({std::abs(g[k]), std::abs(fd), 1e-4}));
  }
  return worst;
}

} // namespace

TEST_CASE("model layout and prediction") {
  gd_config cfg;
  cfg.hidden_width = 3;
  const auto md = init_model(2, 2, cfg);
  CHECK(md.parameter_count() == 3 * 2 + 3 + 2 * 3 + 2);
  CHECK(md.input_weights.size() == 6);
  CHECK(md.output_weights.size() == 6);
  for (std::size_t k = 0; k < md.parameter_count(); ++k) CHECK(std::abs(md.parameter(k)) <= 1.0);
  const auto s = sample_builtin(builtin_target::get(builtin_id::swirl2to2), 4);
  CHECK(std::abs(mse(md, s) - mse_oracle(md, s)) <= 1e-12);
}

TEST_CASE("train_gd examples") {
  const sample_set one(1, 1, {{{0.5}, {0.5}}});
  gd_config cfg;
  cfg.hidden_width = 4;
  cfg.learning_rate = 0.1;
  cfg.max_iterations = 500;
  cfg.target_mse = 1e-6;
  const auto r = train_gd(one, cfg);
  CHECK(r.report.converged);
  CHECK(r.report.final_mse <= 1e-6);
  CHECK(r.report.iterations_run <= 500);

  gd_config wild;
  wild.learning_rate = 1e6;
  bool flagged = false;
  try {
    const auto w = train_gd(sine_task(), wild);
    flagged = w.report.loss_increased;
  } catch (const error& e) {
    flagged = e.code() == errc::numerical_divergence && e.index.has_value();
  }
  CHECK(flagged);

  gd_config none;
  none.max_iterations = 0;
  const auto z = train_gd(sine_task(), none);
  CHECK(z.report.iterations_run == 0);
  CHECK(z.report.loss_history.empty());
  CHECK(z.report.final_mse == z.report.initial_mse);
  CHECK_FALSE(z.report.converged);
}

TEST_CASE("gd_config validation") {
  gd_config c;
  c.hidden_width = 0;
  CHECK(catch_error([&] { c.validate(); }).code() == errc::invalid_argument);
  c = {};
  c.learning_rate = -1.0;
  CHECK(catch_error([&] { train_gd(sine_task(11), c); }).code() == errc::invalid_argument);
}

TEST_CASE("gradient_check examples") {
  const auto s = sine_task();
  const auto md = init_model(1, 1, gd_config{});
  const double e1 = gradient_check(md, s);
  CHECK(e1 <= 1e-5);
  CHECK(fd_oracle_error(md, s) <= 1e-5);
  CHECK(gradient_check(md, s) == e1);

  auto flat = md;
  for (auto& v : flat.output_weights) v = 0.0;
  const auto g = mse_gradient(flat, s);
  double mean_residual = 0.0;
  for (const auto& pt : s.points()) mean_residual += flat.output_bias[0] - pt.y[0];
  mean_residual /= static_cast<double>(s.size());
  CHECK(std::abs(g.back() - 2.0 * mean_residual) <= 1e-12);
  CHECK(gradient_check(flat, s) <= 1e-5);
  CHECK(fd_oracle_error(flat, s) <= 1e-5);
}

TEST_CASE("property: analytic gradients match finite differences") {
  const std::vector<sample_set> tasks{sine_task(21), sample_builtin(builtin_target::get(builtin_id::gauss2d), 5),
                                      sample_builtin(builtin_target::get(builtin_id::swirl2to2), 5)};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto& s = tasks[seed % tasks.size()];
    gd_config cfg;
    cfg.seed = seed;
    cfg.hidden_width = 3 + seed % 5;
    cfg.init_scale = 0.5 + 0.3 * static_cast<double>(seed);
    if (seed % 3 == 0) cfg.hidden = activation::tanh();
    const auto md = init_model(s.n(), s.m(), cfg);
    INFO("seed " << seed);
    CHECK(gradient_check(md, s) <= 1e-5);
    if (seed % 3 != 0) CHECK(fd_oracle_error(md, s) <= 1e-5);
  }
}

TEST_CASE("property: identical inputs give identical loss history") {
  const auto s = sample_builtin(builtin_target::get(builtin_id::gauss2d), 6);
  gd_config cfg;
  cfg.max_iterations = 200;
  const auto a = train_gd(s, cfg);
  const auto b = train_gd(s, cfg);
  CHECK(a.report.loss_history == b.report.loss_history);
  CHECK(a.model.output_weights == b.model.output_weights);
  cfg.seed = 43;
  CHECK(train_gd(s, cfg).report.loss_history != a.report.loss_history);
}

TEST_CASE("property: small learning rates never increase the loss early on") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    gd_config cfg;
    cfg.seed = seed;
    cfg.learning_rate = 1e-3;
    cfg.max_iterations = 100;
    const auto r = train_gd(sine_task(), cfg);
    CHECK_FALSE(r.report.loss_increased);
    double prev = r.report.initial_mse;
    for (double l : r.report.loss_history) {
      CHECK(l <= prev);
      prev = l;
    }
  }
}

TEST_CASE("compare examples") {
  const auto s = sine_task();
  const auto net = build_network(s, activation::identity(), std::vector<activation>{activation::sigmoid()});
  const auto recon = verify_reconstruction(net, s, 1e-9);
  const auto gd = train_gd(s, gd_config{});
  const auto c = compare(recon, gd.report);
  CHECK(c.ufa_wins_loss);
  CHECK(c.ufa_mse <= 1e-18);
  CHECK(c.ufa_mse <= c.gd_mse);
  CHECK(c.gd_iterations == 2000);
  CHECK(c.ufa_steps == 1);
  CHECK(render_kv(c).find("ufa_wins_loss=true") != std::string::npos);

  gd_report tie = gd.report;
  tie.final_mse = 0.0;
  tie.converged = true;
  auto exact = recon;
  exact.sse = 0.0;
  CHECK(compare(exact, tie).ufa_wins_loss);

  const auto other = train_gd(sine_task(51), gd_config{});
  CHECK(catch_error([&] { compare(recon, other.report); }).code() == errc::sample_mismatch);
}

TEST_CASE("loss csv") {
  gd_config cfg;
  cfg.max_iterations = 3;
  const auto r = train_gd(sine_task(11), cfg);
  std::ostringstream os;
  write_loss_csv(os, r.report);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,mse");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}
