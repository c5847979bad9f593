#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "ufa/ufa.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  ufa_free_string(s);
  return out;
}

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

ufa_samples* sine(size_t per_axis = 101) {
  ufa_samples* s = nullptr;
  REQUIRE(ufa_samples_builtin("sine-bump", per_axis, 1.0, &s) == UFA_OK);
  return s;
}

const char* const one_sigmoid[] = {"sigmoid"};

} // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(ufa_status_name(UFA_OK)) == "OK");
  CHECK(std::string(ufa_status_name(UFA_RANGE_VIOLATION)) == "RangeViolation");
  CHECK(std::string(ufa_status_name(UFA_WEIGHT_UNDEFINED)) == "WeightUndefined");
  CHECK(std::string(ufa_status_name(UFA_IO_ERROR)) == "IOError");
  CHECK(std::strlen(ufa_version()) > 0);
}

TEST_CASE("activation handles") {
  ufa_activation* a = nullptr;
  REQUIRE(ufa_activation_parse("sigmoid", &a) == UFA_OK);
  double v = 0.0;
  CHECK(ufa_activation_eval(a, 0.0, &v) == UFA_OK);
  CHECK(v == 0.5);
  CHECK(ufa_activation_derivative(a, 0.0, &v) == UFA_OK);
  CHECK(v == 0.25);
  CHECK(ufa_activation_invert(a, 0.5, &v) == UFA_OK);
  CHECK(v == 0.0);
  CHECK(ufa_activation_invert(a, 2.0, &v) == UFA_RANGE_VIOLATION);
  CHECK(std::strlen(ufa_last_error()) > 0);

  ufa_certificate c{};
  CHECK(ufa_activation_check_invertible(a, -5.0, 5.0, 101, &c) == UFA_OK);
  CHECK(c.passed == 1);
  CHECK(c.grid_size == 101);
  CHECK(ufa_activation_check_nonvanishing(a, -5.0, 5.0, 101, &c) == UFA_OK);
  CHECK(c.passed == 1);
  CHECK(ufa_activation_check_invertible(a, 1.0, 1.0, 11, &c) == UFA_INVALID_ARGUMENT);

  char* name = nullptr;
  CHECK(ufa_activation_name(a, &name) == UFA_OK);
  CHECK(take(name) == "sigmoid");
  ufa_activation_free(a);

  ufa_activation* bad = nullptr;
  CHECK(ufa_activation_parse("relu", &bad) == UFA_PARSE_ERROR);
  CHECK(bad == nullptr);
  CHECK(ufa_activation_parse(nullptr, &bad) == UFA_INVALID_ARGUMENT);
  ufa_activation_free(nullptr);
}

TEST_CASE("theta through the C interface") {
  ufa_activation *g = nullptr, *s = nullptr;
  REQUIRE(ufa_activation_parse("identity", &g) == UFA_OK);
  REQUIRE(ufa_activation_parse("sigmoid", &s) == UFA_OK);
  const double x[] = {2.0}, d[] = {1.0};
  ufa_theta t{};
  CHECK(ufa_compute_theta(0.73, x, d, 1, g, s, &t) == UFA_OK);
  CHECK(std::abs(t.theta - 0.49731128757203103) <= 1e-12);
  CHECK(t.hidden_value == 2.0);
  const double x2[] = {1.0, -1.0}, d2[] = {1.0, 1.0};
  CHECK(ufa_compute_theta(0.6, x2, d2, 2, g, s, &t) == UFA_WEIGHT_UNDEFINED);
  CHECK(ufa_compute_theta(2.0, x, d, 1, g, s, &t) == UFA_RANGE_VIOLATION);
  ufa_activation_free(g);
  ufa_activation_free(s);
}

TEST_CASE("samples through the C interface") {
  const double xs[] = {0.5, 0.5, 0.7};
  const double ys[] = {0.5, 0.5, 0.1};
  ufa_samples* s = nullptr;
  REQUIRE(ufa_samples_create(1, 1, 3, xs, ys, &s) == UFA_OK);
  size_t n = 0, m = 0, p = 0;
  CHECK(ufa_samples_dims(s, &n, &m, &p) == UFA_OK);
  CHECK(p == 2);
  double x = 0.0, y = 0.0;
  CHECK(ufa_samples_point(s, 1, &x, &y) == UFA_OK);
  CHECK(x == 0.7);
  CHECK(ufa_samples_point(s, 2, &x, &y) == UFA_INVALID_ARGUMENT);

  const auto path = temp_path("ufa_c_api_samples.csv");
  CHECK(ufa_samples_write_csv(s, path.c_str()) == UFA_OK);
  ufa_samples* back = nullptr;
  CHECK(ufa_samples_read_csv(path.c_str(), &back) == UFA_OK);
  CHECK(ufa_samples_dims(back, &n, &m, &p) == UFA_OK);
  CHECK(p == 2);
  ufa_samples_free(back);
  std::filesystem::remove(path);
  ufa_samples_free(s);

  ufa_samples* dup = nullptr;
  CHECK(ufa_samples_parse_csv("x1,y1\n0.5,0.5\n0.5,0.6\n", &dup) == UFA_CONFLICTING_DUPLICATE);
  CHECK(ufa_last_error_index() == 3);
  CHECK(ufa_samples_parse_csv("x1,y1\n0.5,oops\n", &dup) == UFA_PARSE_ERROR);
  CHECK(ufa_last_error_index() == 2);
  CHECK(ufa_samples_read_csv("/nonexistent/x.csv", &dup) == UFA_IO_ERROR);
  CHECK(ufa_samples_builtin("nope", 10, 0.0, &dup) == UFA_PARSE_ERROR);
}

TEST_CASE("hypotheses and rescale through the C interface") {
  ufa_samples* s = sine();
  int passed = 0;
  char* report = nullptr;
  CHECK(ufa_check_hypotheses(s, "identity", one_sigmoid, 1, nullptr, 0, UFA_FORMAT_KV, &passed, &report) == UFA_OK);
  CHECK(passed == 1);
  CHECK(take(report).find("overall_passed=true") != std::string::npos);
  ufa_samples_free(s);

  ufa_samples* bad = nullptr;
  REQUIRE(ufa_samples_parse_csv("x1,y1\n1,0.5\n2,2\n", &bad) == UFA_OK);
  CHECK(ufa_check_hypotheses(bad, "identity", one_sigmoid, 1, "default", 0, UFA_FORMAT_TEXT, &passed, &report) ==
        UFA_OK);
  CHECK(passed == 0);
  ufa_free_string(report);
  char* wrapped = nullptr;
  CHECK(ufa_suggest_rescale(bad, 0, "sigmoid", 0.1, &wrapped) == UFA_OK);
  CHECK(take(wrapped).rfind("scale:", 0) == 0);
  CHECK(ufa_suggest_rescale(bad, 0, "identity", 0.1, &wrapped) == UFA_NOT_APPLICABLE);

  ufa_network* net = nullptr;
  CHECK(ufa_network_build(bad, "identity", one_sigmoid, 1, nullptr, 0, &net) == UFA_RANGE_VIOLATION);
  CHECK(ufa_last_error_index() == 1);
  CHECK(net == nullptr);
  ufa_samples_free(bad);
}

TEST_CASE("networks through the C interface") {
  size_t in = 0, hid = 0, out = 0;
  CHECK(ufa_architecture_counts(3, 2, 7, &in, &hid, &out) == UFA_OK);
  CHECK(in == 21);
  CHECK(hid == 7);
  CHECK(out == 14);

  ufa_samples* s = sine();
  ufa_network* net = nullptr;
  REQUIRE(ufa_network_build(s, "identity", one_sigmoid, 1, "default", 0, &net) == UFA_OK);
  size_t n = 0, m = 0, p = 0;
  CHECK(ufa_network_dims(net, &n, &m, &p) == UFA_OK);
  CHECK(p == 101);

  const double q[] = {1.25};
  double y = 0.0;
  ufa_trace tr{};
  CHECK(ufa_network_forward(net, q, 1, "anchor-exact", &y, 1, &tr) == UFA_OK);
  CHECK(tr.unit_index == 25);
  CHECK(std::abs(y - 0.78284271247461901) <= 1e-9);
  const double off[] = {1.251};
  CHECK(ufa_network_forward(net, off, 1, nullptr, &y, 1, nullptr) == UFA_NO_MATCHING_ANCHOR);
  CHECK(ufa_network_forward(net, off, 1, "nearest-anchor", &y, 1, &tr) == UFA_OK);
  CHECK(tr.unit_index == 25);
  CHECK(ufa_network_forward(net, q, 1, "sideways", &y, 1, nullptr) == UFA_PARSE_ERROR);
  CHECK(ufa_network_forward(net, q, 1, nullptr, &y, 2, nullptr) == UFA_DIMENSION_MISMATCH);

  double ax = 0.0, dl = 0.0, th = 0.0;
  CHECK(ufa_network_unit(net, 25, &ax, &dl, &th) == UFA_OK);
  CHECK(ax == 1.25);
  CHECK(dl == 1.0);

  ufa_report* rep = nullptr;
  REQUIRE(ufa_network_verify(net, s, 1e-9, &rep) == UFA_OK);
  ufa_recon_summary sum{};
  CHECK(ufa_report_summary(rep, &sum) == UFA_OK);
  CHECK(sum.passed == 1);
  CHECK(sum.max_abs_residual <= 1e-9);
  std::vector<double> res(101);
  CHECK(ufa_report_residuals(rep, res.data(), res.size()) == UFA_OK);
  char* text = nullptr;
  CHECK(ufa_report_render(rep, UFA_FORMAT_KV, &text) == UFA_OK);
  CHECK(take(text).find("passed=true") != std::string::npos);

  char* doc = nullptr;
  REQUIRE(ufa_network_serialize(net, &doc) == UFA_OK);
  ufa_network* back = nullptr;
  CHECK(ufa_network_deserialize(doc, &back) == UFA_OK);
  std::string truncated(doc);
  truncated.resize(truncated.size() / 2);
  ufa_network* broken = nullptr;
  CHECK(ufa_network_deserialize(truncated.c_str(), &broken) == UFA_FORMAT_ERROR);
  ufa_free_string(doc);

  ufa_report* rep2 = nullptr;
  REQUIRE(ufa_network_verify(back, s, 1e-9, &rep2) == UFA_OK);
  std::vector<double> res2(101);
  CHECK(ufa_report_residuals(rep2, res2.data(), res2.size()) == UFA_OK);
  CHECK(std::memcmp(res.data(), res2.data(), res.size() * sizeof(double)) == 0);

  const auto path = temp_path("ufa_c_api_net.ufanet");
  CHECK(ufa_network_save(net, path.c_str()) == UFA_OK);
  ufa_network* loaded = nullptr;
  CHECK(ufa_network_load(path.c_str(), &loaded) == UFA_OK);
  ufa_network_free(loaded);
  std::filesystem::remove(path);

  const auto plot = temp_path("ufa_c_api_plot.csv");
  CHECK(ufa_export_plot_builtin(net, "sine-bump", 201, 1.0, plot.c_str()) == UFA_OK);
  CHECK(ufa_export_plot_samples(net, s, plot.c_str()) == UFA_OK);
  std::filesystem::remove(plot);

  ufa_samples* other = sine(51);
  ufa_report* none = nullptr;
  CHECK(ufa_network_verify(net, other, 1e-9, &none) == UFA_ANCHOR_MISMATCH);

  ufa_gd_config cfg = ufa_gd_config_default();
  CHECK(cfg.hidden_width == 16);
  CHECK(cfg.learning_rate == 0.5);
  CHECK(cfg.max_iterations == 2000);
  cfg.max_iterations = 300;
  ufa_gd_run* gd = nullptr;
  REQUIRE(ufa_gd_train(s, &cfg, &gd) == UFA_OK);
  ufa_gd_summary gs{};
  CHECK(ufa_gd_summary_get(gd, &gs) == UFA_OK);
  CHECK(gs.iterations_run == 300);
  std::vector<double> hist(300);
  CHECK(ufa_gd_loss_history(gd, hist.data(), hist.size()) == UFA_OK);
  CHECK(hist.back() == gs.final_mse);
  double rel = 1.0;
  CHECK(ufa_gd_gradient_check(gd, s, &rel) == UFA_OK);
  CHECK(rel <= 1e-5);
  int wins = 0;
  char* cmp = nullptr;
  CHECK(ufa_compare(rep, gd, UFA_FORMAT_TEXT, &wins, &cmp) == UFA_OK);
  CHECK(wins == 1);
  ufa_free_string(cmp);

  ufa_gd_run* gd_other = nullptr;
  REQUIRE(ufa_gd_train(other, &cfg, &gd_other) == UFA_OK);
  CHECK(ufa_compare(rep, gd_other, UFA_FORMAT_TEXT, &wins, &cmp) == UFA_SAMPLE_MISMATCH);

  cfg.learning_rate = 1e6;
  ufa_gd_run* wild = nullptr;
  const ufa_status st = ufa_gd_train(s, &cfg, &wild);
  if (st == UFA_NUMERICAL_DIVERGENCE) {
    CHECK(ufa_last_error_index() >= 1);
  } else {
    REQUIRE(st == UFA_OK);
    CHECK(ufa_gd_summary_get(wild, &gs) == UFA_OK);
    CHECK(gs.loss_increased == 1);
    ufa_gd_free(wild);
  }

  ufa_gd_free(gd_other);
  ufa_gd_free(gd);
  ufa_samples_free(other);
  ufa_report_free(rep2);
  ufa_report_free(rep);
  ufa_network_free(back);
  ufa_network_free(net);
  ufa_samples_free(s);
}

TEST_CASE("per-point deltas through the C interface") {
  const double xs[] = {1.0, 2.0};
  const double ys[] = {0.3, 0.7};
  ufa_samples* s = nullptr;
  REQUIRE(ufa_samples_create(1, 1, 2, xs, ys, &s) == UFA_OK);
  const double deltas[] = {0.5, -3.0};
  ufa_network* net = nullptr;
  REQUIRE(ufa_network_build_per_point(s, "sigmoid", one_sigmoid, 1, deltas, 0, &net) == UFA_OK);
  double ax = 0.0, dl = 0.0, th = 0.0;
  CHECK(ufa_network_unit(net, 1, &ax, &dl, &th) == UFA_OK);
  CHECK(dl == -3.0);
  const double q[] = {2.0};
  double y = 0.0;
  CHECK(ufa_network_forward(net, q, 1, "anchor-exact", &y, 1, nullptr) == UFA_OK);
  CHECK(std::abs(y - 0.7) <= 1e-12);
  ufa_network_free(net);
  ufa_samples_free(s);
}
