#include "ufa/ufa.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "ufa/baseline_gd.hpp"
#include "ufa/dataio.hpp"
#include "ufa/error.hpp"
#include "ufa/network.hpp"
#include "ufa/validation.hpp"

struct ufa_activation {
  ufa::activation value;
};

struct ufa_samples {
  ufa::sample_set value;
};

struct ufa_network {
  ufa::shallow_network value;
};

struct ufa_report {
  ufa::reconstruction_report value;
};

struct ufa_gd_run {
  ufa::gd_result value;
};

namespace {

thread_local std::string last_message;
thread_local long long last_index = -1;

ufa_status to_status(ufa::errc code) {
  using ufa::errc;
  switch (code) {
    case errc::invalid_argument: return UFA_INVALID_ARGUMENT;
    case errc::domain_violation: return UFA_DOMAIN_VIOLATION;
    case errc::range_violation: return UFA_RANGE_VIOLATION;
    case errc::not_invertible: return UFA_NOT_INVERTIBLE;
    case errc::weight_undefined: return UFA_WEIGHT_UNDEFINED;
    case errc::dimension_mismatch: return UFA_DIMENSION_MISMATCH;
    case errc::certificate_missing: return UFA_CERTIFICATE_MISSING;
    case errc::no_matching_anchor: return UFA_NO_MATCHING_ANCHOR;
    case errc::anchor_mismatch: return UFA_ANCHOR_MISMATCH;
    case errc::format_error: return UFA_FORMAT_ERROR;
    case errc::parse_error: return UFA_PARSE_ERROR;
    case errc::conflicting_duplicate: return UFA_CONFLICTING_DUPLICATE;
    case errc::not_applicable: return UFA_NOT_APPLICABLE;
    case errc::numerical_divergence: return UFA_NUMERICAL_DIVERGENCE;
    case errc::sample_mismatch: return UFA_SAMPLE_MISMATCH;
    case errc::io_error: return UFA_IO_ERROR;
  }
  return UFA_INTERNAL_ERROR;
}

template <class Fn>
ufa_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    last_message.clear();
    last_index = -1;
    return UFA_OK;
  } catch (const ufa::error& e) {
    last_message = e.what();
    last_index = e.index ? static_cast<long long>(*e.index) : -1;
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_message = "out of memory";
    last_index = -1;
    return UFA_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_message = e.what();
    last_index = -1;
    return UFA_INTERNAL_ERROR;
  } catch (...) {
    last_message = "unknown failure";
    last_index = -1;
    return UFA_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) ufa::fail(ufa::errc::invalid_argument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<ufa::activation> parse_sigmas(const char* const* sigmas, size_t count) {
  require(sigmas != nullptr || count == 0, "sigmas is null");
  std::vector<ufa::activation> out;
  for (size_t j = 0; j < count; ++j) {
    require(sigmas[j] != nullptr, "sigma string is null");
    out.push_back(ufa::activation::parse(sigmas[j]));
  }
  return out;
}

ufa::delta_policy parse_policy(const char* text) { return ufa::delta_policy::parse(text ? text : "default"); }

ufa::certification_report certificate_of(const ufa_activation* act, double lo, double hi, size_t grid, bool values) {
  require(act != nullptr, "activation is null");
  const ufa::interval where(lo, hi);
  return values ? ufa::check_nonvanishing(act->value, where, grid) : ufa::check_invertible(act->value, where, grid);
}

void fill_certificate(const ufa::certification_report& rep, ufa_certificate* out) {
  out->passed = rep.passed ? 1 : 0;
  out->grid_size = rep.grid_size;
  out->worst_point = rep.worst_point;
  out->worst_value = rep.worst_value;
}

ufa_status build_common(const ufa_samples* samples, const char* g, const char* const* sigmas, size_t num_sigmas,
                        const ufa::delta_policy* policy, const double* per_point, size_t grid, ufa_network** out) {
  return guarded([&] {
    require(samples && g && out, "null argument");
    ufa::build_options opts;
    if (grid) opts.certification_grid = grid;
    if (policy) {
      opts.deltas = *policy;
    } else {
      const auto& s = samples->value;
      std::vector<std::vector<double>> deltas(s.size(), std::vector<double>(s.n()));
      for (size_t i = 0; i < s.size(); ++i)
        for (size_t k = 0; k < s.n(); ++k) deltas[i][k] = per_point[i * s.n() + k];
      opts.deltas = ufa::delta_policy::per_point(std::move(deltas));
    }
    const auto sig = parse_sigmas(sigmas, num_sigmas);
    *out = new ufa_network{ufa::build_network(samples->value, ufa::activation::parse(g), sig, opts)};
  });
}

} // namespace

extern "C" {

const char* ufa_version(void) { return "1.0.0"; }

const char* ufa_status_name(ufa_status status) {
  if (status == UFA_OK) return "OK";
  if (status == UFA_INTERNAL_ERROR) return "InternalError";
  if (status < UFA_INVALID_ARGUMENT || status > UFA_INTERNAL_ERROR) return "Unknown";
  return ufa::errc_name(static_cast<ufa::errc>(status - 1));
}

const char* ufa_last_error(void) { return last_message.c_str(); }
long long ufa_last_error_index(void) { return last_index; }
void ufa_free_string(char* s) { std::free(s); }

ufa_status ufa_activation_parse(const char* text, ufa_activation** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new ufa_activation{ufa::activation::parse(text)};
  });
}

void ufa_activation_free(ufa_activation* act) { delete act; }

ufa_status ufa_activation_name(const ufa_activation* act, char** out) {
  return guarded([&] {
    require(act && out, "null argument");
    *out = copy_string(act->value.to_string());
  });
}

ufa_status ufa_activation_eval(const ufa_activation* act, double x, double* out) {
  return guarded([&] {
    require(act && out, "null argument");
    *out = act->value.eval(x);
  });
}

ufa_status ufa_activation_derivative(const ufa_activation* act, double x, double* out) {
  return guarded([&] {
    require(act && out, "null argument");
    *out = act->value.derivative(x);
  });
}

ufa_status ufa_activation_invert(const ufa_activation* act, double y, double* out) {
  return guarded([&] {
    require(act && out, "null argument");
    *out = act->value.invert(y);
  });
}

ufa_status ufa_activation_check_invertible(const ufa_activation* act, double lo, double hi, size_t grid,
                                           ufa_certificate* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    fill_certificate(certificate_of(act, lo, hi, grid, false), out);
  });
}

ufa_status ufa_activation_check_nonvanishing(const ufa_activation* act, double lo, double hi, size_t grid,
                                             ufa_certificate* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    fill_certificate(certificate_of(act, lo, hi, grid, true), out);
  });
}

ufa_status ufa_compute_theta(double f_value, const double* x, const double* delta, size_t n, const ufa_activation* g,
                             const ufa_activation* sigma, ufa_theta* out) {
  return guarded([&] {
    require(x && delta && g && sigma && out, "null argument");
    const auto r = ufa::compute_theta_multivariate(f_value, {x, n}, {delta, n}, g->value, sigma->value);
    *out = {r.theta, r.hidden_value, r.sigma_inverse_value, r.residual};
  });
}

ufa_status ufa_samples_create(size_t n, size_t m, size_t p, const double* xs, const double* ys, ufa_samples** out) {
  return guarded([&] {
    require(xs && ys && out, "null argument");
    std::vector<ufa::sample_point> pts(p);
    for (size_t i = 0; i < p; ++i) {
      pts[i].x.assign(xs + i * n, xs + (i + 1) * n);
      pts[i].y.assign(ys + i * m, ys + (i + 1) * m);
    }
    *out = new ufa_samples{ufa::sample_set(n, m, std::move(pts))};
  });
}

ufa_status ufa_samples_read_csv(const char* path, ufa_samples** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new ufa_samples{ufa::read_samples_csv(path)};
  });
}

ufa_status ufa_samples_parse_csv(const char* text, ufa_samples** out) {
  return guarded([&] {
    require(text && out, "null argument");
    std::istringstream in(text);
    *out = new ufa_samples{ufa::load_samples_csv(in)};
  });
}

ufa_status ufa_samples_builtin(const char* target, size_t per_axis, double shift, ufa_samples** out) {
  return guarded([&] {
    require(target && out, "null argument");
    *out = new ufa_samples{ufa::sample_builtin(ufa::builtin_target::parse(target), per_axis, shift)};
  });
}

ufa_status ufa_samples_write_csv(const ufa_samples* samples, const char* path) {
  return guarded([&] {
    require(samples && path, "null argument");
    ufa::write_samples_csv_file(samples->value, path);
  });
}

ufa_status ufa_samples_dims(const ufa_samples* samples, size_t* n, size_t* m, size_t* p) {
  return guarded([&] {
    require(samples != nullptr, "null argument");
    if (n) *n = samples->value.n();
    if (m) *m = samples->value.m();
    if (p) *p = samples->value.size();
  });
}

ufa_status ufa_samples_point(const ufa_samples* samples, size_t i, double* x, double* y) {
  return guarded([&] {
    require(samples != nullptr, "null argument");
    require(i < samples->value.size(), "sample index out of range");
    const auto& pt = samples->value[i];
    if (x) std::copy(pt.x.begin(), pt.x.end(), x);
    if (y) std::copy(pt.y.begin(), pt.y.end(), y);
  });
}

void ufa_samples_free(ufa_samples* samples) { delete samples; }

ufa_status ufa_check_hypotheses(const ufa_samples* samples, const char* g, const char* const* sigmas,
                                size_t num_sigmas, const char* delta_policy, size_t grid, ufa_format format,
                                int* passed, char** report) {
  return guarded([&] {
    require(samples && g, "null argument");
    const auto sig = parse_sigmas(sigmas, num_sigmas);
    const auto rep = ufa::check_hypotheses(samples->value, ufa::activation::parse(g), sig, parse_policy(delta_policy),
                                           grid ? grid : ufa::default_certification_grid);
    if (passed) *passed = rep.overall_passed ? 1 : 0;
    if (report) *report = copy_string(format == UFA_FORMAT_KV ? ufa::render_kv(rep) : ufa::render_text(rep));
  });
}

ufa_status ufa_suggest_rescale(const ufa_samples* samples, size_t output, const char* sigma, double margin,
                               char** out_activation) {
  return guarded([&] {
    require(samples && sigma && out_activation, "null argument");
    const auto act = ufa::suggest_rescale(samples->value, output, ufa::activation::parse(sigma), margin);
    *out_activation = copy_string(act.to_string());
  });
}

ufa_status ufa_architecture_counts(size_t n, size_t m, size_t p, size_t* inputs, size_t* hidden, size_t* outputs) {
  return guarded([&] {
    const auto a = ufa::architecture_counts(n, m, p);
    if (inputs) *inputs = a.inputs;
    if (hidden) *hidden = a.hidden;
    if (outputs) *outputs = a.outputs;
  });
}

ufa_status ufa_network_build(const ufa_samples* samples, const char* g, const char* const* sigmas, size_t num_sigmas,
                             const char* delta_policy, size_t grid, ufa_network** out) {
  ufa::delta_policy policy;
  if (auto st = guarded([&] { policy = parse_policy(delta_policy); }); st != UFA_OK) return st;
  return build_common(samples, g, sigmas, num_sigmas, &policy, nullptr, grid, out);
}

ufa_status ufa_network_build_per_point(const ufa_samples* samples, const char* g, const char* const* sigmas,
                                       size_t num_sigmas, const double* deltas, size_t grid, ufa_network** out) {
  if (!deltas) return guarded([] { require(false, "deltas is null"); });
  return build_common(samples, g, sigmas, num_sigmas, nullptr, deltas, grid, out);
}

void ufa_network_free(ufa_network* net) { delete net; }

ufa_status ufa_network_dims(const ufa_network* net, size_t* n, size_t* m, size_t* p) {
  return guarded([&] {
    require(net != nullptr, "null argument");
    if (n) *n = net->value.n();
    if (m) *m = net->value.m();
    if (p) *p = net->value.p();
  });
}

ufa_status ufa_network_unit(const ufa_network* net, size_t i, double* anchor_x, double* delta, double* theta) {
  return guarded([&] {
    require(net != nullptr, "null argument");
    require(i < net->value.p(), "unit index out of range");
    const auto& u = net->value.units()[i];
    if (anchor_x) std::copy(u.anchor_x.begin(), u.anchor_x.end(), anchor_x);
    if (delta) std::copy(u.delta.begin(), u.delta.end(), delta);
    if (theta) std::copy(u.theta.begin(), u.theta.end(), theta);
  });
}

ufa_status ufa_network_forward(const ufa_network* net, const double* x, size_t n, const char* routing,
                               double* outputs, size_t m, ufa_trace* trace) {
  return guarded([&] {
    require(net && x && outputs, "null argument");
    if (m != net->value.m()) ufa::fail(ufa::errc::dimension_mismatch, "output buffer has the wrong length");
    const auto route = ufa::routing::parse(routing ? routing : "anchor-exact");
    const auto tr = ufa::forward(net->value, {x, n}, route);
    std::copy(tr.outputs.begin(), tr.outputs.end(), outputs);
    if (trace) *trace = {tr.unit_index, tr.alpha};
  });
}

ufa_status ufa_network_verify(const ufa_network* net, const ufa_samples* samples, double tolerance, ufa_report** out) {
  return guarded([&] {
    require(net && samples && out, "null argument");
    *out = new ufa_report{ufa::verify_reconstruction(net->value, samples->value, tolerance)};
  });
}

ufa_status ufa_network_save(const ufa_network* net, const char* path) {
  return guarded([&] {
    require(net && path, "null argument");
    ufa::save_network_file(net->value, path);
  });
}

ufa_status ufa_network_load(const char* path, ufa_network** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new ufa_network{ufa::load_network_file(path)};
  });
}

ufa_status ufa_network_serialize(const ufa_network* net, char** out) {
  return guarded([&] {
    require(net && out, "null argument");
    *out = copy_string(ufa::save_network(net->value));
  });
}

ufa_status ufa_network_deserialize(const char* text, ufa_network** out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = new ufa_network{ufa::load_network(text)};
  });
}

ufa_status ufa_report_summary(const ufa_report* report, ufa_recon_summary* out) {
  return guarded([&] {
    require(report && out, "null argument");
    const auto& r = report->value;
    *out = {r.p, r.m, r.max_abs_residual, r.sse, r.mse(), r.construction_seconds, r.tolerance, r.passed ? 1 : 0};
  });
}

ufa_status ufa_report_residuals(const ufa_report* report, double* out, size_t p) {
  return guarded([&] {
    require(report && out, "null argument");
    const auto& v = report->value.per_point_max_abs_residual;
    if (p != v.size()) ufa::fail(ufa::errc::dimension_mismatch, "residual buffer has the wrong length");
    std::copy(v.begin(), v.end(), out);
  });
}

ufa_status ufa_report_render(const ufa_report* report, ufa_format format, char** out) {
  return guarded([&] {
    require(report && out, "null argument");
    *out = copy_string(format == UFA_FORMAT_KV ? ufa::render_kv(report->value) : ufa::render_text(report->value));
  });
}

void ufa_report_free(ufa_report* report) { delete report; }

ufa_status ufa_export_plot_builtin(const ufa_network* net, const char* target, size_t per_axis, double shift,
                                   const char* path) {
  return guarded([&] {
    require(net && target && path, "null argument");
    const auto rows = ufa::plot_rows_builtin(ufa::builtin_target::parse(target), per_axis, shift);
    std::ofstream out(path);
    if (!out) ufa::fail(ufa::errc::io_error, std::string("cannot open '") + path + "' for writing");
    ufa::write_plot_csv(out, net->value, rows);
  });
}

ufa_status ufa_export_plot_samples(const ufa_network* net, const ufa_samples* samples, const char* path) {
  return guarded([&] {
    require(net && samples && path, "null argument");
    const auto rows = ufa::plot_rows_samples(samples->value);
    std::ofstream out(path);
    if (!out) ufa::fail(ufa::errc::io_error, std::string("cannot open '") + path + "' for writing");
    ufa::write_plot_csv(out, net->value, rows);
  });
}

ufa_gd_config ufa_gd_config_default(void) {
  const ufa::gd_config c;
  return {c.hidden_width, c.learning_rate, c.max_iterations, c.target_mse, c.seed, c.init_scale};
}

ufa_status ufa_gd_train(const ufa_samples* samples, const ufa_gd_config* config, ufa_gd_run** out) {
  return guarded([&] {
    require(samples && config && out, "null argument");
    ufa::gd_config c;
    c.hidden_width = config->hidden_width;
    c.learning_rate = config->learning_rate;
    c.max_iterations = config->max_iterations;
    c.target_mse = config->target_mse;
    c.seed = config->seed;
    c.init_scale = config->init_scale;
    *out = new ufa_gd_run{ufa::train_gd(samples->value, c)};
  });
}

void ufa_gd_free(ufa_gd_run* run) { delete run; }

ufa_status ufa_gd_summary_get(const ufa_gd_run* run, ufa_gd_summary* out) {
  return guarded([&] {
    require(run && out, "null argument");
    const auto& r = run->value.report;
    *out = {r.initial_mse, r.final_mse, r.iterations_run, r.converged ? 1 : 0, r.loss_increased ? 1 : 0,
            r.wall_seconds};
  });
}

ufa_status ufa_gd_loss_history(const ufa_gd_run* run, double* out, size_t len) {
  return guarded([&] {
    require(run && (out || len == 0), "null argument");
    const auto& h = run->value.report.loss_history;
    if (len != h.size()) ufa::fail(ufa::errc::dimension_mismatch, "loss buffer has the wrong length");
    std::copy(h.begin(), h.end(), out);
  });
}

ufa_status ufa_gd_write_loss_csv(const ufa_gd_run* run, const char* path) {
  return guarded([&] {
    require(run && path, "null argument");
    std::ofstream out(path);
    if (!out) ufa::fail(ufa::errc::io_error, std::string("cannot open '") + path + "' for writing");
    ufa::write_loss_csv(out, run->value.report);
  });
}

ufa_status ufa_gd_gradient_check(const ufa_gd_run* run, const ufa_samples* samples, double* max_rel_error) {
  return guarded([&] {
    require(run && samples && max_rel_error, "null argument");
    *max_rel_error = ufa::gradient_check(run->value.model, samples->value);
  });
}

ufa_status ufa_compare(const ufa_report* recon, const ufa_gd_run* gd, ufa_format format, int* ufa_wins_loss,
                       char** out) {
  return guarded([&] {
    require(recon && gd, "null argument");
    const auto c = ufa::compare(recon->value, gd->value.report);
    if (ufa_wins_loss) *ufa_wins_loss = c.ufa_wins_loss ? 1 : 0;
    if (out) *out = copy_string(format == UFA_FORMAT_KV ? ufa::render_kv(c) : ufa::render_text(c));
  });
}

} // extern "C"
