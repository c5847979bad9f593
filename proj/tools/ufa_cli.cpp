// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 success, 1 hypothesis or verification failure, 2 usage error,
// 3 data error.

#include <cstdio>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ufa/ufa.h"

namespace {

enum exit_code : int { ok = 0, hypothesis_failed = 1, usage = 2, data_error = 3 };

struct cli_failure {
  int code;
};

int exit_for(ufa_status st) {
  switch (st) {
    case UFA_OK: return ok;
    case UFA_RANGE_VIOLATION:
    case UFA_WEIGHT_UNDEFINED:
    case UFA_CERTIFICATE_MISSING:
    case UFA_NOT_INVERTIBLE: return hypothesis_failed;
    case UFA_INVALID_ARGUMENT: return usage;
    default: return data_error;
  }
}

void check(ufa_status st, const std::string& context) {
  if (st == UFA_OK) return;
  std::fprintf(stderr, "error: %s: %s", ufa_status_name(st), ufa_last_error());
  if (!context.empty()) std::fprintf(stderr, " (%s)", context.c_str());
  std::fprintf(stderr, "\n");
  throw cli_failure{exit_for(st)};
}

[[noreturn]] void usage_error(const std::string& what) {
  std::fprintf(stderr, "usage error: %s\n", what.c_str());
  throw cli_failure{usage};
}

struct string_deleter {
  void operator()(char* s) const { ufa_free_string(s); }
};
using owned_string = std::unique_ptr<char, string_deleter>;

struct samples_deleter {
  void operator()(ufa_samples* s) const { ufa_samples_free(s); }
};
struct network_deleter {
  void operator()(ufa_network* n) const { ufa_network_free(n); }
};
struct report_deleter {
  void operator()(ufa_report* r) const { ufa_report_free(r); }
};
struct gd_deleter {
  void operator()(ufa_gd_run* r) const { ufa_gd_free(r); }
};
using samples_ptr = std::unique_ptr<ufa_samples, samples_deleter>;
using network_ptr = std::unique_ptr<ufa_network, network_deleter>;
using report_ptr = std::unique_ptr<ufa_report, report_deleter>;
using gd_ptr = std::unique_ptr<ufa_gd_run, gd_deleter>;

struct options {
  std::string input;
  std::string builtin;
  std::size_t per_axis = 11;
  double shift = 0.0;
  std::string g = "identity";
  std::vector<std::string> sigmas;
  std::string delta = "default";
  std::size_t grid = 1001;
  double tol = 1e-9;
  std::string format = "text";
  std::string network;
  std::string output;
  std::string routing = "anchor-exact";
  std::vector<std::string> points;
  bool suggest = false;
  double margin = 0.1;
  std::string loss_csv;
  ufa_gd_config gd = ufa_gd_config_default();
};

ufa_format format_of(const options& o) { return o.format == "kv" ? UFA_FORMAT_KV : UFA_FORMAT_TEXT; }

samples_ptr load_samples(const options& o) {
  ufa_samples* s = nullptr;
  if (!o.input.empty() && !o.builtin.empty()) usage_error("give either --input or --builtin, not both");
  if (!o.input.empty())
    check(ufa_samples_read_csv(o.input.c_str(), &s), o.input);
  else if (!o.builtin.empty())
    check(ufa_samples_builtin(o.builtin.c_str(), o.per_axis, o.shift, &s), o.builtin);
  else
    usage_error("a sample source is required (--input <csv> or --builtin <target>)");
  return samples_ptr(s);
}

// One sigma per output; a single sigma is reused for every output.
std::vector<std::string> resolve_sigmas(const options& o, std::size_t m) {
  std::vector<std::string> out = o.sigmas.empty() ? std::vector<std::string>{"sigmoid"} : o.sigmas;
  if (out.size() == 1 && m > 1) out.assign(m, out.front());
  if (out.size() != m)
    usage_error(std::to_string(out.size()) + " --sigma values for " + std::to_string(m) + " outputs");
  for (const auto& s : out) {
    ufa_activation* a = nullptr;
    if (ufa_activation_parse(s.c_str(), &a) != UFA_OK) usage_error(ufa_last_error());
    ufa_activation_free(a);
  }
  ufa_activation* a = nullptr;
  if (ufa_activation_parse(o.g.c_str(), &a) != UFA_OK) usage_error(ufa_last_error());
  ufa_activation_free(a);
  return out;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

std::size_t outputs_of(const ufa_samples* s) {
  std::size_t m = 0;
  check(ufa_samples_dims(s, nullptr, &m, nullptr), "");
  return m;
}

network_ptr build(const options& o, const ufa_samples* s) {
  const auto sigmas = resolve_sigmas(o, outputs_of(s));
  const auto cs = c_strings(sigmas);
  ufa_network* net = nullptr;
  check(ufa_network_build(s, o.g.c_str(), cs.data(), cs.size(), o.delta.c_str(), o.grid, &net), "build");
  return network_ptr(net);
}

network_ptr load_network(const options& o) {
  ufa_network* net = nullptr;
  check(ufa_network_load(o.network.c_str(), &net), o.network);
  return network_ptr(net);
}

report_ptr verify(const ufa_network* net, const ufa_samples* s, double tol) {
  ufa_report* r = nullptr;
  check(ufa_network_verify(net, s, tol, &r), "verify");
  return report_ptr(r);
}

void print_report(const ufa_report* r, ufa_format fmt) {
  char* text = nullptr;
  check(ufa_report_render(r, fmt, &text), "");
  owned_string hold(text);
  std::fputs(text, stdout);
}

bool report_passed(const ufa_report* r) {
  ufa_recon_summary sum{};
  check(ufa_report_summary(r, &sum), "");
  return sum.passed != 0;
}

int run_check(const options& o) {
  auto s = load_samples(o);
  const std::size_t m = outputs_of(s.get());
  const auto sigmas = resolve_sigmas(o, m);
  const auto cs = c_strings(sigmas);
  int passed = 0;
  char* text = nullptr;
  check(ufa_check_hypotheses(s.get(), o.g.c_str(), cs.data(), cs.size(), o.delta.c_str(), o.grid, format_of(o),
                             &passed, &text),
        "check");
  owned_string hold(text);
  std::fputs(text, stdout);
  if (o.suggest && !passed) {
    for (std::size_t j = 0; j < m; ++j) {
      char* wrapped = nullptr;
      const auto st = ufa_suggest_rescale(s.get(), j, sigmas[j].c_str(), o.margin, &wrapped);
      if (st == UFA_OK) {
        owned_string w(wrapped);
        std::printf(o.format == "kv" ? "suggest.%zu=%s\n" : "suggested sigma[%zu]: %s\n", j, wrapped);
      } else if (st != UFA_NOT_APPLICABLE) {
        check(st, "suggest");
      }
    }
  }
  return passed ? ok : hypothesis_failed;
}

int run_build(const options& o) {
  auto s = load_samples(o);
  auto net = build(o, s.get());
  check(ufa_network_save(net.get(), o.output.c_str()), o.output);
  auto rep = verify(net.get(), s.get(), o.tol);
  print_report(rep.get(), format_of(o));
  return report_passed(rep.get()) ? ok : hypothesis_failed;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      usage_error("malformed --point '" + text + "'");
    }
  }
  if (out.empty()) usage_error("empty --point");
  return out;
}

int run_eval(const options& o) {
  auto net = load_network(o);
  std::size_t n = 0, m = 0;
  check(ufa_network_dims(net.get(), &n, &m, nullptr), "");
  if (o.points.empty()) usage_error("eval needs at least one --point");
  const bool kv = o.format == "kv";
  if (!kv) {
    for (std::size_t k = 0; k < n; ++k) std::printf("x%zu,", k + 1);
    for (std::size_t j = 0; j < m; ++j) std::printf("y%zu,", j + 1);
    std::printf("unit\n");
  }
  for (std::size_t q = 0; q < o.points.size(); ++q) {
    const auto x = parse_point(o.points[q]);
    std::vector<double> y(m);
    ufa_trace tr{};
    check(ufa_network_forward(net.get(), x.data(), x.size(), o.routing.c_str(), y.data(), m, &tr),
          "point " + o.points[q]);
    if (kv) {
      for (std::size_t j = 0; j < m; ++j) std::printf("point.%zu.y%zu=%.17g\n", q, j + 1, y[j]);
      std::printf("point.%zu.unit=%zu\n", q, tr.unit_index);
    } else {
      for (double v : x) std::printf("%.17g,", v);
      for (double v : y) std::printf("%.17g,", v);
      std::printf("%zu\n", tr.unit_index);
    }
  }
  return ok;
}

int run_verify(const options& o) {
  auto net = load_network(o);
  auto s = load_samples(o);
  auto rep = verify(net.get(), s.get(), o.tol);
  print_report(rep.get(), format_of(o));
  return report_passed(rep.get()) ? ok : hypothesis_failed;
}

int run_compare(const options& o) {
  auto s = load_samples(o);
  auto net = build(o, s.get());
  auto rep = verify(net.get(), s.get(), o.tol);
  const bool kv = o.format == "kv";
  std::printf(kv ? "gd.width=%zu\ngd.learning_rate=%.17g\ngd.max_iterations=%zu\ngd.target_mse=%.17g\n"
                   "gd.seed=%llu\ngd.init_scale=%.17g\n"
                 : "gd config: width=%zu lr=%.17g iterations=%zu target_mse=%.17g seed=%llu init_scale=%.17g\n",
              o.gd.hidden_width, o.gd.learning_rate, o.gd.max_iterations, o.gd.target_mse,
              static_cast<unsigned long long>(o.gd.seed), o.gd.init_scale);

  ufa_gd_run* run = nullptr;
  const auto st = ufa_gd_train(s.get(), &o.gd, &run);
  if (st == UFA_NUMERICAL_DIVERGENCE) {
    const long long diverged_at = ufa_last_error_index();
    ufa_recon_summary sum{};
    check(ufa_report_summary(rep.get(), &sum), "");
    std::printf(kv ? "ufa_mse=%.17g\ngd_diverged_at=%lld\nufa_wins_loss=true\n"
                   : "closed-form mse: %.17g\ngradient descent diverged at iteration %lld\n"
                     "closed-form wins on loss: yes\n",
                sum.mse, diverged_at);
    return ok;
  }
  check(st, "gradient descent");
  gd_ptr gd(run);
  if (!o.loss_csv.empty()) check(ufa_gd_write_loss_csv(gd.get(), o.loss_csv.c_str()), o.loss_csv);

  int wins = 0;
  char* text = nullptr;
  check(ufa_compare(rep.get(), gd.get(), format_of(o), &wins, &text), "compare");
  owned_string hold(text);
  std::fputs(text, stdout);
  return ok;
}

int run_export(const options& o) {
  auto net = load_network(o);
  if (!o.builtin.empty()) {
    check(ufa_export_plot_builtin(net.get(), o.builtin.c_str(), o.per_axis, o.shift, o.output.c_str()), o.output);
  } else {
    auto s = load_samples(o);
    check(ufa_export_plot_samples(net.get(), s.get(), o.output.c_str()), o.output);
  }
  return ok;
}

void add_sample_flags(CLI::App* cmd, options& o) {
  cmd->add_option("--input", o.input, "CSV with header x1..xn,y1..ym");
  cmd->add_option("--builtin", o.builtin, "sine-bump | gauss2d | swirl2to2");
  cmd->add_option("--per-axis", o.per_axis, "grid points per axis for --builtin")->capture_default_str();
  cmd->add_option("--shift", o.shift, "translate builtin anchors by this amount on every axis")
      ->capture_default_str();
}

void add_activation_flags(CLI::App* cmd, options& o) {
  cmd->add_option("--g", o.g, "hidden activation")->capture_default_str();
  cmd->add_option("--sigma", o.sigmas, "output activation, once per output (default sigmoid)");
  cmd->add_option("--delta", o.delta, "default | fixed:<d1>,...")->capture_default_str();
  cmd->add_option("--grid", o.grid, "certification grid size")->capture_default_str();
}

void add_format_flag(CLI::App* cmd, options& o) {
  cmd->add_option("--format", o.format, "text | kv")
      ->check(CLI::IsMember({"text", "kv"}))
      ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form construction of single-hidden-layer networks from function samples"};
  app.require_subcommand(1);
  options o;

  auto* check_cmd = app.add_subcommand("check", "check construction hypotheses for a sample set");
  add_sample_flags(check_cmd, o);
  add_activation_flags(check_cmd, o);
  add_format_flag(check_cmd, o);
  check_cmd->add_flag("--suggest", o.suggest, "print rescaled output activations for failing components");
  check_cmd->add_option("--margin", o.margin, "relative margin for --suggest")->capture_default_str();

  auto* build_cmd = app.add_subcommand("build", "construct a network, save it and verify it at the anchors");
  add_sample_flags(build_cmd, o);
  add_activation_flags(build_cmd, o);
  add_format_flag(build_cmd, o);
  build_cmd->add_option("--output,-o", o.output, "network file to write")->required();
  build_cmd->add_option("--tol", o.tol, "max abs residual tolerance")->capture_default_str();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved network at query points");
  eval_cmd->add_option("--network", o.network, "network file")->required();
  eval_cmd->add_option("--point", o.points, "comma-separated query input (repeatable)");
  eval_cmd->add_option("--routing", o.routing, "anchor-exact | nearest-anchor | unit:<i>")->capture_default_str();
  add_format_flag(eval_cmd, o);

  auto* verify_cmd = app.add_subcommand("verify", "re-verify a saved network against its samples");
  verify_cmd->add_option("--network", o.network, "network file")->required();
  add_sample_flags(verify_cmd, o);
  add_format_flag(verify_cmd, o);
  verify_cmd->add_option("--tol", o.tol, "max abs residual tolerance")->capture_default_str();

  auto* compare_cmd = app.add_subcommand("compare", "closed-form construction against gradient descent");
  add_sample_flags(compare_cmd, o);
  add_activation_flags(compare_cmd, o);
  add_format_flag(compare_cmd, o);
  compare_cmd->add_option("--tol", o.tol, "reconstruction tolerance")->capture_default_str();
  compare_cmd->add_option("--width", o.gd.hidden_width, "gradient-descent hidden width")->capture_default_str();
  compare_cmd->add_option("--lr", o.gd.learning_rate, "learning rate")->capture_default_str();
  compare_cmd->add_option("--iterations", o.gd.max_iterations, "max iterations")->capture_default_str();
  compare_cmd->add_option("--target-mse", o.gd.target_mse, "stop once mse reaches this")->capture_default_str();
  compare_cmd->add_option("--seed", o.gd.seed, "initialisation seed")->capture_default_str();
  compare_cmd->add_option("--init-scale", o.gd.init_scale, "uniform init half-width")->capture_default_str();
  compare_cmd->add_option("--loss-csv", o.loss_csv, "write iteration,mse history here");

  auto* export_cmd = app.add_subcommand("export-plot", "write x, f, net columns for plotting");
  export_cmd->add_option("--network", o.network, "network file")->required();
  add_sample_flags(export_cmd, o);
  export_cmd->add_option("--output,-o", o.output, "CSV file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*check_cmd) return run_check(o);
    if (*build_cmd) return run_build(o);
    if (*eval_cmd) return run_eval(o);
    if (*verify_cmd) return run_verify(o);
    if (*compare_cmd) return run_compare(o);
    if (*export_cmd) return run_export(o);
  } catch (const cli_failure& f) {
    return f.code;
  }
  return usage;
}
