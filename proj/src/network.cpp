#include "ufa/network.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "numfmt.hpp"
#include "ufa/error.hpp"
#include "ufa/validation.hpp"

namespace ufa {

using detail::format_real;

architecture architecture_counts(std::size_t n, std::size_t m, std::size_t p) {
  if (n == 0 || m == 0 || p == 0) fail(errc::invalid_argument, "n, m and p must all be at least 1");
  return {n * p, p, m * p};
}

shallow_network::shallow_network(activation g, std::vector<activation> sigmas, std::vector<point_unit> units)
    : g_(std::move(g)), sigmas_(std::move(sigmas)), units_(std::move(units)) {
  if (units_.empty()) fail(errc::invalid_argument, "network needs at least one unit");
  if (sigmas_.empty()) fail(errc::invalid_argument, "network needs at least one output activation");
  const std::size_t n = units_.front().anchor_x.size();
  if (n == 0) fail(errc::invalid_argument, "anchors must have at least one coordinate");
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const auto& u = units_[i];
    if (u.anchor_x.size() != n || u.delta.size() != n || u.theta.size() != sigmas_.size())
      fail(errc::dimension_mismatch, "unit " + std::to_string(i) + " has inconsistent dimensions");
    if (!std::all_of(u.theta.begin(), u.theta.end(), [](double t) { return std::isfinite(t); }))
      fail(errc::invalid_argument, "unit " + std::to_string(i) + " has a non-finite output weight");
    if (!(std::abs(u.hidden_value) > weight_threshold))
      fail(errc::weight_undefined, "unit " + std::to_string(i) + " has a vanishing hidden activation");
  }
}

shallow_network build_network(const sample_set& samples, const activation& g, std::span<const activation> sigmas,
                              const build_options& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (sigmas.size() != samples.m())
    fail(errc::dimension_mismatch, std::to_string(sigmas.size()) + " output activations for " +
                                       std::to_string(samples.m()) + " outputs");

  const auto anchors = samples.anchors();
  const auto deltas = resolve_deltas(options.deltas, anchors, samples.n(), g);

  std::vector<point_unit> units;
  units.reserve(samples.size());
  std::vector<double> preimages;
  preimages.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<theta_result> thetas;
    try {
      thetas = compute_theta_vector(samples[i].y, anchors[i], deltas[i], g, sigmas);
    } catch (const error& e) {
      error out(e.code(), "sample " + std::to_string(i) + ": " + e.what());
      out.index = i;
      out.output_index = e.output_index;
      throw out;
    }
    point_unit u;
    u.anchor_x = anchors[i];
    u.delta = deltas[i];
    u.hidden_value = thetas.front().hidden_value;
    for (const auto& t : thetas) u.theta.push_back(t.theta);
    preimages.push_back(inner_product(u.anchor_x, u.delta));
    units.push_back(std::move(u));
  }

  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    const auto cert =
        check_invertible(sigmas[j], sigma_working_interval(sigmas[j], samples, j), options.certification_grid);
    if (!cert.passed) {
      error e(errc::certificate_missing, "output activation " + std::to_string(j) + " (" + sigmas[j].to_string() +
                                             ") has a vanishing derivative near " + format_real(cert.worst_point));
      e.output_index = j;
      throw e;
    }
  }
  const auto gcert = certify_hidden(g, preimages, options.certification_grid);
  if (!gcert.passed)
    fail(errc::certificate_missing, "hidden activation " + g.to_string() + " vanishes near " +
                                        format_real(gcert.worst_point) + " on the realized preimage interval");

  shallow_network net(g, std::vector<activation>(sigmas.begin(), sigmas.end()), std::move(units));
  net.set_construction_seconds(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return net;
}

routing routing::parse(std::string_view text) {
  if (text == "anchor-exact") return anchor_exact();
  if (text == "nearest-anchor" || text == "nearest") return nearest_anchor();
  if (text.starts_with("unit:")) {
    auto v = detail::parse_real(text.substr(5));
    if (v && *v >= 0 && std::floor(*v) == *v) return unit(static_cast<std::size_t>(*v));
  }
  fail(errc::parse_error, "unknown routing '" + std::string(text) + "' (anchor-exact, nearest-anchor, unit:<i>)");
}

bool anchor_matches(std::span<const double> x, std::span<const double> anchor) {
  if (x.size() != anchor.size()) return false;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!(std::abs(x[k] - anchor[k]) <= 1e-12 * std::max(1.0, std::abs(anchor[k])))) return false;
  return true;
}

eval_trace forward(const shallow_network& net, std::span<const double> x, routing route) {
  if (x.size() != net.n())
    fail(errc::dimension_mismatch, "query has " + std::to_string(x.size()) + " coordinates, network expects " +
                                       std::to_string(net.n()));
  const auto& units = net.units();
  eval_trace tr;
  switch (route.kind) {
    case routing::mode::anchor_exact: {
      auto it = std::find_if(units.begin(), units.end(), [&](const point_unit& u) { return anchor_matches(x, u.anchor_x); });
      if (it == units.end()) {
        std::string q;
        for (std::size_t k = 0; k < x.size(); ++k) q += (k ? "," : "") + format_real(x[k]);
        fail(errc::no_matching_anchor, "no anchor matches (" + q + ")");
      }
      tr.unit_index = static_cast<std::size_t>(it - units.begin());
      break;
    }
    case routing::mode::nearest_anchor: {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < units.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
          const double d = x[k] - units[i].anchor_x[k];
          d2 += d * d;
        }
        if (d2 < best) {
          best = d2;
          tr.unit_index = i;
        }
      }
      break;
    }
    case routing::mode::unit:
      if (route.unit_index >= units.size())
        fail(errc::invalid_argument, "unit index " + std::to_string(route.unit_index) + " out of range");
      tr.unit_index = route.unit_index;
      break;
  }

  const auto& u = units[tr.unit_index];
  tr.alpha = net.g().eval(inner_product(x, u.delta));
  tr.preactivations.resize(net.m());
  tr.outputs.resize(net.m());
  for (std::size_t j = 0; j < net.m(); ++j) {
    tr.preactivations[j] = tr.alpha * u.theta[j];
    tr.outputs[j] = net.sigmas()[j].eval(tr.preactivations[j]);
  }
  return tr;
}

reconstruction_report verify_reconstruction(const shallow_network& net, const sample_set& samples, double tolerance) {
  if (samples.n() != net.n() || samples.m() != net.m() || samples.size() != net.p())
    fail(errc::anchor_mismatch, "sample set shape (n=" + std::to_string(samples.n()) + ", m=" +
                                    std::to_string(samples.m()) + ", p=" + std::to_string(samples.size()) +
                                    ") differs from the network's");
  std::map<std::vector<double>, std::size_t> anchors;
  for (std::size_t i = 0; i < net.p(); ++i) anchors.emplace(net.units()[i].anchor_x, i);
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!anchors.contains(samples[i].x)) {
      error e(errc::anchor_mismatch, "sample " + std::to_string(i) + " is not an anchor of the network");
      e.index = i;
      throw e;
    }

  reconstruction_report rep;
  rep.p = samples.size();
  rep.m = samples.m();
  rep.tolerance = tolerance;
  rep.construction_seconds = net.construction_seconds();
  rep.sample_fingerprint = samples.fingerprint();
  rep.per_point_max_abs_residual.reserve(samples.size());
  for (const auto& pt : samples.points()) {
    const auto tr = forward(net, pt.x, routing::anchor_exact());
    double worst = 0.0;
    for (std::size_t j = 0; j < rep.m; ++j) {
      const double r = tr.outputs[j] - pt.y[j];
      worst = std::max(worst, std::abs(r));
      rep.sse += r * r;
    }
    rep.per_point_max_abs_residual.push_back(worst);
    rep.max_abs_residual = std::max(rep.max_abs_residual, worst);
  }
  rep.passed = rep.max_abs_residual <= tolerance;
  return rep;
}

namespace {

constexpr std::string_view format_header = "UFANET v1";

std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_real(v[k]);
  return s;
}

[[noreturn]] void bad_format(std::size_t line, const std::string& what) {
  error e(errc::format_error, "line " + std::to_string(line) + ": " + what);
  e.index = line;
  throw e;
}

// Cursor over one line of the network document.
class line_reader {
public:
  line_reader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void expect(std::string_view lit) {
    if (!text_.starts_with(lit)) bad_format(line_, "expected '" + std::string(lit) + "'");
    text_.remove_prefix(lit.size());
  }

  std::size_t count_until(char stop) {
    auto v = detail::parse_real(take_until(stop));
    if (!v || *v < 0 || std::floor(*v) != *v) bad_format(line_, "expected a count");
    return static_cast<std::size_t>(*v);
  }

  std::vector<double> reals_until(char stop) {
    std::string_view body = take_until(stop);
    std::vector<double> out;
    while (true) {
      auto comma = body.find(',');
      auto v = detail::parse_real(body.substr(0, comma));
      if (!v || !std::isfinite(*v)) bad_format(line_, "malformed real in list");
      out.push_back(*v);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return out;
  }

  std::string_view rest() const { return text_; }

  void finish() const {
    if (!text_.empty()) bad_format(line_, "trailing characters '" + std::string(text_) + "'");
  }

private:
  std::string_view take_until(char stop) {
    auto pos = text_.find(stop);
    if (pos == std::string_view::npos) bad_format(line_, std::string("missing '") + stop + "'");
    auto body = text_.substr(0, pos);
    text_.remove_prefix(pos);
    return body;
  }

  std::string_view text_;
  std::size_t line_;
};

} // namespace

std::string save_network(const shallow_network& net) {
  std::ostringstream os;
  os << format_header << "\n";
  os << "dims {n=" << net.n() << ",m=" << net.m() << ",p=" << net.p() << "}\n";
  os << "g " << net.g().to_string() << "\n";
  os << "sigmas [";
  for (std::size_t j = 0; j < net.m(); ++j) os << (j ? " " : "") << net.sigmas()[j].to_string();
  os << "]\n";
  for (std::size_t i = 0; i < net.p(); ++i) {
    const auto& u = net.units()[i];
    os << "units[" << i << "] {anchor_x[" << join_reals(u.anchor_x) << "], delta[" << join_reals(u.delta)
       << "], theta[" << join_reals(u.theta) << "]}\n";
  }
  return os.str();
}

shallow_network load_network(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  if (lines.empty()) bad_format(1, "empty network document");
  if (lines[0] != format_header) {
    if (lines[0].starts_with("UFANET")) bad_format(1, "unsupported version '" + std::string(lines[0]) + "'");
    bad_format(1, "missing 'UFANET v1' header");
  }
  if (lines.size() < 4) bad_format(lines.size(), "truncated header");

  line_reader dims(lines[1], 2);
  dims.expect("dims {n=");
  const std::size_t n = dims.count_until(',');
  dims.expect(",m=");
  const std::size_t m = dims.count_until(',');
  dims.expect(",p=");
  const std::size_t p = dims.count_until('}');
  dims.expect("}");
  dims.finish();
  if (n == 0 || m == 0 || p == 0) bad_format(2, "dimensions must be positive");
  if (lines.size() != 4 + p)
    bad_format(lines.size(), "expected " + std::to_string(p) + " units, found " + std::to_string(lines.size() - 4));

  auto parse_act = [](std::string_view s, std::size_t line) {
    try {
      return activation::parse(s);
    } catch (const error& e) {
      bad_format(line, e.what());
    }
  };

  line_reader gl(lines[2], 3);
  gl.expect("g ");
  activation g = parse_act(gl.rest(), 3);

  line_reader sl(lines[3], 4);
  sl.expect("sigmas [");
  std::string_view body = sl.rest();
  if (!body.ends_with("]")) bad_format(4, "missing ']'");
  body.remove_suffix(1);
  std::vector<activation> sigmas;
  while (!body.empty()) {
    auto sp = body.find(' ');
    sigmas.push_back(parse_act(body.substr(0, sp), 4));
    if (sp == std::string_view::npos) break;
    body.remove_prefix(sp + 1);
  }
  if (sigmas.size() != m) bad_format(4, "expected " + std::to_string(m) + " output activations");

  std::vector<point_unit> units;
  units.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t ln = 5 + i;
    line_reader ur(lines[4 + i], ln);
    ur.expect("units[");
    if (ur.count_until(']') != i) bad_format(ln, "unit index out of sequence");
    ur.expect("] {anchor_x[");
    point_unit u;
    u.anchor_x = ur.reals_until(']');
    ur.expect("], delta[");
    u.delta = ur.reals_until(']');
    ur.expect("], theta[");
    u.theta = ur.reals_until(']');
    ur.expect("]}");
    ur.finish();
    if (u.anchor_x.size() != n || u.delta.size() != n || u.theta.size() != m)
      bad_format(ln, "unit dimensions disagree with dims");
    try {
      u.hidden_value = g.eval(inner_product(u.anchor_x, u.delta));
    } catch (const error& e) {
      bad_format(ln, e.what());
    }
    units.push_back(std::move(u));
  }

  try {
    return shallow_network(std::move(g), std::move(sigmas), std::move(units));
  } catch (const error& e) {
    error out(errc::format_error, e.what());
    throw out;
  }
}

void save_network_file(const shallow_network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io_error, "cannot open '" + path + "' for writing");
  out << save_network(net);
  if (!out) fail(errc::io_error, "failed writing '" + path + "'");
}

shallow_network load_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

} // namespace ufa
