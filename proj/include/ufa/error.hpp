#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ufa {

enum class errc {
  invalid_argument,
  domain_violation,
  range_violation,
  not_invertible,
  weight_undefined,
  dimension_mismatch,
  certificate_missing,
  no_matching_anchor,
  anchor_mismatch,
  format_error,
  parse_error,
  conflicting_duplicate,
  not_applicable,
  numerical_divergence,
  sample_mismatch,
  io_error,
};

// CamelCase name as it appears in reports and CLI diagnostics.
const char* errc_name(errc code) noexcept;

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

  // Sample / output / line index the failure is attributed to, when known.
  std::optional<std::size_t> index;
  std::optional<std::size_t> output_index;
  // Second party of a pairwise failure (e.g. the earlier row of a duplicate).
  std::optional<std::size_t> related_index;

private:
  errc code_;
};

[[noreturn]] void fail(errc code, const std::string& what);

} // namespace ufa
