#include "ufa/error.hpp"

namespace ufa {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::domain_violation: return "DomainViolation";
    case errc::range_violation: return "RangeViolation";
    case errc::not_invertible: return "NotInvertible";
    case errc::weight_undefined: return "WeightUndefined";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::certificate_missing: return "CertificateMissing";
    case errc::no_matching_anchor: return "NoMatchingAnchor";
    case errc::anchor_mismatch: return "AnchorMismatch";
    case errc::format_error: return "FormatError";
    case errc::parse_error: return "ParseError";
    case errc::conflicting_duplicate: return "ConflictingDuplicate";
    case errc::not_applicable: return "NotApplicable";
    case errc::numerical_divergence: return "NumericalDivergence";
    case errc::sample_mismatch: return "SampleMismatch";
    case errc::io_error: return "IOError";
  }
  return "Unknown";
}

void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace ufa
