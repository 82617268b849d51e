#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "psf/portrait.hpp"
#include "psf/pullback.hpp"
#include "psf/qd_transfer.hpp"
#include "psf/verify.hpp"

namespace psf::io {

using json = nlohmann::ordered_json;

// Complex numbers are [re, im]; infinity is the string "inf".
json to_json(cplx z);
json to_json(const ExtendedComplex& z);
cplx complex_from_json(const json& j, const std::string& what);
ExtendedComplex extended_from_json(const json& j, const std::string& what);

json to_json(const FamilySpec& spec);
FamilySpec family_from_json(const json& j);

/// {"kind", "p"?, "lambda"? | "alpha", "beta"}
json to_json(const FamilySpec& spec, const FamilyParams& params);
std::pair<FamilySpec, FamilyParams> params_from_json(const json& j);

json to_json(const OrbitPortrait& port);
/// Structural parse only; validate_portrait decides admissibility.
OrbitPortrait portrait_from_json(const json& j);

json to_json(const QuadraticDifferential& q);
QuadraticDifferential differential_from_json(const json& j);

json to_json(const IterationResult& result, const FamilySpec& spec);
json to_json(const VerificationReport& report);
json to_json(const ContractionReport& report);
json to_json(const CompactnessReport& report);

/// One row per trace step.
std::string trace_csv(const IterationTrace& trace, const FamilySpec& spec);

/// Marked-point trajectories (left, compactified by z / (1 + |z|)) and
/// log10 of the parameter modulus against the step (right).
std::string trace_svg(const IterationTrace& trace, const FamilySpec& spec);

/// Throws Parse for unreadable files or malformed JSON.
json parse_json(const std::string& text);
std::string read_file(const std::string& path);

/// Two-space indented, trailing newline.
std::string dump(const json& j);

}  // namespace psf::io
