#pragma once

// JSON serialization of certificates.  Every rigorous number is written as
// decimal strings for both interval endpoints, never as a rounded float.

#include <json.hpp>

#include "certibif/bifurcation.hpp"
#include "certibif/continuation.hpp"

namespace certibif {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal of x.
std::string decimal_string(double x);
double parse_decimal(const std::string& s);

json to_json(const Interval& x);
Interval interval_from_json(const json& j);

json to_json(const CiftBounds& b);
json to_json(const ZeroCertificate& c);
json to_json(const BifCertificate& c);
json to_json(const TranscriticalResult& t);
json to_json(const BranchBox& b, const CoralFamily& fam);
json branch_to_json(const ContinuationResult& r, const CoralFamily& fam);

}  // namespace certibif
