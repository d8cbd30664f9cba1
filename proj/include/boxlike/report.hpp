#pragma once

// JSON serialization of every report type. Field names are stable;
// non-finite numbers are written as the strings "inf", "-inf" and "nan" so
// that documents stay valid JSON and re-serialize byte-identically.

#include <string>

#include <json.hpp>

#include "boxlike/boxcount.hpp"
#include "boxlike/drift.hpp"
#include "boxlike/heightlaw.hpp"
#include "boxlike/martingale.hpp"
#include "boxlike/realization.hpp"
#include "boxlike/theory.hpp"

namespace boxlike {

using Json = nlohmann::ordered_json;

Json json_number(double v);

Json to_json(const Partition& p);
Json to_json(const RatioMoments& m);
Json to_json(const ValidationReport& r);
Json to_json(const DiffReport& r);
Json to_json(const DimensionReport& r);
Json to_json(const SensitivityResult& r);
Json to_json(const GraphApprox& g);
Json to_json(const BoxCountResult& r);
Json to_json(const MartingaleTrace& t);
Json to_json(const SandwichReport& r);
Json to_json(const MartingaleDiagnostics& d);
/// Omits the per-path samples.
Json to_json(const DriftReport& r);

/// Two-space indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace boxlike
