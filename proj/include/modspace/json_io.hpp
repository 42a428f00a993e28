#pragma once

#include <string>

#include "json.hpp"
#include "modspace/alberti.hpp"
#include "modspace/modulus.hpp"
#include "modspace/spaces.hpp"

namespace modspace {

using json = nlohmann::json;

/// Space spec: {"vertices":[{"id":..,"xy":[..]}], "edges":[{"u":..,"v":..,"len":..,"mu":..}],
/// "metadata":{"generator":..,"params":{..},"slits":[[x,ylo,yhi,gen],..]}}.
json space_to_json(const MetricGraph& g, const SlitSpec* slits = nullptr);
MetricGraph space_from_json(const json& j);
SlitSpec slits_from_json(const json& j);

/// FNV-1a hash of the canonical vertices/edges serialization.
std::string space_hash(const json& space_json);

json family_to_json(const CurveFamily& family, const std::string& hash);
CurveFamily family_from_json(const json& j, const MetricGraph& g,
                             const std::string& expected_hash = "");

json certificate_to_json(const ModulusCertificate& cert);
ModulusCertificate certificate_from_json(const json& j);

json representation_to_json(const AlbertiRepresentation& rep);

json cloud_to_json(const PointCloud& cloud);
PointCloud cloud_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace modspace
