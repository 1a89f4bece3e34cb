#pragma once

#include <json.hpp>

#include "kgaudit/diagnostics.hpp"
#include "kgaudit/ranking.hpp"
#include "kgaudit/samplers.hpp"

namespace kgaudit {

nlohmann::json to_json(const MetricBlock& m);
nlohmann::json to_json(const RankingReport& r);
nlohmann::json to_json(const SpdGraphBlock& b);
nlohmann::json to_json(const SpdReport& r);
nlohmann::json to_json(const BucketTable& t);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const SelectionReport& r);

}  // namespace kgaudit
