#pragma once

// Layout reports in JSON ("v": 1) and aligned text.

#include <string>

#include <json.hpp>

#include "adtlayout/pipeline.hpp"

namespace adtlayout {

nlohmann::ordered_json report_json(const Compilation& comp);
nlohmann::ordered_json adt_report_json(const Compilation& comp, const std::string& adt);

std::string report_text(const Compilation& comp);

}  // namespace adtlayout
