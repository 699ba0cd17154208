#pragma once

#include "json.hpp"
#include "moutard/catalog.hpp"
#include "moutard/moutard.hpp"
#include "moutard/schrodinger.hpp"

// JSON views of the report structures, for the command-line tool and for
// anyone scripting against its output.  Field names are part of the output
// contract; change them only together with the docs.

namespace moutard {

using nlohmann::json;

void to_json(json& j, const ResidualReport& r);
void to_json(json& j, const ScanReport& r);
void to_json(json& j, const TransformStep& s);
void to_json(json& j, const CheckResult& c);
void to_json(json& j, const EntryReport& r);
void to_json(json& j, const CatalogEntry& e);

}  // namespace moutard
