#pragma once

#include <json.hpp>

#include "inclab/incoherence.hpp"
#include "inclab/sampling.hpp"
#include "inclab/selectors.hpp"
#include "inclab/types.hpp"
#include "inclab/witness.hpp"

namespace inclab {

// Insertion-ordered JSON so serialized reports have a stable field order.
using Json = nlohmann::ordered_json;

Json to_json(const Spread& spread);
Spread spread_from_json(const Json& j);

Json to_json(const ParamClass& cls);
ParamClass param_class_from_json(const Json& j, int p);

Json to_json(const MarginRow& row);
Json to_json(const IncoherenceReport& report);

Json to_json(const RecoveryVerdict& verdict);

Json to_json(const Theorem1Summary& summary);
Json to_json(const Conjecture1Report& report);
Json to_json(const ConcentrationReport& report);

}  // namespace inclab
