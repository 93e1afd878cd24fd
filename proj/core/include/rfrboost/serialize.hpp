#pragma once

#include <string>

#include "rfrboost/boosting.hpp"

namespace rfrboost {

// Versioned JSON model document. Doubles are written as shortest
// round-trip decimal strings, so save/load reproduces predictions
// bit-exactly.
std::string serialize_model(const BoostedModel& model);
BoostedModel deserialize_model(const std::string& text);

void save_model(const BoostedModel& model, const std::string& path);
BoostedModel load_model(const std::string& path);

}  // namespace rfrboost
