#pragma once

#include <string>

#include "mor/rom.hpp"

namespace mor {

// Persists a trained model as manifest.json plus one matrix container per
// array under dir; load_model reverses it exactly.
void save_model(const RomModel& model, const std::string& dir);
RomModel load_model(const std::string& dir);

}  // namespace mor
