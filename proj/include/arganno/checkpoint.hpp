#pragma once

#include <string>

#include "arganno/encoder.hpp"

namespace arganno {

/// Deterministic binary checkpoint: magic, config header, then one named
/// section per parameter tensor (see docs/checkpoint-format.md).
void save_checkpoint(const Params& params, const std::string& path);
Params load_checkpoint(const std::string& path);

}  // namespace arganno
