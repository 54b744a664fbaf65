#pragma once

#include <string>
#include <string_view>

#include "hyperorder/nn/model.hpp"

namespace hyperorder::nn {

inline constexpr int kCheckpointVersion = 1;

/// JSON checkpoint: format tag, version, dimensions, layer wiring, vocabulary
/// (sorted) and every matrix row-major with round-trip precision.
std::string serialize_model(const Model& model);
/// Throws FormatError on a version mismatch or any inconsistent shape.
Model deserialize_model(std::string_view text);

void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace hyperorder::nn
