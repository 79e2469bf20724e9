#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ldfm/model.hpp"

namespace ldfm {

struct ModelMetadata {
  double seconds_train = 0.0;
};

struct LoadedModel {
  LdfmModel model;
  ModelMetadata metadata;
  // Normalization or range violations beyond kLoadTolerance. The model is
  // still returned.
  std::vector<std::string> warnings;
};

inline constexpr int kModelFormatVersion = 1;
inline constexpr double kLoadTolerance = 1e-6;

/// JSON text: format_version, variant, variables, the ROOT row and one row
/// per ⟨variable,value⟩ source with weights keyed by label, and a checksum
/// over the canonical content. Doubles are written in shortest round-trip
/// form, so load(save(m)) == m bit for bit.
std::string model_to_text(const LdfmModel& model, const ModelMetadata& metadata = {});

/// Throws DataError on malformed or truncated text, a version mismatch, a
/// checksum mismatch, or missing weights. A file whose `checksum` field has
/// been removed (hand-edited) is accepted without the integrity check.
LoadedModel model_from_text(const std::string& text);

void save_model(const std::filesystem::path& path, const LdfmModel& model,
                const ModelMetadata& metadata = {});
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace ldfm
