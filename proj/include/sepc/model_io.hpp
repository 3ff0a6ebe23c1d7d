#pragma once

#include <string>
#include <vector>

#include "sepc/partition.hpp"

namespace sepc {

inline constexpr int kModelFormatVersion = 1;

/// Serialized model bundle: one model for binary problems, one per class
/// for one-vs-all, plus the original class value spellings.
struct ModelBundle {
  std::vector<PartitionModel> models;
  std::vector<std::string> class_values;

  bool binary() const { return models.size() == 1; }
};

/// Writes a structured JSON document (.sepc.json). Doubles are emitted
/// in shortest-exact decimal form, so load(save(m)) restores every
/// coefficient bit-for-bit.
void save_model(const ModelBundle& bundle, const std::string& path);

/// Throws IoError / CorruptModel / VersionMismatch. Every restored
/// ellipsoid is revalidated (symmetry + positive definiteness).
ModelBundle load_model(const std::string& path);

}  // namespace sepc
