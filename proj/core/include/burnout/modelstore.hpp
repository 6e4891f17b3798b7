#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "burnout/dataset.hpp"
#include "burnout/models.hpp"

namespace burnout::store {

inline constexpr int kFormatVersion = 1;
// First line of every bundle file, newline included: 8 bytes.
inline constexpr std::string_view kMagicLine = "#bnl-v1\n";
inline constexpr std::string_view kBundleExtension = ".bnl.json";

struct TrainingMeta {
  std::size_t n_rows = 0;
  std::optional<double> mean_cv_r2;
  std::optional<double> c;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

// Preprocessing parameters and a trained model, persisted as one file.
struct ModelBundle {
  int format_version = kFormatVersion;
  std::string created_at;  // ISO-8601 UTC
  data::PreprocessParams preprocess;
  models::Model model;
  TrainingMeta training_meta;

  models::ModelKind model_kind() const { return models::kind_of(model); }
  // Throws FormatError naming the first broken invariant.
  void validate() const;

  friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

std::string utc_timestamp_now();

// Canonical text form: magic line, then JSON with sorted keys and shortest
// round-trip reals. Equal bundles serialize to identical bytes.
std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle parse_bundle(std::string_view text);

void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace burnout::store
