#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "burnout/dataset.hpp"
#include "burnout/modelstore.hpp"

namespace burnout::app {

// One employee as entered in the what-if form. Ranges are checked by validate().
struct PredictRequest {
  int designation = 0;
  int resource_allocation = 1;
  double mental_fatigue_score = 0.0;
  data::Gender gender = data::Gender::Female;
  data::CompanyType company_type = data::CompanyType::Service;
  data::WfhSetup wfh_setup = data::WfhSetup::No;

  // Throws ValidationError listing every out-of-range field.
  void validate() const;
  data::EmployeeRecord to_record() const;
};

enum class RiskBand { Low, Moderate, High };

inline constexpr double kModerateThreshold = 1.0 / 3.0;
inline constexpr double kHighThreshold = 2.0 / 3.0;

std::string_view to_string(RiskBand band);
RiskBand risk_band(double burn_rate);

struct ModelMeta {
  models::ModelKind model_kind = models::ModelKind::Svr;
  int bundle_version = store::kFormatVersion;
  std::optional<double> mean_cv_r2;
};

struct PredictResponse {
  double burn_rate_raw = 0.0;
  double burn_rate = 0.0;  // clamped to [0, 1]
  RiskBand risk_band = RiskBand::Low;
  ModelMeta model_meta;
};

// Encode, standardize with the bundle's stored scaler, run the model, clamp, band.
PredictResponse predict_pipeline(const store::ModelBundle& bundle, const PredictRequest& request);

// Parses a JSON request body. Collects every missing, mistyped or out-of-range
// field into one ValidationError.
PredictRequest parse_predict_request(std::string_view body);

std::string to_json(const PredictResponse& response);
std::string to_json(const PredictRequest& request);

// Training metadata, input ranges and band thresholds for UI configuration.
std::string model_info_json(const store::ModelBundle& bundle);

std::string validation_error_json(const ValidationError& error);

}  // namespace burnout::app
