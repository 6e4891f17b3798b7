#include "burnout/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "burnout/error.hpp"

namespace burnout::app {

namespace {

using nlohmann::json;

std::string range_message(double lo, double hi) {
  auto fmt = [](double v) {
    std::string s = json(v).dump();
    if (s.size() > 2 && s.ends_with(".0")) s.resize(s.size() - 2);
    return s;
  };
  return "must be between " + fmt(lo) + " and " + fmt(hi);
}

json meta_json(const store::ModelBundle& b) {
  const auto& m = b.training_meta;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"n_rows", m.n_rows}, {"mean_cv_r2", opt(m.mean_cv_r2)}, {"c", opt(m.c)},
          {"epsilon", opt(m.epsilon)}, {"gamma", opt(m.gamma)}, {"seed", m.seed}};
}

}  // namespace

void PredictRequest::validate() const {
  std::vector<FieldError> errors;
  if (designation < data::kDesignationMin || designation > data::kDesignationMax) {
    errors.push_back({"designation", range_message(data::kDesignationMin, data::kDesignationMax)});
  }
  if (resource_allocation < data::kResourceMin || resource_allocation > data::kResourceMax) {
    errors.push_back({"resource_allocation", range_message(data::kResourceMin, data::kResourceMax)});
  }
  if (!std::isfinite(mental_fatigue_score) || mental_fatigue_score < data::kFatigueMin ||
      mental_fatigue_score > data::kFatigueMax) {
    errors.push_back({"mental_fatigue_score", range_message(data::kFatigueMin, data::kFatigueMax)});
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
}

data::EmployeeRecord PredictRequest::to_record() const {
  data::EmployeeRecord r;
  r.gender = gender;
  r.company_type = company_type;
  r.wfh_setup = wfh_setup;
  r.designation = designation;
  r.resource_allocation = resource_allocation;
  r.mental_fatigue_score = mental_fatigue_score;
  return r;
}

std::string_view to_string(RiskBand band) {
  switch (band) {
    case RiskBand::Low: return "Low";
    case RiskBand::Moderate: return "Moderate";
    case RiskBand::High: return "High";
  }
  return "?";
}

RiskBand risk_band(double burn_rate) {
  if (burn_rate < kModerateThreshold) return RiskBand::Low;
  if (burn_rate < kHighThreshold) return RiskBand::Moderate;
  return RiskBand::High;
}

PredictResponse predict_pipeline(const store::ModelBundle& bundle, const PredictRequest& request) {
  request.validate();
  const data::FeatureVector raw = data::encode_imputed(request.to_record(), bundle.preprocess);
  const data::FeatureVector x = data::standardize(raw, bundle.preprocess);
  if (models::input_dimension(bundle.model) != x.size()) {
    throw Error("predict_pipeline: bundle model expects a different feature width");
  }
  PredictResponse out;
  out.burn_rate_raw = models::predict(bundle.model, x);
  out.burn_rate = std::clamp(out.burn_rate_raw, 0.0, 1.0);
  out.risk_band = risk_band(out.burn_rate);
  out.model_meta = {bundle.model_kind(), bundle.format_version, bundle.training_meta.mean_cv_r2};
  return out;
}

PredictRequest parse_predict_request(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body.begin(), body.end());
  } catch (const json::parse_error&) {
    throw ValidationError("body", "not valid JSON");
  }
  if (!doc.is_object()) throw ValidationError("body", "expected a JSON object");

  PredictRequest req;
  std::vector<FieldError> errors;

  auto integer_field = [&](const char* name, int lo, int hi, int& out) {
    auto it = doc.find(name);
    if (it == doc.end() || it->is_null()) {
      errors.push_back({name, "missing"});
      return;
    }
    if (!it->is_number() || std::floor(it->get<double>()) != it->get<double>()) {
      errors.push_back({name, "must be an integer"});
      return;
    }
    const double v = it->get<double>();
    if (v < lo || v > hi) {
      errors.push_back({name, range_message(lo, hi)});
      return;
    }
    out = static_cast<int>(v);
  };
  auto real_field = [&](const char* name, double lo, double hi, double& out) {
    auto it = doc.find(name);
    if (it == doc.end() || it->is_null()) {
      errors.push_back({name, "missing"});
      return;
    }
    if (!it->is_number()) {
      errors.push_back({name, "must be a number"});
      return;
    }
    const double v = it->get<double>();
    if (!(v >= lo && v <= hi)) {
      errors.push_back({name, range_message(lo, hi)});
      return;
    }
    out = v;
  };
  auto enum_field = [&](const char* name, auto parse, std::string_view options, auto& out) {
    auto it = doc.find(name);
    if (it == doc.end() || it->is_null()) {
      errors.push_back({name, "missing"});
      return;
    }
    if (!it->is_string()) {
      errors.push_back({name, "must be one of " + std::string(options)});
      return;
    }
    auto parsed = parse(it->template get<std::string>());
    if (!parsed) {
      errors.push_back({name, "must be one of " + std::string(options)});
      return;
    }
    out = *parsed;
  };

  integer_field("designation", data::kDesignationMin, data::kDesignationMax, req.designation);
  integer_field("resource_allocation", data::kResourceMin, data::kResourceMax, req.resource_allocation);
  real_field("mental_fatigue_score", data::kFatigueMin, data::kFatigueMax, req.mental_fatigue_score);
  enum_field("gender", data::parse_gender, "Female, Male", req.gender);
  enum_field("company_type", data::parse_company_type, "Service, Product", req.company_type);
  enum_field("wfh_setup", data::parse_wfh, "Yes, No", req.wfh_setup);

  if (!errors.empty()) throw ValidationError(std::move(errors));
  return req;
}

std::string to_json(const PredictResponse& r) {
  json doc{{"burn_rate_raw", r.burn_rate_raw},
           {"burn_rate", r.burn_rate},
           {"risk_band", to_string(r.risk_band)},
           {"model_meta",
            {{"model_kind", models::to_string(r.model_meta.model_kind)},
             {"bundle_version", r.model_meta.bundle_version},
             {"mean_cv_r2", r.model_meta.mean_cv_r2 ? json(*r.model_meta.mean_cv_r2) : json(nullptr)}}}};
  return doc.dump();
}

std::string to_json(const PredictRequest& r) {
  json doc{{"designation", r.designation},
           {"resource_allocation", r.resource_allocation},
           {"mental_fatigue_score", r.mental_fatigue_score},
           {"gender", data::to_string(r.gender)},
           {"company_type", data::to_string(r.company_type)},
           {"wfh_setup", data::to_string(r.wfh_setup)}};
  return doc.dump();
}

std::string model_info_json(const store::ModelBundle& bundle) {
  json features{
      {"designation", {{"type", "integer"}, {"min", data::kDesignationMin}, {"max", data::kDesignationMax}, {"step", 1}}},
      {"resource_allocation", {{"type", "integer"}, {"min", data::kResourceMin}, {"max", data::kResourceMax}, {"step", 1}}},
      {"mental_fatigue_score", {{"type", "real"}, {"min", data::kFatigueMin}, {"max", data::kFatigueMax}, {"step", 0.1}}},
      {"gender", {{"type", "enum"}, {"options", {"Female", "Male"}}}},
      {"company_type", {{"type", "enum"}, {"options", {"Service", "Product"}}}},
      {"wfh_setup", {{"type", "enum"}, {"options", {"Yes", "No"}}}}};
  json doc{{"model_kind", models::to_string(bundle.model_kind())},
           {"bundle_version", bundle.format_version},
           {"created_at", bundle.created_at},
           {"training_meta", meta_json(bundle)},
           {"features", features},
           {"risk_bands",
            {{"thresholds", {kModerateThreshold, kHighThreshold}}, {"labels", {"Low", "Moderate", "High"}}}}};
  return doc.dump();
}

std::string validation_error_json(const ValidationError& error) {
  json fields = json::array();
  for (const auto& f : error.fields()) fields.push_back({{"field", f.field}, {"message", f.message}});
  return json{{"error", "validation failed"}, {"fields", fields}}.dump();
}

}  // namespace burnout::app
