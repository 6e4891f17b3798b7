#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "burnout/forest.hpp"
#include "burnout/knn.hpp"
#include "burnout/svr.hpp"

namespace burnout::models {

enum class ModelKind { Svr, Forest, Knn };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view s);  // accepts "Svr" or "svr", etc.

using Model = std::variant<SvrModel, ForestModel, KnnModel>;

ModelKind kind_of(const Model& m);
double predict(const Model& m, std::span<const double> x);
std::size_t input_dimension(const Model& m);
void validate(const Model& m);

}  // namespace burnout::models
