#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "burnout/matrix.hpp"

namespace burnout::models {

struct KnnModel {
  Matrix train_features;
  std::vector<double> train_targets;
  std::size_t k = 5;

  void validate() const;
  friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

KnnModel fit_knn(Matrix features, std::vector<double> targets, std::size_t k = 5);

// Mean target of the k nearest rows by Euclidean distance; ties go to the lower row index.
double knn_predict(const KnnModel& model, std::span<const double> x);

}  // namespace burnout::models
