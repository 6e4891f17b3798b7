#include "burnout/models.hpp"

#include "burnout/error.hpp"

namespace burnout::models {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Svr: return "Svr";
    case ModelKind::Forest: return "Forest";
    case ModelKind::Knn: return "Knn";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  if (s == "Svr" || s == "svr" || s == "svm") return ModelKind::Svr;
  if (s == "Forest" || s == "forest" || s == "rf") return ModelKind::Forest;
  if (s == "Knn" || s == "knn") return ModelKind::Knn;
  return std::nullopt;
}

ModelKind kind_of(const Model& m) {
  return std::visit(overloaded{[](const SvrModel&) { return ModelKind::Svr; },
                               [](const ForestModel&) { return ModelKind::Forest; },
                               [](const KnnModel&) { return ModelKind::Knn; }},
                    m);
}

double predict(const Model& m, std::span<const double> x) {
  return std::visit(overloaded{[&](const SvrModel& s) { return predict_svr(s, x); },
                               [&](const ForestModel& f) { return predict_forest(f, x); },
                               [&](const KnnModel& k) { return knn_predict(k, x); }},
                    m);
}

std::size_t input_dimension(const Model& m) {
  return std::visit(overloaded{[](const SvrModel& s) { return s.support_vectors.cols(); },
                               [](const ForestModel& f) { return f.n_features; },
                               [](const KnnModel& k) { return k.train_features.cols(); }},
                    m);
}

void validate(const Model& m) {
  std::visit([](const auto& model) { model.validate(); }, m);
}

}  // namespace burnout::models
