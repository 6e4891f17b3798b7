#include "burnout/modelstore.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "burnout/error.hpp"

namespace burnout::store {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

json optional_real(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json payload_to_json(const models::SvrModel& m) {
  return {{"bias", m.bias},
          {"c", m.c},
          {"epsilon", m.epsilon},
          {"dimension", m.support_vectors.cols()},
          {"kernel", {{"kind", models::to_string(m.kernel.kind)}, {"gamma", m.kernel.gamma}}},
          {"support_vectors", matrix_to_json(m.support_vectors)},
          {"dual_coefs", m.dual_coefs}};
}

json payload_to_json(const models::ForestModel& m) {
  json trees = json::array();
  for (const auto& tree : m.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         value = json::array();
    for (const auto& n : tree.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}});
  }
  return {{"n_trees", m.n_trees},
          {"max_depth", m.max_depth},
          {"min_samples_leaf", m.min_samples_leaf},
          {"max_features", m.max_features},
          {"n_features", m.n_features},
          {"seed", m.seed},
          {"trees", trees}};
}

json payload_to_json(const models::KnnModel& m) {
  return {{"k", m.k},
          {"dimension", m.train_features.cols()},
          {"train_features", matrix_to_json(m.train_features)},
          {"train_targets", m.train_targets}};
}

json to_json(const ModelBundle& b) {
  const auto& p = b.preprocess;
  json medians = json::object();
  for (std::size_t i = 0; i < data::kImputableColumns.size(); ++i) {
    medians[std::string(data::kImputableColumns[i])] = p.medians[i];
  }
  const auto& meta = b.training_meta;
  return {{"format_version", b.format_version},
          {"created_at", b.created_at},
          {"model_kind", models::to_string(b.model_kind())},
          {"preprocess",
           {{"strategy", data::to_string(p.strategy)},
            {"column_order", p.column_order},
            {"medians", medians},
            {"scaler_means", p.scaler_means},
            {"scaler_sds", p.scaler_sds}}},
          {"model_payload", std::visit([](const auto& m) { return payload_to_json(m); }, b.model)},
          {"training_meta",
           {{"n_rows", meta.n_rows},
            {"mean_cv_r2", optional_real(meta.mean_cv_r2)},
            {"c", optional_real(meta.c)},
            {"epsilon", optional_real(meta.epsilon)},
            {"gamma", optional_real(meta.gamma)},
            {"seed", meta.seed}}}};
}

// Typed access to a JSON node that remembers its path for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& why) const {
    throw FormatError("bundle: invalid field \"" + path_ + "\": " + why);
  }

  Node at(const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    auto it = j_.find(key);
    const std::string child = path_.empty() ? key : path_ + "." + key;
    if (it == j_.end()) throw FormatError("bundle: invalid field \"" + child + "\": missing");
    return Node(*it, child);
  }

  Node index(std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  bool is_null() const { return j_.is_null(); }

  double real() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::optional<double> optional_real() const {
    if (j_.is_null()) return std::nullopt;
    return real();
  }

  std::uint64_t uint() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0)) {
      fail("expected a non-negative integer");
    }
    return j_.get<std::uint64_t>();
  }

  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::vector<double> reals() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = index(i).real();
    return out;
  }

  Matrix matrix(std::size_t cols) const {
    Matrix m(0, cols);
    const std::size_t rows = size();
    for (std::size_t r = 0; r < rows; ++r) {
      const auto row = index(r).reals();
      if (row.size() != cols) index(r).fail("expected " + std::to_string(cols) + " entries");
      m.append_row(row);
    }
    return m;
  }

 private:
  const json& j_;
  std::string path_;
};

models::SvrModel svr_from_json(const Node& n) {
  models::SvrModel m;
  const std::size_t dim = n.at("dimension").uint();
  m.bias = n.at("bias").real();
  m.c = n.at("c").real();
  m.epsilon = n.at("epsilon").real();
  const Node kernel = n.at("kernel");
  const auto kind = models::parse_kernel_kind(kernel.at("kind").string());
  if (!kind) kernel.at("kind").fail("unknown kernel");
  m.kernel = {*kind, kernel.at("gamma").real()};
  m.support_vectors = n.at("support_vectors").matrix(dim);
  m.dual_coefs = n.at("dual_coefs").reals();
  return m;
}

models::ForestModel forest_from_json(const Node& n) {
  models::ForestModel m;
  m.n_trees = n.at("n_trees").uint();
  m.max_depth = n.at("max_depth").uint();
  m.min_samples_leaf = n.at("min_samples_leaf").uint();
  m.max_features = n.at("max_features").uint();
  m.n_features = n.at("n_features").uint();
  m.seed = n.at("seed").uint();
  const Node trees = n.at("trees");
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const Node tree = trees.index(t);
    const Node feature = tree.at("feature"), threshold = tree.at("threshold"), left = tree.at("left"),
               right = tree.at("right"), value = tree.at("value");
    const std::size_t count = feature.size();
    for (const Node* col : {&threshold, &left, &right, &value}) {
      if (col->size() != count) col->fail("length differs from feature");
    }
    models::RegressionTree rt;
    rt.nodes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      auto& node = rt.nodes[i];
      const std::int64_t f = feature.index(i).integer();
      if (f < models::TreeNode::kLeaf || f > 1'000'000) feature.index(i).fail("out of range");
      node.feature = static_cast<std::int32_t>(f);
      node.threshold = threshold.index(i).real();
      const auto l = left.index(i).uint();
      const auto r = right.index(i).uint();
      if (l > count || r > count) left.index(i).fail("child index out of range");
      node.left = static_cast<std::uint32_t>(l);
      node.right = static_cast<std::uint32_t>(r);
      node.value = value.index(i).real();
    }
    m.trees.push_back(std::move(rt));
  }
  return m;
}

models::KnnModel knn_from_json(const Node& n) {
  models::KnnModel m;
  m.k = n.at("k").uint();
  m.train_features = n.at("train_features").matrix(n.at("dimension").uint());
  m.train_targets = n.at("train_targets").reals();
  return m;
}

ModelBundle from_json(const json& doc) {
  const Node root(doc, "");
  if (!doc.is_object()) root.fail("top level must be an object");
  ModelBundle b;
  const std::int64_t version = root.at("format_version").integer();
  if (version != kFormatVersion) {
    throw VersionError("bundle: unsupported format_version " + std::to_string(version) + " (this build reads " +
                       std::to_string(kFormatVersion) + ")");
  }
  b.format_version = static_cast<int>(version);
  b.created_at = root.at("created_at").string();

  const Node pre = root.at("preprocess");
  const auto strategy = data::parse_strategy(pre.at("strategy").string());
  if (!strategy) pre.at("strategy").fail("unknown strategy");
  b.preprocess.strategy = *strategy;
  const Node order = pre.at("column_order");
  for (std::size_t i = 0; i < order.size(); ++i) b.preprocess.column_order.push_back(order.index(i).string());
  const Node medians = pre.at("medians");
  for (std::size_t i = 0; i < data::kImputableColumns.size(); ++i) {
    b.preprocess.medians[i] = medians.at(std::string(data::kImputableColumns[i])).real();
  }
  b.preprocess.scaler_means = pre.at("scaler_means").reals();
  b.preprocess.scaler_sds = pre.at("scaler_sds").reals();

  const Node kind_node = root.at("model_kind");
  const auto kind = models::parse_model_kind(kind_node.string());
  if (!kind) kind_node.fail("unknown model kind");
  const Node payload = root.at("model_payload");
  switch (*kind) {
    case models::ModelKind::Svr: b.model = svr_from_json(payload); break;
    case models::ModelKind::Forest: b.model = forest_from_json(payload); break;
    case models::ModelKind::Knn: b.model = knn_from_json(payload); break;
  }

  const Node meta = root.at("training_meta");
  b.training_meta.n_rows = meta.at("n_rows").uint();
  b.training_meta.mean_cv_r2 = meta.at("mean_cv_r2").optional_real();
  b.training_meta.c = meta.at("c").optional_real();
  b.training_meta.epsilon = meta.at("epsilon").optional_real();
  b.training_meta.gamma = meta.at("gamma").optional_real();
  b.training_meta.seed = meta.at("seed").uint();
  return b;
}

}  // namespace

void ModelBundle::validate() const {
  if (format_version != kFormatVersion) {
    throw VersionError("bundle: unsupported format_version " + std::to_string(format_version));
  }
  preprocess.validate();
  models::validate(model);
  const std::size_t dim = models::input_dimension(model);
  if (dim != preprocess.column_order.size()) {
    throw FormatError("bundle: model expects " + std::to_string(dim) + " features but preprocess has " +
                      std::to_string(preprocess.column_order.size()));
  }
}

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string serialize_bundle(const ModelBundle& bundle) {
  bundle.validate();
  return std::string(kMagicLine) + to_json(bundle).dump() + "\n";
}

ModelBundle parse_bundle(std::string_view text) {
  if (text.substr(0, kMagicLine.size()) != kMagicLine) {
    throw FormatError("bundle: missing \"#bnl-v1\" header line");
  }
  text.remove_prefix(kMagicLine.size());
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("bundle: malformed JSON: ") + e.what());
  }
  ModelBundle bundle = from_json(doc);
  bundle.validate();
  return bundle;
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  const std::string text = serialize_bundle(bundle);
  // Write a sibling file opened exclusively, then rename over the target.
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError(path, std::strerror(errno));
  std::size_t written = 0;
  while (written < text.size()) {
    const ssize_t n = ::write(fd, text.data() + written, text.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      ::unlink(tmp.c_str());
      throw IoError(path, std::strerror(err));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::close(fd) != 0) {
    const int err = errno;
    ::unlink(tmp.c_str());
    throw IoError(path, std::strerror(err));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    ::unlink(tmp.c_str());
    throw IoError(path, ec.message());
  }
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  try {
    return parse_bundle(buf.str());
  } catch (const FormatError& e) {
    if (dynamic_cast<const VersionError*>(&e)) throw VersionError(path + ": " + e.what());
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace burnout::store
