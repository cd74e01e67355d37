#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "gpod/errors.hpp"
#include "gpod/extension.hpp"

namespace gpod {

inline constexpr const char* kModelFormat = "gpod-extension-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& rows, const char* field) {
  if (!rows.is_array()) fail(ErrorKind::config, std::string("model field '") + field + "' is not an array");
  const Index r = static_cast<Index>(rows.size());
  const Index c = r == 0 ? 0 : static_cast<Index>(rows.at(0).size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != c)
      fail(ErrorKind::config, std::string("model field '") + field + "' is ragged at row " + std::to_string(i));
    for (Index j = 0; j < c; ++j) m(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
  }
  return m;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ExtensionModel& model) {
  nlohmann::json doc;
  doc["format"] = kModelFormat;
  doc["version"] = kModelVersion;
  doc["variant"] = to_string(model.variant);
  doc["kernel"] = {{"kind", "gaussian"}, {"sigma", model.kernel.sigma}};
  doc["scaling_mode"] = to_string(model.scaling);
  doc["degenerate_threshold"] = model.degenerate_threshold;
  doc["eigenvalues"] = std::vector<double>(model.eigenvalues.data(), model.eigenvalues.data() + model.eigenvalues.size());
  doc["train_points"] = detail::matrix_to_json(model.train_points);
  doc["train_vectors"] = detail::matrix_to_json(model.train_vectors);
  return doc;
}

inline Variant parse_variant(const std::string& s) {
  if (s == "ratiocut") return Variant::ratiocut;
  if (s == "ncut") return Variant::ncut;
  fail(ErrorKind::config, "unknown variant '" + s + "' (expected ratiocut or ncut)");
}

inline ScalingMode parse_scaling(const std::string& s) {
  if (s == "inv-sqrt-lambda") return ScalingMode::inv_sqrt_lambda;
  if (s == "inv-lambda") return ScalingMode::inv_lambda;
  fail(ErrorKind::config, "unknown scaling mode '" + s + "' (expected inv-sqrt-lambda or inv-lambda)");
}

inline ExtensionModel model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kModelFormat)
      fail(ErrorKind::config, "not an extension model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelVersion)
      fail(ErrorKind::config, "unsupported model version " + std::to_string(version));
    if (doc.at("kernel").at("kind").get<std::string>() != "gaussian")
      fail(ErrorKind::config, "unsupported kernel kind");

    ExtensionModel model;
    model.variant = parse_variant(doc.at("variant").get<std::string>());
    model.kernel = KernelSpec::gaussian(doc.at("kernel").at("sigma").get<double>());
    model.scaling = parse_scaling(doc.at("scaling_mode").get<std::string>());
    model.degenerate_threshold = doc.at("degenerate_threshold").get<double>();
    const auto values = doc.at("eigenvalues").get<std::vector<double>>();
    model.eigenvalues = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
    model.train_points = detail::matrix_from_json(doc.at("train_points"), "train_points");
    model.train_vectors = detail::matrix_from_json(doc.at("train_vectors"), "train_vectors");
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("malformed model document: ") + e.what());
  }
}

inline void save_model(const ExtensionModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::input, "cannot write model file " + path);
  out << model_to_json(model).dump() << '\n';
}

inline ExtensionModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot read model file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, "model file " + path + " is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace gpod
