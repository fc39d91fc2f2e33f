#include "wsekit/config.hpp"

#include <functional>
#include <map>
#include <string>

#include "wsekit/csv.hpp"
#include "wsekit/error.hpp"

namespace wsekit {

using nlohmann::json;

namespace {

std::size_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorKind::config, "config key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw Error(ErrorKind::config, "config key '" + key + "' must be a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw Error(ErrorKind::config, "config key '" + key + "' must be a string");
  return v.get<std::string>();
}

template <typename Enum>
Enum as_enum(const json& v, const std::string& key, std::initializer_list<std::pair<const char*, Enum>> options) {
  const auto s = as_string(v, key);
  for (const auto& [name, value] : options) {
    if (s == name) return value;
  }
  throw Error(ErrorKind::config, "config key '" + key + "' has unsupported value '" + s + "'");
}

}  // namespace

RunConfig RunConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  RunConfig c;
  using Setter = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"ewma_span", [&](const json& v, const std::string& k) { c.filter.span = as_count(v, k); }},
      {"max_dev_m", [&](const json& v, const std::string& k) { c.filter.max_dev = as_number(v, k); }},
      {"iterations", [&](const json& v, const std::string& k) { c.filter.iterations = as_count(v, k); }},
      {"ewma_mode",
       [&](const json& v, const std::string& k) {
         c.filter.ewma_mode = as_enum<EwmaMode>(v, k, {{"adjusted", EwmaMode::adjusted}, {"recursive", EwmaMode::recursive}});
       }},
      {"rejection_mode",
       [&](const json& v, const std::string& k) {
         c.filter.rejection =
             as_enum<RejectionMode>(v, k, {{"reevaluate", RejectionMode::reevaluate}, {"cumulative", RejectionMode::cumulative}});
       }},
      {"sample_step_m", [&](const json& v, const std::string& k) { c.sample_step_m = as_number(v, k); }},
      {"edge_sd_window", [&](const json& v, const std::string& k) { c.edge_sd_window = as_count(v, k); }},
      {"prediction_sd_window", [&](const json& v, const std::string& k) { c.prediction_sd_window = as_count(v, k); }},
      {"sd_basis",
       [&](const json& v, const std::string& k) {
         c.sd_basis = as_enum<SdBasis>(v, k, {{"values", SdBasis::values}, {"residuals", SdBasis::residuals}});
       }},
      {"gt_degree", [&](const json& v, const std::string& k) { c.gt_degree = as_count(v, k); }},
      {"breakpoints",
       [&](const json& v, const std::string& k) {
         if (!v.is_array()) throw Error(ErrorKind::config, "config key '" + k + "' must be an array");
         c.breakpoints.clear();
         for (const auto& b : v) c.breakpoints.push_back(as_number(b, k));
       }},
      {"truth_step_m", [&](const json& v, const std::string& k) { c.truth_step_m = as_number(v, k); }},
      {"patch_side_m", [&](const json& v, const std::string& k) { c.patch_side_m = as_number(v, k); }},
      {"range_threshold_m", [&](const json& v, const std::string& k) { c.range_threshold_m = as_number(v, k); }},
      {"sigma_dsm", [&](const json& v, const std::string& k) { c.standardization.sigma_dsm = as_number(v, k); }},
      {"uce_bins", [&](const json& v, const std::string& k) { c.uce_bins = as_count(v, k); }},
      {"dedupe_augmentation",
       [&](const json& v, const std::string& k) {
         if (!v.is_boolean()) throw Error(ErrorKind::config, "config key '" + k + "' must be a boolean");
         c.dedupe_augmentation = v.get<bool>();
       }},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorKind::config, "unknown config key '" + key + "'");
    it->second(value, key);
  }
  c.filter.validate();
  c.standardization.validate();
  if (!(c.sample_step_m > 0) || !(c.truth_step_m > 0) || !(c.patch_side_m > 0) || !(c.range_threshold_m > 0)) {
    throw Error(ErrorKind::config, "step, patch side and range threshold must be positive");
  }
  if (c.edge_sd_window < 1 || c.prediction_sd_window < 1 || c.uce_bins < 1) {
    throw Error(ErrorKind::config, "sd windows and uce_bins must be >= 1");
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, path.string() + ": " + e.what());
  }
  return from_json(doc);
}

json RunConfig::to_json() const {
  return {{"ewma_span", filter.span},
          {"max_dev_m", filter.max_dev},
          {"iterations", filter.iterations},
          {"ewma_mode", filter.ewma_mode == EwmaMode::adjusted ? "adjusted" : "recursive"},
          {"rejection_mode", filter.rejection == RejectionMode::reevaluate ? "reevaluate" : "cumulative"},
          {"sample_step_m", sample_step_m},
          {"edge_sd_window", edge_sd_window},
          {"prediction_sd_window", prediction_sd_window},
          {"sd_basis", sd_basis == SdBasis::values ? "values" : "residuals"},
          {"gt_degree", gt_degree},
          {"breakpoints", breakpoints},
          {"truth_step_m", truth_step_m},
          {"patch_side_m", patch_side_m},
          {"range_threshold_m", range_threshold_m},
          {"sigma_dsm", standardization.sigma_dsm},
          {"uce_bins", uce_bins},
          {"dedupe_augmentation", dedupe_augmentation}};
}

}  // namespace wsekit
