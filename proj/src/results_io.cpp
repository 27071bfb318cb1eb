// Copyright 2026 The qelm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qelm/results_io.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace qelm {

namespace {

constexpr int kSchemaVersion = 1;

// Writes through a temporary sibling and renames into place, so an error
// never leaves a partial output file behind.
void write_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  try {
    {
      std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
      if (!file) {
        throw std::runtime_error("emit_results: cannot open '" + tmp + "'");
      }
      file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!file) {
        throw std::runtime_error("emit_results: write failed for '" + tmp + "'");
      }
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
}

// Family labels become file-name fragments for per-family scatter files.
std::string sanitize_for_filename(const std::string& label) {
  std::string out;
  out.reserve(label.size());
  for (const char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      out += c;
    } else if (c == ';') {
      out += '_';
    }
    // '=' and anything else drops out: "eps=0.2" -> "eps0.2".
  }
  return out;
}

std::string sweep_series_csv(const SweepResult& result) {
  std::string out = "axis,family,mean_mse,stderr_mse\n";
  for (const SweepCurve& curve : result.curves) {
    for (std::size_t a = 0; a < result.axis_values.size(); ++a) {
      out += format_double(result.axis_values[a]);
      out += ',';
      out += curve.family;
      out += ',';
      out += format_double(curve.mean_test_mse(static_cast<Eigen::Index>(a)));
      out += ',';
      out += format_double(curve.stderr_test_mse(static_cast<Eigen::Index>(a)));
      out += '\n';
    }
  }
  return out;
}

std::string scatter_csv(const Eigen::VectorXd& targets,
                        const Eigen::VectorXd& predictions) {
  std::string out = "target,prediction\n";
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    out += format_double(targets(i));
    out += ',';
    out += format_double(predictions(i));
    out += '\n';
  }
  return out;
}

std::string generalization_csv(const GeneralizationRun& result) {
  std::string out = "target,prediction,dressed\n";
  for (Eigen::Index i = 0; i < result.targets.size(); ++i) {
    out += format_double(result.targets(i));
    out += ',';
    out += format_double(result.raw(i));
    out += ',';
    out += format_double(result.dressed(i));
    out += '\n';
  }
  return out;
}

const char* kind_name(RunPlan::Kind kind) {
  switch (kind) {
    case RunPlan::Kind::kSweep:
      return "sweep";
    case RunPlan::Kind::kScatter:
      return "scatter";
    case RunPlan::Kind::kGeneralization:
      return "generalization";
  }
  throw std::invalid_argument("kind_name: unknown run kind");
}

}  // namespace

nlohmann::ordered_json result_record(const RunPlan& plan, const SweepResult& result) {
  nlohmann::ordered_json record;
  record["schema_version"] = kSchemaVersion;
  record["kind"] = kind_name(plan.kind);
  record["config"] = config_to_json(plan.config);
  record["axis_name"] = result.axis_name;
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const SweepCurve& curve : result.curves) {
    for (std::size_t a = 0; a < result.axis_values.size(); ++a) {
      series.push_back(
          {{"axis", result.axis_values[a]},
           {"family", curve.family},
           {"mean_mse", curve.mean_test_mse(static_cast<Eigen::Index>(a))},
           {"stderr_mse", curve.stderr_test_mse(static_cast<Eigen::Index>(a))}});
    }
  }
  record["series"] = std::move(series);
  if (plan.kind == RunPlan::Kind::kScatter) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const SweepCurve& curve : result.curves) {
      for (Eigen::Index i = 0; i < result.scatter_targets.size(); ++i) {
        points.push_back({{"family", curve.family},
                          {"target", result.scatter_targets(i)},
                          {"prediction", curve.scatter_predictions(i)}});
      }
    }
    record["raw_points"] = std::move(points);
  }
  return record;
}

nlohmann::ordered_json result_record(const RunPlan& plan,
                                     const GeneralizationRun& result) {
  nlohmann::ordered_json record;
  record["schema_version"] = kSchemaVersion;
  record["kind"] = kind_name(plan.kind);
  record["config"] = config_to_json(plan.config);
  record["axis_name"] = "input_qubits_test";
  record["series"] = nlohmann::ordered_json::array(
      {{{"axis", plan.config.input_qubits_test},
        {"family", "dressed"},
        {"mean_mse", result.mean_dressed_mse},
        {"stderr_mse", result.stderr_dressed_mse}}});
  record["mean_raw_correlation"] = result.mean_raw_correlation;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < result.targets.size(); ++i) {
    points.push_back({{"target", result.targets(i)},
                      {"prediction", result.raw(i)},
                      {"dressed", result.dressed(i)}});
  }
  record["raw_points"] = std::move(points);
  return record;
}

std::string record_to_bytes(const nlohmann::ordered_json& record) {
  return record.dump(2) + "\n";
}

std::vector<std::string> emit_results(const RunPlan& plan, const SweepResult& result,
                                      OutputFormat format,
                                      const std::string& base_path) {
  std::vector<std::string> paths;
  if (format == OutputFormat::kJson) {
    const std::string path = base_path + ".json";
    write_atomic(path, record_to_bytes(result_record(plan, result)));
    paths.push_back(path);
    return paths;
  }
  const std::string series_path = base_path + ".csv";
  write_atomic(series_path, sweep_series_csv(result));
  paths.push_back(series_path);
  if (plan.kind == RunPlan::Kind::kScatter) {
    for (const SweepCurve& curve : result.curves) {
      const std::string path =
          base_path + "_" + sanitize_for_filename(curve.family) + ".csv";
      write_atomic(path, scatter_csv(result.scatter_targets,
                                     curve.scatter_predictions));
      paths.push_back(path);
    }
  }
  return paths;
}

std::vector<std::string> emit_results(const RunPlan& plan,
                                      const GeneralizationRun& result,
                                      OutputFormat format,
                                      const std::string& base_path) {
  std::vector<std::string> paths;
  if (format == OutputFormat::kJson) {
    const std::string path = base_path + ".json";
    write_atomic(path, record_to_bytes(result_record(plan, result)));
    paths.push_back(path);
  } else {
    const std::string path = base_path + ".csv";
    write_atomic(path, generalization_csv(result));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace qelm
