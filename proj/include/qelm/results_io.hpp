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

#pragma once

#include <string>
#include <vector>

#include "qelm/config.hpp"
#include "qelm/experiment.hpp"
#include "qelm/format.hpp"

namespace qelm {

enum class OutputFormat { kCsv, kJson };

// Emits one run's results.
//
// CSV (UTF-8, LF, header row, canonical shortest-round-trip numbers):
//   - sweep runs: `<base>.csv` with rows axis,family,mean_mse,stderr_mse
//     (family-major, axis ascending; an empty result is header-only);
//   - scatter runs: the same series file plus one
//     `<base>_<family>.csv` per family with rows target,prediction;
//   - generalization runs: `<base>.csv` with rows target,prediction,dressed.
//
// JSON: a single `<base>.json` record mirroring the result — schema_version,
// the full config echo, kind, the series, and raw scatter points when
// collected. Emitting, re-reading, and re-emitting a record is byte-stable.
//
// `base_path` is the output path without extension. Files are written to a
// temporary sibling and renamed into place, so failed runs leave no partial
// output. Returns the paths written.
std::vector<std::string> emit_results(const RunPlan& plan, const SweepResult& result,
                                      OutputFormat format,
                                      const std::string& base_path);
std::vector<std::string> emit_results(const RunPlan& plan,
                                      const GeneralizationRun& result,
                                      OutputFormat format,
                                      const std::string& base_path);

// The JSON record for a run (exposed for round-trip tests).
nlohmann::ordered_json result_record(const RunPlan& plan, const SweepResult& result);
nlohmann::ordered_json result_record(const RunPlan& plan,
                                     const GeneralizationRun& result);

// Serializes a JSON record to its canonical byte form (2-space indent plus
// trailing newline).
std::string record_to_bytes(const nlohmann::ordered_json& record);

}  // namespace qelm
