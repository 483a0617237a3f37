// Copyright 2026 The opfx Authors
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

#include <stdexcept>
#include <string>
#include <vector>

#include "opfx/exhaustive_sampler.hpp"
#include "opfx/sequential_collector.hpp"
#include "opfx/set_metrics.hpp"

namespace opfx {

// Inputs that belong to different networks, or a manifest whose inputs
// changed since it was written.
class MismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kToolVersion = "0.1.0";

// Every command writes its data files and a manifest into out_dir. The
// manifest names the artifacts relative to its own directory and holds the
// full configuration, so replay() can regenerate the same bytes.
struct RunResult {
  std::string manifest_path;
  std::vector<std::string> artifacts;  // absolute paths
  std::string summary;                 // human-readable report
  // Seed infeasible, or more than half of the steps ended as DNF.
  bool failed = false;
};

struct CollectRequest {
  std::string case_path;
  CollectorConfig config;
  std::string out_dir = ".";
  std::string name;  // defaults to the objective id
};

struct ExhaustRequest {
  std::string case_path;
  SamplerConfig config;
  std::string out_dir = ".";
  std::string name = "exhaustive";
};

struct CompareRequest {
  std::vector<std::string> libraries;
  std::string exhaustive;
  std::vector<NormKind> norms = {NormKind::PQ, NormKind::PV};
  InjectionSet injections = InjectionSet::Generators;
  // Case file for the network; needed for InjectionSet::AllBuses and used
  // for the system label. Optional otherwise.
  std::string case_path;
  std::string system;  // defaults to the network name or "system"
  std::string out_dir = ".";
  std::string name = "compare";
};

struct ScoreRequest {
  std::vector<std::string> tables;
  std::string out_dir = ".";
  std::string name = "score";
};

RunResult run_collect(const CollectRequest& req);
RunResult run_exhaust(const ExhaustRequest& req);
RunResult run_compare(const CompareRequest& req);
RunResult run_score(const ScoreRequest& req);

// Re-runs the command recorded in a manifest. An empty out_dir writes next
// to the manifest. Throws MismatchError when an input file no longer has
// the recorded hash.
RunResult replay(const std::string& manifest_path, const std::string& out_dir = "");

// Label of a library inside a distance table: its objective id, or the file
// stem for a library that holds only the seed.
std::string library_label(const SolutionLibrary& lib, const std::string& path);

}  // namespace opfx
