/*
   Copyright 2026 The brwlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "brw/error.hpp"

namespace brw {

using Json = nlohmann::json;

inline constexpr int kManifestSchema = 1;

/// Command-line values that take precedence over the config file.
struct JobOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::filesystem::path out_dir;
};

const std::vector<std::string>& job_names();

/// Runs one subcommand. Tables are computed in memory and written only after
/// the whole job succeeded; manifest.json is written last. Returns the
/// manifest.
Json run_job(const std::string& command, const Json& config, const JobOptions& options);

/// Re-runs the job recorded in a manifest. Only the options given are
/// overridden.
Json rerun_manifest(const Json& manifest, const JobOptions& options);

int exit_code(ErrorKind kind);

Json error_json(const Error& e);

} // namespace brw
