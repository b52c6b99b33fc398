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


#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "brw/io.hpp"
#include "brw/jobs.hpp"

namespace fs = std::filesystem;
using brw::Json;

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out_dir;
    std::string config;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--seed", c.seed, "Base seed");
    sub->add_option("--threads", c.threads, "Worker threads (affects timing only)");
    sub->add_option("--out-dir", c.out_dir, "Output directory (also BRW_OUT_DIR)");
    sub->add_option("--config,-c", c.config, "JSON config file");
}

Json parse_value(const std::string& text)
{
    Json v = Json::parse(text, nullptr, false);
    return v.is_discarded() ? Json(text) : v;
}

// Leftover arguments: `--key value` or `--key=value` pairs override config
// fields (dots address nested objects); bare words are positionals.
void apply_extras(const std::vector<std::string>& extras, Json& config, std::vector<std::string>& positionals)
{
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& arg = extras[i];
        if (arg.rfind("--", 0) != 0) {
            positionals.push_back(arg);
            continue;
        }
        std::string key = arg.substr(2), value;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
            value = extras[++i];
        } else {
            throw brw::Error(brw::ErrorKind::ConfigError, "flag without a value: " + arg, key);
        }
        for (char& ch : key)
            if (ch == '-')
                ch = '_';
        if (key == "reps")
            key = "replicates";
        Json* slot = &config;
        std::size_t start = 0;
        for (std::size_t dot; (dot = key.find('.', start)) != std::string::npos; start = dot + 1) {
            slot = &(*slot)[key.substr(start, dot - start)];
            if (!slot->is_object())
                *slot = Json::object();
        }
        (*slot)[key.substr(start)] = parse_value(value);
    }
}

Json load_config(const std::string& path)
{
    if (path.empty())
        return Json::object();
    const std::string text = brw::read_file(path);
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw brw::Error(brw::ErrorKind::ConfigError, "malformed config: " + path, "config");
    return j;
}

fs::path resolve_out_dir(const std::string& flag, Json& config)
{
    std::string dir = "out";
    if (config.contains("out_dir")) {
        if (!config["out_dir"].is_string())
            throw brw::Error(brw::ErrorKind::ConfigError, "out_dir must be a string", "out_dir");
        dir = config["out_dir"].get<std::string>();
        config.erase("out_dir");
    }
    if (const char* env = std::getenv("BRW_OUT_DIR"); env && *env)
        dir = env;
    if (!flag.empty())
        dir = flag;
    return dir;
}

void report(const Json& manifest, const fs::path& dir)
{
    for (const Json& name : manifest["outputs"])
        std::cout << (dir / name.get<std::string>()).string() << '\n';
    std::cout << (dir / "manifest.json").string() << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"brwlab: branching random walk experiments"};
    app.require_subcommand(1);

    Common common;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const std::string& name : brw::job_names()) {
        CLI::App* sub = app.add_subcommand(name, "Run the " + name + " job");
        add_common(sub, common);
        sub->allow_extras();
        subs.emplace_back(name, sub);
    }
    std::string manifest_path;
    CLI::App* rerun = app.add_subcommand("rerun", "Re-run the job recorded in a manifest");
    rerun->add_option("manifest", manifest_path, "manifest.json")->required();
    rerun->add_option("--seed", common.seed, "Base seed");
    rerun->add_option("--threads", common.threads, "Worker threads");
    rerun->add_option("--out-dir", common.out_dir, "Output directory (also BRW_OUT_DIR)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    fs::path out_dir;
    try {
        brw::JobOptions opts;
        opts.seed = common.seed;
        opts.threads = common.threads;
        if (rerun->parsed()) {
            Json manifest = load_config(manifest_path);
            Json dummy = Json::object();
            out_dir = resolve_out_dir(common.out_dir, dummy);
            opts.out_dir = out_dir;
            report(brw::rerun_manifest(manifest, opts), out_dir);
            return 0;
        }
        for (const auto& [name, sub] : subs) {
            if (!sub->parsed())
                continue;
            std::vector<std::string> positionals;
            Json overrides = Json::object();
            apply_extras(sub->remaining(), overrides, positionals);
            std::string config_path = common.config;
            for (const std::string& p : positionals) {
                if (name == "ldp-check" && (p == "inclusion43" || p == "disjoint44"))
                    overrides["check"] = p;
                else if (config_path.empty())
                    config_path = p;
                else
                    throw brw::Error(brw::ErrorKind::ConfigError, "unexpected argument: " + p);
            }
            Json config = load_config(config_path);
            config.merge_patch(overrides);
            out_dir = resolve_out_dir(common.out_dir, config);
            opts.out_dir = out_dir;
            report(brw::run_job(name, config, opts), out_dir);
            return 0;
        }
    } catch (const brw::Error& e) {
        const Json err = brw::error_json(e);
        std::cerr << err.dump() << '\n';
        if (e.kind() == brw::ErrorKind::PreconditionViolated && !out_dir.empty()) {
            try {
                fs::create_directories(out_dir);
                brw::write_file_atomic(out_dir / "error.json", err.dump(2) + "\n");
            } catch (...) {
            }
        }
        return brw::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
        return 4;
    }
    return 2;
}
