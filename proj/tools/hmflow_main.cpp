// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end. Everything runs through the C API of the shared
// library; this binary only parses arguments and formats the JSON summaries.

#include <CLI11.hpp>
#include <cstdio>
#include <json.hpp>
#include <string>
#include <vector>

#include "hmflow/hmflow.h"

namespace {

int status_to_exit(hmf_status status) {
    switch (status) {
        case HMF_OK: return 0;
        case HMF_CHECK_FAILED: return 2;
        case HMF_CONFIG_ERROR: return 3;
        case HMF_NUMERIC_ERROR: return 4;
        default: return 1;
    }
}

void print_reports(const std::string& summary) {
    auto j = nlohmann::json::parse(summary);
    for (const auto& rep : j["reports"]) {
        std::printf("%-4s %-28s %-22s min=%-13.6g max=%-13.6g tol=%-10.4g %s\n",
                    rep["pass"].get<bool>() ? "ok" : "FAIL", rep["check"].get<std::string>().c_str(),
                    rep["scenario"].get<std::string>().c_str(), rep["min"].get<double>(),
                    rep["max"].get<double>(), rep["tolerance"].get<double>(),
                    rep["paper_anchor"].get<std::string>().c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic map heat flow laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", suite = "all", oracle_case;
    std::uint64_t seed = 0;
    std::vector<std::string> params;

    auto* run = app.add_subcommand("run", "run a scenario config and its checks");
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory");

    auto* verify = app.add_subcommand("verify", "run a property-check suite");
    verify->add_option("--suite", suite, "cat0 | flow | regularity | all");
    verify->add_option("--seed", seed, "random seed");
    verify->add_option("--out", out_dir, "output directory");

    auto* oracle = app.add_subcommand("oracle", "emit reference values");
    oracle
        ->add_option("--case", oracle_case,
                     "euclidean-heat | tree-brute-barycenter | grid-hj-closedform")
        ->required();
    oracle->add_option("--params", params, "k=v pairs");
    oracle->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    hmf_status status = HMF_OK;
    char* summary = nullptr;
    if (run->parsed()) {
        status = hmf_run_scenario(config_path.c_str(), out_dir.c_str(), &summary);
        if (summary) {
            print_reports(summary);
            auto j = nlohmann::json::parse(summary);
            std::printf("%s: %s (%zu artifacts in %s)\n", j["scenario"].get<std::string>().c_str(),
                        j["all_pass"].get<bool>() ? "all checks passed" : "CHECK FAILURES",
                        j["files"].size(), out_dir.c_str());
        }
    } else if (verify->parsed()) {
        status = hmf_verify_suite(suite.c_str(), seed, out_dir.c_str(), &summary);
        if (summary) {
            print_reports(summary);
            auto j = nlohmann::json::parse(summary);
            std::printf("suite %s (seed %llu): %s\n", suite.c_str(),
                        static_cast<unsigned long long>(seed),
                        j["all_pass"].get<bool>() ? "all checks passed" : "CHECK FAILURES");
        }
    } else if (oracle->parsed()) {
        std::string joined;
        for (const auto& kv : params) {
            if (!joined.empty()) joined += ' ';
            joined += kv;
        }
        char* path = nullptr;
        status = hmf_oracle(oracle_case.c_str(), joined.c_str(), out_dir.c_str(), &path);
        if (path) {
            std::printf("wrote %s\n", path);
            hmf_string_free(path);
        }
    }

    if (status != HMF_OK && status != HMF_CHECK_FAILED) std::fprintf(stderr, "error: %s\n", hmf_last_error());
    if (summary) hmf_string_free(summary);
    return status_to_exit(status);
}
