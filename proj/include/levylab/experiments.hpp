#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levylab/environment.hpp"
#include "levylab/limit_laws.hpp"

#include "json.hpp"

namespace levylab {

// Batch Monte Carlo configuration. Reports depend only on the statistical
// fields and the seed; worker count and output location never change results.
struct ExperimentConfig {
    std::string scenario;
    EnvironmentSpec env;
    std::string env_label = "custom";

    double r = 0.0;
    double t = 0.0;
    double h = 0.0;
    double step = 0.01;
    double delta = 0.0;  // 0: clamped default
    double eps = 0.0;    // 0: truncation rule default
    double eta = 0.0;
    double du = 1e-3;    // crosscheck Brownian step
    std::uint64_t reps = 0;
    std::uint64_t seed = 1;
    int count = 50;          // decompose valleys
    std::string path_file;   // decompose external path (CSV)
    bool within_path = false;

    unsigned workers = 1;
    std::string out_dir;
    bool dump_samples = false;
    bool assert_thresholds = false;
};

struct ExperimentReport {
    nlohmann::ordered_json json;
    bool passed = true;
};

// Validates the scenario's knobs, runs it, writes report.json (and sample
// sidecars when requested) under out_dir if set.
ExperimentReport run(const ExperimentConfig& config);

std::vector<std::string> known_scenarios();

}  // namespace levylab
