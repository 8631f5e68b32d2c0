#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polymerlab/env.hpp"

namespace polymer::lab {

inline const char* version_string() { return "polymerlab 0.1.0"; }

// One experiment run: E1..E10 map to the convergence, random-LLT,
// supercritical, chi-zero, four-parameter, Duhamel, Holder, crossover,
// universality, and weak-universality studies.
struct ExperimentConfig {
    std::string experiment = "E1_p2l_convergence";
    EnvSpec env;
    double beta = 1.0;
    double alpha = 0.25;   // intermediate-disorder exponent
    double delta = 0.25;   // extra exponent for E3
    std::vector<long> n_list = {64, 256, 1024};
    long replicas = 1000;
    std::uint64_t seed = 42;
    int quad_order = 40;   // E8/E10 Fredholm order
    std::string out_dir;   // empty: nothing persisted

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct ResultSet {
    ExperimentConfig config;
    bool passed = false;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> rows;  // one row per replica record
    std::string summary_json;
};

ResultSet run(const ExperimentConfig& config);

// RFC-4180 CSV, header row, '.' decimal separator, LF line endings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::vector<std::string> known_experiments();

}  // namespace polymer::lab
