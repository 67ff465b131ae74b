// widenull - wideband transmit null-space estimation library and simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "widenull/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"widenull: transmit null-space estimation for wideband spectrum sharing"};
    app.require_subcommand(1);
    app.fallthrough(true);

    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("--seed", seed, "Override the config seed (0 keeps the config value)");
    app.add_option("--threads", threads, "Worker threads (affects speed only, never results)")
        ->check(CLI::PositiveNumber);

    // correlation: inter-bin channel correlation sweep over every preset.
    auto* correlation = app.add_subcommand("correlation", "Channel correlation vs bin spacing");
    std::string corr_config;
    std::string corr_spacings = "0..50";
    int corr_trials = 10000;
    std::string corr_out = "out";
    correlation->add_option("--config", corr_config, "Scenario config file")->required();
    correlation->add_option("--spacings", corr_spacings, "Spacings, e.g. 0..50 or 0,5,10");
    correlation->add_option("--trials", corr_trials, "Channel realizations per point")
        ->check(CLI::PositiveNumber);
    correlation->add_option("--out", corr_out, "Output directory");

    // simulate: Monte Carlo null-quality and complexity comparison.
    auto* simulate = app.add_subcommand("simulate", "Brute-force vs clustered null estimation");
    std::string sim_config;
    int sim_trials = 100;
    std::string sim_delta0;
    std::string sim_out = "out";
    simulate->add_option("--config", sim_config, "Scenario config file")->required();
    simulate->add_option("--trials", sim_trials, "Channel realizations")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--delta0", sim_delta0,
                         "Comma-separated clustering design points (default: config values)");
    simulate->add_option("--out", sim_out, "Output directory");

    // oracle: exact-covariance sanity pipeline.
    auto* oracle = app.add_subcommand("oracle", "Asymptotic-covariance sanity checks");
    std::string oracle_config;
    oracle->add_option("--config", oracle_config, "Scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (correlation->parsed()) {
            widenull::experiments::CorrelationOptions opt;
            opt.config_path = corr_config;
            opt.spacings = widenull::experiments::parse_spacings(corr_spacings);
            opt.trials = corr_trials;
            opt.out_dir = corr_out;
            opt.seed = seed;
            opt.threads = threads;
            return widenull::experiments::run_correlation_command(opt);
        }
        if (simulate->parsed()) {
            widenull::experiments::SimulateOptions opt;
            opt.config_path = sim_config;
            opt.trials = sim_trials;
            opt.out_dir = sim_out;
            opt.seed = seed;
            opt.threads = threads;
            if (!sim_delta0.empty()) {
                std::size_t pos = 0;
                while (pos < sim_delta0.size()) {
                    std::size_t comma = sim_delta0.find(',', pos);
                    if (comma == std::string::npos)
                        comma = sim_delta0.size();
                    opt.delta0.push_back(std::stod(sim_delta0.substr(pos, comma - pos)));
                    pos = comma + 1;
                }
            }
            return widenull::experiments::run_simulate_command(opt);
        }
        if (oracle->parsed())
            return widenull::experiments::run_oracle_command(oracle_config, seed, std::cout);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
