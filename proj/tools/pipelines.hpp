#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace hypercyc::app {

const std::vector<std::string>& commands();

// runs one subcommand (or "all") into a report; throws ConfigError for unusable settings
Report run_pipeline(const std::string& command, const ExperimentConfig& cfg);

// run and write to out_dir; 0 when every gating check passes, 1 otherwise. ConfigError propagates
int run_and_write(const std::string& command, const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace hypercyc::app
