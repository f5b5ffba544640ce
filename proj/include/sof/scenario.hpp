#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sof/instance.hpp"
#include "sof/topology_gen.hpp"

namespace sof {

// Experiment description: a topology source, sweep axes around fixed
// defaults, seeds and algorithms, run either once per point or as an online
// request stream with load-driven cost refresh between requests.
struct scenario {
  std::string preset = "softlayer";           // used when topology_file empty
  std::optional<gen_params> custom_topology;  // overrides preset
  std::string topology_file;                  // use a file instead of generating

  scenario_shape defaults;
  std::string sweep_axis;          // "", sources, dests, vms, chain, setup_mult
  std::vector<double> axis_values;

  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> algorithms{"sofda"};
  bool online = false;
  int online_requests = 10;
  double demand = 0.05;  // request demand on unit-capacity links
  int workers = 1;
};

struct result_row {
  std::string axis;
  double axis_value = 0.0;
  std::string algorithm;
  std::uint64_t seed = 0;
  int request_index = -1;  // online mode only
  double setup_cost = 0.0;
  double connection_cost = 0.0;
  double total_cost = 0.0;
  double accumulative_cost = 0.0;  // online mode
  double runtime_ms = 0.0;
  long messages = 0;  // distsim only
  int used_vms = 0;
  std::string status;  // ok | error text
};

std::vector<result_row> run_scenario(const scenario& sc);

void write_csv(const std::vector<result_row>& rows, std::ostream& out);
void write_json(const std::vector<result_row>& rows, std::ostream& out);

// single-instance solve used by the CLI and the python module
result_row solve_one(const sof_instance& inst, const std::string& algorithm);

}  // namespace sof
