#pragma once

#include <map>
#include <string>

#include "sof/instance.hpp"

namespace sof {

struct ip_export_options {
  long max_rows = 2000000;  // refuse larger models
};

// Row/variable census of the exported model, keyed by constraint family.
struct ip_model_stats {
  std::map<std::string, long> constraint_rows;  // "c1".."c8"
  long variables = 0;
  long binary_variables = 0;
  double objective_terms = 0;

  long rows() const {
    long n = 0;
    for (const auto& [_, v] : constraint_rows) n += v;
    return n;
  }
};

// Closed forms for the row counts, used to cross-check an export.
ip_model_stats expected_ip_stats(const sof_instance& inst);

// Writes a CPLEX-LP file (Minimize / Subject To / Binary / End) plus a
// <path>.manifest.json mapping variable names back to their indices.
ip_model_stats export_ip(const sof_instance& inst, const std::string& path,
                         const ip_export_options& opts = {});

}  // namespace sof
