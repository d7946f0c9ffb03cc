#pragma once

// JSON model configuration (schema_version 1).
//
// A document describes either one queue ("queue"), an explicit network
// ("network") or a line of intersections ("line"), plus optional simulation
// settings. Rates and weights may be numbers, decimal strings or rational
// strings such as "1/30". See docs/config.md for the schema.

#include <optional>
#include <stdexcept>
#include <string>

#include "fctl/arrival.hpp"
#include "fctl/network.hpp"
#include "fctl/simulator.hpp"
#include "fctl/solver.hpp"

namespace fctl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QueueConfig {
  std::string name = "Q";
  SignalPlan plan;
  ArrivalProcess arrivals;
};

struct ModelConfig {
  int schema_version = 1;
  std::optional<QueueConfig> queue;
  std::optional<NetworkSpec> network;
  SimConfig simulation;
  int tail_levels = 6;

  /// The single queue as a one-node network, or the network itself.
  NetworkSpec as_network() const;
};

/// "0.15", "1/30", "3" -> double. Throws ConfigError.
double parse_rate(const std::string& text);

ModelConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
ModelConfig parse_config_file(const std::string& path);

}  // namespace fctl
