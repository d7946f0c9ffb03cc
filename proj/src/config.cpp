#include "fctl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace fctl {

using nlohmann::json;

namespace {

struct Node {
  const json& value;
  std::string path;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(fmt::format("{}: {}", path.empty() ? "<root>" : path, msg));
  }

  bool has(const char* key) const { return value.is_object() && value.contains(key); }

  Node at(const char* key) const {
    if (!value.is_object()) fail("expected an object");
    if (!value.contains(key)) fail(fmt::format("missing field '{}'", key));
    return {value.at(key), path.empty() ? key : path + "." + key};
  }

  Node at(std::size_t i) const { return {value.at(i), fmt::format("{}[{}]", path, i)}; }

  std::size_t size() const {
    if (!value.is_array()) fail("expected an array");
    return value.size();
  }

  long long integer() const {
    if (!value.is_number_integer()) fail("expected an integer");
    return value.get<long long>();
  }

  int integer_in(long long lo, long long hi) const {
    const long long v = integer();
    if (v < lo || v > hi) fail(fmt::format("value {} outside [{}, {}]", v, lo, hi));
    return static_cast<int>(v);
  }

  std::string text() const {
    if (!value.is_string()) fail("expected a string");
    return value.get<std::string>();
  }

  bool boolean() const {
    if (!value.is_boolean()) fail("expected true or false");
    return value.get<bool>();
  }

  double number() const {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
      try {
        return parse_rate(value.get<std::string>());
      } catch (const ConfigError& e) {
        fail(e.what());
      }
    }
    fail("expected a number or a numeric string");
  }

  double nonnegative() const {
    const double v = number();
    if (!(v >= 0.0) || !std::isfinite(v)) fail("expected a finite value >= 0");
    return v;
  }
};

double parse_decimal(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("'{}' is not a number", s));
  return v;
}

void check_keys(const Node& n, std::initializer_list<const char*> allowed) {
  if (!n.value.is_object()) n.fail("expected an object");
  for (const auto& [k, _] : n.value.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) n.fail(fmt::format("unknown field '{}'", k));
  }
}

SlotDistribution parse_slot(const Node& n) {
  if (n.value.is_number() || n.value.is_string()) return SlotDistribution::poisson(n.nonnegative());
  check_keys(n, {"shift", "rate"});
  SlotDistribution d;
  if (n.has("shift")) d.shift = n.at("shift").integer_in(0, 1'000'000);
  if (n.has("rate")) d.rate = n.at("rate").nonnegative();
  return d;
}

std::vector<SlotDistribution> parse_slots(const Node& n, int cycle) {
  const std::size_t len = n.size();
  if (static_cast<int>(len) != cycle)
    n.fail(fmt::format("expected {} slots, got {}", cycle, len));
  std::vector<SlotDistribution> out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(parse_slot(n.at(i)));
  return out;
}

ArrivalProcess make(const Node& n, int cycle, std::vector<Scenario> sc) {
  try {
    return ArrivalProcess(cycle, std::move(sc));
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
}

ArrivalProcess parse_process(const Node& n, int cycle);

// Output of an upstream FCTL queue with the given plan and input, placed so
// that its first green slot lands on `start`.
ArrivalProcess parse_fctl_output(const Node& n, int cycle) {
  check_keys(n, {"type", "green", "red", "arrivals", "start"});
  const int green = n.at("green").integer_in(1, 10'000);
  const int red = n.has("red") ? n.at("red").integer_in(0, 10'000) : cycle - green;
  const int start = n.has("start") ? n.at("start").integer_in(1, cycle) : 1;
  if (green > cycle) n.at("green").fail("green exceeds the cycle length");
  const SignalPlan plan{green, red, 0};
  const ArrivalProcess upstream = parse_process(n.at("arrivals"), plan.cycle());
  const QueueSolution sol = solve_q(plan, upstream);
  return embed_output(output_pgf(sol), 0, start - 1, cycle);
}

// A platoon of length B ~ weights (B = 0..length) starting at `start`:
// one vehicle per slot for the first B slots, then Poisson(rate) per slot.
ArrivalProcess parse_platoon(const Node& n, int cycle) {
  check_keys(n, {"type", "start", "rate", "weights", "normalize"});
  const int start = n.has("start") ? n.at("start").integer_in(1, cycle) : 1;
  const double rate = n.at("rate").nonnegative();
  const Node wn = n.at("weights");
  const std::size_t count = wn.size();
  if (count < 1) wn.fail("need at least one weight");
  const int length = static_cast<int>(count) - 1;
  if (start - 1 + length > cycle) wn.fail("platoon does not fit in the cycle");
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    w.push_back(wn.at(i).nonnegative());
    total += w.back();
  }
  const bool normalize = n.has("normalize") && n.at("normalize").boolean();
  if (normalize) {
    if (!(total > 0.0)) wn.fail("weights sum to zero");
    for (double& x : w) x /= total;
  }
  std::vector<Scenario> sc;
  for (int b = 0; b <= length; ++b) {
    if (w[b] == 0.0) continue;
    Scenario s{w[b], std::vector<SlotDistribution>(cycle)};
    for (int i = 0; i < length; ++i)
      s.slots[start - 1 + i] = i < b ? SlotDistribution::deterministic(1)
                                     : SlotDistribution::poisson(rate);
    sc.push_back(std::move(s));
  }
  return make(wn, cycle, std::move(sc));
}

ArrivalProcess parse_process(const Node& n, int cycle) {
  const std::string type = n.at("type").text();
  if (type == "zero") {
    check_keys(n, {"type"});
    return ArrivalProcess::zero(cycle);
  }
  if (type == "poisson") {
    check_keys(n, {"type", "rate"});
    return ArrivalProcess::iid_poisson(cycle, n.at("rate").nonnegative());
  }
  if (type == "independent") {
    check_keys(n, {"type", "slots"});
    return ArrivalProcess::independent(parse_slots(n.at("slots"), cycle));
  }
  if (type == "mixture") {
    check_keys(n, {"type", "scenarios"});
    const Node list = n.at("scenarios");
    if (list.size() == 0) list.fail("scenarios list is empty");
    std::vector<Scenario> sc;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node s = list.at(i);
      check_keys(s, {"weight", "slots"});
      const double w = s.at("weight").number();
      if (!(w > 0.0)) s.at("weight").fail("weight must be > 0");
      sc.push_back({w, parse_slots(s.at("slots"), cycle)});
    }
    return make(list, cycle, std::move(sc));
  }
  if (type == "platoon") return parse_platoon(n, cycle);
  if (type == "fctl_output") return parse_fctl_output(n, cycle);
  if (type == "superpose") {
    check_keys(n, {"type", "parts"});
    const Node parts = n.at("parts");
    if (parts.size() == 0) parts.fail("parts list is empty");
    ArrivalProcess acc = parse_process(parts.at(std::size_t{0}), cycle);
    for (std::size_t i = 1; i < parts.size(); ++i)
      acc = superpose(acc, parse_process(parts.at(i), cycle));
    return acc;
  }
  n.at("type").fail(fmt::format(
      "unknown process type '{}' (expected zero, poisson, independent, mixture, platoon, "
      "fctl_output or superpose)",
      type));
}

SignalPlan parse_plan(const Node& n, int cycle_hint) {
  SignalPlan p;
  p.green = n.at("green").integer_in(1, 10'000);
  if (n.has("red")) {
    p.red = n.at("red").integer_in(0, 10'000);
  } else if (cycle_hint > 0) {
    p.red = cycle_hint - p.green;
    if (p.red < 0) n.at("green").fail("green exceeds the cycle length");
  } else {
    n.fail("missing field 'red'");
  }
  if (n.has("offset")) p.offset = n.at("offset").integer_in(0, 10'000);
  return p;
}

QueueConfig parse_queue(const Node& n) {
  check_keys(n, {"name", "green", "red", "arrivals"});
  QueueConfig q;
  if (n.has("name")) q.name = n.at("name").text();
  q.plan = parse_plan(n, 0);
  q.arrivals = parse_process(n.at("arrivals"), q.plan.cycle());
  return q;
}

NetworkSpec parse_network(const Node& n) {
  check_keys(n, {"cycle", "nodes", "epsilon_weight"});
  NetworkSpec spec;
  spec.cycle = n.at("cycle").integer_in(1, 10'000);
  if (n.has("epsilon_weight")) spec.epsilon_weight = n.at("epsilon_weight").nonnegative();
  const Node list = n.at("nodes");
  if (list.size() == 0) list.fail("nodes list is empty");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node nn = list.at(i);
    check_keys(nn, {"name", "green", "red", "offset", "arrivals", "upstream", "reported"});
    NetworkNode node;
    node.name = nn.at("name").text();
    for (const auto& other : spec.nodes)
      if (other.name == node.name) nn.at("name").fail(fmt::format("duplicate name '{}'", node.name));
    node.plan = parse_plan(nn, spec.cycle);
    if (node.plan.cycle() != spec.cycle) nn.fail("green + red must equal the network cycle");
    if (node.plan.offset >= spec.cycle) nn.at("offset").fail("offset must be below the cycle");
    if (nn.has("reported")) node.reported = nn.at("reported").boolean();
    if (nn.has("arrivals")) node.external = parse_process(nn.at("arrivals"), spec.cycle);
    spec.nodes.push_back(std::move(node));
  }
  // Links refer to names, resolved once every node is known.
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node nn = list.at(i);
    if (!nn.has("upstream")) continue;
    const Node ups = nn.at("upstream");
    for (std::size_t k = 0; k < ups.size(); ++k) {
      const Node u = ups.at(k);
      check_keys(u, {"from", "travel_time"});
      const std::string from = u.at("from").text();
      UpstreamLink link;
      try {
        link.from = spec.index_of(from);
      } catch (const std::invalid_argument&) {
        u.at("from").fail(fmt::format("no node named '{}'", from));
      }
      link.travel_time = u.has("travel_time") ? u.at("travel_time").integer_in(0, 1'000'000) : 0;
      spec.nodes[i].upstream.push_back(link);
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  return spec;
}

NetworkSpec parse_line(const Node& n) {
  check_keys(n, {"intersections", "green", "red", "arrivals", "travel_time", "side",
                 "epsilon_weight"});
  const int count = n.at("intersections").integer_in(1, 10'000);
  SignalPlan plan{n.at("green").integer_in(1, 10'000), n.at("red").integer_in(0, 10'000), 0};
  const ArrivalProcess main = parse_process(n.at("arrivals"), plan.cycle());
  const int d = n.has("travel_time") ? n.at("travel_time").integer_in(0, 1'000'000) : 0;
  std::optional<SideFlow> side;
  if (n.has("side")) {
    const Node s = n.at("side");
    check_keys(s, {"green", "offset", "rate"});
    SideFlow f;
    f.green = s.at("green").integer_in(1, plan.cycle());
    f.offset = s.at("offset").integer_in(0, plan.cycle() - 1);
    f.rate = s.at("rate").nonnegative();
    side = f;
  }
  NetworkSpec spec = line_network(count, plan, main, d, side);
  if (n.has("epsilon_weight")) spec.epsilon_weight = n.at("epsilon_weight").nonnegative();
  return spec;
}

SimConfig parse_simulation(const Node& n) {
  check_keys(n, {"cycles", "warmup_cycles", "seed", "replications"});
  SimConfig cfg;
  if (n.has("cycles")) cfg.cycles = n.at("cycles").integer();
  if (n.has("warmup_cycles")) cfg.warmup_cycles = n.at("warmup_cycles").integer();
  if (n.has("seed")) {
    const Node s = n.at("seed");
    if (!s.value.is_number_unsigned() && !s.value.is_number_integer()) s.fail("expected an integer");
    cfg.seed = s.value.get<std::uint64_t>();
  }
  if (n.has("replications")) cfg.replications = n.at("replications").integer_in(1, 1'000'000);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
  return cfg;
}

}  // namespace

double parse_rate(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s += ch;
  if (s.empty()) throw ConfigError("empty numeric string");
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_decimal(s);
  const double num = parse_decimal(s.substr(0, slash));
  const double den = parse_decimal(s.substr(slash + 1));
  if (den == 0.0) throw ConfigError(fmt::format("'{}' divides by zero", text));
  return num / den;
}

NetworkSpec ModelConfig::as_network() const {
  if (network) return *network;
  NetworkSpec spec;
  spec.cycle = queue->plan.cycle();
  NetworkNode node;
  node.name = queue->name;
  node.plan = queue->plan;
  node.plan.offset = 0;
  node.external = queue->arrivals;
  spec.nodes.push_back(std::move(node));
  return spec;
}

ModelConfig parse_config_text(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(fmt::format("{}:{}:{}: invalid JSON: {}", source, line, col, e.what()));
  }

  try {
    const Node root{doc, ""};
    check_keys(root, {"schema_version", "description", "queue", "network", "line", "simulation",
                      "tail_levels"});
    ModelConfig cfg;
    cfg.schema_version = root.at("schema_version").integer_in(1, 1'000);
    if (cfg.schema_version != 1)
      root.at("schema_version").fail(fmt::format("unsupported version {}", cfg.schema_version));
    const int kinds = root.has("queue") + root.has("network") + root.has("line");
    if (kinds != 1) root.fail("exactly one of 'queue', 'network' or 'line' is required");
    if (root.has("queue")) cfg.queue = parse_queue(root.at("queue"));
    if (root.has("network")) cfg.network = parse_network(root.at("network"));
    if (root.has("line")) cfg.network = parse_line(root.at("line"));
    if (root.has("simulation")) cfg.simulation = parse_simulation(root.at("simulation"));
    if (root.has("tail_levels")) cfg.tail_levels = root.at("tail_levels").integer_in(0, 10'000);
    cfg.simulation.tail_levels = cfg.tail_levels;
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
}

ModelConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot open file", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

}  // namespace fctl
