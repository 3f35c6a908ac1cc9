// Copyright 2026 The qnswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnswap/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qnswap/error.hpp"
#include "qnswap/layout.hpp"
#include "qnswap/model.hpp"
#include "qnswap/pfqn.hpp"
#include "qnswap/report.hpp"
#include "qnswap/sim.hpp"

namespace qnswap::cli {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_source(const std::string& path, std::istream& in) {
  if (path == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

void write_error(std::ostream& err, std::string_view code, const std::string& message,
                 int exit_code) {
  nlohmann::json doc{{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}};
  err << doc.dump() << '\n';
}

struct InputOptions {
  std::string network;
  std::string layout;
};

void add_input(CLI::App* cmd, InputOptions& input) {
  auto* net = cmd->add_option("--network", input.network, "network description file, - for stdin");
  auto* lay = cmd->add_option("--layout", input.layout, "layout file, - for stdin");
  net->excludes(lay);
}

NetworkSpec load(const InputOptions& input, std::istream& in) {
  if (!input.network.empty()) return parse_network(read_source(input.network, in));
  if (!input.layout.empty()) return build_lattice_network(parse_layout(read_source(input.layout, in)));
  throw UsageError("one of --network or --layout is required");
}

std::uint64_t default_seed() {
  const char* env = std::getenv("QNSWAP_SEED");
  if (!env || !*env) return 1;
  std::uint64_t seed = 0;
  const std::string_view text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError("QNSWAP_SEED must be an unsigned integer");
  return seed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Queuing-network analysis of SWAP routing on qubit layouts", "qnswap"};
  app.require_subcommand(1);

  InputOptions analyze_in, simulate_in, validate_in;
  std::string format = "table";
  std::optional<double> pb;
  std::optional<int> round_decimals;
  std::vector<int> subset;
  bool no_rho_one = false;
  std::optional<int> depth;
  std::vector<int> hops;

  auto* analyze = app.add_subcommand("analyze", "closed-form analysis of a network");
  add_input(analyze, analyze_in);
  analyze->add_option("--pb", pb, "uniform blocking probability override")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--format", format, "json, csv or table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  analyze->add_option("--round", round_decimals, "fixed decimals for printed values")
      ->check(CLI::Range(0, 17));
  analyze->add_option("--subset", subset, "node ids aggregated into K and Tbar")->delimiter(',');
  analyze->add_flag("--no-rho-one", no_rho_one, "use rho_j = lambda_j/mu_j for neighbour fullness");
  analyze->add_option("--depth", depth, "observed SWAP depth to compare against")
      ->check(CLI::PositiveNumber);
  analyze->add_option("--hops", hops, "hop bounds MIN,MAX for the comparison")
      ->delimiter(',')
      ->expected(2);

  std::optional<std::uint64_t> seed;
  double horizon = 1e5;
  std::optional<std::uint64_t> events;
  int reps = 1;
  double warmup = 0.2;
  std::string sim_format = "json";
  auto* simulate = app.add_subcommand("simulate", "discrete-event simulation of a network");
  add_input(simulate, simulate_in);
  simulate->add_option("--seed", seed, "RNG seed (default: $QNSWAP_SEED or 1)");
  auto* horizon_opt = simulate->add_option("--horizon", horizon, "simulated time units");
  simulate->add_option("--events", events, "event budget instead of a time horizon")
      ->excludes(horizon_opt);
  simulate->add_option("--reps", reps, "replications")->check(CLI::PositiveNumber);
  simulate->add_option("--warmup", warmup, "discarded fraction of the horizon")
      ->check(CLI::Range(0.0, 0.5));
  simulate->add_option("--format", sim_format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--round", round_decimals, "fixed decimals for printed values")
      ->check(CLI::Range(0, 17));

  std::string fixture_name;
  bool emit = false;
  std::string output = "-";
  auto* fixture = app.add_subcommand("fixture", "built-in networks");
  fixture->add_option("name", fixture_name, "munoz15 or munoz15-layout")
      ->required()
      ->check(CLI::IsMember({"munoz15", "munoz15-layout"}));
  fixture->add_flag("--emit", emit, "write the fixture file");
  fixture->add_option("--output", output, "destination path, - for stdout");

  auto* validate = app.add_subcommand("validate", "check a network file");
  add_input(validate, validate_in);

  std::vector<std::string> argv_storage{"qnswap"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    write_error(err, "UsageError", e.what(), kUsageError);
    return kUsageError;
  }

  const Formatting fmt{round_decimals};
  std::string result;
  try {
    if (analyze->parsed()) {
      const NetworkSpec spec = load(analyze_in, in);
      AnalysisAssumptions assumptions;
      assumptions.rho_one = !no_rho_one;
      assumptions.blocking_probability_override = pb;
      std::optional<std::vector<int>> chosen;
      if (!subset.empty()) chosen = subset;
      const NetworkAnalysis analysis = analyze_network(spec, assumptions, chosen);
      std::optional<SwapDepthReport> swap;
      if (depth) {
        HopBounds bounds{*depth, *depth};
        if (!hops.empty()) bounds = {hops[0], hops[1]};
        swap = swap_depth_report(analysis.network, *depth, bounds);
      } else if (!hops.empty()) {
        throw UsageError("--hops requires --depth");
      }
      if (format == "json")
        result = analysis_json(analysis, fmt, swap);
      else if (format == "csv")
        result = analysis_csv(analysis, fmt);
      else
        result = analysis_table(analysis, fmt, swap);
    } else if (simulate->parsed()) {
      const NetworkSpec spec = load(simulate_in, in);
      SimConfig cfg;
      cfg.seed = seed ? *seed : default_seed();
      cfg.horizon = events ? Horizon::events(*events) : Horizon::time(horizon);
      cfg.replications = reps;
      cfg.warmup_fraction = warmup;
      const NetworkSimResult sim = simulate_blocking_network(spec, cfg);
      result = sim_format == "csv" ? network_sim_csv(sim, fmt) : network_sim_json(sim, cfg, fmt);
    } else if (fixture->parsed()) {
      if (!emit) {
        result = fixture_name == "munoz15"
                     ? "munoz15: 15 nodes (intermediate 1-11, sources 12-13, sinks 14-15); "
                       "pass --emit to write the network file\n"
                     : "munoz15-layout: the munoz15 adjacency as a layout file; "
                       "pass --emit to write it\n";
      } else {
        result = fixture_name == "munoz15" ? serialize_network(munoz15_fixture())
                                           : serialize_layout(munoz15_layout());
      }
      if (emit && output != "-") {
        std::ofstream file(output, std::ios::binary);
        if (!file) throw IoError("cannot write " + output);
        file << result;
        if (!file) throw IoError("cannot write " + output);
        result.clear();
      }
    } else if (validate->parsed()) {
      const NetworkSpec spec = load(validate_in, in);
      result = "valid: " + std::to_string(spec.size()) + " nodes\n";
    }
  } catch (const Error& e) {
    const int code = category(e.code()) == ErrorCategory::Numerical ? kNumericalFailure
                                                                      : kInvalidInput;
    write_error(err, to_string(e.code()), e.detail(), code);
    return code;
  } catch (const IoError& e) {
    write_error(err, "IOError", e.what(), kInvalidInput);
    return kInvalidInput;
  } catch (const UsageError& e) {
    write_error(err, "UsageError", e.what(), kUsageError);
    return kUsageError;
  }
  out << result;
  return kSuccess;
}

}  // namespace qnswap::cli
