// Copyright 2026 The ReplayKit Authors
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

// replaykit: record behavior-tree runs against the built-in simulator,
// inspect what was recorded, and replay it, either straight onto the
// bus or back into a fresh simulator.
//
// Exit codes are the machine contract: 0 success, 1 the behavior tree
// finished FAILURE, 2 usage or IO errors.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "replaykit/btree.hpp"
#include "replaykit/bus.hpp"
#include "replaykit/doc_store.hpp"
#include "replaykit/document.hpp"
#include "replaykit/message.hpp"
#include "replaykit/recorder.hpp"
#include "replaykit/replayer.hpp"
#include "replaykit/scenarios.hpp"
#include "replaykit/simbot.hpp"

namespace
{

using namespace replaykit;

constexpr int kExitSuccess = 0;
constexpr int kExitBehaviorFailure = 1;
constexpr int kExitError = 2;

struct CommonArgs
{
  std::string store_dir;
  std::string collection {"runs"};
  std::string output {"text"};

  bool doc_output() const {return output == "doc";}
};

/// REPLAYKIT_STORE wins over --store; something must name the store.
std::filesystem::path resolve_store(const CommonArgs & args)
{
  const char * env = std::getenv("REPLAYKIT_STORE");
  const std::string dir = (env != nullptr && *env != '\0') ? env : args.store_dir;
  if (dir.empty()) {
    throw Error("no store directory: pass --store or set REPLAYKIT_STORE");
  }
  return dir;
}

void add_common(CLI::App * cmd, CommonArgs & args)
{
  cmd->add_option("--store", args.store_dir,
    "Store directory (REPLAYKIT_STORE overrides)");
  cmd->add_option("--collection", args.collection, "Collection name")
  ->capture_default_str();
  cmd->add_option("--output", args.output, "Output mode")
  ->check(CLI::IsMember({"text", "doc"}))->capture_default_str();
}

std::vector<std::string> split_csv(const std::string & csv)
{
  std::vector<std::string> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

Value::Map base_doc(const BaseState & base)
{
  Value::Map m;
  m["x"] = base.x;
  m["y"] = base.y;
  m["theta"] = base.theta;
  return m;
}

Value::Map counts_doc(const std::map<std::string, std::size_t> & counts)
{
  Value::Map m;
  for (const auto & [topic, n] : counts) {
    m[topic] = static_cast<std::int64_t>(n);
  }
  return m;
}

// --- run ------------------------------------------------------------------

struct RunArgs
{
  CommonArgs common;
  std::string scenario;
  std::string tree_file;
  std::string config_file;
  bool record {true};
  std::optional<std::uint64_t> seed;
};

ScenarioConfig resolve_config(const std::string & config_file,
  const std::optional<std::uint64_t> & seed)
{
  ScenarioConfig cfg =
    config_file.empty() ? ScenarioConfig {} : load_scenario_config(config_file);
  if (seed) {
    cfg.noise.seed = *seed;
  }
  return cfg;
}

int cmd_run(const RunArgs & args)
{
  const ScenarioConfig cfg = resolve_config(args.config_file, args.seed);
  Bus bus;
  SimWorld world(bus, sim_config_for(cfg));

  std::optional<DocStore> store;
  std::optional<Recorder> recorder;
  if (args.record) {
    store.emplace(resolve_store(args.common));
    recorder.emplace(bus, *store);
  }
  Recorder * rec = recorder ? &*recorder : nullptr;

  ScenarioOutcome out;
  if (!args.scenario.empty()) {
    out = run_scenario(args.scenario, bus, world, rec, args.common.collection, cfg);
  } else {
    std::ifstream in(args.tree_file);
    if (!in) {
      throw Error("cannot open tree file: " + args.tree_file);
    }
    std::stringstream text;
    text << in.rdbuf();
    const Node root = parse_tree(text.str());

    ActionRegistry registry;
    register_scenario_actions(registry, bus, world, cfg);
    Executor executor(registry);
    TickContext ctx;
    ctx.recorder = rec;
    ctx.collection = args.common.collection;
    out.status = executor.run_to_completion(root, ctx);
    out.session_ids = std::move(ctx.session_ids);
    out.final_base = world.base();
  }

  if (args.common.doc_output()) {
    Value::Map doc;
    doc["status"] = to_string(out.status);
    Value::Array ids;
    for (const auto & id : out.session_ids) {
      ids.push_back(id);
    }
    doc["sessions"] = Value(std::move(ids));
    doc["final_base"] = Value(base_doc(out.final_base));
    std::cout << canonical_json(Value(std::move(doc))) << "\n";
  } else {
    std::cout << "status: " << to_string(out.status) << "\n";
    for (const auto & id : out.session_ids) {
      std::cout << "session: " << id << "\n";
    }
    std::cout << "final base: " << out.final_base.x << " " << out.final_base.y
              << " " << out.final_base.theta << "\n";
  }
  return out.status == Status::SUCCESS ? kExitSuccess : kExitBehaviorFailure;
}

// --- sessions -------------------------------------------------------------

int cmd_sessions(const CommonArgs & args)
{
  const std::filesystem::path dir = resolve_store(args);
  if (!std::filesystem::is_directory(dir)) {
    throw Error("store not found: " + dir.string());
  }
  DocStore store(dir);

  std::vector<SessionSummary> sessions;
  try {
    sessions = store.list_sessions(args.collection);
  } catch (const UnknownCollection &) {
    // Nothing recorded yet is not an error for a listing.
  }

  for (const auto & s : sessions) {
    if (args.doc_output()) {
      Value::Map doc;
      doc["session_id"] = s.session_id;
      doc["behavior_path"] = s.behavior_path;
      doc["started_at"] = static_cast<std::int64_t>(s.started_at);
      if (s.ended_at) {
        doc["ended_at"] = static_cast<std::int64_t>(*s.ended_at);
      }
      doc["open"] = s.open;
      doc["message_count"] = static_cast<std::int64_t>(s.message_count);
      doc["topic_counts"] = Value(counts_doc(s.topic_counts));
      std::cout << canonical_json(Value(std::move(doc))) << "\n";
      continue;
    }
    std::cout << s.session_id << "  " << s.behavior_path << "  ";
    if (s.ended_at) {
      std::cout << static_cast<double>(*s.ended_at - s.started_at) / 1e9 << "s";
    } else {
      std::cout << "open";
    }
    std::cout << "  " << s.message_count << " msgs ";
    for (const auto & [topic, n] : s.topic_counts) {
      std::cout << " " << topic << "=" << n;
    }
    std::cout << "\n";
  }
  return kExitSuccess;
}

// --- replay ---------------------------------------------------------------

struct ReplayArgs
{
  CommonArgs common;
  std::string session;
  std::string topics_csv;
  std::string behavior;
  std::optional<std::int64_t> from_ns;
  std::optional<std::int64_t> to_ns;
  double rate {1.0};
  double tolerance_ms {20.0};
  bool drive_sim {false};
  std::string config_file;
  std::optional<std::uint64_t> seed;
};

int cmd_replay(const ReplayArgs & args)
{
  DocStore store(resolve_store(args.common));

  if (!args.session.empty()) {
    bool known = false;
    try {
      for (const auto & s : store.list_sessions(args.common.collection)) {
        known = known || s.session_id == args.session;
      }
    } catch (const UnknownCollection &) {
    }
    if (!known) {
      throw Error("unknown session: " + args.session);
    }
  }

  Query q;
  if (!args.session.empty()) {
    q.session_id = args.session;
  }
  if (!args.topics_csv.empty()) {
    const auto topics = split_csv(args.topics_csv);
    q.topics = std::set<std::string>(topics.begin(), topics.end());
  }
  if (!args.behavior.empty()) {
    q.behavior_prefix = args.behavior;
  }
  if (args.from_ns) {
    q.t_lo = *args.from_ns;
  }
  if (args.to_ns) {
    q.t_hi = *args.to_ns;
  }
  const ReplayPlan plan = make_plan(store, args.common.collection, q, args.rate);

  if (args.drive_sim) {
    const ScenarioConfig cfg = resolve_config(args.config_file, args.seed);
    Bus bus;
    const DriveReport rep = drive_replay(plan, bus, sim_config_for(cfg), cfg.dt);
    if (args.common.doc_output()) {
      Value::Map doc;
      doc["mode"] = rep.command_mode ? "commands" : "goals";
      doc["replayed"] = static_cast<std::int64_t>(rep.replayed);
      doc["commands_applied"] = static_cast<std::int64_t>(rep.commands_applied);
      doc["goals_ignored"] = static_cast<std::int64_t>(rep.goals_ignored);
      doc["forwarded"] = static_cast<std::int64_t>(rep.forwarded);
      doc["steps"] = static_cast<std::int64_t>(rep.steps);
      doc["virtual_duration"] = rep.virtual_duration;
      doc["final_base"] = Value(base_doc(rep.final_base));
      std::cout << canonical_json(Value(std::move(doc))) << "\n";
    } else {
      std::cout << "mode: " << (rep.command_mode ? "commands" : "goals") << "\n"
                << "replayed: " << rep.replayed << "\n"
                << "commands applied: " << rep.commands_applied << "\n"
                << "goals ignored: " << rep.goals_ignored << "\n"
                << "steps: " << rep.steps << "\n"
                << "virtual duration: " << rep.virtual_duration << "s\n"
                << "final base: " << rep.final_base.x << " " << rep.final_base.y
                << " " << rep.final_base.theta << "\n";
    }
    return kExitSuccess;
  }

  Bus bus;
  ReplayOptions options;
  options.tolerance =
    std::chrono::nanoseconds(std::llround(args.tolerance_ms * 1e6));
  ReplaySession session(plan, bus, options);
  const ReplayReport rep = session.wait();

  if (args.common.doc_output()) {
    Value::Map doc;
    doc["planned"] = static_cast<std::int64_t>(rep.planned);
    doc["published"] = static_cast<std::int64_t>(rep.published);
    doc["skipped"] = static_cast<std::int64_t>(rep.skipped);
    doc["per_topic"] = Value(counts_doc(rep.per_topic_published));
    doc["max_lateness_ns"] = static_cast<std::int64_t>(rep.max_lateness.count());
    doc["late"] = rep.late;
    doc["wall_ns"] = static_cast<std::int64_t>(rep.wall_duration.count());
    std::cout << canonical_json(Value(std::move(doc))) << "\n";
  } else {
    std::cout << "planned: " << rep.planned << "\n"
              << "published: " << rep.published << "\n"
              << "skipped: " << rep.skipped << "\n";
    for (const auto & [topic, n] : rep.per_topic_published) {
      std::cout << "  " << topic << ": " << n << "\n";
    }
    std::cout << "max lateness: "
              << static_cast<double>(rep.max_lateness.count()) / 1e6 << "ms"
              << (rep.late ? " (late)" : "") << "\n"
              << "wall duration: "
              << static_cast<double>(rep.wall_duration.count()) / 1e9 << "s\n";
  }
  return kExitSuccess;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app {"Behavior-scoped message recording and replay"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App * run = app.add_subcommand("run", "Run a behavior tree against the simulator");
  add_common(run, run_args.common);
  CLI::Option * scenario_opt =
    run->add_option("--scenario", run_args.scenario, "Canned scenario: navigate|pick|place");
  CLI::Option * tree_opt =
    run->add_option("--tree-file", run_args.tree_file, "Behavior tree file");
  scenario_opt->excludes(tree_opt);
  tree_opt->excludes(scenario_opt);
  run->add_flag("--record,!--no-record", run_args.record, "Record scoped topics")
  ->capture_default_str();
  run->add_option("--config", run_args.config_file, "Scenario config file");
  run->add_option("--seed", run_args.seed, "Noise seed override");

  CommonArgs sessions_args;
  CLI::App * sessions = app.add_subcommand("sessions", "List recorded sessions");
  add_common(sessions, sessions_args);

  ReplayArgs replay_args;
  CLI::App * replay = app.add_subcommand("replay", "Replay recorded messages");
  add_common(replay, replay_args.common);
  replay->add_option("--session", replay_args.session, "Only this session");
  replay->add_option("--topics", replay_args.topics_csv, "Comma-separated topic filter");
  replay->add_option("--behavior", replay_args.behavior, "Behavior path prefix filter");
  replay->add_option("--from", replay_args.from_ns, "Min record time, ns, inclusive");
  replay->add_option("--to", replay_args.to_ns, "Max record time, ns, exclusive");
  replay->add_option("--rate", replay_args.rate, "Replay rate multiplier")
  ->capture_default_str();
  replay->add_option("--tolerance", replay_args.tolerance_ms, "Lateness tolerance, ms")
  ->capture_default_str();
  replay->add_flag("--drive-sim", replay_args.drive_sim,
    "Re-execute into a fresh simulator instead of wall-clock replay");
  replay->add_option("--config", replay_args.config_file, "Scenario config for --drive-sim");
  replay->add_option("--seed", replay_args.seed, "Noise seed override for --drive-sim");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitSuccess : kExitError;
  }

  try {
    if (run->parsed()) {
      if (run_args.scenario.empty() && run_args.tree_file.empty()) {
        throw Error("run needs --scenario or --tree-file");
      }
      return cmd_run(run_args);
    }
    if (sessions->parsed()) {
      return cmd_sessions(sessions_args);
    }
    return cmd_replay(replay_args);
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
