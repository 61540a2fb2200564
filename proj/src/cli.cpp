#include "agglo/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "agglo/dfg.hpp"
#include "agglo/error.hpp"
#include "agglo/event_log.hpp"
#include "agglo/metrics.hpp"
#include "agglo/miner.hpp"
#include "agglo/program.hpp"
#include "agglo/synth_bench.hpp"

namespace agglo {

namespace {

constexpr const char* kFormatVariable = "AGGLO_LOG_FORMAT";

struct LogOptions {
  std::string path;
  std::string format;
  std::string delimiter;
  CsvConfig csv;
  std::string timestamp_column;

  void attach(CLI::App* cmd) {
    cmd->add_option("--log", path, "Event log file")->required();
    cmd->add_option("--log-format", format,
                    std::string("Log file format: text or csv (default from ") + kFormatVariable +
                        ", else text)")
        ->check(CLI::IsMember({"text", "csv"}));
    cmd->add_option("--delimiter", delimiter, "Activity delimiter for text logs (default: whitespace)");
    cmd->add_option("--case-column", csv.case_column, "CSV case id column")->capture_default_str();
    cmd->add_option("--activity-column", csv.activity_column, "CSV activity column")->capture_default_str();
    cmd->add_option("--timestamp-column", timestamp_column, "CSV timestamp column used to order events");
    cmd->add_flag("--lenient-timestamps", csv.lenient_timestamps,
                  "Order non-RFC 3339 timestamps as strings instead of failing");
  }

  EventLog load() const {
    std::string fmt = format;
    if (fmt.empty()) {
      const char* env = std::getenv(kFormatVariable);
      fmt = env && *env ? env : "text";
    }
    if (fmt != "text" && fmt != "csv") {
      throw UsageError(std::string(kFormatVariable) + ": unknown log format '" + fmt + "'");
    }
    TextFormat text;
    if (!delimiter.empty()) {
      std::string d = delimiter == "\\t" ? "\t" : delimiter;
      if (d.size() != 1) throw UsageError("--delimiter must be a single character");
      text.delimiter = d[0];
    }
    CsvConfig c = csv;
    if (!timestamp_column.empty()) c.timestamp_column = timestamp_column;
    auto log = load_log(path, fmt, c, text);
    if (log.empty()) throw EmptyLogError("'" + path + "' contains no traces");
    validate(log);
    return log;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A model argument is a file holding an expr, or the expr itself.
Program load_model(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return parse_expr(read_file(arg));
  return parse_expr(arg);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << content;
}

OperatorWeights parse_weights(const std::string& spec) {
  OperatorWeights w;
  std::map<std::string, double*> slots = {{"seq", &w.sequence}, {"opt", &w.optional}, {"choice", &w.choice},
                                          {"plus", &w.plus},    {"star", &w.star},    {"par", &w.parallel}};
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    auto slot = eq == std::string::npos ? slots.end() : slots.find(item.substr(0, eq));
    if (slot == slots.end()) throw UsageError("--weights: expected NAME=VALUE, got '" + item + "'");
    try {
      std::size_t used = 0;
      *slot->second = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("--weights: bad number in '" + item + "'");
    }
  }
  return w;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Agglomerative discovery of structured programs from event logs", "agglo"};
  app.require_subcommand(1);

  LogOptions discover_log;
  std::string discover_format = "expr";
  std::string trace_steps;
  auto* discover_cmd = app.add_subcommand("discover", "Mine a structured program from an event log");
  discover_log.attach(discover_cmd);
  discover_cmd->add_option("--format", discover_format, "Output format")
      ->check(CLI::IsMember({"expr", "pseudocode", "dot", "json"}))
      ->capture_default_str();
  discover_cmd->add_option("--trace-steps", trace_steps, "Write the rewrite steps as JSON lines to FILE");

  LogOptions eval_log;
  std::string eval_model;
  std::string eval_truth;
  bool eval_json = false;
  auto* eval_cmd = app.add_subcommand("eval", "Score a program against an event log");
  eval_log.attach(eval_cmd);
  eval_cmd->add_option("--model", eval_model, "Program file or inline expression")->required();
  eval_cmd->add_option("--truth", eval_truth, "Ground-truth program file or expression");
  eval_cmd->add_flag("--json", eval_json, "Print JSON instead of a table");

  BenchConfig bench;
  bool bench_no_duplicates = false;
  bool bench_json = false;
  std::string bench_per_program;
  auto* bench_cmd = app.add_subcommand("bench", "Run the synthetic program-recovery benchmark");
  bench_cmd->add_option("--seed", bench.generator.seed, "Random seed")->capture_default_str();
  bench_cmd->add_option("--programs", bench.programs, "Programs to keep after filtering")
      ->capture_default_str();
  bench_cmd->add_option("--traces", bench.traces, "Distinct traces per program")->capture_default_str();
  bench_cmd->add_flag("--no-duplicates", bench_no_duplicates, "Forbid repeated activities in generated programs");
  bench_cmd->add_flag("--json", bench_json, "Print JSON instead of a table");
  bench_cmd->add_option("--loop-bound", bench.loop_bound, "Maximum loop iterations when sampling")
      ->capture_default_str();
  bench_cmd->add_option("--max-attempts", bench.max_attempts, "Executions tried per program")
      ->capture_default_str();
  std::size_t bench_alphabet = 0;
  bench_cmd->add_option("--alphabet", bench_alphabet,
                        "Activity alphabet size (default: 27 without duplicates, 5 with)");
  bench_cmd->add_option("--max-depth", bench.generator.max_depth, "Maximum program tree depth")
      ->capture_default_str();
  std::string bench_weights;
  bench_cmd->add_option("--weights", bench_weights,
                        "Operator weights, e.g. seq=4,opt=1,choice=1.5,plus=1,star=1,par=0.3");
  bench_cmd->add_option("--leaf-weight", bench.generator.leaf_weight, "Weight of stopping at an activity")
      ->capture_default_str();
  bench_cmd->add_option("--per-program", bench_per_program, "Write per-program results as JSON lines to FILE");

  LogOptions dfg_log;
  std::string dfg_format = "dot";
  auto* dfg_cmd = app.add_subcommand("dfg", "Print the directly-follows graph of an event log");
  dfg_log.attach(dfg_cmd);
  dfg_cmd->add_option("--format", dfg_format, "Output format")
      ->check(CLI::IsMember({"dot", "json"}))
      ->capture_default_str();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("agglo");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (discover_cmd->parsed()) {
      auto log = discover_log.load();
      auto result = discover(log);
      out << render(result.program, parse_render_format(discover_format));
      if (discover_format == "expr" || discover_format == "json") out << '\n';
      if (!trace_steps.empty()) write_file(trace_steps, result.trace.to_json_lines());
    } else if (eval_cmd->parsed()) {
      auto log = eval_log.load();
      auto model = load_model(eval_model);
      auto report = evaluate(log, model);
      std::optional<SynthesisReport> synthesis;
      if (!eval_truth.empty()) synthesis = compare_programs(model, load_model(eval_truth));
      if (eval_json) {
        nlohmann::json j = {{"metrics", to_json(report)}};
        if (synthesis) j["synthesis"] = to_json(*synthesis);
        out << j.dump(2) << '\n';
      } else {
        out << to_table(report);
        if (synthesis) out << to_table(*synthesis);
      }
    } else if (bench_cmd->parsed()) {
      bench.generator.allow_duplicates = !bench_no_duplicates;
      bench.generator.alphabet_size =
          bench_alphabet ? bench_alphabet : default_alphabet(bench.generator.allow_duplicates);
      if (!bench_weights.empty()) bench.generator.weights = parse_weights(bench_weights);
      auto report = run_benchmark(bench);
      if (bench_json) {
        out << to_json(report).dump(2) << '\n';
      } else {
        out << to_table(report);
      }
      if (!bench_per_program.empty()) write_file(bench_per_program, per_program_json_lines(report));
    } else if (dfg_cmd->parsed()) {
      auto log = dfg_log.load();
      auto g = Dfg::build(expand_sentinels(log));
      if (dfg_format == "json") {
        out << g.to_json().dump(2) << '\n';
      } else {
        out << g.to_dot();
      }
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace agglo
