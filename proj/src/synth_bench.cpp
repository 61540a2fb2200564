#include "agglo/synth_bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "agglo/error.hpp"
#include "agglo/miner.hpp"

namespace agglo {

std::string generated_activity(std::size_t index) {
  if (index < 26) return std::string(1, static_cast<char>('a' + index));
  return "a" + std::to_string(index);
}

std::size_t default_alphabet(bool allow_duplicates) { return allow_duplicates ? 5 : 27; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  if (n == 0) throw InvariantError("uniform_index over an empty range");
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % range);
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

double total_nary(const OperatorWeights& w) { return w.sequence + w.choice + w.parallel; }

std::size_t max_leaves(const GeneratorConfig& cfg) {
  if (cfg.max_depth <= 1 || total_nary(cfg.weights) <= 0.0) return 1;
  double n = std::pow(static_cast<double>(cfg.max_arity), static_cast<double>(cfg.max_depth - 1));
  return static_cast<std::size_t>(n);
}

class ProgramSampler {
 public:
  ProgramSampler(const GeneratorConfig& cfg, std::mt19937_64& rng) : cfg_(cfg), rng_(rng) {
    for (std::size_t i = 0; i < cfg.alphabet_size; ++i) pool_.push_back(generated_activity(i));
    if (!cfg.allow_duplicates) {
      // Fisher-Yates with the portable index helper
      for (std::size_t i = pool_.size(); i > 1; --i) std::swap(pool_[i - 1], pool_[uniform_index(rng_, i)]);
    }
  }

  Program sample(std::size_t depth) {
    if (depth >= cfg_.max_depth) return leaf();
    const auto& w = cfg_.weights;
    const double leaf_w = depth == 1 ? 0.0 : cfg_.leaf_weight;
    const double weights[] = {leaf_w, w.sequence, w.optional, w.choice, w.plus, w.star, w.parallel};
    double total = 0.0;
    for (double x : weights) total += x;
    if (total <= 0.0) return leaf();
    double r = uniform_unit(rng_) * total;
    std::size_t pick = 0;
    for (; pick + 1 < std::size(weights); ++pick) {
      if (r < weights[pick]) break;
      r -= weights[pick];
    }
    switch (pick) {
      case 0: return leaf();
      case 1: return Program::sequence(children(depth));
      case 2: return Program::optional(sample(depth + 1));
      case 3: return Program::choice(children(depth));
      case 4: return Program::plus(sample(depth + 1));
      case 5: return Program::star(sample(depth + 1));
      default: return Program::parallel(children(depth));
    }
  }

 private:
  std::vector<Program> children(std::size_t depth) {
    auto n = 2 + uniform_index(rng_, cfg_.max_arity - 1);
    std::vector<Program> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample(depth + 1));
    return out;
  }

  Program leaf() {
    if (cfg_.allow_duplicates) return Program::activity(pool_[uniform_index(rng_, pool_.size())]);
    if (next_ >= pool_.size()) throw GenerationError("alphabet exhausted while generating");
    return Program::activity(pool_[next_++]);
  }

  const GeneratorConfig& cfg_;
  std::mt19937_64& rng_;
  std::vector<std::string> pool_;
  std::size_t next_ = 0;
};

void execute_into(const Program& p, std::size_t loop_bound, std::mt19937_64& rng, Trace& out) {
  switch (p.kind()) {
    case NodeKind::Activity:
      out.push_back(p.name());
      return;
    case NodeKind::Sequence:
      for (const auto& c : p.children()) execute_into(c, loop_bound, rng, out);
      return;
    case NodeKind::Optional:
      if (uniform_index(rng, 2) == 1) execute_into(p.body(), loop_bound, rng, out);
      return;
    case NodeKind::Choice:
      execute_into(p.children()[uniform_index(rng, p.children().size())], loop_bound, rng, out);
      return;
    case NodeKind::Plus:
    case NodeKind::Star: {
      std::size_t lo = p.kind() == NodeKind::Plus ? 1 : 0;
      std::size_t n = lo + uniform_index(rng, loop_bound - lo + 1);
      for (std::size_t i = 0; i < n; ++i) execute_into(p.body(), loop_bound, rng, out);
      return;
    }
    case NodeKind::Parallel: {
      std::vector<Trace> parts;
      std::size_t remaining = 0;
      for (const auto& c : p.children()) {
        Trace t;
        execute_into(c, loop_bound, rng, t);
        remaining += t.size();
        parts.push_back(std::move(t));
      }
      // picking a part with probability proportional to what it has left
      // yields a uniformly random interleaving
      std::vector<std::size_t> pos(parts.size(), 0);
      while (remaining > 0) {
        auto r = uniform_index(rng, remaining);
        std::size_t i = 0;
        while (r >= parts[i].size() - pos[i]) {
          r -= parts[i].size() - pos[i];
          ++i;
        }
        out.push_back(parts[i][pos[i]++]);
        --remaining;
      }
      return;
    }
  }
}

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return r;
}

bool has_duplicates(const Program& p) {
  auto leaves = p.leaves();
  std::set<std::string> distinct(leaves.begin(), leaves.end());
  return distinct.size() != leaves.size();
}

std::mt19937_64 stream_for(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (alphabet_size == 0) throw ConfigError("alphabet_size must be at least 1");
  if (max_depth == 0) throw ConfigError("max_depth must be at least 1");
  if (max_arity < 2) throw ConfigError("max_arity must be at least 2");
  const double ws[] = {leaf_weight, weights.sequence, weights.optional, weights.choice,
                       weights.plus, weights.star, weights.parallel};
  for (double w : ws) {
    if (!(w >= 0.0)) throw ConfigError("generator weights must be non-negative");
  }
  if (weights.sequence + weights.optional + weights.choice + weights.plus + weights.star +
          weights.parallel <= 0.0 &&
      max_depth > 1) {
    throw ConfigError("at least one operator weight must be positive");
  }
  if (!allow_duplicates && alphabet_size < max_leaves(*this)) {
    throw GenerationError("alphabet of " + std::to_string(alphabet_size) +
                          " activities cannot fill a duplicate-free program of up to " +
                          std::to_string(max_leaves(*this)) + " leaves");
  }
}

Program sample_program(const GeneratorConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  ProgramSampler sampler(cfg, rng);
  return canonicalize(simplify(sampler.sample(1)));
}

Trace execute(const Program& p, std::size_t loop_bound, std::mt19937_64& rng) {
  if (loop_bound == 0) throw ConfigError("loop_bound must be at least 1");
  Trace t;
  execute_into(p, loop_bound, rng, t);
  return t;
}

std::optional<std::vector<Trace>> sample_traces(const Program& p, std::size_t k, std::size_t max_attempts,
                                                std::size_t loop_bound, std::mt19937_64& rng) {
  if (k == 0) throw ConfigError("need at least one trace");
  std::set<Trace> found;
  for (std::size_t i = 0; i < max_attempts && found.size() < k; ++i) {
    found.insert(execute(p, loop_bound, rng));
  }
  if (found.size() < k) return std::nullopt;
  return std::vector<Trace>(found.begin(), found.end());
}

BenchReport run_benchmark(const BenchConfig& cfg) {
  if (cfg.programs == 0) throw ConfigError("need at least one program");
  cfg.generator.validate();
  BenchReport report;
  report.config = cfg;
  std::vector<double> edits, lengths, tokens, depths;
  const std::size_t budget = cfg.programs * cfg.candidate_factor;
  for (std::size_t index = 0; index < budget && report.programs < cfg.programs; ++index) {
    ++report.candidates;
    auto rng = stream_for(cfg.generator.seed, index);
    auto truth = sample_program(cfg.generator, rng);
    if (cfg.generator.allow_duplicates && cfg.duplicates_only && !has_duplicates(truth)) continue;
    auto traces = sample_traces(truth, cfg.traces, cfg.max_attempts, cfg.loop_bound, rng);
    if (!traces) continue;

    EventLog log(*traces);
    auto mined = discover(log).program;
    ProgramResult r;
    r.index = index;
    r.truth = to_expr(truth);
    r.mined = to_expr(mined);
    r.traces = *traces;
    r.synthesis = compare_programs(mined, truth);
    r.metrics = evaluate(log, mined);
    r.flower_metrics = evaluate(log, flower_model(log.alphabet(), log.has_empty_trace()));
    r.truth_tokens = tokenize(truth).size();
    r.truth_depth = truth.depth();

    ++report.programs;
    if (r.synthesis.exact_match) ++report.exact_matches;
    edits.push_back(static_cast<double>(r.synthesis.edit_distance));
    for (const auto& t : *traces) lengths.push_back(static_cast<double>(t.size()));
    tokens.push_back(static_cast<double>(r.truth_tokens));
    depths.push_back(static_cast<double>(r.truth_depth));
    auto add = [](MetricsReport& acc, const MetricsReport& m) {
      acc.fitness += m.fitness;
      acc.precision += m.precision;
      acc.f1 += m.f1;
      acc.generalization += m.generalization;
      acc.simplicity += m.simplicity;
    };
    add(report.mean_metrics, r.metrics);
    add(report.mean_flower_metrics, r.flower_metrics);
    report.results.push_back(std::move(r));
  }
  if (report.programs == 0) {
    throw ConfigError("no generated program survived filtering (" + std::to_string(report.candidates) +
                      " candidates); relax the generator or the trace count");
  }
  const double n = static_cast<double>(report.programs);
  for (auto* m : {&report.mean_metrics, &report.mean_flower_metrics}) {
    m->fitness /= n;
    m->precision /= n;
    m->f1 /= n;
    m->generalization /= n;
    m->simplicity /= n;
  }
  report.exact_match_rate = static_cast<double>(report.exact_matches) / n;
  report.edit_distance = mean_sd(edits);
  report.trace_length = mean_sd(lengths);
  report.program_tokens = mean_sd(tokens);
  report.tree_depth = mean_sd(depths);
  return report;
}

namespace {

nlohmann::json to_json(const MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

nlohmann::json config_json(const BenchConfig& c) {
  const auto& g = c.generator;
  return {{"seed", g.seed},
          {"alphabet_size", g.alphabet_size},
          {"max_depth", g.max_depth},
          {"max_arity", g.max_arity},
          {"leaf_weight", g.leaf_weight},
          {"weights",
           {{"seq", g.weights.sequence},
            {"opt", g.weights.optional},
            {"choice", g.weights.choice},
            {"plus", g.weights.plus},
            {"star", g.weights.star},
            {"par", g.weights.parallel}}},
          {"allow_duplicates", g.allow_duplicates},
          {"duplicates_only", c.duplicates_only},
          {"programs", c.programs},
          {"traces", c.traces},
          {"loop_bound", c.loop_bound},
          {"max_attempts", c.max_attempts}};
}

}  // namespace

nlohmann::json to_json(const BenchReport& r) {
  return {{"config", config_json(r.config)},
          {"candidates", r.candidates},
          {"programs", r.programs},
          {"exact_matches", r.exact_matches},
          {"exact_match_rate", r.exact_match_rate},
          {"edit_distance", to_json(r.edit_distance)},
          {"metrics", agglo::to_json(r.mean_metrics)},
          {"flower_metrics", agglo::to_json(r.mean_flower_metrics)},
          {"trace_length", to_json(r.trace_length)},
          {"program_tokens", to_json(r.program_tokens)},
          {"tree_depth", to_json(r.tree_depth)}};
}

std::string to_table(const BenchReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  auto row = [&](const std::string& name, const std::string& value) {
    out << std::left << std::setw(24) << name << std::right << std::setw(20) << value << '\n';
  };
  auto num = [](double x, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
  };
  auto pm = [&](const MeanSd& m) { return num(m.mean, 2) + " +- " + num(m.sd, 2); };
  row("seed", std::to_string(r.config.generator.seed));
  row("duplicates", r.config.generator.allow_duplicates ? "allowed" : "none");
  row("candidates", std::to_string(r.candidates));
  row("programs", std::to_string(r.programs));
  row("exact matches", std::to_string(r.exact_matches) + " = " + num(100.0 * r.exact_match_rate, 2) + "%");
  row("edit distance", pm(r.edit_distance));
  row("trace length", pm(r.trace_length));
  row("program tokens", pm(r.program_tokens));
  row("tree depth", pm(r.tree_depth));
  out << '\n' << std::left << std::setw(16) << "model" << std::right << std::setw(10) << "fitness"
      << std::setw(10) << "precision" << std::setw(10) << "f1" << std::setw(10) << "general." << std::setw(10)
      << "simpl." << '\n';
  auto metrics_row = [&](const std::string& name, const MetricsReport& m) {
    out << std::left << std::setw(16) << name << std::right << std::setw(10) << m.fitness << std::setw(10)
        << m.precision << std::setw(10) << m.f1 << std::setw(10) << m.generalization << std::setw(10)
        << m.simplicity << '\n';
  };
  metrics_row("agglomerative", r.mean_metrics);
  metrics_row("flower", r.mean_flower_metrics);
  return out.str();
}

std::string per_program_json_lines(const BenchReport& r) {
  std::string out;
  for (const auto& p : r.results) {
    nlohmann::json j = {{"index", p.index},
                        {"truth", p.truth},
                        {"mined", p.mined},
                        {"traces", p.traces},
                        {"exact_match", p.synthesis.exact_match},
                        {"edit_distance", p.synthesis.edit_distance},
                        {"metrics", agglo::to_json(p.metrics)},
                        {"flower_metrics", agglo::to_json(p.flower_metrics)},
                        {"truth_tokens", p.truth_tokens},
                        {"truth_depth", p.truth_depth}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace agglo
