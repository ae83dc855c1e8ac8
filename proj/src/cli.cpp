#include "lrbm/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lrbm/boosting.hpp"
#include "lrbm/dataset.hpp"
#include "lrbm/errors.hpp"
#include "lrbm/eval.hpp"
#include "lrbm/explain.hpp"
#include "lrbm/model_io.hpp"
#include "lrbm/parser.hpp"

namespace lrbm {

namespace {

struct RunConfig {
  std::string facts, modes, pos, neg, model, queries, out, target, time_pred;
  std::string mode = "paths";
  std::string variant = "boosted";
  double neg_ratio = 2.0;
  int folds = 5;
  int depth = 10;
  bool verbose = false;
  bool no_timing = false;
  TrainConfig train;
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(std::string("cannot read ") + what + " file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DataError("cannot write '" + path + "'");
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

KnowledgeBase load_facts(const RunConfig& rc, const Schema& schema) {
  require(rc.facts, "--facts");
  auto kb = parse_facts(read_file(rc.facts, "facts"), schema);
  if (!rc.time_pred.empty()) kb.set_temporal_filter(Symbol(rc.time_pred));
  return kb;
}

// Examples from --pos plus --neg, or negatives sampled at --neg-ratio.
ExampleSet load_examples(const RunConfig& rc, const Schema& schema, const KnowledgeBase& kb, std::ostream& err) {
  require(rc.pos, "--pos");
  auto positives = parse_atoms(read_file(rc.pos, "positives"), schema);
  Symbol target;
  if (!rc.target.empty()) {
    target = Symbol(rc.target);
  } else if (!positives.empty()) {
    target = positives.front().predicate;
  } else {
    throw DataError("no positive examples and no --target");
  }
  std::vector<Atom> negatives;
  if (!rc.neg.empty()) {
    negatives = parse_atoms(read_file(rc.neg, "negatives"), schema);
  } else {
    auto sample = generate_negatives(kb, schema.head(target), positives, rc.neg_ratio, rc.train.seed);
    if (sample.warning) err << "warning: " << *sample.warning << "\n";
    negatives = std::move(sample.atoms);
  }
  return make_example_set(target, std::move(positives), std::move(negatives), kb);
}

void add_train_flags(CLI::App* cmd, RunConfig& rc) {
  auto& t = rc.train;
  cmd->add_option("--trees", t.n_trees, "number of boosted trees")->capture_default_str();
  cmd->add_option("--leaves", t.max_leaves, "maximum leaves per tree")->capture_default_str();
  cmd->add_option("--lr", t.learning_rate, "coordinate-descent learning rate")->capture_default_str();
  cmd->add_option("--cd-iters", t.cd_max_iters, "coordinate-descent sweeps per leaf")->capture_default_str();
  cmd->add_option("--cd-tol", t.cd_tolerance, "coordinate-descent stopping tolerance")->capture_default_str();
  cmd->add_option("--max-new-vars", t.max_new_vars, "fresh variables per candidate literal")->capture_default_str();
  cmd->add_option("--psi0", t.psi0, "initial potential")->capture_default_str();
  cmd->add_option("--beam", t.beam_width, "frontier width limit, 0 = unbounded")->capture_default_str();
  cmd->add_flag("--online-cd", t.online_cd, "per-example coordinate-descent updates");
}

void add_data_flags(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--facts", rc.facts, "background facts");
  cmd->add_option("--modes", rc.modes, "mode declarations");
  cmd->add_option("--pos", rc.pos, "positive examples");
  cmd->add_option("--neg", rc.neg, "negative examples (sampled when omitted)");
  cmd->add_option("--neg-ratio", rc.neg_ratio, "negatives per positive when sampling")->capture_default_str();
  cmd->add_option("--target", rc.target, "target predicate (default: predicate of the first positive)");
  cmd->add_option("--time-pred", rc.time_pred, "predicate stamping entities with integer times");
}

void echo_config(std::ostream& out, const TrainConfig& c) {
  out << "config: trees=" << c.n_trees << " leaves=" << c.max_leaves << " lr=" << c.learning_rate
      << " cd_iters=" << c.cd_max_iters << " cd_tol=" << c.cd_tolerance << " new_vars=" << c.max_new_vars
      << " psi0=" << c.psi0 << " seed=" << c.seed << "\n";
}

int cmd_train(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.modes, "--modes");
  require(rc.out, "--out");
  rc.train.validate();
  const auto schema = parse_modes(read_file(rc.modes, "modes"));
  const auto kb = load_facts(rc, schema);
  const auto examples = load_examples(rc, schema, kb, err);
  out << "target " << examples.target.str() << ": " << examples.positives.size() << " positives, "
      << examples.negatives.size() << " negatives, " << kb.size() << " facts\n";
  echo_config(out, rc.train);
  const auto model = train(kb, schema, examples, rc.train, [&](const TreeReport& r) {
    char line[128];
    std::snprintf(line, sizeof line, "tree %d/%d: leaves=%zu sse=%.6f mean|grad|=%.6f\n", r.index,
                  rc.train.n_trees, r.leaves, r.sse, r.mean_abs_gradient);
    out << line;
  });
  save_model(model, rc.out);
  out << "wrote " << rc.out << "\n";
  return kExitOk;
}

int cmd_predict(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.model, "--model");
  require(rc.queries, "--queries");
  const auto model = load_model(rc.model);
  const auto kb = load_facts(rc, model.schema);
  const auto text = read_file(rc.queries, "queries");

  std::ostringstream scores;
  bool failed = false;
  std::istringstream lines(text);
  std::string line;
  for (std::size_t n = 1; std::getline(lines, line); ++n) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '%') continue;
    try {
      const Atom query = parse_atom(line, model.schema);
      const auto p = predict(model, query, kb);
      char buf[96];
      std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g", p.probability, p.psi);
      scores << to_string(query) << buf;
      if (rc.verbose) {
        for (double v : p.per_tree) {
          std::snprintf(buf, sizeof buf, "\t%.17g", v);
          scores << buf;
        }
      }
      scores << "\n";
    } catch (const std::runtime_error& e) {
      err << rc.queries << ":" << n << ": " << e.what() << "\n";
      failed = true;
    }
  }
  if (rc.out.empty()) {
    out << scores.str();
  } else {
    write_file(rc.out, scores.str());
  }
  return failed ? kExitData : kExitOk;
}

int cmd_explain(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.model, "--model");
  require(rc.out, "--out");
  const auto model = load_model(rc.model);
  LiftedRBMNetwork net;
  if (rc.mode == "paths") {
    if (model.trees.empty()) throw DataError("model has no trees to map");
    net = paths_to_lrbm(model);
  } else if (rc.mode == "distill") {
    if (rc.pos.empty()) throw ConfigError("--mode distill needs training examples (--facts, --pos)");
    const auto kb = load_facts(rc, model.schema);
    const auto examples = load_examples(rc, model.schema, kb, err);
    const auto labeled = examples.labeled();
    const auto distilled = distill_single_tree(model, labeled, kb, rc.depth);
    save_model(distilled, rc.out + ".model.json");
    net = paths_to_lrbm(distilled);
    double abs_err = 0;
    for (const auto& ex : labeled) abs_err += std::abs(model_psi(model, ex.query, kb) - model_psi(distilled, ex.query, kb));
    out << "distilled tree: depth " << distilled.trees.front().depth() << ", mean |psi error| "
        << abs_err / static_cast<double>(labeled.size()) << "\n";
  } else {
    throw ConfigError("--mode must be 'paths' or 'distill'");
  }
  write_file(rc.out + ".json", network_json(net));
  write_file(rc.out + ".dot", export_dot(net));
  write_file(rc.out + ".txt", export_text(net));
  out << "hidden nodes: " << net.hidden.size() << ", visible predicates: " << net.visible.size() << "\n";
  out << "wrote " << rc.out << ".json, " << rc.out << ".dot, " << rc.out << ".txt\n";
  return kExitOk;
}

int cmd_eval(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require(rc.modes, "--modes");
  rc.train.validate();
  const Learner learner = parse_learner(rc.variant);
  const auto schema = parse_modes(read_file(rc.modes, "modes"));
  const auto kb = load_facts(rc, schema);
  const auto examples = load_examples(rc, schema, kb, err);
  const auto folds = split_folds(examples, rc.folds, rc.train.seed);
  const auto report = cross_validate(kb, schema, examples, folds, rc.train, learner, rc.depth);
  out << report.to_text(!rc.no_timing);
  if (!rc.out.empty()) write_file(rc.out, report.to_json(!rc.no_timing));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boosted lifted RBMs for relational data"};
  app.name("lrbm-boost");
  app.require_subcommand(1);
  RunConfig rc;
  app.add_option("--seed", rc.train.seed, "random seed")->capture_default_str();
  app.add_option("--jobs", rc.train.jobs, "worker threads")->capture_default_str();

  auto* train_cmd = app.add_subcommand("train", "learn a boosted model");
  add_data_flags(train_cmd, rc);
  add_train_flags(train_cmd, rc);
  train_cmd->add_option("--out", rc.out, "model file to write");

  auto* predict_cmd = app.add_subcommand("predict", "score queries with a model");
  predict_cmd->add_option("--model", rc.model, "model file");
  predict_cmd->add_option("--facts", rc.facts, "background facts");
  predict_cmd->add_option("--queries", rc.queries, "ground target atoms, one per line");
  predict_cmd->add_option("--time-pred", rc.time_pred, "predicate stamping entities with integer times");
  predict_cmd->add_option("--out", rc.out, "scores file (default: stdout)");
  predict_cmd->add_flag("--verbose", rc.verbose, "append per-tree contributions");

  auto* explain_cmd = app.add_subcommand("explain", "convert a model into a lifted RBM network");
  explain_cmd->add_option("--model", rc.model, "model file");
  explain_cmd->add_option("--mode", rc.mode, "paths or distill")->capture_default_str();
  explain_cmd->add_option("--depth", rc.depth, "distilled tree depth")->capture_default_str();
  explain_cmd->add_option("--out", rc.out, "output prefix for .json, .dot and .txt");
  add_data_flags(explain_cmd, rc);

  auto* eval_cmd = app.add_subcommand("eval", "k-fold cross-validation");
  add_data_flags(eval_cmd, rc);
  add_train_flags(eval_cmd, rc);
  eval_cmd->add_option("--folds", rc.folds, "number of folds")->capture_default_str();
  eval_cmd->add_option("--variant", rc.variant, "boosted, single-tree or distilled")->capture_default_str();
  eval_cmd->add_option("--depth", rc.depth, "tree depth for single-tree and distilled")->capture_default_str();
  eval_cmd->add_option("--out", rc.out, "JSON report file");
  eval_cmd->add_flag("--no-timing", rc.no_timing, "omit wall-clock times");

  // Global flags are accepted after the subcommand too.
  for (auto* cmd : {train_cmd, predict_cmd, explain_cmd, eval_cmd}) {
    cmd->fallthrough();
    if (cmd != predict_cmd) cmd->add_flag("--verbose", rc.verbose, "more output");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(rc, out, err);
    if (*predict_cmd) return cmd_predict(rc, out, err);
    if (*explain_cmd) return cmd_explain(rc, out, err);
    if (*eval_cmd) return cmd_eval(rc, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const TypeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace lrbm
