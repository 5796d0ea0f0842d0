// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API: ingest, synth, train, eval,
// compare and grad-check. Options can also come from a `key = value` config
// file given with --config; flags on the command line win.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "nnlft/nnlft.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitCheckFailed = 4;

struct Failure {
  int code;
  std::string message;
};

void check(nnlft_status status) {
  if (status != NNLFT_OK) throw Failure{static_cast<int>(status), nnlft_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Free(p); }
};

using Tensor = std::unique_ptr<nnlft_tensor, Deleter<nnlft_tensor, nnlft_tensor_free>>;
using Manifest = std::unique_ptr<nnlft_manifest, Deleter<nnlft_manifest, nnlft_manifest_free>>;
using Split = std::unique_ptr<nnlft_split, Deleter<nnlft_split, nnlft_split_free>>;
using Model = std::unique_ptr<nnlft_model, Deleter<nnlft_model, nnlft_model_free>>;
using Trace = std::unique_ptr<nnlft_trace, Deleter<nnlft_trace, nnlft_trace_free>>;

// 17 significant digits for data files.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest round-trip form for human-facing text.
std::string fmt_short(double v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

// Fully resolved inputs of one command; a copy lands in every output directory.
struct RunSpec {
  std::string command;
  std::string data;
  std::string model;
  std::string out;
  std::string split = "0.7,0.1,0.2";
  std::string subset = "validation";
  std::string delimiter = ",";
  std::string dims = "200,200,20";
  std::string duplicate_policy = "mean";
  std::string reg_mode = "eq6-exact";
  std::string variant = "exact";
  std::size_t k_slots = 165;
  std::size_t true_rank = 4;
  std::size_t entries = 50000;
  std::size_t seeds = 10;
  std::size_t samples = 1000;
  double noise = 0.0;
  double lambda_max = 0.1;
  bool zero_lambda = false;
  bool plain_sgd = false;
  std::uint64_t seed = 1;
  bool seed_given = false;
  nnlft_train_config train{};
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Failure{NNLFT_ERR_CONFIG, std::string("bad ") + what + ": " + text};
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw Failure{NNLFT_ERR_CONFIG, std::string(what) + " needs " + std::to_string(expected) + " comma-separated values"};
  }
  return values;
}

char parse_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t" || text == "\t") return '\t';
  if (text.size() == 1) return text[0];
  throw Failure{NNLFT_ERR_CONFIG, "delimiter must be a single character or 'tab'"};
}

nnlft_subset parse_subset(const std::string& text) {
  if (text == "train") return NNLFT_SUBSET_TRAIN;
  if (text == "validation") return NNLFT_SUBSET_VALIDATION;
  if (text == "test") return NNLFT_SUBSET_TEST;
  if (text == "all") return NNLFT_SUBSET_ALL;
  throw Failure{NNLFT_ERR_CONFIG, "subset must be train, validation, test or all"};
}

nnlft_duplicate_policy parse_policy(const std::string& text) {
  if (text == "mean") return NNLFT_DUP_MEAN;
  if (text == "last-wins") return NNLFT_DUP_LAST_WINS;
  throw Failure{NNLFT_ERR_CONFIG, "duplicate policy must be mean or last-wins"};
}

nnlft_reg_mode parse_reg_mode(const std::string& text) {
  if (text == "eq6-exact" || text == "exact") return NNLFT_REG_EXACT;
  if (text == "raw-y") return NNLFT_REG_RAW_Y;
  throw Failure{NNLFT_ERR_CONFIG, "reg mode must be eq6-exact or raw-y"};
}

nnlft_grad_variant parse_variant(const std::string& text) {
  if (text == "exact") return NNLFT_GRAD_EXACT;
  if (text == "flipped-sign") return NNLFT_GRAD_FLIPPED_SIGN;
  if (text == "raw-y") return NNLFT_GRAD_RAW_Y;
  throw Failure{NNLFT_ERR_CONFIG, "variant must be exact, flipped-sign or raw-y"};
}

void require_input(const std::string& path, const char* flag) {
  if (path.empty()) throw Failure{NNLFT_ERR_CONFIG, std::string(flag) + " is required"};
  if (!fs::exists(path)) throw Failure{NNLFT_ERR_CONFIG, std::string(flag) + " path does not exist: " + path};
}

fs::path prepare_out(const RunSpec& spec) {
  if (spec.out.empty()) throw Failure{NNLFT_ERR_CONFIG, "--out is required"};
  std::error_code ec;
  fs::create_directories(spec.out, ec);
  if (ec) throw Failure{NNLFT_ERR_DATA, "cannot create " + spec.out + ": " + ec.message()};
  return spec.out;
}

void write_train_keys(std::ostream& out, const nnlft_train_config& c, const RunSpec& spec) {
  out << "rank = " << c.rank << '\n'
      << "eta = " << fmt_short(c.eta) << '\n'
      << "lambda = " << fmt_short(c.lambda) << '\n'
      << "gamma = " << fmt_short(c.gamma) << '\n'
      << "epochs = " << c.max_epochs << '\n'
      << "patience = " << c.patience << '\n'
      << "min-improvement = " << fmt_short(c.min_improvement) << '\n'
      << "init-scale = " << fmt_short(c.init_scale) << '\n'
      << "reg-mode = " << spec.reg_mode << '\n'
      << "split = " << spec.split << '\n';
}

void write_runspec(const fs::path& dir, const RunSpec& spec) {
  std::ofstream out(dir / "runspec.txt", std::ios::binary);
  out << "# resolved run specification\n"
      << "command = " << spec.command << '\n';
  if (!spec.data.empty()) out << "data = " << spec.data << '\n';
  if (!spec.model.empty()) out << "model = " << spec.model << '\n';
  out << "out = " << spec.out << '\n' << "seed = " << spec.seed << '\n';
  if (spec.command == "ingest") {
    out << "delimiter = " << (spec.delimiter == "\t" ? "tab" : spec.delimiter) << '\n'
        << "k-slots = " << spec.k_slots << '\n'
        << "duplicate-policy = " << spec.duplicate_policy << '\n';
  } else if (spec.command == "synth") {
    out << "dims = " << spec.dims << '\n'
        << "true-rank = " << spec.true_rank << '\n'
        << "entries = " << spec.entries << '\n'
        << "noise = " << fmt_short(spec.noise) << '\n';
  } else if (spec.command == "train") {
    write_train_keys(out, spec.train, spec);
    out << "plain-sgd = " << (spec.plain_sgd ? "true" : "false") << '\n';
  } else if (spec.command == "compare") {
    write_train_keys(out, spec.train, spec);
    out << "seeds = " << spec.seeds << '\n';
  } else if (spec.command == "eval") {
    out << "split = " << spec.split << '\n' << "subset = " << spec.subset << '\n';
  } else if (spec.command == "grad-check") {
    out << "samples = " << spec.samples << '\n'
        << "lambda-max = " << fmt_short(spec.lambda_max) << '\n'
        << "zero-lambda = " << (spec.zero_lambda ? "true" : "false") << '\n'
        << "variant = " << spec.variant << '\n';
  }
  if (!out) throw Failure{NNLFT_ERR_DATA, "failed writing runspec.txt"};
}

nnlft_train_config resolve_train(RunSpec& spec) {
  nnlft_train_config c = spec.train;
  c.seed = spec.seed;
  c.reg_mode = parse_reg_mode(spec.reg_mode);
  c.update_rule = spec.plain_sgd ? NNLFT_RULE_PLAIN_SGD : NNLFT_RULE_MOMENTUM;
  return c;
}

Split make_split(const nnlft_tensor* tensor, const std::string& ratios_text, std::uint64_t seed) {
  const auto r = parse_list(ratios_text, 3, "--split");
  nnlft_split* split = nullptr;
  check(nnlft_split_create(tensor, r.data(), seed, &split));
  return Split(split);
}

Tensor load_tensor(const std::string& path) {
  nnlft_tensor* t = nullptr;
  check(nnlft_tensor_load(path.c_str(), &t));
  return Tensor(t);
}

int run_ingest(RunSpec& spec) {
  require_input(spec.data, "--data");
  const auto dir = prepare_out(spec);
  nnlft_tensor* t = nullptr;
  nnlft_manifest* m = nullptr;
  check(nnlft_ingest_file(spec.data.c_str(), parse_delimiter(spec.delimiter), spec.k_slots,
                          parse_policy(spec.duplicate_policy), &t, &m));
  Tensor tensor(t);
  Manifest manifest(m);
  check(nnlft_tensor_save(tensor.get(), (dir / "tensor.tsv").c_str()));
  check(nnlft_manifest_save(manifest.get(), dir.c_str()));
  write_runspec(dir, spec);
  std::size_t dims[3];
  nnlft_tensor_shape(tensor.get(), dims);
  std::cout << "ingested " << nnlft_manifest_record_count(manifest.get()) << " records into "
            << nnlft_tensor_size(tensor.get()) << " entries, shape " << dims[0] << 'x' << dims[1] << 'x' << dims[2]
            << ", density " << fmt_short(nnlft_tensor_density(tensor.get())) << '\n';
  return 0;
}

int run_synth(RunSpec& spec) {
  const auto dir = prepare_out(spec);
  const auto d = parse_list(spec.dims, 3, "--dims");
  std::size_t dims[3];
  for (int n = 0; n < 3; ++n) {
    if (d[n] < 1 || d[n] != static_cast<double>(static_cast<std::size_t>(d[n]))) {
      throw Failure{NNLFT_ERR_CONFIG, "--dims must be positive integers"};
    }
    dims[n] = static_cast<std::size_t>(d[n]);
  }
  nnlft_tensor* t = nullptr;
  nnlft_model* truth = nullptr;
  check(nnlft_synth(dims, spec.true_rank, spec.entries, spec.noise, spec.seed, &t, &truth));
  Tensor tensor(t);
  Model model(truth);
  check(nnlft_tensor_save(tensor.get(), (dir / "tensor.tsv").c_str()));
  check(nnlft_model_save(model.get(), (dir / "truth.factors").c_str()));
  write_runspec(dir, spec);
  std::cout << "synthesized " << nnlft_tensor_size(tensor.get()) << " entries, density "
            << fmt_short(nnlft_tensor_density(tensor.get())) << '\n';
  return 0;
}

int run_train(RunSpec& spec) {
  require_input(spec.data, "--data");
  const auto dir = prepare_out(spec);
  auto tensor = load_tensor(spec.data);
  const auto config = resolve_train(spec);
  auto split = make_split(tensor.get(), spec.split, spec.seed);
  nnlft_model* m = nullptr;
  nnlft_trace* tr = nullptr;
  check(nnlft_train(tensor.get(), split.get(), &config, nullptr, nullptr, &m, &tr));
  Model model(m);
  Trace trace(tr);
  check(nnlft_model_save(model.get(), (dir / "model.factors").c_str()));
  check(nnlft_trace_write_csv(trace.get(), (dir / "trace.csv").c_str()));
  write_runspec(dir, spec);
  int best_epoch = 0;
  double best = 0;
  nnlft_trace_best(trace.get(), &best_epoch, &best);
  std::cout << "best validation RMSE " << fmt_short(best) << " at epoch " << best_epoch << " of "
            << nnlft_trace_epochs(trace.get()) << '\n';
  return 0;
}

int run_eval(RunSpec& spec) {
  require_input(spec.data, "--data");
  require_input(spec.model, "--model");
  const auto dir = prepare_out(spec);
  auto tensor = load_tensor(spec.data);
  nnlft_model* m = nullptr;
  check(nnlft_model_load(spec.model.c_str(), &m));
  Model model(m);
  // The split is rebuilt from (ratios, seed); the model records its training seed.
  if (!spec.seed_given) spec.seed = nnlft_model_seed(model.get());
  const auto subset = parse_subset(spec.subset);
  Split split;
  if (subset != NNLFT_SUBSET_ALL) split = make_split(tensor.get(), spec.split, spec.seed);
  double rmse = 0, mae = 0;
  std::size_t count = 0;
  check(nnlft_evaluate(model.get(), tensor.get(), split.get(), subset, &rmse, &mae, &count));
  std::ofstream out(dir / "eval.csv", std::ios::binary);
  out << "subset,entries,rmse,mae\n" << spec.subset << ',' << count << ',' << fmt(rmse) << ',' << fmt(mae) << '\n';
  if (!out) throw Failure{NNLFT_ERR_DATA, "failed writing eval.csv"};
  write_runspec(dir, spec);
  std::cout << spec.subset << ": " << count << " entries, RMSE " << fmt_short(rmse) << ", MAE " << fmt_short(mae) << '\n';
  return 0;
}

int run_compare(RunSpec& spec) {
  require_input(spec.data, "--data");
  if (spec.seeds < 1) throw Failure{NNLFT_ERR_CONFIG, "--seeds must be >= 1"};
  const auto dir = prepare_out(spec);
  write_runspec(dir, spec);
  auto tensor = load_tensor(spec.data);
  auto momentum = resolve_train(spec);
  momentum.update_rule = NNLFT_RULE_MOMENTUM;
  auto plain = momentum;
  plain.gamma = 0.0;

  std::vector<Trace> traces;
  std::vector<std::string> labels;
  std::ofstream summary(dir / "summary.csv", std::ios::binary);
  summary << "seed,momentum_best_rmse,momentum_epochs_to_best,plain_best_rmse,plain_epochs_to_best\n";
  std::size_t faster = 0;
  for (std::size_t n = 0; n < spec.seeds; ++n) {
    const std::uint64_t seed = spec.seed + n;
    auto split = make_split(tensor.get(), spec.split, seed);
    int epochs[2] = {0, 0};
    double best[2] = {0, 0};
    const char* names[2] = {"momentum", "plain"};
    for (int run = 0; run < 2; ++run) {
      auto config = run == 0 ? momentum : plain;
      config.seed = seed;
      nnlft_trace* tr = nullptr;
      check(nnlft_train(tensor.get(), split.get(), &config, nullptr, nullptr, nullptr, &tr));
      Trace trace(tr);
      const std::string label = std::string(names[run]) + "/seed=" + std::to_string(seed);
      const auto file = dir / ("trace_" + std::string(names[run]) + "_seed" + std::to_string(seed) + ".csv");
      check(nnlft_trace_write_csv(trace.get(), file.c_str()));
      nnlft_trace_best(trace.get(), &epochs[run], &best[run]);
      traces.push_back(std::move(trace));
      labels.push_back(label);
    }
    faster += epochs[0] < epochs[1] ? 1 : 0;
    summary << seed << ',' << fmt(best[0]) << ',' << epochs[0] << ',' << fmt(best[1]) << ',' << epochs[1] << '\n';
    summary.flush();
  }

  std::vector<const char*> label_ptrs;
  std::vector<const nnlft_trace*> trace_ptrs;
  for (std::size_t n = 0; n < traces.size(); ++n) {
    label_ptrs.push_back(labels[n].c_str());
    trace_ptrs.push_back(traces[n].get());
  }
  check(nnlft_compare_runs(label_ptrs.data(), trace_ptrs.data(), traces.size(), (dir / "report.csv").c_str(),
                           nullptr));
  std::cout << "momentum reached its best epoch sooner in " << faster << " of " << spec.seeds << " seeds\n";
  return 0;
}

int run_grad_check(RunSpec& spec) {
  nnlft_grad_check_options options;
  nnlft_grad_check_options_init(&options);
  options.samples = spec.samples;
  options.seed = spec.seed;
  options.lambda_max = spec.lambda_max;
  options.zero_lambda = spec.zero_lambda ? 1 : 0;
  options.variant = parse_variant(spec.variant);
  nnlft_grad_check_result result;
  std::string worst(4096, '\0');
  check(nnlft_grad_check(&options, &result, worst.data(), worst.size()));
  worst.resize(worst.find('\0'));

  std::ostringstream report;
  report << "grad-check " << (result.passed ? "PASS" : "FAIL") << ": " << result.samples << " samples, "
         << result.components << " components, max relative error " << fmt_short(result.max_rel_error)
         << " (tolerance " << fmt_short(result.tolerance) << ")\n";
  if (!result.passed) report << "worst case:\n" << worst;
  std::cout << report.str();
  if (!spec.out.empty()) {
    const auto dir = prepare_out(spec);
    std::ofstream(dir / "grad_check.txt", std::ios::binary) << report.str();
    write_runspec(dir, spec);
  }
  return result.passed ? 0 : kExitCheckFailed;
}

// Splices `key = value` lines from --config into the argument list right
// after the subcommand, so explicit flags (parsed later) take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> from_file;
  for (std::size_t n = 1; n < args.size(); ++n) {
    std::string path;
    if (args[n] == "--config" && n + 1 < args.size()) {
      path = args[n + 1];
      args.erase(args.begin() + static_cast<long>(n), args.begin() + static_cast<long>(n) + 2);
    } else if (args[n].rfind("--config=", 0) == 0) {
      path = args[n].substr(9);
      args.erase(args.begin() + static_cast<long>(n));
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw Failure{NNLFT_ERR_CONFIG, "cannot read config file " + path};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Failure{NNLFT_ERR_CONFIG, path + ":" + std::to_string(line_no) + ": expected 'key = value'"};
      }
      auto key = line.substr(first, eq - first);
      auto value = line.substr(eq + 1);
      key.erase(key.find_last_not_of(" \t") + 1);
      value.erase(0, value.find_first_not_of(" \t"));
      value.erase(value.find_last_not_of(" \t\r") + 1);
      from_file.push_back("--" + key + "=" + value);
    }
    break;
  }
  if (!from_file.empty()) {
    const auto at = args.size() > 1 ? args.begin() + 2 : args.end();
    args.insert(at, from_file.begin(), from_file.end());
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  RunSpec spec;
  nnlft_train_config_init(&spec.train);

  CLI::App app{"Non-negative latent factorization of sparse 3-way tensors with momentum SGD"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(nnlft_version()));
  app.add_option("--config", "Config file of 'key = value' lines (flags override)");

  auto add_out = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--out", spec.out, "Output directory");
    if (required) opt->required();
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>(
           "--seed", [&](const std::uint64_t& s) { spec.seed = s; spec.seed_given = true; }, "Random seed")
        ->default_str("1");
  };
  auto add_train = [&](CLI::App* sub) {
    sub->add_option("--rank", spec.train.rank, "Latent rank R")->capture_default_str();
    sub->add_option("--eta", spec.train.eta, "Step size")->capture_default_str();
    sub->add_option("--lambda", spec.train.lambda, "Regularization weight")->capture_default_str();
    sub->add_option("--gamma", spec.train.gamma, "Momentum constant in [0, 1)")->capture_default_str();
    sub->add_option("--epochs", spec.train.max_epochs, "Maximum epochs")->capture_default_str();
    sub->add_option("--patience", spec.train.patience, "Epochs without improvement before stopping")
        ->capture_default_str();
    sub->add_option("--min-improvement", spec.train.min_improvement, "Improvement that resets patience")
        ->capture_default_str();
    sub->add_option("--init-scale", spec.train.init_scale, "Initial parameters uniform on [-s, s]")
        ->capture_default_str();
    sub->add_option("--reg-mode", spec.reg_mode, "eq6-exact or raw-y")->capture_default_str();
    sub->add_option("--split", spec.split, "train,validation,test ratios")->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "Build a tensor from a timestamped edge list");
  ingest->add_option("--data", spec.data, "Edge list: source,target,weight,timestamp")->required();
  add_out(ingest, true);
  add_seed(ingest);
  ingest->add_option("--delimiter", spec.delimiter, "Field delimiter (',' or 'tab')")->capture_default_str();
  ingest->add_option("--k-slots", spec.k_slots, "Number of time slots")->capture_default_str();
  ingest->add_option("--duplicate-policy", spec.duplicate_policy, "mean or last-wins")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic ground-truth tensor");
  add_out(synth, true);
  add_seed(synth);
  synth->add_option("--dims", spec.dims, "I,J,K")->capture_default_str();
  synth->add_option("--true-rank", spec.true_rank, "Ground-truth rank")->capture_default_str();
  synth->add_option("--entries", spec.entries, "Number of known entries")->capture_default_str();
  synth->add_option("--noise", spec.noise, "Gaussian noise standard deviation")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train a model on the training split");
  train->add_option("--data", spec.data, "Tensor file")->required();
  add_out(train, true);
  add_seed(train);
  add_train(train);
  train->add_flag("--plain-sgd", spec.plain_sgd, "Use the plain SGD update rule");

  auto* eval = app.add_subcommand("eval", "Evaluate a saved model on one split");
  eval->add_option("--data", spec.data, "Tensor file")->required();
  eval->add_option("--model", spec.model, "Model file")->required();
  add_out(eval, true);
  add_seed(eval);
  eval->add_option("--split", spec.split, "train,validation,test ratios")->capture_default_str();
  eval->add_option("--subset", spec.subset, "train, validation, test or all")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "Momentum vs plain SGD over several seeds");
  compare->add_option("--data", spec.data, "Tensor file")->required();
  add_out(compare, true);
  add_seed(compare);
  add_train(compare);
  compare->add_option("--seeds", spec.seeds, "Number of paired seeded runs")->capture_default_str();

  auto* grad = app.add_subcommand("grad-check", "Compare gradients against finite differences");
  add_out(grad, false);
  add_seed(grad);
  grad->add_option("--samples", spec.samples, "Random cases")->capture_default_str();
  grad->add_option("--lambda-max", spec.lambda_max, "Upper bound of sampled lambda")->capture_default_str();
  grad->add_flag("--zero-lambda", spec.zero_lambda, "Sample lambda = 0 only");
  grad->add_option("--variant", spec.variant, "exact, flipped-sign or raw-y")->capture_default_str();

  try {
    auto args = expand_config(argc, argv);
    std::vector<char*> raw;
    for (auto& a : args) raw.push_back(a.data());
    try {
      app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : NNLFT_ERR_CONFIG;
    }

    if (*ingest) return spec.command = "ingest", run_ingest(spec);
    if (*synth) return spec.command = "synth", run_synth(spec);
    if (*train) return spec.command = "train", run_train(spec);
    if (*eval) return spec.command = "eval", run_eval(spec);
    if (*compare) return spec.command = "compare", run_compare(spec);
    if (*grad) return spec.command = "grad-check", run_grad_check(spec);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  return NNLFT_ERR_CONFIG;
}
