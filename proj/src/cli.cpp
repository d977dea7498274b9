#include "baycount/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "baycount/io.hpp"
#include "baycount/model_selection.hpp"
#include "baycount/posterior.hpp"
#include "baycount/synthetic.hpp"

namespace baycount {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CommonOptions {
  std::string config_path;
  std::string output_dir = ".";
  int threads = 1;
};

struct InputOptions {
  std::string input_path;
  std::string format = "auto";

  io::CountFormat resolved() const {
    if (format != "auto") return io::parse_count_format(format);
    return fs::path(input_path).extension() == ".mtx" ? io::CountFormat::kMatrixMarket
                                                      : io::CountFormat::kTsv;
  }
};

void add_common(CLI::App& cmd, CommonOptions& common) {
  // Read and expanded by with_config_file before parsing; listed for --help.
  cmd.add_option("--config", common.config_path,
                 "Flat key=value file of long option names; flags take precedence");
  cmd.add_option("-o,--output-dir", common.output_dir, "Directory for output files")
      ->capture_default_str();
  cmd.add_option("--threads", common.threads, "Worker threads (0 = all cores)")
      ->envname("BAYCOUNT_THREADS")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_input(CLI::App& cmd, InputOptions& in) {
  cmd.add_option("-i,--input", in.input_path, "Count matrix")->required();
  cmd.add_option("--format", in.format, "tsv, matrix-market or auto (by .mtx extension)")
      ->check(CLI::IsMember({"auto", "tsv", "mtx", "matrix-market"}))
      ->capture_default_str();
}

void add_chain(CLI::App& cmd, ChainConfig& cfg, Hyperparameters& hp) {
  cmd.add_option("--burn-in", cfg.burn_in, "Burn-in sweeps")->capture_default_str();
  cmd.add_option("--iters", cfg.total_iterations, "Total sweeps, burn-in included")
      ->capture_default_str();
  cmd.add_option("--thin", cfg.thin, "Keep every thin-th post-burn-in sweep")
      ->capture_default_str();
  cmd.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  cmd.add_flag("--store-draws,!--no-store-draws", cfg.store_draws,
               "Keep every kept draw (needed by summarize)");
  cmd.add_option("--eta", hp.eta)->capture_default_str();
  cmd.add_option("--delta", hp.delta)->capture_default_str();
  cmd.add_option("--a0", hp.a0)->capture_default_str();
  cmd.add_option("--b0", hp.b0)->capture_default_str();
  cmd.add_option("--e0", hp.e0)->capture_default_str();
  cmd.add_option("--f0", hp.f0)->capture_default_str();
  cmd.add_option("--g0", hp.g0)->capture_default_str();
  cmd.add_option("--h0", hp.h0)->capture_default_str();
  cmd.add_option("--u0", hp.u0)->capture_default_str();
  cmd.add_option("--v0", hp.v0)->capture_default_str();
}

fs::path prepare_output_dir(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw std::runtime_error("cannot create output directory " + out.string());
  }
  return out;
}

json chain_config_json(const ChainConfig& cfg) {
  return json{{"burn_in", cfg.burn_in},
              {"total_iterations", cfg.total_iterations},
              {"thin", cfg.thin},
              {"seed", cfg.seed},
              {"store_draws", cfg.store_draws}};
}

json hyper_json(const Hyperparameters& hp) {
  return json{{"eta", hp.eta}, {"delta", hp.delta}, {"a0", hp.a0}, {"b0", hp.b0},
              {"e0", hp.e0},   {"f0", hp.f0},       {"g0", hp.g0}, {"h0", hp.h0},
              {"u0", hp.u0},   {"v0", hp.v0}};
}

std::string json_file(const json& j) { return j.dump(2) + "\n"; }

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

std::vector<std::string> factor_labels(int k) {
  std::vector<std::string> labels;
  for (int m = 1; m <= k; ++m) labels.push_back("factor_" + std::to_string(m));
  return labels;
}

struct SimulateOptions {
  CommonOptions common;
  int scenario = 1;
  Eigen::Index genes = 100;
  Eigen::Index samples = 20;
  int factors = 3;
  std::uint64_t seed = 1;
  std::string format = "tsv";
};

void run_simulate(const SimulateOptions& opt, std::ostream& out) {
  const fs::path dir = prepare_output_dir(opt.common.output_dir);
  const SyntheticTruth truth =
      opt.scenario == 1 ? generate_scenario1(opt.genes, opt.samples, opt.factors, opt.seed)
                        : generate_scenario2(opt.genes, opt.samples, opt.factors, opt.seed);
  const io::CountFormat format = io::parse_count_format(opt.format);
  const fs::path counts = dir / (format == io::CountFormat::kTsv ? "counts.tsv" : "counts.mtx");
  io::write_counts(counts, truth.y, format);

  const auto labels = factor_labels(opt.factors);
  io::write_file_atomic(dir / "truth_loadings.csv",
                        io::matrix_csv("truth_loadings", "gene_id", truth.y.gene_ids(), labels,
                                       truth.loadings));
  io::write_file_atomic(dir / "truth_theta.csv",
                        io::matrix_csv("truth_theta", "factor", labels, truth.y.sample_ids(),
                                       truth.theta));
  json meta{{"schema", "baycount.truth"},
            {"version", io::kSchemaVersion},
            {"scenario", opt.scenario},
            {"seed", opt.seed},
            {"genes", opt.genes},
            {"samples", opt.samples},
            {"factors", opt.factors},
            {"alpha", vector_json(truth.alpha)},
            {"lambda", truth.lambda},
            {"zeta", vector_json(truth.zeta)},
            {"p", vector_json(truth.p)}};
  io::write_file_atomic(dir / "truth.json", json_file(meta));
  out << "wrote " << counts.string() << " (" << opt.genes << " genes x " << opt.samples
      << " samples)\n";
}

struct FitOptions {
  CommonOptions common;
  InputOptions input;
  int factors = 0;
  ChainConfig chain;
  Hyperparameters hp;
};

void run_fit(FitOptions opt, std::ostream& out) {
  const auto start = Clock::now();
  const CountMatrix y = io::read_counts(opt.input.input_path, opt.input.resolved());
  const fs::path dir = prepare_output_dir(opt.common.output_dir);
  opt.chain.threads = resolve_threads(opt.common.threads);
  const ChainOutput chain = run_chain(y, opt.factors, opt.hp, opt.chain);
  io::write_chain(dir / "chain.jsonl", chain, y);
  io::write_file_atomic(dir / "loglik.csv", io::loglik_csv(chain));

  double sweep_total = 0.0;
  for (double s : chain.sweep_seconds) sweep_total += s;
  json run{{"schema", "baycount.fit"},
           {"version", io::kSchemaVersion},
           {"num_factors", opt.factors},
           {"input", opt.input.input_path},
           {"config", chain_config_json(opt.chain)},
           {"hyper", hyper_json(opt.hp)},
           {"kept_draws", chain.kept()},
           {"runtime",
            {{"threads", opt.chain.threads},
             {"sweep_seconds_total", sweep_total},
             {"wall_seconds", seconds_since(start)}}}};
  io::write_file_atomic(dir / "fit.json", json_file(run));
  out << "kept " << chain.kept() << " draws; wrote " << (dir / "chain.jsonl").string() << "\n";
}

struct SelectOptions {
  CommonOptions common;
  InputOptions input;
  int k_min = 2;
  int k_max = 10;
  bool save_chains = false;
  ChainConfig chain;
  Hyperparameters hp;
};

void run_select(SelectOptions opt, std::ostream& out) {
  const auto start = Clock::now();
  const CountMatrix y = io::read_counts(opt.input.input_path, opt.input.resolved());
  const fs::path dir = prepare_output_dir(opt.common.output_dir);
  const int workers = resolve_threads(opt.common.threads);
  opt.chain.threads = 1;
  ChainSink sink;
  if (opt.save_chains) {
    sink = [&](int k, ChainOutput&& chain) {
      io::write_chain(dir / ("chain_K" + std::to_string(k) + ".jsonl"), chain, y);
    };
  }
  const SelectionReport report =
      select_k(y, opt.k_min, opt.k_max, opt.hp, opt.chain, workers, sink);
  io::write_file_atomic(dir / "selection.csv", io::selection_csv(report));
  json run{{"schema", "baycount.select"},
           {"version", io::kSchemaVersion},
           {"input", opt.input.input_path},
           {"k_min", opt.k_min},
           {"k_max", opt.k_max},
           {"k_hat", report.k_hat},
           {"config", chain_config_json(opt.chain)},
           {"hyper", hyper_json(opt.hp)},
           {"runtime", {{"workers", workers}, {"wall_seconds", seconds_since(start)}}}};
  io::write_file_atomic(dir / "select.json", json_file(run));
  out << "K_hat = " << report.k_hat << "\n";
}

struct SummarizeOptions {
  CommonOptions common;
  std::string chain_path;
  double level = 0.95;
  double de_threshold = 0.01;
  std::optional<std::size_t> top_n;
  double log_floor = 1e-12;
};

void run_summarize(const SummarizeOptions& opt, std::ostream& out) {
  const auto start = Clock::now();
  const io::StoredChain stored = io::read_chain(opt.chain_path);
  const fs::path dir = prepare_output_dir(opt.common.output_dir);
  const PosteriorSummary raw = summarize(stored.chain, opt.level);
  const std::vector<int> order = factor_display_order(raw.theta_mean);
  const PosteriorSummary s = reorder_factors(raw, order);
  const int k = stored.chain.num_factors;
  const auto labels = factor_labels(k);
  const auto& genes = stored.gene_ids;
  const auto& samples = stored.sample_ids;

  io::write_file_atomic(dir / "phi_mean.csv",
                        io::matrix_csv("phi_mean", "gene_id", genes, labels, s.phi_mean));
  io::write_file_atomic(dir / "phi_mean_log10.csv",
                        io::matrix_csv("phi_mean_log10", "gene_id", genes, labels,
                                       log_scale_view(s.phi_mean, opt.log_floor)));
  io::write_file_atomic(dir / "theta_mean.csv",
                        io::matrix_csv("theta_mean", "factor", labels, samples, s.theta_mean));

  std::string ci = io::schema_line("theta_ci") + "\nfactor,sample_id,mean,lower,upper\n";
  for (int m = 0; m < k; ++m) {
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      ci += labels[static_cast<std::size_t>(m)] + "," + samples[j] + "," +
            io::format_real(s.theta_mean(m, col)) + "," + io::format_real(s.theta_lower(m, col)) +
            "," + io::format_real(s.theta_upper(m, col)) + "\n";
    }
  }
  io::write_file_atomic(dir / "theta_ci.csv", ci);

  const std::vector<int> clusters = dominant_subclone(s.theta_mean);
  std::string cl = io::schema_line("clusters") + "\nsample_id,cluster,dominant_proportion\n";
  for (std::size_t j = 0; j < samples.size(); ++j) {
    cl += samples[j] + "," + labels[static_cast<std::size_t>(clusters[j])] + "," +
          io::format_real(s.theta_mean(clusters[j], static_cast<Eigen::Index>(j))) + "\n";
  }
  io::write_file_atomic(dir / "clusters.csv", cl);

  const std::vector<RankedGene> de = opt.top_n ? top_de_genes(s.phi_mean, *opt.top_n)
                                               : rank_de_genes(s.phi_mean, opt.de_threshold);
  std::string dg = io::schema_line("de_genes") + "\nrank,gene_id,sd\n";
  for (std::size_t r = 0; r < de.size(); ++r) {
    dg += std::to_string(r + 1) + "," + genes[static_cast<std::size_t>(de[r].gene)] + "," +
          io::format_real(de[r].sd) + "\n";
  }
  io::write_file_atomic(dir / "de_genes.csv", dg);

  std::vector<int> source(order.size());
  std::transform(order.begin(), order.end(), source.begin(), [](int m) { return m + 1; });
  json de_rule = opt.top_n ? json{{"top_n", *opt.top_n}} : json{{"threshold", opt.de_threshold}};
  json summary{{"schema", "baycount.summary"},
               {"version", io::kSchemaVersion},
               {"seed", stored.chain.config.seed},
               {"num_factors", k},
               {"draw_count", s.draw_count},
               {"level", s.level},
               {"factor_source_index", source},
               {"lambda_mean", s.lambda_mean},
               {"zeta_mean", vector_json(s.zeta_mean)},
               {"p_mean", vector_json(s.p_mean)},
               {"config",
                {{"chain", chain_config_json(stored.chain.config)},
                 {"hyper", hyper_json(stored.chain.hyper)},
                 {"de_rule", de_rule},
                 {"log_floor", opt.log_floor}}},
               {"runtime", {{"wall_seconds", seconds_since(start)}}}};
  io::write_file_atomic(dir / "summary.json", json_file(summary));
  out << "summarized " << s.draw_count << " draws of K=" << k << " into " << dir.string()
      << "\n";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Replaces `--config FILE` with the file's settings as `--key=value` flags
// placed ahead of the explicit ones, which then win under take-last.
std::vector<std::string> with_config_file(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (std::size_t a = 0; a < args.size(); ++a) {
    if (args[a] == "--config" && a + 1 < args.size()) {
      config = args[++a];
    } else if (args[a].starts_with("--config=")) {
      config = args[a].substr(9);
    } else {
      rest.push_back(args[a]);
    }
  }
  if (!config || rest.empty()) return rest;
  const std::string text = io::read_text(*config);
  std::vector<std::string> settings;
  std::size_t line_no = 0;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    const std::string_view body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string_view::npos || trim(body.substr(0, eq)).empty()) {
      throw std::runtime_error(*config + ":" + std::to_string(line_no) +
                               ": expected key=value");
    }
    settings.push_back("--" + std::string(trim(body.substr(0, eq))) + "=" +
                       std::string(trim(body.substr(eq + 1))));
  }
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), settings.begin(), settings.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Negative-binomial factor analysis of count matrices", "baycount"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic data set with truth");
  add_common(*simulate, sim.common);
  simulate->add_option("--scenario", sim.scenario, "1 (model-based) or 2 (unconstrained W)")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  simulate->add_option("--G", sim.genes, "Genes")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--S", sim.samples, "Samples")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--K0", sim.factors, "True number of factors")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--format", sim.format, "tsv or matrix-market")
      ->check(CLI::IsMember({"tsv", "mtx", "matrix-market"}))
      ->capture_default_str();

  FitOptions fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Run one chain at a fixed K");
  add_common(*fit_cmd, fit.common);
  add_input(*fit_cmd, fit.input);
  fit_cmd->add_option("-k,--k", fit.factors, "Number of factors")
      ->required()
      ->check(CLI::PositiveNumber);
  add_chain(*fit_cmd, fit.chain, fit.hp);

  SelectOptions sel;
  CLI::App* select = app.add_subcommand("select-k", "Choose K by the second-difference rule");
  add_common(*select, sel.common);
  add_input(*select, sel.input);
  select->add_option("--k-min", sel.k_min)->capture_default_str();
  select->add_option("--k-max", sel.k_max)->capture_default_str();
  select->add_flag("--save-chains", sel.save_chains, "Write chain_K<k>.jsonl for every K");
  add_chain(*select, sel.chain, sel.hp);

  SummarizeOptions summ;
  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "Posterior tables from a stored chain");
  add_common(*summarize_cmd, summ.common);
  summarize_cmd->add_option("-c,--chain", summ.chain_path, "chain.jsonl from fit")->required();
  summarize_cmd->add_option("--level", summ.level, "Credible level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  auto* threshold = summarize_cmd
                        ->add_option("--de-threshold", summ.de_threshold,
                                     "Keep genes whose across-factor sd is at least this")
                        ->capture_default_str();
  summarize_cmd->add_option("--top-n", summ.top_n, "Keep the n genes with the largest sd")
      ->excludes(threshold);
  summarize_cmd->add_option("--log-floor", summ.log_floor, "Floor for the log10 view")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> expanded;
  try {
    expanded = with_config_file(args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<std::string> argv_storage{"baycount"};
  argv_storage.insert(argv_storage.end(), expanded.begin(), expanded.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*simulate) run_simulate(sim, out);
    if (*fit_cmd) run_fit(fit, out);
    if (*select) run_select(sel, out);
    if (*summarize_cmd) run_summarize(summ, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace baycount
