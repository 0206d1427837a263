// Command-line driver: synthetic data generation, forest fitting with the
// plain, scale-free and joint estimators, and edge-recovery scoring.
//
// Exit codes: 0 success, 1 usage error, 2 data/config error, 3 solver
// non-convergence (outputs are still written).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fde/datagen.hpp"
#include "fde/eval.hpp"
#include "fde/io.hpp"
#include "fde/mi.hpp"
#include "fde/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Post-parse flag-combination problems; mapped to exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

unsigned resolve_threads(int flag_value) {
  if (flag_value > 0) return static_cast<unsigned>(flag_value);
  if (const char* env = std::getenv("FDE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return fde::default_thread_count();
}

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

void write_manifest(const std::string& dir, const std::vector<std::string>& argv,
                    const std::string& command, const json& config,
                    const std::vector<std::string>& input_files) {
  json inputs = json::object();
  for (const auto& f : input_files) inputs[f] = fde::file_digest(f);
  json manifest{{"tool", "fde"},
                {"version", kVersion},
                {"command", command},
                {"argv", argv},
                {"config", config},
                {"inputs", inputs}};
  fde::write_json(manifest, out_path(dir, "manifest.json"));
}

struct KernelFlags {
  std::string kernel = "gaussian";
  double h1 = 0.0;  // 0 = plug-in rule
  double h2 = 0.0;
  int grid_points = 100;
  double floor = 1e-10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel", kernel, "Kernel: gaussian or epanechnikov")
        ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
    cmd->add_option("--h1", h1, "Fixed univariate bandwidth (default: plug-in rule)");
    cmd->add_option("--h2", h2, "Fixed bivariate bandwidth per axis (default: plug-in rule)");
    cmd->add_option("--grid-points", grid_points, "Quadrature grid points per axis");
    cmd->add_option("--floor", floor, "Density clamp applied before logarithms");
  }

  fde::KernelConfig to_config() const {
    fde::KernelConfig cfg;
    cfg.kernel = kernel == "epanechnikov" ? fde::Kernel::epanechnikov : fde::Kernel::gaussian;
    if (h1 > 0.0) cfg.h1 = fde::Bandwidth::fixed(h1);
    if (h2 > 0.0) cfg.h2 = fde::Bandwidth::fixed(h2);
    cfg.grid_points = grid_points;
    cfg.floor = floor;
    cfg.validate();
    return cfg;
  }

  json echo() const {
    return json{{"kernel", kernel},
                {"h1", h1 > 0.0 ? json(h1) : json("rule")},
                {"h2", h2 > 0.0 ? json(h2) : json("rule")},
                {"grid_points", grid_points},
                {"floor", floor}};
  }
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string graph;
  int d = 100;
  int num_stars = 0;
  int star_size = 0;
  double alpha_pa = 1.5;
  int seed_chain = 4;
  std::string copula = "gaussian";
  double rho = 0.4;
  double nu = 1.0;
  int n = 200;
  int n_holdout = 100;
  int units = 1;
  int shared_size = -1;
  int shared_stars = -1;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = ".";
};

int run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  fde::GraphGenSpec base;
  base.rng_seed = a.seed;
  if (a.graph == "stars") {
    base.kind = fde::GraphGenSpec::Kind::stars;
    if (a.num_stars <= 0 || a.star_size <= 0)
      throw UsageError("--graph stars requires --stars and --star-size");
    base.num_stars = a.num_stars;
    base.star_size = a.star_size;
    base.d = a.num_stars * a.star_size;
  } else {
    base.kind = fde::GraphGenSpec::Kind::scale_free;
    base.d = a.d;
    base.alpha_pa = a.alpha_pa;
    base.seed_chain_len = a.seed_chain;
  }

  std::vector<fde::Forest> truths;
  if (a.units > 1) {
    fde::MultiGraphSpec multi;
    multi.units = a.units;
    multi.base = base;
    multi.rng_seed = a.seed;
    if (base.kind == fde::GraphGenSpec::Kind::scale_free) {
      if (a.shared_size < 0)
        throw UsageError("--K > 1 with --graph scale-free requires --shared-size");
      multi.shared_size = a.shared_size;
    } else {
      if (a.shared_stars < 0)
        throw UsageError("--K > 1 with --graph stars requires --shared-stars");
      multi.shared_stars = a.shared_stars;
    }
    truths = fde::gen_multi(multi);
  } else {
    truths.push_back(base.kind == fde::GraphGenSpec::Kind::stars ? fde::gen_stars(base)
                                                                 : fde::gen_scale_free(base));
  }

  fde::CopulaSpec cs;
  cs.family = a.copula == "t" ? fde::CopulaSpec::Family::student_t
                              : fde::CopulaSpec::Family::gaussian;
  cs.rho = a.rho;
  cs.nu = a.nu;
  cs.n = a.n + a.n_holdout;
  unsigned threads = resolve_threads(a.threads);

  for (int k = 0; k < static_cast<int>(truths.size()); ++k) {
    cs.rng_seed = fde::mix64(a.seed) ^ fde::mix64(0xDA7Au + static_cast<std::uint64_t>(k));
    fde::Dataset all = fde::sample_tree_copula(truths[k], cs, threads);
    fde::Dataset train{all.values.topRows(a.n), all.column_names};
    fde::Dataset holdout{all.values.bottomRows(a.n_holdout), all.column_names};
    std::string tag = std::to_string(k + 1);
    fde::write_csv(train, out_path(a.out, "train_" + tag + ".csv"));
    fde::write_csv(holdout, out_path(a.out, "holdout_" + tag + ".csv"));
    fde::write_edges_tsv(truths[k], out_path(a.out, "truth_" + tag + ".tsv"));
  }

  json config{{"graph", a.graph},          {"d", base.d},
              {"stars", a.num_stars},      {"star_size", a.star_size},
              {"alpha_pa", a.alpha_pa},    {"seed_chain", a.seed_chain},
              {"copula", a.copula},        {"rho", a.rho},
              {"nu", a.nu},                {"n", a.n},
              {"n_holdout", a.n_holdout},  {"K", a.units},
              {"shared_size", a.shared_size}, {"shared_stars", a.shared_stars},
              {"seed", a.seed}};
  write_manifest(a.out, argv, "simulate", config, {});
  std::cout << "simulate: wrote " << truths.size() << " unit(s) under " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string method;
  std::vector<std::string> train_files;
  std::vector<std::string> holdout_files;
  std::vector<std::string> truth_files;
  bool discrete = false;
  KernelFlags kernel;
  double lambda = -1.0;
  std::string lambda_grid;
  std::string tune_mode = "held-out";
  double alpha = 1.0;
  double beta = 1.0;
  int max_iters = 50;
  std::string convergence = "edge-set";
  double tau_obj = 1e-8;
  bool write_weights = false;
  bool with_entropy = false;
  int threads = 0;
  std::string out = ".";
};

std::vector<double> parse_lambda_grid(const std::string& text, const fde::WeightMatrix& w) {
  if (text == "auto") return fde::default_lambda_grid(w);
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw fde::ConfigError("--lambda-grid produced no values");
  return grid;
}

int run_fit(const FitArgs& a, const std::vector<std::string>& argv) {
  const std::size_t K = a.train_files.size();
  if (K == 0) throw UsageError("no training files given");
  if (a.holdout_files.size() != K)
    throw UsageError("need one --holdout file per training file");
  if (a.method == "joint" && K < 2)
    throw UsageError("--method joint requires at least two training files");
  if (a.method != "joint" && K != 1)
    throw UsageError("--method " + a.method + " takes exactly one training file");
  const bool tuning = !a.lambda_grid.empty();
  if (tuning && a.lambda >= 0.0)
    throw UsageError("--lambda and --lambda-grid are mutually exclusive");
  if (a.tune_mode == "oracle" && tuning && a.truth_files.size() != K)
    throw UsageError("oracle tuning needs one --truth file per unit");

  fde::KernelConfig kc = a.kernel.to_config();
  fde::WeightMode mode = a.discrete ? fde::WeightMode::discrete : fde::WeightMode::kde;
  unsigned threads = resolve_threads(a.threads);

  fde::PriorConfig pc;
  pc.lambda = a.lambda >= 0.0 ? a.lambda : 0.0;
  pc.alpha = a.alpha;
  pc.beta = a.beta;
  pc.max_iters = a.max_iters;
  pc.convergence = a.convergence == "objective-delta" ? fde::Convergence::objective_delta
                                                      : fde::Convergence::edge_set_stable;
  pc.tau_obj = a.tau_obj;
  pc.validate();

  std::vector<fde::Dataset> trains;
  std::vector<fde::WeightMatrix> weights, holdouts;
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k < K; ++k) {
    fde::Dataset train = fde::load_csv(a.train_files[k]);
    fde::Dataset holdout = fde::load_csv(a.holdout_files[k]);
    weights.push_back(fde::weight_matrix(train, kc, mode, threads, &warnings));
    holdouts.push_back(fde::holdout_matrix(train, holdout, kc, mode, threads));
    trains.push_back(std::move(train));
  }
  for (const auto& wmsg : warnings) std::cerr << "warning: " << wmsg << "\n";

  std::vector<fde::Forest> truths;
  if (!a.truth_files.empty())
    for (std::size_t k = 0; k < K; ++k)
      truths.push_back(fde::load_edges_tsv(a.truth_files[k], static_cast<int>(weights[k].d())));

  json config{{"method", a.method},
              {"discrete", a.discrete},
              {"kernel", a.kernel.echo()},
              {"alpha", a.alpha},
              {"beta", a.beta},
              {"max_iters", a.max_iters},
              {"convergence", a.convergence},
              {"tau_obj", a.tau_obj},
              {"tune", tuning ? a.tune_mode : "none"}};

  // Fit, tuning over the lambda grid when one is given.
  std::vector<fde::FitResult> fits;
  double chosen_lambda = pc.lambda;
  std::vector<std::pair<double, double>> grid_scores;

  auto held_out_score = [&](const std::vector<fde::FitResult>& rs) {
    double s = 0.0;
    for (std::size_t k = 0; k < rs.size(); ++k)
      s += fde::holdout_loglik(rs[k].pruned, holdouts[k]);
    return s;
  };
  auto oracle_score = [&](const std::vector<fde::FitResult>& rs) {
    double s = 0.0;
    for (std::size_t k = 0; k < rs.size(); ++k)
      s += fde::f1_score(rs[k].pruned, truths[k]).f1;
    return s / static_cast<double>(rs.size());
  };
  auto fit_at = [&](double lambda) {
    fde::PriorConfig p = pc;
    p.lambda = lambda;
    std::vector<fde::FitResult> rs;
    if (a.method == "fde") {
      rs.push_back(fde::fit_fde(weights[0], holdouts[0]));
    } else if (a.method == "sf") {
      rs.push_back(fde::fit_scalefree(weights[0], p, holdouts[0]));
    } else {
      rs = fde::fit_joint(weights, p, holdouts);
    }
    return rs;
  };

  if (tuning && a.method != "fde") {
    std::vector<double> grid = parse_lambda_grid(a.lambda_grid, weights[0]);
    auto scorer = a.tune_mode == "oracle"
                      ? std::function<double(const std::vector<fde::FitResult>&)>(oracle_score)
                      : std::function<double(const std::vector<fde::FitResult>&)>(held_out_score);
    auto tuned = fde::tune(grid, fit_at, scorer);
    fits = std::move(*tuned.fit);
    chosen_lambda = tuned.lambda;
    grid_scores = std::move(tuned.grid_scores);
  } else {
    fits = fit_at(pc.lambda);
    chosen_lambda = pc.lambda;
  }

  config["lambda"] = chosen_lambda;
  if (!grid_scores.empty()) {
    json gs = json::array();
    for (auto& [l, s] : grid_scores) gs.push_back({l, s});
    config["lambda_grid_scores"] = gs;
  }

  bool all_converged = true;
  for (std::size_t k = 0; k < K; ++k) {
    const fde::FitResult& fit = fits[k];
    all_converged = all_converged && fit.converged;
    std::string tag = std::to_string(k + 1);
    json doc = fde::fit_to_json(fit, weights[k].labels, config);
    doc["holdout_loglik_pruned"] = fde::holdout_loglik(fit.pruned, holdouts[k]);
    doc["holdout_loglik_tree"] = fde::holdout_loglik(fit.tree, holdouts[k]);
    if (a.with_entropy && !a.discrete) {
      // absolute-scale score: edge terms minus the summed marginal entropies
      double entropy_sum = 0.0;
      for (Eigen::Index c = 0; c < trains[k].d(); ++c)
        entropy_sum += fde::estimate_entropy(trains[k].column(c), kc);
      doc["holdout_loglik_full"] =
          fde::holdout_loglik(fit.pruned, holdouts[k]) - entropy_sum;
    }
    if (!truths.empty()) {
      fde::ScoreReport sr = fde::f1_score(fit.pruned, truths[k]);
      doc["score"] = json{{"tp", sr.true_positive}, {"fp", sr.false_positive},
                          {"fn", sr.false_negative}, {"precision", sr.precision},
                          {"recall", sr.recall},     {"f1", sr.f1}};
    }
    fde::write_json(doc, out_path(a.out, "result_" + tag + ".json"));
    fde::write_edges_tsv(fit.tree, out_path(a.out, "tree_" + tag + ".tsv"), &weights[k]);
    fde::write_edges_tsv(fit.pruned, out_path(a.out, "pruned_" + tag + ".tsv"), &weights[k]);
    fde::write_dot(fit.pruned, out_path(a.out, "graph_" + tag + ".dot"));
    if (a.write_weights)
      fde::write_weights_tsv(weights[k], out_path(a.out, "weights_" + tag + ".tsv"));
  }

  if (a.method == "joint") {
    std::vector<fde::Forest> pruned;
    for (const auto& f : fits) pruned.push_back(f.pruned);
    std::set<fde::Edge> shared = fde::common_edges(pruned);
    std::vector<fde::Edge> shared_vec(shared.begin(), shared.end());
    fde::write_edges_tsv(fde::Forest(pruned.front().d(), shared_vec),
                         out_path(a.out, "common_edges.tsv"));
  }

  std::vector<std::string> inputs = a.train_files;
  inputs.insert(inputs.end(), a.holdout_files.begin(), a.holdout_files.end());
  inputs.insert(inputs.end(), a.truth_files.begin(), a.truth_files.end());
  write_manifest(a.out, argv, "fit", config, inputs);

  std::cout << "fit: method=" << a.method << " lambda=" << chosen_lambda
            << " units=" << K << (all_converged ? "" : " (non-converged)") << "\n";
  return all_converged ? 0 : 3;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::vector<std::string> estimated;
  std::vector<std::string> truth;
  int d = 0;
  std::string out = ".";
};

int run_evaluate(const EvaluateArgs& a, const std::vector<std::string>& argv) {
  if (a.estimated.empty() || a.estimated.size() != a.truth.size())
    throw UsageError("need matching --estimated and --truth file lists");

  std::ofstream csv(out_path(a.out, "scores.csv"));
  csv << "unit,tp,fp,fn,precision,recall,f1\n";
  csv.precision(17);
  double mean_f1 = 0.0;
  for (std::size_t k = 0; k < a.estimated.size(); ++k) {
    fde::Forest est = fde::load_edges_tsv(a.estimated[k], a.d);
    fde::Forest tru = fde::load_edges_tsv(a.truth[k], a.d);
    if (est.d() != tru.d()) {
      // align on the larger vertex set so the comparison stays well-defined
      int d = std::max(est.d(), tru.d());
      est = fde::load_edges_tsv(a.estimated[k], d);
      tru = fde::load_edges_tsv(a.truth[k], d);
    }
    fde::ScoreReport r = fde::f1_score(est, tru);
    mean_f1 += r.f1;
    csv << k + 1 << ',' << r.true_positive << ',' << r.false_positive << ','
        << r.false_negative << ',' << r.precision << ',' << r.recall << ',' << r.f1 << '\n';
  }
  mean_f1 /= static_cast<double>(a.estimated.size());
  csv << "mean,,,,,," << mean_f1 << '\n';

  std::vector<std::string> inputs = a.estimated;
  inputs.insert(inputs.end(), a.truth.begin(), a.truth.end());
  write_manifest(a.out, argv, "evaluate", json{{"d", a.d}}, inputs);
  std::cout << "evaluate: mean F1 = " << mean_f1 << " over " << a.estimated.size()
            << " unit(s)\n";
  return 0;
}

int dispatch(std::vector<std::string> args);

// Re-executes the argv recorded in a manifest.
int run_rerun(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw fde::DataError("cannot open " + manifest_path);
  json manifest = json::parse(in);
  std::vector<std::string> argv = manifest.at("argv").get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "rerun")
    throw fde::DataError("manifest records a rerun; refusing to recurse");
  return dispatch(std::move(argv));
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"Nonparametric forest density estimation with structural priors"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* csim = app.add_subcommand("simulate", "Generate truth graphs and copula samples");
  csim->add_option("--graph", sim.graph, "Graph family: stars or scale-free")
      ->required()
      ->check(CLI::IsMember({"stars", "scale-free"}));
  csim->add_option("--d", sim.d, "Vertex count (scale-free)");
  csim->add_option("--stars", sim.num_stars, "Number of stars");
  csim->add_option("--star-size", sim.star_size, "Vertices per star");
  csim->add_option("--alpha-pa", sim.alpha_pa, "Preferential-attachment exponent");
  csim->add_option("--seed-chain", sim.seed_chain, "Seed chain length");
  csim->add_option("--copula", sim.copula, "Copula family: gaussian or t")
      ->check(CLI::IsMember({"gaussian", "t"}));
  csim->add_option("--rho", sim.rho, "Copula correlation");
  csim->add_option("--nu", sim.nu, "t copula degrees of freedom");
  csim->add_option("--n", sim.n, "Training sample count");
  csim->add_option("--n-holdout", sim.n_holdout, "Held-out sample count");
  csim->add_option("--K", sim.units, "Number of units");
  csim->add_option("--shared-size", sim.shared_size, "Shared subtree size (scale-free, K>1)");
  csim->add_option("--shared-stars", sim.shared_stars, "Shared star count (stars, K>1)");
  csim->add_option("--seed", sim.seed, "RNG seed");
  csim->add_option("--threads", sim.threads, "Worker threads (default: FDE_THREADS or cores)");
  csim->add_option("--out", sim.out, "Output directory");

  FitArgs fit;
  auto* cfit = app.add_subcommand("fit", "Estimate forests from data");
  cfit->add_option("--method", fit.method, "Estimator: fde, sf, or joint")
      ->required()
      ->check(CLI::IsMember({"fde", "sf", "joint"}));
  cfit->add_option("train", fit.train_files, "Training CSV files")->required();
  cfit->add_option("--holdout", fit.holdout_files, "Held-out CSV files (one per unit)")
      ->required();
  cfit->add_option("--truth", fit.truth_files, "Truth edge-list TSVs (oracle tuning)");
  cfit->add_flag("--discrete", fit.discrete, "Use empirical distributions of integer codes");
  fit.kernel.attach(cfit);
  cfit->add_option("--lambda", fit.lambda, "Fixed penalty scale");
  cfit->add_option("--lambda-grid", fit.lambda_grid,
                   "Penalty grid: 'auto' or comma-separated values");
  cfit->add_option("--tune", fit.tune_mode, "Grid selection criterion")
      ->check(CLI::IsMember({"held-out", "oracle"}));
  cfit->add_option("--alpha", fit.alpha, "Beta prior shape alpha");
  cfit->add_option("--beta", fit.beta, "Beta prior shape beta");
  cfit->add_option("--max-iters", fit.max_iters, "Iteration cap for the MM solvers");
  cfit->add_option("--convergence", fit.convergence, "edge-set or objective-delta")
      ->check(CLI::IsMember({"edge-set", "objective-delta"}));
  cfit->add_option("--tau-obj", fit.tau_obj, "Objective tolerance (objective-delta mode)");
  cfit->add_flag("--write-weights", fit.write_weights, "Also export the MI weight matrices");
  cfit->add_flag("--with-entropy", fit.with_entropy,
                 "Add univariate entropy terms to the reported held-out log-likelihood");
  cfit->add_option("--threads", fit.threads, "Worker threads (default: FDE_THREADS or cores)");
  cfit->add_option("--out", fit.out, "Output directory");

  EvaluateArgs ev;
  auto* cev = app.add_subcommand("evaluate", "Score estimated graphs against truth");
  cev->add_option("--estimated", ev.estimated, "Estimated edge-list TSVs")->required();
  cev->add_option("--truth", ev.truth, "Truth edge-list TSVs")->required();
  cev->add_option("--d", ev.d, "Vertex count (default: largest index seen)");
  cev->add_option("--out", ev.out, "Output directory");

  std::string manifest_path;
  auto* crerun = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
  crerun->add_option("manifest", manifest_path, "manifest.json from a previous run")->required();

  std::vector<const char*> cargv;
  cargv.push_back("fde");
  for (const auto& s : args) cargv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (csim->parsed()) return run_simulate(sim, args);
    if (cfit->parsed()) return run_fit(fit, args);
    if (cev->parsed()) return run_evaluate(ev, args);
    return run_rerun(manifest_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const fde::ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args));
}
