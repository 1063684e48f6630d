// unwash: empirical-Bayes shrinkage with hidden-factor adjustment.
// Subcommands: fit (main solver), backwash, simulate, evaluate.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "unwash/backwash.hpp"
#include "unwash/csv.hpp"
#include "unwash/data_model.hpp"
#include "unwash/errors.hpp"
#include "unwash/evaluation.hpp"
#include "unwash/factor_analysis.hpp"
#include "unwash/mouthwash.hpp"
#include "unwash/parallel.hpp"
#include "unwash/posterior.hpp"
#include "unwash/rotation.hpp"
#include "unwash/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace unwash;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Vec parse_contrast(const std::string& spec) {
  std::vector<double> vals;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    vals.push_back(std::stod(tok));
  }
  Vec c(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) c(static_cast<Eigen::Index>(i)) = vals[i];
  return c;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    std::uint64_t seed, double wall_seconds, const json& convergence,
                    const std::vector<std::string>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["versions"] = {{"unwash", kVersion}};
  manifest["wall_time_seconds"] = wall_seconds;
  manifest["convergence"] = convergence;
  manifest["outputs"] = outputs;
  std::ofstream out(out_dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

void write_per_gene_csv(const fs::path& path, const std::vector<std::string>& genes,
                        const GeneSummaries& s) {
  std::ofstream out(path);
  out << "gene,betahat,sebetahat,adjusted_betahat,post_mean,post_sd,lfdr,lfsr,qvalue_analog\n";
  for (Eigen::Index j = 0; j < s.betahat.size(); ++j) {
    out << genes[static_cast<std::size_t>(j)] << ',' << format_double(s.betahat(j)) << ','
        << format_double(s.sebetahat(j)) << ',' << format_double(s.adjusted_betahat(j)) << ','
        << format_double(s.post_mean(j)) << ',' << format_double(s.post_sd(j)) << ','
        << format_double(s.lfdr(j)) << ',' << format_double(s.lfsr(j)) << ','
        << format_double(s.qvalue_analog(j)) << '\n';
  }
}

json mixture_to_json(const UnimodalMixture& mix) {
  json grid;
  switch (mix.kind) {
    case MixtureKind::kScaleNormal: grid["kind"] = "normal"; break;
    case MixtureKind::kSymmetricUniform: grid["kind"] = "uniform"; break;
    case MixtureKind::kHalfUniform: grid["kind"] = "halfuniform"; break;
  }
  json comps = json::array();
  for (const auto& c : mix.comps) {
    json jc;
    if (c.type == MixtureComponent::Type::kPointMass) {
      jc["type"] = "point_mass";
    } else if (c.type == MixtureComponent::Type::kNormal) {
      jc["type"] = "normal";
      jc["tau"] = c.tau;
    } else {
      jc["type"] = "uniform";
      jc["a"] = c.a;
      jc["b"] = c.b;
    }
    comps.push_back(jc);
  }
  grid["components"] = comps;
  return grid;
}

struct LoadedDataset {
  ExpressionDataset ds;
  std::vector<std::string> genes;
};

LoadedDataset load_dataset(const std::string& y_path, const std::string& x_path,
                           std::optional<int> interest, const std::string& contrast) {
  LoadedDataset out;
  const Mat Y = read_matrix_csv(y_path, &out.genes);
  std::vector<std::string> xnames;
  const Mat X = read_matrix_csv(x_path, &xnames);
  if (!contrast.empty()) {
    out.ds = validate_dataset(Y, X, parse_contrast(contrast));
  } else {
    out.ds = validate_dataset(Y, X, interest.value_or(static_cast<int>(X.cols())));
  }
  return out;
}

int run_fit(const std::string& y_path, const std::string& x_path, std::optional<int> interest,
            const std::string& contrast, int q, const MouthwashConfig& cfg, bool moderate,
            const std::string& out_dir_s, const json& config_echo) {
  Timer timer;
  const LoadedDataset loaded = load_dataset(y_path, x_path, interest, contrast);
  const RotatedModel rm = rotate(loaded.ds);
  FactorEstimate fa = truncated_pca(rm.Y3, q);
  if (moderate) fa.sigma2 = moderate_variances(fa.sigma2, fa.df);
  const MouthwashFit fit = fit_mouthwash(rm, fa, cfg);
  const GeneSummaries summ = posterior_summaries(fit, cfg.threads);

  const fs::path out_dir(out_dir_s);
  fs::create_directories(out_dir);
  write_per_gene_csv(out_dir / "per_gene.csv", loaded.genes, summ);

  json model;
  model["pi"] = std::vector<double>(fit.g_hat.pi.data(), fit.g_hat.pi.data() + fit.g_hat.pi.size());
  model["grid"] = mixture_to_json(fit.g_hat);
  model["z"] = std::vector<double>(fit.z_hat.data(), fit.z_hat.data() + fit.z_hat.size());
  model["xi"] = fit.xi_hat;
  model["pi0"] = pi0(fit);
  model["objective_trace"] = fit.objective_trace;
  model["converged"] = fit.converged;
  {
    std::ofstream out(out_dir / "model.json");
    out << model.dump(2) << "\n";
  }
  write_manifest(out_dir, "fit", config_echo, cfg.seed, timer.seconds(),
                 json{{"converged", fit.converged},
                      {"iterations", fit.objective_trace.size() - 1},
                      {"line_search_failed", fit.line_search_failed}},
                 {(out_dir / "per_gene.csv").string(), (out_dir / "model.json").string()});
  return fit.converged ? 0 : 2;
}

int run_backwash(const std::string& y_path, const std::string& x_path,
                 std::optional<int> interest, const std::string& contrast, int q,
                 const BackwashConfig& cfg, bool moderate, std::uint64_t seed,
                 const std::string& out_dir_s, const json& config_echo) {
  Timer timer;
  const LoadedDataset loaded = load_dataset(y_path, x_path, interest, contrast);
  const RotatedModel rm = rotate(loaded.ds);
  FactorEstimate fa = truncated_pca(rm.Y3, q);
  if (moderate) fa.sigma2 = moderate_variances(fa.sigma2, fa.df);
  const BackwashFit fit = fit_backwash(rm, fa, cfg);
  const GeneSummaries summ = posterior_summaries(fit);

  const fs::path out_dir(out_dir_s);
  fs::create_directories(out_dir);
  write_per_gene_csv(out_dir / "per_gene.csv", loaded.genes, summ);

  json model;
  model["pi"] =
      std::vector<double>(fit.state.pi.data(), fit.state.pi.data() + fit.state.pi.size());
  model["grid"] = mixture_to_json(fit.g_hat);
  model["mu_v"] =
      std::vector<double>(fit.state.mu_v.data(), fit.state.mu_v.data() + fit.state.mu_v.size());
  model["phi"] = fit.state.phi;
  model["xi"] = fit.state.xi;
  model["pi0"] = pi0(fit);
  model["elbo_trace"] = fit.elbo_trace;
  model["converged"] = fit.converged;
  {
    std::ofstream out(out_dir / "model.json");
    out << model.dump(2) << "\n";
  }
  write_manifest(out_dir, "backwash", config_echo, seed, timer.seconds(),
                 json{{"converged", fit.converged},
                      {"iterations", fit.elbo_trace.size()},
                      {"jittered", fit.jittered}},
                 {(out_dir / "per_gene.csv").string(), (out_dir / "model.json").string()});
  return fit.converged ? 0 : 2;
}

std::vector<std::string> gene_names(int p) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  for (int j = 1; j <= p; ++j) names.push_back("g" + std::to_string(j));
  return names;
}

int run_simulate(const SimulationConfig& cfg, const std::string& base_counts_path,
                 const std::string& out_dir_s, const json& config_echo) {
  Timer timer;
  SimulationConfig cfg_local = cfg;
  if (!base_counts_path.empty()) {
    cfg_local.base_counts = read_matrix_csv(base_counts_path);
  }
  const SimulatedStudy study = simulate(cfg_local);
  const fs::path out_dir(out_dir_s);
  fs::create_directories(out_dir);
  const auto genes = gene_names(cfg_local.p);

  write_matrix_csv((out_dir / "counts.csv").string(), study.W, genes);
  write_matrix_csv((out_dir / "y.csv").string(), study.Y, genes);
  write_matrix_csv((out_dir / "x.csv").string(), design_matrix(study), {"intercept", "group"});
  {
    std::ofstream out(out_dir / "truth.csv");
    out << "gene,is_null,effect,is_control\n";
    std::vector<bool> is_control(static_cast<std::size_t>(cfg_local.p), false);
    for (int c : study.controls) is_control[static_cast<std::size_t>(c)] = true;
    for (int j = 0; j < cfg_local.p; ++j) {
      out << genes[static_cast<std::size_t>(j)] << ',' << (study.is_null[j] ? 1 : 0) << ','
          << format_double(study.effects(j)) << ',' << (is_control[j] ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream out(out_dir / "groups.csv");
    out << "sample,group\n";
    for (int i = 0; i < cfg_local.n; ++i) {
      out << 's' << (i + 1) << ',' << study.group(i) << '\n';
    }
  }
  write_manifest(out_dir, "simulate", config_echo, cfg_local.seed, timer.seconds(),
                 json::object(),
                 {(out_dir / "counts.csv").string(), (out_dir / "y.csv").string(),
                  (out_dir / "x.csv").string(), (out_dir / "truth.csv").string(),
                  (out_dir / "groups.csv").string()});
  return 0;
}

SimulatedStudy load_study(const fs::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw CsvError((dir / "manifest.json").string() + ": cannot open study manifest");
  json manifest;
  mf >> manifest;
  const json& cfg_json = manifest.at("config");
  SimulatedStudy study;
  study.config.n = cfg_json.at("n").get<int>();
  study.config.p = cfg_json.at("p").get<int>();
  study.config.pi0 = cfg_json.at("pi0").get<double>();
  study.config.effect_sd = cfg_json.at("effect_sd").get<double>();
  study.config.m_controls = cfg_json.at("m_controls").get<int>();
  study.config.uv_rank = cfg_json.at("uv_rank").get<int>();
  study.config.uv_strength = cfg_json.at("uv_strength").get<double>();
  study.config.seed = cfg_json.at("seed").get<std::uint64_t>();

  study.W = read_matrix_csv((dir / "counts.csv").string());
  study.Y = read_matrix_csv((dir / "y.csv").string());
  const Mat X = read_matrix_csv((dir / "x.csv").string());
  study.group = IVec(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) study.group(i) = static_cast<int>(X(i, 1));
  const CsvTable truth = read_csv((dir / "truth.csv").string());
  const int null_col = truth.col("is_null");
  const int eff_col = truth.col("effect");
  const int ctl_col = truth.col("is_control");
  if (null_col < 0 || eff_col < 0) throw CsvError((dir / "truth.csv").string() + ": bad header");
  study.effects = Vec::Zero(static_cast<Eigen::Index>(truth.rows.size()));
  for (std::size_t j = 0; j < truth.rows.size(); ++j) {
    study.is_null.push_back(truth.rows[j][static_cast<std::size_t>(null_col)] == "1");
    study.effects(static_cast<Eigen::Index>(j)) =
        std::stod(truth.rows[j][static_cast<std::size_t>(eff_col)]);
    if (ctl_col >= 0 && truth.rows[j][static_cast<std::size_t>(ctl_col)] == "1") {
      study.controls.push_back(static_cast<int>(j));
    }
  }
  return study;
}

MethodScores score_builtin(const std::string& method, const SimulatedStudy& study, int q,
                           int threads) {
  const Mat X = design_matrix(study);
  const ExpressionDataset ds = validate_dataset(study.Y, X, 2);
  const RotatedModel rm = rotate(ds);
  MethodScores out;
  out.method = method;
  auto finish = [&](const GeneSummaries& s, double pi0_hat) {
    out.scores = 1.0 - s.lfdr.array();
    out.pi0_hat = pi0_hat;
  };
  if (method == "ols") {
    const FactorEstimate fa = truncated_pca(rm.Y3, 0);
    MouthwashConfig cfg;
    cfg.estimate_xi = false;
    cfg.threads = threads;
    const MouthwashFit fit = fit_mouthwash(rm, fa, cfg);
    finish(posterior_summaries(fit, threads), pi0(fit));
  } else if (method == "mouthwash") {
    const FactorEstimate fa = truncated_pca(rm.Y3, q);
    MouthwashConfig cfg;
    cfg.threads = threads;
    const MouthwashFit fit = fit_mouthwash(rm, fa, cfg);
    finish(posterior_summaries(fit, threads), pi0(fit));
  } else if (method == "backwash") {
    const FactorEstimate fa = truncated_pca(rm.Y3, q);
    BackwashConfig cfg;
    cfg.threads = threads;
    const BackwashFit fit = fit_backwash(rm, fa, cfg);
    finish(posterior_summaries(fit), pi0(fit));
  } else {
    throw ConfigError("unknown built-in method '" + method + "'");
  }
  return out;
}

std::vector<MethodScores> load_scores_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int method_col = table.col("method");
  const int gene_col = table.col("gene");
  const int score_col = table.col("score");
  const int pi0_col = table.col("pi0hat");
  if (method_col < 0 || gene_col < 0 || score_col < 0) {
    throw CsvError(path + ": required columns are method, gene, score");
  }
  std::vector<std::string> method_order;
  std::vector<std::vector<double>> per_method;
  std::vector<std::optional<double>> pi0s;
  for (const auto& row : table.rows) {
    const std::string& method = row[static_cast<std::size_t>(method_col)];
    std::size_t idx = 0;
    for (; idx < method_order.size(); ++idx)
      if (method_order[idx] == method) break;
    if (idx == method_order.size()) {
      method_order.push_back(method);
      per_method.emplace_back();
      pi0s.emplace_back();
    }
    per_method[idx].push_back(std::stod(row[static_cast<std::size_t>(score_col)]));
    if (pi0_col >= 0 && !row[static_cast<std::size_t>(pi0_col)].empty() &&
        row[static_cast<std::size_t>(pi0_col)] != "NA") {
      pi0s[idx] = std::stod(row[static_cast<std::size_t>(pi0_col)]);
    }
  }
  std::vector<MethodScores> out;
  for (std::size_t i = 0; i < method_order.size(); ++i) {
    MethodScores ms;
    ms.method = method_order[i];
    ms.scores = Vec::Zero(static_cast<Eigen::Index>(per_method[i].size()));
    for (std::size_t j = 0; j < per_method[i].size(); ++j) {
      ms.scores(static_cast<Eigen::Index>(j)) = per_method[i][j];
    }
    ms.pi0_hat = pi0s[i];
    out.push_back(std::move(ms));
  }
  return out;
}

int run_evaluate(const std::vector<std::string>& study_dirs, const std::vector<std::string>& runs,
                 const std::vector<std::string>& score_files, int q, int threads,
                 std::uint64_t seed, const std::string& out_dir_s, const json& config_echo) {
  Timer timer;
  if (study_dirs.empty()) throw ConfigError("evaluate: at least one --study is required");
  std::vector<SimulatedStudy> studies;
  for (const auto& dir : study_dirs) studies.push_back(load_study(dir));

  std::vector<std::vector<MethodScores>> per_study(studies.size());
  for (std::size_t i = 0; i < studies.size(); ++i) {
    for (const auto& method : runs) {
      per_study[i].push_back(score_builtin(method, studies[i], q, threads));
    }
    for (const auto& file : score_files) {
      for (auto& ms : load_scores_csv(file)) per_study[i].push_back(ms);
    }
  }
  const auto rows = compare(studies, per_study);
  const fs::path out_dir(out_dir_s);
  fs::create_directories(out_dir);
  write_compare_csv((out_dir / "summary.csv").string(), rows);
  write_manifest(out_dir, "evaluate", config_echo, seed, timer.seconds(), json::object(),
                 {(out_dir / "summary.csv").string()});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unwash: empirical-Bayes shrinkage with hidden-factor adjustment"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit the shrinkage model with confounder adjustment");
  std::string y_path, x_path, contrast, mixture = "normal", likelihood = "normal", out_dir;
  std::optional<int> interest;
  int q = 0, gamma = 0, threads = 0;
  double nu = 5.0, lambda0 = 10.0, lambda_xi = 0.0;
  std::optional<double> fix_xi;
  std::optional<int> subsample;
  std::uint64_t seed = 0;
  bool moderate = false;
  fit->add_option("--y", y_path, "response CSV, n x p, header = gene IDs")->required();
  fit->add_option("--x", x_path, "design CSV, n x k")->required();
  fit->add_option("--interest", interest, "1-based covariate of interest (default: last)");
  fit->add_option("--contrast", contrast, "comma-separated contrast over the k coefficients");
  fit->add_option("--q", q, "number of hidden confounders")->required();
  fit->add_option("--mixture", mixture, "normal | uniform | halfuniform");
  fit->add_option("--likelihood", likelihood, "normal | t");
  fit->add_option("--nu", nu, "t degrees of freedom");
  fit->add_option("--gamma", gamma, "effect scaling exponent, 0 or 1");
  fit->add_option("--fix-xi", fix_xi, "fix the variance inflation instead of estimating it");
  fit->add_option("--lambda0", lambda0, "point-mass penalty exponent (default 10)");
  fit->add_option("--lambda-xi", lambda_xi, "xi penalty strength");
  fit->add_flag("--moderate-variances", moderate, "empirical-Bayes variance moderation");
  fit->add_option("--subsample", subsample, "genes used for the confounder pass");
  fit->add_option("--seed", seed, "random seed");
  fit->add_option("--threads", threads, "worker threads (default: all cores)");
  fit->add_option("--out", out_dir, "output directory")->required();

  auto* bw = app.add_subcommand("backwash", "Fit the confounder-prior variant");
  std::string bw_y, bw_x, bw_contrast, bw_out;
  std::optional<int> bw_interest;
  int bw_q = 0, bw_threads = 0;
  double bw_lambda0 = 10.0;
  std::optional<double> bw_fix_xi, bw_fix_phi;
  std::uint64_t bw_seed = 0;
  bool bw_moderate = false;
  bw->add_option("--y", bw_y, "response CSV")->required();
  bw->add_option("--x", bw_x, "design CSV")->required();
  bw->add_option("--interest", bw_interest, "1-based covariate of interest (default: last)");
  bw->add_option("--contrast", bw_contrast, "comma-separated contrast");
  bw->add_option("--q", bw_q, "number of hidden confounders")->required();
  bw->add_option("--lambda0", bw_lambda0, "point-mass penalty exponent");
  bw->add_option("--fix-xi", bw_fix_xi, "fix the variance inflation");
  bw->add_option("--fix-phi", bw_fix_phi, "fix the prior scale");
  bw->add_flag("--moderate-variances", bw_moderate, "empirical-Bayes variance moderation");
  bw->add_option("--seed", bw_seed, "random seed");
  bw->add_option("--threads", bw_threads, "worker threads");
  bw->add_option("--out", bw_out, "output directory")->required();

  auto* sim = app.add_subcommand("simulate", "Generate a thinned-count study with ground truth");
  SimulationConfig sim_cfg;
  std::string sim_base, sim_out;
  sim->add_option("--n", sim_cfg.n, "sample count (even)")->required();
  sim->add_option("--p", sim_cfg.p, "gene count")->required();
  sim->add_option("--pi0", sim_cfg.pi0, "proportion of null genes");
  sim->add_option("--effect-sd", sim_cfg.effect_sd, "sd of planted log2 effects");
  sim->add_option("--m-controls", sim_cfg.m_controls, "designated control genes");
  sim->add_option("--uv-rank", sim_cfg.uv_rank, "planted unwanted-variation rank");
  sim->add_option("--uv-strength", sim_cfg.uv_strength, "planted factor strength");
  sim->add_option("--base-counts", sim_base, "base count CSV (genes as columns)");
  sim->add_option("--seed", sim_cfg.seed, "random seed");
  sim->add_option("--out", sim_out, "output directory")->required();

  auto* ev = app.add_subcommand("evaluate", "Score methods on simulated studies");
  std::vector<std::string> ev_studies, ev_runs, ev_scores;
  std::string ev_out;
  int ev_q = 0, ev_threads = 0;
  std::uint64_t ev_seed = 0;
  ev->add_option("--study", ev_studies, "study directory from simulate (repeatable)");
  ev->add_option("--run", ev_runs, "built-in method: mouthwash | backwash | ols (repeatable)");
  ev->add_option("--scores", ev_scores, "external scores CSV (method,gene,score[,pi0hat])");
  ev->add_option("--q", ev_q, "hidden confounders for built-in methods");
  ev->add_option("--seed", ev_seed, "random seed");
  ev->add_option("--threads", ev_threads, "worker threads");
  ev->add_option("--out", ev_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help() << std::endl;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::endl;
    return 1;
  }

  try {
    if (fit->parsed()) {
      MouthwashConfig cfg;
      if (mixture == "normal") cfg.kind = MixtureKind::kScaleNormal;
      else if (mixture == "uniform") cfg.kind = MixtureKind::kSymmetricUniform;
      else if (mixture == "halfuniform") cfg.kind = MixtureKind::kHalfUniform;
      else throw ConfigError("unknown --mixture '" + mixture + "'");
      if (likelihood == "t") cfg.likelihood = LikelihoodSpec{true, nu};
      else if (likelihood != "normal") throw ConfigError("unknown --likelihood");
      cfg.gamma = gamma;
      cfg.lambda0 = lambda0;
      cfg.lambda_xi = lambda_xi;
      if (fix_xi) {
        cfg.estimate_xi = false;
        cfg.fixed_xi = *fix_xi;
      }
      cfg.subsample = subsample;
      cfg.seed = seed;
      cfg.threads = resolve_threads(threads);
      json echo{{"y", y_path},
                {"x", x_path},
                {"q", q},
                {"mixture", mixture},
                {"likelihood", likelihood},
                {"nu", nu},
                {"gamma", gamma},
                {"lambda0", lambda0},
                {"lambda_xi", lambda_xi},
                {"fix_xi", fix_xi ? json(*fix_xi) : json()},
                {"moderate_variances", moderate},
                {"subsample", subsample ? json(*subsample) : json()},
                {"threads", cfg.threads},
                {"interest", interest ? json(*interest) : json()},
                {"contrast", contrast}};
      return run_fit(y_path, x_path, interest, contrast, q, cfg, moderate, out_dir, echo);
    }
    if (bw->parsed()) {
      BackwashConfig cfg;
      cfg.lambda0 = bw_lambda0;
      if (bw_fix_xi) {
        cfg.estimate_xi = false;
        cfg.fixed_xi = *bw_fix_xi;
      }
      if (bw_fix_phi) {
        cfg.estimate_phi = false;
        cfg.fixed_phi = *bw_fix_phi;
      }
      cfg.threads = resolve_threads(bw_threads);
      json echo{{"y", bw_y},
                {"x", bw_x},
                {"q", bw_q},
                {"lambda0", bw_lambda0},
                {"fix_xi", bw_fix_xi ? json(*bw_fix_xi) : json()},
                {"fix_phi", bw_fix_phi ? json(*bw_fix_phi) : json()},
                {"moderate_variances", bw_moderate},
                {"threads", cfg.threads},
                {"interest", bw_interest ? json(*bw_interest) : json()},
                {"contrast", bw_contrast}};
      return run_backwash(bw_y, bw_x, bw_interest, bw_contrast, bw_q, cfg, bw_moderate, bw_seed,
                          bw_out, echo);
    }
    if (sim->parsed()) {
      json echo{{"n", sim_cfg.n},
                {"p", sim_cfg.p},
                {"pi0", sim_cfg.pi0},
                {"effect_sd", sim_cfg.effect_sd},
                {"m_controls", sim_cfg.m_controls},
                {"uv_rank", sim_cfg.uv_rank},
                {"uv_strength", sim_cfg.uv_strength},
                {"seed", sim_cfg.seed},
                {"base_counts", sim_base}};
      return run_simulate(sim_cfg, sim_base, sim_out, echo);
    }
    if (ev->parsed()) {
      const int threads_resolved = resolve_threads(ev_threads);
      json echo{{"studies", ev_studies},
                {"runs", ev_runs},
                {"scores", ev_scores},
                {"q", ev_q},
                {"threads", threads_resolved}};
      return run_evaluate(ev_studies, ev_runs, ev_scores, ev_q, threads_resolved, ev_seed, ev_out,
                          echo);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
