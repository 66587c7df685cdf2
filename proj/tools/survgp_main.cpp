/*
 * Copyright (c) 2026 the survgp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line pipeline: simulate -> train -> predict -> decide -> evaluate /
// sweep over CSV files. Exit codes: 0 success, 2 validation error, 3
// numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "survgp/evalharness.hpp"
#include "survgp/io.hpp"
#include "survgp/parallel.hpp"
#include "survgp/simdata.hpp"

namespace fs = std::filesystem;
using namespace survgp;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
  std::string config_path;
  io::RunConfig cfg;

  void load() {
    if (!config_path.empty()) cfg = io::load_config(config_path);
  }
};

void write_truth_sidecars(const std::string& dir, const simdata::SimulatedPopulation& pop, int latent_stride) {
  std::vector<io::TruthRow> rows;
  for (const auto& ind : pop.individuals) {
    io::TruthRow r;
    r.individual_id = ind.record.id;
    if (std::isfinite(ind.truth.t_event_true)) r.t_event_true = ind.truth.t_event_true;
    r.fbar_star = ind.truth.fbar_star;
    r.duration = ind.truth.duration;
    rows.push_back(r);
  }
  io::write_truth_events((fs::path(dir) / "truth_events.csv").string(), rows);

  {
    std::ofstream out(fs::path(dir) / "truth_params.txt");
    const auto& h = pop.spec.truth.hazard;
    out << "a=" << io::fmt_double(h.a) << "\nb=" << io::fmt_double(h.b) << "\nc=" << io::fmt_double(h.c) << "\n";
    for (Eigen::Index i = 0; i < h.alpha.size(); ++i)
      out << "alpha" << (i + 1) << "=" << io::fmt_double(h.alpha[i]) << "\n";
    for (Eigen::Index i = 0; i < h.gamma.size(); ++i)
      out << "gamma" << (i + 1) << "=" << io::fmt_double(h.gamma[i]) << "\n";
    for (std::size_t j = 0; j < pop.spec.truth.links.size(); ++j)
      out << "link" << (j + 1) << "=" << io::fmt_double(pop.spec.truth.links[j].beta) << ","
          << io::fmt_double(pop.spec.truth.links[j].beta0) << "\n";
  }

  {
    std::ofstream out(fs::path(dir) / "truth_latents.csv");
    out << "individual_id,time_min,latent_index,value\n";
    for (const auto& ind : pop.individuals) {
      for (Eigen::Index t = 0; t < ind.truth.fine_times.size(); t += latent_stride) {
        for (Eigen::Index j = 0; j < ind.truth.latents_fine.rows(); ++j) {
          out << ind.record.id << ',' << io::fmt_double(ind.truth.fine_times[t]) << ',' << (j + 1) << ','
              << io::fmt_double(ind.truth.latents_fine(j, t)) << '\n';
        }
      }
    }
  }
}

std::map<long long, const IndividualRecord*> index_records(const std::vector<IndividualRecord>& records) {
  std::map<long long, const IndividualRecord*> out;
  for (const auto& r : records) out[r.id] = &r;
  return out;
}

std::map<long long, double> load_truth_times(const std::string& path) {
  std::map<long long, double> out;
  for (const auto& row : io::load_truth_events(path))
    out[row.individual_id] = row.t_event_true ? *row.t_event_true : std::numeric_limits<double>::infinity();
  return out;
}

// label for a (id, t) pair from truth when available, else from the record
std::optional<bool> label_for(const std::map<long long, const IndividualRecord*>& records,
                              const std::map<long long, double>& truth, long long id, double t, double horizon) {
  if (!truth.empty()) {
    const auto it = truth.find(id);
    if (it == truth.end()) throw validation_error("truth file missing individual " + std::to_string(id));
    return evalharness::label_from_truth(it->second, t, horizon);
  }
  const auto it = records.find(id);
  if (it == records.end()) throw validation_error("events missing individual " + std::to_string(id));
  return evalharness::label_from_record(it->second->event, t, horizon);
}

std::vector<evalharness::PredictionInstance> instances_from_dists(
    const std::vector<io::DistRow>& dists, const std::vector<IndividualRecord>& records,
    const std::string& truth_path, double horizon) {
  const auto rec_index = index_records(records);
  std::map<long long, double> truth;
  if (!truth_path.empty()) truth = load_truth_times(truth_path);
  std::vector<evalharness::PredictionInstance> insts;
  insts.reserve(dists.size());
  for (const auto& d : dists) {
    evalharness::PredictionInstance inst;
    inst.individual = d.individual_id;
    inst.t = d.time_min;
    inst.dist = d.dist;
    inst.label = label_for(rec_index, truth, d.individual_id, d.time_min, horizon);
    insts.push_back(inst);
  }
  return insts;
}

int run_simulate(const CommonArgs& common, const std::string& out_dir, int n, int d, int r, double right_frac,
                 double interval_frac, double obs_rate, int covariates, double sparsify_frac,
                 double sparsify_keep) {
  auto spec = simdata::reference_spec(n, d, r, common.cfg.train.seed);
  spec.censor_right_frac = right_frac;
  spec.censor_interval_frac = interval_frac;
  spec.obs_rate_per_hour = Vec::Constant(d, obs_rate);
  spec.n_covariates = covariates;
  spec.sparsify_frac = sparsify_frac;
  spec.sparsify_keep = sparsify_keep;
  if (covariates > 0) {
    spec.truth.hazard.gamma = Vec::Zero(covariates);
    spec.truth.hazard.gamma[0] = 0.5;
  }
  const auto pop = simdata::simulate(spec);
  fs::create_directories(out_dir);
  std::vector<IndividualRecord> records;
  for (const auto& ind : pop.individuals) records.push_back(ind.record);
  io::write_observations((fs::path(out_dir) / "observations.csv").string(), records);
  io::write_covariates((fs::path(out_dir) / "covariates.csv").string(), records);
  io::write_events((fs::path(out_dir) / "events.csv").string(), records);
  write_truth_sidecars(out_dir, pop, std::max(1, common.cfg.latent_stride));
  std::cout << "simulated " << records.size() << " individuals into " << out_dir << "\n";
  return 0;
}

std::vector<IndividualRecord> load_dir(const std::string& dir) {
  return io::load_dataset((fs::path(dir) / "observations.csv").string(),
                          (fs::path(dir) / "covariates.csv").string(),
                          (fs::path(dir) / "events.csv").string());
}

int run_train(const CommonArgs& common, const std::string& data_dir, const std::string& out_path) {
  auto records = load_dir(data_dir);
  if (records.empty()) throw validation_error("train: dataset is empty");
  int d = 0;
  for (const auto& r : records) d = std::max(d, r.n_signals());
  for (auto& r : records) r.signals.resize(static_cast<std::size_t>(d));
  for (auto& r : records)
    for (std::size_t s = 0; s < r.signals.size(); ++s)
      if (r.signals[s].times.size() == 0) r.signals[s].signal_id = static_cast<int>(s) + 1;

  const auto names = io::collect_covariate_names(records);
  const auto stats = compute_signal_stats(records, d);
  apply_standardization(records, stats);
  const auto fit = inference::fit_global(records, names, common.cfg.train);

  io::Checkpoint ck;
  ck.global = fit.global;
  ck.locals = fit.locals;
  for (const auto& r : records) ck.local_ids.push_back(r.id);
  ck.covariate_names = names;
  ck.stats = stats;
  io::write_checkpoint(out_path, ck);
  std::cout << "trained on " << records.size() << " individuals in " << fit.iterations << " iterations"
            << (fit.stopped_by_tolerance ? " (tolerance reached)" : "") << ", checkpoint " << out_path << "\n";
  return 0;
}

int run_predict(const CommonArgs& common, const std::string& checkpoint_path, const std::string& data_dir,
                const std::string& out_path) {
  const auto ck = io::load_checkpoint(checkpoint_path);
  auto records = load_dir(data_dir);
  if (records.empty()) throw validation_error("predict: dataset is empty");
  const int d = ck.global.n_signals();
  for (auto& r : records) {
    if (r.n_signals() > d) throw validation_error("predict: dataset has more signals than the checkpoint");
    r.signals.resize(static_cast<std::size_t>(d));
    for (std::size_t s = 0; s < r.signals.size(); ++s)
      if (r.signals[s].times.size() == 0) r.signals[s].signal_id = static_cast<int>(s) + 1;
  }
  apply_standardization(records, ck.stats);

  inference::TrainConfig cfg = common.cfg.train;
  cfg.r_shared = ck.global.r_shared;
  std::vector<std::vector<io::DistRow>> per_individual(records.size());
  parallel_for(static_cast<int>(records.size()), cfg.threads, [&](int i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    const auto insts = evalharness::predict_schedule(ck.global, rec, ck.covariate_names, cfg, common.cfg.horizon);
    for (const auto& inst : insts)
      per_individual[static_cast<std::size_t>(i)].push_back({rec.id, inst.t, inst.dist});
  });
  std::vector<io::DistRow> rows;
  for (const auto& chunk : per_individual) rows.insert(rows.end(), chunk.begin(), chunk.end());
  io::write_dists(out_path, rows);
  std::cout << "wrote " << rows.size() << " distributions to " << out_path << "\n";
  return 0;
}

int run_decide(const CommonArgs& common, const std::string& dists_path, const std::string& out_path) {
  const auto dists = io::load_dists(dists_path);
  if (dists.empty()) throw validation_error("decide: no distributions");
  const policy::CostSpec costs{common.cfg.l1, common.cfg.l2, common.cfg.q};
  const auto mode = common.cfg.mode == "point" ? evalharness::Mode::point : evalharness::Mode::robust;
  if (common.cfg.mode != "point" && common.cfg.mode != "robust")
    throw validation_error("decide: mode must be 'robust' or 'point'");
  std::vector<io::DecisionRow> rows;
  rows.reserve(dists.size());
  for (const auto& d : dists) {
    evalharness::PredictionInstance inst;
    inst.dist = d.dist;
    rows.push_back({d.individual_id, d.time_min, evalharness::decide(inst, costs, mode)});
  }
  io::write_decisions(out_path, rows);
  std::cout << "wrote " << rows.size() << " decisions to " << out_path << "\n";
  return 0;
}

int run_evaluate(const CommonArgs& common, const std::string& decisions_path, const std::string& data_dir,
                 const std::string& truth_path, const std::string& out_path) {
  const auto decisions = io::load_decisions(decisions_path);
  if (decisions.empty()) throw validation_error("evaluate: no decisions");
  const auto records = load_dir(data_dir);
  const auto rec_index = index_records(records);
  std::map<long long, double> truth;
  if (!truth_path.empty()) truth = load_truth_times(truth_path);
  std::vector<evalharness::Outcome> outcomes;
  outcomes.reserve(decisions.size());
  for (const auto& d : decisions) {
    evalharness::Outcome o;
    o.label = label_for(rec_index, truth, d.individual_id, d.time_min, common.cfg.horizon);
    o.verdict = d.decision.verdict;
    outcomes.push_back(o);
  }
  auto row = evalharness::compute_metrics(outcomes);
  row.mode = common.cfg.mode;
  row.l1 = common.cfg.l1;
  row.l2 = common.cfg.l2;
  row.q = common.cfg.q;
  io::write_metrics(out_path, {row});
  std::cout << "tpr=" << row.tpr << " fpr=" << row.fpr << " ppv=" << (row.ppv ? io::fmt_double(*row.ppv) : "n/a")
            << " decision_rate=" << row.decision_rate << " excluded=" << row.n_excluded << "\n";
  return 0;
}

int run_sweep(const CommonArgs& common, const std::string& dists_path, const std::string& data_dir,
              const std::string& truth_path, const std::string& metrics_path, const std::string& roc_path,
              const std::string& tprppv_path, const std::string& modes) {
  const auto dists = io::load_dists(dists_path);
  if (dists.empty()) throw validation_error("sweep: no distributions");
  const auto records = load_dir(data_dir);
  const auto insts = instances_from_dists(dists, records, truth_path, common.cfg.horizon);
  evalharness::SweepGrids grids;
  std::vector<evalharness::MetricRow> all;
  const bool want_robust = modes.find("robust") != std::string::npos;
  const bool want_point = modes.find("point") != std::string::npos;
  if (!want_robust && !want_point) throw validation_error("sweep: modes must mention robust and/or point");
  if (want_robust) {
    const auto rows = evalharness::sweep(insts, grids, evalharness::Mode::robust);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  if (want_point) {
    const auto rows = evalharness::sweep(insts, grids, evalharness::Mode::point);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  io::write_metrics(metrics_path, all);
  if (!roc_path.empty()) io::write_metrics(roc_path, evalharness::roc_frontier(all));
  if (!tprppv_path.empty()) io::write_metrics(tprppv_path, evalharness::tpr_ppv_frontier(all));
  std::cout << "swept " << all.size() << " cost settings over " << insts.size() << " instances\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint longitudinal / time-to-event modeling with an abstaining decision policy"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand

  CommonArgs common;
  app.add_option("--config", common.config_path, "flat key=value configuration file");
  // flags shared by subcommands; CLI values override the config file
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> horizon;
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker cap (0 = hardware)");
  app.add_option("--horizon", horizon, "prediction horizon, minutes");

  auto* sim = app.add_subcommand("simulate", "draw a synthetic population from the generative model");
  std::string sim_out = "data";
  int sim_n = 60, sim_d = 3, sim_r = 2, sim_cov = 0;
  double sim_right = 0.2, sim_interval = 0.1, sim_rate = 0.5, sim_sparsify = 0.0, sim_keep = 0.3;
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--n", sim_n, "number of individuals");
  sim->add_option("--signals", sim_d, "number of signals");
  sim->add_option("--r-shared", sim_r, "number of shared latent functions");
  sim->add_option("--right-frac", sim_right, "right-censoring fraction");
  sim->add_option("--interval-frac", sim_interval, "interval-censoring fraction");
  sim->add_option("--obs-rate", sim_rate, "observations per hour per signal");
  sim->add_option("--covariates", sim_cov, "number of static covariates");
  sim->add_option("--sparsify-frac", sim_sparsify, "share of individuals with thinned observations");
  sim->add_option("--sparsify-keep", sim_keep, "probability an observation survives thinning");

  auto* train = app.add_subcommand("train", "fit global and local parameters");
  std::string train_data, train_out = "model.ckpt";
  std::optional<int> train_iters, train_minibatch, train_local_iters, train_m, train_r, train_nmc;
  std::optional<double> train_lr, train_rel_tol;
  train->add_option("--data", train_data, "dataset directory")->required();
  train->add_option("--out", train_out, "checkpoint path");
  train->add_option("--max-global-iters", train_iters, "global iteration cap");
  train->add_option("--minibatch", train_minibatch, "minibatch size");
  train->add_option("--local-max-iters", train_local_iters, "local solver iteration cap");
  train->add_option("--m-inducing", train_m, "inducing points per latent");
  train->add_option("--r-shared", train_r, "shared latent functions");
  train->add_option("--n-mc", train_nmc, "Monte Carlo draws for interval censoring");
  train->add_option("--lr", train_lr, "AdaGrad learning rate");
  train->add_option("--rel-tol", train_rel_tol, "relative-change stopping threshold");

  auto* predict = app.add_subcommand("predict", "event-probability distributions at the landmark schedule");
  std::string pred_ck, pred_data, pred_out = "dists.csv";
  predict->add_option("--checkpoint", pred_ck, "trained checkpoint")->required();
  predict->add_option("--data", pred_data, "dataset directory")->required();
  predict->add_option("--out", pred_out, "output CSV");

  auto* decide = app.add_subcommand("decide", "turn distributions into accept/reject/abstain decisions");
  std::string dec_dists, dec_out = "decisions.csv";
  std::optional<double> dec_l1, dec_l2, dec_q;
  std::optional<std::string> dec_mode;
  decide->add_option("--dists", dec_dists, "distributions CSV")->required();
  decide->add_option("--out", dec_out, "output CSV");
  decide->add_option("--l1", dec_l1, "false-positive cost relative to false-negative");
  decide->add_option("--l2", dec_l2, "abstention cost relative to false-negative");
  decide->add_option("--q", dec_q, "risk quantile, in (0.5, 1)");
  decide->add_option("--mode", dec_mode, "robust | point");

  auto* evaluate = app.add_subcommand("evaluate", "metrics for a set of decisions");
  std::string eval_decisions, eval_data, eval_truth, eval_out = "metrics.csv";
  std::optional<double> eval_l1, eval_l2, eval_q;
  std::optional<std::string> eval_mode;
  evaluate->add_option("--decisions", eval_decisions, "decisions CSV")->required();
  evaluate->add_option("--data", eval_data, "dataset directory (events for labels)")->required();
  evaluate->add_option("--truth", eval_truth, "truth_events.csv for ground-truth labels");
  evaluate->add_option("--out", eval_out, "output metrics CSV");
  evaluate->add_option("--l1", eval_l1, "annotation: L1 used by decide");
  evaluate->add_option("--l2", eval_l2, "annotation: L2 used by decide");
  evaluate->add_option("--q", eval_q, "annotation: q used by decide");
  evaluate->add_option("--mode", eval_mode, "annotation: mode used by decide");

  auto* sweep = app.add_subcommand("sweep", "grid search over costs, with ROC and TPR-PPV frontiers");
  std::string sweep_dists, sweep_data, sweep_truth, sweep_metrics = "metrics.csv";
  std::string sweep_roc = "roc_frontier.csv", sweep_tprppv = "tpr_ppv_frontier.csv", sweep_modes = "robust,point";
  sweep->add_option("--dists", sweep_dists, "distributions CSV")->required();
  sweep->add_option("--data", sweep_data, "dataset directory")->required();
  sweep->add_option("--truth", sweep_truth, "truth_events.csv for ground-truth labels");
  sweep->add_option("--out-metrics", sweep_metrics, "all swept rows");
  sweep->add_option("--out-roc", sweep_roc, "ROC frontier CSV");
  sweep->add_option("--out-tpr-ppv", sweep_tprppv, "TPR-vs-PPV frontier CSV");
  sweep->add_option("--modes", sweep_modes, "comma list of robust,point");

  CLI11_PARSE(app, argc, argv);

  try {
    common.load();
    if (seed) common.cfg.train.seed = *seed;
    if (threads) common.cfg.train.threads = *threads;
    if (horizon) common.cfg.horizon = *horizon;

    if (sim->parsed()) {
      return run_simulate(common, sim_out, sim_n, sim_d, sim_r, sim_right, sim_interval, sim_rate, sim_cov,
                          sim_sparsify, sim_keep);
    }
    if (train->parsed()) {
      if (train_iters) common.cfg.train.max_global_iters = *train_iters;
      if (train_minibatch) common.cfg.train.minibatch = *train_minibatch;
      if (train_local_iters) common.cfg.train.local_max_iters = *train_local_iters;
      if (train_m) common.cfg.train.m_inducing = *train_m;
      if (train_r) common.cfg.train.r_shared = *train_r;
      if (train_nmc) common.cfg.train.n_mc = *train_nmc;
      if (train_lr) common.cfg.train.lr = *train_lr;
      if (train_rel_tol) common.cfg.train.rel_tol = *train_rel_tol;
      return run_train(common, train_data, train_out);
    }
    if (predict->parsed()) return run_predict(common, pred_ck, pred_data, pred_out);
    if (decide->parsed()) {
      if (dec_l1) common.cfg.l1 = *dec_l1;
      if (dec_l2) common.cfg.l2 = *dec_l2;
      if (dec_q) common.cfg.q = *dec_q;
      if (dec_mode) common.cfg.mode = *dec_mode;
      return run_decide(common, dec_dists, dec_out);
    }
    if (evaluate->parsed()) {
      if (eval_l1) common.cfg.l1 = *eval_l1;
      if (eval_l2) common.cfg.l2 = *eval_l2;
      if (eval_q) common.cfg.q = *eval_q;
      if (eval_mode) common.cfg.mode = *eval_mode;
      return run_evaluate(common, eval_decisions, eval_data, eval_truth, eval_out);
    }
    if (sweep->parsed())
      return run_sweep(common, sweep_dists, sweep_data, sweep_truth, sweep_metrics, sweep_roc, sweep_tprppv,
                       sweep_modes);
  } catch (const validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ill_conditioned_kernel& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
