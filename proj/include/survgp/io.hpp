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

#ifndef SURVGP_IO_HPP
#define SURVGP_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "survgp/data.hpp"
#include "survgp/evalharness.hpp"
#include "survgp/inference.hpp"
#include "survgp/policy.hpp"
#include "survgp/types.hpp"

// On-disk contracts: the CSV dataset formats, the flat key=value run config,
// and the versioned checkpoint archive. Floating-point fields are written
// with 17 significant digits so parse(print(x)) == x; the checkpoint uses
// hexfloats for bit-exact round-trips.
namespace survgp::io {

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt_hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", x);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

inline double parse_double(const std::string& s, const std::string& file, int line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw validation_error(file + ":" + std::to_string(line_no) + ": bad numeric field '" + s + "'");
  }
}

inline long long parse_id(const std::string& s, const std::string& file, int line_no) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw validation_error(file + ":" + std::to_string(line_no) + ": bad id field '" + s + "'");
  }
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw validation_error("cannot write " + path);
  return out;
}

inline void expect_header(std::ifstream& in, const std::string& want, const std::string& file) {
  std::string line;
  if (!std::getline(in, line)) throw validation_error(file + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != want) throw validation_error(file + ":1: expected header '" + want + "', got '" + line + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// dataset CSVs
// ---------------------------------------------------------------------------

inline void write_observations(const std::string& path, const std::vector<IndividualRecord>& records) {
  auto out = detail::open_out(path);
  out << "individual_id,signal_id,time_min,value\n";
  for (const auto& rec : records)
    for (const auto& s : rec.signals)
      for (Eigen::Index i = 0; i < s.times.size(); ++i)
        out << rec.id << ',' << s.signal_id << ',' << fmt_double(s.times[i]) << ',' << fmt_double(s.values[i])
            << '\n';
}

inline void write_covariates(const std::string& path, const std::vector<IndividualRecord>& records) {
  auto out = detail::open_out(path);
  out << "individual_id,time_min,name,value\n";
  for (const auto& rec : records)
    for (const auto& [name, series] : rec.covariates.raw())
      for (const auto& [t, v] : series)
        out << rec.id << ',' << fmt_double(t) << ',' << name << ',' << fmt_double(v) << '\n';
}

inline std::string kind_string(survival::EventRecord::Kind kind) {
  switch (kind) {
    case survival::EventRecord::Kind::observed: return "observed";
    case survival::EventRecord::Kind::right_censored: return "right";
    default: return "interval";
  }
}

inline void write_events(const std::string& path, const std::vector<IndividualRecord>& records) {
  auto out = detail::open_out(path);
  out << "individual_id,kind,t_event,t_left,t_right\n";
  for (const auto& rec : records) {
    const auto& e = rec.event;
    out << rec.id << ',' << kind_string(e.kind) << ',';
    if (e.kind == survival::EventRecord::Kind::observed) out << fmt_double(e.t_event);
    out << ',' << fmt_double(e.t_left) << ',';
    if (e.kind == survival::EventRecord::Kind::interval_censored) out << fmt_double(e.t_right);
    out << '\n';
  }
}

// Loads the three dataset files into records keyed by individual id (sorted).
// Individuals present in events.csv but without observations keep empty
// signal series.
inline std::vector<IndividualRecord> load_dataset(const std::string& observations_path,
                                                  const std::string& covariates_path,
                                                  const std::string& events_path) {
  std::map<long long, IndividualRecord> by_id;

  {
    auto in = detail::open_in(events_path);
    detail::expect_header(in, "individual_id,kind,t_event,t_left,t_right", events_path);
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto f = detail::split_csv_line(line);
      if (f.size() != 5) throw validation_error(events_path + ":" + std::to_string(line_no) + ": expected 5 fields");
      const long long id = detail::parse_id(f[0], events_path, line_no);
      auto& rec = by_id[id];
      rec.id = id;
      auto& e = rec.event;
      if (f[1] == "observed") {
        e.kind = survival::EventRecord::Kind::observed;
        e.t_event = detail::parse_double(f[2], events_path, line_no);
        e.t_left = detail::parse_double(f[3], events_path, line_no);
      } else if (f[1] == "right") {
        e.kind = survival::EventRecord::Kind::right_censored;
        e.t_left = detail::parse_double(f[3], events_path, line_no);
      } else if (f[1] == "interval") {
        e.kind = survival::EventRecord::Kind::interval_censored;
        e.t_left = detail::parse_double(f[3], events_path, line_no);
        e.t_right = detail::parse_double(f[4], events_path, line_no);
      } else {
        throw validation_error(events_path + ":" + std::to_string(line_no) + ": unknown kind '" + f[1] + "'");
      }
      try {
        e.validate();
      } catch (const validation_error& err) {
        throw validation_error(events_path + ":" + std::to_string(line_no) + ": " + err.what());
      }
    }
  }

  {
    auto in = detail::open_in(observations_path);
    detail::expect_header(in, "individual_id,signal_id,time_min,value", observations_path);
    std::string line;
    int line_no = 1;
    std::map<long long, std::map<int, std::vector<std::pair<double, double>>>> raw;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto f = detail::split_csv_line(line);
      if (f.size() != 4)
        throw validation_error(observations_path + ":" + std::to_string(line_no) + ": expected 4 fields");
      const long long id = detail::parse_id(f[0], observations_path, line_no);
      const int sig = static_cast<int>(detail::parse_id(f[1], observations_path, line_no));
      if (sig < 1) throw validation_error(observations_path + ":" + std::to_string(line_no) + ": signal_id must be >= 1");
      raw[id][sig].emplace_back(detail::parse_double(f[2], observations_path, line_no),
                                detail::parse_double(f[3], observations_path, line_no));
    }
    int max_signal = 0;
    for (const auto& [id, sigs] : raw)
      for (const auto& [sig, pts] : sigs) max_signal = std::max(max_signal, sig);
    for (auto& [id, rec] : by_id) rec.signals.resize(static_cast<std::size_t>(max_signal));
    for (auto& [id, sigs] : raw) {
      auto it = by_id.find(id);
      if (it == by_id.end())
        throw validation_error(observations_path + ": individual " + std::to_string(id) + " missing from events");
      auto& rec = it->second;
      rec.signals.resize(static_cast<std::size_t>(max_signal));
      for (auto& [sig, pts] : sigs) {
        std::sort(pts.begin(), pts.end());
        auto& series = rec.signals[static_cast<std::size_t>(sig - 1)];
        series.signal_id = sig;
        series.times.resize(static_cast<Eigen::Index>(pts.size()));
        series.values.resize(static_cast<Eigen::Index>(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) {
          series.times[static_cast<Eigen::Index>(i)] = pts[i].first;
          series.values[static_cast<Eigen::Index>(i)] = pts[i].second;
        }
      }
    }
    for (auto& [id, rec] : by_id)
      for (std::size_t s = 0; s < rec.signals.size(); ++s)
        if (rec.signals[s].times.size() == 0) rec.signals[s].signal_id = static_cast<int>(s) + 1;
  }

  {
    auto in = detail::open_in(covariates_path);
    detail::expect_header(in, "individual_id,time_min,name,value", covariates_path);
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto f = detail::split_csv_line(line);
      if (f.size() != 4)
        throw validation_error(covariates_path + ":" + std::to_string(line_no) + ": expected 4 fields");
      const long long id = detail::parse_id(f[0], covariates_path, line_no);
      auto it = by_id.find(id);
      if (it == by_id.end())
        throw validation_error(covariates_path + ":" + std::to_string(line_no) + ": individual " +
                               std::to_string(id) + " missing from events");
      it->second.covariates.add(f[2], detail::parse_double(f[1], covariates_path, line_no),
                                detail::parse_double(f[3], covariates_path, line_no));
    }
  }

  std::vector<IndividualRecord> records;
  records.reserve(by_id.size());
  for (auto& [id, rec] : by_id) {
    rec.validate();
    records.push_back(std::move(rec));
  }
  return records;
}

// union of covariate names across a population, sorted
inline std::vector<std::string> collect_covariate_names(const std::vector<IndividualRecord>& records) {
  std::map<std::string, int> seen;
  for (const auto& rec : records)
    for (const auto& name : rec.covariates.names()) seen[name] = 1;
  std::vector<std::string> names;
  for (const auto& [name, one] : seen) names.push_back(name);
  return names;
}

// ---------------------------------------------------------------------------
// distributions / decisions / metrics CSVs
// ---------------------------------------------------------------------------

struct DistRow {
  long long individual_id = 0;
  double time_min = 0.0;
  policy::EventProbDist dist;
};

inline void write_dists(const std::string& path, const std::vector<DistRow>& rows) {
  auto out = detail::open_out(path);
  out << "individual_id,time_min,loc,scale,k\n";
  for (const auto& r : rows)
    out << r.individual_id << ',' << fmt_double(r.time_min) << ',' << fmt_double(r.dist.loc) << ','
        << fmt_double(r.dist.scale) << ',' << fmt_double(r.dist.k) << '\n';
}

inline std::vector<DistRow> load_dists(const std::string& path) {
  auto in = detail::open_in(path);
  detail::expect_header(in, "individual_id,time_min,loc,scale,k", path);
  std::vector<DistRow> rows;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 5) throw validation_error(path + ":" + std::to_string(line_no) + ": expected 5 fields");
    DistRow r;
    r.individual_id = detail::parse_id(f[0], path, line_no);
    r.time_min = detail::parse_double(f[1], path, line_no);
    r.dist.loc = detail::parse_double(f[2], path, line_no);
    r.dist.scale = detail::parse_double(f[3], path, line_no);
    r.dist.k = detail::parse_double(f[4], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

struct DecisionRow {
  long long individual_id = 0;
  double time_min = 0.0;
  policy::Decision decision;
};

inline void write_decisions(const std::string& path, const std::vector<DecisionRow>& rows) {
  auto out = detail::open_out(path);
  out << "individual_id,time_min,verdict,h_lo,h_hi,tau_lo,tau_hi\n";
  for (const auto& r : rows)
    out << r.individual_id << ',' << fmt_double(r.time_min) << ',' << policy::verdict_code(r.decision.verdict)
        << ',' << fmt_double(r.decision.h_lo) << ',' << fmt_double(r.decision.h_hi) << ','
        << fmt_double(r.decision.tau_lo) << ',' << fmt_double(r.decision.tau_hi) << '\n';
}

inline std::vector<DecisionRow> load_decisions(const std::string& path) {
  auto in = detail::open_in(path);
  detail::expect_header(in, "individual_id,time_min,verdict,h_lo,h_hi,tau_lo,tau_hi", path);
  std::vector<DecisionRow> rows;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 7) throw validation_error(path + ":" + std::to_string(line_no) + ": expected 7 fields");
    DecisionRow r;
    r.individual_id = detail::parse_id(f[0], path, line_no);
    r.time_min = detail::parse_double(f[1], path, line_no);
    if (f[2] == "0")
      r.decision.verdict = policy::Verdict::negative;
    else if (f[2] == "1")
      r.decision.verdict = policy::Verdict::positive;
    else if (f[2] == "a")
      r.decision.verdict = policy::Verdict::abstain;
    else
      throw validation_error(path + ":" + std::to_string(line_no) + ": bad verdict '" + f[2] + "'");
    r.decision.h_lo = detail::parse_double(f[3], path, line_no);
    r.decision.h_hi = detail::parse_double(f[4], path, line_no);
    r.decision.tau_lo = detail::parse_double(f[5], path, line_no);
    r.decision.tau_hi = detail::parse_double(f[6], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

inline void write_metrics(const std::string& path, const std::vector<evalharness::MetricRow>& rows) {
  auto out = detail::open_out(path);
  out << "mode,L1,L2,q,tpr,fpr,ppv,decision_rate,n_excluded\n";
  for (const auto& r : rows) {
    out << r.mode << ',' << fmt_double(r.l1) << ',' << fmt_double(r.l2) << ',' << fmt_double(r.q) << ','
        << fmt_double(r.tpr) << ',' << fmt_double(r.fpr) << ',';
    if (r.ppv) out << fmt_double(*r.ppv);
    out << ',' << fmt_double(r.decision_rate) << ',' << r.n_excluded << '\n';
  }
}

// ---------------------------------------------------------------------------
// ground-truth sidecars (test use)
// ---------------------------------------------------------------------------

struct TruthRow {
  long long individual_id = 0;
  std::optional<double> t_event_true;
  double fbar_star = 0.0;
  double duration = 0.0;
};

inline void write_truth_events(const std::string& path, const std::vector<TruthRow>& rows) {
  auto out = detail::open_out(path);
  out << "individual_id,t_event_true,fbar_star,duration\n";
  for (const auto& r : rows) {
    out << r.individual_id << ',';
    if (r.t_event_true) out << fmt_double(*r.t_event_true);
    out << ',' << fmt_double(r.fbar_star) << ',' << fmt_double(r.duration) << '\n';
  }
}

inline std::vector<TruthRow> load_truth_events(const std::string& path) {
  auto in = detail::open_in(path);
  detail::expect_header(in, "individual_id,t_event_true,fbar_star,duration", path);
  std::vector<TruthRow> rows;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 4) throw validation_error(path + ":" + std::to_string(line_no) + ": expected 4 fields");
    TruthRow r;
    r.individual_id = detail::parse_id(f[0], path, line_no);
    if (!f[1].empty()) r.t_event_true = detail::parse_double(f[1], path, line_no);
    r.fbar_star = detail::parse_double(f[2], path, line_no);
    r.duration = detail::parse_double(f[3], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// run configuration: flat key=value, unknown keys rejected
// ---------------------------------------------------------------------------

struct RunConfig {
  inference::TrainConfig train;
  double horizon = evalharness::kDefaultHorizon;
  double l1 = 1.0, l2 = 0.4, q = 0.9;
  std::string mode = "robust";
  int latent_stride = 15;  // sidecar latent subsampling, minutes
};

inline void apply_config_entry(RunConfig* cfg, const std::string& key, const std::string& value,
                               const std::string& where) {
  auto to_double = [&](const std::string& s) { return detail::parse_double(s, where, 0); };
  auto to_int = [&](const std::string& s) { return static_cast<int>(detail::parse_id(s, where, 0)); };
  if (key == "seed")
    cfg->train.seed = static_cast<std::uint64_t>(detail::parse_id(value, where, 0));
  else if (key == "lr")
    cfg->train.lr = to_double(value);
  else if (key == "max_global_iters")
    cfg->train.max_global_iters = to_int(value);
  else if (key == "minibatch")
    cfg->train.minibatch = to_int(value);
  else if (key == "n_mc")
    cfg->train.n_mc = to_int(value);
  else if (key == "local_max_iters")
    cfg->train.local_max_iters = to_int(value);
  else if (key == "gh_nodes")
    cfg->train.gh_nodes = to_int(value);
  else if (key == "m_inducing")
    cfg->train.m_inducing = to_int(value);
  else if (key == "r_shared")
    cfg->train.r_shared = to_int(value);
  else if (key == "rel_tol")
    cfg->train.rel_tol = to_double(value);
  else if (key == "threads")
    cfg->train.threads = to_int(value);
  else if (key == "horizon")
    cfg->horizon = to_double(value);
  else if (key == "l1")
    cfg->l1 = to_double(value);
  else if (key == "l2")
    cfg->l2 = to_double(value);
  else if (key == "q")
    cfg->q = to_double(value);
  else if (key == "mode")
    cfg->mode = value;
  else if (key == "latent_stride")
    cfg->latent_stride = to_int(value);
  else
    throw validation_error(where + ": unknown configuration key '" + key + "'");
}

inline RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  auto in = detail::open_in(path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    apply_config_entry(&cfg, line.substr(0, eq), line.substr(eq + 1), path + ":" + std::to_string(line_no));
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// checkpoint: versioned text archive, hexfloat payload
// ---------------------------------------------------------------------------

struct Checkpoint {
  inference::GlobalParams global;
  std::vector<longitudinal::LocalState> locals;
  std::vector<long long> local_ids;
  std::vector<std::string> covariate_names;
  SignalStats stats;
};

inline constexpr const char* kCheckpointMagic = "survgp-checkpoint";
inline constexpr int kCheckpointVersion = 1;

inline void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  auto out = detail::open_out(path);
  out << kCheckpointMagic << " v" << kCheckpointVersion << '\n';
  out << "covariates " << ck.covariate_names.size();
  for (const auto& n : ck.covariate_names) out << ' ' << n;
  out << '\n';
  const int d = ck.global.n_signals();
  const int j = ck.global.n_latents();
  out << "signals " << d << '\n';
  out << "r_shared " << ck.global.r_shared << '\n';
  out << "stats_mean";
  for (Eigen::Index i = 0; i < ck.stats.mean.size(); ++i) out << ' ' << fmt_hex(ck.stats.mean[i]);
  out << '\n';
  out << "stats_std";
  for (Eigen::Index i = 0; i < ck.stats.stddev.size(); ++i) out << ' ' << fmt_hex(ck.stats.stddev[i]);
  out << '\n';
  out << "alpha";
  for (Eigen::Index i = 0; i < ck.global.hazard.alpha.size(); ++i) out << ' ' << fmt_hex(ck.global.hazard.alpha[i]);
  out << '\n';
  out << "gamma";
  for (Eigen::Index i = 0; i < ck.global.hazard.gamma.size(); ++i) out << ' ' << fmt_hex(ck.global.hazard.gamma[i]);
  out << '\n';
  out << "a " << fmt_hex(ck.global.hazard.a) << '\n';
  out << "b " << fmt_hex(ck.global.hazard.b) << '\n';
  out << "c " << fmt_hex(ck.global.hazard.c) << '\n';
  out << "links " << j;
  for (const auto& link : ck.global.links) out << ' ' << fmt_hex(link.beta) << ' ' << fmt_hex(link.beta0);
  out << '\n';
  out << "locals " << ck.locals.size() << '\n';
  for (std::size_t i = 0; i < ck.locals.size(); ++i) {
    const auto& ls = ck.locals[i];
    const int m = static_cast<int>(ls.blocks.empty() ? 0 : ls.blocks[0].m.size());
    out << "local " << ck.local_ids[i] << ' ' << ls.r_shared << ' ' << ls.n_signals() << ' ' << m << ' '
        << fmt_hex(ls.t_max) << '\n';
    out << "lengthscales";
    for (Eigen::Index k = 0; k < ls.lengthscales.size(); ++k) out << ' ' << fmt_hex(ls.lengthscales[k]);
    out << '\n';
    for (const auto& block : ls.blocks) {
      out << "z";
      for (Eigen::Index k = 0; k < block.z.size(); ++k) out << ' ' << fmt_hex(block.z[k]);
      out << "\nm";
      for (Eigen::Index k = 0; k < block.m.size(); ++k) out << ' ' << fmt_hex(block.m[k]);
      out << "\nchol";
      for (Eigen::Index r = 0; r < block.s_chol.rows(); ++r)
        for (Eigen::Index cidx = 0; cidx <= r; ++cidx) out << ' ' << fmt_hex(block.s_chol(r, cidx));
      out << '\n';
    }
    out << "w";
    for (Eigen::Index r = 0; r < ls.weights.w.rows(); ++r)
      for (Eigen::Index cidx = 0; cidx < ls.weights.w.cols(); ++cidx) out << ' ' << fmt_hex(ls.weights.w(r, cidx));
    out << "\nkappa";
    for (Eigen::Index k = 0; k < ls.weights.kappa.size(); ++k) out << ' ' << fmt_hex(ls.weights.kappa[k]);
    out << "\nnoise";
    for (Eigen::Index k = 0; k < ls.weights.noise_scale.size(); ++k)
      out << ' ' << fmt_hex(ls.weights.noise_scale[k]);
    out << '\n';
  }
}

namespace detail {

inline std::vector<std::string> tokens_after(const std::string& line, const std::string& key,
                                             const std::string& path) {
  std::istringstream ss(line);
  std::string head;
  ss >> head;
  if (head != key) throw validation_error(path + ": expected '" + key + "' section, got '" + head + "'");
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline std::string next_line(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw validation_error(path + ": truncated checkpoint");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline double hex_to_double(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == nullptr || *end != '\0') throw validation_error(path + ": bad hexfloat '" + s + "'");
  return v;
}

}  // namespace detail

inline Checkpoint load_checkpoint(const std::string& path) {
  auto in = detail::open_in(path);
  Checkpoint ck;
  {
    const auto header = detail::next_line(in, path);
    std::istringstream ss(header);
    std::string magic, version;
    ss >> magic >> version;
    if (magic != kCheckpointMagic) throw validation_error(path + ": not a checkpoint file");
    if (version != "v" + std::to_string(kCheckpointVersion))
      throw validation_error(path + ": unsupported checkpoint schema " + version);
  }
  auto read_vec = [&](const std::string& key) {
    const auto toks = detail::tokens_after(detail::next_line(in, path), key, path);
    Vec v(static_cast<Eigen::Index>(toks.size()));
    for (std::size_t i = 0; i < toks.size(); ++i) v[static_cast<Eigen::Index>(i)] = detail::hex_to_double(toks[i], path);
    return v;
  };
  {
    const auto toks = detail::tokens_after(detail::next_line(in, path), "covariates", path);
    if (toks.empty()) throw validation_error(path + ": bad covariates line");
    const int n = static_cast<int>(std::stoll(toks[0]));
    if (static_cast<int>(toks.size()) != n + 1) throw validation_error(path + ": covariate count mismatch");
    ck.covariate_names.assign(toks.begin() + 1, toks.end());
  }
  const auto sig_toks = detail::tokens_after(detail::next_line(in, path), "signals", path);
  const int d = static_cast<int>(std::stoll(sig_toks.at(0)));
  const auto r_toks = detail::tokens_after(detail::next_line(in, path), "r_shared", path);
  const int r_shared = static_cast<int>(std::stoll(r_toks.at(0)));
  ck.stats.mean = read_vec("stats_mean");
  ck.stats.stddev = read_vec("stats_std");
  ck.global.r_shared = r_shared;
  ck.global.hazard.alpha = read_vec("alpha");
  ck.global.hazard.gamma = read_vec("gamma");
  ck.global.hazard.a = detail::hex_to_double(detail::tokens_after(detail::next_line(in, path), "a", path).at(0), path);
  ck.global.hazard.b = detail::hex_to_double(detail::tokens_after(detail::next_line(in, path), "b", path).at(0), path);
  ck.global.hazard.c = detail::hex_to_double(detail::tokens_after(detail::next_line(in, path), "c", path).at(0), path);
  {
    const auto toks = detail::tokens_after(detail::next_line(in, path), "links", path);
    const int j = static_cast<int>(std::stoll(toks.at(0)));
    if (static_cast<int>(toks.size()) != 1 + 2 * j) throw validation_error(path + ": link count mismatch");
    ck.global.links.resize(static_cast<std::size_t>(j));
    for (int i = 0; i < j; ++i) {
      ck.global.links[static_cast<std::size_t>(i)].beta = detail::hex_to_double(toks[static_cast<std::size_t>(1 + 2 * i)], path);
      ck.global.links[static_cast<std::size_t>(i)].beta0 = detail::hex_to_double(toks[static_cast<std::size_t>(2 + 2 * i)], path);
    }
  }
  if (static_cast<int>(ck.global.hazard.alpha.size()) != d) throw validation_error(path + ": alpha size mismatch");
  {
    const auto toks = detail::tokens_after(detail::next_line(in, path), "locals", path);
    const int n_locals = static_cast<int>(std::stoll(toks.at(0)));
    ck.locals.resize(static_cast<std::size_t>(n_locals));
    ck.local_ids.resize(static_cast<std::size_t>(n_locals));
    for (int i = 0; i < n_locals; ++i) {
      const auto lt = detail::tokens_after(detail::next_line(in, path), "local", path);
      if (lt.size() != 5) throw validation_error(path + ": bad local header");
      auto& ls = ck.locals[static_cast<std::size_t>(i)];
      ck.local_ids[static_cast<std::size_t>(i)] = std::stoll(lt[0]);
      ls.r_shared = static_cast<int>(std::stoll(lt[1]));
      const int ld = static_cast<int>(std::stoll(lt[2]));
      const int m = static_cast<int>(std::stoll(lt[3]));
      ls.t_max = detail::hex_to_double(lt[4], path);
      ls.lengthscales = read_vec("lengthscales");
      const int j = ls.r_shared + ld;
      ls.blocks.resize(static_cast<std::size_t>(j));
      for (int jj = 0; jj < j; ++jj) {
        auto& block = ls.blocks[static_cast<std::size_t>(jj)];
        block.z = read_vec("z");
        block.m = read_vec("m");
        const auto ct = detail::tokens_after(detail::next_line(in, path), "chol", path);
        if (static_cast<int>(ct.size()) != m * (m + 1) / 2) throw validation_error(path + ": chol size mismatch");
        block.s_chol = Mat::Zero(m, m);
        int at = 0;
        for (int rr = 0; rr < m; ++rr)
          for (int cc = 0; cc <= rr; ++cc) block.s_chol(rr, cc) = detail::hex_to_double(ct[static_cast<std::size_t>(at++)], path);
      }
      const Vec w_flat = read_vec("w");
      ls.weights.kappa = read_vec("kappa");
      ls.weights.noise_scale = read_vec("noise");
      if (w_flat.size() != static_cast<Eigen::Index>(ld) * ls.r_shared)
        throw validation_error(path + ": weight matrix size mismatch");
      ls.weights.w = Mat::Zero(ld, ls.r_shared);
      int at = 0;
      for (int rr = 0; rr < ld; ++rr)
        for (int cc = 0; cc < ls.r_shared; ++cc) ls.weights.w(rr, cc) = w_flat[at++];
    }
  }
  return ck;
}

}  // namespace survgp::io

#endif  // SURVGP_IO_HPP
