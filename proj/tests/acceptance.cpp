// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Usage: frl_acceptance <frl-cli>
// (the CLI path is needed by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "frl/ckpt.hpp"
#include "frl/csv.hpp"
#include "frl/factorized.hpp"
#include "frl/harness.hpp"
#include "frl/objectives.hpp"
#include "frl/optim.hpp"
#include "frl/oracles.hpp"
#include "frl/rng.hpp"
#include "frl/spectra.hpp"
#include "support/reference.hpp"

namespace fs = std::filesystem;
using frl::Factorization;
using frl::Matrix;

namespace {

std::string g_cli_path;

struct Outcome {
  bool ok = true;
  std::string details;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!details.empty()) details += "; ";
      details += what;
    }
  }
  void note(const std::string& what) {
    if (!details.empty()) details += "; ";
    details += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "frl_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Matrix diag(const std::vector<double>& vals) {
  const auto n = static_cast<frl::Index>(vals.size());
  Matrix m = Matrix::Zero(n, n);
  for (frl::Index i = 0; i < n; ++i) m(i, i) = vals[static_cast<std::size_t>(i)];
  return m;
}

const std::vector<double> kFig1Diag{0.2, 0.4, 0.6, 0.8, 1.0};

frl::ExperimentConfig fig1_config(const std::string& out_dir) {
  frl::ExperimentConfig c;
  c.name = "fig1";
  c.loss.kind = "regression";
  c.loss.d = diag(kFig1Diag);
  c.loss.scale = 0.5;
  c.model.kind = "factor_pair";
  c.model.m = 5;
  c.model.n = 5;
  c.model.r = 5;
  c.init.distribution = "gaussian";
  // Small init keeps marginal modes (s_i == lambda) below tolerance at the
  // pinned step budget; the lambda = 0 retention clause runs separately in
  // the lazy regime where the initial gap is macroscopic.
  c.init.scale = 0.01;
  c.init.seed = 3;
  c.optimizer.kind = frl::OptimizerKind::gd;
  c.optimizer.step_size = 1e-2;
  c.lambda_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 5.0};
  c.steps = 20000;
  c.record_every = 100;
  c.output_dir = out_dir;
  c.rate_window = {50, 500};
  return c;
}

// Criteria 1 and 7 share the fig-1 sweep; it is run once and cached.
struct Fig1Results {
  frl::ExperimentResult sweep;
  double lambda0_gap_initial = 0.0;
  double lambda0_gap_final = 0.0;
  double seconds = 0.0;
};

const Fig1Results& fig1_results() {
  static const Fig1Results cached = [] {
    const auto t0 = std::chrono::steady_clock::now();
    Fig1Results r;
    const fs::path dir = work_dir("fig1");
    r.sweep = frl::run_experiment(fig1_config(dir.string()));

    // lambda = 0 retention cell: same sweep parameters, lazy-regime init
    frl::ExperimentConfig lazy = fig1_config((dir / "lambda0").string());
    lazy.init.scale = 0.4;
    lazy.init.seed = 3;
    lazy.lambda_grid = {0.0};
    const frl::Trace trace = frl::run_cell(lazy, 0.0, 0);
    r.lambda0_gap_initial = trace.records.front().reg_gap;
    r.lambda0_gap_final = trace.records.back().reg_gap;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return cached;
}

Outcome criterion1_fig1() {
  Outcome out;
  const Fig1Results& r = fig1_results();

  for (std::size_t cell = 1; cell <= 4; ++cell) {  // lambda in {0.2, 0.4, 0.6, 0.8}
    const frl::CellSummary& s = r.sweep.cells[cell];
    out.require(s.status == "ok", "cell " + std::to_string(cell) + " diverged");
    out.require(s.final_reg_gap < 1e-6,
                "lambda=" + fmt(s.lambda) + ": |nuclear - half sum| = " + fmt(s.final_reg_gap));
    std::vector<double> expected;
    for (double v : kFig1Diag) expected.push_back(std::max(v - s.lambda, 0.0));
    std::sort(expected.rbegin(), expected.rend());
    double worst = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      worst = std::max(worst, std::abs(s.final_singular_values[i] - expected[i]));
    }
    out.require(worst < 1e-3, "lambda=" + fmt(s.lambda) + ": spectrum error " + fmt(worst));
  }

  const double ratio = r.lambda0_gap_final / r.lambda0_gap_initial;
  out.require(ratio >= 0.5, "lambda=0 gap retention " + fmt(ratio));
  out.require(r.seconds < 30.0, "runtime " + fmt(r.seconds) + " s exceeds 30 s");
  out.note("runtime " + fmt(r.seconds) + " s, lambda=0 retention " + fmt(ratio));
  return out;
}

Outcome criterion2_balance_rate() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  frl::CounterRng mask_rng(77);
  Matrix mask(5, 5);
  for (frl::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = mask_rng.uniform() < 0.7 ? 1.0 : 0.0;
  }

  frl::CounterRng rng(301);
  for (double lambda : {0.1, 0.4}) {
    for (double eta : {1e-3, 1e-2}) {
      for (bool masked : {false, true}) {
        const frl::LossPtr loss =
            masked ? frl::make_masked_completion(diag(kFig1Diag), mask)
                   : frl::make_matrix_regression(diag(kFig1Diag), 0.5);
        frl::OptimizerConfig cfg;
        cfg.step_size = eta;
        const auto folds = static_cast<long long>(std::ceil(4.0 / (2.0 * eta * lambda)));
        const long long steps = 50 + folds;
        Factorization f(rng.gaussian_matrix(5, 5, 0.1), rng.gaussian_matrix(5, 5, 0.1));
        const frl::Trace trace = frl::run_training(f, *loss, lambda, cfg, steps, 1);
        std::vector<double> balance;
        for (const frl::TraceRecord& rec : trace.records) {
          balance.push_back(rec.balance_gap_fro);
        }
        const double rate = frl::fit_exponential_rate(balance, {50, balance.size()});
        const double target = -std::log1p(-2.0 * eta * lambda);
        const double rel = std::abs(rate / target - 1.0);
        out.require(rel <= 0.05, "lambda=" + fmt(lambda) + " eta=" + fmt(eta) +
                                     (masked ? " masked" : " regression") +
                                     ": rate off by " + fmt(rel));
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < 60.0, "runtime " + fmt(secs) + " s exceeds 60 s");
  out.note("8 cells within 5%, runtime " + fmt(secs) + " s");
  return out;
}

Outcome criterion3_svt_equivalence() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();

  // the soft-threshold formula must survive the independent grid search
  // before it is used as ground truth
  struct Case {
    double d1, d2, lambda, scale;
  };
  for (const Case& c : {Case{1.0, 0.5, 0.6, 0.5}, Case{1.2, 0.3, 0.2, 0.5},
                        Case{0.9, 0.4, 0.35, 0.5}, Case{1.0, 0.2, 0.5, 0.25}}) {
    const auto [w1, w2] = ref::grid_search_diag_svt(c.d1, c.d2, c.lambda, c.scale);
    const Matrix got = frl::svt_minimizer(diag({c.d1, c.d2}), c.lambda, c.scale);
    out.require(std::abs(got(0, 0) - w1) <= 1e-3 && std::abs(got(1, 1) - w2) <= 1e-3,
                "grid search disagrees with the svt formula");
  }

  const std::vector<double> d_vals{0.05, 0.5, 0.8, 1.1};
  const Matrix d = diag(d_vals);
  const frl::LossPtr loss = frl::make_matrix_regression(d, 0.5);
  frl::OptimizerConfig cfg;
  cfg.step_size = 1e-2;

  frl::CounterRng rng(401);
  for (double lambda : {0.1, 0.3}) {
    const Matrix svt = frl::svt_minimizer(d, lambda, 0.5);
    const frl::SpectrumReport oracle = frl::spectrum_report(svt);
    const double oracle_value = loss->value(svt) + lambda * oracle.nuclear;
    for (int init = 0; init < 10; ++init) {
      Factorization f(rng.gaussian_matrix(4, 4, 0.1), rng.gaussian_matrix(4, 4, 0.1));
      const frl::Trace trace = frl::run_training(f, *loss, lambda, cfg, 20000, 20000);
      const std::vector<double>& got = trace.records.back().singular_values;
      double worst = 0.0;
      for (std::size_t i = 0; i < got.size(); ++i) {
        worst = std::max(worst, std::abs(got[i] - oracle.singular_values[i]));
      }
      out.require(worst < 1e-3, "lambda=" + fmt(lambda) + " init " + std::to_string(init) +
                                    ": spectrum error " + fmt(worst));
      out.require(trace.records.back().nuclear_value <= oracle_value + 1e-6,
                  "lambda=" + fmt(lambda) + " init " + std::to_string(init) +
                      ": nuclear objective above the oracle");
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < 120.0, "runtime " + fmt(secs) + " s exceeds 2 min");
  out.note("20 runs matched svt, runtime " + fmt(secs) + " s");
  return out;
}

Outcome criterion4_gap_bound() {
  Outcome out;
  frl::CounterRng rng(501);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = static_cast<frl::Index>(1 + rng.next_u64() % 10);
    const auto n = static_cast<frl::Index>(1 + rng.next_u64() % 10);
    const auto r = static_cast<frl::Index>(1 + rng.next_u64() % 10);
    const Factorization f(rng.gaussian_matrix(m, r, 1.0), rng.gaussian_matrix(n, r, 1.0));
    const frl::RegularizerGap g = frl::regularizer_gap_with_bound(f);
    if (!(g.gap <= g.bound * (1.0 + 1e-12))) ++violations;
  }
  out.require(violations == 0, std::to_string(violations) + " bound violations");

  for (int trial = 0; trial < 50; ++trial) {
    const Matrix w = rng.gaussian_matrix(6, 3, 1.0) * rng.gaussian_matrix(3, 5, 1.0);
    const Factorization f = frl::balanced_factors_from(w, 3);
    const Matrix na = rng.gaussian_matrix(f.a.rows(), f.a.cols(), 1.0);
    const Matrix nb = rng.gaussian_matrix(f.b.rows(), f.b.cols(), 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      const double gap =
          frl::regularizer_gap_with_bound(Factorization(f.a + delta * na, f.b + delta * nb)).gap;
      out.require(gap < prev, "gap not monotone at delta=" + fmt(delta));
      prev = gap;
    }
  }
  out.note("1000 pairs bounded, 50 perturbation ladders monotone");
  return out;
}

Outcome criterion5_deep_chain() {
  Outcome out;
  frl::CounterRng rng(601);

  Matrix target = Matrix::Zero(4, 4);
  target(0, 0) = 1.0;
  target(1, 1) = 0.6;
  target(2, 2) = 0.3;
  const frl::LossPtr loss = frl::make_matrix_regression(target, 0.5);
  for (double lambda : {0.1, 0.2}) {
    frl::OptimizerConfig cfg;
    cfg.step_size = 1e-2;
    const auto steps = static_cast<long long>(50 + std::ceil(4.0 / (2.0 * 1e-2 * lambda)));
    frl::DeepChain chain({rng.gaussian_matrix(4, 3, 0.3), rng.gaussian_matrix(3, 3, 0.3),
                          rng.gaussian_matrix(3, 4, 0.3)});
    const frl::Trace trace = frl::run_training(chain, *loss, lambda, cfg, steps, 1);
    std::vector<double> eps;
    for (const frl::TraceRecord& rec : trace.records) eps.push_back(rec.balance_gap_fro);
    const double rate = frl::fit_exponential_rate(eps, {50, eps.size()});
    const double target_rate = -std::log1p(-2.0 * 1e-2 * lambda);
    const double rel = std::abs(rate / target_rate - 1.0);
    out.require(rel <= 0.10, "lambda=" + fmt(lambda) + ": chain rate off by " + fmt(rel));
  }

  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix w = rng.gaussian_matrix(4, 3, 1.0) * rng.gaussian_matrix(3, 4, 1.0);
    w *= 3.0 / frl::nuclear_norm(w);
    frl::DeepChain chain = frl::balanced_chain_from(w, 3, 3);
    for (Matrix& layer : chain.layers) {
      layer += 1e-3 * rng.gaussian_matrix(layer.rows(), layer.cols(), 1.0);
    }
    const frl::ChainBalanceReport rep = frl::chain_balance_and_bound(chain);
    out.require(rep.side_condition_holds, "side condition failed on a near-balanced chain");
    if (rep.side_condition_holds) {
      ++checked;
      out.require(rep.bound_ok.value_or(false), "per-factor gap exceeded its bound");
    }
  }
  out.note(std::to_string(checked) + " near-balanced chains under the bound");
  return out;
}

Outcome criterion6_adamw_toy() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> u{1.0, 2.0};
  const double c = 0.25, lambda_wd = 0.1;
  const double uu = u[0] * u[0] + u[1] * u[1];
  const Eigen::Vector2d l2_point(c * u[0] / uu, c * u[1] / uu);
  const Eigen::Vector2d l1_point(0.0, c / u[1]);

  auto run_toy = [&](bool factorized, bool adamw, double eps) {
    frl::ExperimentConfig cfg;
    cfg.name = "toy";
    cfg.loss.kind = "affine_distance";
    cfg.loss.u = u;
    cfg.loss.c = c;
    cfg.model.kind = factorized ? "hadamard" : "direct";
    if (factorized) {
      cfg.model.dim = 2;
    } else {
      cfg.model.m = 2;
      cfg.model.n = 1;
    }
    cfg.init.distribution = "constant";
    cfg.init.scale = factorized ? 0.7 : 0.5;
    cfg.optimizer.kind = adamw ? frl::OptimizerKind::adamw : frl::OptimizerKind::adam;
    cfg.optimizer.step_size = 1e-3;
    cfg.optimizer.epsilon = eps;
    cfg.lambda_grid = {adamw ? lambda_wd : frl::adamw_l2_equivalent(lambda_wd, eps)};
    cfg.steps = 200000;
    cfg.record_every = 200000;
    cfg.output_dir = "unused";
    const frl::Trace trace = frl::run_cell(cfg, cfg.lambda_grid[0], 0);
    Eigen::Vector2d w;
    if (factorized) {
      const Matrix prod = trace.final_params[0].cwiseProduct(trace.final_params[1]);
      w << prod(0, 0), prod(1, 0);
    } else {
      w << trace.final_params[0](0, 0), trace.final_params[0](1, 0);
    }
    return w;
  };

  for (double eps : {1e-2, 1e-4}) {
    for (bool factorized : {false, true}) {
      const Eigen::Vector2d w_adamw = run_toy(factorized, true, eps);
      const Eigen::Vector2d w_adam_l2 = run_toy(factorized, false, eps);
      const double dist = (w_adamw - w_adam_l2).norm();
      out.require(dist <= 1e-3, std::string(factorized ? "factorized" : "direct") +
                                    " eps=" + fmt(eps) + ": optimizer endpoints " + fmt(dist) +
                                    " apart");
      // the closest-point identification is a vanishing-regularization
      // statement; it is asserted on the small-eps endpoints, where
      // lambda_l2 = eps lambda_wd no longer displaces the minimizer
      if (eps == 1e-4) {
        const Eigen::Vector2d target_point = factorized ? l1_point : l2_point;
        out.require((w_adamw - target_point).norm() <= 1e-3,
                    std::string(factorized ? "factorized vs l1" : "direct vs l2") +
                        " adamw endpoint off by " + fmt((w_adamw - target_point).norm()));
        out.require((w_adam_l2 - target_point).norm() <= 1e-3,
                    std::string(factorized ? "factorized vs l1" : "direct vs l2") +
                        " adam+l2 endpoint off by " + fmt((w_adam_l2 - target_point).norm()));
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < 30.0, "runtime " + fmt(secs) + " s exceeds 30 s");
  out.note("runtime " + fmt(secs) + " s");
  return out;
}

Outcome criterion7_pseudo_rank_monotone() {
  Outcome out;
  const Fig1Results& r = fig1_results();
  double prev = std::numeric_limits<double>::infinity();
  for (const frl::CellSummary& cell : r.sweep.cells) {
    out.require(cell.final_pseudo_rank <= prev + 1e-12,
                "pseudo-rank increased at lambda=" + fmt(cell.lambda));
    prev = cell.final_pseudo_rank;
  }
  const frl::CellSummary& top = r.sweep.cells.back();  // lambda = 5 > max s_i
  out.require(top.final_pseudo_rank == 0.0,
              "pseudo-rank at lambda>max s is " + fmt(top.final_pseudo_rank));
  std::string ranks;
  for (const frl::CellSummary& cell : r.sweep.cells) ranks += fmt(cell.final_pseudo_rank) + " ";
  out.note("ranks across the grid: " + ranks);
  return out;
}

struct SyntheticHead {
  Matrix wq, wk, wv, p;
};

SyntheticHead make_head(frl::CounterRng& rng, frl::Index dm, frl::Index dk, bool balanced) {
  SyntheticHead h;
  if (balanced) {
    const Matrix tq = rng.gaussian_matrix(dm, dk, 1.0) * rng.gaussian_matrix(dk, dm, 1.0) /
                      static_cast<double>(dm);
    const Factorization qk = frl::balanced_factors_from(tq, dk);
    const Matrix tv = rng.gaussian_matrix(dm, dk, 1.0) * rng.gaussian_matrix(dk, dm, 1.0) /
                      static_cast<double>(dm);
    const Factorization vp = frl::balanced_factors_from(tv, dk);
    h.wk = qk.a.transpose();
    h.wq = qk.b.transpose();
    h.p = vp.a;
    h.wv = vp.b.transpose();
  } else {
    h.wq = rng.gaussian_matrix(dk, dm, 1.0);
    h.wk = rng.gaussian_matrix(dk, dm, 1.0);
    h.wv = rng.gaussian_matrix(dk, dm, 1.0);
    h.p = rng.gaussian_matrix(dm, dk, 1.0);
  }
  return h;
}

void write_archive(const std::string& path, frl::CounterRng& rng, frl::Index dm, frl::Index dk,
                   int layers, int heads, bool balanced) {
  std::vector<std::pair<std::string, Matrix>> tensors;
  for (int layer = 0; layer < layers; ++layer) {
    Matrix q(heads * dk, dm), k(heads * dk, dm), v(heads * dk, dm), o(dm, heads * dk);
    for (int head = 0; head < heads; ++head) {
      const SyntheticHead h = make_head(rng, dm, dk, balanced);
      q.middleRows(head * dk, dk) = h.wq;
      k.middleRows(head * dk, dk) = h.wk;
      v.middleRows(head * dk, dk) = h.wv;
      o.middleCols(head * dk, dk) = h.p;
    }
    const std::string base = "layers." + std::to_string(layer) + ".attn.";
    tensors.emplace_back(base + "q", q);
    tensors.emplace_back(base + "k", k);
    tensors.emplace_back(base + "v", v);
    tensors.emplace_back(base + "o", o);
  }
  frl::write_tensor_archive(path, tensors, "F64");
}

frl::AttentionLayout archive_layout(frl::Index dm, frl::Index dk, int heads, int layers) {
  frl::AttentionLayout l;
  l.q_template = "layers.{layer}.attn.q";
  l.k_template = "layers.{layer}.attn.k";
  l.v_template = "layers.{layer}.attn.v";
  l.o_template = "layers.{layer}.attn.o";
  l.d_model = dm;
  l.d_head = dk;
  l.num_heads = heads;
  l.num_layers = layers;
  return l;
}

// Parses every row of a CSV file; throws on ragged or non-numeric fields.
void check_csv_parses(const std::string& path, Outcome& out) {
  std::istringstream in(frl::read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    out.require(false, path + " is empty");
    return;
  }
  const std::size_t columns = frl::split_csv_line(line).size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = frl::split_csv_line(line);
    out.require(fields.size() == columns, "ragged row in " + path);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == 2 && path.find("norms.csv") != std::string::npos) continue;  // product tag
      try {
        frl::parse_double(fields[i]);
      } catch (const std::exception&) {
        out.require(false, "non-numeric field in " + path);
      }
    }
  }
}

Outcome criterion8_checkpoint_analyzer() {
  Outcome out;
  const fs::path dir = work_dir("ckpt");
  frl::CounterRng rng(801);
  const frl::Index dm = 12, dk = 3;

  const std::string balanced_path = (dir / "balanced.safetensors").string();
  write_archive(balanced_path, rng, dm, dk, 2, 2, true);
  const frl::AnalyzeResult balanced =
      frl::analyze_checkpoint(frl::TensorArchive::load(balanced_path),
                              archive_layout(dm, dk, 2, 2), 0.95, (dir / "balanced").string());
  out.require(balanced.head_count == 4, "expected 4 balanced heads");

  {
    std::istringstream in(frl::read_text_file(balanced.files[0]));
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++rows;
      const auto f = frl::split_csv_line(line);
      const double gap_qk = std::abs(frl::parse_double(f[4]) - frl::parse_double(f[5]));
      const double gap_vp = std::abs(frl::parse_double(f[6]) - frl::parse_double(f[7]));
      out.require(gap_qk < 1e-9 && gap_vp < 1e-9, "balanced head gap above 1e-9");
      out.require(frl::parse_double(f[8]) < 1e-9 && frl::parse_double(f[9]) < 1e-9,
                  "balanced row norms off the diagonal");
    }
    out.require(rows == 4, "heads.csv row count");
  }

  const std::string random_path = (dir / "random.safetensors").string();
  write_archive(random_path, rng, 16, 4, 2, 2, false);
  const frl::AnalyzeResult random_result =
      frl::analyze_checkpoint(frl::TensorArchive::load(random_path),
                              archive_layout(16, 4, 2, 2), 0.95, (dir / "random").string());
  {
    std::vector<double> rel;
    std::istringstream in(frl::read_text_file(random_result.files[0]));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = frl::split_csv_line(line);
      rel.push_back(std::abs(frl::parse_double(f[4]) - frl::parse_double(f[5])) /
                    frl::parse_double(f[5]));
      rel.push_back(std::abs(frl::parse_double(f[6]) - frl::parse_double(f[7])) /
                    frl::parse_double(f[7]));
    }
    std::sort(rel.begin(), rel.end());
    const double median = rel[rel.size() / 2];
    out.require(median > 0.05, "random-weights median relative gap " + fmt(median));
    out.note("random median relative gap " + fmt(median));
  }

  for (const frl::AnalyzeResult* result : {&balanced, &random_result}) {
    for (const std::string& file : result->files) check_csv_parses(file, out);
  }
  return out;
}

Outcome criterion9_gradient_checks() {
  Outcome out;
  frl::CounterRng rng(901);

  Matrix mask(4, 3);
  for (frl::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < 0.6 ? 1.0 : 0.0;
  Matrix base = rng.gaussian_matrix(3, 3, 1.0);
  const Matrix sigma_xx = base * base.transpose() + Matrix::Identity(3, 3);

  struct Named {
    const char* name;
    frl::LossPtr loss;
    frl::Index rows, cols;
  };
  const Named losses[] = {
      {"regression", frl::make_matrix_regression(rng.gaussian_matrix(4, 3, 1.0), 0.5), 4, 3},
      {"whitened", frl::make_whitened_regression(rng.gaussian_matrix(3, 3, 1.0), sigma_xx), 3, 3},
      {"masked", frl::make_masked_completion(rng.gaussian_matrix(4, 3, 1.0), mask), 4, 3},
      {"affine", frl::make_affine_distance({1.0, 2.0}, 1.0), 2, 1},
  };
  for (const Named& item : losses) {
    for (int probe = 0; probe < 20; ++probe) {
      Matrix w = rng.gaussian_matrix(item.rows, item.cols, 1.0);
      w *= (0.1 * std::pow(100.0, probe / 19.0)) / w.norm();
      const Matrix analytic = item.loss->gradient(w);
      const Matrix numeric = ref::central_difference_gradient(
          [&](const Matrix& x) { return item.loss->value(x); }, w, 1e-6);
      const double rel = (analytic - numeric).norm() / (1e-12 + numeric.norm());
      out.require(rel < 1e-5, std::string(item.name) + " probe " + std::to_string(probe) +
                                  ": relative error " + fmt(rel));
    }
  }

  const frl::LossPtr loss = frl::make_matrix_regression(rng.gaussian_matrix(4, 3, 1.0), 0.5);
  for (int probe = 0; probe < 20; ++probe) {
    const double lambda = 0.25;
    const Matrix a0 = rng.gaussian_matrix(4, 2, 0.5 + rng.uniform());
    const Matrix b0 = rng.gaussian_matrix(3, 2, 0.5 + rng.uniform());
    const frl::FactorGradients g = frl::factor_gradients(Factorization(a0, b0), *loss, lambda);
    const Matrix na = ref::central_difference_gradient(
        [&](const Matrix& a) {
          return frl::evaluate_both_losses(Factorization(a, b0), *loss, lambda).l2_value;
        },
        a0, 1e-6);
    const Matrix nb = ref::central_difference_gradient(
        [&](const Matrix& b) {
          return frl::evaluate_both_losses(Factorization(a0, b), *loss, lambda).l2_value;
        },
        b0, 1e-6);
    out.require((g.grad_a - na).norm() / na.norm() < 1e-5, "factor grad_a mismatch");
    out.require((g.grad_b - nb).norm() / nb.norm() < 1e-5, "factor grad_b mismatch");
  }
  out.note("4 losses + factor gradients, 20 probes each");
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli_path + "\" " + args;
  return std::system(cmd.c_str());
}

Outcome criterion10_cli_determinism() {
  Outcome out;
  if (g_cli_path.empty()) {
    out.require(false, "no CLI path given (pass the frl binary as argv[1])");
    return out;
  }
  const fs::path dir = work_dir("cli");

  // run: a sweep with seeded noise, twice
  frl::ExperimentConfig cfg = fig1_config((dir / "run1").string());
  cfg.steps = 500;
  cfg.record_every = 10;
  cfg.lambda_grid = {0.0, 0.4};
  cfg.optimizer.kind = frl::OptimizerKind::momentum_wd;
  cfg.optimizer.momentum = 0.4;
  cfg.optimizer.noise_sigma = 0.02;
  cfg.optimizer.seed = 17;
  frl::write_text_file((dir / "cfg1.json").string(), frl::experiment_config_to_json(cfg));
  cfg.output_dir = (dir / "run2").string();
  frl::write_text_file((dir / "cfg2.json").string(), frl::experiment_config_to_json(cfg));
  out.require(run_cli("run \"" + (dir / "cfg1.json").string() + "\" > /dev/null") == 0,
              "frl run (1) failed");
  out.require(run_cli("run \"" + (dir / "cfg2.json").string() + "\" > /dev/null") == 0,
              "frl run (2) failed");
  for (const char* name : {"trace_0.csv", "trace_1.csv", "summary.csv"}) {
    out.require(frl::read_text_file((dir / "run1" / name).string()) ==
                    frl::read_text_file((dir / "run2" / name).string()),
                std::string(name) + " differs between reruns");
  }

  // spectrum: identical stdout
  frl::CounterRng rng(1001);
  frl::write_matrix_csv(rng.gaussian_matrix(5, 4, 1.0), (dir / "m.csv").string());
  out.require(run_cli("spectrum \"" + (dir / "m.csv").string() + "\" > \"" +
                      (dir / "s1.json").string() + "\"") == 0,
              "frl spectrum (1) failed");
  out.require(run_cli("spectrum \"" + (dir / "m.csv").string() + "\" --threshold 0.95 > \"" +
                      (dir / "s2.json").string() + "\"") == 0,
              "frl spectrum (2) failed");
  out.require(frl::read_text_file((dir / "s1.json").string()) ==
                  frl::read_text_file((dir / "s2.json").string()),
              "spectrum output differs");

  // plot: identical SVG
  const std::string trace = (dir / "run1" / "trace_1.csv").string();
  out.require(run_cli("plot \"" + trace + "\" --y balance_gap_fro --log --out \"" +
                      (dir / "p1.svg").string() + "\" > /dev/null") == 0,
              "frl plot (1) failed");
  out.require(run_cli("plot \"" + trace + "\" --y balance_gap_fro --log --out \"" +
                      (dir / "p2.svg").string() + "\" > /dev/null") == 0,
              "frl plot (2) failed");
  out.require(frl::read_text_file((dir / "p1.svg").string()) ==
                  frl::read_text_file((dir / "p2.svg").string()),
              "plot output differs");

  // analyze: identical CSVs
  frl::CounterRng arng(1003);
  const std::string archive = (dir / "a.safetensors").string();
  write_archive(archive, arng, 8, 2, 1, 2, false);
  frl::write_text_file((dir / "layout.json").string(),
                       archive_layout(8, 2, 2, 1).to_json_text());
  for (int i = 1; i <= 2; ++i) {
    out.require(run_cli("analyze \"" + archive + "\" --layout \"" +
                        (dir / "layout.json").string() + "\" --out \"" +
                        (dir / ("an" + std::to_string(i))).string() + "\" > /dev/null") == 0,
                "frl analyze failed");
  }
  for (const char* name : {"heads.csv", "scatter_qk.csv", "scatter_vp.csv", "norms.csv"}) {
    out.require(frl::read_text_file((dir / "an1" / name).string()) ==
                    frl::read_text_file((dir / "an2" / name).string()),
                std::string(name) + " differs between analyze reruns");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli_path = argv[1];

  struct Entry {
    int number;
    const char* label;
    std::function<Outcome()> fn;
  };
  const std::vector<Entry> criteria = {
      {1, "fig-1 reproduction (gap closure, soft-threshold spectra, lambda=0 retention)",
       criterion1_fig1},
      {2, "balance-decay rate within 5% of -ln(1 - 2 eta lambda)", criterion2_balance_rate},
      {3, "gd on the factorized loss matches the svt oracle", criterion3_svt_equivalence},
      {4, "nuclear-vs-frobenius gap bounded by the balance norm", criterion4_gap_bound},
      {5, "deep-chain balance decay and schatten gap bounds", criterion5_deep_chain},
      {6, "adamw endpoints match adam+l2 and the l1/l2-closest points", criterion6_adamw_toy},
      {7, "final pseudo-rank non-increasing in lambda, zero past max s",
       criterion7_pseudo_rank_monotone},
      {8, "checkpoint analyzer on balanced and random archives", criterion8_checkpoint_analyzer},
      {9, "closed-form gradients match central finite differences", criterion9_gradient_checks},
      {10, "byte-identical CLI outputs across reruns", criterion10_cli_determinism},
  };

  int failures = 0;
  for (const Entry& entry : criteria) {
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.details = std::string("exception: ") + e.what();
    }
    if (!outcome.ok) ++failures;
    std::printf("criterion %2d [%s]: %s%s%s\n", entry.number, outcome.ok ? "PASS" : "FAIL",
                entry.label, outcome.details.empty() ? "" : " -- ",
                outcome.details.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
