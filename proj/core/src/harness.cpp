#include "frl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "frl/csv.hpp"
#include "frl/rng.hpp"
#include "frl/spectra.hpp"

namespace frl {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError("config field '" + field + "': expected a nested array matrix");
  }
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError("config field '" + field + "': ragged matrix rows");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) {
        throw ConfigError("config field '" + field + "': non-numeric entry");
      }
      m(static_cast<Index>(i), static_cast<Index>(k)) = j[i][k].get<double>();
    }
  }
  return m;
}

const json& require_field(const json& j, const std::string& name, const std::string& ctx) {
  auto it = j.find(name);
  if (it == j.end()) throw ConfigError("config field '" + ctx + name + "' is missing");
  return *it;
}

double number_field(const json& j, const std::string& name, const std::string& ctx) {
  const json& v = require_field(j, name, ctx);
  if (!v.is_number()) throw ConfigError("config field '" + ctx + name + "' must be a number");
  return v.get<double>();
}

std::string string_field(const json& j, const std::string& name, const std::string& ctx) {
  const json& v = require_field(j, name, ctx);
  if (!v.is_string()) throw ConfigError("config field '" + ctx + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

LossPtr LossSpec::build() const {
  if (kind == "regression") return make_matrix_regression(d, scale);
  if (kind == "whitened_regression") return make_whitened_regression(sigma_yx, sigma_xx);
  if (kind == "masked_completion") return make_masked_completion(d, mask);
  if (kind == "affine_distance") return make_affine_distance(u, c);
  throw ConfigError("config field 'loss.kind': unknown kind '" + kind + "'");
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("config field 'name' must be non-empty");
  if (lambda_grid.empty()) throw ConfigError("config field 'lambda_grid' must be non-empty");
  for (double l : lambda_grid) {
    if (!(l >= 0.0)) throw ConfigError("config field 'lambda_grid' entries must be >= 0");
  }
  if (steps < 0) throw ConfigError("config field 'steps' must be >= 0");
  if (record_every < 1) throw ConfigError("config field 'record_every' must be >= 1");
  if (!(optimizer.step_size > 0.0)) {
    throw ConfigError("config field 'optimizer.step_size' must be > 0");
  }
  if (init.distribution != "gaussian" && init.distribution != "constant") {
    throw ConfigError("config field 'init.distribution' must be gaussian or constant");
  }

  if (model.kind == "factor_pair") {
    if (model.m < 1 || model.n < 1 || model.r < 1) {
      throw ConfigError("config field 'model': m, n, r must be positive");
    }
  } else if (model.kind == "chain") {
    if (model.dims.size() < 3) {
      throw ConfigError("config field 'model.dims' needs at least 3 entries (2 layers)");
    }
    for (Index d : model.dims) {
      if (d < 1) throw ConfigError("config field 'model.dims' entries must be positive");
    }
  } else if (model.kind == "direct") {
    if (model.m < 1 || model.n < 1) {
      throw ConfigError("config field 'model': m, n must be positive");
    }
  } else if (model.kind == "hadamard") {
    if (model.dim < 1) throw ConfigError("config field 'model.dim' must be positive");
  } else {
    throw ConfigError("config field 'model.kind': unknown kind '" + model.kind + "'");
  }

  loss.build();  // validates loss parameters
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig c;
  c.name = string_field(j, "name", "");

  const json& jl = require_field(j, "loss", "");
  c.loss.kind = string_field(jl, "kind", "loss.");
  if (c.loss.kind == "regression") {
    c.loss.d = matrix_from_json(require_field(jl, "d", "loss."), "loss.d");
    c.loss.scale = number_field(jl, "scale", "loss.");
  } else if (c.loss.kind == "masked_completion") {
    c.loss.d = matrix_from_json(require_field(jl, "d", "loss."), "loss.d");
    c.loss.mask = matrix_from_json(require_field(jl, "mask", "loss."), "loss.mask");
  } else if (c.loss.kind == "whitened_regression") {
    c.loss.sigma_yx = matrix_from_json(require_field(jl, "sigma_yx", "loss."), "loss.sigma_yx");
    c.loss.sigma_xx = matrix_from_json(require_field(jl, "sigma_xx", "loss."), "loss.sigma_xx");
  } else if (c.loss.kind == "affine_distance") {
    const json& ju = require_field(jl, "u", "loss.");
    if (!ju.is_array()) throw ConfigError("config field 'loss.u' must be an array");
    for (const json& x : ju) {
      if (!x.is_number()) throw ConfigError("config field 'loss.u' must be numeric");
      c.loss.u.push_back(x.get<double>());
    }
    c.loss.c = number_field(jl, "c", "loss.");
  }

  const json& jm = require_field(j, "model", "");
  c.model.kind = string_field(jm, "kind", "model.");
  if (c.model.kind == "factor_pair" || c.model.kind == "direct") {
    c.model.m = static_cast<Index>(number_field(jm, "m", "model."));
    c.model.n = static_cast<Index>(number_field(jm, "n", "model."));
    if (c.model.kind == "factor_pair") {
      c.model.r = static_cast<Index>(number_field(jm, "r", "model."));
    }
  } else if (c.model.kind == "chain") {
    const json& jd = require_field(jm, "dims", "model.");
    if (!jd.is_array()) throw ConfigError("config field 'model.dims' must be an array");
    for (const json& x : jd) c.model.dims.push_back(static_cast<Index>(x.get<double>()));
  } else if (c.model.kind == "hadamard") {
    c.model.dim = static_cast<Index>(number_field(jm, "dim", "model."));
  }

  const json& ji = require_field(j, "init", "");
  c.init.distribution = string_field(ji, "distribution", "init.");
  c.init.scale = number_field(ji, "scale", "init.");
  c.init.seed = require_field(ji, "seed", "init.").get<std::uint64_t>();

  const json& jo = require_field(j, "optimizer", "");
  c.optimizer.kind = optimizer_kind_from_string(string_field(jo, "kind", "optimizer."));
  c.optimizer.step_size = number_field(jo, "step_size", "optimizer.");
  if (jo.contains("weight_decay")) c.optimizer.weight_decay = jo["weight_decay"].get<double>();
  if (jo.contains("momentum")) c.optimizer.momentum = jo["momentum"].get<double>();
  if (jo.contains("beta1")) c.optimizer.beta1 = jo["beta1"].get<double>();
  if (jo.contains("beta2")) c.optimizer.beta2 = jo["beta2"].get<double>();
  if (jo.contains("epsilon")) c.optimizer.epsilon = jo["epsilon"].get<double>();
  if (jo.contains("noise_sigma")) c.optimizer.noise_sigma = jo["noise_sigma"].get<double>();
  if (jo.contains("grad_clip") && !jo["grad_clip"].is_null()) {
    c.optimizer.grad_clip = jo["grad_clip"].get<double>();
  }
  if (jo.contains("seed")) c.optimizer.seed = jo["seed"].get<std::uint64_t>();

  const json& jg = require_field(j, "lambda_grid", "");
  if (!jg.is_array()) throw ConfigError("config field 'lambda_grid' must be an array");
  for (const json& x : jg) c.lambda_grid.push_back(x.get<double>());

  c.steps = static_cast<long long>(number_field(j, "steps", ""));
  c.record_every = static_cast<long long>(number_field(j, "record_every", ""));
  c.output_dir = string_field(j, "output_dir", "");
  if (j.contains("rate_window")) {
    const json& jw = j["rate_window"];
    if (!jw.is_array() || jw.size() != 2) {
      throw ConfigError("config field 'rate_window' must be [lo, hi]");
    }
    c.rate_window.lo = jw[0].get<std::size_t>();
    c.rate_window.hi = jw[1].get<std::size_t>();
  }

  c.validate();
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;

  json jl;
  jl["kind"] = c.loss.kind;
  if (c.loss.kind == "regression") {
    jl["d"] = matrix_to_json(c.loss.d);
    jl["scale"] = c.loss.scale;
  } else if (c.loss.kind == "masked_completion") {
    jl["d"] = matrix_to_json(c.loss.d);
    jl["mask"] = matrix_to_json(c.loss.mask);
  } else if (c.loss.kind == "whitened_regression") {
    jl["sigma_yx"] = matrix_to_json(c.loss.sigma_yx);
    jl["sigma_xx"] = matrix_to_json(c.loss.sigma_xx);
  } else if (c.loss.kind == "affine_distance") {
    jl["u"] = c.loss.u;
    jl["c"] = c.loss.c;
  }
  j["loss"] = std::move(jl);

  json jm;
  jm["kind"] = c.model.kind;
  if (c.model.kind == "factor_pair") {
    jm["m"] = c.model.m;
    jm["n"] = c.model.n;
    jm["r"] = c.model.r;
  } else if (c.model.kind == "direct") {
    jm["m"] = c.model.m;
    jm["n"] = c.model.n;
  } else if (c.model.kind == "chain") {
    jm["dims"] = c.model.dims;
  } else if (c.model.kind == "hadamard") {
    jm["dim"] = c.model.dim;
  }
  j["model"] = std::move(jm);

  j["init"] = {{"distribution", c.init.distribution},
               {"scale", c.init.scale},
               {"seed", c.init.seed}};

  json jo;
  jo["kind"] = to_string(c.optimizer.kind);
  jo["step_size"] = c.optimizer.step_size;
  jo["weight_decay"] = c.optimizer.weight_decay;
  jo["momentum"] = c.optimizer.momentum;
  jo["beta1"] = c.optimizer.beta1;
  jo["beta2"] = c.optimizer.beta2;
  jo["epsilon"] = c.optimizer.epsilon;
  jo["noise_sigma"] = c.optimizer.noise_sigma;
  if (c.optimizer.grad_clip) {
    jo["grad_clip"] = *c.optimizer.grad_clip;
  } else {
    jo["grad_clip"] = nullptr;
  }
  jo["seed"] = c.optimizer.seed;
  j["optimizer"] = std::move(jo);

  j["lambda_grid"] = c.lambda_grid;
  j["steps"] = c.steps;
  j["record_every"] = c.record_every;
  j["output_dir"] = c.output_dir;
  j["rate_window"] = {c.rate_window.lo, c.rate_window.hi};
  return j.dump(2);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_text_file(path));
}

namespace {

Matrix init_matrix(const InitSpec& init, Index rows, Index cols, CounterRng& rng) {
  if (init.distribution == "constant") {
    return Matrix::Constant(rows, cols, init.scale);
  }
  return rng.gaussian_matrix(rows, cols, init.scale);
}

std::vector<double> abs_sorted_desc(const Matrix& column) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(column.size()));
  for (Index i = 0; i < column.size(); ++i) v.push_back(std::abs(column.data()[i]));
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

// Training loop for the unfactorized and hadamard toy models. Mirrors
// run_training's recording grid and divergence contract.
template <typename RecordFn, typename GradFn>
Trace run_flat(std::vector<Matrix> params, double lambda, const OptimizerConfig& config,
               long long steps, long long record_every, RecordFn&& record, GradFn&& grad) {
  const bool decoupled =
      config.kind == OptimizerKind::momentum_wd || config.kind == OptimizerKind::adamw;
  OptimizerConfig effective = config;
  effective.weight_decay = decoupled ? lambda : 0.0;
  const double grad_lambda = decoupled ? 0.0 : lambda;

  OptimizerState state = OptimizerState::for_params(params, effective);
  Trace trace;
  trace.config = config;
  trace.lambda = lambda;
  trace.records.push_back(record(0, params));

  for (long long k = 1; k <= steps; ++k) {
    try {
      std::vector<Matrix> grads = grad(params, grad_lambda);
      switch (effective.kind) {
        case OptimizerKind::gd:
          gd_step(params, grads, effective);
          break;
        case OptimizerKind::momentum_wd:
          momentum_wd_step(params, grads, state, effective);
          break;
        case OptimizerKind::adam:
        case OptimizerKind::adamw:
          adamw_step(params, grads, state, effective);
          break;
      }
    } catch (const std::runtime_error&) {
      trace.diverged = true;
      trace.steps_run = k - 1;
      trace.final_params = params;
      throw DivergedError("diverged", trace);
    }
    bool finite = true;
    for (const Matrix& p : params) finite = finite && p.allFinite();
    if (!finite) {
      trace.diverged = true;
      trace.steps_run = k;
      trace.final_params = params;
      throw DivergedError("diverged", trace);
    }
    if (k % record_every == 0 || k == steps) {
      try {
        trace.records.push_back(record(k, params));
      } catch (const std::invalid_argument&) {
        trace.diverged = true;
        trace.steps_run = k;
        trace.final_params = params;
        throw DivergedError("diverged", trace);
      }
    }
  }
  trace.steps_run = steps;
  trace.final_params = std::move(params);
  return trace;
}

}  // namespace

Trace run_cell(const ExperimentConfig& config, double lambda, std::size_t cell_index) {
  const LossPtr loss = config.loss.build();
  CounterRng init_rng(config.init.seed + cell_index);
  OptimizerConfig opt = config.optimizer;
  opt.seed = config.optimizer.seed + cell_index;

  if (config.model.kind == "factor_pair") {
    Factorization f(init_matrix(config.init, config.model.m, config.model.r, init_rng),
                    init_matrix(config.init, config.model.n, config.model.r, init_rng));
    return run_training(std::move(f), *loss, lambda, opt, config.steps, config.record_every);
  }

  if (config.model.kind == "chain") {
    std::vector<Matrix> layers;
    for (std::size_t l = 0; l + 1 < config.model.dims.size(); ++l) {
      layers.push_back(
          init_matrix(config.init, config.model.dims[l], config.model.dims[l + 1], init_rng));
    }
    return run_training(DeepChain(std::move(layers)), *loss, lambda, opt, config.steps,
                        config.record_every);
  }

  if (config.model.kind == "direct") {
    std::vector<Matrix> params{init_matrix(config.init, config.model.m, config.model.n, init_rng)};
    auto record = [&](long long step, const std::vector<Matrix>& p) {
      TraceRecord rec;
      rec.step = step;
      rec.loss_value = loss->value(p[0]);
      const SpectrumReport rep = spectrum_report(p[0], 0.95);
      // No factorization: the decoupled objective is the only one defined,
      // so the nuclear column mirrors it and the gap columns stay zero.
      rec.l2_value = rec.loss_value + 0.5 * lambda * p[0].squaredNorm();
      rec.nuclear_value = rec.l2_value;
      rec.balance_gap_fro = 0.0;
      rec.reg_gap = 0.0;
      rec.pseudo_rank = rep.pseudo_rank;
      rec.singular_values = rep.singular_values;
      return rec;
    };
    auto grad = [&](const std::vector<Matrix>& p, double gl) {
      return std::vector<Matrix>{loss->gradient(p[0]) + gl * p[0]};
    };
    return run_flat(std::move(params), lambda, opt, config.steps, config.record_every, record,
                    grad);
  }

  if (config.model.kind == "hadamard") {
    std::vector<Matrix> params{init_matrix(config.init, config.model.dim, 1, init_rng),
                               init_matrix(config.init, config.model.dim, 1, init_rng)};
    auto record = [&](long long step, const std::vector<Matrix>& p) {
      TraceRecord rec;
      rec.step = step;
      const Matrix w = p[0].cwiseProduct(p[1]);
      rec.loss_value = loss->value(w);
      const double half_sum = 0.5 * (p[0].squaredNorm() + p[1].squaredNorm());
      const double l1 = w.cwiseAbs().sum();  // nuclear norm of per-entry scalars
      rec.l2_value = rec.loss_value + lambda * half_sum;
      rec.nuclear_value = rec.loss_value + lambda * l1;
      rec.balance_gap_fro = (p[0].cwiseProduct(p[0]) - p[1].cwiseProduct(p[1])).norm();
      rec.reg_gap = std::abs(half_sum - l1);
      rec.singular_values = abs_sorted_desc(w);
      rec.pseudo_rank = pseudo_rank(rec.singular_values, 0.95);
      return rec;
    };
    auto grad = [&](const std::vector<Matrix>& p, double gl) {
      const Matrix gw = loss->gradient(p[0].cwiseProduct(p[1]));
      return std::vector<Matrix>{gw.cwiseProduct(p[1]) + gl * p[0],
                                 gw.cwiseProduct(p[0]) + gl * p[1]};
    };
    return run_flat(std::move(params), lambda, opt, config.steps, config.record_every, record,
                    grad);
  }

  throw ConfigError("config field 'model.kind': unknown kind '" + config.model.kind + "'");
}

namespace {

// Per-step decay rate fitted on the balance column over the configured step
// window; nan when the window has fewer than 3 usable records.
double fit_balance_rate(const Trace& trace, long long record_every, IndexWindow window) {
  std::vector<double> series;
  for (const TraceRecord& rec : trace.records) {
    if (rec.step % record_every != 0) continue;  // skip the off-grid final record
    const auto step = static_cast<std::size_t>(rec.step);
    if (step >= window.lo && step < window.hi) series.push_back(rec.balance_gap_fro);
  }
  if (series.size() < 3) return kNan;
  try {
    return fit_exponential_rate(series, {0, series.size()}) /
           static_cast<double>(record_every);
  } catch (const std::invalid_argument&) {
    return kNan;
  }
}

bool is_diagonal(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

std::string summary_csv(const std::vector<CellSummary>& cells, const ExperimentConfig& config) {
  std::size_t k = 0;
  for (const CellSummary& c : cells) k = std::max(k, c.final_singular_values.size());

  std::ostringstream out;
  out << "cell,lambda,status,final_step,final_loss,final_l2,final_nuclear,final_reg_gap,"
         "final_balance,final_pseudo_rank,fitted_rate,theory_rate,oracle_max_err,"
         "init_distribution,init_scale,init_seed,optimizer,step_size,rate_window_lo,"
         "rate_window_hi";
  for (std::size_t i = 0; i < k; ++i) out << ",s" << (i + 1);
  out << '\n';
  for (const CellSummary& c : cells) {
    out << c.cell << ',' << format_double(c.lambda) << ',' << c.status << ',' << c.final_step
        << ',' << format_double(c.final_loss) << ',' << format_double(c.final_l2) << ','
        << format_double(c.final_nuclear) << ',' << format_double(c.final_reg_gap) << ','
        << format_double(c.final_balance) << ',' << format_double(c.final_pseudo_rank) << ','
        << format_double(c.fitted_rate) << ',' << format_double(c.theory_rate) << ','
        << format_double(c.oracle_max_err) << ',' << config.init.distribution << ','
        << format_double(config.init.scale) << ',' << config.init.seed << ','
        << to_string(config.optimizer.kind) << ',' << format_double(config.optimizer.step_size)
        << ',' << config.rate_window.lo << ',' << config.rate_window.hi;
    for (std::size_t i = 0; i < k; ++i) {
      out << ',';
      if (i < c.final_singular_values.size()) out << format_double(c.final_singular_values[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);

  ExperimentResult result;
  for (std::size_t cell = 0; cell < config.lambda_grid.size(); ++cell) {
    const double lambda = config.lambda_grid[cell];
    Trace trace;
    CellSummary summary;
    summary.cell = cell;
    summary.lambda = lambda;
    try {
      trace = run_cell(config, lambda, cell);
      summary.status = "ok";
    } catch (const DivergedError& e) {
      trace = e.partial;
      summary.status = "diverged";
      result.any_diverged = true;
    }

    const std::string trace_path =
        (std::filesystem::path(config.output_dir) / ("trace_" + std::to_string(cell) + ".csv"))
            .string();
    emit_trace(trace, trace_path);
    result.trace_paths.push_back(trace_path);

    if (!trace.records.empty()) {
      const TraceRecord& last = trace.records.back();
      summary.final_step = last.step;
      summary.final_loss = last.loss_value;
      summary.final_l2 = last.l2_value;
      summary.final_nuclear = last.nuclear_value;
      summary.final_reg_gap = last.reg_gap;
      summary.final_balance = last.balance_gap_fro;
      summary.final_pseudo_rank = last.pseudo_rank;
      summary.final_singular_values = last.singular_values;
    }
    summary.fitted_rate = fit_balance_rate(trace, config.record_every, config.rate_window);
    const double decay = 2.0 * config.optimizer.step_size * lambda;
    summary.theory_rate = decay < 1.0 ? -std::log1p(-decay) : kNan;

    summary.oracle_max_err = kNan;
    if (config.model.kind == "factor_pair" && config.loss.kind == "regression" &&
        is_diagonal(config.loss.d) && !trace.records.empty()) {
      const SpectrumReport oracle =
          spectrum_report(svt_minimizer(config.loss.d, lambda, config.loss.scale), 0.95);
      const std::vector<double>& got = summary.final_singular_values;
      if (got.size() == oracle.singular_values.size()) {
        double err = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) {
          err = std::max(err, std::abs(got[i] - oracle.singular_values[i]));
        }
        summary.oracle_max_err = err;
      }
    }
    result.cells.push_back(std::move(summary));
  }

  result.summary_path =
      (std::filesystem::path(config.output_dir) / "summary.csv").string();
  write_text_file(result.summary_path, summary_csv(result.cells, config));
  return result;
}

void emit_trace(const Trace& trace, const std::string& path) {
  std::ostringstream out;
  out << "step,loss,l2_loss,nuclear_loss,balance_gap_fro,reg_gap,pseudo_rank";
  if (!trace.records.empty()) {
    for (std::size_t i = 0; i < trace.records.front().singular_values.size(); ++i) {
      out << ",s" << (i + 1);
    }
  }
  out << '\n';
  for (const TraceRecord& rec : trace.records) {
    out << rec.step << ',' << format_double(rec.loss_value) << ','
        << format_double(rec.l2_value) << ',' << format_double(rec.nuclear_value) << ','
        << format_double(rec.balance_gap_fro) << ',' << format_double(rec.reg_gap) << ','
        << format_double(rec.pseudo_rank);
    for (double s : rec.singular_values) out << ',' << format_double(s);
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<TraceRecord> load_trace_records(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace file " + path);
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 7 || header[0] != "step") {
    throw std::runtime_error("unrecognized trace header in " + path);
  }

  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != header.size()) throw std::runtime_error("ragged trace row in " + path);
    TraceRecord rec;
    rec.step = static_cast<long long>(parse_double(f[0]));
    rec.loss_value = parse_double(f[1]);
    rec.l2_value = parse_double(f[2]);
    rec.nuclear_value = parse_double(f[3]);
    rec.balance_gap_fro = parse_double(f[4]);
    rec.reg_gap = parse_double(f[5]);
    rec.pseudo_rank = parse_double(f[6]);
    for (std::size_t i = 7; i < f.size(); ++i) rec.singular_values.push_back(parse_double(f[i]));
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace frl
