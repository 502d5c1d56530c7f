#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "frl/ckpt.hpp"
#include "frl/csv.hpp"
#include "frl/harness.hpp"
#include "frl/plot.hpp"
#include "frl/spectra.hpp"

namespace {

// Generic trace/CSV column reader so plotting works on any emitted file.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // per column

  static CsvTable load(const std::string& path) {
    const std::string text = frl::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file " + path);
    CsvTable t;
    t.columns = frl::split_csv_line(line);
    t.data.resize(t.columns.size());
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> f = frl::split_csv_line(line);
      if (f.size() != t.columns.size()) throw std::runtime_error("ragged row in " + path);
      for (std::size_t i = 0; i < f.size(); ++i) t.data[i].push_back(frl::parse_double(f[i]));
    }
    return t;
  }

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return data[i];
    }
    throw std::runtime_error("no column '" + name + "'");
  }
};

int cmd_run(const std::string& config_path) {
  frl::ExperimentConfig config;
  try {
    config = frl::load_experiment_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  frl::ExperimentResult result;
  try {
    result = frl::run_experiment(config);
  } catch (const frl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  for (const frl::CellSummary& c : result.cells) {
    std::cout << "cell " << c.cell << " lambda=" << frl::format_double(c.lambda) << " "
              << c.status << " final_pseudo_rank=" << frl::format_double(c.final_pseudo_rank)
              << " reg_gap=" << frl::format_double(c.final_reg_gap) << "\n";
  }
  std::cout << "summary: " << result.summary_path << "\n";
  return result.any_diverged ? 2 : 0;
}

int cmd_plot(const std::string& trace_path, const std::string& y_column,
             const std::string& x_column, bool log_y, std::string out_path) {
  const CsvTable table = CsvTable::load(trace_path);
  frl::PlotSeries series;
  series.label = y_column;
  series.x = table.column(x_column);
  series.y = table.column(y_column);
  if (out_path.empty()) {
    out_path = trace_path + "." + y_column + ".svg";
  }
  frl::AxesSpec axes;
  axes.title = std::filesystem::path(trace_path).filename().string();
  axes.x_label = x_column;
  axes.y_label = y_column;
  axes.log_y = log_y;
  frl::render_plot({series}, axes, out_path);
  std::cout << out_path << "\n";
  return 0;
}

int cmd_spectrum(const std::string& matrix_path, double threshold) {
  const frl::Matrix m = frl::read_matrix_csv(matrix_path);
  const frl::SpectrumReport rep = frl::spectrum_report(m, threshold);
  nlohmann::json j;
  j["singular_values"] = rep.singular_values;
  j["nuclear"] = rep.nuclear;
  j["frobenius"] = rep.frobenius;
  j["pseudo_rank"] = rep.pseudo_rank;
  j["threshold"] = rep.threshold;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_analyze(const std::string& archive_path, const std::string& layout_path,
                double threshold, const std::string& out_dir) {
  const frl::TensorArchive archive = frl::TensorArchive::load(archive_path);
  const frl::AttentionLayout layout = frl::AttentionLayout::load(layout_path);
  const frl::AnalyzeResult result = frl::analyze_checkpoint(archive, layout, threshold, out_dir);
  std::cout << result.head_count << " heads analyzed\n";
  for (const std::string& f : result.files) std::cout << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"factorized-regularization lab: sweeps, spectra, checkpoint analysis"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run an experiment sweep from a JSON config");
  run->add_option("config", config_path, "experiment config JSON")->required();

  std::string trace_path, y_column, x_column = "step", plot_out;
  bool log_y = false;
  CLI::App* plot = app.add_subcommand("plot", "render one trace column as an SVG line plot");
  plot->add_option("trace", trace_path, "trace CSV")->required();
  plot->add_option("--y", y_column, "column to plot")->required();
  plot->add_option("--x", x_column, "x column (default step)");
  plot->add_flag("--log", log_y, "logarithmic y axis");
  plot->add_option("--out", plot_out, "output SVG path");

  std::string matrix_path;
  double threshold = 0.95;
  CLI::App* spectrum = app.add_subcommand("spectrum", "spectrum report of a matrix CSV as JSON");
  spectrum->add_option("matrix", matrix_path, "matrix CSV, comma-separated rows, no header")
      ->required();
  spectrum->add_option("--threshold", threshold, "pseudo-rank threshold (default 0.95)");

  std::string archive_path, layout_path, analyze_out;
  double analyze_threshold = 0.95;
  CLI::App* analyze = app.add_subcommand("analyze", "attention-product rank diagnostics");
  analyze->add_option("archive", archive_path, "safetensors archive")->required();
  analyze->add_option("--layout", layout_path, "attention layout JSON")->required();
  analyze->add_option("--threshold", analyze_threshold, "pseudo-rank threshold");
  analyze->add_option("--out", analyze_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (plot->parsed()) return cmd_plot(trace_path, y_column, x_column, log_y, plot_out);
    if (spectrum->parsed()) return cmd_spectrum(matrix_path, threshold);
    if (analyze->parsed()) return cmd_analyze(archive_path, layout_path, analyze_threshold,
                                              analyze_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
