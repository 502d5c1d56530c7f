#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "frl/matrix.hpp"
#include "frl/spectra.hpp"

namespace frl {

struct TensorInfo {
  std::string dtype;  // F16 | F32 | F64
  std::vector<long long> shape;
  std::uint64_t begin = 0;  // offsets into the data section
  std::uint64_t end = 0;
};

// safetensors-layout archive: 8-byte little-endian header length, JSON header
// mapping names to {dtype, shape, data_offsets}, then raw little-endian tensor
// bytes. Entries are validated up front; values are read lazily per tensor and
// promoted to 64-bit reals.
class TensorArchive {
 public:
  static TensorArchive load(const std::string& path);

  const std::map<std::string, TensorInfo>& entries() const { return entries_; }
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  /// Rank-2 entry as a Matrix (rank-1 loads as a column). Throws naming the
  /// tensor when it is missing or not matrix-shaped.
  Matrix matrix(const std::string& name) const;

 private:
  std::string path_;
  std::uint64_t data_start_ = 0;
  std::uint64_t data_size_ = 0;
  std::map<std::string, TensorInfo> entries_;
};

/// Writer for the same layout, used to build fixtures and test archives.
void write_tensor_archive(const std::string& path,
                          const std::vector<std::pair<std::string, Matrix>>& tensors,
                          const std::string& dtype = "F32");

double half_to_double(std::uint16_t bits);
std::uint16_t double_to_half(double value);  // round-to-nearest-even

// Name templates use {layer} and {head} placeholders. Without a {head}
// placeholder, per-layer q/k/v tensors are row blocks of d_head rows per head
// (stacked q-heads, then k-heads, then v-heads when fused_qkv) and the o/P
// tensor holds d_head columns per head. `transposed` means the stored tensors
// act as W^T and are transposed on load.
struct AttentionLayout {
  std::string q_template;
  std::string k_template;
  std::string v_template;
  std::string o_template;
  Index d_model = 0;
  Index d_head = 0;
  int num_heads = 0;
  int num_layers = 0;
  bool fused_qkv = false;
  bool transposed = false;

  static AttentionLayout from_json_text(const std::string& text);
  static AttentionLayout load(const std::string& path);
  std::string to_json_text() const;
};

struct HeadReport {
  int layer = 0;
  int head = 0;
  SpectrumReport qk;  // spectrum of W_K^T W_Q
  SpectrumReport vp;  // spectrum of P W_V
  // (||row_i(W_Q)||^2, ||row_i(W_K)||^2) and (||row_i(W_V)||^2, ||col_i(P)||^2)
  std::vector<std::pair<double, double>> qk_row_norms;
  std::vector<std::pair<double, double>> vp_row_norms;
  double nuclear_qk = 0.0;
  double frob_half_qk = 0.0;  // (||W_K||^2 + ||W_Q||^2) / 2
  double nuclear_vp = 0.0;
  double frob_half_vp = 0.0;  // (||P||^2 + ||W_V||^2) / 2
};

HeadReport attention_products(const TensorArchive& archive, const AttentionLayout& layout,
                              int layer, int head, double threshold = 0.95);

struct AnalyzeResult {
  std::vector<std::string> files;  // heads.csv, scatter_qk.csv, scatter_vp.csv, norms.csv
  std::size_t head_count = 0;
};

/// Analyzes every (layer, head) cell and writes the report CSVs into out_dir.
/// All-or-nothing: nothing is written if any head fails.
AnalyzeResult analyze_checkpoint(const TensorArchive& archive, const AttentionLayout& layout,
                                 double threshold, const std::string& out_dir);

}  // namespace frl
