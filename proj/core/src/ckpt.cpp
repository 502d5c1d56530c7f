#include "frl/ckpt.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "frl/csv.hpp"

namespace frl {

namespace {

using nlohmann::json;

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "F16") return 2;
  if (dtype == "F32") return 4;
  if (dtype == "F64") return 8;
  throw std::runtime_error("unknown dtype '" + dtype + "'");
}

std::uint64_t read_le_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

double half_to_double(std::uint16_t bits) {
  const unsigned sign = (bits >> 15) & 1u;
  const unsigned exp = (bits >> 10) & 0x1Fu;
  const unsigned frac = bits & 0x3FFu;
  double v;
  if (exp == 0) {
    v = std::ldexp(static_cast<double>(frac), -24);
  } else if (exp == 31) {
    v = frac ? std::numeric_limits<double>::quiet_NaN()
             : std::numeric_limits<double>::infinity();
  } else {
    v = std::ldexp(static_cast<double>(1024 + frac), static_cast<int>(exp) - 25);
  }
  return sign ? -v : v;
}

std::uint16_t double_to_half(double value) {
  const std::uint16_t sign = std::signbit(value) ? 0x8000 : 0;
  if (std::isnan(value)) return static_cast<std::uint16_t>(sign | 0x7E00);
  double a = std::abs(value);
  if (a >= 65520.0) return static_cast<std::uint16_t>(sign | 0x7C00);  // rounds to inf
  if (a < std::ldexp(1.0, -25)) return sign;                           // rounds to zero
  if (a < std::ldexp(1.0, -14)) {
    // subnormal range, unit in the last place is 2^-24
    const double scaled = std::ldexp(a, 24);
    auto m = static_cast<std::uint16_t>(std::nearbyint(scaled));
    return static_cast<std::uint16_t>(sign | m);  // m == 1024 rolls into exp=1 exactly
  }
  int e = 0;
  const double f = std::frexp(a, &e);  // a = f * 2^e, f in [0.5, 1)
  long m = static_cast<long>(std::nearbyint(std::ldexp(f, 11)));  // in [1024, 2048]
  int biased = e - 1 + 15;
  if (m == 2048) {
    m = 1024;
    ++biased;
  }
  if (biased >= 31) return static_cast<std::uint16_t>(sign | 0x7C00);
  return static_cast<std::uint16_t>(sign | (biased << 10) | (m - 1024));
}

TensorArchive TensorArchive::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  if (file_size < 8) throw std::runtime_error("truncated archive");
  in.seekg(0);

  unsigned char len_bytes[8];
  in.read(reinterpret_cast<char*>(len_bytes), 8);
  const std::uint64_t header_len = read_le_u64(len_bytes);
  if (header_len > file_size - 8) throw std::runtime_error("truncated archive");

  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error("truncated archive");

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed archive header: ") + e.what());
  }
  if (!header.is_object()) throw std::runtime_error("malformed archive header: not an object");

  TensorArchive archive;
  archive.path_ = path;
  archive.data_start_ = 8 + header_len;
  archive.data_size_ = file_size - archive.data_start_;

  for (auto it = header.begin(); it != header.end(); ++it) {
    if (it.key() == "__metadata__") continue;
    const json& e = it.value();
    if (!e.is_object() || !e.contains("dtype") || !e.contains("shape") ||
        !e.contains("data_offsets")) {
      throw std::runtime_error("malformed entry '" + it.key() + "'");
    }
    TensorInfo info;
    info.dtype = e["dtype"].get<std::string>();
    const std::size_t elem = dtype_size(info.dtype);
    std::uint64_t count = 1;
    for (const json& s : e["shape"]) {
      const auto d = s.get<long long>();
      if (d < 0) throw std::runtime_error("malformed shape for '" + it.key() + "'");
      info.shape.push_back(d);
      count *= static_cast<std::uint64_t>(d);
    }
    info.begin = e["data_offsets"][0].get<std::uint64_t>();
    info.end = e["data_offsets"][1].get<std::uint64_t>();
    if (info.end < info.begin || info.end > archive.data_size_) {
      throw std::runtime_error("truncated archive");
    }
    if (info.end - info.begin != count * elem) {
      throw std::runtime_error("inconsistent byte extents for '" + it.key() + "'");
    }
    archive.entries_.emplace(it.key(), std::move(info));
  }
  return archive;
}

Matrix TensorArchive::matrix(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::runtime_error("missing tensor '" + name + "'");
  const TensorInfo& info = it->second;
  Index rows = 0, cols = 0;
  if (info.shape.size() == 2) {
    rows = static_cast<Index>(info.shape[0]);
    cols = static_cast<Index>(info.shape[1]);
  } else if (info.shape.size() == 1) {
    rows = static_cast<Index>(info.shape[0]);
    cols = 1;
  } else {
    throw std::runtime_error("tensor '" + name + "' is not matrix-shaped");
  }

  std::ifstream in(path_, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path_);
  in.seekg(static_cast<std::streamoff>(data_start_ + info.begin));
  std::vector<unsigned char> raw(info.end - info.begin);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw std::runtime_error("truncated archive");

  Matrix m(rows, cols);
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
  if (info.dtype == "F64") {
    static_assert(sizeof(double) == 8);
    std::memcpy(m.data(), raw.data(), count * 8);  // little-endian host assumed
  } else if (info.dtype == "F32") {
    for (std::uint64_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, raw.data() + i * 4, 4);
      m.data()[i] = static_cast<double>(f);
    }
  } else {  // F16
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint16_t h;
      std::memcpy(&h, raw.data() + i * 2, 2);
      m.data()[i] = half_to_double(h);
    }
  }
  return m;
}

void write_tensor_archive(const std::string& path,
                          const std::vector<std::pair<std::string, Matrix>>& tensors,
                          const std::string& dtype) {
  const std::size_t elem = dtype_size(dtype);

  json header = json::object();
  std::string data;
  for (const auto& [name, m] : tensors) {
    const std::uint64_t begin = data.size();
    for (Index i = 0; i < m.size(); ++i) {
      const double v = m.data()[i];
      if (dtype == "F64") {
        char bytes[8];
        std::memcpy(bytes, &v, 8);
        data.append(bytes, 8);
      } else if (dtype == "F32") {
        const float f = static_cast<float>(v);
        char bytes[4];
        std::memcpy(bytes, &f, 4);
        data.append(bytes, 4);
      } else {
        const std::uint16_t h = double_to_half(v);
        char bytes[2];
        std::memcpy(bytes, &h, 2);
        data.append(bytes, 2);
      }
    }
    header[name] = {{"dtype", dtype},
                    {"shape", {m.rows(), m.cols()}},
                    {"data_offsets", {begin, begin + static_cast<std::uint64_t>(m.size()) * elem}}};
  }

  const std::string header_text = header.dump();
  std::string out;
  out.reserve(8 + header_text.size() + data.size());
  std::uint64_t len = header_text.size();
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(len & 0xFF));
    len >>= 8;
  }
  out += header_text;
  out += data;
  write_text_file(path, out);
}

AttentionLayout AttentionLayout::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed layout: ") + e.what());
  }
  AttentionLayout l;
  l.q_template = j.at("q").get<std::string>();
  l.k_template = j.at("k").get<std::string>();
  l.v_template = j.at("v").get<std::string>();
  l.o_template = j.at("o").get<std::string>();
  l.d_model = j.at("d_model").get<Index>();
  l.d_head = j.at("d_head").get<Index>();
  l.num_heads = j.at("num_heads").get<int>();
  l.num_layers = j.at("num_layers").get<int>();
  if (j.contains("fused_qkv")) l.fused_qkv = j["fused_qkv"].get<bool>();
  if (j.contains("transposed")) l.transposed = j["transposed"].get<bool>();
  if (l.d_model < 1 || l.d_head < 1 || l.num_heads < 1 || l.num_layers < 1) {
    throw std::runtime_error("layout dimensions must be positive");
  }
  return l;
}

AttentionLayout AttentionLayout::load(const std::string& path) {
  return from_json_text(read_text_file(path));
}

std::string AttentionLayout::to_json_text() const {
  json j;
  j["q"] = q_template;
  j["k"] = k_template;
  j["v"] = v_template;
  j["o"] = o_template;
  j["d_model"] = d_model;
  j["d_head"] = d_head;
  j["num_heads"] = num_heads;
  j["num_layers"] = num_layers;
  j["fused_qkv"] = fused_qkv;
  j["transposed"] = transposed;
  return j.dump(2);
}

namespace {

std::string substitute(std::string tpl, int layer, int head) {
  auto replace_all = [&](const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = tpl.find(key, pos)) != std::string::npos) {
      tpl.replace(pos, key.size(), value);
      pos += value.size();
    }
  };
  replace_all("{layer}", std::to_string(layer));
  replace_all("{head}", std::to_string(head));
  return tpl;
}

enum class Role { q, k, v, o };

// Resolves one per-head projection: W_Q/W_K/W_V as d_head x d_model, P as
// d_model x d_head. Slices row (or column, for P) blocks out of per-layer or
// fused tensors; per-head tensors pass through.
Matrix head_matrix(const TensorArchive& archive, const AttentionLayout& layout, Role role,
                   int layer, int head) {
  const std::string* tpl = nullptr;
  switch (role) {
    case Role::q: tpl = &layout.q_template; break;
    case Role::k: tpl = &layout.k_template; break;
    case Role::v: tpl = &layout.v_template; break;
    case Role::o: tpl = &layout.o_template; break;
  }
  const bool per_head = tpl->find("{head}") != std::string::npos;
  const std::string name = substitute(*tpl, layer, head);
  Matrix t = archive.matrix(name);
  if (!t.allFinite()) throw std::runtime_error("non-finite values in tensor '" + name + "'");
  if (layout.transposed) t = t.transpose().eval();

  const Index dk = layout.d_head, dm = layout.d_model;
  const Index heads = layout.num_heads;

  if (role == Role::o) {
    if (per_head) {
      if (t.rows() != dm || t.cols() != dk) {
        throw std::runtime_error("tensor '" + name + "' has inconsistent dims");
      }
      return t;
    }
    if (t.rows() != dm || t.cols() != dk * heads) {
      throw std::runtime_error("tensor '" + name + "' has inconsistent dims");
    }
    return t.middleCols(static_cast<Index>(head) * dk, dk);
  }

  if (per_head) {
    if (t.rows() != dk || t.cols() != dm) {
      throw std::runtime_error("tensor '" + name + "' has inconsistent dims");
    }
    return t;
  }
  Index block = static_cast<Index>(head);
  Index expected_rows = dk * heads;
  if (layout.fused_qkv) {
    expected_rows = 3 * dk * heads;
    // fused row order: all q-heads, then k-heads, then v-heads
    if (role == Role::k) block += heads;
    if (role == Role::v) block += 2 * heads;
  }
  if (t.rows() != expected_rows || t.cols() != dm) {
    throw std::runtime_error("tensor '" + name + "' has inconsistent dims");
  }
  return t.middleRows(block * dk, dk);
}

}  // namespace

HeadReport attention_products(const TensorArchive& archive, const AttentionLayout& layout,
                              int layer, int head, double threshold) {
  if (layer < 0 || layer >= layout.num_layers || head < 0 || head >= layout.num_heads) {
    throw std::invalid_argument("layer/head out of range");
  }
  const Matrix wq = head_matrix(archive, layout, Role::q, layer, head);
  const Matrix wk = head_matrix(archive, layout, Role::k, layer, head);
  const Matrix wv = head_matrix(archive, layout, Role::v, layer, head);
  const Matrix p = head_matrix(archive, layout, Role::o, layer, head);

  HeadReport rep;
  rep.layer = layer;
  rep.head = head;
  rep.qk = spectrum_report(wk.transpose() * wq, threshold);
  rep.vp = spectrum_report(p * wv, threshold);
  rep.nuclear_qk = rep.qk.nuclear;
  rep.nuclear_vp = rep.vp.nuclear;
  rep.frob_half_qk = 0.5 * (wk.squaredNorm() + wq.squaredNorm());
  rep.frob_half_vp = 0.5 * (p.squaredNorm() + wv.squaredNorm());
  for (Index i = 0; i < layout.d_head; ++i) {
    rep.qk_row_norms.emplace_back(wq.row(i).squaredNorm(), wk.row(i).squaredNorm());
    rep.vp_row_norms.emplace_back(wv.row(i).squaredNorm(), p.col(i).squaredNorm());
  }
  return rep;
}

namespace {

double mean_abs_relative_deviation(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [x, y] : pairs) {
    const double mean = 0.5 * (x + y);
    sum += mean > 0.0 ? std::abs(x - y) / mean : 0.0;
  }
  return sum / static_cast<double>(pairs.size());
}

}  // namespace

AnalyzeResult analyze_checkpoint(const TensorArchive& archive, const AttentionLayout& layout,
                                 double threshold, const std::string& out_dir) {
  std::vector<HeadReport> reports;
  for (int layer = 0; layer < layout.num_layers; ++layer) {
    for (int head = 0; head < layout.num_heads; ++head) {
      reports.push_back(attention_products(archive, layout, layer, head, threshold));
    }
  }

  std::ostringstream heads, scat_qk, scat_vp, norms;
  heads << "layer,head,pseudo_rank_qk,pseudo_rank_vp,nuclear_qk,frobenius_half_qk,"
           "nuclear_vp,frobenius_half_vp,rownorm_mard_qk,rownorm_mard_vp\n";
  scat_qk << "layer,head,index,q_row_sq,k_row_sq\n";
  scat_vp << "layer,head,index,v_row_sq,p_col_sq\n";
  norms << "layer,head,product,nuclear,frobenius_half_sum\n";
  for (const HeadReport& r : reports) {
    heads << r.layer << ',' << r.head << ',' << format_double(r.qk.pseudo_rank) << ','
          << format_double(r.vp.pseudo_rank) << ',' << format_double(r.nuclear_qk) << ','
          << format_double(r.frob_half_qk) << ',' << format_double(r.nuclear_vp) << ','
          << format_double(r.frob_half_vp) << ','
          << format_double(mean_abs_relative_deviation(r.qk_row_norms)) << ','
          << format_double(mean_abs_relative_deviation(r.vp_row_norms)) << '\n';
    for (std::size_t i = 0; i < r.qk_row_norms.size(); ++i) {
      scat_qk << r.layer << ',' << r.head << ',' << i << ','
              << format_double(r.qk_row_norms[i].first) << ','
              << format_double(r.qk_row_norms[i].second) << '\n';
      scat_vp << r.layer << ',' << r.head << ',' << i << ','
              << format_double(r.vp_row_norms[i].first) << ','
              << format_double(r.vp_row_norms[i].second) << '\n';
    }
    norms << r.layer << ',' << r.head << ",qk," << format_double(r.nuclear_qk) << ','
          << format_double(r.frob_half_qk) << '\n';
    norms << r.layer << ',' << r.head << ",vp," << format_double(r.nuclear_vp) << ','
          << format_double(r.frob_half_vp) << '\n';
  }

  std::filesystem::create_directories(out_dir);
  AnalyzeResult result;
  result.head_count = reports.size();
  const std::filesystem::path dir(out_dir);
  const std::pair<const char*, std::ostringstream*> outputs[] = {
      {"heads.csv", &heads}, {"scatter_qk.csv", &scat_qk},
      {"scatter_vp.csv", &scat_vp}, {"norms.csv", &norms}};
  for (const auto& [fname, stream] : outputs) {
    const std::string path = (dir / fname).string();
    write_text_file(path, stream->str());
    result.files.push_back(path);
  }
  return result;
}

}  // namespace frl
