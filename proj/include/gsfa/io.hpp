#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gsfa/builders.hpp"
#include "gsfa/estimators.hpp"
#include "gsfa/free_response.hpp"
#include "gsfa/hierarchy.hpp"
#include "gsfa/labels.hpp"

namespace gsfa {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double x) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

namespace io {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorKind::io, "write failed for " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    fail(ErrorKind::io, path.string() + ": " + e.what());
  }
}

inline void check_version(const Json& j, const std::string& what) {
  require(j.is_object() && j.contains("format_version"), ErrorKind::io, what + ": missing format_version");
  const int v = j.at("format_version").get<int>();
  require(v == kFormatVersion, ErrorKind::io,
          what + ": unsupported format_version " + std::to_string(v) + " (expected " +
              std::to_string(kFormatVersion) + ")");
}

template <typename F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    fail(ErrorKind::io, what + ": " + e.what());
  }
}

inline Json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vector vec(const Json& j) {
  const auto d = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(d.data(), static_cast<Index>(d.size()));
}

inline Json row_major(const Matrix& m) {
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) d.push_back(m(i, j));
  return d;
}

inline Matrix row_major(const Json& j, Index rows, Index cols) {
  const auto d = j.get<std::vector<double>>();
  require(static_cast<Index>(d.size()) == rows * cols, ErrorKind::io,
          "matrix payload has " + std::to_string(d.size()) + " entries, expected " + std::to_string(rows * cols));
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index c = 0; c < cols; ++c) m(i, c) = d[static_cast<std::size_t>(i * cols + c)];
  return m;
}

}  // namespace io

// ---------------------------------------------------------------------------
// Graph files: {n, vertex_weights, edges: [[i, j, γ], …] with i ≤ j, format_version}.
// Clustered and serial graphs also carry their group structure.

inline Json graph_to_json(const TrainingGraph& g) {
  Json edges = Json::array();
  std::vector<std::array<double, 3>> list;
  g.for_each_nonzero([&](Index i, Index j, double w) {
    if (i <= j && w != 0.0) list.push_back({static_cast<double>(i), static_cast<double>(j), w});
  });
  std::sort(list.begin(), list.end());
  for (const auto& e : list) edges.push_back({static_cast<Index>(e[0]), static_cast<Index>(e[1]), e[2]});
  Json j;
  j["format_version"] = kFormatVersion;
  j["n"] = g.size();
  j["vertex_weights"] = io::vec(g.vertex_weights());
  j["edges"] = std::move(edges);
  if (g.structure() && g.structure()->kind != GraphKind::generic) {
    const auto& st = *g.structure();
    j["structure"] = {{"kind", st.kind == GraphKind::clustered ? "clustered" : "serial"},
                      {"groups", st.groups},
                      {"weights", st.weights}};
  }
  return j;
}

inline TrainingGraph graph_from_json(const Json& j) {
  io::check_version(j, "graph file");
  return io::guarded("graph file", [&] {
    const Index n = j.at("n").get<Index>();
    const Vector v = io::vec(j.at("vertex_weights"));
    require(v.size() == n, ErrorKind::io, "graph file: vertex_weights length differs from n");
    std::vector<Triplet> t;
    for (const auto& e : j.at("edges")) {
      const Index a = e.at(0).get<Index>();
      const Index b = e.at(1).get<Index>();
      const double w = e.at(2).get<double>();
      require(a >= 0 && b >= 0 && a < n && b < n, ErrorKind::io, "graph file: edge index out of range");
      require(a <= b, ErrorKind::io, "graph file: edges must be listed with i ≤ j");
      t.emplace_back(a, b, w);
      if (a != b) t.emplace_back(b, a, w);
    }
    SparseMatrix s(n, n);
    s.setFromTriplets(t.begin(), t.end());
    std::optional<GroupStructure> st;
    if (j.contains("structure")) {
      GroupStructure gs;
      const auto kind = j["structure"].at("kind").get<std::string>();
      require(kind == "clustered" || kind == "serial", ErrorKind::io, "graph file: unknown structure kind " + kind);
      gs.kind = kind == "clustered" ? GraphKind::clustered : GraphKind::serial;
      gs.groups = j["structure"].at("groups").get<std::vector<std::vector<Index>>>();
      gs.weights = j["structure"].at("weights").get<std::vector<double>>();
      st = std::move(gs);
    }
    return TrainingGraph(v, std::move(s), std::move(st));
  });
}

inline void save_graph(const std::filesystem::path& p, const TrainingGraph& g) { io::write_json(p, graph_to_json(g)); }
inline TrainingGraph load_graph(const std::filesystem::path& p) { return graph_from_json(io::read_json(p)); }

// ---------------------------------------------------------------------------
// Label files: {labels (L×N row-major), eigenvalues, vertex_weights, mu_sigma, format_version}.

inline Json labels_to_json(const LabelSet& ls) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["count"] = ls.count();
  j["n"] = ls.samples();
  j["labels"] = io::row_major(ls.labels);
  j["eigenvalues"] = io::vec(ls.eigenvalues);
  j["vertex_weights"] = io::vec(ls.vertex_weights);
  Json ms = Json::array();
  for (const auto& s : ls.stats) ms.push_back({s.mu, s.sigma});
  j["mu_sigma"] = std::move(ms);
  j["normalized"] = ls.normalized;
  j["decorrelated"] = ls.decorrelated;
  return j;
}

inline LabelSet labels_from_json(const Json& j) {
  io::check_version(j, "label file");
  return io::guarded("label file", [&] {
    LabelSet ls;
    const Index n = j.at("n").get<Index>();
    const Index l = j.at("count").get<Index>();
    ls.labels = io::row_major(j.at("labels"), l, n);
    ls.eigenvalues = io::vec(j.at("eigenvalues"));
    ls.vertex_weights = io::vec(j.at("vertex_weights"));
    require(ls.eigenvalues.size() == l && ls.vertex_weights.size() == n, ErrorKind::io,
            "label file: eigenvalue or vertex weight count mismatch");
    for (const auto& p : j.at("mu_sigma")) ls.stats.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    ls.normalized = j.value("normalized", true);
    ls.decorrelated = j.value("decorrelated", true);
    ls.mixing = Matrix::Identity(l, l);
    return ls;
  });
}

inline void save_labels(const std::filesystem::path& p, const LabelSet& ls) { io::write_json(p, labels_to_json(ls)); }
inline LabelSet load_labels(const std::filesystem::path& p) { return labels_from_json(io::read_json(p)); }

// ---------------------------------------------------------------------------
// Model files: weighted mean, W (I×J row-major), deltas, expansion, PCA, graph fingerprint.

inline Json fingerprint_to_json(const GraphFingerprint& f) {
  std::ostringstream hex;
  hex << std::hex << f.checksum;
  return {{"n", f.n}, {"q", f.q}, {"r", f.r}, {"checksum", hex.str()}};
}

inline GraphFingerprint fingerprint_from_json(const Json& j) {
  GraphFingerprint f;
  f.n = j.at("n").get<Index>();
  f.q = j.at("q").get<double>();
  f.r = j.at("r").get<double>();
  f.checksum = std::stoull(j.at("checksum").get<std::string>(), nullptr, 16);
  return f;
}

inline Json node_to_json(const GsfaNode& node) {
  const auto& m = node.gsfa;
  Json j;
  j["format_version"] = kFormatVersion;
  j["input_dim"] = node.input_dim;
  j["expansion"] = to_string(node.expansion);
  if (node.pca) {
    j["pca"] = {{"input_dim", node.pca->input_dim()},
                {"output_dim", node.pca->output_dim()},
                {"mean", io::vec(node.pca->mean)},
                {"basis", io::row_major(node.pca->basis)},
                {"variances", io::vec(node.pca->variances)}};
  } else {
    j["pca"] = nullptr;
  }
  j["rows"] = m.input_dim();
  j["cols"] = m.output_dim();
  j["weighted_mean"] = io::vec(m.weighted_mean);
  j["projection"] = io::row_major(m.projection);
  j["deltas"] = io::vec(m.deltas);
  j["fingerprint"] = fingerprint_to_json(m.trained_on);
  return j;
}

inline GsfaNode node_from_json(const Json& j) {
  io::check_version(j, "model file");
  return io::guarded("model file", [&] {
    GsfaNode node;
    node.expansion = parse_expansion(j.at("expansion").get<std::string>());
    if (!j.at("pca").is_null()) {
      const auto& p = j["pca"];
      PcaBasis b;
      const Index in = p.at("input_dim").get<Index>();
      const Index out = p.at("output_dim").get<Index>();
      b.mean = io::vec(p.at("mean"));
      b.basis = io::row_major(p.at("basis"), in, out);
      b.variances = io::vec(p.at("variances"));
      node.pca = std::move(b);
    }
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    node.gsfa.weighted_mean = io::vec(j.at("weighted_mean"));
    node.gsfa.projection = io::row_major(j.at("projection"), rows, cols);
    node.gsfa.deltas = io::vec(j.at("deltas"));
    node.gsfa.trained_on = fingerprint_from_json(j.at("fingerprint"));
    node.input_dim = j.value("input_dim", node.pca ? node.pca->input_dim() : rows);
    return node;
  });
}

inline void save_model(const std::filesystem::path& p, const GsfaNode& n) { io::write_json(p, node_to_json(n)); }
inline GsfaNode load_model(const std::filesystem::path& p) { return node_from_json(io::read_json(p)); }

// ---------------------------------------------------------------------------
// Architecture files and networks (a directory: manifest.json + one model file per node).

inline Json shape_json(const Shape2& s) { return Json::array({s.rows, s.cols}); }
inline Shape2 shape_json(const Json& j) { return {j.at(0).get<Index>(), j.at(1).get<Index>()}; }

inline Json architecture_to_json(const std::vector<LayerSpec>& specs, Shape2 input_shape) {
  Json layers = Json::array();
  for (const auto& s : specs) {
    Json l;
    l["field"] = shape_json(s.field);
    if (s.stride) l["stride"] = shape_json(*s.stride);
    if (s.grid) l["grid"] = shape_json(*s.grid);
    l["expansion"] = to_string(s.expansion);
    if (s.pca_dims) l["pca_dims"] = *s.pca_dims;
    l["out_dims"] = s.out_dims;
    layers.push_back(std::move(l));
  }
  return {{"format_version", kFormatVersion}, {"input_shape", shape_json(input_shape)}, {"layers", layers}};
}

struct Architecture {
  Shape2 input_shape;
  std::vector<LayerSpec> layers;
};

inline Architecture architecture_from_json(const Json& j) {
  io::check_version(j, "architecture file");
  return io::guarded("architecture file", [&] {
    Architecture a;
    a.input_shape = shape_json(j.at("input_shape"));
    for (const auto& l : j.at("layers")) {
      LayerSpec s;
      s.field = shape_json(l.at("field"));
      if (l.contains("stride")) s.stride = shape_json(l["stride"]);
      if (l.contains("grid")) s.grid = shape_json(l["grid"]);
      s.expansion = parse_expansion(l.value("expansion", std::string("identity")));
      if (l.contains("pca_dims")) s.pca_dims = l["pca_dims"].get<Index>();
      s.out_dims = l.at("out_dims").get<Index>();
      a.layers.push_back(std::move(s));
    }
    return a;
  });
}

inline std::string node_file_name(std::size_t layer, std::size_t idx) {
  return "layer" + std::to_string(layer + 1) + "_node" + std::to_string(idx) + ".json";
}

inline void save_network(const std::filesystem::path& dir, const HgsfaNetwork& net) {
  std::filesystem::create_directories(dir);
  Json manifest = architecture_to_json(net.layers, net.input_shape);
  Json files = Json::array();
  for (std::size_t k = 0; k < net.nodes.size(); ++k) {
    Json layer = Json::array();
    for (std::size_t i = 0; i < net.nodes[k].size(); ++i) {
      const auto name = node_file_name(k, i);
      save_model(dir / name, net.nodes[k][i]);
      layer.push_back(name);
    }
    files.push_back(std::move(layer));
  }
  manifest["nodes"] = std::move(files);
  io::write_json(dir / "manifest.json", manifest);
}

inline HgsfaNetwork load_network(const std::filesystem::path& dir) {
  const Json manifest = io::read_json(dir / "manifest.json");
  const Architecture a = architecture_from_json(manifest);
  HgsfaNetwork net;
  net.input_shape = a.input_shape;
  net.layers = a.layers;
  net.report = validate_architecture(a.layers, a.input_shape);
  for (const auto& layer : manifest.at("nodes")) {
    net.nodes.emplace_back();
    for (const auto& f : layer) net.nodes.back().push_back(load_model(dir / f.get<std::string>()));
  }
  require(net.nodes.size() == net.layers.size(), ErrorKind::io, "network manifest: layer count mismatch");
  for (std::size_t k = 0; k < net.nodes.size(); ++k)
    require(static_cast<Index>(net.nodes[k].size()) == net.report.layers[k].grid.area(), ErrorKind::io,
            "network manifest: node count mismatch in layer " + std::to_string(k + 1));
  return net;
}

// ---------------------------------------------------------------------------
// Estimator files.

inline Json estimator_to_json(const LabelEstimator& e) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = to_string(e.kind);
  j["clip"] = {e.clip_min, e.clip_max};
  switch (e.kind) {
    case EstimatorKind::linear_scaling:
      j["sign"] = e.sign;
      j["mu"] = e.mu;
      j["sigma"] = e.sigma;
      break;
    case EstimatorKind::linear_regression:
      j["a"] = io::vec(e.a);
      j["b"] = e.b;
      break;
    case EstimatorKind::soft_gc: {
      Json cls = Json::array();
      for (std::size_t c = 0; c < e.classes.size(); ++c) {
        const auto& g = e.classes[c];
        cls.push_back({{"label", g.label},
                       {"log_prior", e.log_priors[c]},
                       {"mean", io::vec(g.mean)},
                       {"covariance", io::row_major(g.covariance)}});
      }
      j["classes"] = std::move(cls);
      break;
    }
  }
  return j;
}

inline LabelEstimator estimator_from_json(const Json& j) {
  io::check_version(j, "estimator file");
  return io::guarded("estimator file", [&] {
    LabelEstimator e;
    e.kind = parse_estimator_kind(j.at("kind").get<std::string>());
    e.clip_min = j.at("clip").at(0).get<double>();
    e.clip_max = j.at("clip").at(1).get<double>();
    switch (e.kind) {
      case EstimatorKind::linear_scaling:
        e.sign = j.at("sign").get<double>();
        e.mu = j.at("mu").get<double>();
        e.sigma = j.at("sigma").get<double>();
        break;
      case EstimatorKind::linear_regression:
        e.a = io::vec(j.at("a"));
        e.b = j.at("b").get<double>();
        break;
      case EstimatorKind::soft_gc:
        for (const auto& c : j.at("classes")) {
          GaussianClass g;
          g.label = c.at("label").get<double>();
          g.mean = io::vec(c.at("mean"));
          g.covariance = io::row_major(c.at("covariance"), g.mean.size(), g.mean.size());
          e.classes.push_back(std::move(g));
          e.log_priors.push_back(c.at("log_prior").get<double>());
        }
        break;
    }
    return e;
  });
}

// ---------------------------------------------------------------------------
// Data matrices.
//
// CSV: a header row of feature names, then one row per sample.
// Binary: 8-byte magic "GSFAMAT\0", uint32 dtype (1 = float64), uint32
// reserved (0), uint64 I, uint64 N, then I·N float64 values sample by sample
// (column-major). All integers and floats little-endian.

inline std::string matrix_csv(const Matrix& x, const std::vector<std::string>& names = {}) {
  require(names.empty() || static_cast<Index>(names.size()) == x.rows(), ErrorKind::dimension,
          "feature name count does not match the data");
  std::string out;
  for (Index i = 0; i < x.rows(); ++i) {
    if (i) out += ',';
    out += names.empty() ? "x" + std::to_string(i) : names[static_cast<std::size_t>(i)];
  }
  out += '\n';
  for (Index n = 0; n < x.cols(); ++n) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (i) out += ',';
      out += format_double(x(i, n));
    }
    out += '\n';
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  Matrix data;  // columns = rows of the file (samples), rows = CSV columns
};

inline CsvTable parse_csv(const std::string& text, const std::string& what = "csv") {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = cells;
      first = false;
      continue;
    }
    require(cells.size() == t.header.size(), ErrorKind::io,
            what + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " fields, header has " +
                std::to_string(t.header.size()));
    std::vector<double> r;
    for (const auto& c : cells) {
      double v = 0.0;
      const char* b = c.data();
      const char* e = c.data() + c.size();
      while (b < e && *b == ' ') ++b;
      auto [p, ec] = std::from_chars(b, e, v);
      require(ec == std::errc() && p == e, ErrorKind::io,
              what + ": line " + std::to_string(lineno) + ": cannot parse '" + c + "'");
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  require(!first, ErrorKind::io, what + ": missing header row");
  t.data.resize(static_cast<Index>(t.header.size()), static_cast<Index>(rows.size()));
  for (std::size_t n = 0; n < rows.size(); ++n)
    for (std::size_t i = 0; i < rows[n].size(); ++i) t.data(static_cast<Index>(i), static_cast<Index>(n)) = rows[n][i];
  return t;
}

inline constexpr char kMatrixMagic[8] = {'G', 'S', 'F', 'A', 'M', 'A', 'T', '\0'};

inline std::string matrix_binary(const Matrix& x) {
  static_assert(std::endian::native == std::endian::little, "binary matrix I/O assumes a little-endian host");
  std::string out(kMatrixMagic, 8);
  auto put = [&](const auto& value) { out.append(reinterpret_cast<const char*>(&value), sizeof(value)); };
  put(std::uint32_t{1});
  put(std::uint32_t{0});
  put(static_cast<std::uint64_t>(x.rows()));
  put(static_cast<std::uint64_t>(x.cols()));
  out.append(reinterpret_cast<const char*>(x.data()), static_cast<std::size_t>(x.size()) * sizeof(double));
  return out;
}

inline Matrix parse_matrix_binary(const std::string& bytes, const std::string& what = "binary matrix") {
  require(bytes.size() >= 32 && std::memcmp(bytes.data(), kMatrixMagic, 8) == 0, ErrorKind::io, what + ": bad magic");
  std::uint32_t dtype = 0;
  std::uint64_t rows = 0, cols = 0;
  std::memcpy(&dtype, bytes.data() + 8, 4);
  std::memcpy(&rows, bytes.data() + 16, 8);
  std::memcpy(&cols, bytes.data() + 24, 8);
  require(dtype == 1, ErrorKind::io, what + ": unsupported dtype " + std::to_string(dtype));
  require(bytes.size() == 32 + rows * cols * sizeof(double), ErrorKind::io, what + ": truncated payload");
  Matrix x(static_cast<Index>(rows), static_cast<Index>(cols));
  std::memcpy(x.data(), bytes.data() + 32, rows * cols * sizeof(double));
  return x;
}

/// Loads I×N data from `.csv` or the binary format (any other extension).
inline Matrix load_data(const std::filesystem::path& p) {
  const std::string text = io::read_text(p);
  if (p.extension() == ".csv") return parse_csv(text, p.string()).data;
  return parse_matrix_binary(text, p.string());
}

inline void save_data(const std::filesystem::path& p, const Matrix& x) {
  io::write_text(p, p.extension() == ".csv" ? matrix_csv(x) : matrix_binary(x));
}

/// Label CSV: a single column (header "label"), one row per sample.
inline Vector load_label_column(const std::filesystem::path& p) {
  const auto t = parse_csv(io::read_text(p), p.string());
  require(t.data.rows() >= 1, ErrorKind::io, p.string() + ": no columns");
  return t.data.row(0).transpose();
}

inline void save_label_column(const std::filesystem::path& p, const Vector& labels, const std::string& name = "label") {
  io::write_text(p, matrix_csv(labels.transpose(), {name}));
}

// ---------------------------------------------------------------------------
// Spectrum exports.

inline std::string spectrum_csv(const FreeResponseSpectrum& s) {
  std::string out = "j,lambda,delta,feasible\n";
  for (Index j = 0; j < s.size(); ++j)
    out += std::to_string(j) + ',' + format_double(s.eigenvalues[j]) + ',' + format_double(s.deltas[j]) + ',' +
           (s.feasible[static_cast<std::size_t>(j)] ? "1" : "0") + '\n';
  return out;
}

/// Responses as an N×count table: one row per sample, column k = response k.
inline std::string responses_csv(const FreeResponseSpectrum& s, Index count) {
  count = std::min(count, s.size());
  std::vector<std::string> names;
  for (Index k = 0; k < count; ++k) names.push_back("y" + std::to_string(k));
  return matrix_csv(s.responses.leftCols(count).transpose(), names);
}

/// Edge list with the weakest edges dropped: keeps |γ| at or above the given
/// percentile of the nonzero off-diagonal magnitudes (0 keeps everything).
inline std::string edges_csv(const TrainingGraph& g, double percentile = 0.0) {
  std::vector<std::array<double, 3>> list;
  g.for_each_nonzero([&](Index i, Index j, double w) {
    if (i < j && w != 0.0) list.push_back({static_cast<double>(i), static_cast<double>(j), w});
  });
  std::sort(list.begin(), list.end());
  double cut = 0.0;
  if (percentile > 0.0 && !list.empty()) {
    std::vector<double> mags;
    for (const auto& e : list) mags.push_back(std::abs(e[2]));
    std::sort(mags.begin(), mags.end());
    const auto k = static_cast<std::size_t>(std::floor(percentile / 100.0 * static_cast<double>(mags.size() - 1)));
    cut = mags[std::min(k, mags.size() - 1)];
  }
  std::string out = "i,j,gamma\n";
  for (const auto& e : list)
    if (std::abs(e[2]) >= cut)
      out += std::to_string(static_cast<Index>(e[0])) + ',' + std::to_string(static_cast<Index>(e[1])) + ',' +
             format_double(e[2]) + '\n';
  return out;
}

struct MetricRow {
  std::string estimator;
  Index d = 0;
  std::string metric;
  double value = 0.0;
};

inline std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "estimator,d,metric,value\n";
  for (const auto& r : rows)
    out += r.estimator + ',' + std::to_string(r.d) + ',' + r.metric + ',' + format_double(r.value) + '\n';
  return out;
}

}  // namespace gsfa
