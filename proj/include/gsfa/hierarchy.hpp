#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gsfa/expansion.hpp"
#include "gsfa/pca.hpp"
#include "gsfa/solver.hpp"

namespace gsfa {

struct Shape2 {
  Index rows = 1;
  Index cols = 1;

  Index area() const { return rows * cols; }
  bool operator==(const Shape2&) const = default;
};

inline std::string to_string(const Shape2& s) { return std::to_string(s.rows) + "×" + std::to_string(s.cols); }

/// One layer of nodes. The receptive field is measured in cells of the
/// layer's input grid: pixels for the first layer, nodes of the previous
/// layer afterwards. A 2×1 field therefore merges two vertically adjacent
/// nodes and a 1×2 field two horizontal ones.
struct LayerSpec {
  Shape2 field;
  /// Step between neighbouring fields; only stride = field (exact tiling)
  /// is supported.
  std::optional<Shape2> stride;
  /// Expected node grid; checked against the one implied by the tiling.
  std::optional<Shape2> grid;
  ExpansionSpec expansion;
  std::optional<Index> pca_dims;
  Index out_dims = 1;
};

struct LayerReport {
  Index layer = 0;  // 1-based
  Shape2 grid;
  Shape2 field;        // in input-grid cells
  Shape2 field_pixels;
  Index input_dim = 0;
  std::optional<Index> pca_dim;
  Index expanded_dim = 0;
  Index output_dim = 0;
};

struct ArchitectureReport {
  Shape2 input_shape;
  std::vector<LayerReport> layers;

  Index output_dim() const { return layers.empty() ? 0 : layers.back().output_dim; }

  std::string table() const {
    std::ostringstream os;
    os << "layer,nodes,field_pixels,input_dim,pca_dim,expanded_dim,output_dim\n";
    for (const auto& l : layers)
      os << l.layer << ',' << to_string(l.grid) << ',' << to_string(l.field_pixels) << ',' << l.input_dim << ','
         << (l.pca_dim ? std::to_string(*l.pca_dim) : "-") << ',' << l.expanded_dim << ',' << l.output_dim << '\n';
    return os.str();
  }
};

inline ArchitectureReport validate_architecture(const std::vector<LayerSpec>& specs, Shape2 input_shape) {
  require(!specs.empty(), ErrorKind::architecture, "network has no layers");
  require(input_shape.rows >= 1 && input_shape.cols >= 1, ErrorKind::architecture, "input shape must be positive");
  ArchitectureReport rep;
  rep.input_shape = input_shape;
  Shape2 in_grid = input_shape;
  Shape2 cell_pixels{1, 1};
  Index cell_dim = 1;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    const std::string where = "layer " + std::to_string(k + 1) + ": ";
    require(s.field.rows >= 1 && s.field.cols >= 1, ErrorKind::architecture, where + "receptive field must be positive");
    if (s.stride && !(*s.stride == s.field))
      fail(ErrorKind::architecture, where + "stride " + to_string(*s.stride) + " differs from receptive field " +
                                        to_string(s.field) + "; only non-overlapping exact tilings are supported");
    require(in_grid.rows % s.field.rows == 0 && in_grid.cols % s.field.cols == 0, ErrorKind::architecture,
            where + "receptive field " + to_string(s.field) + " does not tile the " + to_string(in_grid) +
                " input grid");
    LayerReport l;
    l.layer = static_cast<Index>(k + 1);
    l.grid = {in_grid.rows / s.field.rows, in_grid.cols / s.field.cols};
    if (s.grid && !(*s.grid == l.grid))
      fail(ErrorKind::architecture,
           where + "declared grid " + to_string(*s.grid) + " but the tiling gives " + to_string(l.grid));
    l.field = s.field;
    l.field_pixels = {s.field.rows * cell_pixels.rows, s.field.cols * cell_pixels.cols};
    l.input_dim = s.field.area() * cell_dim;
    Index pre = l.input_dim;
    if (s.pca_dims) {
      require(*s.pca_dims >= 1 && *s.pca_dims <= l.input_dim, ErrorKind::architecture,
              where + "PCA dimension " + std::to_string(*s.pca_dims) + " outside [1, " + std::to_string(l.input_dim) +
                  "]");
      l.pca_dim = *s.pca_dims;
      pre = *s.pca_dims;
    }
    try {
      l.expanded_dim = expanded_dim(s.expansion, pre);
    } catch (const Error& e) {
      fail(ErrorKind::architecture, where + e.message());
    }
    require(s.out_dims >= 1 && s.out_dims <= l.expanded_dim, ErrorKind::architecture,
            where + "output dimension " + std::to_string(s.out_dims) + " outside [1, " +
                std::to_string(l.expanded_dim) + "]");
    l.output_dim = s.out_dims;
    rep.layers.push_back(l);
    in_grid = l.grid;
    cell_pixels = l.field_pixels;
    cell_dim = s.out_dims;
  }
  return rep;
}

/// The 8-layer face-image network: 8×8-pixel first-layer fields with PCA to
/// 50 components, pairwise vertical/horizontal merges, and a final node
/// reducing 40 features to 6.
inline std::vector<LayerSpec> table1_architecture() {
  const auto expo = ExpansionSpec::zero_eight_expo();
  std::vector<LayerSpec> s;
  s.push_back({{8, 8}, {}, Shape2{8, 8}, expo, 50, 40});
  const Shape2 merges[] = {{2, 1}, {1, 2}, {2, 1}, {1, 2}, {2, 1}, {1, 2}};
  const Shape2 grids[] = {{4, 8}, {4, 4}, {2, 4}, {2, 2}, {1, 2}, {1, 1}};
  for (int k = 0; k < 6; ++k) s.push_back({merges[k], {}, grids[k], expo, {}, 40});
  s.push_back({{1, 1}, {}, Shape2{1, 1}, expo, {}, 6});
  return s;
}

// ---------------------------------------------------------------------------

/// Expansion, optional PCA in front of it, then linear GSFA.
struct GsfaNode {
  std::optional<PcaBasis> pca;
  ExpansionSpec expansion;
  GsfaModel gsfa;

  Index input_dim = 0;

  Index output_dim() const { return gsfa.output_dim(); }
};

inline GsfaNode train_node(const Matrix& x, const TrainingGraph& g, std::optional<Index> pca_dims,
                           const ExpansionSpec& expansion, Index out_dims, const GsfaOptions& opts = {}) {
  GsfaNode node;
  node.expansion = expansion;
  node.input_dim = x.rows();
  Matrix z;
  if (pca_dims) {
    auto r = pca_reduce(x, g.vertex_weights(), *pca_dims);
    node.pca = std::move(r.basis);
    z = expand(r.reduced, expansion);
  } else {
    z = expand(x, expansion);
  }
  node.gsfa = train_gsfa(z, g, out_dims, opts);
  return node;
}

inline Matrix node_extract(const GsfaNode& node, const Matrix& x) {
  require(x.rows() == node.input_dim, ErrorKind::dimension,
          "node expects " + std::to_string(node.input_dim) + " inputs, got " + std::to_string(x.rows()));
  if (node.pca) return extract_features(node.gsfa, expand(pca_project(*node.pca, x), node.expansion));
  return extract_features(node.gsfa, expand(x, node.expansion));
}

struct HgsfaNetwork {
  Shape2 input_shape;
  std::vector<LayerSpec> layers;
  ArchitectureReport report;
  std::vector<std::vector<GsfaNode>> nodes;  // per layer, row-major over the node grid

  Index output_dim() const { return report.output_dim(); }
};

namespace detail {
// Layer data: rows are grouped by cell (row-major over the grid), each cell
// contributing `cell_dim` consecutive rows.
inline Matrix gather_field(const Matrix& data, Shape2 in_grid, Index cell_dim, Shape2 field, Index node_r,
                           Index node_c) {
  Matrix out(field.area() * cell_dim, data.cols());
  Index row = 0;
  for (Index i = 0; i < field.rows; ++i)
    for (Index j = 0; j < field.cols; ++j) {
      const Index cell = (node_r * field.rows + i) * in_grid.cols + (node_c * field.cols + j);
      out.middleRows(row, cell_dim) = data.middleRows(cell * cell_dim, cell_dim);
      row += cell_dim;
    }
  return out;
}

inline std::string node_name(std::size_t layer, Index r, Index c) {
  return "layer " + std::to_string(layer + 1) + " node (" + std::to_string(r) + "," + std::to_string(c) + ")";
}

template <typename F>
Matrix run_layers(const HgsfaNetwork& net, const Matrix& images, F&& per_node) {
  require(images.rows() == net.input_shape.area(), ErrorKind::dimension,
          "images have " + std::to_string(images.rows()) + " pixels, network expects " + to_string(net.input_shape));
  Matrix data = images;
  Shape2 in_grid = net.input_shape;
  Index cell_dim = 1;
  for (std::size_t k = 0; k < net.report.layers.size(); ++k) {
    const auto& l = net.report.layers[k];
    Matrix next(l.grid.area() * l.output_dim, images.cols());
    for (Index r = 0; r < l.grid.rows; ++r)
      for (Index c = 0; c < l.grid.cols; ++c) {
        const Matrix in = gather_field(data, in_grid, cell_dim, l.field, r, c);
        const Index idx = r * l.grid.cols + c;
        try {
          next.middleRows(idx * l.output_dim, l.output_dim) = per_node(k, idx, in);
        } catch (const Error& e) {
          throw Error(e.kind(), node_name(k, r, c) + ": " + e.message());
        }
      }
    data = std::move(next);
    in_grid = l.grid;
    cell_dim = l.output_dim;
  }
  return data;
}
}  // namespace detail

/// Trains the network bottom-up. Every node uses the same graph over its own
/// receptive-field data. Images are columns of H·W pixels in row-major order.
inline HgsfaNetwork train_hgsfa(const Matrix& images, const TrainingGraph& g, const std::vector<LayerSpec>& specs,
                                Shape2 input_shape, const GsfaOptions& opts = {}) {
  HgsfaNetwork net;
  net.input_shape = input_shape;
  net.layers = specs;
  net.report = validate_architecture(specs, input_shape);
  require(images.cols() == g.size(), ErrorKind::dimension,
          "graph has " + std::to_string(g.size()) + " vertices but there are " + std::to_string(images.cols()) +
              " images");
  net.nodes.resize(specs.size());
  detail::run_layers(net, images, [&](std::size_t k, Index idx, const Matrix& in) -> Matrix {
    const auto& s = specs[k];
    GsfaNode node = train_node(in, g, s.pca_dims, s.expansion, s.out_dims, opts);
    Matrix y = node_extract(node, in);
    net.nodes[k].push_back(std::move(node));
    (void)idx;
    return y;
  });
  return net;
}

inline Matrix network_extract(const HgsfaNetwork& net, const Matrix& images) {
  return detail::run_layers(net, images, [&](std::size_t k, Index idx, const Matrix& in) -> Matrix {
    return node_extract(net.nodes[k][static_cast<std::size_t>(idx)], in);
  });
}

}  // namespace gsfa
