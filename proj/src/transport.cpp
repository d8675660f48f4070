#include "somchange/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "somchange/error.hpp"

namespace somchange {

namespace {

// Transportation simplex (MODI pricing) on a balanced instance. The basis is
// kept as a spanning tree over row nodes [0, rows) and column nodes
// [rows, rows + cols), one edge per basic cell, which makes every basis
// non-singular even when some basic cells carry zero flow.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand, Matrix cost)
      : rows_(supply.size()), cols_(demand.size()), cost_(std::move(cost)),
        adjacency_(rows_ + cols_) {
    northwest_corner(std::move(supply), std::move(demand));
  }

  void solve() {
    double max_cost = 0.0;
    for (double c : cost_.values()) max_cost = std::max(max_cost, std::abs(c));
    const double eps = 1e-12 * std::max(1.0, max_cost);
    const std::size_t max_iterations = 50 * rows_ * cols_ + 1000;

    std::vector<double> u(rows_), v(cols_);
    std::size_t degenerate_streak = 0;
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
      compute_potentials(u, v);
      // Dantzig pricing normally; Bland's first-improving rule during runs of
      // degenerate pivots, which rules out cycling.
      const bool bland = degenerate_streak > 32;
      std::size_t enter_i = rows_, enter_j = cols_;
      double best = -eps;
      for (std::size_t i = 0; i < rows_ && !(bland && enter_i < rows_); ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
          const double r = cost_(i, j) - u[i] - v[j];
          if (r < best) {
            if (is_basic(i, j)) continue;
            enter_i = i;
            enter_j = j;
            if (bland) break;
            best = r;
          }
        }
      }
      if (enter_i == rows_) return;
      const double theta = pivot(enter_i, enter_j);
      degenerate_streak = theta <= 1e-15 ? degenerate_streak + 1 : 0;
    }
    fail(ErrorKind::Numeric, "transportation simplex did not converge");
  }

  struct Cell {
    std::size_t i;
    std::size_t j;
    double x;
  };

  const std::vector<Cell>& basis() const { return basis_; }

 private:
  void northwest_corner(std::vector<double> supply, std::vector<double> demand) {
    std::size_t i = 0, j = 0;
    basis_.reserve(rows_ + cols_ - 1);
    while (true) {
      const double x = std::min(supply[i], demand[j]);
      add_cell(i, j, x);
      supply[i] -= x;
      demand[j] -= x;
      if (i == rows_ - 1 && j == cols_ - 1) break;
      // Exactly one index advances per step, giving rows + cols - 1 cells.
      if (i == rows_ - 1) {
        ++j;
      } else if (j == cols_ - 1) {
        ++i;
      } else if (supply[i] <= demand[j]) {
        ++i;
      } else {
        ++j;
      }
    }
    basic_mask_.assign(rows_ * cols_, false);
    for (const auto& c : basis_) basic_mask_[c.i * cols_ + c.j] = true;
  }

  void add_cell(std::size_t i, std::size_t j, double x) {
    const std::size_t id = basis_.size();
    basis_.push_back({i, j, std::max(0.0, x)});
    adjacency_[i].push_back(id);
    adjacency_[rows_ + j].push_back(id);
  }

  bool is_basic(std::size_t i, std::size_t j) const { return basic_mask_[i * cols_ + j]; }

  std::size_t other_end(std::size_t node, const Cell& c) const {
    return node < rows_ ? rows_ + c.j : c.i;
  }

  void compute_potentials(std::vector<double>& u, std::vector<double>& v) {
    std::vector<bool> seen(rows_ + cols_, false);
    std::vector<std::size_t> stack{0};
    u[0] = 0.0;
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t id : adjacency_[node]) {
        const Cell& c = basis_[id];
        const std::size_t next = other_end(node, c);
        if (seen[next]) continue;
        seen[next] = true;
        if (next < rows_) {
          u[c.i] = cost_(c.i, c.j) - v[c.j];
        } else {
          v[c.j] = cost_(c.i, c.j) - u[c.i];
        }
        stack.push_back(next);
      }
    }
  }

  // Basic cells on the tree path from row node `i` to column node `j`,
  // ordered starting at the row end.
  std::vector<std::size_t> tree_path(std::size_t i, std::size_t j) const {
    const std::size_t target = rows_ + j;
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent_edge(rows_ + cols_, none);
    std::vector<bool> seen(rows_ + cols_, false);
    std::vector<std::size_t> queue{i};
    seen[i] = true;
    for (std::size_t head = 0; head < queue.size() && !seen[target]; ++head) {
      const std::size_t node = queue[head];
      for (std::size_t id : adjacency_[node]) {
        const std::size_t next = other_end(node, basis_[id]);
        if (seen[next]) continue;
        seen[next] = true;
        parent_edge[next] = id;
        queue.push_back(next);
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t node = target; node != i;) {
      const std::size_t id = parent_edge[node];
      path.push_back(id);
      node = other_end(node, basis_[id]);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  double pivot(std::size_t enter_i, std::size_t enter_j) {
    const auto path = tree_path(enter_i, enter_j);
    // Path length is odd; cells at even positions (0, 2, ...) lose flow.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = path.front();
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const Cell& c = basis_[path[p]];
      const auto key = c.i * cols_ + c.j;
      const Cell& l = basis_[leave];
      if (c.x < theta || (c.x == theta && key < l.i * cols_ + l.j)) {
        theta = c.x;
        leave = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      Cell& c = basis_[path[p]];
      c.x = p % 2 == 0 ? std::max(0.0, c.x - theta) : c.x + theta;
    }

    Cell& old = basis_[leave];
    basic_mask_[old.i * cols_ + old.j] = false;
    erase_id(adjacency_[old.i], leave);
    erase_id(adjacency_[rows_ + old.j], leave);
    old = {enter_i, enter_j, theta};
    basic_mask_[enter_i * cols_ + enter_j] = true;
    adjacency_[enter_i].push_back(leave);
    adjacency_[rows_ + enter_j].push_back(leave);
    return theta;
  }

  static void erase_id(std::vector<std::size_t>& ids, std::size_t id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    *it = ids.back();
    ids.pop_back();
  }

  std::size_t rows_;
  std::size_t cols_;
  Matrix cost_;
  std::vector<Cell> basis_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<bool> basic_mask_;
};

void check_weights(std::span<const double> w, const char* what) {
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorKind::InvalidArgument, std::string(what) + " must be finite and non-negative");
  }
}

}  // namespace

GroundDistanceMatrix ground_distances(const Matrix& prototypes) {
  const std::size_t n = prototypes.rows();
  GroundDistanceMatrix g{Matrix(n, n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclidean_distance(prototypes.row(i), prototypes.row(j));
      g.d(i, j) = d;
      g.d(j, i) = d;
      g.max_d = std::max(g.max_d, d);
    }
  }
  return g;
}

GroundDistanceMatrix ground_distances(const Som& som) {
  som.validate();
  return ground_distances(som.prototypes);
}

FlowSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                             const Matrix& cost) {
  check_weights(supply, "supplies");
  check_weights(demand, "demands");
  if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
    fail(ErrorKind::DimensionMismatch, "cost matrix shape does not match supplies and demands");
  }
  for (double c : cost.values()) {
    if (!std::isfinite(c)) fail(ErrorKind::InvalidArgument, "costs must be finite");
  }

  std::vector<std::size_t> src, dst;
  for (std::size_t i = 0; i < supply.size(); ++i) if (supply[i] > 0.0) src.push_back(i);
  for (std::size_t j = 0; j < demand.size(); ++j) if (demand[j] > 0.0) dst.push_back(j);
  FlowSolution out;
  if (src.empty() || dst.empty()) return out;

  std::vector<double> s, t;
  for (auto i : src) s.push_back(supply[i]);
  for (auto j : dst) t.push_back(demand[j]);
  const double ss = std::accumulate(s.begin(), s.end(), 0.0);
  const double tt = std::accumulate(t.begin(), t.end(), 0.0);

  // Unequal totals: a zero-cost dummy node absorbs the excess.
  const bool dummy_col = ss - tt > 1e-14 * std::max(1.0, ss);
  const bool dummy_row = tt - ss > 1e-14 * std::max(1.0, tt);
  if (dummy_col) t.push_back(ss - tt);
  if (dummy_row) s.push_back(tt - ss);

  Matrix c(s.size(), t.size(), 0.0);
  for (std::size_t a = 0; a < src.size(); ++a) {
    for (std::size_t b = 0; b < dst.size(); ++b) c(a, b) = cost(src[a], dst[b]);
  }

  TransportSimplex simplex(std::move(s), std::move(t), std::move(c));
  simplex.solve();

  for (const auto& cell : simplex.basis()) {
    if (cell.i >= src.size() || cell.j >= dst.size() || cell.x <= 0.0) continue;
    out.flows.push_back({src[cell.i], dst[cell.j], cell.x});
  }
  std::sort(out.flows.begin(), out.flows.end(), [](const Flow& a, const Flow& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  for (const auto& f : out.flows) {
    out.total_cost += f.mass * cost(f.from, f.to);
    out.total_flow += f.mass;
  }
  return out;
}

EmdResult solve_emd(const WeightedPattern& p, const WeightedPattern& q, const GroundDistanceMatrix& d) {
  if (p.size() != d.size() || q.size() != d.size()) {
    fail(ErrorKind::DimensionMismatch, "patterns do not belong to the map of the distance matrix");
  }
  if (!p.som_id.empty() && !q.som_id.empty() && p.som_id != q.som_id) {
    fail(ErrorKind::InvalidArgument, "patterns belong to different maps");
  }
  p.validate();
  q.validate();
  EmdResult r;
  r.flow = solve_transport(p.weights, q.weights, d.d);
  r.emd = r.flow.total_flow > 0.0 ? r.flow.total_cost / r.flow.total_flow : 0.0;
  r.emd = std::clamp(r.emd, 0.0, d.max_d);
  return r;
}

ScaledEmd scaled_emd(double emd, const GroundDistanceMatrix& d) {
  if (!(d.max_d > 0.0)) return {0.0, true};
  return {std::clamp(emd / d.max_d, 0.0, 1.0), false};
}

double pemd(const FlowSolution& flow, const GroundDistanceMatrix& d, const Som& som, std::size_t k) {
  if (k >= som.feature_count()) fail(ErrorKind::InvalidArgument, "feature index out of range");
  double work = 0.0;
  double signed_work = 0.0;
  for (const auto& f : flow.flows) {
    const double w = f.mass * d(f.from, f.to);
    work += w;
    signed_work += w * (som.prototypes(f.to, k) - som.prototypes(f.from, k));
  }
  if (work < kZeroWorkThreshold) return 0.0;
  return signed_work / work;
}

PemdVector pemd_all(const FlowSolution& flow, const GroundDistanceMatrix& d, const Som& som) {
  PemdVector out;
  out.values.reserve(som.feature_count());
  for (std::size_t k = 0; k < som.feature_count(); ++k) out.values.push_back(pemd(flow, d, som, k));
  return out;
}

}  // namespace somchange
