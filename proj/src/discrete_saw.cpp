#include "parafermion/discrete_saw.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "parafermion/error.hpp"
#include "parafermion/io.hpp"

namespace parafermion::discrete_saw {

namespace {

constexpr std::array<Cell, 6> kCellNeighbors = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}}};

LatticePoint operator+(LatticePoint a, LatticePoint b) { return {a.X + b.X, a.Y + b.Y}; }

LatticePoint center_of(Cell c) { return {2 * c.q + c.r, 3 * c.r}; }

LatticePoint doubled_mid(LatticePoint v, int k) {
  return {2 * v.X + kDirections[k].X, 2 * v.Y + kDirections[k].Y};
}

bool connected(const std::vector<Cell>& cells) {
  const std::set<Cell> all(cells.begin(), cells.end());
  std::set<Cell> seen{cells.front()};
  std::queue<Cell> todo;
  todo.push(cells.front());
  while (!todo.empty()) {
    const Cell c = todo.front();
    todo.pop();
    for (const auto& n : kCellNeighbors) {
      const Cell d{c.q + n.q, c.r + n.r};
      if (all.count(d) && seen.insert(d).second) todo.push(d);
    }
  }
  return seen.size() == all.size();
}

// Direction of travel from mid-edge m into vertex v.
int entry_direction(const HexDomain& domain, int v, int m) {
  const int s = domain.slot(v, m);
  return (domain.vertices[v].directions[s] + 3) % 6;
}

}  // namespace

Complex embed_vertex(LatticePoint p) {
  return {std::numbers::sqrt3 / 2.0 * p.X, (p.Y + 2) / 2.0};
}

Complex embed_mid_edge(LatticePoint doubled) {
  return {std::numbers::sqrt3 / 4.0 * doubled.X, (doubled.Y + 4) / 4.0};
}

std::vector<int> HexDomain::boundary_mid_edges() const {
  std::vector<int> out;
  for (std::size_t m = 0; m < mid_edges.size(); ++m) {
    if (mid_edges[m].boundary) out.push_back(static_cast<int>(m));
  }
  return out;
}

int HexDomain::find_vertex(LatticePoint p) const {
  const auto it = vertex_index.find(p);
  return it == vertex_index.end() ? -1 : it->second;
}

int HexDomain::find_mid_edge(LatticePoint doubled) const {
  const auto it = mid_edge_index.find(doubled);
  return it == mid_edge_index.end() ? -1 : it->second;
}

int HexDomain::slot(int v, int m) const {
  const auto& ms = vertices[v].mid_edges;
  for (int s = 0; s < 3; ++s) {
    if (ms[s] == m) return s;
  }
  return -1;
}

int HexDomain::other_vertex(int m, int v) const {
  const auto& vs = mid_edges[m].vertices;
  return vs[0] == v ? vs[1] : vs[0];
}

HexDomain build_domain(std::vector<Cell> cells) {
  require(!cells.empty(), ErrorCode::kInvalidArgument, "domain has no cells");
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  require(connected(cells), ErrorCode::kInvalidArgument, "domain cells are not connected");

  // Corner k of a cell has lattice directions k, k+2, k+4: parity k % 2.
  std::map<LatticePoint, int> parity;
  for (const auto& c : cells) {
    for (int k = 0; k < 6; ++k) parity.emplace(center_of(c) + kDirections[k], k % 2);
  }

  HexDomain d;
  d.cells = cells;
  auto by_row = [](LatticePoint a, LatticePoint b) {
    return std::tie(a.Y, a.X) < std::tie(b.Y, b.X);
  };
  std::vector<LatticePoint> points;
  for (const auto& [p, _] : parity) points.push_back(p);
  std::sort(points.begin(), points.end(), by_row);

  std::vector<LatticePoint> mids;
  for (const auto& p : points) {
    for (int k = parity[p]; k < 6; k += 2) mids.push_back(doubled_mid(p, k));
  }
  std::sort(mids.begin(), mids.end(), by_row);
  mids.erase(std::unique(mids.begin(), mids.end()), mids.end());

  for (std::size_t i = 0; i < points.size(); ++i) {
    d.vertex_index[points[i]] = static_cast<int>(i);
    d.vertices.push_back({points[i], embed_vertex(points[i]), {}, {}});
  }
  for (std::size_t i = 0; i < mids.size(); ++i) {
    d.mid_edge_index[mids[i]] = static_cast<int>(i);
    d.mid_edges.push_back({mids[i], embed_mid_edge(mids[i]), {-1, -1}, true});
  }

  for (std::size_t v = 0; v < points.size(); ++v) {
    std::array<std::pair<int, int>, 3> incident;
    int n = 0;
    for (int k = parity[points[v]]; k < 6; k += 2) {
      const int m = d.mid_edge_index.at(doubled_mid(points[v], k));
      incident[n++] = {m, k};
      auto& me = d.mid_edges[m];
      if (me.vertices[0] < 0) {
        me.vertices[0] = static_cast<int>(v);
      } else {
        me.vertices[1] = static_cast<int>(v);
        me.boundary = false;
        ++d.interior_edges;
      }
    }
    std::sort(incident.begin(), incident.end());
    for (int s = 0; s < 3; ++s) {
      d.vertices[v].mid_edges[s] = incident[s].first;
      d.vertices[v].directions[s] = incident[s].second;
    }
  }
  return d;
}

HexDomain named_domain(const std::string& name) {
  if (name == "cell") return build_domain({{0, 0}});
  if (name == "flower") {
    std::vector<Cell> cells{{0, 0}};
    for (const auto& n : kCellNeighbors) cells.push_back(n);
    return build_domain(cells);
  }
  if (name == "block" || name.rfind("block:", 0) == 0) {
    int w = 2;
    int h = 2;
    if (name != "block") {
      char sep = 0;
      std::istringstream in(name.substr(6));
      require(static_cast<bool>(in >> w >> sep >> h) && sep == ':' && in.peek() == EOF && w > 0 &&
                  h > 0,
              ErrorCode::kInvalidArgument, "block shape must be block:W:H, got '" + name + "'");
    }
    std::vector<Cell> cells;
    for (int r = 0; r < h; ++r) {
      for (int q = 0; q < w; ++q) cells.push_back({q, r});
    }
    return build_domain(cells);
  }
  fail(ErrorCode::kInvalidArgument, "unknown domain shape '" + name + "'");
}

std::vector<Cell> parse_cells(const std::string& text) {
  std::vector<Cell> cells;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    std::istringstream fields(line);
    Cell c;
    if (!(fields >> c.q)) continue;
    std::string rest;
    require(static_cast<bool>(fields >> c.r) && !(fields >> rest), ErrorCode::kInvalidArgument,
            "domain line " + std::to_string(lineno) + ": expected 'q r'");
    cells.push_back(c);
  }
  return cells;
}

HexDomain load_domain(const std::string& spec_or_path) {
  std::ifstream file(spec_or_path);
  if (!file) return named_domain(spec_or_path);
  std::stringstream buf;
  buf << file.rdbuf();
  return build_domain(parse_cells(buf.str()));
}

HexDomain mirror_domain(const HexDomain& domain) {
  std::vector<Cell> cells;
  for (const auto& c : domain.cells) cells.push_back({-c.q - c.r, c.r});
  return build_domain(cells);
}

int mirror_mid_edge(const HexDomain& domain, const HexDomain& mirrored, int m) {
  const auto p = domain.mid_edges.at(m).doubled;
  return mirrored.find_mid_edge({-p.X, p.Y});
}

double SAWPath::turning() const { return turns * std::numbers::pi / 3.0; }

int turn_at(int direction_in, int direction_out) {
  return ((direction_out - direction_in + 9) % 6) - 3;
}

void for_each_saw(const HexDomain& domain, int w, std::size_t max_len,
                  const std::function<void(const SAWPath&)>& visit) {
  require(w >= 0 && static_cast<std::size_t>(w) < domain.mid_edges.size() &&
              domain.mid_edges[w].boundary,
          ErrorCode::kInvalidArgument, "start must be a boundary mid-edge");
  std::vector<char> used(domain.vertices.size(), 0);
  SAWPath path;
  path.start = w;

  // `v` is entered through mid-edge `m` travelling in direction `dir`.
  std::function<void(int, int, int)> grow = [&](int v, int m, int dir) {
    used[v] = 1;
    path.vertices.push_back(v);
    const auto& vx = domain.vertices[v];
    for (int s = 0; s < 3; ++s) {
      const int next = vx.mid_edges[s];
      if (next == m) continue;
      const int turn = turn_at(dir, vx.directions[s]);
      path.mid_edges.push_back(next);
      path.turns += turn;
      visit(path);
      const int u = domain.other_vertex(next, v);
      if (u >= 0 && !used[u] && path.length() < max_len) grow(u, next, vx.directions[s]);
      path.turns -= turn;
      path.mid_edges.pop_back();
    }
    path.vertices.pop_back();
    used[v] = 0;
  };

  visit(path);
  if (max_len >= 1) {
    const int v0 = domain.mid_edges[w].vertices[0];
    grow(v0, w, entry_direction(domain, v0, w));
  }
}

std::vector<SAWPath> enumerate_saws(const HexDomain& domain, int w, std::size_t max_len) {
  std::vector<SAWPath> out;
  for_each_saw(domain, w, max_len, [&](const SAWPath& p) { out.push_back(p); });
  return out;
}

double polyline_turning(const HexDomain& domain, const SAWPath& path) {
  std::vector<Complex> pts{domain.mid_edges[path.start].z};
  for (std::size_t k = 0; k < path.vertices.size(); ++k) {
    pts.push_back(domain.vertices[path.vertices[k]].z);
    pts.push_back(domain.mid_edges[path.mid_edges[k]].z);
  }
  double total = 0.0;
  for (std::size_t k = 2; k < pts.size(); ++k) {
    total += std::arg((pts[k] - pts[k - 1]) / (pts[k - 1] - pts[k - 2]));
  }
  return total;
}

double turning_number(const HexDomain& domain, const SAWPath& path) {
  const double combinatorial = path.turning();
  const double geometric = polyline_turning(domain, path);
  if (std::abs(combinatorial - geometric) > 1e-9) {
    fail(ErrorCode::kNumerical, "turning number mismatch: " + io::format_double(combinatorial) +
                                    " by turns vs " + io::format_double(geometric) +
                                    " by argument tracking");
  }
  return combinatorial;
}

SAWPath path_from_mid_edges(const HexDomain& domain, const std::vector<int>& mids) {
  require(!mids.empty(), ErrorCode::kInvalidArgument, "path needs a start mid-edge");
  const int n = static_cast<int>(domain.mid_edges.size());
  for (int m : mids) {
    require(m >= 0 && m < n, ErrorCode::kInvalidArgument, "mid-edge index out of range");
  }
  require(domain.mid_edges[mids[0]].boundary, ErrorCode::kInvalidArgument,
          "path must start on a boundary mid-edge");
  SAWPath path;
  path.start = mids[0];
  std::vector<char> used(domain.vertices.size(), 0);
  int v = domain.mid_edges[mids[0]].vertices[0];
  int dir = entry_direction(domain, v, mids[0]);
  for (std::size_t k = 1; k < mids.size(); ++k) {
    require(v >= 0, ErrorCode::kInvalidArgument, "path continues past a boundary mid-edge");
    require(!used[v], ErrorCode::kInvalidArgument, "path revisits a vertex");
    const int s = domain.slot(v, mids[k]);
    require(s >= 0 && mids[k] != mids[k - 1], ErrorCode::kInvalidArgument,
            "consecutive mid-edges do not share a vertex");
    used[v] = 1;
    const int out_dir = domain.vertices[v].directions[s];
    path.vertices.push_back(v);
    path.mid_edges.push_back(mids[k]);
    path.turns += turn_at(dir, out_dir);
    dir = out_dir;
    v = domain.other_vertex(mids[k], v);
  }
  return path;
}

DiscreteField discrete_observable(const HexDomain& domain, int w, double x, double sigma,
                                  std::size_t max_len) {
  require(x > 0.0, ErrorCode::kInvalidArgument, "x must be positive");
  if (max_len == 0) max_len = domain.vertices.size();

  DiscreteField field;
  field.x = x;
  field.sigma = sigma;
  field.start = w;
  field.max_len = max_len;
  std::vector<std::complex<long double>> sums(domain.mid_edges.size());
  std::vector<long double> plain(domain.mid_edges.size());

  // Phase and weight depend only on (turns, length); tabulate both.
  const int span = static_cast<int>(max_len) + 1;
  std::vector<std::complex<long double>> phase(2 * span + 1);
  for (int n = -span; n <= span; ++n) {
    const long double angle = -static_cast<long double>(sigma) * n * std::numbers::pi_v<long double> / 3;
    phase[n + span] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<long double> weight(max_len + 1, 1.0L);
  for (std::size_t l = 1; l <= max_len; ++l) weight[l] = weight[l - 1] * x;

  for_each_saw(domain, w, max_len, [&](const SAWPath& p) {
    const int z = p.end();
    sums[z] += phase[p.turns + span] * weight[p.length()];
    plain[z] += weight[p.length()];
    ++field.walks;
    if (p.length() == max_len) {
      const int u = domain.other_vertex(z, p.vertices.back());
      if (u >= 0 && std::find(p.vertices.begin(), p.vertices.end(), u) == p.vertices.end()) {
        field.truncated = true;
      }
    }
  });

  field.values.resize(sums.size());
  field.unsigned_sums.resize(sums.size());
  for (std::size_t m = 0; m < sums.size(); ++m) {
    field.values[m] = {static_cast<double>(sums[m].real()), static_cast<double>(sums[m].imag())};
    field.unsigned_sums[m] = static_cast<double>(plain[m]);
  }
  return field;
}

Complex local_relation_residual(const HexDomain& domain, const DiscreteField& field, int v) {
  require(v >= 0 && static_cast<std::size_t>(v) < domain.vertices.size(),
          ErrorCode::kInvalidArgument, "vertex is not in the domain");
  const auto& vx = domain.vertices[v];
  Complex total = 0.0;
  for (int m : vx.mid_edges) total += (domain.mid_edges[m].z - vx.z) * field.values[m];
  return total;
}

void write_field_csv(const HexDomain& domain, const DiscreteField& field, std::ostream& out) {
  io::CsvWriter csv(out, {"x", "y", "re", "im", "unsigned"});
  for (std::size_t m = 0; m < domain.mid_edges.size(); ++m) {
    const auto z = domain.mid_edges[m].z;
    csv.field(z.real()).field(z.imag()).field(field.values[m].real());
    csv.field(field.values[m].imag()).field(field.unsigned_sums[m]);
    csv.end_row();
  }
}

void write_residual_csv(const HexDomain& domain, const DiscreteField& field, std::ostream& out) {
  io::CsvWriter csv(out, {"x", "y", "re", "im", "abs"});
  for (std::size_t v = 0; v < domain.vertices.size(); ++v) {
    const auto r = local_relation_residual(domain, field, static_cast<int>(v));
    const auto z = domain.vertices[v].z;
    csv.field(z.real()).field(z.imag()).field(r.real()).field(r.imag()).field(std::abs(r));
    csv.end_row();
  }
}

}  // namespace parafermion::discrete_saw
