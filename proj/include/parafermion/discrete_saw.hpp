#pragma once

#include <array>
#include <complex>
#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace parafermion::discrete_saw {

using Complex = std::complex<double>;

// Integer lattice coordinates: the embedded point is (sqrt(3)/2 X, (Y + 2)/2),
// so edges have unit length and the bottom corner of cell (0, 0) sits at the
// origin. Mid-edges use doubled coordinates (2X + dX, 2Y + dY).
struct LatticePoint {
  int X = 0;
  int Y = 0;
  auto operator<=>(const LatticePoint&) const = default;
};

// Axial coordinates of a pointy-top hexagonal cell.
struct Cell {
  int q = 0;
  int r = 0;
  auto operator<=>(const Cell&) const = default;
};

// Lattice edge direction k points at angle 30 + 60k degrees.
inline constexpr std::array<LatticePoint, 6> kDirections = {
    {{1, 1}, {0, 2}, {-1, 1}, {-1, -1}, {0, -2}, {1, -1}}};

Complex embed_vertex(LatticePoint p);
Complex embed_mid_edge(LatticePoint doubled);

struct Vertex {
  LatticePoint lattice;
  Complex z;
  std::array<int, 3> mid_edges{};   // ordered by mid-edge index
  std::array<int, 3> directions{};  // direction from this vertex to each mid-edge
};

struct MidEdge {
  LatticePoint doubled;
  Complex z;
  std::array<int, 2> vertices{-1, -1};  // vertices[1] == -1 on a boundary half-edge
  bool boundary = false;
};

struct HexDomain {
  std::vector<Cell> cells;
  std::vector<Vertex> vertices;    // sorted by (Y, X)
  std::vector<MidEdge> mid_edges;  // sorted by doubled (Y, X)
  std::size_t interior_edges = 0;

  std::vector<int> boundary_mid_edges() const;
  int find_vertex(LatticePoint p) const;         // -1 if absent
  int find_mid_edge(LatticePoint doubled) const;  // -1 if absent
  // Local slot (0..2) of mid-edge m at vertex v; -1 if not incident.
  int slot(int v, int m) const;
  // The endpoint of m other than v; -1 for a boundary half-edge.
  int other_vertex(int m, int v) const;

  std::map<LatticePoint, int> vertex_index;
  std::map<LatticePoint, int> mid_edge_index;
};

// Vertices are all corners of the cells; edges join every pair of adjacent
// vertices; each vertex's remaining lattice directions become boundary
// half-edges. Throws ErrorCode::kInvalidArgument on an empty or
// disconnected cell set.
HexDomain build_domain(std::vector<Cell> cells);

// "cell", "flower", "block" (2x2) or "block:W:H" parallelograms.
HexDomain named_domain(const std::string& name);

// Lines "q r"; '#' starts a comment.
std::vector<Cell> parse_cells(const std::string& text);
HexDomain load_domain(const std::string& spec_or_path);

// Reflection X -> -X. Cells map as (q, r) -> (-q - r, r).
HexDomain mirror_domain(const HexDomain& domain);
int mirror_mid_edge(const HexDomain& domain, const HexDomain& mirrored, int m);

struct SAWPath {
  int start = -1;
  std::vector<int> vertices;   // visited in order; length = vertices.size()
  std::vector<int> mid_edges;  // mid_edges[k] is left from vertices[k]
  int turns = 0;               // sum of per-vertex turns in units of pi/3

  std::size_t length() const { return vertices.size(); }
  int end() const { return mid_edges.empty() ? start : mid_edges.back(); }
  double turning() const;
};

// Every self-avoiding walk from boundary mid-edge w that visits at most
// max_len vertices, including the empty walk at w, in depth-first order with
// exits taken in mid-edge index order.
void for_each_saw(const HexDomain& domain, int w, std::size_t max_len,
                  const std::function<void(const SAWPath&)>& visit);
std::vector<SAWPath> enumerate_saws(const HexDomain& domain, int w, std::size_t max_len);

// Turn at a vertex in units of pi/3 (+1 left, -1 right).
int turn_at(int direction_in, int direction_out);

// Sum of per-vertex turns, cross-checked against the accumulated argument of
// the embedded polyline. Throws ErrorCode::kNumerical on disagreement > 1e-9.
double turning_number(const HexDomain& domain, const SAWPath& path);
double polyline_turning(const HexDomain& domain, const SAWPath& path);

// Builds a path from its mid-edge sequence (start first). Throws
// ErrorCode::kInvalidArgument if the sequence is not a self-avoiding walk.
SAWPath path_from_mid_edges(const HexDomain& domain, const std::vector<int>& mids);

struct DiscreteField {
  double x = 0.0;
  double sigma = 0.0;
  int start = -1;
  std::size_t max_len = 0;
  bool truncated = false;  // some walk was cut off by max_len
  std::size_t walks = 0;
  std::vector<Complex> values;          // by mid-edge index
  std::vector<double> unsigned_sums;    // sum of x^length
};

// F(z) = sum over walks w -> z of exp(-i sigma W) x^length. max_len = 0 means
// the number of vertices (exhaustive).
DiscreteField discrete_observable(const HexDomain& domain, int w, double x, double sigma,
                                  std::size_t max_len = 0);

// sum over the three mid-edges p of v of (p - v) F(p).
Complex local_relation_residual(const HexDomain& domain, const DiscreteField& field, int v);

// CSV: x,y,re,im,unsigned
void write_field_csv(const HexDomain& domain, const DiscreteField& field, std::ostream& out);
// CSV: x,y,re,im,abs
void write_residual_csv(const HexDomain& domain, const DiscreteField& field, std::ostream& out);

}  // namespace parafermion::discrete_saw
