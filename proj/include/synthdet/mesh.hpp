#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthdet/vec.hpp"

namespace synthdet {

// Error from a mesh parser, carrying the 1-based source line for text
// formats (0 for binary formats).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line = 0)
      : std::runtime_error(line > 0 ? message + ", line " + std::to_string(line)
                                    : std::move(message)),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Named contiguous range of triangles, used for per-region material
// assignment. Ranges come from OBJ g/o/usemtl tags.
struct SubGroup {
  std::string name;
  std::size_t first_tri = 0;
  std::size_t tri_count = 0;
};

struct Mesh {
  std::vector<Vec3> vertices;              // meters after catalog load
  std::vector<Vec3> normals;               // per-vertex; empty when absent
  std::vector<std::array<int, 3>> triangles;
  std::vector<SubGroup> sub_groups;

  bool has_normals() const { return normals.size() == vertices.size() && !vertices.empty(); }

  Aabb bounds() const {
    Aabb b;
    for (const Vec3& v : vertices) b.expand(v);
    return b;
  }
};

constexpr double kDegenerateTriangleArea = 1e-12;  // m^2

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

// Findings from validate_mesh. Validation never throws; it only reports.
struct ValidationReport {
  std::vector<std::size_t> degenerate_triangles;   // area <= threshold or repeated index
  std::vector<std::size_t> non_finite_vertices;
  std::vector<std::size_t> out_of_range_triangles;

  bool ok() const {
    return degenerate_triangles.empty() && non_finite_vertices.empty() &&
           out_of_range_triangles.empty();
  }
  std::string summary() const;
};

ValidationReport validate_mesh(const Mesh& mesh);

// Serializes to the same OBJ directive subset the parser reads, so
// parse(write(mesh)) reproduces the triangle set.
std::string write_obj(const Mesh& mesh);

}  // namespace synthdet
