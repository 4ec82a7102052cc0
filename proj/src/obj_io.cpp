#include "synthdet/obj_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace synthdet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_coord(std::string_view tok, std::size_t line) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("non-numeric coordinate '" + std::string(tok) + "'", line);
  }
  return value;
}

// Resolves a (possibly negative, 1-based) OBJ index against the current
// element count. Returns a 0-based index.
int resolve_index(long long raw, std::size_t count, std::size_t line) {
  long long idx = raw;
  if (idx < 0) idx = static_cast<long long>(count) + idx + 1;
  if (idx < 1 || idx > static_cast<long long>(count)) {
    throw ParseError("index out of range", line);
  }
  return static_cast<int>(idx - 1);
}

long long parse_int(std::string_view tok, std::size_t line) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("malformed face index '" + std::string(tok) + "'", line);
  }
  return value;
}

}  // namespace

Mesh parse_obj(std::string_view text) {
  Mesh mesh;
  std::vector<Vec3> vn_list;
  // Per-vertex normal index; -1 = unassigned.
  std::vector<int> vertex_normal;

  std::string current_group = "default";
  std::string pending_group;  // sub_groups are built from runs of face tags
  std::vector<std::string> face_tags;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto tokens = split_ws(line);
    const std::string_view directive = tokens[0];

    if (directive == "v") {
      if (tokens.size() < 4) throw ParseError("vertex needs 3 coordinates", line_no);
      mesh.vertices.push_back({parse_coord(tokens[1], line_no), parse_coord(tokens[2], line_no),
                               parse_coord(tokens[3], line_no)});
      vertex_normal.push_back(-1);
    } else if (directive == "vn") {
      if (tokens.size() < 4) throw ParseError("normal needs 3 coordinates", line_no);
      vn_list.push_back({parse_coord(tokens[1], line_no), parse_coord(tokens[2], line_no),
                         parse_coord(tokens[3], line_no)});
    } else if (directive == "f") {
      if (tokens.size() < 4) throw ParseError("face with <3 vertices", line_no);
      std::vector<int> corners;
      corners.reserve(tokens.size() - 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::string_view ref = tokens[i];
        const std::size_t s1 = ref.find('/');
        const std::string_view v_tok = ref.substr(0, s1);
        const int v = resolve_index(parse_int(v_tok, line_no), mesh.vertices.size(), line_no);
        if (s1 != std::string_view::npos) {
          std::string_view rest = ref.substr(s1 + 1);
          const std::size_t s2 = rest.find('/');
          if (s2 != std::string_view::npos) {
            const std::string_view n_tok = rest.substr(s2 + 1);
            if (!n_tok.empty()) {
              const int n = resolve_index(parse_int(n_tok, line_no), vn_list.size(), line_no);
              vertex_normal[v] = n;
            }
          }
        }
        corners.push_back(v);
      }
      for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
        mesh.triangles.push_back({corners[0], corners[i], corners[i + 1]});
        face_tags.push_back(current_group);
      }
    } else if (directive == "g" || directive == "o" || directive == "usemtl") {
      current_group = tokens.size() > 1 ? std::string(tokens[1]) : "default";
    } else if (directive == "mtllib") {
      // material library name only; contents are out of scope
    }
    // all other directives ignored (vt, s, ...)
  }

  // Runs of identical face tags become sub_groups.
  std::size_t run_start = 0;
  for (std::size_t t = 1; t <= face_tags.size(); ++t) {
    if (t == face_tags.size() || face_tags[t] != face_tags[run_start]) {
      mesh.sub_groups.push_back({face_tags[run_start], run_start, t - run_start});
      run_start = t;
    }
  }

  // Normals are kept only when every vertex got one; partial coverage
  // falls back to per-face shading downstream.
  bool full = !mesh.vertices.empty();
  for (int n : vertex_normal) {
    if (n < 0) { full = false; break; }
  }
  if (full && !vn_list.empty()) {
    mesh.normals.reserve(mesh.vertices.size());
    for (int n : vertex_normal) mesh.normals.push_back(normalized(vn_list[n]));
  }
  return mesh;
}

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_obj(buf.str());
}

}  // namespace synthdet
