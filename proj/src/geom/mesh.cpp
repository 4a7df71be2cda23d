#include "dexgrasp/geom/mesh.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dexgrasp::geom {

Vec3 Mesh::face_normal(int tri) const {
  const Vec3 n = (vertex(tri, 1) - vertex(tri, 0)).cross(vertex(tri, 2) - vertex(tri, 0));
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
}

double Mesh::face_area(int tri) const {
  return 0.5 * (vertex(tri, 1) - vertex(tri, 0)).cross(vertex(tri, 2) - vertex(tri, 0)).norm();
}

double Mesh::surface_area() const {
  double a = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) a += face_area(t);
  return a;
}

Aabb Mesh::bounds() const {
  Aabb b;
  for (const auto& v : vertices) b.extend(v);
  return b;
}

Mesh Mesh::transformed(const Transform& t) const {
  Mesh out = *this;
  for (auto& v : out.vertices) v = t * v;
  return out;
}

Mesh Mesh::scaled(const Vec3& s) const {
  Mesh out = *this;
  for (auto& v : out.vertices) v = v.cwiseProduct(s);
  // A negative determinant flips orientation; restore outward winding.
  if (s.prod() < 0.0) {
    for (auto& t : out.triangles) std::swap(t[1], t[2]);
  }
  return out;
}

void Mesh::append(const Mesh& other) {
  const int base = static_cast<int>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  for (const auto& t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

Mesh Mesh::box(const Vec3& extents) {
  const Vec3 h = 0.5 * extents;
  Mesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  // Outward CCW winding.
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6},   // -z, +z
                 {0, 1, 4}, {1, 5, 4}, {2, 6, 3}, {3, 6, 7},   // -y, +y
                 {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};  // -x, +x
  return m;
}

Mesh Mesh::icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& v : m.vertices) v.normalize();
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      const int idx = static_cast<int>(m.vertices.size()) - 1;
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.triangles.size() * 4);
    for (const auto& tri : m.triangles) {
      const int a = midpoint(tri[0], tri[1]);
      const int b = midpoint(tri[1], tri[2]);
      const int c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    m.triangles = std::move(next);
  }
  for (auto& v : m.vertices) v *= radius;
  return m;
}

Mesh Mesh::pyramid(double base, double height) {
  const double h = 0.5 * base;
  Mesh m;
  m.vertices = {{-h, -h, 0}, {h, -h, 0}, {h, h, 0}, {-h, h, 0}, {0, 0, height}};
  m.triangles = {{0, 2, 1}, {0, 3, 2}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  return m;
}

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh: " + path.string());
  Mesh m;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      ls >> v.x() >> v.y() >> v.z();
      if (!ls) throw std::runtime_error("malformed vertex in " + path.string());
      m.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        int i = std::stoi(tok.substr(0, tok.find('/')));
        if (i < 0) i = static_cast<int>(m.vertices.size()) + i + 1;
        idx.push_back(i - 1);
      }
      if (idx.size() < 3) throw std::runtime_error("face with fewer than 3 vertices in " + path.string());
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) m.triangles.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  for (const auto& t : m.triangles) {
    for (int i : t) {
      if (i < 0 || i >= static_cast<int>(m.vertices.size()))
        throw std::runtime_error("face index out of range in " + path.string());
    }
  }
  return m;
}

void save_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh: " + path.string());
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

}  // namespace dexgrasp::geom
