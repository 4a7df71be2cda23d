#include "dexgrasp/geom/ply.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dexgrasp::geom {
namespace {

static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated PLY body");
  return v;
}

}  // namespace

void write_ply(const std::filesystem::path& path, const std::vector<Vec3>& points,
               const std::vector<PlyColumn>& columns) {
  for (const auto& c : columns) {
    if (c.values.size() != points.size()) throw std::invalid_argument("PLY column length mismatch: " + c.name);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PLY: " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << points.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  for (const auto& c : columns) out << "property " << (c.is_uchar ? "uchar " : "float ") << c.name << "\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    put<float>(out, static_cast<float>(points[i].x()));
    put<float>(out, static_cast<float>(points[i].y()));
    put<float>(out, static_cast<float>(points[i].z()));
    for (const auto& c : columns) {
      if (c.is_uchar) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(c.values[i]));
      } else {
        put<float>(out, static_cast<float>(c.values[i]));
      }
    }
  }
}

void write_cloud_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  PlyColumn flag{"flag", true, {}};
  flag.values.assign(cloud.foreground.begin(), cloud.foreground.end());
  write_ply(path, cloud.points, {flag});
}

PointCloud read_cloud_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PLY: " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "ply") throw std::runtime_error("not a PLY file: " + path.string());
  std::size_t count = 0;
  struct Prop {
    std::string type, name;
  };
  std::vector<Prop> props;
  bool binary_le = false;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (tag == "element") {
      std::string name;
      ls >> name >> count;
      if (name != "vertex") throw std::runtime_error("unsupported PLY element: " + name);
    } else if (tag == "property") {
      Prop p;
      ls >> p.type >> p.name;
      props.push_back(p);
    }
  }
  if (!binary_le) throw std::runtime_error("only binary_little_endian PLY is supported");
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 p = Vec3::Zero();
    std::uint8_t flag = 0;
    for (const auto& prop : props) {
      double v = 0.0;
      if (prop.type == "float" || prop.type == "float32") v = get<float>(in);
      else if (prop.type == "double" || prop.type == "float64") v = get<double>(in);
      else if (prop.type == "uchar" || prop.type == "uint8") v = get<std::uint8_t>(in);
      else if (prop.type == "int" || prop.type == "int32") v = get<std::int32_t>(in);
      else throw std::runtime_error("unsupported PLY property type: " + prop.type);
      if (prop.name == "x") p.x() = v;
      else if (prop.name == "y") p.y() = v;
      else if (prop.name == "z") p.z() = v;
      else if (prop.name == "flag") flag = static_cast<std::uint8_t>(v);
    }
    cloud.points.push_back(p);
    cloud.foreground.push_back(flag);
  }
  return cloud;
}

}  // namespace dexgrasp::geom
