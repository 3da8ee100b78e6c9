// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/io/ply.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace occ::io {

namespace {

void write_header(std::ostream& out, bool binary, std::size_t vertex_count,
                  std::size_t face_count, bool with_color) {
  out << "ply\n";
  out << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
  out << "element vertex " << vertex_count << "\n";
  const char* scalar = binary ? "double" : "float";
  out << "property " << scalar << " x\n";
  out << "property " << scalar << " y\n";
  out << "property " << scalar << " z\n";
  if (with_color) {
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  if (face_count > 0) {
    out << "element face " << face_count << "\n";
    out << "property list uchar int vertex_indices\n";
  }
  out << "end_header\n";
}

void write_vertex(std::ostream& out, bool binary, const Vec3& v) {
  if (binary) {
    const double p[3] = {v.x(), v.y(), v.z()};
    out.write(reinterpret_cast<const char*>(p), sizeof(p));
  } else {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g", v.x(), v.y(), v.z());
    out << buf;
  }
}

}  // namespace

std::array<std::uint8_t, 3> label_color(std::uint16_t label) {
  if (label == 0) return {128, 128, 128};
  // Golden-angle hue walk; stable per class id.
  const double h = std::fmod(0.618033988749895 * label, 1.0) * 6.0;
  const int sextant = static_cast<int>(h);
  const double f = h - sextant;
  const auto u8 = [](double x) { return static_cast<std::uint8_t>(x * 255.0 + 0.5); };
  const double v = 0.95, s = 0.75;
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (sextant % 6) {
    case 0: return {u8(v), u8(t), u8(p)};
    case 1: return {u8(q), u8(v), u8(p)};
    case 2: return {u8(p), u8(v), u8(t)};
    case 3: return {u8(p), u8(q), u8(v)};
    case 4: return {u8(t), u8(p), u8(v)};
    default: return {u8(v), u8(p), u8(q)};
  }
}

void export_ply(const TriangleMesh& mesh, const std::filesystem::path& path,
                bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error("cannot write PLY: " + path.string());
  write_header(out, binary, mesh.vertices.size(), mesh.triangles.size(), false);
  for (const auto& v : mesh.vertices) {
    write_vertex(out, binary, v);
    if (!binary) out << "\n";
  }
  for (const auto& t : mesh.triangles) {
    if (binary) {
      const std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      out.write(reinterpret_cast<const char*>(t.data()), 3 * sizeof(std::int32_t));
    } else {
      out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
  }
  if (!out) throw Error("PLY write failed: " + path.string());
}

void export_ply(const PointCloud& cloud, const std::filesystem::path& path,
                bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error("cannot write PLY: " + path.string());
  const bool with_color = cloud.has_labels();
  write_header(out, binary, cloud.size(), 0, with_color);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    write_vertex(out, binary, cloud.positions[i]);
    if (with_color) {
      const auto rgb = label_color(cloud.labels[i]);
      if (binary) {
        out.write(reinterpret_cast<const char*>(rgb.data()), 3);
      } else {
        out << " " << int(rgb[0]) << " " << int(rgb[1]) << " " << int(rgb[2]);
      }
    }
    if (!binary) out << "\n";
  }
  if (!out) throw Error("PLY write failed: " + path.string());
}

PlyContents read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open PLY: " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply")
    throw Error("not a PLY file: " + path.string());

  bool binary = false;
  std::size_t vertex_count = 0, face_count = 0;
  // (element, property scalar type) pairs for the vertex element, in order.
  std::vector<std::string> vertex_props;
  std::string current_element;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") {
        binary = true;
      } else if (fmt != "ascii") {
        throw Error("unsupported PLY format: " + fmt);
      }
    } else if (tok == "element") {
      std::string name;
      std::size_t n;
      ls >> name >> n;
      current_element = name;
      if (name == "vertex") vertex_count = n;
      if (name == "face") face_count = n;
    } else if (tok == "property" && current_element == "vertex") {
      std::string type, name;
      ls >> type >> name;
      vertex_props.push_back(type);
    } else if (tok == "end_header") {
      break;
    }
  }

  const auto scalar_size = [](const std::string& t) -> std::size_t {
    if (t == "double" || t == "float64") return 8;
    if (t == "float" || t == "float32") return 4;
    if (t == "uchar" || t == "uint8" || t == "char" || t == "int8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32") return 4;
    throw Error("unsupported PLY property type: " + t);
  };

  PlyContents contents;
  contents.vertices.resize(vertex_count);
  if (binary) {
    for (std::size_t i = 0; i < vertex_count; ++i) {
      int coord = 0;
      for (const auto& type : vertex_props) {
        const std::size_t sz = scalar_size(type);
        char buf[8];
        in.read(buf, static_cast<std::streamsize>(sz));
        if (coord < 3) {
          double v = 0;
          if (sz == 8) {
            std::memcpy(&v, buf, 8);
          } else if (sz == 4 && (type == "float" || type == "float32")) {
            float f;
            std::memcpy(&f, buf, 4);
            v = f;
          }
          contents.vertices[i][coord] = v;
        }
        ++coord;
      }
    }
    for (std::size_t i = 0; i < face_count; ++i) {
      std::uint8_t n = 0;
      in.read(reinterpret_cast<char*>(&n), 1);
      std::vector<std::int32_t> idx(n);
      in.read(reinterpret_cast<char*>(idx.data()),
              static_cast<std::streamsize>(n * sizeof(std::int32_t)));
      for (std::size_t t = 2; t < idx.size(); ++t)
        contents.triangles.push_back({idx[0], idx[t - 1], idx[t]});
    }
    if (!in) throw Error("truncated PLY: " + path.string());
  } else {
    for (std::size_t i = 0; i < vertex_count; ++i) {
      if (!std::getline(in, line)) throw Error("truncated PLY: " + path.string());
      std::istringstream ls(line);
      ls >> contents.vertices[i].x() >> contents.vertices[i].y() >>
          contents.vertices[i].z();
    }
    for (std::size_t i = 0; i < face_count; ++i) {
      if (!std::getline(in, line)) throw Error("truncated PLY: " + path.string());
      std::istringstream ls(line);
      int n;
      ls >> n;
      std::vector<std::int32_t> idx(n);
      for (auto& v : idx) ls >> v;
      for (std::size_t t = 2; t < idx.size(); ++t)
        contents.triangles.push_back({idx[0], idx[t - 1], idx[t]});
    }
  }
  return contents;
}

TriangleMesh read_ply_mesh(const std::filesystem::path& path) {
  auto contents = read_ply(path);
  TriangleMesh mesh;
  mesh.vertices = std::move(contents.vertices);
  mesh.triangles = std::move(contents.triangles);
  return mesh;
}

}  // namespace occ::io
