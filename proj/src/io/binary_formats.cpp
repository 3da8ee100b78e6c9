// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/io/binary_formats.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace occ::io {

namespace {

// Scalar I/O. The build targets little-endian hosts; a plain memcpy of the
// native representation matches the format.
static_assert(std::endian::native == std::endian::little,
              "occ binary formats require a little-endian host");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw FormatError("cannot open for writing: " + path.string());
  }
  template <typename T>
  void put(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  void finish() {
    out_.flush();
    if (!out_) throw FormatError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open: " + path.string());
  }
  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw FormatError("truncated file: " + path_.string());
    return v;
  }
  void get_bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in_) throw FormatError("truncated file: " + path_.string());
  }
  void expect_magic(const char magic[4]) {
    char m[4];
    get_bytes(m, 4);
    if (std::memcmp(m, magic, 4) != 0)
      throw FormatError("bad magic in " + path_.string() + ": expected " +
                        std::string(magic, 4));
  }
  void expect_version(std::uint32_t want) {
    const auto v = get<std::uint32_t>();
    if (v != want)
      throw FormatError("unsupported version " + std::to_string(v) + " in " +
                        path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

constexpr std::uint8_t kFlagLabels = 1u << 0;
constexpr std::uint8_t kFlagIntensity = 1u << 1;
constexpr std::uint8_t kFlagFrameIndex = 1u << 2;

}  // namespace

void write_points(const std::filesystem::path& path, const PointCloud& cloud) {
  cloud.validate();
  Writer w(path);
  w.put_bytes("OCCP", 4);
  w.put<std::uint32_t>(1);
  std::uint8_t flags = 0;
  if (cloud.has_labels()) flags |= kFlagLabels;
  if (cloud.has_intensities()) flags |= kFlagIntensity;
  if (cloud.has_frame_indices()) flags |= kFlagFrameIndex;
  w.put(flags);
  w.put<std::uint64_t>(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const float p[3] = {static_cast<float>(cloud.positions[i].x()),
                        static_cast<float>(cloud.positions[i].y()),
                        static_cast<float>(cloud.positions[i].z())};
    w.put_bytes(p, sizeof(p));
    if (flags & kFlagLabels) w.put(cloud.labels[i]);
    if (flags & kFlagIntensity) w.put(cloud.intensities[i]);
    if (flags & kFlagFrameIndex) w.put(cloud.frame_indices[i]);
  }
  w.finish();
}

PointCloud read_points(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("OCCP");
  r.expect_version(1);
  const auto flags = r.get<std::uint8_t>();
  const auto count = r.get<std::uint64_t>();
  PointCloud cloud;
  cloud.positions.resize(count);
  if (flags & kFlagLabels) cloud.labels.resize(count);
  if (flags & kFlagIntensity) cloud.intensities.resize(count);
  if (flags & kFlagFrameIndex) cloud.frame_indices.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    float p[3];
    r.get_bytes(p, sizeof(p));
    cloud.positions[i] = Vec3(p[0], p[1], p[2]);
    if (flags & kFlagLabels) cloud.labels[i] = r.get<std::uint16_t>();
    if (flags & kFlagIntensity) cloud.intensities[i] = r.get<float>();
    if (flags & kFlagFrameIndex) cloud.frame_indices[i] = r.get<std::uint32_t>();
  }
  cloud.validate();
  return cloud;
}

void write_grid(const std::filesystem::path& path, const LabelGrid& grid) {
  grid.validate();
  Writer w(path);
  w.put_bytes("OCCV", 4);
  w.put<std::uint32_t>(1);
  for (int a = 0; a < 3; ++a) w.put<double>(grid.spec.origin[a]);
  w.put<double>(grid.spec.voxel_size);
  for (int a = 0; a < 3; ++a) w.put<std::uint32_t>(grid.spec.dims[a]);
  w.put_bytes(grid.labels.data(), grid.labels.size() * sizeof(std::uint16_t));
  w.finish();
}

LabelGrid read_grid(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("OCCV");
  r.expect_version(1);
  LabelGrid grid;
  for (int a = 0; a < 3; ++a) grid.spec.origin[a] = r.get<double>();
  grid.spec.voxel_size = r.get<double>();
  for (int a = 0; a < 3; ++a) grid.spec.dims[a] = static_cast<int>(r.get<std::uint32_t>());
  grid.spec.validate();
  grid.labels.resize(grid.spec.count());
  r.get_bytes(grid.labels.data(), grid.labels.size() * sizeof(std::uint16_t));
  return grid;
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  field.spec.validate();
  if (field.values.size() != field.spec.count())
    throw Error("scalar field: values length mismatch");
  Writer w(path);
  w.put_bytes("OCCF", 4);
  w.put<std::uint32_t>(1);
  for (int a = 0; a < 3; ++a) w.put<double>(field.spec.origin[a]);
  w.put<double>(field.spec.voxel_size);
  for (int a = 0; a < 3; ++a) w.put<std::uint32_t>(field.spec.dims[a]);
  for (const double v : field.values) w.put<float>(static_cast<float>(v));
  w.finish();
}

ScalarField read_field(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic("OCCF");
  r.expect_version(1);
  ScalarField field;
  for (int a = 0; a < 3; ++a) field.spec.origin[a] = r.get<double>();
  field.spec.voxel_size = r.get<double>();
  for (int a = 0; a < 3; ++a)
    field.spec.dims[a] = static_cast<int>(r.get<std::uint32_t>());
  field.spec.validate();
  field.values.resize(field.spec.count());
  for (auto& v : field.values) v = r.get<float>();
  return field;
}

std::string bytes_hash(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for hashing: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes_hash(bytes.data(), bytes.size());
}

}  // namespace occ::io
