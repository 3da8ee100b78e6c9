// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "occ/io/binary_formats.hpp"
#include "occ/io/ply.hpp"
#include "occ/io/scene.hpp"
#include "occ/core/transform.hpp"
#include "test_util.hpp"

using namespace occ;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PointCloud random_cloud(test::Rng& rng, std::size_t n, bool labels, bool intensity,
                        bool frames) {
  PointCloud c;
  std::uniform_int_distribution<int> label_d(1, 20);
  std::uniform_real_distribution<float> int_d(0.f, 1.f);
  std::uniform_int_distribution<int> frame_d(0, 40);
  for (std::size_t i = 0; i < n; ++i) {
    // f32-representable coordinates so the round trip is bit-exact.
    const Vec3 p = test::random_vec(rng, -100, 100);
    c.positions.emplace_back(static_cast<float>(p.x()), static_cast<float>(p.y()),
                             static_cast<float>(p.z()));
    if (labels) c.labels.push_back(static_cast<std::uint16_t>(label_d(rng)));
    if (intensity) c.intensities.push_back(int_d(rng));
    if (frames) c.frame_indices.push_back(static_cast<std::uint32_t>(frame_d(rng)));
  }
  return c;
}

}  // namespace

TEST_CASE("occp: empty cloud round trip") {
  test::TempDir dir("occp_empty");
  const auto path = dir.path / "empty.occp";
  io::write_points(path, PointCloud{});
  const PointCloud back = io::read_points(path);
  CHECK(back.empty());
  CHECK_FALSE(back.has_labels());
}

TEST_CASE("occp: 1e5 labeled points round trip bit-exactly") {
  test::Rng rng(21);
  const PointCloud cloud = random_cloud(rng, 100000, true, true, true);
  test::TempDir dir("occp_big");
  const auto path = dir.path / "cloud.occp";
  io::write_points(path, cloud);
  const PointCloud back = io::read_points(path);
  REQUIRE(back.size() == cloud.size());
  CHECK(back.labels == cloud.labels);
  CHECK(back.intensities == cloud.intensities);
  CHECK(back.frame_indices == cloud.frame_indices);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    CHECK(back.positions[i] == cloud.positions[i]);

  // Byte-level: re-serialization reproduces the file exactly.
  const auto path2 = dir.path / "cloud2.occp";
  io::write_points(path2, back);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("occp: bad magic rejected") {
  test::TempDir dir("occp_magic");
  const auto path = dir.path / "bad.occp";
  std::ofstream(path, std::ios::binary) << "XXXXgarbage";
  CHECK_THROWS_AS(io::read_points(path), io::FormatError);
}

TEST_CASE("occp: truncated payload rejected") {
  test::Rng rng(22);
  const PointCloud cloud = random_cloud(rng, 50, true, false, false);
  test::TempDir dir("occp_trunc");
  const auto path = dir.path / "c.occp";
  io::write_points(path, cloud);
  const std::string bytes = slurp(path);
  std::ofstream(path, std::ios::binary | std::ios::trunc)
      << bytes.substr(0, bytes.size() - 3);
  CHECK_THROWS_AS(io::read_points(path), io::FormatError);
}

TEST_CASE("occv: all-zero grid round trip") {
  GridSpec spec;
  spec.origin = Vec3(-1, -1, -1);
  spec.voxel_size = 0.5;
  spec.dims = Eigen::Vector3i(4, 4, 4);
  LabelGrid grid(spec);
  test::TempDir dir("occv_zero");
  const auto path = dir.path / "g.occv";
  io::write_grid(path, grid);
  const LabelGrid back = io::read_grid(path);
  CHECK(back.spec == spec);
  CHECK(back.labels == grid.labels);
}

TEST_CASE("occv: full protocol-size grid round trips; file size is exact") {
  GridSpec spec;
  spec.origin = Vec3(-50, -50, -5);
  spec.voxel_size = 0.5;
  spec.dims = Eigen::Vector3i(200, 200, 16);
  LabelGrid grid(spec);
  test::Rng rng(23);
  std::uniform_int_distribution<int> d(0, 16);
  for (auto& l : grid.labels) l = static_cast<std::uint16_t>(d(rng));

  test::TempDir dir("occv_big");
  const auto path = dir.path / "g.occv";
  io::write_grid(path, grid);
  // header: magic(4) + version(4) + origin(24) + voxel(8) + dims(12) = 52,
  // payload: 200*200*16 u16 labels.
  CHECK(std::filesystem::file_size(path) == 52 + 2 * 640000u);
  const LabelGrid back = io::read_grid(path);
  CHECK(back.labels == grid.labels);
  CHECK(back.spec == spec);

  const auto path2 = dir.path / "g2.occv";
  io::write_grid(path2, back);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("occv: zero dims rejected") {
  LabelGrid grid;
  grid.spec.dims = Eigen::Vector3i(0, 4, 4);
  grid.spec.voxel_size = 1.0;
  test::TempDir dir("occv_dims");
  CHECK_THROWS_WITH_AS(io::write_grid(dir.path / "g.occv", grid),
                       doctest::Contains("dims"), Error);
}

TEST_CASE("occf: scalar field round trip (f32)") {
  GridSpec spec;
  spec.voxel_size = 0.25;
  spec.dims = Eigen::Vector3i(3, 4, 5);
  ScalarField f(spec);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = static_cast<float>(0.125 * static_cast<double>(i));
  test::TempDir dir("occf");
  io::write_field(dir.path / "f.occf", f);
  const ScalarField back = io::read_field(dir.path / "f.occf");
  CHECK(back.values == f.values);
}

TEST_CASE("scene manifest: synth-style round trip and validation") {
  test::TempDir dir("scene");

  io::SceneManifest m;
  m.scene_id = "unit";
  m.class_names = {"free", "thing"};
  test::Rng rng(24);
  for (int f = 0; f < 2; ++f) {
    io::FrameRecord rec;
    rec.timestamp_us = 1000 * (f + 1);
    rec.ego_pose = test::random_transform(rng);
    rec.lidar_extrinsic = test::random_transform(rng, 0.5);
    CameraModel cam;
    cam.fx = cam.fy = 400;
    cam.cx = 320;
    cam.cy = 240;
    cam.width = 640;
    cam.height = 480;
    cam.extrinsic = test::random_transform(rng, 0.5);
    rec.cameras.push_back(cam);
    OrientedBox box;
    box.center = Vec3(1, 2, 0);
    box.size = Vec3(2, 1, 1);
    box.yaw = 0.3;
    box.instance_id = "obj";
    box.class_id = 1;
    rec.boxes.push_back(box);
    const auto points_path = dir.path / ("frame_" + std::to_string(f) + ".occp");
    io::write_points(points_path, random_cloud(rng, 10, true, false, false));
    rec.points_path = points_path;
    m.frames.push_back(rec);
  }
  const auto manifest_path = dir.path / "manifest.json";
  io::save_scene(m, manifest_path);

  const io::SceneManifest back = io::load_scene(manifest_path);
  REQUIRE(back.frames.size() == 2);
  CHECK(back.scene_id == "unit");
  CHECK(back.class_names == m.class_names);
  CHECK((back.frames[1].ego_pose.rotation - m.frames[1].ego_pose.rotation)
            .cwiseAbs()
            .maxCoeff() <= 1e-15);
  CHECK(back.frames[0].cameras.size() == 1);
  CHECK(back.frames[0].boxes.size() == 1);
  CHECK(back.load_frame_points(0).size() == 10);

  SUBCASE("reflection in ego pose is rejected, naming the frame") {
    io::SceneManifest mm = m;
    mm.frames[1].ego_pose.rotation.row(2) *= -1.0;
    const auto bad_path = dir.path / "bad.json";
    io::save_scene(mm, bad_path);
    CHECK_THROWS_WITH_AS(io::load_scene(bad_path), doctest::Contains("frame 1"),
                         SceneError);
  }

  SUBCASE("missing points file is reported with its path") {
    std::filesystem::remove(m.frames[1].points_path);
    CHECK_THROWS_WITH_AS(io::load_scene(manifest_path),
                         doctest::Contains("frame_1.occp"), SceneError);
  }

  SUBCASE("timestamps must strictly increase") {
    io::SceneManifest mm = m;
    mm.frames[1].timestamp_us = mm.frames[0].timestamp_us;
    const auto bad_path = dir.path / "ts.json";
    io::save_scene(mm, bad_path);
    CHECK_THROWS_AS(io::load_scene(bad_path), SceneError);
  }

  SUBCASE("class id out of range") {
    io::SceneManifest mm = m;
    mm.frames[0].boxes[0].class_id = 7;
    const auto bad_path = dir.path / "cls.json";
    io::save_scene(mm, bad_path);
    CHECK_THROWS_AS(io::load_scene(bad_path), SceneError);
  }

  SUBCASE("instance class must not change across frames") {
    io::SceneManifest mm = m;
    mm.class_names.push_back("other");
    mm.frames[1].boxes[0].class_id = 2;
    const auto bad_path = dir.path / "inst.json";
    io::save_scene(mm, bad_path);
    CHECK_THROWS_WITH_AS(io::load_scene(bad_path), doctest::Contains("obj"), SceneError);
  }
}

TEST_CASE("ply: one-triangle mesh export") {
  TriangleMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  mesh.triangles = {{0, 1, 2}};
  test::TempDir dir("ply_tri");

  for (const bool binary : {false, true}) {
    const auto path = dir.path / (binary ? "m_b.ply" : "m_a.ply");
    io::export_ply(mesh, path, binary);
    const auto back = io::read_ply(path);
    REQUIRE(back.vertices.size() == 3);
    REQUIRE(back.triangles.size() == 1);
    if (binary)
      for (int i = 0; i < 3; ++i) CHECK(back.vertices[i] == mesh.vertices[i]);
  }
}

TEST_CASE("ply: labeled cloud gets per-vertex colors") {
  PointCloud cloud;
  test::Rng rng(25);
  for (int i = 0; i < 100; ++i) {
    cloud.positions.push_back(test::random_vec(rng, -1, 1));
    cloud.labels.push_back(static_cast<std::uint16_t>(1 + i % 5));
  }
  test::TempDir dir("ply_cloud");
  const auto path = dir.path / "c.ply";
  io::export_ply(cloud, path, /*binary=*/false);

  // Count vertices and color columns in the ascii output.
  std::ifstream in(path);
  std::string line;
  bool saw_color_props = false;
  std::size_t vertex_lines = 0;
  bool body = false;
  while (std::getline(in, line)) {
    if (line == "end_header") {
      body = true;
      continue;
    }
    if (!body) {
      if (line.find("property uchar red") != std::string::npos) saw_color_props = true;
      continue;
    }
    ++vertex_lines;
  }
  CHECK(saw_color_props);
  CHECK(vertex_lines == 100);
}

TEST_CASE("ply: ascii re-parse reproduces positions within printed precision") {
  test::Rng rng(26);
  PointCloud cloud;
  for (int i = 0; i < 50; ++i) cloud.positions.push_back(test::random_vec(rng, -40, 40));
  test::TempDir dir("ply_ascii");
  const auto path = dir.path / "c.ply";
  io::export_ply(cloud, path, /*binary=*/false);

  // Independent minimal ascii PLY parse.
  std::ifstream in(path);
  REQUIRE(in);
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.rfind("element vertex", 0) == 0) count = std::stoul(line.substr(15));
    if (line == "end_header") break;
  }
  REQUIRE(count == cloud.size());
  for (std::size_t i = 0; i < count; ++i) {
    REQUIRE(std::getline(in, line));
    std::istringstream ls(line);
    double x, y, z;
    ls >> x >> y >> z;
    CHECK((Vec3(x, y, z) - cloud.positions[i]).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("file hashes are stable and content-sensitive") {
  test::TempDir dir("hash");
  std::ofstream(dir.path / "a") << "content";
  std::ofstream(dir.path / "b") << "content";
  std::ofstream(dir.path / "c") << "different";
  CHECK(io::file_hash(dir.path / "a") == io::file_hash(dir.path / "b"));
  CHECK(io::file_hash(dir.path / "a") != io::file_hash(dir.path / "c"));
}
