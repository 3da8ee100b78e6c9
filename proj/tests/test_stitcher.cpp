// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "occ/core/parallel.hpp"
#include "occ/core/transform.hpp"
#include "occ/stitch/stitcher.hpp"
#include "occ/synth/synth.hpp"
#include "test_util.hpp"

using namespace occ;

namespace {

io::FrameRecord simple_frame(std::uint64_t ts = 1) {
  io::FrameRecord f;
  f.timestamp_us = ts;
  return f;
}

}  // namespace

TEST_CASE("segment: no boxes puts every point in the static stream") {
  PointCloud cloud;
  test::Rng rng(41);
  for (int i = 0; i < 100; ++i) cloud.positions.push_back(test::random_vec(rng, -5, 5));
  const auto seg = stitch::segment_frame(cloud, simple_frame());
  CHECK(seg.static_points.size() == 100);
  CHECK(seg.object_points.empty());
}

TEST_CASE("segment: a point at a box center belongs to that instance") {
  io::FrameRecord frame = simple_frame();
  OrientedBox box;
  box.center = Vec3(2, 1, 0);
  box.size = Vec3(1, 1, 1);
  box.instance_id = "it";
  frame.boxes.push_back(box);

  PointCloud cloud;
  cloud.positions = {box.center, Vec3(4, 4, 4)};
  const auto seg = stitch::segment_frame(cloud, frame);
  CHECK(seg.static_points.size() == 1);
  REQUIRE(seg.object_points.count("it") == 1);
  CHECK(seg.object_points.at("it").size() == 1);
}

TEST_CASE("segment: partition matches a brute-force oracle with the tie rule") {
  test::Rng rng(42);
  io::FrameRecord frame = simple_frame();
  frame.lidar_extrinsic = test::random_transform(rng, 0.5);
  std::uniform_real_distribution<double> yaw_d(-M_PI, M_PI);
  const char* names[5] = {"b", "a", "e", "c", "d"};
  for (int b = 0; b < 5; ++b) {
    OrientedBox box;
    box.center = test::random_vec(rng, -3, 3);
    box.size = Vec3(1.0, 2.0, 1.5) + test::random_vec(rng, 0, 1.5);
    box.yaw = yaw_d(rng);
    box.instance_id = names[b];
    frame.boxes.push_back(box);
  }
  PointCloud cloud;
  for (int i = 0; i < 1000; ++i) cloud.positions.push_back(test::random_vec(rng, -4, 4));

  const double margin = 0.1;
  stitch::StitchOptions opts;
  opts.box_margin = margin;
  const auto seg = stitch::segment_frame(cloud, frame, opts);

  // Brute force: same membership and tie rule, written directly.
  const PointCloud ego = apply_transform(frame.lidar_extrinsic, cloud);
  std::map<std::string, std::vector<std::size_t>> expect_obj;
  std::vector<std::size_t> expect_static;
  for (std::size_t i = 0; i < ego.size(); ++i) {
    std::string best;
    double best_d = 0;
    for (const auto& box : frame.boxes) {
      if (!point_in_box(ego.positions[i], box, margin)) continue;
      const double d = (ego.positions[i] - box.center).squaredNorm();
      if (best.empty() || d < best_d || (d == best_d && box.instance_id < best)) {
        best = box.instance_id;
        best_d = d;
      }
    }
    if (best.empty())
      expect_static.push_back(i);
    else
      expect_obj[best].push_back(i);
  }

  CHECK(seg.static_points.size() == expect_static.size());
  std::size_t obj_total = 0;
  for (const auto& [id, points] : seg.object_points) {
    CHECK(points.size() == expect_obj[id].size());
    obj_total += points.size();
  }
  std::size_t expect_total = 0;
  for (const auto& [id, v] : expect_obj) expect_total += v.size();
  CHECK(obj_total == expect_total);
  // Conservation: exhaustive and disjoint.
  CHECK(seg.static_points.size() + obj_total == cloud.size());

  // Coordinates: ego frame, in input order within each stream.
  for (std::size_t s = 0; s < expect_static.size(); ++s)
    CHECK((seg.static_points.positions[s] - ego.positions[expect_static[s]]).norm() <=
          1e-12);
}

TEST_CASE("aggregate: identity poses keep static points unchanged") {
  io::SceneManifest m;
  m.scene_id = "unit";
  m.class_names = {"free"};
  m.frames.push_back(simple_frame(1));

  PointCloud cloud;
  cloud.positions = {{1, 2, 3}, {-1, 0, 1}};
  const auto agg = stitch::aggregate_scene(m, {cloud});
  REQUIRE(agg.static_world.size() == 2);
  CHECK((agg.static_world.positions[0] - Vec3(1, 2, 3)).norm() == 0);
  CHECK(agg.objects.empty());
  CHECK(agg.static_world.frame_indices == std::vector<std::uint32_t>{0, 0});
  REQUIRE(agg.frame_sensor_origins.size() == 1);
  CHECK(agg.frame_sensor_origins[0] == Vec3(0, 0, 0));
}

TEST_CASE("aggregate: one world point observed from two ego poses becomes two coincident world points") {
  test::Rng rng(43);
  io::SceneManifest m;
  m.scene_id = "unit";
  m.class_names = {"free"};
  const Vec3 world_point(2.5, -1.0, 0.75);

  std::vector<PointCloud> clouds;
  for (int f = 0; f < 2; ++f) {
    io::FrameRecord frame = simple_frame(f + 1);
    frame.ego_pose = test::random_transform(rng);
    m.frames.push_back(frame);
    PointCloud c;
    c.positions.push_back(invert(frame.ego_pose)(world_point));
    clouds.push_back(c);
  }
  const auto agg = stitch::aggregate_scene(m, clouds);
  REQUIRE(agg.static_world.size() == 2);  // duplicates retained
  CHECK((agg.static_world.positions[0] - world_point).norm() <= 1e-6);
  CHECK((agg.static_world.positions[1] - world_point).norm() <= 1e-6);
  CHECK((agg.static_world.positions[0] - agg.static_world.positions[1]).norm() <= 1e-6);
}

TEST_CASE("aggregate: rigidly moving object collapses to coincident canonical points") {
  // Template points rigidly attached to a translating, yawing box.
  test::Rng rng(44);
  std::vector<Vec3> tmpl;
  for (int i = 0; i < 40; ++i)
    tmpl.push_back(Vec3(0.6, 0.4, 0.3).cwiseProduct(test::random_vec(rng, -1, 1)));

  io::SceneManifest m;
  m.scene_id = "unit";
  m.class_names = {"free", "obj"};
  std::vector<PointCloud> clouds;
  const int n_frames = 6;
  for (int f = 0; f < n_frames; ++f) {
    io::FrameRecord frame = simple_frame(f + 1);
    frame.ego_pose = test::random_transform(rng);

    OrientedBox box;
    box.center = Vec3(-2, 1, 0.4) + f * Vec3(0.8, 0.2, 0.0);
    box.size = Vec3(1.5, 1.0, 0.8);
    box.yaw = 0.15 * f;
    box.instance_id = "mv";
    box.class_id = 1;

    // Points in world coords via the box pose; box annotation itself is in
    // ego coords of this frame.
    const RigidTransform world_from_box = box.pose();
    const RigidTransform ego_from_world = invert(frame.ego_pose);
    PointCloud cloud;
    for (const auto& t : tmpl)
      cloud.positions.push_back(ego_from_world(world_from_box(t)));
    // Sensor-frame == ego-frame (identity extrinsic).
    OrientedBox ego_box = box;
    const RigidTransform box_in_ego = compose(ego_from_world, world_from_box);
    ego_box.center = box_in_ego.translation;
    ego_box.yaw = std::atan2(box_in_ego.rotation(1, 0), box_in_ego.rotation(0, 0));
    frame.boxes.push_back(ego_box);

    m.frames.push_back(frame);
    clouds.push_back(cloud);
  }

  const auto agg = stitch::aggregate_scene(m, clouds);
  REQUIRE(agg.objects.count("mv") == 1);
  const auto& track = agg.objects.at("mv");
  REQUIRE(track.canonical_points.size() == tmpl.size() * n_frames);
  CHECK(track.class_id == 1);
  for (std::size_t i = 0; i < track.canonical_points.size(); ++i) {
    const Vec3& canonical = track.canonical_points.positions[i];
    const Vec3& expect = tmpl[i % tmpl.size()];
    CHECK((canonical - expect).norm() <= 1e-6);
  }
}

TEST_CASE("aggregate: instance changing class across frames is a hard error") {
  io::SceneManifest m;
  m.scene_id = "unit";
  m.class_names = {"free", "a", "b"};
  for (int f = 0; f < 2; ++f) {
    io::FrameRecord frame = simple_frame(f + 1);
    OrientedBox box;
    box.center = Vec3(0, 0, 0);
    box.size = Vec3(2, 2, 2);
    box.instance_id = "x";
    box.class_id = static_cast<std::uint16_t>(1 + f);
    frame.boxes.push_back(box);
    m.frames.push_back(frame);
  }
  PointCloud c;
  c.positions = {{0, 0, 0}};
  CHECK_THROWS_WITH_AS(stitch::aggregate_scene(m, {c, c}), doctest::Contains("x"),
                       Error);
}

TEST_CASE("compose: identity pose and no objects returns static_world") {
  stitch::AggregatedScene agg;
  agg.static_world.positions = {{1, 1, 1}, {2, 2, 2}};
  agg.static_world.frame_indices = {0, 0};
  const PointCloud out = stitch::compose_frame(agg, simple_frame());
  REQUIRE(out.size() == 2);
  CHECK(out.positions[0] == Vec3(1, 1, 1));
}

TEST_CASE("compose: canonical point lands at the target box pose") {
  stitch::AggregatedScene agg;
  stitch::AggregatedScene::ObjectTrack track;
  track.canonical_points.positions = {{1, 0, 0}};
  track.class_id = 1;
  agg.objects.emplace("obj", std::move(track));

  io::FrameRecord target = simple_frame();
  OrientedBox box;
  box.center = Vec3(5, -2, 1);
  box.size = Vec3(3, 2, 2);
  box.yaw = 0.0;
  box.instance_id = "obj";
  target.boxes.push_back(box);

  const PointCloud out = stitch::compose_frame(agg, target);
  REQUIRE(out.size() == 1);
  CHECK((out.positions[0] - Vec3(6, -2, 1)).norm() <= 1e-12);

  SUBCASE("instances not boxed in the target frame are omitted") {
    io::FrameRecord empty_target = simple_frame();
    CHECK(stitch::compose_frame(agg, empty_target).empty());
  }
}

TEST_CASE("stitch + compose on a simulated scene reproduces the frame's own returns") {
  synth::SyntheticSceneSpec spec;
  for (int f = 0; f < 5; ++f) {
    RigidTransform pose = yaw_rotation(0.3 * f);
    pose.translation = Vec3(4 * std::cos(0.4 * f), 4 * std::sin(0.4 * f), 1.2);
    spec.sensor_trajectory.push_back(pose);
  }
  spec.spheres.push_back({Vec3(0, 0, 1), 1.0, 1});
  spec.planes.push_back({0.0, 2});
  synth::MovingBox mb;
  mb.size_lwh = Vec3(1.2, 0.8, 0.8);
  mb.class_id = 3;
  mb.instance_id = "m";
  mb.start_center = Vec3(-2, -2, 0.4);
  mb.velocity = Vec3(0.5, 0.5, 0);
  spec.moving_boxes.push_back(mb);
  spec.beams.azimuth_steps = 96;
  spec.beams.elevation_steps = 12;
  spec.beams.elevation_min = -0.6;
  spec.beams.elevation_max = 0.2;
  spec.max_range = 30;

  const auto scene = synth::synth_scene(spec);
  stitch::StitchOptions opts;
  opts.box_margin = 0.05;
  const auto agg = stitch::aggregate_scene(scene.manifest, scene.frame_points, opts);

  // Conservation over all frames.
  std::size_t input_total = 0;
  for (const auto& c : scene.frame_points) input_total += c.size();
  CHECK(agg.total_points() == input_total);

  // Composed cloud for frame 2 contains that frame's own returns (the frame
  // contributed them), up to transform round-off.
  const std::size_t target = 2;
  const PointCloud composed = stitch::compose_frame(agg, scene.manifest.frames[target]);
  CHECK(composed.size() == agg.static_world.size() +
                               agg.objects.at("m").canonical_points.size());

  const auto& own = scene.frame_points[target];
  // Build a brute-force nearest lookup over the composed cloud.
  for (std::size_t i = 0; i < own.size(); i += 7) {
    double best = 1e9;
    for (std::size_t j = 0; j < composed.size(); ++j)
      best = std::min(best, (composed.positions[j] - own.positions[i]).norm());
    CHECK(best <= 1e-6);
  }
}

TEST_CASE("aggregate: output is identical across thread counts") {
  synth::SyntheticSceneSpec spec;
  for (int f = 0; f < 4; ++f) {
    RigidTransform pose;
    pose.translation = Vec3(0.5 * f, 0, 1);
    spec.sensor_trajectory.push_back(pose);
  }
  spec.spheres.push_back({Vec3(0, 3, 1), 1.0, 1});
  spec.beams.azimuth_steps = 48;
  spec.beams.elevation_steps = 6;
  const auto scene = synth::synth_scene(spec);

  set_thread_count(1);
  const auto a = stitch::aggregate_scene(scene.manifest, scene.frame_points);
  set_thread_count(8);
  const auto b = stitch::aggregate_scene(scene.manifest, scene.frame_points);
  set_thread_count(0);

  REQUIRE(a.static_world.size() == b.static_world.size());
  for (std::size_t i = 0; i < a.static_world.size(); ++i) {
    CHECK(a.static_world.positions[i] == b.static_world.positions[i]);
    CHECK(a.static_world.frame_indices[i] == b.static_world.frame_indices[i]);
  }
}

TEST_CASE("aggregate round trip through the on-disk layout") {
  test::Rng rng(45);
  stitch::AggregatedScene agg;
  for (int i = 0; i < 50; ++i) {
    const Vec3 p = test::random_vec(rng, -10, 10);
    agg.static_world.positions.emplace_back(static_cast<float>(p.x()),
                                            static_cast<float>(p.y()),
                                            static_cast<float>(p.z()));
    agg.static_world.labels.push_back(1);
    agg.static_world.frame_indices.push_back(i % 3);
  }
  agg.frame_sensor_origins = {Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(2, 0, 1)};
  stitch::AggregatedScene::ObjectTrack track;
  track.class_id = 4;
  track.canonical_points.positions = {{0.25, 0.5, -0.125}};
  track.canonical_points.labels = {4};
  track.canonical_points.frame_indices = {2};
  agg.objects.emplace("zebra", std::move(track));

  test::TempDir dir("agg_rt");
  stitch::save_aggregate(agg, dir.path);
  const auto back = stitch::load_aggregate(dir.path);
  CHECK(back.static_world.size() == agg.static_world.size());
  CHECK(back.frame_sensor_origins.size() == 3);
  REQUIRE(back.objects.count("zebra") == 1);
  CHECK(back.objects.at("zebra").class_id == 4);
  CHECK(back.objects.at("zebra").canonical_points.positions[0] ==
        Vec3(0.25, 0.5, -0.125));
}
