// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "occ/core/transform.hpp"
#include "test_util.hpp"

using namespace occ;

TEST_CASE("compose with identity is a no-op") {
  test::Rng rng(11);
  const RigidTransform t = test::random_transform(rng);
  const RigidTransform c = compose(t, RigidTransform::identity());
  CHECK((c.rotation - t.rotation).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.translation - t.translation).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("compose with inverse is identity within 1e-9") {
  test::Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const RigidTransform t = test::random_transform(rng);
    const RigidTransform c = compose(t, invert(t));
    CHECK((c.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(c.translation.cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("compose matches sequential application on random points") {
  test::Rng rng(13);
  const RigidTransform a = test::random_transform(rng);
  const RigidTransform b = test::random_transform(rng);
  const RigidTransform ab = compose(a, b);
  double max_dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 p = test::random_vec(rng, -10, 10);
    max_dev = std::max(max_dev, (ab(p) - a(b(p))).norm());
  }
  CHECK(max_dev <= 1e-9);
}

TEST_CASE("apply_transform maps positions and carries channels") {
  PointCloud cloud;
  cloud.positions = {{4, 0, 0}, {0, 1, 2}};
  cloud.labels = {3, 7};
  cloud.intensities = {0.5f, 0.25f};
  cloud.frame_indices = {0, 1};

  SUBCASE("identity") {
    const PointCloud out = apply_transform(RigidTransform::identity(), cloud);
    CHECK(out.positions[0] == cloud.positions[0]);
    CHECK(out.labels == cloud.labels);
    CHECK(out.intensities == cloud.intensities);
    CHECK(out.frame_indices == cloud.frame_indices);
  }
  SUBCASE("translation") {
    RigidTransform t;
    t.translation = Vec3(1, 0, 0);
    const PointCloud out = apply_transform(t, cloud);
    CHECK(out.positions[0] == Vec3(5, 0, 0));
  }
  SUBCASE("quarter-turn yaw") {
    const RigidTransform t = yaw_rotation(M_PI / 2);
    PointCloud one;
    one.positions = {{1, 0, 0}};
    const PointCloud out = apply_transform(t, one);
    CHECK((out.positions[0] - Vec3(0, 1, 0)).norm() <= 1e-12);
  }
}

TEST_CASE("transform round trip returns the original cloud") {
  test::Rng rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    const RigidTransform t = test::random_transform(rng);
    PointCloud cloud;
    for (int i = 0; i < 200; ++i) cloud.positions.push_back(test::random_vec(rng, -20, 20));
    const PointCloud back = apply_transform(invert(t), apply_transform(t, cloud));
    for (std::size_t i = 0; i < cloud.size(); ++i)
      CHECK((back.positions[i] - cloud.positions[i]).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("point_in_box basics") {
  OrientedBox box;
  box.center = Vec3(1, 2, 3);
  box.size = Vec3(2, 1, 0.5);
  box.yaw = 0.7;
  box.instance_id = "a";

  CHECK(point_in_box(box.center, box, 0.0));

  const double margin = 0.1;
  const Vec3 heading(std::cos(box.yaw), std::sin(box.yaw), 0);
  const Vec3 just_outside =
      box.center + (box.size.x() / 2 + margin + 1e-6) * heading;
  CHECK_FALSE(point_in_box(just_outside, box, margin));
  const Vec3 just_inside = box.center + (box.size.x() / 2 + margin - 1e-6) * heading;
  CHECK(point_in_box(just_inside, box, margin));
}

TEST_CASE("point_in_box agrees with an explicit rotation-matrix test") {
  test::Rng rng(15);
  for (int rep = 0; rep < 5; ++rep) {
    OrientedBox box;
    box.center = test::random_vec(rng, -3, 3);
    box.size = Vec3(0.5, 1.5, 1.0) + test::random_vec(rng, 0.0, 2.0);
    std::uniform_real_distribution<double> yaw_d(-M_PI, M_PI);
    box.yaw = yaw_d(rng);
    const double margin = rep % 2 ? 0.1 : 0.0;

    // Independent construction: build the rotation matrix explicitly and
    // test the box-local point against the half extents.
    Mat3 r;
    r << std::cos(box.yaw), -std::sin(box.yaw), 0, std::sin(box.yaw),
        std::cos(box.yaw), 0, 0, 0, 1;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p = test::random_vec(rng, -5, 5);
      const Vec3 q = r.transpose() * (p - box.center);
      const bool expect = std::abs(q.x()) <= box.size.x() / 2 + margin &&
                          std::abs(q.y()) <= box.size.y() / 2 + margin &&
                          std::abs(q.z()) <= box.size.z() / 2 + margin;
      CHECK(point_in_box(p, box, margin) == expect);
    }
  }
}

TEST_CASE("box membership is invariant under a shared rigid transform") {
  test::Rng rng(16);
  for (int rep = 0; rep < 4; ++rep) {
    OrientedBox box;
    box.center = test::random_vec(rng, -2, 2);
    box.size = Vec3(1.0, 2.0, 0.8);
    std::uniform_real_distribution<double> yaw_d(-M_PI, M_PI);
    box.yaw = yaw_d(rng);

    // Shared transform must keep the box an upright yaw box.
    const double dyaw = yaw_d(rng);
    RigidTransform t = yaw_rotation(dyaw);
    t.translation = test::random_vec(rng, -4, 4);

    OrientedBox moved = box;
    moved.center = t(box.center);
    moved.yaw = box.yaw + dyaw;

    for (int i = 0; i < 500; ++i) {
      const Vec3 p = test::random_vec(rng, -4, 4);
      // Skip points within epsilon of the boundary.
      const Vec3 q = yaw_rotation(-box.yaw).rotation * (p - box.center);
      const Vec3 slack = (q.cwiseAbs() - 0.5 * box.size).cwiseAbs();
      if (slack.minCoeff() < 1e-7) continue;
      CHECK(point_in_box(p, box, 0.0) == point_in_box(t(p), moved, 0.0));
    }
  }
}

TEST_CASE("orthonormality checks flag corrupted rotations") {
  RigidTransform t;
  CHECK(t.is_rigid());
  t.rotation(0, 0) = 1.5;
  CHECK_FALSE(t.is_rigid());
  t.rotation = Mat3::Identity();
  t.rotation(2, 2) = -1;  // reflection
  CHECK_FALSE(t.is_rigid());
}
