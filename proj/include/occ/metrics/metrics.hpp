// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "occ/core/types.hpp"

namespace occ::metrics {

/// Voxel-level confusion counts: binary occupancy plus per-class tallies.
struct ConfusionCounts {
  struct Entry {
    std::uint64_t tp = 0, fp = 0, fn = 0;
  };
  Entry occupancy;                        // label != 0, class-agnostic
  std::map<std::uint16_t, Entry> per_class;  // semantic classes (id >= 1)
};

struct OccupancyScores {
  double sc_iou = 0.0;   // scene completion: binary occupancy IoU
  double ssc_miou = 0.0; // mean IoU over semantic classes present in gt
  ConfusionCounts counts;
};

/// Voxel-exact scoring of a prediction against ground truth (same GridSpec
/// required). SC IoU is TP/(TP+FP+FN) over occupied-vs-free; the mean IoU
/// averages classes 1..C-1 that occur in the ground truth — classes absent
/// from the ground truth are excluded even when predicted.
OccupancyScores occupancy_scores(const LabelGrid& pred, const LabelGrid& gt);

/// 3D reconstruction metrics between point sets at threshold tau:
///   acc  = mean over pred of the nearest-gt distance
///   comp = mean over gt of the nearest-pred distance
///   prec / recall = fraction of those distances below tau
///   cd = acc + comp;  fscore = harmonic mean of prec and recall (0 at 0/0)
struct ReconReport {
  double acc = 0, comp = 0, cd = 0;
  double prec = 0, recall = 0, fscore = 0;
  double tau = 0.5;
};

/// Throws Error when either cloud is empty (the means are undefined).
ReconReport recon_metrics(const PointCloud& pred, const PointCloud& gt, double tau = 0.5);

/// Combined evaluation. When `pred_grid` is present both metric families
/// run (reconstruction on the occupied-voxel centers of each grid); a
/// point-cloud prediction yields reconstruction metrics only. Returns the
/// stable-schema JSON report as a string:
///   {sc_iou, ssc_miou, per_class:[{class_id, iou, tp, fp, fn}],
///    acc, comp, prec, recall, cd, fscore, tau}
/// Grid-only fields are null for cloud predictions.
std::string evaluate_run(const LabelGrid* pred_grid, const PointCloud* pred_cloud,
                         const LabelGrid& gt, double tau = 0.5);

}  // namespace occ::metrics
