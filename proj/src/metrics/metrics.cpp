// Copyright 2026 The occ authors
// SPDX-License-Identifier: Apache-2.0

#include "occ/metrics/metrics.hpp"

#include <cmath>

#include <json.hpp>

#include "occ/core/kdtree.hpp"
#include "occ/core/parallel.hpp"
#include "occ/voxel/voxelize.hpp"

namespace occ::metrics {

OccupancyScores occupancy_scores(const LabelGrid& pred, const LabelGrid& gt) {
  pred.validate();
  gt.validate();
  if (!(pred.spec == gt.spec))
    throw GridMismatchError("occupancy_scores: prediction and ground truth grids differ");

  OccupancyScores out;
  auto& counts = out.counts;
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const std::uint16_t p = pred.labels[i];
    const std::uint16_t g = gt.labels[i];
    if (p != 0 && g != 0)
      ++counts.occupancy.tp;
    else if (p != 0)
      ++counts.occupancy.fp;
    else if (g != 0)
      ++counts.occupancy.fn;
    if (p == g) {
      if (p != 0) ++counts.per_class[p].tp;
    } else {
      if (p != 0) ++counts.per_class[p].fp;
      if (g != 0) ++counts.per_class[g].fn;
    }
  }

  const auto iou = [](const ConfusionCounts::Entry& e) {
    const std::uint64_t denom = e.tp + e.fp + e.fn;
    return denom == 0 ? 0.0 : static_cast<double>(e.tp) / static_cast<double>(denom);
  };
  out.sc_iou = counts.occupancy.tp + counts.occupancy.fp + counts.occupancy.fn == 0
                   ? 1.0
                   : iou(counts.occupancy);

  // Classes that occur in the ground truth define the mean.
  double sum = 0.0;
  int n = 0;
  for (const auto& [cls, entry] : counts.per_class) {
    if (entry.tp + entry.fn == 0) continue;  // never in gt
    sum += iou(entry);
    ++n;
  }
  out.ssc_miou = n == 0 ? 0.0 : sum / n;
  return out;
}

namespace {

struct DirectedStats {
  double mean_dist = 0.0;
  double frac_below = 0.0;
};

DirectedStats directed(const PointCloud& from, const KdTree3& to_tree, double tau) {
  const std::size_t n = from.size();
  std::vector<double> dist(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      dist[i] = std::sqrt(to_tree.nearest(from.positions[i]).sq_dist);
  });
  DirectedStats s;
  s.mean_dist = parallel_sum(n, [&](std::size_t i) { return dist[i]; }) / n;
  s.frac_below =
      parallel_sum(n, [&](std::size_t i) { return dist[i] < tau ? 1.0 : 0.0; }) / n;
  return s;
}

}  // namespace

ReconReport recon_metrics(const PointCloud& pred, const PointCloud& gt, double tau) {
  if (pred.empty() || gt.empty())
    throw Error("recon_metrics: metrics are undefined for empty point clouds");
  const KdTree3 gt_tree(gt.positions);
  const KdTree3 pred_tree(pred.positions);

  const DirectedStats p2g = directed(pred, gt_tree, tau);
  const DirectedStats g2p = directed(gt, pred_tree, tau);

  ReconReport r;
  r.tau = tau;
  r.acc = p2g.mean_dist;
  r.comp = g2p.mean_dist;
  r.cd = r.acc + r.comp;
  r.prec = p2g.frac_below;
  r.recall = g2p.frac_below;
  r.fscore = (r.prec + r.recall) > 0 ? 2.0 * r.prec * r.recall / (r.prec + r.recall) : 0.0;
  return r;
}

std::string evaluate_run(const LabelGrid* pred_grid, const PointCloud* pred_cloud,
                         const LabelGrid& gt, double tau) {
  if ((pred_grid == nullptr) == (pred_cloud == nullptr))
    throw Error("evaluate_run: provide exactly one of grid or cloud prediction");

  nlohmann::json j;
  PointCloud pred_points;
  if (pred_grid != nullptr) {
    const OccupancyScores scores = occupancy_scores(*pred_grid, gt);
    j["sc_iou"] = scores.sc_iou;
    j["ssc_miou"] = scores.ssc_miou;
    j["per_class"] = nlohmann::json::array();
    const auto iou = [](const ConfusionCounts::Entry& e) {
      const std::uint64_t d = e.tp + e.fp + e.fn;
      return d == 0 ? 0.0 : static_cast<double>(e.tp) / static_cast<double>(d);
    };
    for (const auto& [cls, e] : scores.counts.per_class) {
      j["per_class"].push_back({{"class_id", cls},
                                {"iou", iou(e)},
                                {"tp", e.tp},
                                {"fp", e.fp},
                                {"fn", e.fn}});
    }
    pred_points = voxel::occupancy_to_points(*pred_grid);
  } else {
    j["sc_iou"] = nullptr;
    j["ssc_miou"] = nullptr;
    j["per_class"] = nullptr;
    pred_points = *pred_cloud;
  }

  const PointCloud gt_points = voxel::occupancy_to_points(gt);
  if (pred_points.empty() || gt_points.empty()) {
    j["acc"] = nullptr;
    j["comp"] = nullptr;
    j["prec"] = nullptr;
    j["recall"] = nullptr;
    j["cd"] = nullptr;
    j["fscore"] = nullptr;
  } else {
    const ReconReport r = recon_metrics(pred_points, gt_points, tau);
    j["acc"] = r.acc;
    j["comp"] = r.comp;
    j["prec"] = r.prec;
    j["recall"] = r.recall;
    j["cd"] = r.cd;
    j["fscore"] = r.fscore;
  }
  j["tau"] = tau;
  return j.dump(2);
}

}  // namespace occ::metrics
