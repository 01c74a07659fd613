#include "uniloc/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "uniloc/errors.hpp"

namespace uniloc {

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Moderate: return "moderate";
    case Difficulty::Hard: return "hard";
    case Difficulty::All: return "all";
  }
  return "?";
}

const char* to_string(ApMode m) { return m == ApMode::Eleven ? "11" : "40"; }

const char* to_string(IouMetric m) { return m == IouMetric::BirdsEye ? "AP_bv" : "AP_3d"; }

double EvalConfig::threshold_for(const std::string& cls) const {
  const auto it = iou_threshold.find(cls);
  return it != iou_threshold.end() ? it->second : 0.5;
}

namespace {

using Pt = Eigen::Vector2d;  // (x, z) on the ground plane
using Polygon = std::vector<Pt>;

constexpr double kSliverArea = 1e-12;

double cross(const Pt& a, const Pt& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Polygon& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) a += cross(p[i], p[(i + 1) % p.size()]);
  return 0.5 * a;
}

Polygon footprint(const ObjectBox3D& box) {
  const double c = std::cos(box.yaw()), s = std::sin(box.yaw());
  const double hw = 0.5 * box.width(), hl = 0.5 * box.length();
  Polygon poly;
  for (const auto& [ox, oz] : std::array<std::pair<double, double>, 4>{{{-hw, -hl}, {hw, -hl}, {hw, hl}, {-hw, hl}}})
    poly.emplace_back(box.center().x() + c * ox + s * oz, box.center().z() - s * ox + c * oz);
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

// Sutherland-Hodgman: clip `subject` against the convex, counter-clockwise `clip`.
Polygon clip_polygon(Polygon subject, const Polygon& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Pt a = clip[e], b = clip[(e + 1) % clip.size()];
    const Pt edge = b - a;
    auto side = [&](const Pt& p) { return cross(edge, p - a); };
    Polygon out;
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Pt& cur = subject[i];
      const Pt& prev = subject[(i + subject.size() - 1) % subject.size()];
      const double sc = side(cur), sp = side(prev);
      if (sc >= 0.0) {
        if (sp < 0.0) out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
        out.push_back(cur);
      } else if (sp >= 0.0) {
        out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

struct Bounds {
  double lo_x, hi_x, lo_z, hi_z;
};

Bounds bounds_of(const Polygon& p) {
  Bounds b{p[0].x(), p[0].x(), p[0].y(), p[0].y()};
  for (const Pt& q : p) {
    b.lo_x = std::min(b.lo_x, q.x());
    b.hi_x = std::max(b.hi_x, q.x());
    b.lo_z = std::min(b.lo_z, q.y());
    b.hi_z = std::max(b.hi_z, q.y());
  }
  return b;
}

double min_height_for(Difficulty d) { return d == Difficulty::Easy ? 40.0 : 25.0; }

}  // namespace

double bev_intersection_area(const ObjectBox3D& a, const ObjectBox3D& b) {
  const Polygon pa = footprint(a), pb = footprint(b);
  const Bounds ba = bounds_of(pa), bb = bounds_of(pb);
  if (ba.hi_x < bb.lo_x || bb.hi_x < ba.lo_x || ba.hi_z < bb.lo_z || bb.hi_z < ba.lo_z) return 0.0;
  const Polygon inter = clip_polygon(pa, pb);
  if (inter.size() < 3) return 0.0;
  const double area = std::abs(signed_area(inter));
  return area < kSliverArea ? 0.0 : area;
}

double bev_iou(const ObjectBox3D& a, const ObjectBox3D& b) {
  const double inter = bev_intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = a.width() * a.length() + b.width() * b.length() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const ObjectBox3D& a, const ObjectBox3D& b) {
  const double top = std::max(a.center().y() - 0.5 * a.height(), b.center().y() - 0.5 * b.height());
  const double bottom = std::min(a.center().y() + 0.5 * a.height(), b.center().y() + 0.5 * b.height());
  const double overlap = bottom - top;
  if (overlap <= 0.0) return 0.0;
  const double inter = bev_intersection_area(a, b) * overlap;
  if (inter == 0.0) return 0.0;
  const double va = a.width() * a.height() * a.length();
  const double vb = b.width() * b.height() * b.length();
  return std::clamp(inter / (va + vb - inter), 0.0, 1.0);
}

bool meets_difficulty(double height_2d, int occluded, double truncated, Difficulty d) {
  switch (d) {
    case Difficulty::All: return true;
    case Difficulty::Easy: return height_2d >= 40.0 && occluded <= 0 && truncated <= 0.15;
    case Difficulty::Moderate: return height_2d >= 25.0 && occluded <= 1 && truncated <= 0.30;
    case Difficulty::Hard: return height_2d >= 25.0 && occluded <= 2 && truncated <= 0.50;
  }
  return false;
}

double interpolated_ap(std::span<const PrPoint> curve, ApMode mode) {
  const int n = mode == ApMode::Eleven ? 11 : 40;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = mode == ApMode::Eleven ? i / 10.0 : (i + 1) / 40.0;
    double best = 0.0;
    for (const PrPoint& p : curve)
      if (p.recall >= r) best = std::max(best, p.precision);
    sum += best;
  }
  return sum / n;
}

ApResult average_precision_for(const DetectionSet& dets, const DetectionSet& gts, const std::string& cls,
                               const EvalConfig& cfg, IouMetric metric, Difficulty difficulty) {
  const double thr = cfg.threshold_for(cls);
  if (!(thr > 0.0) || !(thr <= 1.0)) throw DomainError("IoU threshold must be in (0, 1]");
  ApResult res;
  res.cls = cls;

  std::vector<const Detection*> gt;
  std::vector<bool> care;
  for (const Detection& g : gts) {
    if (g.cls != cls) continue;
    gt.push_back(&g);
    care.push_back(meets_difficulty(g.height_2d, g.occluded, g.truncated, difficulty));
  }
  res.num_gt = static_cast<int>(std::count(care.begin(), care.end(), true));
  res.has_ground_truth = res.num_gt > 0;

  std::vector<const Detection*> det;
  for (const Detection& d : dets)
    if (d.cls == cls) det.push_back(&d);
  std::stable_sort(det.begin(), det.end(), [](const Detection* a, const Detection* b) { return a->score > b->score; });
  res.num_det = static_cast<int>(det.size());

  auto iou = [metric](const ObjectBox3D& a, const ObjectBox3D& b) {
    return metric == IouMetric::BirdsEye ? bev_iou(a, b) : iou_3d(a, b);
  };

  std::vector<bool> matched(gt.size(), false);
  int tp = 0, fp = 0;
  for (const Detection* d : det) {
    int best = -1, best_ignored = -1;
    double best_iou = -1.0, best_ignored_iou = -1.0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (gt[g]->frame != d->frame) continue;
      const double o = iou(d->box, gt[g]->box);
      if (o < thr) continue;
      if (care[g]) {
        if (!matched[g] && o > best_iou) best = static_cast<int>(g), best_iou = o;
      } else if (o > best_ignored_iou) {
        best_ignored = static_cast<int>(g), best_ignored_iou = o;
      }
    }
    if (best >= 0) {
      matched[best] = true;
      ++tp;
    } else if (best_ignored >= 0) {
      continue;  // matches a ground truth outside this regime
    } else if (difficulty != Difficulty::All && d->height_2d < min_height_for(difficulty)) {
      continue;  // too small to be scored in this regime
    } else {
      ++fp;
    }
    if (res.num_gt > 0)
      res.curve.push_back({static_cast<double>(tp) / (tp + fp), static_cast<double>(tp) / res.num_gt});
  }
  res.ap = res.has_ground_truth ? interpolated_ap(res.curve, cfg.mode) : 0.0;
  return res;
}

std::vector<ApResult> average_precision(const DetectionSet& dets, const DetectionSet& gts, const EvalConfig& cfg,
                                        IouMetric metric, Difficulty difficulty) {
  std::set<std::string> classes;
  for (const Detection& d : gts) classes.insert(d.cls);
  for (const Detection& d : dets) classes.insert(d.cls);
  std::vector<ApResult> out;
  for (const std::string& c : classes) out.push_back(average_precision_for(dets, gts, c, cfg, metric, difficulty));
  return out;
}

std::vector<MetricRow> evaluate_all(const DetectionSet& dets, const DetectionSet& gts, const EvalConfig& cfg) {
  std::vector<MetricRow> rows;
  for (IouMetric m : {IouMetric::BirdsEye, IouMetric::Box3D})
    for (Difficulty d : {Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard, Difficulty::All})
      for (ApResult& r : average_precision(dets, gts, cfg, m, d)) {
        std::string cls = r.cls;
        rows.push_back({std::move(cls), d, m, std::move(r)});
      }
  std::stable_sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) { return a.cls < b.cls; });
  return rows;
}

std::string metrics_text(const std::vector<MetricRow>& rows, const EvalConfig& cfg) {
  std::string out = "AP mode: " + std::string(to_string(cfg.mode)) + "-point\n";
  char buf[160];
  for (const MetricRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%-12s %-9s %-6s IoU>=%.2f  AP=%8.4f  (gt=%d det=%d)%s\n", r.cls.c_str(),
                  to_string(r.difficulty), to_string(r.metric), cfg.threshold_for(r.cls), 100.0 * r.result.ap,
                  r.result.num_gt, r.result.num_det, r.result.has_ground_truth ? "" : "  [no ground truth]");
    out += buf;
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "class,difficulty,metric,value\n";
  char buf[64];
  for (const MetricRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.result.ap);
    out += r.cls + "," + to_string(r.difficulty) + "," + to_string(r.metric) + "," + buf + "\n";
  }
  return out;
}

}  // namespace uniloc
