// Copyright 2026 The bookpair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bookpair/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "bookpair/errors.hpp"

namespace bookpair {

BBox::BBox(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h) ||
      w <= 0.0 || h <= 0.0 || x < 0.0 || y < 0.0) {
    std::ostringstream os;
    os << "invalid bbox [" << x << ", " << y << ", " << w << ", " << h << "]";
    throw GeometryError(os.str());
  }
}

bool BBox::contains_point(double px, double py) const {
  return px >= x_ && px <= right() && py >= y_ && py <= bottom();
}

std::string_view to_string(DistanceMetric m) {
  switch (m) {
    case DistanceMetric::EdgeToEdge:
      return "edge_to_edge";
    case DistanceMetric::CenterToCenter:
      return "center_to_center";
  }
  return "edge_to_edge";
}

DistanceMetric distance_metric_from_string(std::string_view s) {
  if (s == "edge_to_edge") return DistanceMetric::EdgeToEdge;
  if (s == "center_to_center") return DistanceMetric::CenterToCenter;
  throw ConfigError("unknown distance metric '" + std::string(s) + "'");
}

double rect_distance(const BBox& a, const BBox& b, DistanceMetric metric) {
  if (metric == DistanceMetric::CenterToCenter) {
    return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
  }
  const double dx = std::max({0.0, a.x() - b.right(), b.x() - a.right()});
  const double dy = std::max({0.0, a.y() - b.bottom(), b.y() - a.bottom()});
  return std::hypot(dx, dy);
}

double interval_overlap(double a0, double alen, double b0, double blen) {
  return std::max(0.0, std::min(a0 + alen, b0 + blen) - std::max(a0, b0));
}

double intersection_area(const BBox& a, const BBox& b) {
  return interval_overlap(a.x(), a.w(), b.x(), b.w()) *
         interval_overlap(a.y(), a.h(), b.y(), b.h());
}

double iou(const BBox& a, const BBox& b) {
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace bookpair
