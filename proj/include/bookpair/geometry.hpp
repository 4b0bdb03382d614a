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

#pragma once

#include <compare>
#include <string_view>

namespace bookpair {

// Axis-aligned rectangle in page pixels. Origin is the top-left corner of
// the page and y grows downward. Width and height are strictly positive.
class BBox {
 public:
  // Throws GeometryError when w <= 0, h <= 0, x < 0 or y < 0 (or any
  // component is not finite).
  BBox(double x, double y, double w, double h);

  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double right() const { return x_ + w_; }
  double bottom() const { return y_ + h_; }
  double center_x() const { return x_ + w_ / 2.0; }
  double center_y() const { return y_ + h_ / 2.0; }
  double area() const { return w_ * h_; }

  // Closed containment test on the rectangle.
  bool contains_point(double px, double py) const;

  BBox translated(double dx, double dy) const { return {x_ + dx, y_ + dy, w_, h_}; }

  friend bool operator==(const BBox&, const BBox&) = default;
  friend auto operator<=>(const BBox&, const BBox&) = default;

 private:
  double x_;
  double y_;
  double w_;
  double h_;
};

enum class DistanceMetric { EdgeToEdge, CenterToCenter };

std::string_view to_string(DistanceMetric m);
DistanceMetric distance_metric_from_string(std::string_view s);

// EdgeToEdge is the Euclidean length of the gap between the rectangles and
// is zero iff they intersect or touch. CenterToCenter measures the centers.
double rect_distance(const BBox& a, const BBox& b,
                     DistanceMetric metric = DistanceMetric::EdgeToEdge);

double intersection_area(const BBox& a, const BBox& b);

// Intersection over union, in [0, 1].
double iou(const BBox& a, const BBox& b);

// Length of the overlap of [a0, a0+alen] and [b0, b0+blen], never negative.
double interval_overlap(double a0, double alen, double b0, double blen);

}  // namespace bookpair
