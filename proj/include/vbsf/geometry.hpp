#pragma once

#include <optional>
#include <string_view>

namespace vbsf {

/// Axis-aligned box in pixel units: (x, y) is the top-left corner.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }

  /// w > 0, h > 0 and every coordinate finite.
  bool valid() const;

  BoundingBox translated(double dx, double dy) const { return {x + dx, y + dy, w, h}; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

enum class Label { Drone, NonDrone };

std::string_view to_string(Label label);

struct Detection {
  BoundingBox box;
  double score = 0.0;
  Label label = Label::Drone;

  friend bool operator==(const Detection&, const Detection&) = default;
};

double box_area(const BoundingBox& b);

/// Overlap rectangle, or nullopt when the interiors are disjoint.
/// Boxes that only share an edge or a corner are disjoint.
std::optional<BoundingBox> box_intersection(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union in [0, 1]; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace vbsf
