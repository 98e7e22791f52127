#include "vbsf/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace vbsf {

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) && w > 0.0 &&
         h > 0.0;
}

std::string_view to_string(Label label) {
  return label == Label::Drone ? "drone" : "non_drone";
}

double box_area(const BoundingBox& b) { return b.w * b.h; }

std::optional<BoundingBox> box_intersection(const BoundingBox& a, const BoundingBox& b) {
  const double left = std::max(a.x, b.x);
  const double top = std::max(a.y, b.y);
  const double right = std::min(a.right(), b.right());
  const double bottom = std::min(a.bottom(), b.bottom());
  if (right <= left || bottom <= top) return std::nullopt;
  return BoundingBox{left, top, right - left, bottom - top};
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const auto overlap = box_intersection(a, b);
  if (!overlap) return 0.0;
  if (a == b) return 1.0;
  const double inter = box_area(*overlap);
  const double uni = box_area(a) + box_area(b) - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace vbsf
