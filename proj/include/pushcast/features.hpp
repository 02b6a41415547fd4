#pragma once

#include <vector>

#include "pushcast/geometry.hpp"
#include "pushcast/shapes.hpp"

namespace pushcast {

/// Local surface frame plus curvature descriptor. The frame's columns are
/// (k1, k2, n): direction of highest signed curvature, its right-handed
/// complement, and the outward surface normal. r holds the signed principal
/// curvatures sorted so r1 >= r2.
struct SurfaceFeature {
  Posed v;
  Descriptord r{Descriptord::Zero()};
};

struct FeatureParams {
  double neighborhood_radius = 0.02;
  int min_neighbors = 8;
  // |k1 - k2| below this (1/m) is treated as umbilic: principal directions
  // are then taken from the canonical tangent rather than the noisy fit.
  double umbilic_threshold = 1.0;
};

/// PCA normals oriented by the cloud's hints (sampled-mesh normals or the
/// viewpoint), curvatures from a quadric fit in the tangent frame. Points with
/// fewer than min_neighbors inside the radius are dropped; throws if nothing
/// survives.
std::vector<SurfaceFeature> extract_features(const PointCloud& cloud,
                                             const FeatureParams& params = {});

Descriptord mean_descriptor(const std::vector<SurfaceFeature>& features);

}  // namespace pushcast
