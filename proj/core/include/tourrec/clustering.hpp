#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "tourrec/data_model.hpp"

namespace tourrec {

/// Normalised latitude, normalised longitude, then one weighted value per
/// category flag.
using FeatureVector = std::vector<double>;

inline constexpr std::size_t kPlaceFeatureDim = 2 + kCategoryCount;

/// Min-max normalises coordinates over the catalog (a dimension where every
/// place has the same value maps to 0.0) and scales flags by
/// `category_weight`.
std::vector<FeatureVector> featurize(const PlaceCatalog& catalog, double category_weight = 1.0);

struct ClusterModel {
  std::size_t k = 0;
  std::vector<FeatureVector> centroids;
  std::vector<std::uint32_t> assignment;  // item ordinal -> cluster id
  double inertia = 0.0;
  std::size_t iterations_run = 0;
  bool converged = false;
  /// Inertia measured after each assignment step.
  std::vector<double> inertia_history;

  /// Item ordinals of one cluster, ascending.
  std::vector<ItemId> members(std::uint32_t cluster) const;

  friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

struct KMeansOptions {
  double tol = 1e-6;
  std::size_t max_iter = 300;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Lloyd iteration from k distinct seeded points. Ties go to the lowest
/// cluster id; an emptied cluster is reseeded with the point farthest from
/// its centroid.
ClusterModel kmeans(std::span<const FeatureVector> points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// Nearest centroid by squared Euclidean distance, lowest id on ties.
std::uint32_t assign_point(std::span<const double> point, const ClusterModel& model);

/// Cluster export: `place_id,cluster_id` rows, then a `centroid,...` block.
void write_clusters(std::ostream& out, const ClusterModel& model, const PlaceCatalog& catalog);
ClusterModel read_clusters(std::istream& in, const PlaceCatalog& catalog,
                           std::string_view source = "<stream>");
ClusterModel load_clusters(const std::filesystem::path& path, const PlaceCatalog& catalog);

/// Model with every item in cluster 0.
ClusterModel single_cluster(std::size_t items);

}  // namespace tourrec
