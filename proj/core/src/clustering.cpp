#include "tourrec/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include "csv.hpp"
#include "tourrec/error.hpp"
#include "tourrec/rng.hpp"

namespace tourrec {

std::vector<FeatureVector> featurize(const PlaceCatalog& catalog, double category_weight) {
  if (catalog.empty()) throw Error(ErrorCode::InvalidArgument, "cannot featurize an empty catalog");
  double lat_lo = std::numeric_limits<double>::infinity(), lat_hi = -lat_lo;
  double lon_lo = lat_lo, lon_hi = -lat_lo;
  for (const auto& p : catalog.places()) {
    lat_lo = std::min(lat_lo, p.location.lat);
    lat_hi = std::max(lat_hi, p.location.lat);
    lon_lo = std::min(lon_lo, p.location.lon);
    lon_hi = std::max(lon_hi, p.location.lon);
  }
  auto scale = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };

  std::vector<FeatureVector> out;
  out.reserve(catalog.size());
  for (const auto& p : catalog.places()) {
    FeatureVector f(kPlaceFeatureDim, 0.0);
    f[0] = scale(p.location.lat, lat_lo, lat_hi);
    f[1] = scale(p.location.lon, lon_lo, lon_hi);
    for (std::size_t c = 0; c < kCategoryCount; ++c)
      f[2 + c] = p.categories.test(c) ? category_weight : 0.0;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<ItemId> ClusterModel::members(std::uint32_t cluster) const {
  std::vector<ItemId> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == cluster) out.push_back(static_cast<ItemId>(i));
  return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

namespace {

std::uint32_t nearest(std::span<const double> point, const std::vector<FeatureVector>& centroids,
                      double* dist_out = nullptr) {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = squared_distance(point, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(c);
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

}  // namespace

ClusterModel kmeans(std::span<const FeatureVector> points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no points to cluster");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (k > points.size())
    throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds " +
                                          std::to_string(points.size()) + " points");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "points differ in dimension");

  // Seeded choice of k distinct point indices (partial Fisher-Yates).
  Rng rng(seed);
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ClusterModel model;
  model.k = k;
  for (std::size_t c = 0; c < k; ++c) {
    auto j = c + static_cast<std::size_t>(rng.below(points.size() - c));
    std::swap(order[c], order[j]);
    model.centroids.push_back(points[order[c]]);
  }

  const std::size_t n = points.size();
  std::vector<std::uint32_t> assignment(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> sizes(k);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      assignment[i] = nearest(points[i], model.centroids, &dist[i]);
      inertia += dist[i];
    }
    model.inertia_history.push_back(inertia);

    std::vector<FeatureVector> next(k, FeatureVector(dim, 0.0));
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& acc = next[assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) acc[d] += points[i][d];
      ++sizes[assignment[i]];
    }
    bool reseeded = false;
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) {
        for (auto& v : next[c]) v /= static_cast<double>(sizes[c]);
        continue;
      }
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      taken[far] = true;
      next[c] = points[far];
      reseeded = true;
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c)
      shift = std::max(shift, std::sqrt(squared_distance(next[c], model.centroids[c])));
    model.centroids = std::move(next);
    model.iterations_run = iter + 1;
    if (!reseeded && shift < options.tol) {
      model.converged = true;
      break;
    }
  }

  model.assignment = assignment;
  model.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    model.inertia += squared_distance(points[i], model.centroids[assignment[i]]);
  return model;
}

std::uint32_t assign_point(std::span<const double> point, const ClusterModel& model) {
  if (model.centroids.empty()) throw Error(ErrorCode::InvalidArgument, "model has no centroids");
  if (point.size() != model.centroids.front().size())
    throw Error(ErrorCode::DimensionMismatch, "point dimension " + std::to_string(point.size()) +
                                                  " != centroid dimension " +
                                                  std::to_string(model.centroids.front().size()));
  return nearest(point, model.centroids);
}

ClusterModel single_cluster(std::size_t items) {
  ClusterModel m;
  m.k = 1;
  m.assignment.assign(items, 0);
  m.centroids.push_back(FeatureVector(kPlaceFeatureDim, 0.0));
  m.converged = true;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr std::string_view kCentroidMarker = "#centroids";

}  // namespace

void write_clusters(std::ostream& out, const ClusterModel& model, const PlaceCatalog& catalog) {
  out << "place_id,cluster_id\n";
  for (std::size_t i = 0; i < model.assignment.size(); ++i)
    out << catalog.at(static_cast<ItemId>(i)).id << ',' << model.assignment[i] << '\n';
  out << kCentroidMarker << '\n' << "cluster_id,lat,lon";
  for (auto sym : kCategorySymbols) out << ',' << sym;
  out << '\n';
  for (std::size_t c = 0; c < model.centroids.size(); ++c) {
    out << c;
    for (double v : model.centroids[c]) out << ',' << exact(v);
    out << '\n';
  }
}

ClusterModel read_clusters(std::istream& in, const PlaceCatalog& catalog, std::string_view source) {
  std::string line;
  if (!csv::next_line(in, line) || line.empty())
    throw Error(ErrorCode::EmptyFile, std::string(source) + ": empty cluster file");
  if (line != "place_id,cluster_id") csv::malformed(source, 1, "unexpected cluster header");
  ClusterModel m;
  m.assignment.assign(catalog.size(), 0);
  std::vector<bool> seen(catalog.size(), false);
  std::size_t line_no = 1;
  bool centroid_block = false;
  while (csv::next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line == kCentroidMarker) {
      centroid_block = true;
      csv::next_line(in, line);  // column header
      ++line_no;
      continue;
    }
    auto f = csv::split(line);
    if (!centroid_block) {
      if (f.size() != 2) csv::malformed(source, line_no, "expected place_id,cluster_id");
      auto pid = csv::parse_number<PlaceId>(f[0]);
      auto cid = csv::parse_number<std::uint32_t>(f[1]);
      if (!pid || !cid) csv::malformed(source, line_no, "bad cluster row");
      auto item = catalog.item_of(*pid);
      if (!item)
        throw Error(ErrorCode::UnknownPlaceId,
                    std::string(source) + ": unknown place id " + std::to_string(*pid));
      m.assignment[*item] = *cid;
      seen[*item] = true;
    } else {
      if (f.size() != 1 + kPlaceFeatureDim) csv::malformed(source, line_no, "bad centroid row");
      FeatureVector c;
      for (std::size_t d = 1; d < f.size(); ++d) {
        auto v = csv::parse_number<double>(f[d]);
        if (!v) csv::malformed(source, line_no, "bad centroid value");
        c.push_back(*v);
      }
      m.centroids.push_back(std::move(c));
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    csv::malformed(source, line_no, "cluster file does not cover every place");
  m.k = m.centroids.size();
  for (auto c : m.assignment)
    if (c >= m.k) csv::malformed(source, line_no, "cluster id without centroid");
  return m;
}

ClusterModel load_clusters(const std::filesystem::path& path, const PlaceCatalog& catalog) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_clusters(in, catalog, path.string());
}

}  // namespace tourrec
