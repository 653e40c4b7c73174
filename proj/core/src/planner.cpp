#include "tourrec/planner.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "csv.hpp"
#include "tourrec/error.hpp"

namespace tourrec {

double haversine(GeoPoint a, GeoPoint b) {
  if (!valid_coordinate(a) || !valid_coordinate(b))
    throw Error(ErrorCode::InvalidCoordinate, "coordinate out of range");
  constexpr double rad = std::numbers::pi / 180.0;
  double dlat = (b.lat - a.lat) * rad;
  double dlon = (b.lon - a.lon) * rad;
  double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
             std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  h = std::min(1.0, h);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::size_t Itinerary::stop_count() const noexcept {
  std::size_t n = 0;
  for (const auto& d : days) n += d.size();
  return n;
}

Itinerary plan_trip(std::span<const Recommendation> recs, const PlaceCatalog& catalog,
                    GeoPoint start, std::size_t days, std::size_t per_day) {
  if (days < 1 || per_day < 1)
    throw Error(ErrorCode::InvalidArgument, "days and per_day must be >= 1");
  if (recs.empty()) throw Error(ErrorCode::EmptyRecommendations, "no recommendations to plan");
  if (!valid_coordinate(start)) throw Error(ErrorCode::InvalidCoordinate, "bad start location");

  struct Candidate {
    PlaceId id;
    GeoPoint where;
  };
  std::vector<Candidate> pool;
  for (std::size_t i = 0; i < recs.size() && pool.size() < days * per_day; ++i) {
    auto item = catalog.item_of(recs[i].place_id);
    if (!item)
      throw Error(ErrorCode::UnknownPlaceId,
                  "recommended place " + std::to_string(recs[i].place_id) + " not in catalog");
    pool.push_back({recs[i].place_id, catalog.at(*item).location});
  }

  // Greedy nearest neighbour; the anchor carries over between days.
  std::vector<Candidate> greedy;
  std::vector<Candidate> left = pool;
  GeoPoint anchor = start;
  while (!left.empty()) {
    std::size_t best = 0;
    double best_km = haversine(anchor, left[0].where);
    for (std::size_t i = 1; i < left.size(); ++i) {
      double km = haversine(anchor, left[i].where);
      if (km < best_km || (km == best_km && left[i].id < left[best].id)) {
        best = i;
        best_km = km;
      }
    }
    anchor = left[best].where;
    greedy.push_back(left[best]);
    left.erase(left.begin() + static_cast<std::ptrdiff_t>(best));
  }

  auto length = [&](const std::vector<Candidate>& route) {
    double km = 0.0;
    GeoPoint at = start;
    for (const auto& c : route) {
      km += haversine(at, c.where);
      at = c.where;
    }
    return km;
  };
  // Nearest neighbour can lose to the ranked order on small sets; keep the
  // shorter of the two.
  const auto& route = length(pool) < length(greedy) ? pool : greedy;

  Itinerary plan;
  GeoPoint at = start;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (i % per_day == 0) plan.days.emplace_back();
    double km = haversine(at, route[i].where);
    plan.days.back().push_back({route[i].id, km});
    plan.total_distance_km += km;
    at = route[i].where;
  }
  return plan;
}

double route_length(std::span<const PlaceId> stops, const PlaceCatalog& catalog, GeoPoint start) {
  double total = 0.0;
  GeoPoint at = start;
  for (auto id : stops) {
    auto item = catalog.item_of(id);
    if (!item) throw Error(ErrorCode::UnknownPlaceId, "unknown place " + std::to_string(id));
    const auto& next = catalog.at(*item).location;
    total += haversine(at, next);
    at = next;
  }
  return total;
}

void write_itinerary(std::ostream& out, const Itinerary& itinerary, const PlaceCatalog& catalog) {
  out << "day,stop_index,place_id,name,leg_km\n";
  for (std::size_t d = 0; d < itinerary.days.size(); ++d) {
    for (std::size_t s = 0; s < itinerary.days[d].size(); ++s) {
      const auto& stop = itinerary.days[d][s];
      auto item = catalog.item_of(stop.place_id);
      std::string name = item ? catalog.at(*item).name : std::string();
      out << d + 1 << ',' << s + 1 << ',' << stop.place_id << ',' << csv::quote(name) << ','
          << csv::fixed6(stop.leg_km) << '\n';
    }
  }
}

}  // namespace tourrec
