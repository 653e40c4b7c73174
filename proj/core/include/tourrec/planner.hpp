#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "tourrec/data_model.hpp"
#include "tourrec/hybrid.hpp"

namespace tourrec {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance in km.
double haversine(GeoPoint a, GeoPoint b);

struct Stop {
  PlaceId place_id = 0;
  double leg_km = 0.0;  // from the previous stop (or the start)
};

struct Itinerary {
  std::vector<std::vector<Stop>> days;
  double total_distance_km = 0.0;

  std::size_t stop_count() const noexcept;
};

/// Takes the top days * per_day recommendations and orders them by greedy
/// nearest neighbour from `start`; each day continues from the previous
/// day's last stop. Ties go to the lower place id. When visiting the same
/// stops in ranked order is strictly shorter, that order is kept instead.
Itinerary plan_trip(std::span<const Recommendation> recs, const PlaceCatalog& catalog,
                    GeoPoint start, std::size_t days, std::size_t per_day);

/// Length of visiting `stops` in the given order from `start`.
double route_length(std::span<const PlaceId> stops, const PlaceCatalog& catalog, GeoPoint start);

/// `day,stop_index,place_id,name,leg_km`
void write_itinerary(std::ostream& out, const Itinerary& itinerary, const PlaceCatalog& catalog);

}  // namespace tourrec
