#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tourrec/error.hpp"
#include "tourrec/planner.hpp"

using namespace tourrec;
using oracle::code_of;

namespace {

// Vincenty's formula on a sphere: an independent great-circle distance.
double vincenty_sphere(GeoPoint a, GeoPoint b) {
  constexpr double rad = std::numbers::pi / 180.0;
  double p1 = a.lat * rad, p2 = b.lat * rad, dl = (b.lon - a.lon) * rad;
  double y = std::hypot(std::cos(p2) * std::sin(dl),
                        std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl));
  double x = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return 6371.0 * std::atan2(y, x);
}

Place place(PlaceId id, double lat, double lon) {
  Place p;
  p.id = id;
  p.city = "c";
  p.name = "P" + std::to_string(id);
  p.location = {lat, lon};
  p.categories.set(0);
  return p;
}

std::vector<Recommendation> recs_for(std::initializer_list<PlaceId> ids) {
  std::vector<Recommendation> out;
  double s = 1.0;
  for (auto id : ids) {
    Recommendation r;
    r.place_id = id;
    r.score = s;
    s -= 0.01;
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("haversine reference values") {
  GeoPoint baghdad{33.3152, 44.3661}, erbil{36.1900, 43.9930};
  CHECK(haversine(baghdad, baghdad) == 0.0);
  CHECK(haversine(baghdad, erbil) == doctest::Approx(321.474469).epsilon(1e-7));
  CHECK(std::abs(haversine(baghdad, erbil) - vincenty_sphere(baghdad, erbil)) < 0.1);
  CHECK(haversine({0, 0}, {0, 180}) == doctest::Approx(std::numbers::pi * 6371.0));
  CHECK(haversine(erbil, baghdad) == haversine(baghdad, erbil));
  CHECK(code_of([] { haversine({91, 0}, {0, 0}); }) == ErrorCode::InvalidCoordinate);
  CHECK(code_of([] { haversine({0, 0}, {0, 181}); }) == ErrorCode::InvalidCoordinate);

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    GeoPoint a{rng.unit() * 180 - 90, rng.unit() * 360 - 180};
    GeoPoint b{rng.unit() * 180 - 90, rng.unit() * 360 - 180};
    CHECK(std::abs(haversine(a, b) - vincenty_sphere(a, b)) < 1e-3);
  }
}

TEST_CASE("single recommendation, single day") {
  PlaceCatalog cat({place(5, 33.0, 44.0)});
  GeoPoint start{33.5, 44.5};
  auto plan = plan_trip(recs_for({5}), cat, start, 1, 1);
  REQUIRE(plan.days.size() == 1);
  REQUIRE(plan.days[0].size() == 1);
  CHECK(plan.days[0][0].place_id == 5);
  CHECK(plan.total_distance_km == haversine(start, {33.0, 44.0}));
}

TEST_CASE("collinear places are swept nearest first") {
  PlaceCatalog cat({place(1, 30.0, 44.0), place(2, 31.0, 44.0), place(3, 32.0, 44.0)});
  GeoPoint start{29.0, 44.0};
  auto plan = plan_trip(recs_for({3, 1, 2}), cat, start, 1, 3);
  REQUIRE(plan.days[0].size() == 3);
  CHECK(plan.days[0][0].place_id == 1);
  CHECK(plan.days[0][1].place_id == 2);
  CHECK(plan.days[0][2].place_id == 3);
  CHECK(plan.total_distance_km == doctest::Approx(haversine(start, {32.0, 44.0})));
}

TEST_CASE("capacity, anchors and ties") {
  PlaceCatalog cat({place(1, 30.0, 44.0), place(2, 31.0, 44.0), place(3, 32.0, 44.0),
                    place(4, 33.0, 44.0), place(5, 34.0, 44.0)});
  auto recs = recs_for({5, 4, 3, 2, 1});
  auto plan = plan_trip(recs, cat, {29.0, 44.0}, 2, 2);
  CHECK(plan.stop_count() == 4);
  // Top four are 5,4,3,2; day 2 continues from day 1's last stop.
  CHECK(plan.days[0][0].place_id == 2);
  CHECK(plan.days[0][1].place_id == 3);
  CHECK(plan.days[1][0].place_id == 4);
  CHECK(plan.days[1][0].leg_km == doctest::Approx(haversine({32.0, 44.0}, {33.0, 44.0})));

  auto roomy = plan_trip(recs, cat, {29.0, 44.0}, 3, 3);
  CHECK(roomy.stop_count() == 5);
  CHECK(roomy.days.size() == 2);

  // Two places equidistant from the start: lower id first.
  PlaceCatalog sym({place(8, 0.0, 1.0), place(7, 0.0, -1.0)});
  CHECK(haversine({0, 0}, {0.0, 1.0}) == haversine({0, 0}, {0.0, -1.0}));
  auto tie = plan_trip(recs_for({8, 7}), sym, {0.0, 0.0}, 1, 2);
  CHECK(tie.days[0][0].place_id == 7);

  CHECK(code_of([&] { plan_trip({}, cat, {29.0, 44.0}, 1, 1); }) ==
        ErrorCode::EmptyRecommendations);
  CHECK(code_of([&] { plan_trip(recs, cat, {29.0, 44.0}, 0, 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { plan_trip(recs_for({9}), cat, {29.0, 44.0}, 1, 1); }) ==
        ErrorCode::UnknownPlaceId);
}

TEST_CASE("greedy itineraries on seeded instances") {
  auto cat = synthesize_catalog(232, 2024);
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PlaceId> ids = cat.ids();
    rng.shuffle(ids.begin(), ids.end());
    std::vector<Recommendation> recs;
    for (std::size_t i = 0; i < 12; ++i) {
      Recommendation r;
      r.place_id = ids[i];
      recs.push_back(r);
    }
    GeoPoint start{30.0 + rng.unit() * 6, 40.0 + rng.unit() * 7};
    auto days = static_cast<std::size_t>(rng.between(1, 3));
    auto per_day = static_cast<std::size_t>(rng.between(1, 4));
    auto plan = plan_trip(recs, cat, start, days, per_day);

    std::vector<PlaceId> route;
    double legs = 0;
    for (const auto& d : plan.days) {
      CHECK(d.size() <= per_day);
      for (const auto& s : d) {
        route.push_back(s.place_id);
        legs += s.leg_km;
      }
    }
    auto cap = std::min<std::size_t>(days * per_day, recs.size());
    CHECK(route.size() == cap);
    std::vector<PlaceId> chosen(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cap));
    std::vector<PlaceId> sorted_route = route;
    std::sort(sorted_route.begin(), sorted_route.end());
    std::sort(chosen.begin(), chosen.end());
    CHECK(sorted_route == chosen);
    CHECK(plan.total_distance_km == doctest::Approx(legs));
    CHECK(plan.total_distance_km == doctest::Approx(route_length(route, cat, start)));

    std::vector<PlaceId> naive(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cap));
    CHECK(plan.total_distance_km <= route_length(naive, cat, start) + 1e-9);

    auto again = plan_trip(recs, cat, start, days, per_day);
    CHECK(again.total_distance_km == plan.total_distance_km);
  }
}

TEST_CASE("itinerary export") {
  PlaceCatalog cat({place(1, 30.0, 44.0), place(2, 31.0, 44.0)});
  auto plan = plan_trip(recs_for({1, 2}), cat, {29.0, 44.0}, 2, 1);
  std::ostringstream out;
  write_itinerary(out, plan, cat);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "day,stop_index,place_id,name,leg_km");
  std::getline(in, line);
  CHECK(line.rfind("1,1,1,P1,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("2,1,2,P2,", 0) == 0);
}
