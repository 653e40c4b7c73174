#include "tourrec/data_model.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "csv.hpp"
#include "tourrec/error.hpp"
#include "tourrec/rng.hpp"

namespace tourrec {

namespace {

constexpr std::string_view kPlaceHeader = "id,city,name,lat,lon,A,C,E,H,N,R,SP,SH,B,L";
constexpr std::string_view kVisitorHeader = "id,age,gender,prefs,cur_lat,cur_lon";

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::string join_symbols(const CategoryFlags& flags) {
  std::string out;
  for (std::size_t c = 0; c < kCategoryCount; ++c) {
    if (!flags.test(c)) continue;
    if (!out.empty()) out.push_back(';');
    out.append(kCategorySymbols[c]);
  }
  return out;
}

}  // namespace

std::optional<Category> category_from_symbol(std::string_view symbol) {
  for (std::size_t c = 0; c < kCategoryCount; ++c)
    if (kCategorySymbols[c] == symbol) return static_cast<Category>(c);
  return std::nullopt;
}

bool valid_coordinate(GeoPoint p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

// ---------------------------------------------------------------------------

PlaceCatalog::PlaceCatalog(std::vector<Place> places) : places_(std::move(places)) {
  index_.reserve(places_.size());
  for (std::size_t i = 0; i < places_.size(); ++i) {
    const auto& p = places_[i];
    if (p.id == 0)
      throw Error(ErrorCode::MalformedRow, "place id must be positive");
    if (!valid_coordinate(p.location))
      throw Error(ErrorCode::MalformedRow,
                  "place " + std::to_string(p.id) + " has out-of-range coordinates");
    if (p.categories.none())
      throw Error(ErrorCode::MalformedRow,
                  "place " + std::to_string(p.id) + " has no category flag");
    if (!index_.emplace(p.id, static_cast<ItemId>(i)).second)
      throw Error(ErrorCode::DuplicateId, "duplicate place id " + std::to_string(p.id));
  }
}

std::optional<ItemId> PlaceCatalog::item_of(PlaceId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<PlaceId> PlaceCatalog::ids() const {
  std::vector<PlaceId> out;
  out.reserve(places_.size());
  for (const auto& p : places_) out.push_back(p.id);
  return out;
}

PlaceCatalog load_places(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_places(in, path.string());
}

PlaceCatalog read_places(std::istream& in, std::string_view source) {
  std::string line;
  if (!csv::next_line(in, line) || line.empty())
    throw Error(ErrorCode::EmptyFile, std::string(source) + ": empty place file");
  if (line != kPlaceHeader) csv::malformed(source, 1, "unexpected place header");

  std::vector<Place> places;
  std::unordered_set<PlaceId> seen;
  std::size_t line_no = 1;
  while (csv::next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() != 5 + kCategoryCount) csv::malformed(source, line_no, "expected 15 fields");
    Place p;
    auto id = csv::parse_number<PlaceId>(f[0]);
    auto lat = csv::parse_number<double>(f[3]);
    auto lon = csv::parse_number<double>(f[4]);
    if (!id || *id == 0) csv::malformed(source, line_no, "bad id");
    if (!lat || !lon) csv::malformed(source, line_no, "bad coordinate");
    p.id = *id;
    p.city = f[1];
    p.name = f[2];
    p.location = {*lat, *lon};
    if (!valid_coordinate(p.location)) csv::malformed(source, line_no, "coordinate out of range");
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      const auto& flag = f[5 + c];
      if (flag == "1")
        p.categories.set(c);
      else if (!flag.empty())
        csv::malformed(source, line_no, "category flag must be 1 or empty");
    }
    if (p.categories.none()) csv::malformed(source, line_no, "no category flag set");
    if (!seen.insert(p.id).second)
      throw Error(ErrorCode::DuplicateId, std::string(source) + ":" + std::to_string(line_no) +
                                              ": duplicate place id " + std::to_string(p.id));
    places.push_back(std::move(p));
  }
  if (places.empty())
    throw Error(ErrorCode::EmptyFile, std::string(source) + ": no place rows");
  return PlaceCatalog(std::move(places));
}

void write_places(std::ostream& out, const PlaceCatalog& catalog) {
  out << kPlaceHeader << '\n';
  for (const auto& p : catalog.places()) {
    out << p.id << ',' << csv::quote(p.city) << ',' << csv::quote(p.name) << ','
        << csv::fixed6(p.location.lat) << ',' << csv::fixed6(p.location.lon);
    for (std::size_t c = 0; c < kCategoryCount; ++c) out << ',' << (p.categories.test(c) ? "1" : "");
    out << '\n';
  }
}

PlaceCatalog synthesize_catalog(std::size_t count, std::uint64_t seed) {
  struct Province {
    std::string_view city;
    GeoPoint centre;
    double weight;
  };
  static constexpr Province provinces[] = {
      {"Baghdad", {33.3152, 44.3661}, 3.0},   {"Basra", {30.5085, 47.7804}, 1.0},
      {"Mosul", {36.3400, 43.1300}, 1.0},     {"Erbil", {36.1900, 43.9930}, 2.0},
      {"Sulaymaniyah", {35.5613, 45.4375}, 1.5}, {"Duhok", {36.8671, 42.9885}, 1.0},
      {"Kirkuk", {35.4681, 44.3922}, 1.0},    {"Baqubah", {33.7500, 44.6333}, 0.7},
      {"Ramadi", {33.4206, 43.3078}, 0.7},    {"Tikrit", {34.6000, 43.6833}, 0.7},
      {"Hillah", {32.4833, 44.4333}, 1.0},    {"Karbala", {32.6160, 44.0249}, 2.0},
      {"Najaf", {32.0259, 44.3462}, 2.0},     {"Kut", {32.5128, 45.8182}, 0.7},
      {"Amarah", {31.8356, 47.1440}, 0.7},    {"Nasiriyah", {31.0439, 46.2576}, 1.0},
      {"Diwaniyah", {31.9929, 44.9257}, 0.7}, {"Samawah", {31.3099, 45.2803}, 0.7},
  };
  // Relative share of each destination type, catalog column order.
  static constexpr double category_weight[kCategoryCount] = {6, 20, 7, 4, 12, 22, 5, 7, 7, 10};

  Rng rng(seed);
  std::vector<double> province_weight;
  for (const auto& p : provinces) province_weight.push_back(p.weight);

  std::unordered_map<std::string_view, int> per_city;
  std::vector<Place> places;
  places.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& prov = provinces[rng.weighted(province_weight)];
    Place p;
    p.id = static_cast<PlaceId>(i + 1);
    p.city = prov.city;
    auto primary = rng.weighted(category_weight);
    p.categories.set(primary);
    if (rng.chance(0.3)) p.categories.set(rng.weighted(category_weight));
    double lat = prov.centre.lat + (rng.unit() - 0.5) * 0.7;
    double lon = prov.centre.lon + (rng.unit() - 0.5) * 0.7;
    // Round to the 6-decimal file precision so a write/read cycle is exact.
    p.location = {std::round(lat * 1e6) / 1e6, std::round(lon * 1e6) / 1e6};
    p.name = std::string(prov.city) + " " + std::string(kCategoryNames[primary]) + " Site " +
             std::to_string(++per_city[prov.city]);
    places.push_back(std::move(p));
  }
  return PlaceCatalog(std::move(places));
}

// ---------------------------------------------------------------------------

std::string_view to_string(Gender g) noexcept {
  switch (g) {
    case Gender::Female: return "female";
    case Gender::Male: return "male";
    case Gender::Unspecified: return "unspecified";
  }
  return "unspecified";
}

std::optional<Gender> gender_from_string(std::string_view text) {
  if (text == "female") return Gender::Female;
  if (text == "male") return Gender::Male;
  if (text == "unspecified") return Gender::Unspecified;
  return std::nullopt;
}

std::vector<Visitor> load_visitors(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_visitors(in, path.string());
}

std::vector<Visitor> read_visitors(std::istream& in, std::string_view source) {
  std::string line;
  if (!csv::next_line(in, line) || line.empty())
    throw Error(ErrorCode::EmptyFile, std::string(source) + ": empty visitor file");
  if (line != kVisitorHeader) csv::malformed(source, 1, "unexpected visitor header");
  std::vector<Visitor> out;
  std::unordered_set<VisitorId> seen;
  std::size_t line_no = 1;
  while (csv::next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() != 6) csv::malformed(source, line_no, "expected 6 fields");
    Visitor v;
    auto id = csv::parse_number<VisitorId>(f[0]);
    auto age = csv::parse_number<int>(f[1]);
    auto gender = gender_from_string(f[2]);
    auto lat = csv::parse_number<double>(f[4]);
    auto lon = csv::parse_number<double>(f[5]);
    if (!id || *id == 0) csv::malformed(source, line_no, "bad id");
    if (!age || *age < 0) csv::malformed(source, line_no, "bad age");
    if (!gender) csv::malformed(source, line_no, "bad gender");
    if (!lat || !lon || !valid_coordinate({*lat, *lon}))
      csv::malformed(source, line_no, "bad coordinate");
    for (const auto& sym : csv::split(f[3], ';')) {
      auto c = category_from_symbol(sym);
      if (!c) csv::malformed(source, line_no, "unknown category symbol '" + sym + "'");
      v.preferences.set(static_cast<std::size_t>(*c));
    }
    if (v.preferences.none()) csv::malformed(source, line_no, "empty preferences");
    v.id = *id;
    v.age = *age;
    v.gender = *gender;
    v.current_location = {*lat, *lon};
    if (!seen.insert(v.id).second)
      throw Error(ErrorCode::DuplicateId, std::string(source) + ": duplicate visitor id " +
                                              std::to_string(v.id));
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::EmptyFile, std::string(source) + ": no visitor rows");
  return out;
}

void write_visitors(std::ostream& out, const std::vector<Visitor>& visitors) {
  out << kVisitorHeader << '\n';
  for (const auto& v : visitors) {
    out << v.id << ',' << v.age << ',' << to_string(v.gender) << ','
        << join_symbols(v.preferences) << ',' << csv::fixed6(v.current_location.lat) << ','
        << csv::fixed6(v.current_location.lon) << '\n';
  }
}

// ---------------------------------------------------------------------------

TransactionMatrix::TransactionMatrix(std::vector<VisitorId> visitor_ids,
                                     std::vector<PlaceId> place_ids)
    : visitor_ids_(std::move(visitor_ids)), place_ids_(std::move(place_ids)) {
  if (visitor_ids_.empty() || place_ids_.empty())
    throw Error(ErrorCode::InvalidArgument, "transaction matrix needs rows and items");
  rows_.assign(visitor_ids_.size(), Bitset(place_ids_.size()));
  row_index_.reserve(visitor_ids_.size());
  for (std::size_t r = 0; r < visitor_ids_.size(); ++r)
    if (!row_index_.emplace(visitor_ids_[r], r).second)
      throw Error(ErrorCode::DuplicateId,
                  "duplicate visitor id " + std::to_string(visitor_ids_[r]));
}

std::optional<std::size_t> TransactionMatrix::row_of(VisitorId id) const {
  auto it = row_index_.find(id);
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t TransactionMatrix::positives() const noexcept {
  std::size_t total = 0;
  for (const auto& r : rows_) total += r.count();
  return total;
}

TransactionMatrix build_matrix(const PlaceCatalog& catalog, const std::vector<Visitor>& visitors,
                               const std::vector<VisitEvent>& events) {
  std::vector<VisitorId> vids;
  vids.reserve(visitors.size());
  for (const auto& v : visitors) vids.push_back(v.id);
  TransactionMatrix m(std::move(vids), catalog.ids());

  std::unordered_set<std::uint64_t> pairs;
  pairs.reserve(events.size());
  for (const auto& e : events) {
    auto row = m.row_of(e.visitor_id);
    if (!row)
      throw Error(ErrorCode::UnknownVisitorId, "event references unknown visitor " +
                                                   std::to_string(e.visitor_id));
    auto item = catalog.item_of(e.place_id);
    if (!item)
      throw Error(ErrorCode::UnknownPlaceId,
                  "event references unknown place " + std::to_string(e.place_id));
    auto key = (std::uint64_t{e.visitor_id} << 32) | e.place_id;
    if (!pairs.insert(key).second)
      throw Error(ErrorCode::DuplicateId, "duplicate visit event (" +
                                              std::to_string(e.visitor_id) + ", " +
                                              std::to_string(e.place_id) + ")");
    if (e.visited) m.set(*row, *item);
  }
  return m;
}

TransactionMatrix load_transactions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_transactions(in, path.string());
}

TransactionMatrix read_transactions(std::istream& in, std::string_view source) {
  std::string line;
  if (!csv::next_line(in, line) || line.empty())
    throw Error(ErrorCode::EmptyFile, std::string(source) + ": empty transaction file");
  auto header = csv::split(line);
  if (header.size() < 2 || header[0] != "visitor_id")
    csv::malformed(source, 1, "unexpected transaction header");
  std::vector<PlaceId> place_ids;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto id = csv::parse_number<PlaceId>(header[i]);
    if (!id) csv::malformed(source, 1, "bad place id in header");
    place_ids.push_back(*id);
  }

  std::vector<VisitorId> visitor_ids;
  std::vector<std::vector<ItemId>> cells;
  std::size_t line_no = 1;
  while (csv::next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = csv::split(line);
    if (f.size() != header.size()) csv::malformed(source, line_no, "row width differs from header");
    auto id = csv::parse_number<VisitorId>(f[0]);
    if (!id || *id == 0) csv::malformed(source, line_no, "bad visitor id");
    visitor_ids.push_back(*id);
    auto& row = cells.emplace_back();
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (f[i] == "1")
        row.push_back(static_cast<ItemId>(i - 1));
      else if (f[i] != "0")
        csv::malformed(source, line_no, "cell must be 0 or 1");
    }
  }
  if (visitor_ids.empty())
    throw Error(ErrorCode::EmptyFile, std::string(source) + ": no transaction rows");

  TransactionMatrix m(std::move(visitor_ids), std::move(place_ids));
  for (std::size_t r = 0; r < cells.size(); ++r)
    for (auto item : cells[r]) m.set(r, item);
  return m;
}

void write_transactions(std::ostream& out, const TransactionMatrix& matrix) {
  out << "visitor_id";
  for (auto id : matrix.place_ids()) out << ',' << id;
  out << '\n';
  std::string line;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    line = std::to_string(matrix.visitor_ids()[r]);
    const auto& row = matrix.row(r);
    for (std::size_t i = 0; i < matrix.items(); ++i) {
      line.push_back(',');
      line.push_back(row.test(i) ? '1' : '0');
    }
    line.push_back('\n');
    out << line;
  }
}

// ---------------------------------------------------------------------------

Dataset generate_dataset(const PlaceCatalog& catalog, std::size_t visitors, std::size_t events,
                         std::uint64_t seed, const GeneratorOptions& options) {
  const std::size_t n = catalog.size();
  if (n == 0) throw Error(ErrorCode::InvalidCounts, "catalog is empty");
  if (visitors == 0) throw Error(ErrorCode::InvalidCounts, "need at least one visitor");
  if (events < visitors)
    throw Error(ErrorCode::InvalidCounts, "events (" + std::to_string(events) +
                                              ") must be >= visitors (" +
                                              std::to_string(visitors) + ")");
  if (events > visitors * n)
    throw Error(ErrorCode::InvalidCounts, "more events than visitor x place cells");

  Rng rng(seed);

  // Popularity: a seeded rank permutation with Zipf weights.
  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  rng.shuffle(rank.begin(), rank.end());
  std::vector<double> popularity(n);
  for (std::size_t i = 0; i < n; ++i)
    popularity[i] = 1.0 / std::pow(static_cast<double>(rank[i] + 1), options.popularity_exponent);

  std::vector<double> category_freq(kCategoryCount, 0.0);
  for (const auto& p : catalog.places())
    for (std::size_t c = 0; c < kCategoryCount; ++c)
      if (p.categories.test(c)) category_freq[c] += 1.0;
  auto usable_categories = static_cast<std::size_t>(
      std::count_if(category_freq.begin(), category_freq.end(), [](double f) { return f > 0; }));

  Dataset out;
  out.visitors.reserve(visitors);
  for (std::size_t v = 0; v < visitors; ++v) {
    Visitor vis;
    vis.id = static_cast<VisitorId>(v + 1);
    vis.age = static_cast<int>(rng.between(options.min_age, options.max_age));
    vis.gender = rng.chance(0.5) ? Gender::Female : Gender::Male;
    auto want = std::min<std::size_t>(static_cast<std::size_t>(rng.between(1, 3)), usable_categories);
    auto weights = category_freq;
    for (std::size_t k = 0; k < want; ++k) {
      auto c = rng.weighted(weights);
      vis.preferences.set(c);
      weights[c] = 0.0;
    }
    const auto& anchor = catalog.at(static_cast<ItemId>(rng.below(n))).location;
    vis.current_location = {
        std::clamp(std::round((anchor.lat + (rng.unit() - 0.5) * 0.2) * 1e6) / 1e6, -90.0, 90.0),
        std::clamp(std::round((anchor.lon + (rng.unit() - 0.5) * 0.2) * 1e6) / 1e6, -180.0, 180.0)};
    out.visitors.push_back(vis);
  }

  // One visit each, the remainder spread uniformly over visitors with room.
  std::vector<std::size_t> visit_count(visitors, 1);
  for (std::size_t extra = events - visitors; extra > 0; --extra) {
    std::size_t v;
    do {
      v = static_cast<std::size_t>(rng.below(visitors));
    } while (visit_count[v] >= n);
    ++visit_count[v];
  }

  // Companion: the nearest other place sharing a category, lowest ordinal on ties.
  std::vector<ItemId> companion(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = catalog.at(static_cast<ItemId>(i));
    double best = std::numeric_limits<double>::infinity();
    companion[i] = static_cast<ItemId>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = catalog.at(static_cast<ItemId>(j));
      if (j == i || (a.categories & b.categories).none()) continue;
      double dlat = a.location.lat - b.location.lat, dlon = a.location.lon - b.location.lon;
      double d = dlat * dlat + dlon * dlon;
      if (d < best) {
        best = d;
        companion[i] = static_cast<ItemId>(j);
      }
    }
  }

  std::vector<double> preferred(n), uniform(n);
  for (std::size_t v = 0; v < visitors; ++v) {
    const auto& vis = out.visitors[v];
    for (std::size_t i = 0; i < n; ++i) {
      bool match = (catalog.at(static_cast<ItemId>(i)).categories & vis.preferences).any();
      preferred[i] = match ? popularity[i] : 0.0;
      uniform[i] = 1.0;
    }
    std::vector<ItemId> chosen;
    for (std::size_t k = 0; k < visit_count[v]; ++k) {
      bool from_preferred = rng.chance(options.preferred_share);
      const auto& pool = from_preferred ? preferred : uniform;
      bool any = std::any_of(pool.begin(), pool.end(), [](double w) { return w > 0.0; });
      ItemId item;
      if (from_preferred && any && !chosen.empty() && preferred[companion[chosen.back()]] > 0.0 &&
          rng.chance(options.companion_share))
        item = companion[chosen.back()];
      else
        item = static_cast<ItemId>(rng.weighted(any ? pool : uniform));
      preferred[item] = 0.0;
      uniform[item] = 0.0;
      chosen.push_back(item);
    }
    std::sort(chosen.begin(), chosen.end());
    for (auto item : chosen) out.events.push_back({vis.id, catalog.at(item).id, true});
  }
  return out;
}

// ---------------------------------------------------------------------------

TrainTest split_train_test(const TransactionMatrix& matrix, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "train_fraction must be in (0,1)");
  Rng rng(spec.seed);
  TrainTest out{matrix, {}};
  std::vector<ItemId> items;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    items.clear();
    matrix.row(r).for_each([&](std::size_t i) { items.push_back(static_cast<ItemId>(i)); });
    if (items.size() < 2) continue;
    auto keep = static_cast<std::size_t>(
        std::ceil(spec.train_fraction * static_cast<double>(items.size()) - 1e-9));
    rng.shuffle(items.begin(), items.end());
    for (std::size_t k = keep; k < items.size(); ++k) {
      out.train.set(r, items[k], false);
      out.test.push_back({static_cast<std::uint32_t>(r), items[k]});
    }
  }
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<TrainTest> kfold(const TransactionMatrix& matrix, const SplitSpec& spec) {
  if (spec.folds < 2) throw Error(ErrorCode::InvalidArgument, "folds must be >= 2");
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < matrix.rows(); ++r)
    matrix.row(r).for_each([&](std::size_t i) {
      cells.push_back({static_cast<std::uint32_t>(r), static_cast<ItemId>(i)});
    });
  if (spec.folds > cells.size())
    throw Error(ErrorCode::FoldsTooLarge, std::to_string(spec.folds) + " folds for " +
                                              std::to_string(cells.size()) + " positive cells");
  Rng rng(spec.seed);
  rng.shuffle(cells.begin(), cells.end());

  std::vector<TrainTest> folds(spec.folds, TrainTest{matrix, {}});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& fold = folds[i % spec.folds];
    fold.train.set(cells[i].row, cells[i].item, false);
    fold.test.push_back(cells[i]);
  }
  for (auto& f : folds) std::sort(f.test.begin(), f.test.end());
  return folds;
}

}  // namespace tourrec
