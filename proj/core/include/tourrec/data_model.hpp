#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tourrec/bitset.hpp"

namespace tourrec {

// ---------------------------------------------------------------------------
// Places
// ---------------------------------------------------------------------------

/// Destination types, in catalog column order.
enum class Category : std::uint8_t {
  Adventure,
  Culture,
  Environmental,
  Health,
  Nature,
  Religious,
  Sport,
  Shopping,
  Business,
  Leisure,
};

inline constexpr std::size_t kCategoryCount = 10;
using CategoryFlags = std::bitset<kCategoryCount>;

/// Column symbols used by the place and visitor files.
inline constexpr std::array<std::string_view, kCategoryCount> kCategorySymbols = {
    "A", "C", "E", "H", "N", "R", "SP", "SH", "B", "L"};
inline constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "Adventure", "Culture",  "Environmental", "Health",   "Nature",
    "Religious", "Sport",    "Shopping",      "Business", "Leisure"};

std::optional<Category> category_from_symbol(std::string_view symbol);

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool valid_coordinate(GeoPoint p) noexcept;

using PlaceId = std::uint32_t;
using VisitorId = std::uint32_t;
/// Dense column index of a place inside a catalog / transaction matrix.
using ItemId = std::uint32_t;

struct Place {
  PlaceId id = 0;
  std::string city;
  std::string name;
  GeoPoint location;
  CategoryFlags categories;
};

/// The item universe. Item ordinals follow the order places were supplied.
class PlaceCatalog {
 public:
  PlaceCatalog() = default;
  /// Validates ids, coordinates and category flags; throws Error.
  explicit PlaceCatalog(std::vector<Place> places);

  std::size_t size() const noexcept { return places_.size(); }
  bool empty() const noexcept { return places_.empty(); }
  const Place& at(ItemId item) const { return places_.at(item); }
  const std::vector<Place>& places() const noexcept { return places_; }

  std::optional<ItemId> item_of(PlaceId id) const;
  std::vector<PlaceId> ids() const;

 private:
  std::vector<Place> places_;
  std::unordered_map<PlaceId, ItemId> index_;
};

PlaceCatalog load_places(const std::filesystem::path& path);
PlaceCatalog read_places(std::istream& in, std::string_view source = "<stream>");
void write_places(std::ostream& out, const PlaceCatalog& catalog);

/// Deterministic stand-in for the published catalog: `count` places spread
/// over Iraq's 18 provinces with Table-style category flags.
PlaceCatalog synthesize_catalog(std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Visitors and visits
// ---------------------------------------------------------------------------

enum class Gender : std::uint8_t { Female, Male, Unspecified };

std::string_view to_string(Gender g) noexcept;
std::optional<Gender> gender_from_string(std::string_view text);

struct Visitor {
  VisitorId id = 0;
  int age = 0;
  Gender gender = Gender::Unspecified;
  CategoryFlags preferences;
  GeoPoint current_location;
};

struct VisitEvent {
  VisitorId visitor_id = 0;
  PlaceId place_id = 0;
  bool visited = true;

  friend bool operator==(const VisitEvent&, const VisitEvent&) = default;
};

std::vector<Visitor> load_visitors(const std::filesystem::path& path);
std::vector<Visitor> read_visitors(std::istream& in, std::string_view source = "<stream>");
void write_visitors(std::ostream& out, const std::vector<Visitor>& visitors);

// ---------------------------------------------------------------------------
// Transactions
// ---------------------------------------------------------------------------

/// Binary visitor x place matrix; one Bitset row per visitor.
class TransactionMatrix {
 public:
  TransactionMatrix() = default;
  /// All-zero matrix. Both id lists must be non-empty.
  TransactionMatrix(std::vector<VisitorId> visitor_ids, std::vector<PlaceId> place_ids);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t items() const noexcept { return place_ids_.size(); }

  const Bitset& row(std::size_t r) const { return rows_.at(r); }
  const std::vector<Bitset>& row_bits() const noexcept { return rows_; }
  bool cell(std::size_t r, ItemId item) const { return rows_.at(r).test(item); }
  void set(std::size_t r, ItemId item, bool value = true) { rows_.at(r).assign(item, value); }

  const std::vector<VisitorId>& visitor_ids() const noexcept { return visitor_ids_; }
  const std::vector<PlaceId>& place_ids() const noexcept { return place_ids_; }
  std::optional<std::size_t> row_of(VisitorId id) const;

  std::size_t positives() const noexcept;

  friend bool operator==(const TransactionMatrix& a, const TransactionMatrix& b) {
    return a.visitor_ids_ == b.visitor_ids_ && a.place_ids_ == b.place_ids_ &&
           a.rows_ == b.rows_;
  }

 private:
  std::vector<VisitorId> visitor_ids_;
  std::vector<PlaceId> place_ids_;
  std::vector<Bitset> rows_;
  std::unordered_map<VisitorId, std::size_t> row_index_;
};

TransactionMatrix build_matrix(const PlaceCatalog& catalog,
                               const std::vector<Visitor>& visitors,
                               const std::vector<VisitEvent>& events);

TransactionMatrix load_transactions(const std::filesystem::path& path);
TransactionMatrix read_transactions(std::istream& in, std::string_view source = "<stream>");
void write_transactions(std::ostream& out, const TransactionMatrix& matrix);

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

struct GeneratorOptions {
  /// Share of visits drawn from places matching a visitor's preferences.
  double preferred_share = 0.8;
  /// Zipf exponent of place popularity inside the preferred pool.
  double popularity_exponent = 1.2;
  /// Chance that a preferred-pool draw after the first visit picks the
  /// companion (nearest place sharing a category) of the previous visit,
  /// when that companion is itself preferred and unvisited.
  double companion_share = 0.8;
  int min_age = 16;
  int max_age = 75;
};

struct Dataset {
  std::vector<Visitor> visitors;
  std::vector<VisitEvent> events;
};

/// Seeded synthetic visitors plus exactly `events` positive visits, each
/// visitor with at least one. Events are ordered by (visitor, place ordinal).
Dataset generate_dataset(const PlaceCatalog& catalog, std::size_t visitors,
                         std::size_t events, std::uint64_t seed,
                         const GeneratorOptions& options = {});

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

struct SplitSpec {
  double train_fraction = 0.70;
  std::uint32_t folds = 5;
  std::uint64_t seed = 0;
};

/// A positive cell of a transaction matrix.
struct Cell {
  std::uint32_t row = 0;
  ItemId item = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct TrainTest {
  TransactionMatrix train;
  std::vector<Cell> test;  // sorted
};

/// Per visitor, keeps ceil(train_fraction * positives) cells for training and
/// holds the rest out. Visitors with fewer than two positives stay in train.
TrainTest split_train_test(const TransactionMatrix& matrix, const SplitSpec& spec);

/// Partitions every positive cell into spec.folds test folds.
std::vector<TrainTest> kfold(const TransactionMatrix& matrix, const SplitSpec& spec);

}  // namespace tourrec
