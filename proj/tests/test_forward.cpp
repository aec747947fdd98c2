#include <doctest.h>

#include <random>

#include "fieldcal/bmars.hpp"
#include "fieldcal/forward.hpp"

using namespace fieldcal;

namespace {

SpatialField band_limited_field(int rows, int cols, double lo, double hi,
                                std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::MatrixXd v(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) v(i, j) = unif(gen);
  return SpatialField(std::move(v));
}

DesignDeck tiny_deck(int n_fields, const std::vector<double>& pvis) {
  DesignDeck deck;
  deck.selection = CoeffSelection{SelectionShape::kTriangle, 2};
  deck.field_rows = deck.field_cols = 4;
  int run = 0;
  std::mt19937_64 gen(3);
  std::normal_distribution<double> norm;
  for (int f = 0; f < n_fields; ++f) {
    Eigen::VectorXd theta(3);
    for (int i = 0; i < 3; ++i) theta(i) = norm(gen);
    deck.field_thetas.push_back(theta);
    for (double pvi : pvis) deck.rows.push_back(DeckRow{run++, f, theta, pvi});
  }
  return deck;
}

}  // namespace

TEST_CASE("early-time output is small for fields in [-2,2]") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const SpatialField f = band_limited_field(8, 8, -2.0, 2.0, seed);
    CHECK(toy_watercut(f, 0.0) < 0.1);
  }
  CHECK(toy_watercut(SpatialField(Eigen::MatrixXd::Constant(8, 8, -2.0)), 0.0) < 0.1);
  CHECK(toy_watercut(SpatialField(Eigen::MatrixXd::Constant(8, 8, 2.0)), 0.0) < 0.1);
}

TEST_CASE("output increases strictly with pvi") {
  const SpatialField f = band_limited_field(6, 6, -2.0, 2.0, 7);
  double prev = -1.0;
  for (double pvi = 0.0; pvi <= 1.0; pvi += 0.1) {
    const double w = toy_watercut(f, pvi);
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("output depends on the field only through the band") {
  SpatialField a = band_limited_field(8, 8, -1.0, 1.0, 9);
  SpatialField b = a;
  b.values.row(0).setConstant(5.0);
  b.values.row(7).setConstant(-5.0);  // away from the middle band
  CHECK(toy_watercut(a, 0.6) == toy_watercut(b, 0.6));

  SpatialField c = a;
  c.values.row(4) *= 1.5;  // middle row for an 8-row grid
  CHECK(toy_watercut(a, 0.6) != toy_watercut(c, 0.6));
}

TEST_CASE("outputs are strictly inside (0,1) and deterministic") {
  const SpatialField f = band_limited_field(5, 9, -3.0, 3.0, 11);
  for (double pvi : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double w = toy_watercut(f, pvi);
    CHECK(w > 0.0);
    CHECK(w < 1.0);
    CHECK(w == toy_watercut(f, pvi));
  }
  CHECK_THROWS_AS(toy_watercut(f, 1.5), InvalidInput);
}

TEST_CASE("the forward-model interface is deterministic") {
  const ToyWatercut model;
  const SpatialField f = band_limited_field(6, 6, -1.0, 1.0, 13);
  Eigen::VectorXd known(1);
  known << 0.4;
  CHECK(model.run(f, known) == model.run(f, known));
}

TEST_CASE("simulate_dataset without noise equals the transformed model output") {
  const DesignDeck deck = tiny_deck(2, {0.3, 0.7});
  const ToyWatercut model;
  const auto outputs = simulate_dataset(deck, model, 0.0, 99);
  REQUIRE(outputs.size() == 4);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& o = outputs[i];
    CHECK(o.run_id == static_cast<int>(i));
    CHECK(o.transformed == doctest::Approx(clamped_logit(o.raw)).epsilon(1e-15));
  }
}

TEST_CASE("simulate_dataset is reproducible and order-independent") {
  const DesignDeck deck = tiny_deck(3, {0.2, 0.5, 0.8});
  const ToyWatercut model;
  const auto a = simulate_dataset(deck, model, 0.1, 42);
  const auto b = simulate_dataset(deck, model, 0.1, 42);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].transformed == b[i].transformed);

  // per-row streams: reversing the deck rows leaves each run's value unchanged
  DesignDeck reversed = deck;
  std::reverse(reversed.rows.begin(), reversed.rows.end());
  const auto c = simulate_dataset(reversed, model, 0.1, 42);
  for (const auto& o : c) {
    const auto& match = a[o.run_id];
    CHECK(o.transformed == match.transformed);
  }

  const auto d = simulate_dataset(deck, model, 0.1, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].transformed != d[i].transformed) any_diff = true;
  CHECK(any_diff);
}
