#include <doctest.h>

#include <sstream>

#include "test_util.hpp"
#include "usast/transform.hpp"

using namespace usast;
using testutil::uv;

namespace {

VariantConfig toy_config(bool unc, bool dedup, bool count) {
  VariantConfig cfg;
  cfg.use_uncertainty = unc;
  cfg.drop_duplicates = dedup;
  cfg.count_frequency = count;
  cfg.length_list = {3};
  return cfg;
}

}  // namespace

TEST_CASE("layout arithmetic") {
  FeatureLayout lay{5, false, false};
  CHECK(lay.columns() == 5);
  lay = {5, true, true};
  CHECK(lay.columns() == 15);
  CHECK(lay.block_of(2) == FeatureLayout::Block::Value);
  CHECK(lay.block_of(7) == FeatureLayout::Block::Uncertainty);
  CHECK(lay.block_of(12) == FeatureLayout::Block::Count);
  CHECK(lay.entry_of(12) == 2);
  // bijection round-trip over all columns
  for (std::size_t c = 0; c < lay.columns(); ++c)
    CHECK(lay.column_of(lay.block_of(c), lay.entry_of(c)) == c);
}

TEST_CASE("self-match yields zero distance and count >= 1") {
  auto inst = testutil::instance_of(
      "self", uv({1, 5, 2, 8, 3, 9}, {0.1, 0.1, 0.1, 0.1, 0.1, 0.1}));
  const auto pool = generate_subsequences({inst}, {"a"}, {3}, 0.25, false);
  auto cfg = toy_config(true, false, true);
  const auto x = transform({inst}, pool, cfg, 1);
  REQUIRE(x.rows == 1);
  for (std::size_t j = 0; j < pool.size(); ++j) {
    CHECK(x.at(0, x.layout.column_of(FeatureLayout::Block::Value, j)) == 0.0);
    CHECK(x.at(0, x.layout.column_of(FeatureLayout::Block::Uncertainty, j)) ==
          0.0);
    CHECK(x.at(0, x.layout.column_of(FeatureLayout::Block::Count, j)) >= 1.0);
  }
}

TEST_CASE("matrix shape follows the variant flags") {
  std::mt19937_64 rng(3);
  auto inst = testutil::instance_of("i0", testutil::random_points(rng, 8));
  const auto pool = generate_subsequences({inst}, {"a"}, {3}, 0.25, false);
  REQUIRE(pool.size() == 6);
  std::vector<MultivariateInstance> batch = {inst, inst, inst};
  const auto x = transform(batch, pool, toy_config(false, false, false), 1);
  CHECK(x.rows == 3);
  CHECK(x.layout.columns() == 6);
}

TEST_CASE("every cell equals the exhaustive-window oracle") {
  std::mt19937_64 rng(31);
  std::vector<MultivariateInstance> batch;
  for (int i = 0; i < 2; ++i)
    batch.push_back(testutil::instance_of("i" + std::to_string(i),
                                          testutil::random_points(rng, 6)));
  auto pool = generate_subsequences({batch[0]}, {"a"}, {3}, 0.25, false);
  pool.entries.resize(2);  // P = 2
  auto cfg = toy_config(true, false, true);
  const auto x = transform(batch, pool, cfg, 1);

  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const auto want = testutil::exhaustive_scan(
          pool.entries[j].points, batch[i].dims[0].second.points,
          cfg.epsilon, true);
      CHECK(x.at(i, x.layout.column_of(FeatureLayout::Block::Value, j)) ==
            want.distance.value);
      CHECK(x.at(i, x.layout.column_of(FeatureLayout::Block::Uncertainty, j)) ==
            want.distance.uncertainty);
      CHECK(x.at(i, x.layout.column_of(FeatureLayout::Block::Count, j)) ==
            static_cast<double>(want.count));
    }
  }
}

TEST_CASE("transform output is identical for 1 and many workers") {
  std::mt19937_64 rng(37);
  std::vector<MultivariateInstance> batch;
  for (int i = 0; i < 7; ++i)
    batch.push_back(testutil::instance_of("i" + std::to_string(i),
                                          testutil::random_points(rng, 20)));
  const auto pool = generate_subsequences({batch[0], batch[1]}, {"a", "b"},
                                          {4, 6}, 0.25, true);
  auto cfg = toy_config(true, true, true);
  cfg.length_list = {4, 6};
  const auto x1 = transform(batch, pool, cfg, 1);
  const auto x4 = transform(batch, pool, cfg, 4);
  CHECK(x1.data == x4.data);
}

TEST_CASE("uncertainty flag never changes the distance-value block") {
  std::mt19937_64 rng(41);
  std::vector<MultivariateInstance> batch;
  for (int i = 0; i < 4; ++i)
    batch.push_back(testutil::instance_of("i" + std::to_string(i),
                                          testutil::random_points(rng, 12)));
  const auto pool =
      generate_subsequences({batch[0]}, {"a"}, {4}, 0.25, true);
  auto with = toy_config(true, true, false);
  auto without = toy_config(false, true, false);
  const auto xu = transform(batch, pool, with, 1);
  const auto xv = transform(batch, pool, without, 1);
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (std::size_t j = 0; j < pool.size(); ++j)
      CHECK(xu.at(i, j) == xv.at(i, j));
}

TEST_CASE("missing dimension raises a named error") {
  std::mt19937_64 rng(5);
  auto inst = testutil::instance_of("has_dim0", testutil::random_points(rng, 8));
  auto pool = generate_subsequences({inst}, {"a"}, {3}, 0.25, false);
  MultivariateInstance other;
  other.id = "wrong_dims";
  other.dims.emplace_back("dimX", inst.dims[0].second);
  CHECK_THROWS_WITH_AS(
      transform({other}, pool, toy_config(false, false, false), 1),
      doctest::Contains("wrong_dims"), std::invalid_argument);
}

TEST_CASE("feature csv header encodes the layout") {
  auto inst = testutil::instance_of("i", uv({1, 2, 3, 4}, {0, 0, 0, 0}));
  const auto pool = generate_subsequences({inst}, {"a"}, {3}, 0.25, false);
  const auto x = transform({inst}, pool, toy_config(true, false, true), 1);
  std::ostringstream os;
  write_feature_csv(os, x);
  const std::string header = os.str().substr(0, os.str().find('\n'));
  CHECK(header == "d_0,d_1,u_0,u_1,c_0,c_1");
}
