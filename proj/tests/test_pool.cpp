#include <doctest.h>

#include <random>

#include "test_util.hpp"
#include "usast/pool.hpp"

using namespace usast;
using testutil::uv;

namespace {

LabeledDataset three_class_dataset(std::size_t per_class, std::size_t m,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LabeledDataset d;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      MultivariateInstance inst;
      inst.id = "c" + std::to_string(c) + "_" + std::to_string(i);
      inst.dims.emplace_back(
          "dim0", UncertainSeries{testutil::random_points(rng, m)});
      d.instances.push_back(std::move(inst));
      d.labels.push_back("class" + std::to_string(c));
    }
  }
  return d;
}

// Naive quadratic greedy filter run in the same canonical order.
std::vector<UncertainSubsequence> oracle_dedup(
    const std::vector<UncertainSubsequence>& cands, double eps,
    const DistanceOptions& opt) {
  std::vector<UncertainSubsequence> kept;
  for (const auto& c : cands) {
    bool similar = false;
    for (const auto& k : kept) {
      if (k.provenance.dimension != c.provenance.dimension ||
          k.size() != c.size())
        continue;
      if (epsilon_similar(as_span(c), as_span(k), eps, opt)) {
        similar = true;
        break;
      }
    }
    if (!similar) kept.push_back(c);
  }
  return kept;
}

bool same_pool(const std::vector<UncertainSubsequence>& a,
               const std::vector<UncertainSubsequence>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].provenance.ref_instance_id != b[i].provenance.ref_instance_id ||
        a[i].provenance.start_index != b[i].provenance.start_index ||
        a[i].provenance.dimension != b[i].provenance.dimension ||
        a[i].size() != b[i].size())
      return false;
    for (std::size_t j = 0; j < a[i].size(); ++j)
      if (a[i].points[j].value != b[i].points[j].value ||
          a[i].points[j].uncertainty != b[i].points[j].uncertainty)
        return false;
  }
  return true;
}

}  // namespace

TEST_CASE("select_references is deterministic and canonical by class") {
  const auto d = three_class_dataset(5, 16, 3);
  const auto r1 = select_references(d, 1, 42);
  const auto r2 = select_references(d, 1, 42);
  REQUIRE(r1.size() == 3);
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].id == r2[i].id);
  // class order: class0, class1, class2
  CHECK(r1[0].id.substr(0, 2) == "c0");
  CHECK(r1[1].id.substr(0, 2) == "c1");
  CHECK(r1[2].id.substr(0, 2) == "c2");

  const auto r3 = select_references(d, 999, 42);
  CHECK(r3.size() == d.instances.size());  // exhaustive case
}

TEST_CASE("select_references clamps undersized classes with a warning") {
  auto d = three_class_dataset(1, 8, 3);
  std::vector<std::string> warnings;
  const auto refs = select_references(d, 2, 1, &warnings);
  CHECK(refs.size() == 3);
  CHECK(warnings.size() == 3);
}

TEST_CASE("select_references rejects an empty dataset") {
  LabeledDataset d;
  CHECK_THROWS_AS(select_references(d, 1, 0), std::invalid_argument);
}

TEST_CASE("window count without dedup is m - l + 1") {
  const auto d = three_class_dataset(1, 10, 5);
  const std::vector<MultivariateInstance> refs = {d.instances[0]};
  const auto pool =
      generate_subsequences(refs, {"class0"}, {4}, 0.25, false);
  CHECK(pool.size() == 7);
}

TEST_CASE("generate_subsequences names the offending length") {
  const auto d = three_class_dataset(1, 10, 5);
  const std::vector<MultivariateInstance> refs = {d.instances[0]};
  CHECK_THROWS_WITH_AS(
      generate_subsequences(refs, {"class0"}, {11}, 0.25, false),
      doctest::Contains("length 11"), std::invalid_argument);
}

TEST_CASE("constant series dedups to one entry per (dimension, length)") {
  MultivariateInstance inst;
  inst.id = "flat";
  inst.dims.emplace_back(
      "dim0", UncertainSeries{uv({3, 3, 3, 3, 3, 3, 3, 3},
                                 {0.1, 0.5, 0.3, 0.1, 0.5, 0.3, 0.1, 0.5})});
  const auto pool = generate_subsequences({inst}, {"a"}, {2, 4}, 0.0, true);
  CHECK(pool.size() == 2);
}

TEST_CASE("greedy dedup matches the quadratic oracle on random series") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    MultivariateInstance inst;
    inst.id = "r" + std::to_string(trial);
    // small value range so collisions actually happen
    std::uniform_int_distribution<int> val(0, 2);
    std::vector<UncertainValue> pts(14);
    for (auto& p : pts) p = {static_cast<double>(val(rng)), 0.1};
    inst.dims.emplace_back("dim0", UncertainSeries{std::move(pts)});

    const double eps = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const DistanceOptions opt{true, false};
    const auto raw =
        generate_subsequences({inst}, {"a"}, {3, 5}, eps, false, opt);
    const auto pool =
        generate_subsequences({inst}, {"a"}, {3, 5}, eps, true, opt);
    const auto want = oracle_dedup(raw.entries, eps, opt);
    CHECK(same_pool(pool.entries, want));

    // idempotence
    const auto again = greedy_dedup(pool.entries, eps, opt);
    CHECK(same_pool(again, pool.entries));

    // pairwise guarantee within each (dimension, length) group
    for (std::size_t i = 0; i < pool.entries.size(); ++i)
      for (std::size_t j = i + 1; j < pool.entries.size(); ++j)
        if (pool.entries[i].size() == pool.entries[j].size())
          CHECK_FALSE(epsilon_similar(as_span(pool.entries[i]),
                                      as_span(pool.entries[j]), eps, opt));
  }
}

TEST_CASE("pool size is non-increasing in epsilon") {
  std::mt19937_64 rng(29);
  MultivariateInstance inst;
  inst.id = "mono";
  std::uniform_int_distribution<int> val(0, 3);
  std::vector<UncertainValue> pts(20);
  for (auto& p : pts) p = {static_cast<double>(val(rng)), 0.1};
  inst.dims.emplace_back("dim0", UncertainSeries{std::move(pts)});

  std::size_t prev = SIZE_MAX;
  for (double eps : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0}) {
    const auto pool = generate_subsequences({inst}, {"a"}, {4}, eps, true);
    CHECK(pool.size() <= prev);
    prev = pool.size();
  }
}

TEST_CASE("epsilon 0 with no repeated window is a no-op") {
  MultivariateInstance inst;
  inst.id = "distinct";
  inst.dims.emplace_back(
      "dim0",
      UncertainSeries{uv({1, 2, 4, 8, 16, 32}, {0, 0, 0, 0, 0, 0})});
  const auto raw = generate_subsequences({inst}, {"a"}, {3}, 0.0, false);
  const auto pool = generate_subsequences({inst}, {"a"}, {3}, 0.0, true);
  CHECK(pool.size() == raw.size());
}
