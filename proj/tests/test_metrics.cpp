#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "usast/metrics.hpp"

using namespace usast;

TEST_CASE("perfect predictions score (1, 1, 1)") {
  const std::vector<std::string> y = {"a", "b", "a", "c"};
  const auto r = weighted_scores(y, y);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.accuracy == 1.0);
}

TEST_CASE("hand-computed confusion matrix example") {
  // supports (3,1), confusion [[2,1],[0,1]]
  const std::vector<std::string> y_true = {"a", "a", "a", "b"};
  const std::vector<std::string> y_pred = {"a", "a", "b", "b"};
  const auto r = weighted_scores(y_true, y_pred);
  CHECK(std::abs(r.precision - 0.875) < 1e-12);
  CHECK(std::abs(r.recall - 0.75) < 1e-12);
  const double f1a = 0.8, f1b = 2.0 / 3.0;
  CHECK(std::abs(r.f1 - (0.75 * f1a + 0.25 * f1b)) < 1e-12);
  CHECK(r.confusion[0][0] == 2);
  CHECK(r.confusion[0][1] == 1);
  CHECK(r.confusion[1][0] == 0);
  CHECK(r.confusion[1][1] == 1);
}

TEST_CASE("all-one-class predictions collapse recall") {
  const std::vector<std::string> y_true = {"a", "a", "b", "c"};
  const std::vector<std::string> y_pred = {"a", "a", "a", "a"};
  const auto r = weighted_scores(y_true, y_pred);
  for (const auto& c : r.per_class) {
    if (c.class_id == "a") {
      CHECK(c.recall == 1.0);
    } else {
      CHECK(c.recall == 0.0);
      CHECK(c.zero_predicted);
      CHECK(c.precision == 0.0);
    }
  }
}

TEST_CASE("empty inputs and length mismatch are rejected") {
  CHECK_THROWS_AS(weighted_scores({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(weighted_scores({"a"}, {"a", "b"}), std::invalid_argument);
}

TEST_CASE("weighted recall equals accuracy on random confusion data") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> cls(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> y_true, y_pred;
    const std::size_t n = 20 + rng() % 80;
    for (std::size_t i = 0; i < n; ++i) {
      y_true.push_back("c" + std::to_string(cls(rng)));
      y_pred.push_back("c" + std::to_string(cls(rng)));
    }
    const auto r = weighted_scores(y_true, y_pred);
    CHECK(r.recall == doctest::Approx(r.accuracy).epsilon(1e-12));
  }
}

TEST_CASE("permuting sample order changes no metric") {
  std::mt19937_64 rng(47);
  std::vector<std::string> y_true = {"a", "b", "a", "c", "b", "a"};
  std::vector<std::string> y_pred = {"a", "a", "b", "c", "b", "a"};
  const auto base = weighted_scores(y_true, y_pred);
  std::vector<std::size_t> perm = {3, 0, 5, 2, 4, 1};
  std::vector<std::string> pt, pp;
  for (std::size_t i : perm) {
    pt.push_back(y_true[i]);
    pp.push_back(y_pred[i]);
  }
  const auto shuffled = weighted_scores(pt, pp);
  CHECK(base.precision == shuffled.precision);
  CHECK(base.recall == shuffled.recall);
  CHECK(base.f1 == shuffled.f1);
}

TEST_CASE("cross entropy analytic values") {
  // one-hot correct
  const std::vector<std::string> y = {"a", "b"};
  const std::vector<std::string> order = {"a", "b"};
  const std::vector<std::vector<double>> onehot = {{1.0, 0.0}, {0.0, 1.0}};
  CHECK(cross_entropy(y, onehot, order) < 1e-12);
  // uniform over 4 classes -> log(4)
  const std::vector<std::string> y4 = {"a", "b", "c", "d"};
  const std::vector<std::vector<double>> uniform(
      4, std::vector<double>(4, 0.25));
  CHECK(cross_entropy(y4, uniform, y4) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("cross entropy matches a hand computation") {
  const std::vector<std::string> y = {"a", "b", "a"};
  const std::vector<std::string> order = {"a", "b"};
  const std::vector<std::vector<double>> p = {
      {0.9, 0.1}, {0.3, 0.7}, {0.5, 0.5}};
  const double want =
      -(std::log(0.9) + std::log(0.7) + std::log(0.5)) / 3.0;
  CHECK(std::abs(cross_entropy(y, p, order) - want) < 1e-12);
}

TEST_CASE("cross entropy rejects bad probability rows") {
  const std::vector<std::string> y = {"a"};
  CHECK_THROWS_AS(cross_entropy(y, {{0.5, 0.2}}, {"a", "b"}),
                  std::invalid_argument);
}

TEST_CASE("single group value makes grouped equal marginal") {
  const std::vector<std::string> y_true = {"a", "b", "a"};
  const std::vector<std::string> y_pred = {"a", "b", "b"};
  const std::vector<std::map<std::string, std::string>> md(
      3, {{"site", "x"}});
  const auto reports = grouped_report(y_true, y_pred, md, {"site"});
  REQUIRE(reports.size() == 2);  // site=x and site=Both
  const auto marginal = weighted_scores(y_true, y_pred);
  for (const auto& r : reports) CHECK(r.f1 == marginal.f1);
}

TEST_CASE("disjoint groups: perfect vs all-wrong") {
  std::vector<std::string> y_true, y_pred;
  std::vector<std::map<std::string, std::string>> md;
  for (int i = 0; i < 4; ++i) {  // group g: perfect
    y_true.push_back(i % 2 ? "a" : "b");
    y_pred.push_back(i % 2 ? "a" : "b");
    md.push_back({{"grp", "g"}});
  }
  for (int i = 0; i < 4; ++i) {  // group h: all wrong
    y_true.push_back(i % 2 ? "a" : "b");
    y_pred.push_back(i % 2 ? "b" : "a");
    md.push_back({{"grp", "h"}});
  }
  const auto reports = grouped_report(y_true, y_pred, md, {"grp"});
  REQUIRE(reports.size() == 3);
  std::map<std::string, double> f1;
  for (const auto& r : reports) f1[r.group_key] = r.f1;
  CHECK(f1["grp=g"] == 1.0);
  CHECK(f1["grp=h"] == 0.0);
  CHECK(f1["grp=Both"] > 0.0);
  CHECK(f1["grp=Both"] < 1.0);
}

TEST_CASE("2x2 grouping cross-checked against subset recomputation") {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<int> cls(0, 2), coin(0, 1);
  std::vector<std::string> y_true, y_pred;
  std::vector<std::map<std::string, std::string>> md;
  for (int i = 0; i < 60; ++i) {
    y_true.push_back("c" + std::to_string(cls(rng)));
    y_pred.push_back("c" + std::to_string(cls(rng)));
    md.push_back({{"a", std::to_string(coin(rng))},
                  {"b", std::to_string(coin(rng))}});
  }
  const auto reports = grouped_report(y_true, y_pred, md, {"a", "b"});
  CHECK(reports.size() == 9);  // (2 values + Both)^2
  for (const auto& r : reports) {
    // recompute the subset directly from the key
    std::vector<std::string> st, sp;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      bool keep = true;
      std::istringstream ss(r.group_key);
      std::string part;
      while (std::getline(ss, part, '|')) {
        const auto eq = part.find('=');
        const std::string col = part.substr(0, eq);
        const std::string val = part.substr(eq + 1);
        if (val != "Both" && md[i].at(col) != val) keep = false;
      }
      if (keep) {
        st.push_back(y_true[i]);
        sp.push_back(y_pred[i]);
      }
    }
    const auto want = weighted_scores(st, sp);
    CHECK(r.f1 == want.f1);
    CHECK(r.accuracy == want.accuracy);
    CHECK(r.n_samples == want.n_samples);
  }
  // support-weighted per-group accuracy equals marginal accuracy
  double weighted_acc = 0.0;
  std::size_t total = 0;
  for (const auto& r : reports) {
    if (r.group_key.find("Both") != std::string::npos) continue;
    weighted_acc += r.accuracy * r.n_samples;
    total += r.n_samples;
  }
  const auto marginal = weighted_scores(y_true, y_pred);
  CHECK(weighted_acc / total ==
        doctest::Approx(marginal.accuracy).epsilon(1e-12));
}

TEST_CASE("grouped_report requires the metadata key") {
  CHECK_THROWS_WITH_AS(
      grouped_report({"a"}, {"a"}, {{{"x", "1"}}}, {"missing"}),
      doctest::Contains("missing"), std::invalid_argument);
}

TEST_CASE("one-vs-rest basics") {
  const std::vector<std::string> y_true = {"90", "42", "90", "52"};
  auto s = one_vs_rest_report(y_true, y_true, "90");
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);

  const std::vector<std::string> never = {"42", "42", "42", "52"};
  s = one_vs_rest_report(y_true, never, "90");
  CHECK(s.zero_predicted);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);

  CHECK_THROWS_AS(one_vs_rest_report(y_true, y_true, "nope"),
                  std::invalid_argument);
}

TEST_CASE("one-vs-rest agrees with relabel-and-recompute") {
  const std::vector<std::string> y_true = {"90", "42", "90", "52", "90",
                                           "42", "90", "52", "90", "42"};
  const std::vector<std::string> y_pred = {"90", "90", "42", "52", "90",
                                           "42", "90", "90", "42", "42"};
  const auto s = one_vs_rest_report(y_true, y_pred, "90");
  std::vector<std::string> bt, bp;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    bt.push_back(y_true[i] == "90" ? "pos" : "rest");
    bp.push_back(y_pred[i] == "90" ? "pos" : "rest");
  }
  const auto r = weighted_scores(bt, bp);
  for (const auto& c : r.per_class)
    if (c.class_id == "pos") {
      CHECK(s.precision == c.precision);
      CHECK(s.recall == c.recall);
      CHECK(s.f1 == c.f1);
    }
}

TEST_CASE("text report renders") {
  const auto r = weighted_scores({"a", "b"}, {"a", "a"});
  const auto text = report_to_text(r);
  CHECK(text.find("weighted precision") != std::string::npos);
  CHECK(text.find("never predicted") != std::string::npos);
}
