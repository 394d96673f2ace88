#include <doctest.h>

#include <algorithm>

#include "msgclass/balance.hpp"
#include "msgclass/error.hpp"
#include "support.hpp"

using namespace msgclass;
using msgclass::test::Gen;

namespace {

int count(const Labels& y, int c) { return static_cast<int>(std::count(y.begin(), y.end(), c)); }

// Brute-force mutual nearest neighbours with lowest-index ties.
std::vector<std::pair<Index, Index>> brute_tomek(const Matrix& x, const Labels& y) {
  const Index n = x.rows();
  std::vector<Index> nearest(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    double best = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = (x.row(i) - x.row(j)).squaredNorm();
      if (nearest[static_cast<std::size_t>(i)] < 0 || d < best) {
        best = d;
        nearest[static_cast<std::size_t>(i)] = j;
      }
    }
  }
  std::vector<std::pair<Index, Index>> links;
  for (Index a = 0; a < n; ++a) {
    const Index b = nearest[static_cast<std::size_t>(a)];
    if (a < b && nearest[static_cast<std::size_t>(b)] == a && y[static_cast<std::size_t>(a)] != y[static_cast<std::size_t>(b)])
      links.emplace_back(a, b);
  }
  return links;
}

}  // namespace

TEST_CASE("smote") {
  SUBCASE("synthetic point sits on the segment") {
    Matrix x(4, 2);
    x << 0, 0, 1, 1, 5, 5, 6, 6;
    const Labels y{0, 0, 1, 1};
    ResamplePlan plan;
    plan.k_neighbors = 1;
    plan.targets = {{0, 3}, {1, 2}};
    const auto r = smote(x, y, plan);
    REQUIRE(r.features.rows() == 5);
    REQUIRE(r.origins.size() == 1);
    const auto& o = r.origins[0];
    CHECK(r.labels[4] == 0);
    CHECK(r.synthetic[4]);
    const Vector expected = x.row(o.base) + o.u * (x.row(o.neighbor) - x.row(o.base));
    CHECK(r.features.row(4).transpose().isApprox(expected));
    CHECK(std::abs(r.features(4, 0) - r.features(4, 1)) < 1e-15);
  }
  SUBCASE("balanced input passes through") {
    Gen gen(1);
    const Matrix x = gen.matrix(10, 3);
    const Labels y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const auto r = smote(x, y, {});
    CHECK(r.features == x);
    CHECK(r.labels == y);
    CHECK(std::none_of(r.synthetic.begin(), r.synthetic.end(), [](bool b) { return b; }));
  }
  SUBCASE("90/10 default targets equalize counts") {
    Gen gen(2);
    const Matrix x = gen.matrix(100, 4);
    Labels y(100, 0);
    std::fill(y.begin(), y.begin() + 10, 1);
    const auto r = smote(x, y, {});
    CHECK(count(r.labels, 0) == 90);
    CHECK(count(r.labels, 1) == 90);
  }
  SUBCASE("single-instance class cannot be interpolated") {
    Matrix x(3, 1);
    x << 0, 1, 2;
    CHECK_THROWS_AS(smote(x, Labels{0, 0, 1}, {}), DataError);
  }
  SUBCASE("deterministic under seed") {
    Gen gen(3);
    const Matrix x = gen.matrix(30, 3);
    Labels y(30, 0);
    std::fill(y.begin(), y.begin() + 6, 1);
    ResamplePlan plan;
    plan.seed = 99;
    CHECK(smote(x, y, plan).features == smote(x, y, plan).features);
  }
}

TEST_CASE("property: smote synthetics are convex combinations of same-class originals") {
  Gen gen(17);
  for (int round = 0; round < 30; ++round) {
    const Index n = gen.integer(8, 40);
    const int classes = gen.integer(2, 4);
    const Matrix x = gen.matrix(n, gen.integer(1, 5));
    Labels y = gen.labels(static_cast<std::size_t>(n), classes);
    // Two instances per class at least.
    for (int c = 0; c < classes; ++c) y[static_cast<std::size_t>(c)] = y[static_cast<std::size_t>(c + classes)] = c;
    ResamplePlan plan;
    plan.k_neighbors = gen.integer(1, 6);
    plan.seed = static_cast<std::uint64_t>(round);
    const auto r = smote(x, y, plan);
    CHECK(r.features.topRows(n) == x);
    std::size_t s = 0;
    for (Index i = n; i < r.features.rows(); ++i, ++s) {
      const auto& o = r.origins.at(s);
      CHECK(o.u >= 0.0);
      CHECK(o.u <= 1.0);
      CHECK(y[static_cast<std::size_t>(o.base)] == r.labels[static_cast<std::size_t>(i)]);
      CHECK(y[static_cast<std::size_t>(o.neighbor)] == r.labels[static_cast<std::size_t>(i)]);
      const RowVector expected = x.row(o.base) + o.u * (x.row(o.neighbor) - x.row(o.base));
      CHECK((r.features.row(i) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    const int majority = *std::max_element(y.begin(), y.end(), [&](int a, int b) { return count(y, a) < count(y, b); });
    for (int c = 0; c < classes; ++c) CHECK(count(r.labels, c) == count(y, majority));
  }
}

TEST_CASE("tomek links") {
  Matrix line(3, 1);
  line << 0.0, 0.1, 1.0;
  const Labels aba{0, 1, 0};
  CHECK(tomek_links(line, aba) == std::vector<std::pair<Index, Index>>{{0, 1}});
  CHECK(tomek_links(line, Labels{0, 0, 0}).empty());

  Matrix clusters(4, 2);
  clusters << 0, 0, 0, 0.1, 10, 10, 10, 10.1;
  CHECK(tomek_links(clusters, Labels{0, 0, 1, 1}).empty());

  Gen gen(5);
  for (int round = 0; round < 30; ++round) {
    const Index n = gen.integer(2, 30);
    Matrix x = gen.matrix(n, 2);
    // Coarse grid so exact distance ties happen.
    x = (x * 3).array().round().matrix();
    const Labels y = gen.labels(static_cast<std::size_t>(n), 2);
    CHECK(tomek_links(x, y) == brute_tomek(x, y));
  }
}

TEST_CASE("smote then tomek") {
  SUBCASE("majority member of the link is removed") {
    Matrix line(3, 1);
    line << 0.0, 0.1, 1.0;
    ResamplePlan plan;
    plan.targets = {{1, 1}};
    const auto r = smote_tomek(line, Labels{0, 1, 0}, plan);
    // Cleaning repeats: once 0 is gone, 1 and 2 form a link and A still counts as the majority.
    CHECK(r.kept == std::vector<Index>{1});
    CHECK(r.removed == 2);
  }
  SUBCASE("separated balanced clusters are untouched") {
    Matrix x(4, 2);
    x << 0, 0, 0, 0.1, 10, 10, 10, 10.1;
    const auto r = smote_tomek(x, Labels{0, 0, 1, 1}, {});
    CHECK(r.features == x);
    CHECK(r.removed == 0);
  }
}

TEST_CASE("property: no tomek link survives cleaning") {
  Gen gen(23);
  for (int round = 0; round < 30; ++round) {
    const Index n = gen.integer(8, 50);
    const Matrix x = gen.matrix(n, gen.integer(1, 3));
    Labels y = gen.labels(static_cast<std::size_t>(n), 3);
    for (int c = 0; c < 3; ++c) y[static_cast<std::size_t>(c)] = y[static_cast<std::size_t>(c + 3)] = c;
    ResamplePlan plan;
    plan.k_neighbors = 3;
    plan.seed = static_cast<std::uint64_t>(round);
    const auto r = smote_tomek(x, y, plan);
    CHECK(static_cast<std::size_t>(r.features.rows()) == r.labels.size());
    CHECK(r.synthetic.size() == r.labels.size());
    CHECK(tomek_links(r.features, r.labels).empty());
  }
}

TEST_CASE("squared distances match the direct computation") {
  Gen gen(9);
  const Matrix a = gen.matrix(5, 3), b = gen.matrix(4, 3);
  const Matrix d = squared_distances(a, b);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 4; ++j) CHECK(d(i, j) == doctest::Approx((a.row(i) - b.row(j)).squaredNorm()));
}
