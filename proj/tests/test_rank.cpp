#include <doctest.h>

#include <algorithm>

#include "msgclass/error.hpp"
#include "msgclass/rank.hpp"
#include "support.hpp"

using namespace msgclass;
using msgclass::test::Gen;

namespace {

std::vector<std::string> names(Index d) {
  std::vector<std::string> out;
  for (Index f = 0; f < d; ++f) out.push_back("f" + std::to_string(f));
  return out;
}

// Column 0 = class + N(0, noise), column 1 = N(0, 1).
void signal_and_noise(Gen& gen, Index n, double noise, Matrix& x, Labels& y) {
  x.resize(n, 2);
  y = gen.labels(static_cast<std::size_t>(n), 2);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = y[static_cast<std::size_t>(i)] + gen.normal(0, noise);
    x(i, 1) = gen.normal();
  }
}

}  // namespace

TEST_CASE("rank_scores averages ties") {
  const std::vector<double> s{0.5, 0.9, 0.5, 0.1};
  CHECK(rank_scores(s, false) == std::vector<double>{2.5, 1, 2.5, 4});
  CHECK(rank_scores(s, true) == std::vector<double>{2.5, 4, 2.5, 1});
  CHECK(rank_scores(std::vector<double>{}, false).empty());

  Gen gen(4);
  for (int round = 0; round < 50; ++round) {
    std::vector<double> v(static_cast<std::size_t>(gen.integer(1, 20)));
    for (auto& x : v) x = gen.integer(0, 5);
    const auto r = rank_scores(v, false);
    double total = 0;
    for (double x : r) total += x;
    const double n = static_cast<double>(v.size());
    CHECK(total == doctest::Approx(n * (n + 1) / 2));
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        if (v[i] > v[j]) CHECK(r[i] < r[j]);
        else if (v[i] == v[j]) CHECK(r[i] == r[j]);
  }
}

TEST_CASE("swrf_star") {
  Gen gen(11);
  Matrix x;
  Labels y;
  signal_and_noise(gen, 40, 0.5, x, y);

  SUBCASE("constant feature scores zero") {
    Matrix with_constant(x.rows(), 3);
    with_constant << x, Vector::Constant(x.rows(), 3.0);
    const auto r = swrf_star(with_constant, y, names(3));
    CHECK(r.scores[2] == 0.0);
    for (double s : r.scores) CHECK(std::isfinite(s));
  }
  SUBCASE("constant labels are rejected") {
    CHECK_THROWS_AS(swrf_star(x, Labels(40, 1), names(2)), DataError);
  }
  SUBCASE("sample count above n is clamped with a warning") {
    std::vector<std::string> warnings;
    SwrfOptions o;
    o.samples = 500;
    const auto r = swrf_star(x, y, names(2), o, &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("clamped to 40") != std::string::npos);
    CHECK(r.scores == swrf_star(x, y, names(2)).scores);
  }
  SUBCASE("deterministic given seed") {
    SwrfOptions o;
    o.samples = 15;
    o.seed = 3;
    CHECK(swrf_star(x, y, names(2), o).scores == swrf_star(x, y, names(2), o).scores);
  }
  SUBCASE("duplicated column scores about equally") {
    for (int round = 0; round < 10; ++round) {
      Matrix d(x.rows(), 4);
      d << x, x.col(0), gen.matrix(x.rows(), 1);
      const auto r = swrf_star(d, y, names(4));
      const auto [lo, hi] = std::minmax_element(r.scores.begin(), r.scores.end());
      CHECK(std::abs(r.scores[0] - r.scores[2]) < 0.05 * (*hi - *lo));
    }
  }
  SUBCASE("full sampling is permutation invariant") {
    std::vector<Index> perm(static_cast<std::size_t>(x.rows()));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), gen.engine());
    Matrix xp(x.rows(), x.cols());
    Labels yp(y.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      xp.row(static_cast<Index>(i)) = x.row(perm[i]);
      yp[i] = y[static_cast<std::size_t>(perm[i])];
    }
    const auto a = swrf_star(x, y, names(2)).scores, b = swrf_star(xp, yp, names(2)).scores;
    for (std::size_t f = 0; f < a.size(); ++f) CHECK(a[f] == doctest::Approx(b[f]).epsilon(1e-9));
  }
}

TEST_CASE("swrf simulation: informative feature beats pure noise") {
  Gen gen(2024);
  int wins = 0;
  for (int run = 0; run < 100; ++run) {
    Matrix x;
    Labels y;
    signal_and_noise(gen, 100, 0.5, x, y);
    SwrfOptions o;
    o.seed = static_cast<std::uint64_t>(run);
    const auto r = swrf_star(x, y, names(2), o);
    if (r.scores[0] > r.scores[1]) ++wins;
  }
  MESSAGE("informative feature ranked first in " << wins << "/100 runs");
  CHECK(wins >= 95);
}

TEST_CASE("lr_importance") {
  SUBCASE("zero coefficients rank last") {
    LinearModel m;
    m.classes = {"a", "b"};
    m.weights.resize(2, 3);
    m.weights << 0.5, 0, -2, -0.5, 0, 1;
    m.bias = Vector::Zero(2);
    const auto r = lr_importance(m, names(3));
    CHECK(r.scores == std::vector<double>{0.5, 0, 2});
    CHECK(r.ranks == std::vector<double>{2, 3, 1});
    CHECK_THROWS_AS(lr_importance(m, names(2)), DataError);
  }
  SUBCASE("separating feature beats an appended constant") {
    Matrix x(6, 2);
    x << -1, 1, -0.8, 1, -1.2, 1, 1, 1, 0.9, 1, 1.1, 1;
    const Labels y{0, 0, 0, 1, 1, 1};
    LinearHyper h;
    h.l2 = 0.0;
    const auto r = lr_importance(train_logistic(x, y, {"a", "b"}, h), names(2));
    CHECK(r.ranks[0] == 1);
  }
  SUBCASE("rescaled inputs keep the order after standardizing") {
    Gen gen(6);
    Matrix x(80, 3);
    Labels y = gen.labels(80, 2);
    for (Index i = 0; i < 80; ++i) {
      const double c = y[static_cast<std::size_t>(i)];
      x(i, 0) = 2 * c + gen.normal(0, 0.5);
      x(i, 1) = c + gen.normal(0, 1.0);
      x(i, 2) = gen.normal();
    }
    auto standardize = [](Matrix m) {
      for (Index c = 0; c < m.cols(); ++c) {
        const double mean = m.col(c).mean();
        const double sd = std::sqrt((m.col(c).array() - mean).square().mean());
        m.col(c) = (m.col(c).array() - mean) / sd;
      }
      return m;
    };
    Matrix rescaled = x;
    rescaled.col(0) *= 100;
    rescaled.col(2) *= 0.01;
    const auto a = lr_importance(train_logistic(standardize(x), y, {"a", "b"}), names(3));
    const auto b = lr_importance(train_logistic(standardize(rescaled), y, {"a", "b"}), names(3));
    CHECK(a.ranks == b.ranks);
    CHECK(a.ranks[0] == 1);
  }
}

TEST_CASE("aggregate_ranks") {
  FeatureRanking a{"x", {"p", "q"}, {2, 1}, {1, 2}};
  FeatureRanking b{"y", {"p", "q"}, {1, 2}, {2, 1}};
  const auto tie = aggregate_ranks(std::vector<FeatureRanking>{a, b});
  CHECK(tie.scores == std::vector<double>{1.5, 1.5});
  CHECK(tie.ranks == std::vector<double>{1.5, 1.5});
  CHECK(tie.lower_is_better);

  const auto same = aggregate_ranks(std::vector<FeatureRanking>{a, a});
  CHECK(same.ranks == a.ranks);

  FeatureRanking other{"z", {"p", "r"}, {1, 2}, {2, 1}};
  CHECK_THROWS_AS(aggregate_ranks(std::vector<FeatureRanking>{a, other}), DataError);
  CHECK_THROWS_AS(aggregate_ranks(std::vector<FeatureRanking>{}), ConfigError);

  Gen gen(8);
  for (int round = 0; round < 30; ++round) {
    const int d = gen.integer(1, 8);
    std::vector<FeatureRanking> rs;
    for (int m = 0; m < gen.integer(1, 4); ++m) {
      FeatureRanking r{"m", names(d), {}, {}};
      for (int f = 0; f < d; ++f) r.scores.push_back(gen.integer(0, 3));
      r.ranks = rank_scores(r.scores, false);
      rs.push_back(r);
    }
    const auto forward = aggregate_ranks(rs);
    std::reverse(rs.begin(), rs.end());
    CHECK(aggregate_ranks(rs).ranks == forward.ranks);
  }
}

TEST_CASE("ranking csv") {
  FeatureRanking r{"x", {"a,b", "c"}, {0.5, 0.25}, {1, 2}};
  CHECK(ranking_to_csv(r) == "feature,score,rank\n\"a,b\",0.5,1\nc,0.25,2\n");
}
