#include <doctest.h>

#include "msgclass/temporal.hpp"
#include "support.hpp"

using namespace msgclass;
using msgclass::test::Gen;

namespace {

const std::vector<std::string> kAB{"A", "B"};
const std::vector<std::string> kABC{"A", "B", "C"};

// Occurrences of `context` immediately followed by each label, within streams.
Vector brute_counts(const std::vector<LabelStream>& streams, const std::vector<int>& context, int classes) {
  Vector counts = Vector::Zero(classes);
  const std::size_t h = context.size();
  for (const auto& s : streams)
    for (std::size_t i = h; i < s.size(); ++i) {
      if (s[i] < 0) continue;
      if (std::equal(context.begin(), context.end(), s.begin() + static_cast<std::ptrdiff_t>(i - h))) counts(s[i]) += 1;
    }
  return counts;
}

Vector brute_history(const std::vector<LabelStream>& streams, const std::vector<int>& context, int classes, int n,
                     double s, int min_count) {
  for (int h = std::min<int>(n, static_cast<int>(context.size())); h >= 1; --h) {
    const std::vector<int> suffix(context.end() - h, context.end());
    const Vector c = brute_counts(streams, suffix, classes);
    if (c.sum() >= min_count) return (c.array() + s) / (c.sum() + s * classes);
  }
  const Vector prior = brute_counts(streams, {}, classes);
  return (prior.array() + s) / (prior.sum() + s * classes);
}

void check_distribution(const Vector& p) {
  CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
  CHECK(p.minCoeff() >= 0.0);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("markov transitions") {
  const std::vector<LabelStream> one{{0, 0, 1}};
  const auto m = fit_markov(one, kAB, 1.0);
  CHECK(m.matrix.isApproxToConstant(0.5));
  CHECK(m.initial(0) == doctest::Approx(2.0 / 3.0));
  CHECK(markov_predict(m, -1) == m.initial);
  CHECK(markov_predict(m, 1) == m.matrix.row(1).transpose());

  // Every transition observed: s = 0 gives raw frequencies.
  const std::vector<LabelStream> full{{0, 0, 1, 1, 0, 1}};
  const auto ml = fit_markov(full, kAB, 0.0);
  CHECK(ml.matrix(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(ml.matrix(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(ml.matrix(1, 0) == doctest::Approx(0.5));
  CHECK(ml.initial == vec({1, 0}));

  CHECK_THROWS_AS(fit_markov(std::vector<LabelStream>{}, kAB), DataError);
  CHECK_THROWS_AS(fit_markov(std::vector<LabelStream>{{-1, -1}}, kAB), DataError);
}

TEST_CASE("history tables") {
  const std::vector<LabelStream> abab{{0, 1, 0, 1, 0}};
  const auto m = fit_history(abab, kAB, 4, 1.0, 1);
  const std::vector<int> ab{0, 1};
  CHECK(m.distribution(m.tables[2].at(ab))(0) == doctest::Approx(0.75));
  CHECK(history_predict(m, ab)(0) == doctest::Approx(0.75));
  // 3 A and 2 B: (3+1)/(5+2).
  CHECK(history_predict(m, std::vector<int>{})(0) == doctest::Approx(4.0 / 7.0));
  CHECK(m.prior()(0) == doctest::Approx(4.0 / 7.0));

  SUBCASE("once-seen 4-context backs off to its 3-suffix") {
    // (A,A,B,A) appears once; (A,B,A) repeats in blocks B A B A B that never contain A A.
    std::vector<LabelStream> streams{{0, 0, 1, 0, 1}, {}};
    for (int block = 0; block < 6; ++block) streams[1].insert(streams[1].end(), {1, 0, 1, 0, 1});
    const auto model = fit_history(streams, kAB, 4, 1.0, 5);
    const std::vector<int> ctx{0, 0, 1, 0};
    CHECK(brute_counts(streams, ctx, 2).sum() == 1);
    CHECK(brute_counts(streams, {0, 1, 0}, 2).sum() >= 5);
    const Vector expected = (brute_counts(streams, {0, 1, 0}, 2).array() + 1.0) / (brute_counts(streams, {0, 1, 0}, 2).sum() + 2.0);
    CHECK(history_predict(model, ctx).isApprox(expected));
  }
  SUBCASE("property: backoff matches brute-force counting") {
    Gen gen(13);
    for (int round = 0; round < 40; ++round) {
      std::vector<LabelStream> streams(static_cast<std::size_t>(gen.integer(1, 4)));
      for (auto& s : streams) {
        s.resize(static_cast<std::size_t>(gen.integer(0, 30)));
        for (auto& v : s) v = gen.integer(0, 2);
      }
      streams.push_back({gen.integer(0, 2)});
      const int min_count = gen.integer(1, 6);
      const double s = gen.real(0, 2);
      const auto model = fit_history(streams, kABC, 4, s, min_count);
      for (int q = 0; q < 10; ++q) {
        std::vector<int> ctx(static_cast<std::size_t>(gen.integer(0, 6)));
        for (auto& v : ctx) v = gen.integer(0, 2);
        const Vector got = history_predict(model, ctx);
        check_distribution(got);
        CHECK(got.isApprox(brute_history(streams, ctx, 3, 4, s, min_count), 1e-12));
      }
    }
  }
}

TEST_CASE("property: no counting across stream boundaries") {
  Gen gen(19);
  for (int round = 0; round < 30; ++round) {
    // Each stream is constant, so any cross-class transition would have to straddle a boundary.
    std::vector<LabelStream> streams;
    for (int s = 0; s < gen.integer(2, 6); ++s) streams.push_back(LabelStream(static_cast<std::size_t>(gen.integer(1, 8)), gen.integer(0, 2)));
    const auto markov = fit_markov(streams, kABC, 0.0);
    const auto history = fit_history(streams, kABC, 4, 0.0, 1);
    for (Index r = 0; r < 3; ++r) {
      check_distribution(markov.matrix.row(r).transpose());
      for (Index c = 0; c < 3; ++c)
        if (r != c && brute_counts(streams, {static_cast<int>(r)}, 3).sum() > 0) CHECK(markov.matrix(r, c) == 0.0);
    }
    check_distribution(markov.initial);
    for (std::size_t h = 1; h < history.tables.size(); ++h)
      for (const auto& [ctx, counts] : history.tables[h]) {
        for (int v : ctx) CHECK(v == ctx.front());
        CHECK(counts.sum() == counts(ctx.front()));
      }
  }
}

TEST_CASE("property: smoothed distributions sum to one") {
  Gen gen(29);
  for (int round = 0; round < 40; ++round) {
    std::vector<LabelStream> streams(static_cast<std::size_t>(gen.integer(1, 5)));
    for (auto& s : streams) {
      s.resize(static_cast<std::size_t>(gen.integer(1, 20)));
      for (auto& v : s) v = gen.coin(0.1) ? -1 : gen.integer(0, 2);
    }
    streams.front().front() = 0;
    const double s = gen.real(0.01, 3);
    const auto markov = fit_markov(streams, kABC, s);
    for (Index r = 0; r < 3; ++r) {
      check_distribution(markov.matrix.row(r).transpose());
      CHECK(markov.matrix.row(r).minCoeff() > 0.0);
    }
    check_distribution(markov.initial);
    const auto history = fit_history(streams, kABC, 4, s, gen.integer(0, 5));
    for (const auto& table : history.tables)
      for (const auto& [ctx, counts] : table) check_distribution(history.distribution(counts));
  }
}

TEST_CASE("mixture") {
  const Vector pc = vec({0.8, 0.2}), pm = vec({0.5, 0.5}), ph = vec({0.3, 0.7});
  const auto out = mix(pc, pm, ph, {0.06, 0.07});
  CHECK(out(0) == doctest::Approx(0.747).epsilon(1e-12));
  CHECK(out(1) == doctest::Approx(0.253).epsilon(1e-12));
  CHECK(mix(pc, pm, ph, {0, 0}) == pc);
  CHECK(mix(pc, pm, ph, {1, 0}) == pm);
  CHECK(mix(pc, pm, ph, {0, 1}) == ph);
  CHECK_THROWS_AS(mix(pc, pm, ph, {0.7, 0.4}), ConfigError);
  CHECK_THROWS_AS(mix(pc, pm, ph, {-0.1, 0.4}), ConfigError);
  CHECK_THROWS_AS(mix(pc, vec({1, 0, 0}), ph, {0.1, 0.1}), DataError);

  Gen gen(3);
  for (int round = 0; round < 200; ++round) {
    const Matrix p = gen.distributions(4, 3);
    const double a = gen.real();
    const MixtureWeights w{a, gen.real(0, 1 - a)};
    CHECK(mix(p, p, p, w).isApprox(p, 1e-12));
    const Matrix q = mix(p, gen.distributions(4, 3), gen.distributions(4, 3), w);
    for (Index r = 0; r < 4; ++r) check_distribution(q.row(r).transpose());
  }
}

TEST_CASE("mixture grid search") {
  SUBCASE("ties go to the smallest weights") {
    const Matrix same = Matrix::Constant(4, 2, 0.5);
    Matrix pc(4, 2);
    pc << 0.9, 0.1, 0.1, 0.9, 0.9, 0.1, 0.1, 0.9;
    const auto r = select_mixture(pc, same, same, Labels{0, 1, 0, 1}, 0.1);
    CHECK(r.weights == MixtureWeights{0, 0});
    CHECK(r.score == 1.0);
    CHECK(r.cells == 66);
  }
  SUBCASE("markov component wins when it alone is right") {
    Matrix pc(3, 2), pm(3, 2), ph(3, 2);
    pc << 0.6, 0.4, 0.6, 0.4, 0.6, 0.4;
    pm << 0.0, 1.0, 0.0, 1.0, 0.0, 1.0;
    ph = pc;
    const auto r = select_mixture(pc, pm, ph, Labels{1, 1, 1}, 0.05);
    CHECK(r.score == 1.0);
    // B wins once 0.4 + 0.6a > 0.6 - 0.6a, i.e. a > 1/6; the first such grid point is 0.2.
    CHECK(r.weights.alpha == doctest::Approx(0.2));
    CHECK(r.weights.beta == 0.0);
  }
  SUBCASE("result lies on the grid") {
    Gen gen(41);
    for (int round = 0; round < 20; ++round) {
      const Index n = gen.integer(5, 30);
      const Labels y = gen.labels(static_cast<std::size_t>(n), 3);
      const double step = 1.0 / gen.integer(1, 20);
      const auto r = select_mixture(gen.distributions(n, 3), gen.distributions(n, 3), gen.distributions(n, 3), y, step,
                                    gen.coin() ? SelectionMetric::Accuracy : SelectionMetric::MacroF1);
      const double ia = r.weights.alpha / step, ib = r.weights.beta / step;
      CHECK(std::abs(ia - std::round(ia)) < 1e-9);
      CHECK(std::abs(ib - std::round(ib)) < 1e-9);
      CHECK(r.weights.alpha + r.weights.beta <= 1.0 + 1e-12);
    }
  }
  SUBCASE("bad step") {
    const Matrix p = Matrix::Constant(1, 2, 0.5);
    CHECK_THROWS_AS(select_mixture(p, p, p, Labels{0}, 0.3), ConfigError);
    CHECK_THROWS_AS(select_mixture(p, p, p, Labels{0}, 0.0), ConfigError);
    CHECK_THROWS_AS(parse_selection_metric("auc"), ConfigError);
  }
}

TEST_CASE("stream prediction") {
  const std::vector<LabelStream> streams{{0, 1, 0, 1, 0, 1, 0, 1}, {1, 1, 0, 0, 1}};
  TemporalModel model;
  model.markov = fit_markov(streams, kAB);
  model.history = fit_history(streams, kAB, 4, 1.0, 2);
  model.weights = {0.3, 0.3};
  const std::vector<std::size_t> indices{10, 11, 12, 13, 14, 15};
  const Labels truth{0, 1, 0, 1, 1, 0};

  SUBCASE("predicted mode never reads a true label") {
    Gen gen(5);
    int reads = 0;
    const auto r = stream_predict(model, indices, gen.distributions(6, 2), HistoryMode::Predicted,
                                  [&](std::size_t) { ++reads; return 0; });
    CHECK(reads == 0);
    for (Index i = 0; i < 6; ++i) {
      check_distribution(r.mixed.row(i).transpose());
      check_distribution(r.markov.row(i).transpose());
      check_distribution(r.history.row(i).transpose());
    }
  }
  SUBCASE("oracle mode only asks about earlier messages") {
    std::vector<std::size_t> asked;
    Gen gen(6);
    stream_predict(model, indices, gen.distributions(6, 2), HistoryMode::Oracle, [&](std::size_t i) {
      asked.push_back(i);
      return truth[i - 10];
    });
    for (std::size_t i : asked) CHECK(i < 15);
  }
  SUBCASE("modes agree when the classifier is always right") {
    Matrix certain = Matrix::Zero(6, 2);
    for (Index i = 0; i < 6; ++i) certain(i, truth[static_cast<std::size_t>(i)]) = 1.0;
    auto lookup = [&](std::size_t i) { return truth[i - 10]; };
    const auto oracle = stream_predict(model, indices, certain, HistoryMode::Oracle, lookup);
    const auto predicted = stream_predict(model, indices, certain, HistoryMode::Predicted, lookup);
    CHECK(oracle.mixed == predicted.mixed);
    CHECK(oracle.history == predicted.history);
  }
  SUBCASE("first position uses the initial distribution and the prior") {
    const auto r = stream_predict(model, indices, Matrix::Constant(6, 2, 0.5), HistoryMode::Oracle,
                                  [&](std::size_t i) { return truth[i - 10]; });
    CHECK(r.markov.row(0).transpose() == model.markov.initial);
    CHECK(r.history.row(0).transpose() == model.history.prior());
    CHECK(r.markov.row(3).transpose() == markov_predict(model.markov, truth[2]));
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(stream_predict(model, indices, Matrix::Zero(5, 2), HistoryMode::Oracle, {}), DataError);
  }
  SUBCASE("json round trip") {
    const auto back = temporal_from_json(nlohmann::json::parse(temporal_to_json(model).dump()));
    CHECK(back.weights == model.weights);
    CHECK(back.markov.matrix == model.markov.matrix);
    CHECK(history_predict(back.history, std::vector<int>{0, 1}) == history_predict(model.history, std::vector<int>{0, 1}));
  }
}
