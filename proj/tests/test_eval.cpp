#include <doctest.h>

#include <algorithm>

#include "msgclass/cv.hpp"
#include "msgclass/error.hpp"
#include "msgclass/metrics.hpp"
#include "msgclass/pipeline.hpp"
#include "msgclass/report.hpp"
#include "msgclass/ttest.hpp"
#include "support.hpp"

using namespace msgclass;
using msgclass::test::boost_t_cdf;
using msgclass::test::brute_force_auc;
using msgclass::test::Gen;
using msgclass::test::message;

namespace {

// Differences with exactly the requested sample mean and standard deviation.
std::vector<double> shaped(Gen& gen, int n, double mean, double sd) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = gen.normal();
  double m = 0;
  for (double v : x) m += v;
  m /= n;
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  const double s = std::sqrt(ss / (n - 1));
  for (auto& v : x) v = mean + sd * (v - m) / s;
  return x;
}

struct Oracle {
  double left, rope, right;
};

Oracle oracle(int n, double mean, double sd, double rho, double rope) {
  const double scale = std::sqrt((1.0 / n + rho / (1 - rho)) * sd * sd);
  const double left = boost_t_cdf((-rope - mean) / scale, n - 1);
  const double right = 1 - boost_t_cdf((rope - mean) / scale, n - 1);
  return {left, 1 - left - right, right};
}

Corpus binary_corpus(int yes, int no) {
  std::vector<Message> ms;
  for (int i = 0; i < yes + no; ++i)
    ms.push_back(message("m" + std::to_string(1000 + i), i, i % 2 ? "s1" : "s2", "c", "u" + std::to_string(i % 7),
                         "besedilo " + std::to_string(i), {{"relevance", i < yes ? "yes" : "no"}}));
  return Corpus(std::move(ms));
}

// Predicts the training side's modal class with certainty.
class ModalPipeline : public Pipeline {
 public:
  FoldOutput fit_predict(const FoldInput& in) override {
    const auto y = in.context->label_indices(in.objective);
    const auto k = static_cast<Index>(in.context->classes(in.objective).size());
    Vector counts = Vector::Zero(k);
    for (auto i : in.train) counts(y[i]) += 1;
    Index modal = 0;
    counts.maxCoeff(&modal);
    for (auto i : in.test) CHECK(y[i] == -1);
    FoldOutput out;
    out.probabilities = Matrix::Zero(static_cast<Index>(in.test.size()), k);
    out.probabilities.col(modal).setOnes();
    return out;
  }
};

class FailingPipeline : public Pipeline {
 public:
  FoldOutput fit_predict(const FoldInput& in) override {
    if (in.repeat == 1 && in.fold == 2) throw NumericError("diverged");
    FoldOutput out;
    out.probabilities = Matrix::Constant(static_cast<Index>(in.test.size()), 2, 0.5);
    return out;
  }
};

}  // namespace

TEST_CASE("confusion and per-class metrics") {
  const Matrix c = confusion(Labels{0, 0, 1}, Labels{0, 1, 1}, 2);
  CHECK(c(0, 0) == 1);
  CHECK(c(0, 1) == 1);
  CHECK(c(1, 1) == 1);
  const auto m = prf(c);
  CHECK(m.precision == std::vector<double>{1.0, 0.5});
  CHECK(m.recall == std::vector<double>{0.5, 1.0});
  CHECK(m.f1[0] == doctest::Approx(2.0 / 3.0));
  CHECK(m.support == std::vector<double>{2, 1});
  CHECK(accuracy(c) == doctest::Approx(2.0 / 3.0));

  const auto perfect = prf(confusion(Labels{0, 1, 2, 2}, Labels{0, 1, 2, 2}, 3));
  CHECK(perfect.precision == std::vector<double>{1, 1, 1});
  CHECK(perfect.f1 == std::vector<double>{1, 1, 1});

  const auto never = prf(confusion(Labels{0, 1, 2}, Labels{0, 0, 0}, 3));
  CHECK(never.precision[1] == 0.0);
  CHECK(never.recall[1] == 0.0);
  CHECK(never.f1[2] == 0.0);

  CHECK_THROWS_AS(confusion(Labels{0, 3}, Labels{0, 0}, 3), DataError);
  CHECK_THROWS_AS(confusion(Labels{0}, Labels{0, 0}, 3), DataError);
}

TEST_CASE("property: metrics follow a class relabelling") {
  Gen gen(8);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(1, 60));
    const Labels t = gen.labels(n, 4), p = gen.labels(n, 4);
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), gen.engine());
    Labels tp(n), pp(n);
    for (std::size_t i = 0; i < n; ++i) {
      tp[i] = perm[static_cast<std::size_t>(t[i])];
      pp[i] = perm[static_cast<std::size_t>(p[i])];
    }
    const auto a = prf(confusion(t, p, 4)), b = prf(confusion(tp, pp, 4));
    for (std::size_t c = 0; c < 4; ++c) {
      const auto pc = static_cast<std::size_t>(perm[c]);
      CHECK(a.precision[c] == b.precision[pc]);
      CHECK(a.recall[c] == b.recall[pc]);
      CHECK(a.f1[c] == b.f1[pc]);
    }
    CHECK(accuracy(confusion(t, p, 4)) == accuracy(confusion(tp, pp, 4)));
    CHECK(macro_f1(confusion(t, p, 4)) == doctest::Approx(macro_f1(confusion(tp, pp, 4))));
  }
}

TEST_CASE("roc auc") {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  CHECK(roc_auc(s, std::vector<int>{1, 1, 0, 0}).auc == 1.0);
  CHECK(roc_auc(s, std::vector<int>{1, 0, 1, 0}).auc == 0.75);
  CHECK(roc_auc(s, std::vector<int>{0, 0, 1, 1}).auc == 0.0);
  CHECK(roc_auc(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}).auc == 0.5);
  CHECK_THROWS_AS(roc_auc(s, std::vector<int>{1, 1, 1, 1}), DataError);

  const auto curve = roc_auc(s, std::vector<int>{1, 0, 1, 0});
  CHECK(curve.fpr.front() == 0.0);
  CHECK(curve.tpr.front() == 0.0);
  CHECK(curve.fpr.back() == 1.0);
  CHECK(curve.tpr.back() == 1.0);
  CHECK(std::isinf(curve.thresholds.front()));

  Gen gen(77);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = static_cast<std::size_t>(gen.integer(2, 200));
    std::vector<double> scores(n);
    std::vector<int> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = gen.integer(0, 20) / 20.0;
      pos[i] = gen.coin() ? 1 : 0;
    }
    pos[0] = 1;
    pos[1] = 0;
    const auto r = roc_auc(scores, pos);
    CHECK(r.auc == doctest::Approx(brute_force_auc(scores, pos)).epsilon(1e-12));
    for (std::size_t i = 1; i < r.fpr.size(); ++i) {
      CHECK(r.fpr[i] >= r.fpr[i - 1]);
      CHECK(r.tpr[i] >= r.tpr[i - 1]);
    }
  }
}

TEST_CASE("student t cdf matches the reference implementation") {
  Gen gen(5);
  for (int i = 0; i < 200; ++i) {
    const double t = gen.real(-8, 8), nu = gen.real(0.5, 200);
    CHECK(std::abs(student_t_cdf(t, nu) - boost_t_cdf(t, nu)) < 1e-10);
  }
  CHECK(student_t_cdf(0.0, 9) == 0.5);
}

TEST_CASE("bayesian correlated t-test") {
  SUBCASE("the stated reference configuration") {
    Gen gen(1);
    const auto x = shaped(gen, 100, 0.02, 0.05);
    const std::vector<double> zero(100, 0.0);
    const auto r = bayes_corr_ttest(x, zero, 0.1, 0.01);
    const auto o = oracle(100, 0.02, 0.05, 0.1, 0.01);
    CHECK(std::abs(r.p_left - o.left) < 1e-6);
    CHECK(std::abs(r.p_rope - o.rope) < 1e-6);
    CHECK(std::abs(r.p_right - o.right) < 1e-6);
    CHECK(r.dof == 99);
  }
  SUBCASE("random configurations") {
    Gen gen(2);
    for (int i = 0; i < 20; ++i) {
      const int n = gen.integer(3, 150);
      const double mean = gen.real(-0.05, 0.05), sd = gen.real(0.005, 0.1), rho = gen.real(0, 0.5);
      const double rope = gen.real(0.001, 0.03);
      const auto x = shaped(gen, n, mean, sd);
      std::vector<double> base(static_cast<std::size_t>(n)), a(static_cast<std::size_t>(n));
      for (std::size_t j = 0; j < base.size(); ++j) {
        base[j] = gen.real(0.5, 0.9);
        a[j] = base[j] + x[j];
      }
      const auto r = bayes_corr_ttest(a, base, rho, rope);
      const auto o = oracle(n, mean, sd, rho, rope);
      CHECK(std::abs(r.p_left - o.left) < 1e-6);
      CHECK(std::abs(r.p_rope - o.rope) < 1e-6);
      CHECK(std::abs(r.p_right - o.right) < 1e-6);
    }
  }
  SUBCASE("degenerate and symmetric cases") {
    const std::vector<double> a{0.8, 0.82, 0.79, 0.85};
    const auto self = bayes_corr_ttest(a, a, 0.1);
    CHECK(self.p_rope == 1.0);
    CHECK(self.p_left == 0.0);

    std::vector<double> shifted(a);
    for (auto& v : shifted) v += 0.05;
    CHECK(bayes_corr_ttest(shifted, a, 0.1).p_right == 1.0);

    Gen gen(3);
    for (int i = 0; i < 50; ++i) {
      const int n = gen.integer(2, 40);
      std::vector<double> p(static_cast<std::size_t>(n)), q(static_cast<std::size_t>(n));
      for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] = gen.real();
        q[j] = gen.real();
      }
      const auto ab = bayes_corr_ttest(p, q, 0.1), ba = bayes_corr_ttest(q, p, 0.1);
      CHECK(ab.p_left == doctest::Approx(ba.p_right).epsilon(1e-12));
      CHECK(ab.p_rope == doctest::Approx(ba.p_rope).epsilon(1e-12));
      CHECK(std::abs(ab.p_left + ab.p_rope + ab.p_right - 1.0) < 1e-12);
      std::vector<double> p2(p), q2(q);
      const double shift = gen.real(-5, 5);
      for (std::size_t j = 0; j < p.size(); ++j) {
        p2[j] += shift;
        q2[j] += shift;
      }
      const auto moved = bayes_corr_ttest(p2, q2, 0.1);
      CHECK(moved.p_right == doctest::Approx(ab.p_right).epsilon(1e-9));
    }
  }
  SUBCASE("verdict wording") {
    TTestResult r;
    r.p_left = 0.01;
    r.p_rope = 0.02;
    r.p_right = 0.97;
    const auto v = verdict(r, "augmented", "initial");
    CHECK(v.find("0.97") != std::string::npos);
    CHECK(v.find("augmented") != std::string::npos);
  }
  SUBCASE("input errors") {
    CHECK_THROWS(bayes_corr_ttest(std::vector<double>{1}, std::vector<double>{1, 2}, 0.1));
  }
}

TEST_CASE("cross-validation driver") {
  const auto corpus = binary_corpus(70, 30);
  const auto plan = make_cv_folds(corpus, 10, 10, "relevance", 4);

  SUBCASE("majority on 70/30 data scores about 0.7 over 100 folds") {
    const auto report = run_cv(corpus, plan, [] { return std::make_unique<ModalPipeline>(); });
    CHECK(report.folds.size() == 100);
    CHECK(report.accuracy == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(report.k == 10);
    CHECK(report.repeats == 10);
    CHECK(report.confusion.sum() == 100);
    CHECK(report.classes == std::vector<std::string>{"no", "yes"});
    CHECK(fold_scores(report).size() == 100);
  }
  SUBCASE("standard pipeline with the majority model") {
    PipelineConfig config;
    config.model.kind = ModelKind::Majority;
    config.features.subsets = {Subset::General};
    CvOptions options;
    options.threads = 1;
    const auto a = run_cv(corpus, plan, standard_pipeline_factory(config, std::make_shared<const LexiconSet>()), options);
    CHECK(a.accuracy == doctest::Approx(0.7).epsilon(1e-9));
    const auto b = run_cv(corpus, plan, standard_pipeline_factory(config, std::make_shared<const LexiconSet>()), options);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());

    const auto self = compare(a, b);
    CHECK(self.result.p_rope == 1.0);
    CHECK(self.result.rho == doctest::Approx(0.1));
  }
  SUBCASE("a failing fold names its position") {
    try {
      run_cv(corpus, plan, [] { return std::make_unique<FailingPipeline>(); });
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      const std::string what = e.what();
      CHECK(what.find("repeat 1") != std::string::npos);
      CHECK(what.find("fold 2") != std::string::npos);
      CHECK(what.find("diverged") != std::string::npos);
    }
  }
  SUBCASE("comparisons need a shared plan") {
    const auto a = run_cv(corpus, plan, [] { return std::make_unique<ModalPipeline>(); });
    const auto other = make_cv_folds(corpus, 10, 10, "relevance", 5);
    const auto b = run_cv(corpus, other, [] { return std::make_unique<ModalPipeline>(); });
    CHECK_THROWS_AS(compare(a, b), DataError);
  }
  SUBCASE("report json round trip") {
    const auto a = run_cv(corpus, plan, [] { return std::make_unique<ModalPipeline>(); });
    const auto back = report_from_json(nlohmann::json::parse(report_to_json(a).dump()));
    CHECK(report_to_json(back) == report_to_json(a));
    CHECK(fold_scores(back) == fold_scores(a));
    CHECK(report_to_text(a).find("accuracy") != std::string::npos);
  }
}

TEST_CASE("fingerprint") {
  // Published FNV-1a 64-bit test vectors.
  CHECK(fingerprint("") == "cbf29ce484222325");
  CHECK(fingerprint("a") == "af63dc4c8601ec8c");
}
