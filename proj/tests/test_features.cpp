#include <doctest.h>

#include <memory>

#include "msgclass/error.hpp"
#include "msgclass/features.hpp"
#include "support.hpp"

using namespace msgclass;
using msgclass::test::Gen;
using msgclass::test::message;

namespace {

std::vector<double> as_vector(const auto& a) { return {a.begin(), a.end()}; }

std::vector<double> as_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Corpus three_messages() {
  return Corpus({message("m1", 0, "s", "c", "u1", "a b"), message("m2", 1, "s", "c", "u2", "a c"),
                 message("m3", 2, "s", "c", "u1", "c d")});
}

}  // namespace

TEST_CASE("general features") {
  CHECK(as_vector(general_features("Ali je knjiga dobra?")) ==
        std::vector<double>{4, 6, 2, 4.0, 0, 1, 1, 0, 1, 0});
  CHECK(as_vector(general_features("")) == std::vector<double>(10, 0.0));
  const auto f = general_features("aaaa 123!!");
  CHECK(f[0] == 2);
  CHECK(f[1] == 4);
  CHECK(f[2] == 3);
  CHECK(f[4] == 3);
  CHECK(f[5] == 2);
  CHECK(f[7] == 4);
  CHECK(f[8] == 0);
  CHECK(f[9] == 0);
  // Interior punctuation counts; word lengths are in code points.
  const auto g = general_features("Čšž don't.");
  CHECK(g[1] == 5);
  CHECK(g[2] == 3);
  CHECK(g[5] == 2);
  CHECK(g[6] == 1);
  CHECK(g[9] == 1);
}

TEST_CASE("property: general features are finite and average length is safe") {
  Gen gen(12);
  for (int i = 0; i < 300; ++i) {
    const auto f = general_features(gen.text());
    for (double v : f) CHECK(std::isfinite(v));
    if (f[0] == 0) CHECK(f[3] == 0);
    else CHECK((f[2] <= f[3] && f[3] <= f[1]));
  }
}

TEST_CASE("lexicon features") {
  LexiconSet lex;
  lex.key_lemmas = {"knjiga"};
  lex.given_names = {"jakob"};
  lex.lemmas = {{"knjige", "knjiga"}};
  const auto k = lexicon_features("Ta knjiga je dobra", lex);
  CHECK(k[8] >= 1);
  CHECK(k[9] == 1);
  CHECK(lexicon_features("Moje knjige", lex)[9] == 1);
  const auto names = lexicon_features("Jakob Jakob", lex);
  CHECK(names[2] == 2);
  CHECK(names[3] == 1);
  CHECK(as_vector(lexicon_features("", lex)) == std::vector<double>(10, 0.0));
}

TEST_CASE("bag of words") {
  const std::vector<std::vector<std::string>> docs = {{"a", "b"}, {"a", "c"}, {"c", "d"}};
  const auto vocab = fit_bow(docs, 2);
  CHECK(vocab.terms == std::vector<std::string>{"a", "c"});
  CHECK(vocab.document_frequency == std::vector<int>{2, 2});
  CHECK(as_vector(bow_features({"a", "a", "b"}, vocab)) == std::vector<double>{2, 0});
  CHECK(as_vector(bow_features({}, vocab)) == std::vector<double>{0, 0});
  CHECK(as_vector(bow_features({"x", "y"}, vocab)) == std::vector<double>{0, 0});
  CHECK(fit_bow({{"a", "b", "a"}}, 2).terms.empty());

  const auto bigrams = fit_bow({{"x", "y"}, {"x", "y", "z"}}, 2);
  CHECK(bigrams.terms == std::vector<std::string>{"x", "x y", "y"});
}

TEST_CASE("property: bow counts never exceed term occurrences") {
  Gen gen(31);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  auto doc = [&] {
    std::vector<std::string> d(static_cast<std::size_t>(gen.integer(0, 8)));
    for (auto& w : d) w = words[static_cast<std::size_t>(gen.integer(0, 4))];
    return d;
  };
  for (int round = 0; round < 50; ++round) {
    std::vector<std::vector<std::string>> docs(static_cast<std::size_t>(gen.integer(1, 10)));
    for (auto& d : docs) d = doc();
    const auto vocab = fit_bow(docs, gen.integer(1, 3));
    for (int df : vocab.document_frequency) CHECK(df >= vocab.min_df);
    const auto probe = doc();
    const auto v = bow_features(probe, vocab);
    CHECK(v.sum() <= static_cast<double>(bow_terms(probe).size()));
    double unigrams = 0;
    for (std::size_t t = 0; t < vocab.terms.size(); ++t)
      if (vocab.terms[t].find(' ') == std::string::npos) unigrams += v(static_cast<Index>(t));
    CHECK(unigrams <= static_cast<double>(probe.size()));
  }
}

TEST_CASE("pos features") {
  const PosTag noun{PosCategory::Noun, "common"}, verb{PosCategory::Verb, "main"};
  const PosVocab vocab{{noun, verb}};
  CHECK(as_vector(pos_features({noun, noun, verb}, vocab)) == std::vector<double>{2, 1});
  CHECK(as_vector(pos_features({}, vocab)) == std::vector<double>{0, 0});
  CHECK(fit_pos_vocab({{verb, noun}, {noun}}).pairs == std::vector<PosTag>{noun, verb});
}

TEST_CASE("temporal features") {
  const Corpus posters({message("a", 0, "s", "c", "u1", "x"), message("b", 1, "s", "c", "u1", "x"),
                        message("c", 2, "s", "c", "u2", "x")});
  const auto stream = partition_streams(posters).front();
  CHECK(temporal_features(posters, stream, 0) == TemporalFeatures{1, 0});
  CHECK(temporal_features(posters, stream, 1).consecutive_posts == 2);
  CHECK(temporal_features(posters, stream, 2).consecutive_posts == 1);

  std::vector<Message> ms;
  for (int i = 0; i < 25; ++i) ms.push_back(message("m" + std::to_string(100 + i), i, "s", "c", "u1", "x"));
  const Corpus solo(ms);
  const auto solo_stream = partition_streams(solo).front();
  CHECK(temporal_features(solo, solo_stream, 24).window_share == 20);
  CHECK(temporal_features(solo, solo_stream, 24).consecutive_posts == 25);
  CHECK(temporal_features(solo, solo_stream, 5).window_share == 5);
}

TEST_CASE("assembly and subset layout") {
  const auto corpus = three_messages();
  auto lex = std::make_shared<const LexiconSet>();
  FeaturizerConfig config;
  config.subsets = {Subset::General};
  CHECK(transform(corpus, corpus, fit_featurizer(corpus, corpus, lex, config)).cols() == 10);

  config.subsets = {Subset::Bow, Subset::General};
  config.scale = false;
  const auto fitted = fit_featurizer(corpus, corpus, lex, config);
  const auto x = transform(corpus, corpus, fitted);
  CHECK(x.cols() == 12);
  REQUIRE(x.subsets.size() == 2);
  CHECK(x.subsets[0].subset == Subset::General);
  CHECK(x.subsets[1].begin == 10);
  CHECK(x.columns[10] == "bow:a");
  CHECK(x.values(0, 10) == 1);

  FeaturizerConfig full;
  const auto all = transform(corpus, corpus, fit_featurizer(corpus, corpus, lex, full));
  Index next = 0;
  for (const auto& r : all.subsets) {
    CHECK(r.begin == next);
    next = r.end;
  }
  CHECK(next == all.cols());
  CHECK(static_cast<Index>(all.columns.size()) == all.cols());

  Featurizer missing = fitted;
  missing.bow.reset();
  CHECK_THROWS_AS(assemble(corpus, corpus, missing), ConfigError);
  CHECK_THROWS_AS(parse_subset("sentiment"), ConfigError);
}

TEST_CASE("empty message gives an all-zero unscaled row") {
  const Corpus corpus({message("m1", 0, "s", "c", "u1", "a b"), message("m2", 1, "s", "c", "u2", "a b"),
                       message("m3", 2, "s", "c", "u3", "")});
  FeaturizerConfig config;
  config.subsets = {Subset::General, Subset::Lexicon, Subset::Bow, Subset::Pos};
  config.scale = false;
  const auto x = transform(corpus, corpus, fit_featurizer(corpus, corpus, std::make_shared<const LexiconSet>(), config));
  CHECK(x.values.row(2).isZero(0.0));
}

TEST_CASE("scaler") {
  Matrix m(3, 2);
  m << 1, 5, 2, 5, 3, 5;
  const std::vector<Index> cols{0, 1};
  const auto s = fit_scaler(m, cols);
  const Matrix z = apply_scaler(m, s);
  CHECK(z(0, 0) == doctest::Approx(-1.2247448714).epsilon(1e-9));
  CHECK(z(1, 0) == doctest::Approx(0.0));
  CHECK(z(2, 0) == doctest::Approx(1.2247448714).epsilon(1e-9));
  CHECK(z.col(1) == m.col(1));

  Gen gen(2);
  const Matrix r = gen.matrix(40, 5, -3, 7);
  const std::vector<Index> all{0, 1, 2, 3, 4};
  const Matrix zr = apply_scaler(r, fit_scaler(r, all));
  for (Index c = 0; c < 5; ++c) {
    CHECK(std::abs(zr.col(c).mean()) < 1e-9);
    CHECK(zr.col(c).squaredNorm() / 40 == doctest::Approx(1.0).epsilon(1e-9));
  }
  // Works on other scalar types too.
  const Eigen::MatrixXf rf = r.cast<float>();
  CHECK(apply_scaler(rf, fit_scaler(rf, all)).rows() == 40);
}

TEST_CASE("transform leaves the fitted featurizer untouched") {
  const auto train = three_messages();
  const Corpus test({message("t1", 5, "s", "c", "u9", "a a z q")});
  const auto fitted = fit_featurizer(train, train, std::make_shared<const LexiconSet>(), FeaturizerConfig{});
  const auto before = featurizer_to_json(fitted).dump();
  const auto x1 = transform(test, test, fitted);
  CHECK(featurizer_to_json(fitted).dump() == before);
  const auto x2 = transform(test, test, fitted);
  CHECK(x1.values == x2.values);
  CHECK(x1.columns == x2.columns);
  const auto restored = featurizer_from_json(featurizer_to_json(fitted));
  CHECK(transform(test, test, restored).values.isApprox(x1.values, 1e-12));
}

TEST_CASE("prepared cache matches direct featurization") {
  const auto corpus = three_messages();
  auto lex = std::make_shared<const LexiconSet>();
  const PreparedCorpus cache(corpus, lex);
  const std::vector<std::size_t> rows{0, 1, 2};
  const auto direct = fit_featurizer(corpus, corpus, lex, FeaturizerConfig{});
  const auto cached = fit_featurizer(cache.prepared(rows), cache.temporal(rows), lex, FeaturizerConfig{});
  CHECK(transform(corpus, corpus, direct).values ==
        transform(cache.prepared(rows), cache.temporal(rows), cached).values);
}
