#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "affmem/embeddings.hpp"
#include "support/fixtures.hpp"

using namespace affmem;

// FNV-1a 64 values computed independently (Python reference) before the build.
TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("hello") == 0xa430d84680aabd0bULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("b") == 0xaf63df4c8601f1a5ULL);
  CHECK(fnv1a64("caf\xc3\xa9") == 0x48e8823acfa40d89ULL);
}

TEST_CASE("tokenize") {
  using V = std::vector<std::string>;
  CHECK(tokenize("Hello, hello world!") == V{"hello", "hello", "world"});
  CHECK(tokenize("") == V{});
  CHECK(tokenize("Caf\xc3\xa9 123") == V{"caf\xc3\xa9", "123"});
  CHECK(tokenize("\xc3\x89T\xc3\x89") == V{"\xc3\xa9t\xc3\xa9"});
  CHECK(tokenize("...") == V{});
  CHECK(tokenize("don't") == V{"don", "t"});
  // Invalid UTF-8 separates tokens rather than failing.
  CHECK(tokenize("ab\xff" "cd") == V{"ab", "cd"});
}

TEST_CASE("embed_corpus single token") {
  const auto m = embed_corpus({"hello"}, 256);
  REQUIRE(m.vectors.size() == 1);
  // FNV1a64("hello") mod 256 = 11, bit 63 set -> sign -1.
  for (std::size_t i = 0; i < 256; ++i) {
    if (i == 11) CHECK(m.vectors[0][i] == -1.0);
    else CHECK(m.vectors[0][i] == 0.0);
  }
}

TEST_CASE("embed_corpus hand-computed weights") {
  // Unnormalized weight of "a" in ["a a", "b"]: (1 + ln 2) * (ln(3/2) + 1).
  const double w = (1.0 + std::log(2.0)) * (std::log(3.0 / 2.0) + 1.0);
  CHECK(w == doctest::Approx(2.37966).epsilon(1e-5));
  const auto m = embed_corpus({"a a", "b"}, 256);
  CHECK(m.vectors[0][140] == -1.0);  // "a" -> 140, negative
  CHECK(m.vectors[1][165] == -1.0);  // "b" -> 165, negative
  CHECK(std::count_if(m.vectors[0].begin(), m.vectors[0].end(), [](double x) { return x != 0.0; }) == 1);

  // Two tokens in separate slots: ratio of coordinates equals ratio of weights.
  const auto two = embed_corpus({"a a b", "b"}, 256);
  const double wa = (1.0 + std::log(2.0)) * (std::log(3.0 / 2.0) + 1.0);
  const double wb = 1.0 * (std::log(3.0 / 3.0) + 1.0);
  CHECK(two.vectors[0][140] / two.vectors[0][165] == doctest::Approx(wa / wb).epsilon(1e-12));
}

TEST_CASE("embed_corpus determinism and normalization") {
  const std::vector<std::string> corpus = {"a b", "a b", "the quick brown fox", "...", "fox fox fox"};
  const auto m1 = embed_corpus(corpus);
  const auto m2 = embed_corpus(corpus);
  CHECK(m1.vectors[0] == m1.vectors[1]);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(std::memcmp(m1.vectors[i].data(), m2.vectors[i].data(), sizeof(double) * 256) == 0);
  }
  CHECK_FALSE(m1.lexical[3]);
  CHECK(std::all_of(m1.vectors[3].begin(), m1.vectors[3].end(), [](double x) { return x == 0.0; }));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!m1.lexical[i]) continue;
    double n2 = 0.0;
    for (double x : m1.vectors[i]) n2 += x * x;
    CHECK(std::fabs(std::sqrt(n2) - 1.0) <= 1e-9);
  }
}

TEST_CASE("embed_corpus rows follow corpus permutations") {
  std::mt19937_64 rng(5);
  auto d = affmem::testing::random_session_data(rng, 12);
  std::vector<std::string> corpus;
  for (const auto& s : d.sentences) corpus.push_back(s.text);
  std::vector<std::size_t> perm(corpus.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::string> shuffled;
  for (std::size_t p : perm) shuffled.push_back(corpus[p]);

  const auto a = embed_corpus(corpus, 64);
  const auto b = embed_corpus(shuffled, 64);
  for (std::size_t i = 0; i < perm.size(); ++i) CHECK(b.vectors[i] == a.vectors[perm[i]]);
}

TEST_CASE("embed_corpus rejects tiny dimensions") {
  try {
    embed_corpus({"x"}, 1);
    FAIL("expected InvalidDimension");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidDimension);
  }
}

TEST_CASE("external_embeddings") {
  using namespace affmem::testing;
  auto d = basic_data();
  d.sentences = {sentence(0, 0, 1, "a"), sentence(1, 1, 2, "b")};
  d.external_embeddings = std::vector<std::vector<double>>{{3.0, 4.0}, {0.5, -2.0}};
  const auto m = external_embeddings(validate_session(d));
  CHECK(m.source == EmbeddingSource::External);
  CHECK(m.vectors == *d.external_embeddings);

  d.external_embeddings.reset();
  try {
    external_embeddings(validate_session(d));
    FAIL("expected NotAvailable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAvailable);
  }
}
