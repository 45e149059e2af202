#include <algorithm>
#include <map>

#include "authorsum/rng.hpp"
#include "authorsum/rouge.hpp"
#include "authorsum/text.hpp"
#include "doctest.h"

using namespace authorsum;
using namespace authorsum::metrics;

namespace {

std::vector<int> ids(const std::string& s) {
  // stable word->id mapping local to the fixture
  static const std::map<std::string, int> table = {
      {"the", 10}, {"cat", 11}, {"sat", 12}, {"ran", 13}, {"far", 14},
      {"a", 20},   {"b", 21},   {"c", 22},   {"d", 23},   {"x", 30},
      {"y", 31}};
  std::vector<int> out;
  for (const auto& w : text::tokenize(s)) out.push_back(table.at(w));
  return out;
}

}  // namespace

TEST_SUITE("rouge") {

TEST_CASE("ngram_counts sliding window") {
  auto c2 = ngram_counts({1, 2, 1, 2}, 2);
  CHECK(c2.size() == 2);
  CHECK(c2.at({1, 2}) == 2);
  CHECK(c2.at({2, 1}) == 1);

  CHECK(ngram_counts({1}, 2).empty());

  auto c1 = ngram_counts({5, 5, 6, 7}, 1);
  long total = 0;
  for (const auto& [g, n] : c1) total += n;
  CHECK(total == 4);

  CHECK_THROWS(ngram_counts({1, 2}, 0));
}

// >= 10 hand-derived fixtures, frozen values (also run by the acceptance
// suite at 1e-9)
TEST_CASE("hand-derived rouge fixtures") {
  const double tol = 1e-9;

  // 1. bigram worked example
  auto s1 = rouge_n(2, ids("the cat sat"), ids("the cat ran far"));
  CHECK(s1.precision == doctest::Approx(0.5).epsilon(tol));
  CHECK(s1.recall == doctest::Approx(1.0 / 3.0).epsilon(tol));
  CHECK(s1.f1 == doctest::Approx(0.4).epsilon(tol));

  // 2. summary-level LCS worked example
  auto s2 = rouge_l(ids("the cat sat"), ids("the sat cat"));
  CHECK(s2.precision == doctest::Approx(2.0 / 3.0).epsilon(tol));
  CHECK(s2.recall == doctest::Approx(2.0 / 3.0).epsilon(tol));
  CHECK(s2.f1 == doctest::Approx(2.0 / 3.0).epsilon(tol));

  // 3. identical sequences
  for (int n : {1, 2, 3}) {
    auto s = rouge_n(n, ids("a b c d"), ids("a b c d"));
    CHECK(s.f1 == doctest::Approx(1.0).epsilon(tol));
  }
  CHECK(rouge_l(ids("a b c"), ids("a b c")).f1 == doctest::Approx(1.0).epsilon(tol));

  // 4. disjoint vocabularies
  CHECK(rouge_n(1, ids("a b"), ids("c d")).f1 == doctest::Approx(0.0));
  CHECK(rouge_l(ids("a b"), ids("c d")).f1 == doctest::Approx(0.0));

  // 5. unigram multiset clipping: hyp "a b a", ref "a a b b"
  //    overlap = min(2,2)+min(1,2) = 3; p = 3/3, r = 3/4, f1 = 6/7
  auto s5 = rouge_n(1, ids("a b a"), ids("a a b b"));
  CHECK(s5.precision == doctest::Approx(1.0).epsilon(tol));
  CHECK(s5.recall == doctest::Approx(0.75).epsilon(tol));
  CHECK(s5.f1 == doctest::Approx(6.0 / 7.0).epsilon(tol));

  // 6. bigrams of the same pair: hyp {ab, ba}, ref {aa, ab, bb} -> overlap 1
  auto s6 = rouge_n(2, ids("a b a"), ids("a a b b"));
  CHECK(s6.precision == doctest::Approx(0.5).epsilon(tol));
  CHECK(s6.recall == doctest::Approx(1.0 / 3.0).epsilon(tol));
  CHECK(s6.f1 == doctest::Approx(0.4).epsilon(tol));

  // 7. LCS with a gapped subsequence: hyp "a b c d", ref "b d" -> LCS 2
  auto s7 = rouge_l(ids("a b c d"), ids("b d"));
  CHECK(s7.precision == doctest::Approx(0.5).epsilon(tol));
  CHECK(s7.recall == doctest::Approx(1.0).epsilon(tol));
  CHECK(s7.f1 == doctest::Approx(2.0 / 3.0).epsilon(tol));

  // 8. LCS under a transposition: hyp "a c b d", ref "a b c d" -> LCS 3
  auto s8 = rouge_l(ids("a c b d"), ids("a b c d"));
  CHECK(s8.f1 == doctest::Approx(0.75).epsilon(tol));

  // 9. unigram partial: hyp "x", ref "x y" -> p 1, r 1/2, f1 2/3
  auto s9 = rouge_n(1, ids("x"), ids("x y"));
  CHECK(s9.precision == doctest::Approx(1.0).epsilon(tol));
  CHECK(s9.recall == doctest::Approx(0.5).epsilon(tol));
  CHECK(s9.f1 == doctest::Approx(2.0 / 3.0).epsilon(tol));

  // 10. empty hypothesis
  auto s10 = rouge_l({}, ids("a b"));
  CHECK(s10.precision == doctest::Approx(0.0));
  CHECK(s10.recall == doctest::Approx(0.0));
  CHECK(s10.f1 == doctest::Approx(0.0));
  CHECK(rouge_n(2, {}, ids("a b")).f1 == doctest::Approx(0.0));

  // 11. n longer than both sequences -> all zero
  CHECK(rouge_n(3, ids("a b"), ids("a b")).f1 == doctest::Approx(0.0));
}

TEST_CASE("macro_average") {
  RougeScore one = RougeScore::from_pr(1.0, 1.0);
  RougeScore zero;
  auto avg = macro_average({one, zero});
  CHECK(avg.precision == doctest::Approx(0.5));
  CHECK(avg.recall == doctest::Approx(0.5));
  CHECK(avg.f1 == doctest::Approx(0.5));

  auto single = macro_average({RougeScore::from_pr(0.25, 0.75)});
  CHECK(single.precision == doctest::Approx(0.25));
  CHECK(single.recall == doctest::Approx(0.75));

  // components are averaged independently: mean of f1s is not f1 of means
  RougeScore a = RougeScore::from_pr(1.0, 0.2);
  RougeScore b = RougeScore::from_pr(0.2, 1.0);
  auto m = macro_average({a, b});
  CHECK(m.f1 == doctest::Approx((a.f1 + b.f1) / 2.0));
  CHECK(m.f1 != doctest::Approx(RougeScore::from_pr(m.precision, m.recall).f1));

  CHECK_THROWS_WITH(macro_average({}), doctest::Contains("no documents"));
}

TEST_CASE("swap duality: precision(hyp,ref) == recall(ref,hyp)") {
  Rng rng(123);
  for (int it = 0; it < 50; ++it) {
    std::vector<int> a, b;
    for (std::size_t i = rng.uniform_int(12); i > 0; --i)
      a.push_back(static_cast<int>(rng.uniform_int(5)));
    for (std::size_t i = rng.uniform_int(12); i > 0; --i)
      b.push_back(static_cast<int>(rng.uniform_int(5)));
    for (int n : {1, 2}) {
      auto ab = rouge_n(n, a, b);
      auto ba = rouge_n(n, b, a);
      CHECK(ab.precision == doctest::Approx(ba.recall).epsilon(1e-12));
      CHECK(ab.recall == doctest::Approx(ba.precision).epsilon(1e-12));
    }
  }
}

TEST_CASE("scores invariant under token-id relabeling") {
  Rng rng(77);
  for (int it = 0; it < 25; ++it) {
    std::vector<int> a, b;
    for (std::size_t i = 1 + rng.uniform_int(10); i > 0; --i)
      a.push_back(static_cast<int>(rng.uniform_int(6)));
    for (std::size_t i = 1 + rng.uniform_int(10); i > 0; --i)
      b.push_back(static_cast<int>(rng.uniform_int(6)));
    // random bijection over [0,6) onto distinct large ids
    std::vector<int> targets = {100, 205, 317, 42, 999, 7};
    rng.shuffle(targets);
    auto relabel = [&](std::vector<int> v) {
      for (int& x : v) x = targets[static_cast<std::size_t>(x)];
      return v;
    };
    for (int n : {1, 2}) {
      auto orig = rouge_n(n, a, b);
      auto rel = rouge_n(n, relabel(a), relabel(b));
      CHECK(orig.f1 == doctest::Approx(rel.f1).epsilon(1e-12));
    }
    CHECK(rouge_l(a, b).f1 ==
          doctest::Approx(rouge_l(relabel(a), relabel(b)).f1).epsilon(1e-12));
  }
}

TEST_CASE("LCS bounded by the shorter sequence and f1 by 1") {
  Rng rng(5150);
  for (int it = 0; it < 50; ++it) {
    std::vector<int> a, b;
    for (std::size_t i = rng.uniform_int(15); i > 0; --i)
      a.push_back(static_cast<int>(rng.uniform_int(4)));
    for (std::size_t i = rng.uniform_int(15); i > 0; --i)
      b.push_back(static_cast<int>(rng.uniform_int(4)));
    CHECK(lcs_length(a, b) <= std::min(a.size(), b.size()));
    CHECK(rouge_l(a, b).f1 <= 1.0 + 1e-12);
  }
}

}  // TEST_SUITE
