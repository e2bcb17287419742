#include <doctest.h>

#include <random>

#include "efdp/conll.hpp"
#include "efdp/error.hpp"
#include "support/synthetic.hpp"

using namespace efdp;

namespace {

// All-pairs crossing check, independent of the library implementation.
bool brute_projective(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int d1 = 1; d1 <= n; ++d1) {
    for (int d2 = 1; d2 <= n; ++d2) {
      const int h1 = heads[d1 - 1], h2 = heads[d2 - 1];
      const int a = std::min(h1, d1), b = std::max(h1, d1);
      const int c = std::min(h2, d2), d = std::max(h2, d2);
      if (a < c && c < b && b < d) return false;
    }
  }
  return true;
}

const char* kTwoTokens =
    "1\tTôi\t_\tP\tP\t_\t2\tnsubj\t_\t_\n"
    "2\tcó\t_\tV\tV\t_\t0\troot\t_\t_\n";

}  // namespace

TEST_CASE("minimal block parses to one sentence rooted at token 2") {
  auto s = parse_conll(kTwoTokens);
  REQUIRE(s.size() == 1);
  REQUIRE(s[0].size() == 2);
  CHECK(s[0][0].form == "Tôi");
  CHECK(s[0][0].head == 2);
  CHECK(s[0][0].deprel == "nsubj");
  CHECK(s[0][1].head == 0);
  CHECK(s[0][1].pos == "V");
}

TEST_CASE("empty input and blank lines") {
  CHECK(parse_conll("").empty());
  CHECK(parse_conll("\n\n\n").empty());
  auto s = parse_conll(std::string("\n\n") + kTwoTokens + "\n\n\n" + kTwoTokens);
  CHECK(s.size() == 2);
}

TEST_CASE("CRLF line endings and missing final newline") {
  std::string text = "1\ta\t_\tX\tX\t_\t0\troot\t_\t_\r\n\r\n1\tb\t_\tX\tX\t_\t0\troot\t_\t_";
  auto s = parse_conll(text);
  REQUIRE(s.size() == 2);
  CHECK(s[1][0].form == "b");
}

TEST_CASE("POS falls back to CPOS when column 5 is '_'") {
  auto s = parse_conll("1\tx\t_\tN\t_\t_\t0\troot\t_\t_\n");
  CHECK(s[0][0].pos == "N");
}

TEST_CASE("malformed lines report line numbers") {
  SUBCASE("column count") {
    try {
      parse_conll(std::string(kTwoTokens) + "\n1\tx\t_\tN\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
  }
  SUBCASE("non-integer head") {
    try {
      parse_conll("1\tx\t_\tN\tN\t_\tz\troot\t_\t_\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("non-integer id") { CHECK_THROWS_AS(parse_conll("a\tx\t_\tN\tN\t_\t0\troot\t_\t_\n"), ParseError); }
  SUBCASE("CoNLL-U comments and ranges") {
    CHECK_THROWS_AS(parse_conll("# sent_id = 1\n1\tx\t_\tN\tN\t_\t0\troot\t_\t_\n"), ParseError);
    CHECK_THROWS_AS(parse_conll("1-2\txy\t_\t_\t_\t_\t_\t_\t_\t_\n"), ParseError);
  }
}

TEST_CASE("invalid trees are rejected naming the sentence") {
  const std::string ok = "1\ta\t_\tX\tX\t_\t0\troot\t_\t_\n\n";
  SUBCASE("two roots") {
    try {
      parse_conll(ok + "1\ta\t_\tX\tX\t_\t0\troot\t_\t_\n2\tb\t_\tX\tX\t_\t0\troot\t_\t_\n");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("sentence 2") != std::string::npos);
    }
  }
  SUBCASE("cycle") {
    CHECK_THROWS_AS(parse_conll("1\ta\t_\tX\tX\t_\t2\tx\t_\t_\n2\tb\t_\tX\tX\t_\t1\tx\t_\t_\n3\tc\t_\tX\tX\t_\t0\troot\t_\t_\n"),
                    ValidationError);
  }
  SUBCASE("self head") {
    CHECK_THROWS_AS(parse_conll("1\ta\t_\tX\tX\t_\t1\tx\t_\t_\n2\tb\t_\tX\tX\t_\t0\troot\t_\t_\n"), ValidationError);
  }
  SUBCASE("head out of range") {
    CHECK_THROWS_AS(parse_conll("1\ta\t_\tX\tX\t_\t5\tx\t_\t_\n2\tb\t_\tX\tX\t_\t0\troot\t_\t_\n"), ValidationError);
  }
}

TEST_CASE("raw mode ignores HEAD and DEPREL entirely") {
  auto s = parse_conll("1\ta\t_\tX\tX\t_\t_\t_\t_\t_\n2\tb\t_\tX\tX\t_\t7\tjunk\t_\t_\n", ConllMode::raw);
  REQUIRE(s.size() == 1);
  CHECK(s[0][1].head == 0);
  CHECK(s[0][1].deprel.empty());
}

TEST_CASE("loose mode keeps heads without tree validation") {
  auto s = parse_conll("1\ta\t_\tX\tX\t_\t0\troot\t_\t_\n2\tb\t_\tX\tX\t_\t0\troot\t_\t_\n", ConllMode::loose);
  CHECK(s[0][1].head == 0);
}

TEST_CASE("write/parse round-trip on generated trees") {
  std::mt19937_64 rng(5);
  std::vector<Sentence> corpus;
  for (int i = 0; i < 200; ++i) corpus.push_back(testing::random_sentence(testing::uniform_int(rng, 1, 12), 6, rng));
  auto text = write_conll(corpus);
  CHECK(parse_conll(text) == corpus);
  CHECK(write_conll(parse_conll(text)) == text);
}

TEST_CASE("extra columns pass through, unknown columns are '_'") {
  const std::string line = "1\tmèo\tmeo\tN\tNc\tg=x\t0\troot\t_\t_\n\n";
  CHECK(write_conll(parse_conll(line)) == line);
  auto fig = testing::worked_example_sentence();
  auto text = write_conll({fig});
  CHECK(text.substr(0, text.find('\n')) == "1\tTôi\t_\t_\tP0\t_\t2\tnsubj\t_\t_");
}

TEST_CASE("predictions override gold columns; length mismatch throws") {
  auto fig = testing::worked_example_sentence();
  std::vector<std::vector<HeadLabel>> pred{{{0, "root"}, {1, "a"}, {2, "b"}, {3, "c"}, {4, "d"}}};
  auto back = parse_conll(write_conll({fig}, &pred));
  CHECK(back[0][0].head == 0);
  CHECK(back[0][4].head == 4);
  CHECK(back[0][4].deprel == "d");
  CHECK(back[0][4].form == "mèo");
  pred[0].pop_back();
  CHECK_THROWS_AS(write_conll({fig}, &pred), DataError);
  std::vector<std::vector<HeadLabel>> none;
  CHECK_THROWS_AS(write_conll({fig}, &none), DataError);
}

TEST_CASE("is_projective examples") {
  CHECK(is_projective(std::vector<int>{2, 3, 0}));
  CHECK_FALSE(is_projective(std::vector<int>{3, 4, 0, 3}));
  CHECK(is_projective(testing::worked_example_sentence()));
  CHECK(is_projective(std::vector<int>{0}));
  // Crosses only the root arc.
  CHECK_FALSE(is_projective(std::vector<int>{3, 0, 2}));
}

TEST_CASE("is_projective agrees with the all-pairs check on random trees") {
  std::mt19937_64 rng(17);
  int projective = 0, non_projective = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const int n = testing::uniform_int(rng, 1, 10);
    auto heads = trial % 2 ? testing::random_tree_heads(n, rng) : testing::random_projective_heads(n, rng);
    REQUIRE(is_tree(heads));
    const bool expected = brute_projective(heads);
    CHECK(is_projective(heads) == expected);
    (expected ? projective : non_projective) += 1;
    if (trial % 2 == 0) CHECK(expected);
  }
  CHECK(non_projective > 100);
}

TEST_CASE("split_train_test keeps file order") {
  std::vector<Sentence> five;
  for (int i = 0; i < 5; ++i)
    five.push_back(testing::sentence_from_heads({0}, {"root"}, {"w" + std::to_string(i)}));
  auto split = split_train_test(five, 2);
  REQUIRE(split.train.size() == 3);
  REQUIRE(split.test.size() == 2);
  CHECK(split.train[0][0].form == "w0");
  CHECK(split.train[2][0].form == "w2");
  CHECK(split.test[0][0].form == "w3");
  CHECK(split_train_test(five, 0).train.size() == 5);
  CHECK(split_train_test(five, 5).test.size() == 5);
  CHECK_THROWS_AS(split_train_test(five, 6), ConfigError);

  std::vector<Sentence> big(10200, five[0]);
  auto paper = split_train_test(big, 1020);
  CHECK(paper.train.size() == 9180);
  CHECK(paper.test.size() == 1020);
}

TEST_CASE("file round-trip") {
  auto fig = testing::worked_example_sentence();
  const std::string path = "test_treebank_io_tmp.conll";
  write_conll_file(path, {fig, fig});
  auto back = read_conll_file(path);
  CHECK(back.size() == 2);
  CHECK(back[1] == fig);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_conll_file("/nonexistent/file.conll"), DataError);
}
