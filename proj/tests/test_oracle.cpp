#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <set>

#include "efdp/oracle.hpp"
#include "support/synthetic.hpp"

using namespace efdp;

namespace {

enum : int { kNsubj = 0, kRoot = 1, kDet = 2, kNmod = 3, kDobj = 4 };

OracleState worked_example_oracle() { return OracleState({2, 0, 5, 5, 2}, {kNsubj, kRoot, kDet, kNmod, kDobj}); }

ParseState fresh(std::size_t n, std::size_t R) {
  ParseState s;
  s.pending = init_pending(n);
  s.relation_count = R;
  return s;
}

Action act(std::size_t pos, Direction d, int rel) { return Action{pos, d, rel, 0.0}; }

void step(ParseState& s, OracleState& o, const Action& a) { o.on_attach(apply_action(s, a)); }

// Looks up the score tensor by action identity on a throwaway tape.
class ConstantScorer : public ActionScorer {
 public:
  explicit ConstantScorer(Tape& t) : tape_(&t) {}
  std::vector<Action> score(const ParseState&) override { return {}; }
  std::optional<Tensor> score_tensor(const Action& a) override { return tape_->scalar(a.score); }

 private:
  Tape* tape_;
};

double brute_hinge(const std::vector<double>& s, const std::vector<bool>& valid) {
  double g = -std::numeric_limits<double>::infinity(), a = g;
  bool any_invalid = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (valid[k])
      g = std::max(g, s[k]);
    else {
      a = std::max(a, s[k]);
      any_invalid = true;
    }
  }
  if (!any_invalid) return 0.0;
  return std::max(0.0, 1.0 - g + a);
}

}  // namespace

TEST_CASE("worked-example initial-state validity") {
  auto o = worked_example_oracle();
  auto s = fresh(5, 5);
  CHECK(o.is_valid(act(4, Direction::left, kNmod), s));
  CHECK_FALSE(o.is_valid(act(4, Direction::left, kDet), s));
  CHECK_FALSE(o.is_valid(act(1, Direction::right, kNsubj), s));
  CHECK(o.is_valid(act(1, Direction::left, kNsubj), s));
  CHECK_FALSE(o.is_valid(act(2, Direction::right, kDobj), s));  // mèo still has children
  CHECK_FALSE(o.is_valid(act(3, Direction::left, kDet), s));    // head of một is mèo, not con
  CHECK_FALSE(o.is_valid(act(9, Direction::left, kDet), s));

  auto mask = o.valid_mask(enumerate_actions(5, 5), s);
  CHECK(std::count(mask.begin(), mask.end(), true) == 2);
}

TEST_CASE("modifier becomes attachable once its gold children are gone") {
  auto o = worked_example_oracle();
  auto s = fresh(5, 5);
  CHECK(o.remaining_children(5) == 2);
  step(s, o, act(4, Direction::left, kNmod));
  step(s, o, act(3, Direction::left, kDet));
  CHECK(o.is_complete(5));
  CHECK_FALSE(o.in_pending(4));
  CHECK(o.is_valid(act(2, Direction::right, kDobj), s));
}

TEST_CASE("modifier whose gold head was removed may attach elsewhere") {
  auto o = worked_example_oracle();
  auto s = fresh(5, 5);
  step(s, o, act(4, Direction::left, kNmod));
  step(s, o, act(3, Direction::left, kDet));
  // Mistake: có becomes a child of mèo. Pending is now [Tôi, mèo].
  step(s, o, act(2, Direction::left, kDobj));
  CHECK_FALSE(o.in_pending(2));
  CHECK(o.is_valid(act(1, Direction::left, kNsubj), s));   // Tôi -> mèo
  CHECK(o.is_valid(act(1, Direction::right, kDobj), s));   // mèo -> Tôi
  CHECK_FALSE(o.is_valid(act(1, Direction::left, kDet), s));
}

TEST_CASE("the root is never treated as removed") {
  OracleState o({0, 1}, {0, 1});
  auto s = fresh(2, 2);
  CHECK(o.is_valid(act(1, Direction::right, 1), s));
  CHECK_FALSE(o.is_valid(act(1, Direction::left, 0), s));  // token 1 still has a pending child
}

TEST_CASE("hinge loss examples") {
  std::vector<double> s = {3.0, 1.5};
  CHECK(hinge_value(s, {true, false}) == 0.0);
  s = {1.0, 1.0};
  CHECK(hinge_value(s, {true, false}) == 1.0);
  s = {0.2, 0.9, 0.4};
  CHECK(hinge_value(s, {true, false, true}) == doctest::Approx(1.5));
  CHECK(hinge_value(s, {true, true, true}) == 0.0);
  CHECK_THROWS_AS(hinge_value(s, {false, false, false}), std::logic_error);
}

TEST_CASE("hinge selection picks the first maximum of each class") {
  std::vector<Action> a(4);
  a[0].score = 1.0;
  a[1].score = 2.0;
  a[2].score = 2.0;
  a[3].score = 1.0;
  auto c = hinge_select(a, {true, false, false, true});
  CHECK(*c.best_valid == 0u);
  CHECK(*c.best_invalid == 1u);
  CHECK(c.loss == 2.0);
}

TEST_CASE("hinge value equals brute force on random configurations") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = static_cast<std::size_t>(testing::uniform_int(rng, 1, 30));
    std::vector<double> s(n);
    std::vector<bool> v(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = trial % 3 == 0 ? std::round(u(rng)) : u(rng);
      v[k] = testing::uniform_int(rng, 0, 2) == 0;
    }
    v[static_cast<std::size_t>(testing::uniform_int(rng, 0, int(n) - 1))] = true;
    CHECK(hinge_value(s, v) == brute_hinge(s, v));
  }
}

TEST_CASE("hinge loss tensor matches the value and is absent at zero") {
  Tape t;
  ConstantScorer scorer(t);
  std::vector<Action> a(3);
  a[0].score = 0.5;
  a[1].score = 0.9;
  a[2].score = -1.0;
  auto loss = hinge_loss(a, {true, false, false}, scorer);
  REQUIRE(loss.has_value());
  CHECK(loss->scalar() == doctest::Approx(1.4));
  a[0].score = 5.0;
  CHECK_FALSE(hinge_loss(a, {true, false, false}, scorer).has_value());
}

TEST_CASE("following random valid actions rebuilds any projective gold tree") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = testing::uniform_int(rng, 1, 10);
    const std::size_t R = static_cast<std::size_t>(testing::uniform_int(rng, 1, 5));
    auto heads = testing::random_projective_heads(n, rng);
    std::vector<int> rels(heads.size());
    for (auto& r : rels) r = testing::uniform_int(rng, 0, int(R) - 1);
    OracleState o(heads, rels);
    auto s = fresh(heads.size(), R);
    while (s.pending.size() > 1) {
      auto actions = enumerate_actions(s.pending.size(), R);
      auto mask = o.valid_mask(actions, s);
      std::vector<std::size_t> valid;
      for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) valid.push_back(k);
      REQUIRE_FALSE(valid.empty());
      const auto& a = actions[valid[static_cast<std::size_t>(testing::uniform_int(rng, 0, int(valid.size()) - 1))]];
      auto arc = apply_action(s, a);
      // Without mistakes no gold head is ever removed early, so each arc is gold.
      CHECK(arc.head == heads[static_cast<std::size_t>(arc.dependent - 1)]);
      CHECK(arc.relation == rels[static_cast<std::size_t>(arc.dependent - 1)]);
      o.on_attach(arc);
    }
    const int root = s.pending.front().head_index;
    CHECK(heads[static_cast<std::size_t>(root - 1)] == 0);
    std::set<std::pair<int, int>> got, want;
    for (const auto& a : s.arcs) got.insert({a.dependent, a.head});
    got.insert({root, 0});
    for (std::size_t i = 0; i < heads.size(); ++i) want.insert({int(i) + 1, heads[i]});
    CHECK(got == want);
  }
}

TEST_CASE("after random mistakes a valid action always remains") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = testing::uniform_int(rng, 2, 10);
    auto heads = testing::random_projective_heads(n, rng);
    std::vector<int> rels(heads.size(), 0);
    OracleState o(heads, rels);
    auto s = fresh(heads.size(), 1);
    while (s.pending.size() > 1) {
      auto actions = enumerate_actions(s.pending.size(), 1);
      auto mask = o.valid_mask(actions, s);
      CHECK(std::find(mask.begin(), mask.end(), true) != mask.end());
      const auto k = static_cast<std::size_t>(testing::uniform_int(rng, 0, int(actions.size()) - 1));
      // Sound: a valid arc without an early-removed gold head is a gold arc.
      if (mask[k]) {
        const bool left = actions[k].direction == Direction::left;
        const int mod = s.pending[left ? actions[k].position - 1 : actions[k].position].head_index;
        const int head = s.pending[left ? actions[k].position : actions[k].position - 1].head_index;
        if (o.in_pending(o.gold_head(mod)) || o.gold_head(mod) == 0) CHECK(head == o.gold_head(mod));
      }
      o.on_attach(apply_action(s, actions[k]));
    }
  }
}

TEST_CASE("oracle rejects mismatched inputs") {
  CHECK_THROWS_AS(OracleState({0, 1}, {0}), std::invalid_argument);
}
