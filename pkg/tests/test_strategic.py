from fractions import Fraction

import pytest

from simplicity.dominance import dominant_strategies, is_strategy_proof, weakly_dominates
from simplicity.game import Budget, TreeBuilder, Utility
from simplicity.mechanisms import (AuctionParams, Mechanism, TradeParams, double_auction,
                                   dynamic_rp, second_price)
from simplicity.strategic import (SCOPE, FirstOrderBelief, NoRobustStrategy, NotRobust,
                                  _problem, _worst_selection, builtin_beliefs, is_robust,
                                  is_strategically_simple, robust_strategies, undominated)
from simplicity.witness import witness_from_json

from . import oracles


def take_it(**kw):
    return double_auction(TradeParams(prices=range(11), alpha=1, **kw))


def uniform(mech, owner):
    opps = [j for j in range(mech.n_players) if j != owner]
    (j,) = opps
    names = [u.name for u in mech.types[j]]
    return FirstOrderBelief(owner, {(n,): Fraction(1, len(names)) for n in names}, "uniform")


def test_undominated_buyer_offer():
    mech = take_it()
    assert undominated(mech, 1, "V=11/2") == {"V=11/2": [{"buyer": "5"}]}


def test_undominated_contains_dominant():
    mech = second_price(AuctionParams(2))
    und = undominated(mech, 0, "v=2")["v=2"]
    assert {"bid:0": "2"} in und


def test_indifferent_type_has_everything_undominated():
    mech = second_price(AuctionParams(2))
    flat = Utility("flat", {o: Fraction(0) for o in mech.tree.outcomes})
    mech = Mechanism(mech.tree, ((flat,), mech.types[1]), (None, mech.truthful[1]))
    assert len(undominated(mech, 0)["flat"]) == 5


def test_seller_robust_offers_match_formula():
    mech = take_it(costs=[2])
    belief = uniform(mech, 0)
    robust, refuted = robust_strategies(mech, 0, "C=2", belief)
    want, value = oracles.seller_argmax(Fraction(2), [Fraction(p) for p in range(11)],
                                        [Fraction(2 * k + 1, 2) for k in range(11)])
    assert [Fraction(s["seller"]) for s in robust] == want == [6, 7]
    assert value == Fraction(20, 11)
    assert is_robust(mech, 0, "C=2", {"seller": "6"}, belief).holds
    v = is_robust(mech, 0, "C=2", {"seller": "5"}, belief)
    assert not v.holds and v.witness.replay(mech)
    assert all(w.replay(mech) for w in refuted)


def test_buyer_top_offer_is_robust():
    mech = take_it()
    for belief in builtin_beliefs(mech, 1):
        assert is_robust(mech, 1, "V=11/2", {"buyer": "5"}, belief).holds


def test_half_alpha_seller_has_no_robust_offer_under_uniform():
    mech = double_auction(TradeParams())
    belief = uniform(mech, 0)
    for u in mech.types[0][:3]:
        robust, refuted = robust_strategies(mech, 0, u.name, belief)
        assert robust == []
        w = NoRobustStrategy(0, u.name, refuted)
        assert w.replay(mech)


def test_strategic_simplicity_verdicts():
    one = double_auction(TradeParams(alpha=1))
    v = is_strategically_simple(one)
    assert v.holds and v.certificate["scope"] == SCOPE
    half = double_auction(TradeParams())
    v = is_strategically_simple(half)
    assert not v.holds and isinstance(v.witness, NoRobustStrategy)
    assert v.witness.replay(half)
    assert witness_from_json(v.witness.to_json()) == v.witness


@pytest.mark.parametrize("mech", [second_price(AuctionParams(2, values=range(3))),
                                  dynamic_rp(2, 2)], ids=lambda m: m.name)
def test_strategy_proof_mechanisms_are_strategically_simple(mech):
    assert is_strategy_proof(mech).holds
    assert is_strategically_simple(mech).holds


def test_sp_shortcut_agrees_with_enumeration():
    mech = second_price(AuctionParams(2, values=range(3)))
    und = {j: undominated(mech, j) for j in range(2)}
    for b in builtin_beliefs(mech, 0):
        for u in mech.types[0]:
            robust, _ = robust_strategies(mech, 0, u.name, b, undominated_sets=und)
            assert mech.truth(0, u.name) in robust


def test_dominant_robust_and_undominated_chain():
    """Dominant strategies are robust, and a nonempty robust set always
    contains an undominated strategy.  Robust strategies themselves can be
    dominated: see the high-cost seller below."""
    for mech in [take_it(), double_auction(TradeParams()), second_price(AuctionParams(2, values=range(3)))]:
        for p in range(mech.n_players):
            und = undominated(mech, p)
            for u in mech.types[p]:
                dom = dominant_strategies(mech, p, u)
                for b in builtin_beliefs(mech, p)[:3]:
                    robust, _ = robust_strategies(mech, p, u.name, b)
                    assert all(d in robust for d in dom)
                    if robust:
                        assert any(s in und[u.name] for s in robust)


def test_robust_but_dominated_example():
    mech = take_it(costs=[Fraction(21, 2)])
    belief = FirstOrderBelief(0, {("V=1/2",): Fraction(1)})
    robust, _ = robust_strategies(mech, 0, "C=21/2", belief)
    assert {"seller": "1"} in robust
    assert weakly_dominates(mech, 0, mech.utility(0, "C=21/2"), {"seller": "10"},
                            {"seller": "1"})


def test_robust_is_deterministic():
    mech = take_it(costs=[2])
    b1 = uniform(mech, 0)
    b2 = FirstOrderBelief(0, dict(reversed(list(b1.weights.items()))), "again")
    assert robust_strategies(mech, 0, "C=2", b1)[0] == robust_strategies(mech, 0, "C=2", b2)[0]


def test_belief_validation():
    mech = take_it()
    assert FirstOrderBelief(0, {("V=1/2",): Fraction(1, 2)}).problems(mech)
    assert FirstOrderBelief(0, {("V=99",): Fraction(1)}).problems(mech)
    assert FirstOrderBelief(0, {("V=1/2", "x"): Fraction(1)}).problems(mech)
    assert FirstOrderBelief(0, {}).problems(mech)
    with pytest.raises(ValueError):
        robust_strategies(mech, 0, "C=1/2", FirstOrderBelief(0, {("V=99",): Fraction(1)}))
    with pytest.raises(ValueError):
        robust_strategies(mech, 0, "C=1/2", FirstOrderBelief(1, {("C=1/2",): Fraction(1)}))


def test_builtin_family_shape():
    mech = take_it()
    fam = builtin_beliefs(mech, 0)
    assert len(fam) == 12 and fam[-1].name == "uniform"
    assert all(not b.problems(mech) for b in fam)


def test_belief_json_round_trip():
    b = FirstOrderBelief(0, {("V=1/2",): Fraction(1, 3), ("V=3/2",): Fraction(2, 3)}, "x")
    assert FirstOrderBelief.from_json(b.to_json()) == b


def three_player_game():
    """Player 0 guesses; players 1 and 2 each pick a bit, payoff-free for them."""
    b = TreeBuilder()

    def p2(prefix):
        return b.decision(2, "z", [(c, b.terminal(prefix + c)) for c in "01"])

    def p1(prefix):
        return b.decision(1, "y", [(c, p2(prefix + c)) for c in "01"])

    tree = b.build(b.decision(0, "x", [(c, p1(c)) for c in "01"]), 3)
    labels = tree.outcomes
    u0 = Utility("u", {o: Fraction(int(o[0] == o[1]) + int(o[0] == o[2])) for o in labels})
    zero = Utility("u", {o: Fraction(0) for o in labels})
    return Mechanism(tree, ((u0,), (zero,), (zero,)), (None, None, None), "guess")


def test_separable_and_enumerated_minima_agree():
    mech = three_player_game()
    belief = FirstOrderBelief(0, {("u", "u"): Fraction(1)})
    robust, _ = robust_strategies(mech, 0, "u", belief)
    assert robust == []
    pb = _problem(mech, 0, "u", belief, None, Budget())
    sel, edge = _worst_selection(pb, 0, 1)
    assert edge < 0 and len(sel) == 2
    half = double_auction(TradeParams(prices=range(5)))
    pb = _problem(half, 0, "C=3/2", uniform(half, 0), None, Budget())
    for s in range(len(pb.strategies)):
        for s2 in range(len(pb.strategies)):
            assert _worst_selection(pb, s, s2)[1] == _worst_selection(pb, s, s2, False)[1]


def test_not_robust_json():
    mech = take_it(costs=[2])
    w = is_robust(mech, 0, "C=2", {"seller": "0"}, uniform(mech, 0)).witness
    assert isinstance(w, NotRobust)
    assert witness_from_json(w.to_json()) == w and w.replay(mech)
