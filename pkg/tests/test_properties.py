import random
from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from simplicity.dominance import is_osp, is_strategy_proof, is_weakly_group_sp
from simplicity.foresight import strong_osp
from simplicity.game import Utility
from simplicity.gamedoc import dumps, loads
from simplicity.mechanisms import Mechanism, TradeParams, double_auction
from simplicity.random_games import random_mechanism
from simplicity.strategic import FirstOrderBelief, robust_strategies

SETTINGS = settings(max_examples=40, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])

mechanisms = st.integers(0, 2**32 - 1).map(lambda seed: random_mechanism(random.Random(seed)))
positive = st.fractions(min_value=Fraction(1, 7), max_value=7)


def affine(mech, scale, shift):
    types = tuple(tuple(Utility(u.name, {o: scale * v + shift for o, v in u.payoffs.items()})
                        for u in space) for space in mech.types)
    return Mechanism(mech.tree, types, mech.truthful, mech.name, dict(mech.params))


@SETTINGS
@given(mechanisms)
def test_random_mechanisms_validate(mech):
    assert mech.validate() == []


@SETTINGS
@given(mechanisms)
def test_round_trip_on_random_mechanisms(mech):
    text = dumps(mech)
    back = loads(text)
    assert back == mech and dumps(back) == text


@SETTINGS
@given(mechanisms, positive, st.fractions(min_value=-5, max_value=5))
def test_verdicts_ignore_affine_payoff_changes(mech, scale, shift):
    other = affine(mech, scale, shift)
    for check in (is_strategy_proof, is_osp, is_weakly_group_sp, strong_osp):
        assert check(mech).holds == check(other).holds


@SETTINGS
@given(st.integers(0, 10), st.permutations(range(11)))
def test_robust_set_is_deterministic(cost, order):
    mech = double_auction(TradeParams(prices=range(11), alpha=1, costs=[cost]))
    names = [u.name for u in mech.types[1]]
    w = Fraction(1, len(names))
    b1 = FirstOrderBelief(0, {(n,): w for n in names})
    b2 = FirstOrderBelief(0, {(names[i],): w for i in order})
    name = mech.types[0][0].name
    assert robust_strategies(mech, 0, name, b1)[0] == robust_strategies(mech, 0, name, b2)[0]


@SETTINGS
@given(mechanisms)
def test_failing_verdicts_replay(mech):
    for check in (is_strategy_proof, is_osp, strong_osp):
        v = check(mech)
        if not v.holds:
            assert v.witness.replay(mech)
