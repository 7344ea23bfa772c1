"""Strategic simplicity: undominated strategies, robust replies, verdicts.

Strategies are pure.  A belief of player ``n`` is a finite distribution over
profiles of opponent type names.  A strategy is robust for a type when it
maximizes expected payoff under the belief against every selection that
gives each opponent type one of its undominated strategies.  Chance moves
are averaged out.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, ClassVar, Mapping, Sequence

from .dominance import find_deviation, weakly_dominates
from .game import Budget, Strategy, enumerate_strategies, expected_payoff, rational
from .mechanisms import Mechanism
from .witness import Verdict, Witness, register

SCOPE = "holds on supplied family"


@dataclass(frozen=True)
class FirstOrderBelief:
    """Weights over opponent type-name profiles, opponents in index order."""

    owner: int
    weights: Mapping[tuple[str, ...], Fraction]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "weights",
                           {tuple(k): rational(v) for k, v in self.weights.items()})

    def opponents(self, n_players: int) -> list[int]:
        return [j for j in range(n_players) if j != self.owner]

    def problems(self, mech: Mechanism) -> list[str]:
        out = []
        opps = self.opponents(mech.n_players)
        if not 0 <= self.owner < mech.n_players:
            return [f"belief owner {self.owner} is not a player"]
        if not self.weights:
            out.append("belief has empty support")
        for names, w in self.weights.items():
            if len(names) != len(opps):
                out.append(f"profile {names} should name {len(opps)} opponent types")
                continue
            for j, t in zip(opps, names):
                if t not in {u.name for u in mech.types[j]}:
                    out.append(f"player {j} has no type {t!r}")
            if w <= 0:
                out.append(f"weight of {names} is not positive")
        total = sum(self.weights.values(), Fraction(0))
        if self.weights and total != 1:
            out.append(f"weights sum to {total}")
        return out

    def to_json(self) -> dict[str, Any]:
        return {"owner": self.owner, "name": self.name,
                "weights": [[list(k), str(v)] for k, v in sorted(self.weights.items())]}

    @classmethod
    def from_json(cls, d) -> FirstOrderBelief:
        return cls(d["owner"], {tuple(k): Fraction(v) for k, v in d["weights"]},
                   d.get("name", ""))


def builtin_beliefs(mech: Mechanism, player: int) -> list[FirstOrderBelief]:
    """Every point mass on an opponent type profile, then the uniform belief."""
    opps = [j for j in range(mech.n_players) if j != player]
    profiles = list(itertools.product(*([u.name for u in mech.types[j]] for j in opps)))
    out = [FirstOrderBelief(player, {p: Fraction(1)}, "point:" + ",".join(p))
           for p in profiles]
    if len(profiles) > 1:
        w = Fraction(1, len(profiles))
        out.append(FirstOrderBelief(player, {p: w for p in profiles}, "uniform"))
    return out


def undominated(mech: Mechanism, player: int, type_name: str | None = None,
                budget: Budget | None = None) -> dict[str, list[Strategy]]:
    """Per type, the pure strategies no other pure strategy weakly dominates."""
    budget = budget or Budget()
    strategies = list(enumerate_strategies(mech.tree, player))
    budget.require(len(strategies) ** 2, f"dominance table for player {player}")
    out = {}
    for u in mech.types[player]:
        if type_name is not None and u.name != type_name:
            continue
        out[u.name] = [s for s in strategies
                       if not any(weakly_dominates(mech, player, u, s2, s, budget)
                                  for s2 in strategies if s2 is not s)]
    return out


@dataclass
class _Problem:
    """Everything needed to score own strategies against selections."""

    mech: Mechanism
    player: int
    utility: Any
    belief: FirstOrderBelief
    strategies: list[Strategy]
    # (opponent, type name) -> undominated strategies, only for supported types
    choices: dict[tuple[int, str], list[Strategy]]
    budget: Budget
    cache: dict = field(default_factory=dict)

    @property
    def opponents(self) -> list[int]:
        return self.belief.opponents(self.mech.n_players)

    def value(self, s: int, picks: Sequence[int], names: tuple[str, ...]) -> Fraction:
        key = (s, names, tuple(picks))
        if key not in self.cache:
            self.budget.charge()
            profile = {self.player: self.strategies[s]}
            for j, t, k in zip(self.opponents, names, picks):
                profile[j] = self.choices[(j, t)][k]
            self.cache[key] = expected_payoff(self.mech.tree, profile, self.utility)
        return self.cache[key]

    def score(self, s: int, selection: Mapping[tuple[int, str], int]) -> Fraction:
        total = Fraction(0)
        for names, w in self.belief.weights.items():
            picks = [selection[(j, t)] for j, t in zip(self.opponents, names)]
            total += w * self.value(s, picks, names)
        return total

    def selection_json(self, selection) -> dict[int, dict[str, Strategy]]:
        out: dict[int, dict[str, Strategy]] = {}
        for (j, t), k in sorted(selection.items()):
            out.setdefault(j, {})[t] = self.choices[(j, t)][k]
        return out


def _problem(mech, player, type_name, belief, undom, budget) -> _Problem:
    bad = belief.problems(mech)
    if bad:
        raise ValueError("invalid belief: " + "; ".join(bad))
    if belief.owner != player:
        raise ValueError(f"belief is held by player {belief.owner}, not {player}")
    opps = belief.opponents(mech.n_players)
    choices = {}
    for names in belief.weights:
        for j, t in zip(opps, names):
            if (j, t) not in choices:
                table = undom.get(j) if undom else None
                if table is None or t not in table:
                    table = undominated(mech, j, t, budget)
                choices[(j, t)] = table[t]
    strategies = list(enumerate_strategies(mech.tree, player))
    return _Problem(mech, player, mech.utility(player, type_name), belief, strategies,
                    choices, budget)


def _worst_selection(pb: _Problem, s: int, s2: int, separable: bool | None = None):
    """Selection minimizing the payoff edge of ``s`` over ``s2``.

    With one opponent the objective separates across opponent types, so the
    minimum is taken type by type.  Otherwise selections are enumerated.
    """
    keys = sorted(pb.choices)
    if separable is None:
        separable = len(pb.opponents) == 1
    if separable:
        sel = {}
        for key in keys:
            t = key[1]
            sel[key] = min(range(len(pb.choices[key])),
                           key=lambda k: pb.value(s, [k], (t,)) - pb.value(s2, [k], (t,)))
        return sel, pb.score(s, sel) - pb.score(s2, sel)
    total = 1
    for key in keys:
        total *= len(pb.choices[key])
    pb.budget.require(total, "selection enumeration")
    best = None
    for combo in itertools.product(*(range(len(pb.choices[k])) for k in keys)):
        sel = dict(zip(keys, combo))
        edge = pb.score(s, sel) - pb.score(s2, sel)
        if best is None or edge < best[1]:
            best = (sel, edge)
    return best


@register
@dataclass
class NotRobust(Witness):
    """Against ``selection`` the strategy ``better`` beats ``strategy`` in expectation."""

    kind: ClassVar[str] = "not-robust"
    player: int
    type: str
    strategy: Strategy
    better: Strategy
    belief: FirstOrderBelief
    selection: dict[int, dict[str, Strategy]]
    payoffs: tuple[Fraction, Fraction]

    def expected(self, mech, s: Strategy) -> Fraction:
        u = mech.utility(self.player, self.type)
        opps = self.belief.opponents(mech.n_players)
        total = Fraction(0)
        for names, w in self.belief.weights.items():
            profile = {self.player: s}
            profile.update({j: self.selection[j][t] for j, t in zip(opps, names)})
            total += w * expected_payoff(mech.tree, profile, u)
        return total

    def replay(self, mech, check_undominated: bool = True) -> bool:
        if self.belief.problems(mech):
            return False
        if check_undominated:
            for j, table in self.selection.items():
                for t, s in table.items():
                    if s not in undominated(mech, j, t)[t]:
                        return False
        got = (self.expected(mech, self.strategy), self.expected(mech, self.better))
        return got == tuple(self.payoffs) and got[1] > got[0]

    def to_json(self):
        return {"kind": self.kind, "player": self.player, "type": self.type,
                "strategy": self.strategy, "better": self.better,
                "belief": self.belief.to_json(),
                "selection": {str(j): v for j, v in self.selection.items()},
                "payoffs": [str(x) for x in self.payoffs]}

    @classmethod
    def from_json(cls, d):
        return cls(d["player"], d["type"], d["strategy"], d["better"],
                   FirstOrderBelief.from_json(d["belief"]),
                   {int(j): v for j, v in d["selection"].items()},
                   tuple(Fraction(x) for x in d["payoffs"]))


@register
@dataclass
class NoRobustStrategy(Witness):
    """A refutation for every pure strategy of the type under one belief."""

    kind: ClassVar[str] = "no-robust"
    player: int
    type: str
    refutations: list[NotRobust]

    def replay(self, mech) -> bool:
        strategies = list(enumerate_strategies(mech.tree, self.player))
        covered = [r.strategy for r in self.refutations]
        return (all(s in covered for s in strategies)
                and all(r.player == self.player and r.type == self.type and r.replay(mech)
                        for r in self.refutations))

    def to_json(self):
        return {"kind": self.kind, "player": self.player, "type": self.type,
                "refutations": [r.to_json() for r in self.refutations]}

    @classmethod
    def from_json(cls, d):
        return cls(d["player"], d["type"], [NotRobust.from_json(r) for r in d["refutations"]])


def _refute(pb: _Problem, s: int) -> NotRobust | None:
    for s2 in range(len(pb.strategies)):
        if s2 == s:
            continue
        sel, edge = _worst_selection(pb, s, s2)
        if edge < 0:
            return NotRobust(pb.player, pb.utility.name, pb.strategies[s], pb.strategies[s2],
                             pb.belief, pb.selection_json(sel),
                             (pb.score(s, sel), pb.score(s2, sel)))
    return None


def is_robust(mech: Mechanism, player: int, type_name: str, strategy: Strategy,
              belief: FirstOrderBelief, budget: Budget | None = None,
              undominated_sets: Mapping[int, Mapping[str, list[Strategy]]] | None = None
              ) -> Verdict:
    """``strategy`` is a best reply under ``belief`` to every undominated selection."""
    budget = budget or Budget()
    pb = _problem(mech, player, type_name, belief, undominated_sets, budget)
    try:
        s = pb.strategies.index(dict(strategy))
    except ValueError:
        raise ValueError(f"not a pure strategy of player {player}: {strategy}") from None
    w = _refute(pb, s)
    return Verdict(w is None, w, {"evaluations": budget.used}, "robust")


def robust_strategies(mech: Mechanism, player: int, type_name: str,
                      belief: FirstOrderBelief, budget: Budget | None = None,
                      undominated_sets=None) -> tuple[list[Strategy], list[NotRobust]]:
    """Robust strategies of the type, plus one refutation per rejected strategy."""
    budget = budget or Budget()
    pb = _problem(mech, player, type_name, belief, undominated_sets, budget)
    robust, refuted = [], []
    for s in range(len(pb.strategies)):
        w = _refute(pb, s)
        if w is None:
            robust.append(pb.strategies[s])
        else:
            refuted.append(w)
    return robust, refuted


def is_strategically_simple(mech: Mechanism,
                            beliefs: Mapping[int, Sequence[FirstOrderBelief]] | None = None,
                            budget: Budget | None = None) -> Verdict:
    """Some strategy is robust for every player, type and supplied belief.

    Without ``beliefs`` the built-in family is used.  A truthful strategy
    that is dominant is a best reply to anything, so it settles all beliefs
    of its type without enumerating opponent strategies.
    """
    budget = budget or Budget()
    rows = []
    undom: dict[int, dict[str, list[Strategy]]] = {}
    for p in range(mech.n_players):
        family = list(beliefs[p]) if beliefs is not None and p in beliefs \
            else builtin_beliefs(mech, p)
        if not family:
            raise ValueError(f"empty belief family for player {p}")
        for u in mech.types[p]:
            if mech.has_truthful(p):
                truth = mech.truth(p, u.name)
                if find_deviation(mech, p, u, truth, budget) is None:
                    rows.append({"player": p, "type": u.name, "belief": "*",
                                 "dominant": truth})
                    continue
            for b in family:
                for j in b.opponents(mech.n_players):
                    if j not in undom:
                        undom[j] = undominated(mech, j, budget=budget)
                robust, refuted = robust_strategies(mech, p, u.name, b, budget, undom)
                if not robust:
                    cert = {"scope": SCOPE, "robust": rows, "evaluations": budget.used}
                    return Verdict(False, NoRobustStrategy(p, u.name, refuted), cert,
                                   "strategic")
                rows.append({"player": p, "type": u.name, "belief": b.name, "robust": robust})
    return Verdict(True, None, {"scope": SCOPE, "robust": rows, "evaluations": budget.used},
                   "strategic")
