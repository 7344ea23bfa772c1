"""Verdicts and the counterexamples that back them.

Every witness can be replayed against its mechanism: replaying re-evaluates
the recorded strategies through the game engine and returns True only when
the recorded violating inequality comes out again, exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, ClassVar

from .game import (expected_payoff, payoff_bounds, play, reachable_leaves,
                   strategy_count)

_KINDS: dict[str, type] = {}


def _register(cls):
    _KINDS[cls.kind] = cls
    return cls


def _q(x) -> str:
    return str(x)


def _int_keys(d) -> dict:
    return {int(k): v for k, v in d.items()}


class Witness:
    kind: ClassVar[str] = ""

    def replay(self, mech) -> bool:
        raise NotImplementedError

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


def witness_from_json(data: dict[str, Any]) -> Witness:
    return _KINDS[data["kind"]].from_json(data)


@dataclass
class Verdict:
    holds: bool
    witness: Witness | None = None
    certificate: dict[str, Any] = field(default_factory=dict)
    criterion: str = ""

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict[str, Any]:
        return {
            "criterion": self.criterion,
            "holds": self.holds,
            "witness": self.witness.to_json() if self.witness else None,
            "certificate": self.certificate,
        }


@_register
@dataclass
class Deviation(Witness):
    """Against ``profile`` and ``chance``, ``deviation`` pays strictly more than ``strategy``."""

    kind: ClassVar[str] = "deviation"
    player: int
    type: str
    strategy: dict[str, str]
    deviation: dict[str, str]
    profile: dict[int, dict[str, str]]
    chance: dict[int, str]
    payoffs: tuple[Fraction, Fraction]

    def replay(self, mech) -> bool:
        tree = mech.tree
        u = mech.utility(self.player, self.type)
        got = []
        for s in (self.strategy, self.deviation):
            leaf = play(tree, {**self.profile, self.player: s}, self.chance)
            got.append(u(tree.nodes[leaf].outcome))
        return tuple(got) == tuple(self.payoffs) and got[1] > got[0]

    def to_json(self):
        return {"kind": self.kind, "player": self.player, "type": self.type,
                "strategy": self.strategy, "deviation": self.deviation,
                "profile": {str(k): v for k, v in self.profile.items()},
                "chance": {str(k): v for k, v in self.chance.items()},
                "payoffs": [_q(x) for x in self.payoffs]}

    @classmethod
    def from_json(cls, d):
        return cls(d["player"], d["type"], d["strategy"], d["deviation"],
                   _int_keys(d["profile"]), _int_keys(d["chance"]),
                   tuple(Fraction(x) for x in d["payoffs"]))


@_register
@dataclass
class ObviousViolation(Witness):
    """At ``infoset`` the worst case of ``plan`` is below the best case of ``deviation``.

    Own information sets on which a plan is undefined count as free moves,
    so the same record covers obvious dominance and foresight-limited plans.
    """

    kind: ClassVar[str] = "obvious"
    player: int
    type: str
    infoset: str
    plan: dict[str, str]
    deviation: dict[str, str]
    worst: Fraction
    best: Fraction
    worst_leaf: int
    best_leaf: int
    foresight: str = "full"

    def replay(self, mech) -> bool:
        tree = mech.tree
        u = mech.utility(self.player, self.type)
        if self.plan.get(self.infoset) == self.deviation.get(self.infoset):
            return False
        lo, _ = payoff_bounds(tree, self.player, u, self.infoset, self.plan)
        _, hi = payoff_bounds(tree, self.player, u, self.infoset, self.deviation)
        nodes = tree.infosets[self.infoset].nodes
        if self.worst_leaf not in set(reachable_leaves(tree, nodes, {self.player: self.plan})):
            return False
        if self.best_leaf not in set(reachable_leaves(tree, nodes, {self.player: self.deviation})):
            return False
        return (lo == self.worst == u(tree.nodes[self.worst_leaf].outcome)
                and hi == self.best == u(tree.nodes[self.best_leaf].outcome)
                and lo < hi)

    def to_json(self):
        return {"kind": self.kind, "player": self.player, "type": self.type,
                "infoset": self.infoset, "plan": self.plan, "deviation": self.deviation,
                "worst": _q(self.worst), "best": _q(self.best),
                "worst_leaf": self.worst_leaf, "best_leaf": self.best_leaf,
                "foresight": self.foresight}

    @classmethod
    def from_json(cls, d):
        return cls(d["player"], d["type"], d["infoset"], d["plan"], d["deviation"],
                   Fraction(d["worst"]), Fraction(d["best"]), d["worst_leaf"],
                   d["best_leaf"], d.get("foresight", "full"))


@_register
@dataclass
class CoalitionDeviation(Witness):
    """Every member of ``coalition`` strictly gains; outsiders play truthfully."""

    kind: ClassVar[str] = "coalition"
    coalition: tuple[int, ...]
    types: tuple[str, ...]
    deviation: dict[int, dict[str, str]]
    chance: dict[int, str]
    truthful_payoffs: dict[int, Fraction]
    deviation_payoffs: dict[int, Fraction]
    mode: str = "realized"

    def replay(self, mech) -> bool:
        tree = mech.tree
        truth = {p: mech.truth(p, t) for p, t in enumerate(self.types)}
        dev = {**truth, **self.deviation}
        for i in self.coalition:
            u = mech.utility(i, self.types[i])
            if self.mode == "expected":
                a = expected_payoff(tree, truth, u)
                b = expected_payoff(tree, dev, u)
            else:
                a = u(tree.nodes[play(tree, truth, self.chance)].outcome)
                b = u(tree.nodes[play(tree, dev, self.chance)].outcome)
            if (a, b) != (self.truthful_payoffs[i], self.deviation_payoffs[i]) or not b > a:
                return False
        return True

    def to_json(self):
        return {"kind": self.kind, "coalition": list(self.coalition),
                "types": list(self.types),
                "deviation": {str(k): v for k, v in self.deviation.items()},
                "chance": {str(k): v for k, v in self.chance.items()},
                "truthful_payoffs": {str(k): _q(v) for k, v in self.truthful_payoffs.items()},
                "deviation_payoffs": {str(k): _q(v) for k, v in self.deviation_payoffs.items()},
                "mode": self.mode}

    @classmethod
    def from_json(cls, d):
        return cls(tuple(d["coalition"]), tuple(d["types"]), _int_keys(d["deviation"]),
                   _int_keys(d["chance"]),
                   {int(k): Fraction(v) for k, v in d["truthful_payoffs"].items()},
                   {int(k): Fraction(v) for k, v in d["deviation_payoffs"].items()},
                   d.get("mode", "realized"))


@_register
@dataclass
class NoDominantStrategy(Witness):
    """One profitable deviation against each of the type's pure strategies."""

    kind: ClassVar[str] = "no-dominant"
    player: int
    type: str
    refutations: list[Deviation]

    def replay(self, mech) -> bool:
        seen = {tuple(sorted(r.strategy.items())) for r in self.refutations}
        return (len(seen) == len(self.refutations) == strategy_count(mech.tree, self.player)
                and all(r.player == self.player and r.type == self.type and r.replay(mech)
                        for r in self.refutations))

    def to_json(self):
        return {"kind": self.kind, "player": self.player, "type": self.type,
                "refutations": [r.to_json() for r in self.refutations]}

    @classmethod
    def from_json(cls, d):
        return cls(d["player"], d["type"], [Deviation.from_json(r) for r in d["refutations"]])


def register(cls):
    """Make a witness class known to :func:`witness_from_json`."""
    return _register(cls)
