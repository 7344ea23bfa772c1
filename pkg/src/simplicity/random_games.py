"""Random small mechanisms for property tests.

Information sets are formed by merging nodes of one player that share the
player's own history and action count, so perfect recall holds by
construction.  Truthful maps are either arbitrary or a cautious greedy
choice, which keeps a healthy share of instances obviously dominant.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .game import Decision, Terminal, TreeBuilder, Utility, children
from .mechanisms import Mechanism


@dataclass
class _Spec:
    kind: str  # "decision", "chance" or "terminal"
    player: int = 0
    label: str = ""
    weights: list[int] = field(default_factory=list)
    kids: list["_Spec"] = field(default_factory=list)
    infoset: str = ""


def _grow(rng: random.Random, n_players: int, depth: int, max_depth: int,
          max_branch: int, n_outcomes: int, p_chance: float) -> _Spec:
    stop = depth >= max_depth or (depth > 0 and rng.random() < 0.2 + 0.15 * depth)
    if stop:
        return _Spec("terminal", label=f"o{rng.randrange(n_outcomes)}")
    width = rng.randint(2, max_branch)
    kids = [_grow(rng, n_players, depth + 1, max_depth, max_branch, n_outcomes, p_chance)
            for _ in range(width)]
    if rng.random() < p_chance:
        return _Spec("chance", weights=[rng.randint(1, 3) for _ in kids], kids=kids)
    return _Spec("decision", player=rng.randrange(n_players), kids=kids)


def _assign_infosets(rng: random.Random, root: _Spec, n_players: int) -> None:
    pools: dict[tuple, list[str]] = {}
    counter = [0]

    def visit(spec: _Spec, exp: tuple) -> None:
        if spec.kind == "terminal":
            return
        if spec.kind == "decision":
            key = (spec.player, exp[spec.player], len(spec.kids))
            pool = pools.setdefault(key, [])
            if pool and rng.random() < 0.6:
                spec.infoset = rng.choice(pool)
            else:
                spec.infoset = f"p{spec.player}i{counter[0]}"
                counter[0] += 1
                pool.append(spec.infoset)
        for k, kid in enumerate(spec.kids):
            if spec.kind == "decision":
                mine = exp[spec.player] + ((spec.infoset, k),)
                visit(kid, exp[:spec.player] + (mine,) + exp[spec.player + 1:])
            else:
                visit(kid, exp)

    visit(root, tuple(() for _ in range(n_players)))


def _build(spec: _Spec, b: TreeBuilder) -> int:
    if spec.kind == "terminal":
        return b.terminal(spec.label)
    kids = [_build(k, b) for k in spec.kids]
    if spec.kind == "chance":
        total = sum(spec.weights)
        return b.chance([(f"c{k}", Fraction(w, total), c)
                         for k, (w, c) in enumerate(zip(spec.weights, kids))])
    return b.decision(spec.player, spec.infoset, [(f"a{k}", c) for k, c in enumerate(kids)])


def _cautious(tree, player: int, u: Utility) -> dict[str, str]:
    """At each own infoset, the action with the best worst case below it."""
    def worst(n: int) -> Fraction:
        node = tree.nodes[n]
        if isinstance(node, Terminal):
            return u(node.outcome)
        return min(worst(c) for c in children(node))

    out = {}
    for info in tree.infosets_of(player):
        out[info.id] = max(info.actions, key=lambda a: (
            min(worst(tree.nodes[n].child(a)) for n in info.nodes), a))
    return out


def random_mechanism(rng: random.Random, max_players: int = 3, max_depth: int = 4,
                     max_branch: int = 3, max_types: int = 4, n_outcomes: int = 5,
                     p_chance: float = 0.15) -> Mechanism:
    """A valid random mechanism within the given size limits."""
    n_players = rng.randint(1, max_players)
    while True:
        spec = _grow(rng, n_players, 0, max_depth, max_branch, n_outcomes, p_chance)
        if spec.kind != "terminal":
            break
    _assign_infosets(rng, spec, n_players)
    b = TreeBuilder()
    tree = b.build(_build(spec, b), n_players)
    outcomes = tree.outcomes
    types, truthful = [], []
    for p in range(n_players):
        space = []
        for t in range(rng.randint(1, max_types)):
            if rng.random() < 0.1:
                pay = {o: Fraction(0) for o in outcomes}
            else:
                pay = {o: Fraction(rng.randint(-2, 3)) for o in outcomes}
            space.append(Utility(f"t{t}", pay))
        table = {}
        for u in space:
            if rng.random() < 0.3:
                table[u.name] = {i.id: rng.choice(i.actions) for i in tree.infosets_of(p)}
            else:
                table[u.name] = _cautious(tree, p, u)
        types.append(tuple(space))
        truthful.append(table)
    assert not [d for d in tree.nodes.values() if isinstance(d, Decision) and not d.moves]
    return Mechanism(tree, tuple(types), tuple(truthful), "random", {})
