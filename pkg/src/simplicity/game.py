"""Finite extensive-form games with exact rational payoffs.

A :class:`GameTree` is a table of nodes keyed by integer id.  Decision nodes
carry a player and an information-set id, chance nodes carry rational
probabilities, and terminal nodes carry an outcome label.  Payoffs live
outside the tree, in :class:`Utility` objects that map outcome labels to
rationals, so a single tree can be evaluated for many type profiles.

Strategies are plain dicts mapping information-set ids to action labels.
A profile maps player index to strategy; a chance policy maps chance-node
ids to edge labels.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping, NamedTuple, Sequence, Union

DEFAULT_BUDGET = 10**7
DEFAULT_STRATEGY_CAP = 10**7
BUDGET_ENV = "SIMPLICITY_BUDGET"

Strategy = Mapping[str, str]
Profile = Mapping[int, Strategy]


class GameError(Exception):
    """Base class for errors raised while evaluating games."""


class MalformedStrategyError(GameError):
    """A strategy, plan or chance policy is missing or illegal where needed."""


class SizeLimitError(GameError):
    """An enumeration exceeded its configured cap or evaluation budget."""


def default_budget() -> int:
    value = os.environ.get(BUDGET_ENV)
    return int(value) if value else DEFAULT_BUDGET


class Budget:
    """Counts payoff evaluations and fails loudly past ``limit``."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int | None = None):
        self.limit = default_budget() if limit is None else int(limit)
        self.used = 0

    def charge(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise SizeLimitError(
                f"evaluation budget of {self.limit} exceeded")

    def require(self, n: int, what: str) -> None:
        """Refuse up front when ``n`` more evaluations cannot fit."""
        if self.used + n > self.limit:
            raise SizeLimitError(
                f"{what} needs {n} evaluations; budget is {self.limit} "
                f"with {self.used} used")


def rational(x) -> Fraction:
    """Exact conversion; floats are refused."""
    if isinstance(x, bool):
        raise TypeError("booleans are not payoffs")
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass an int, Fraction or 'p/q' string")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


@dataclass(frozen=True)
class Decision:
    player: int
    infoset: str
    moves: tuple[tuple[str, int], ...]

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.moves)

    def child(self, action: str) -> int:
        for a, c in self.moves:
            if a == action:
                return c
        raise MalformedStrategyError(
            f"action {action!r} is not available at infoset {self.infoset!r}")


@dataclass(frozen=True)
class Chance:
    moves: tuple[tuple[str, Fraction, int], ...]

    def child(self, edge: str) -> int:
        for e, _, c in self.moves:
            if e == edge:
                return c
        raise MalformedStrategyError(f"no chance edge {edge!r}")


@dataclass(frozen=True)
class Terminal:
    outcome: str


Node = Union[Decision, Chance, Terminal]


def children(node: Node) -> list[int]:
    if isinstance(node, Decision):
        return [c for _, c in node.moves]
    if isinstance(node, Chance):
        return [c for _, _, c in node.moves]
    return []


@dataclass(frozen=True)
class Infoset:
    id: str
    player: int
    actions: tuple[str, ...]
    nodes: tuple[int, ...]


@dataclass(frozen=True)
class Utility:
    """A type: payoffs over outcome labels."""

    name: str
    payoffs: Mapping[str, Fraction]

    def __call__(self, outcome: str) -> Fraction:
        return self.payoffs[outcome]

    def scaled(self, factor) -> Utility:
        factor = rational(factor)
        return Utility(self.name, {k: v * factor for k, v in self.payoffs.items()})


class Violation(NamedTuple):
    subject: str
    message: str
    node: int | None = None
    infoset: str | None = None

    def __str__(self) -> str:
        return f"{self.subject}: {self.message}"


@dataclass(frozen=True)
class GameTree:
    nodes: Mapping[int, Node]
    root: int = 0
    n_players: int = 1
    player_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.player_names:
            object.__setattr__(
                self, "player_names", tuple(f"p{i}" for i in range(self.n_players)))

    def __getitem__(self, node_id: int) -> Node:
        return self.nodes[node_id]

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        """Node ids reachable from the root, parents before children."""
        order, seen, stack = [], set(), [self.root]
        while stack:
            n = stack.pop()
            if n in seen or n not in self.nodes:
                continue
            seen.add(n)
            order.append(n)
            stack.extend(reversed(children(self.nodes[n])))
        return tuple(order)

    @cached_property
    def parent(self) -> dict[int, int]:
        out = {}
        for n, node in self.nodes.items():
            for c in children(node):
                out.setdefault(c, n)
        return out

    @cached_property
    def infosets(self) -> dict[str, Infoset]:
        members: dict[str, list[int]] = {}
        for n in self.preorder:
            node = self.nodes[n]
            if isinstance(node, Decision):
                members.setdefault(node.infoset, []).append(n)
        out = {}
        for key, ns in members.items():
            first = self.nodes[ns[0]]
            out[key] = Infoset(key, first.player, first.actions, tuple(ns))
        return out

    def infosets_of(self, player: int) -> list[Infoset]:
        return [i for i in self.infosets.values() if i.player == player]

    @cached_property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(sorted({n.outcome for n in self.nodes.values()
                             if isinstance(n, Terminal)}))

    @cached_property
    def has_chance(self) -> bool:
        return any(isinstance(n, Chance) for n in self.nodes.values())

    def path(self, node_id: int) -> list[int]:
        """Node ids from the root down to ``node_id``."""
        out = [node_id]
        while out[-1] != self.root:
            out.append(self.parent[out[-1]])
        return out[::-1]

    def path_choices(self, node_id: int) -> list[tuple[int, str]]:
        """``(node, label)`` pairs taken along the root path to ``node_id``."""
        nodes = self.path(node_id)
        out = []
        for a, b in zip(nodes, nodes[1:]):
            node = self.nodes[a]
            if isinstance(node, Decision):
                label = next(x for x, c in node.moves if c == b)
            else:
                label = next(e for e, _, c in node.moves if c == b)
            out.append((a, label))
        return out

    def experience(self, node_id: int, player: int) -> tuple[tuple[str, str], ...]:
        """The player's own (infoset, action) sequence before ``node_id``."""
        out = []
        for n, label in self.path_choices(node_id):
            node = self.nodes[n]
            if isinstance(node, Decision) and node.player == player:
                out.append((node.infoset, label))
        return tuple(out)


class TreeBuilder:
    """Bottom-up construction; :meth:`build` renumbers nodes in preorder."""

    def __init__(self):
        self._nodes: list[Node] = []

    def _add(self, node: Node) -> int:
        self._nodes.append(node)
        return len(self._nodes) - 1

    def terminal(self, outcome: str) -> int:
        return self._add(Terminal(outcome))

    def decision(self, player: int, infoset: str,
                 moves: Sequence[tuple[str, int]]) -> int:
        return self._add(Decision(player, infoset, tuple(moves)))

    def chance(self, moves: Sequence[tuple[str, object, int]]) -> int:
        return self._add(Chance(tuple((e, rational(p), c) for e, p, c in moves)))

    def build(self, root: int, n_players: int,
              player_names: Sequence[str] = ()) -> GameTree:
        order, stack = [], [root]
        while stack:
            n = stack.pop()
            order.append(n)
            stack.extend(reversed(children(self._nodes[n])))
        new_id = {old: i for i, old in enumerate(order)}
        nodes: dict[int, Node] = {}
        for old in order:
            node = self._nodes[old]
            if isinstance(node, Decision):
                node = Decision(node.player, node.infoset,
                                tuple((a, new_id[c]) for a, c in node.moves))
            elif isinstance(node, Chance):
                node = Chance(tuple((e, p, new_id[c]) for e, p, c in node.moves))
            nodes[new_id[old]] = node
        return GameTree(nodes, 0, n_players, tuple(player_names))


def validate(tree: GameTree) -> list[Violation]:
    """Every broken invariant of ``tree``; empty when the tree is well formed."""
    out: list[Violation] = []
    if tree.root not in tree.nodes:
        return [Violation("root", f"root {tree.root} is not a node")]

    parents: dict[int, list[int]] = {}
    for n, node in tree.nodes.items():
        for c in children(node):
            parents.setdefault(c, []).append(n)
            if c not in tree.nodes:
                out.append(Violation(f"node {n}", f"child {c} does not exist", node=n))
    if tree.root in parents:
        out.append(Violation(f"node {tree.root}", "root has a parent", node=tree.root))
    for c, ps in parents.items():
        if len(ps) > 1:
            out.append(Violation(f"node {c}", f"has {len(ps)} parents {sorted(ps)}", node=c))
    reachable = set(tree.preorder)
    for n in sorted(set(tree.nodes) - reachable):
        out.append(Violation(f"node {n}", "unreachable from the root", node=n))
    if out:
        # Later checks walk root paths and assume a tree.
        return out

    for n in tree.preorder:
        node = tree.nodes[n]
        if isinstance(node, Decision):
            if not 0 <= node.player < tree.n_players:
                out.append(Violation(f"node {n}", f"unknown player {node.player}", node=n))
            if not node.moves:
                out.append(Violation(f"node {n}", "decision node without actions", node=n))
            if len(set(node.actions)) != len(node.actions):
                out.append(Violation(f"node {n}", "duplicate action labels", node=n))
        elif isinstance(node, Chance):
            if not node.moves:
                out.append(Violation(f"node {n}", "chance node without edges", node=n))
            labels = [e for e, _, _ in node.moves]
            if len(set(labels)) != len(labels):
                out.append(Violation(f"node {n}", "duplicate chance edge labels", node=n))
            if any(p < 0 for _, p, _ in node.moves):
                out.append(Violation(f"node {n}", "negative probability", node=n))
            total = sum((p for _, p, _ in node.moves), Fraction(0))
            if total != 1:
                out.append(Violation(f"node {n}", f"probabilities sum to {total}", node=n))

    for key, info in tree.infosets.items():
        first = info.nodes[0]
        for n in info.nodes[1:]:
            node = tree.nodes[n]
            if node.player != info.player:
                out.append(Violation(
                    f"infoset {key}", f"nodes {first} and {n} belong to different players",
                    node=n, infoset=key))
            elif node.actions != info.actions:
                out.append(Violation(
                    f"infoset {key}", f"nodes {first} and {n} have different actions",
                    node=n, infoset=key))
        if any(v.infoset == key for v in out):
            continue
        seq = tree.experience(first, info.player)
        for n in info.nodes[1:]:
            if tree.experience(n, info.player) != seq:
                out.append(Violation(
                    f"infoset {key}",
                    f"perfect recall fails: nodes {first} and {n} have different "
                    f"histories for player {info.player}", node=n, infoset=key))
                break
    return out


def _strategy_for(profile, player: int) -> Strategy:
    try:
        return profile[player]
    except (KeyError, IndexError):
        raise MalformedStrategyError(f"profile has no strategy for player {player}") from None


def _act(node: Decision, strategy: Strategy) -> int:
    try:
        action = strategy[node.infoset]
    except KeyError:
        raise MalformedStrategyError(
            f"strategy for player {node.player} has no action at infoset "
            f"{node.infoset!r}") from None
    return node.child(action)


def play(tree: GameTree, profile: Profile,
         chance_policy: Mapping[int, str] | None = None) -> int:
    """Follow ``profile`` and ``chance_policy`` from the root; return the leaf id."""
    chance_policy = chance_policy or {}
    n = tree.root
    while True:
        node = tree.nodes[n]
        if isinstance(node, Terminal):
            return n
        if isinstance(node, Decision):
            n = _act(node, _strategy_for(profile, node.player))
        else:
            if n not in chance_policy:
                raise MalformedStrategyError(f"chance policy has no edge at node {n}")
            n = node.child(chance_policy[n])


def leaf_distribution(tree: GameTree, profile: Profile) -> dict[int, Fraction]:
    """Exact probability of each leaf when chance moves at random."""
    out: dict[int, Fraction] = {}
    stack = [(tree.root, Fraction(1))]
    while stack:
        n, prob = stack.pop()
        node = tree.nodes[n]
        if isinstance(node, Terminal):
            out[n] = out.get(n, Fraction(0)) + prob
        elif isinstance(node, Decision):
            stack.append((_act(node, _strategy_for(profile, node.player)), prob))
        else:
            for _, p, c in node.moves:
                if p:
                    stack.append((c, prob * p))
    return out


def expected_payoff(tree: GameTree, profile: Profile, utility: Utility,
                    player: int | None = None) -> Fraction:
    """Chance-averaged payoff of ``utility`` under ``profile``.

    ``player`` is accepted for symmetry with the other evaluators; the
    utility already identifies whose payoff is measured.
    """
    return sum((p * utility(tree.nodes[n].outcome)
                for n, p in leaf_distribution(tree, profile).items()), Fraction(0))


def strategy_count(tree: GameTree, player: int) -> int:
    return math.prod(len(i.actions) for i in tree.infosets_of(player))


def enumerate_strategies(tree: GameTree, player: int,
                         cap: int | None = None) -> Iterator[dict[str, str]]:
    """All pure strategies of ``player``; refuses if there are more than ``cap``."""
    cap = DEFAULT_STRATEGY_CAP if cap is None else cap
    sets = tree.infosets_of(player)
    count = math.prod(len(i.actions) for i in sets)
    if count > cap:
        raise SizeLimitError(
            f"player {player} has {count} pure strategies, cap is {cap}")
    keys = [i.id for i in sets]
    return (dict(zip(keys, combo))
            for combo in itertools.product(*(i.actions for i in sets)))


# ---------------------------------------------------------------------------
# Constrained walks.  ``plans`` pins some players' actions; ``fixed`` pins
# individual infosets (str keys) and chance nodes (int keys); everything else
# branches.  With perfect recall a root path meets each infoset at most once,
# so every branch pattern below is realised by some pure profile.

def _follow(node_id: int, node: Node, plans: Mapping[int, Strategy],
            fixed: Mapping, free) -> int | None:
    if isinstance(node, Decision):
        plan = plans.get(node.player)
        if plan is not None and node.infoset not in free and node.infoset in plan:
            return node.child(plan[node.infoset])
        if node.infoset in fixed:
            return node.child(fixed[node.infoset])
        return None
    if node_id in fixed:
        return node.child(fixed[node_id])
    return None


def reachable_leaves(tree: GameTree, starts: Sequence[int],
                     plans: Mapping[int, Strategy] | None = None,
                     fixed: Mapping | None = None, free=frozenset(),
                     budget: Budget | None = None) -> Iterator[int]:
    plans = plans or {}
    fixed = fixed or {}
    stack = list(reversed(starts))
    nodes = tree.nodes
    while stack:
        n = stack.pop()
        node = nodes[n]
        if isinstance(node, Terminal):
            if budget is not None:
                budget.charge()
            yield n
            continue
        nxt = _follow(n, node, plans, fixed, free)
        if nxt is not None:
            stack.append(nxt)
        else:
            stack.extend(reversed(children(node)))


def branch_paths(tree: GameTree, start: int, plans: Mapping[int, Strategy],
                 fixed: Mapping | None = None,
                 budget: Budget | None = None) -> Iterator[tuple[int, dict]]:
    """Leaves below ``start`` together with the branch choices that reach them.

    Each yielded assignment extends ``fixed`` with the infosets and chance
    nodes decided along that path.
    """
    stack = [(start, dict(fixed or {}))]
    nodes = tree.nodes
    while stack:
        n, assign = stack.pop()
        node = nodes[n]
        if isinstance(node, Terminal):
            if budget is not None:
                budget.charge()
            yield n, assign
            continue
        nxt = _follow(n, node, plans, assign, ())
        if nxt is not None:
            stack.append((nxt, assign))
            continue
        key = node.infoset if isinstance(node, Decision) else n
        moves = node.moves if isinstance(node, Decision) else [(e, c) for e, _, c in node.moves]
        for label, c in reversed(moves):
            stack.append((c, {**assign, key: label}))


class Extremes(NamedTuple):
    lo: Fraction
    lo_leaf: int
    hi: Fraction
    hi_leaf: int


def extremes(tree: GameTree, starts: Sequence[int], utility: Utility,
             plans: Mapping[int, Strategy] | None = None,
             fixed: Mapping | None = None, free=frozenset(),
             budget: Budget | None = None) -> Extremes | None:
    """Worst and best leaf for ``utility`` over all unpinned choices."""
    lo = hi = None
    lo_leaf = hi_leaf = -1
    for leaf in reachable_leaves(tree, starts, plans, fixed, free, budget):
        v = utility(tree.nodes[leaf].outcome)
        if lo is None or v < lo:
            lo, lo_leaf = v, leaf
        if hi is None or v > hi:
            hi, hi_leaf = v, leaf
    if lo is None:
        return None
    return Extremes(lo, lo_leaf, hi, hi_leaf)


def payoff_bounds(tree: GameTree, player: int, utility: Utility, infoset: str,
                  continuation: Strategy, free_own_moves=frozenset(),
                  budget: Budget | None = None) -> tuple[Fraction, Fraction]:
    """Worst and best payoff for ``player`` upon reaching ``infoset``.

    Ranges over every node of the infoset, all opponent and chance moves
    below it, and the player's own moves wherever ``continuation`` is
    undefined or the infoset is listed in ``free_own_moves``.
    """
    info = tree.infosets.get(infoset)
    if info is None or info.player != player:
        raise MalformedStrategyError(f"{infoset!r} is not an infoset of player {player}")
    if infoset not in continuation or infoset in free_own_moves:
        raise MalformedStrategyError(f"continuation is undefined at {infoset!r}")
    ext = extremes(tree, info.nodes, utility, {player: continuation},
                   free=free_own_moves, budget=budget)
    return ext.lo, ext.hi


def own_actions_on_path(tree: GameTree, leaf: int, player: int) -> dict[str, str]:
    return {tree.nodes[n].infoset: a for n, a in tree.path_choices(leaf)
            if isinstance(tree.nodes[n], Decision) and tree.nodes[n].player == player}


def complete_profile(tree: GameTree, players: Sequence[int], leaf: int | None = None,
                     assign: Mapping | None = None) -> tuple[dict[int, dict[str, str]], dict[int, str]]:
    """Pure strategies for ``players`` and a chance policy reproducing a path.

    Choices on the root path to ``leaf`` and in ``assign`` take priority;
    everything else defaults to the first action or edge.
    """
    chosen: dict = dict(assign or {})
    if leaf is not None:
        for n, label in tree.path_choices(leaf):
            node = tree.nodes[n]
            chosen[node.infoset if isinstance(node, Decision) else n] = label
    profile = {}
    for p in players:
        profile[p] = {i.id: chosen.get(i.id, i.actions[0]) for i in tree.infosets_of(p)}
    chance = {n: chosen.get(n, node.moves[0][0]) for n, node in tree.nodes.items()
              if isinstance(node, Chance)}
    return profile, chance
