"""Limited foresight: foreseeable families, partial plans, F-dominance.

At an information set ``I`` the player commits only to a plan on the
family ``F(I)`` it can foresee.  Its own moves outside ``F(I)`` are treated
exactly like opponent moves: adversarial when bounding the plan from below
and optimistic when bounding a deviation from above.
"""
from __future__ import annotations

import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterator

from .dominance import deviation_best, own_infosets_reached
from .game import (Budget, Decision, GameTree, MalformedStrategyError, Terminal,
                   children, extremes, own_actions_on_path)
from .mechanisms import Mechanism
from .witness import ObviousViolation, Verdict

FULL = "full"
SELF = "self"
ONE_STEP = "one-step"
TABLE = "table"


def one_step_ahead(tree: GameTree, player: int, infoset: str) -> frozenset[str]:
    """Own infosets reachable from ``infoset`` with no own move in between."""
    info = tree.infosets[infoset]
    if info.player != player:
        raise ValueError(f"{infoset!r} does not belong to player {player}")
    out = set()
    stack = [c for n in info.nodes for c in children(tree.nodes[n])]
    while stack:
        n = stack.pop()
        node = tree.nodes[n]
        if isinstance(node, Decision) and node.player == player:
            out.add(node.infoset)
        elif not isinstance(node, Terminal):
            stack.extend(children(node))
    return frozenset(out)


@dataclass(frozen=True)
class ForesightSpec:
    """Which own information sets are foreseeable from each one.

    ``kind`` is one of the presets ``full``, ``self`` and ``one-step``, or
    ``table`` for an explicit map from infoset to foreseeable family.
    Infosets missing from a table foresee only themselves.
    """

    kind: str = FULL
    table: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def family(self, tree: GameTree, infoset: str) -> frozenset[str]:
        player = tree.infosets[infoset].player
        if self.kind == FULL:
            return frozenset(i.id for i in tree.infosets_of(player))
        if self.kind == SELF:
            return frozenset([infoset])
        if self.kind == ONE_STEP:
            return frozenset([infoset]) | one_step_ahead(tree, player, infoset)
        if self.kind == TABLE:
            fam = frozenset(self.table.get(infoset, (infoset,)))
            if infoset not in fam:
                raise ValueError(f"foresight table omits {infoset!r} from its own family")
            foreign = [j for j in fam if tree.infosets.get(j) is None
                       or tree.infosets[j].player != player]
            if foreign:
                raise ValueError(f"family of {infoset!r} lists foreign infosets {sorted(foreign)}")
            return fam
        raise ValueError(f"unknown foresight kind {self.kind!r}")

    def problems(self, tree: GameTree) -> list[str]:
        out = []
        for key in self.table:
            if key not in tree.infosets:
                out.append(f"foresight entry for unknown infoset {key!r}")
                continue
            try:
                self.family(tree, key)
            except ValueError as e:
                out.append(str(e))
        return out


FULL_FORESIGHT = ForesightSpec(FULL)
SELF_FORESIGHT = ForesightSpec(SELF)
ONE_STEP_FORESIGHT = ForesightSpec(ONE_STEP)
PRESETS = {FULL: FULL_FORESIGHT, SELF: SELF_FORESIGHT, ONE_STEP: ONE_STEP_FORESIGHT}


class PartialPlan(Mapping):
    """Actions on the foreseeable family of ``anchor``."""

    def __init__(self, anchor: str, actions: Mapping[str, str]):
        self.anchor = anchor
        self.actions = dict(actions)
        if anchor not in self.actions:
            raise MalformedStrategyError(f"plan has no action at its anchor {anchor!r}")

    def __getitem__(self, key: str) -> str:
        return self.actions[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self.actions)

    def __len__(self) -> int:
        return len(self.actions)

    def __repr__(self) -> str:
        return f"PartialPlan({self.anchor!r}, {self.actions!r})"


def _check_plan(tree: GameTree, player: int, plan: PartialPlan, fam: frozenset[str]) -> dict:
    missing = fam - set(plan.actions)
    if missing:
        raise MalformedStrategyError(f"plan is undefined on {sorted(missing)}")
    out = {}
    for key in fam:
        if plan[key] not in tree.infosets[key].actions:
            raise MalformedStrategyError(f"illegal action {plan[key]!r} at {key!r}")
        out[key] = plan[key]
    return out


def _dev_best(tree, infoset, keep, utility, budget):
    best = None
    for a in tree.infosets[infoset].actions:
        if a == keep:
            continue
        ext = deviation_best(tree, infoset, a, utility, budget)
        if best is None or ext.hi > best[1].hi:
            best = (a, ext)
    return best


def f_dominant(mech: Mechanism, player: int, utility, plan: PartialPlan,
               foresight: ForesightSpec, budget: Budget | None = None) -> bool:
    """Worst case of ``plan`` at its anchor beats the best case of every plan
    choosing differently there."""
    tree = mech.tree
    fam = foresight.family(tree, plan.anchor)
    restricted = _check_plan(tree, player, plan, fam)
    best = _dev_best(tree, plan.anchor, restricted[plan.anchor], utility, budget)
    if best is None:
        return True
    worst = extremes(tree, tree.infosets[plan.anchor].nodes, utility, {player: restricted},
                     budget=budget)
    return worst.lo >= best[1].hi


def _reachable_in_family(tree: GameTree, infoset: str, action: str,
                         fam: frozenset[str]) -> list[str]:
    """Infosets of ``fam`` that can still come up after ``action`` at ``infoset``."""
    player = tree.infosets[infoset].player
    out, seen = [], set()
    stack = [tree.nodes[n].child(action) for n in tree.infosets[infoset].nodes]
    while stack:
        n = stack.pop()
        node = tree.nodes[n]
        if isinstance(node, Decision) and node.player == player and node.infoset in fam \
                and node.infoset not in seen:
            seen.add(node.infoset)
            out.append(node.infoset)
        stack.extend(children(node))
    return out


def is_f_simple(mech: Mechanism, foresight: ForesightSpec, players=None,
                budget: Budget | None = None, criterion: str = "f-simple") -> Verdict:
    """Truthful play can be induced by F-dominant partial plans, one per infoset.

    Anchors are the own infosets reachable under truthful play.  At each the
    truthful restriction to the foreseeable family is tried first; failing
    that, every plan on the family that agrees with truthful play at the
    anchor is tried.  Plans at different anchors need not agree.
    """
    budget = budget or Budget()
    tree = mech.tree
    players = range(mech.n_players) if players is None else players
    rows = []
    for p in players:
        for u in mech.types[p]:
            truth = mech.truth(p, u.name)
            for anchor in own_infosets_reached(tree, p, truth):
                w, row = _anchor_check(mech, p, u, truth, anchor, foresight, budget)
                if w is not None:
                    return Verdict(False, w, {"plans": rows, "evaluations": budget.used},
                                   criterion)
                rows.append(row)
    return Verdict(True, None, {"plans": rows, "evaluations": budget.used}, criterion)


def _anchor_check(mech, p, u, truth, anchor, foresight, budget):
    tree = mech.tree
    fam = foresight.family(tree, anchor)
    action = truth[anchor]
    nodes = tree.infosets[anchor].nodes
    best = _dev_best(tree, anchor, action, u, budget)
    plan = {k: truth[k] for k in fam}
    worst = extremes(tree, nodes, u, {p: plan}, budget=budget)
    row = {"player": p, "type": u.name, "infoset": anchor, "plan": plan,
           "worst": str(worst.lo), "best": None if best is None else str(best[1].hi)}
    if best is None or worst.lo >= best[1].hi:
        return None, row
    free = [k for k in _reachable_in_family(tree, anchor, action, fam) if k != anchor]
    count = 1
    for k in free:
        count *= len(tree.infosets[k].actions)
    budget.require(count, f"plan search at {anchor!r}")
    top = (worst, plan)
    for combo in itertools.product(*(tree.infosets[k].actions for k in free)):
        cand = {**plan, **dict(zip(free, combo))}
        ext = extremes(tree, nodes, u, {p: cand}, budget=budget)
        if ext.lo >= best[1].hi:
            row.update(plan=cand, worst=str(ext.lo))
            return None, row
        if ext.lo > top[0].lo:
            top = (ext, cand)
    a, ext = best
    dev = {k: v for k, v in own_actions_on_path(tree, ext.hi_leaf, p).items() if k in fam}
    dev[anchor] = a
    w = ObviousViolation(p, u.name, anchor, top[1], dev, top[0].lo, ext.hi,
                         top[0].lo_leaf, ext.hi_leaf, foresight.kind)
    return w, row


def strong_osp(mech: Mechanism, budget: Budget | None = None) -> Verdict:
    return is_f_simple(mech, SELF_FORESIGHT, budget=budget, criterion="strong-osp")


def one_step_simple(mech: Mechanism, budget: Budget | None = None) -> Verdict:
    return is_f_simple(mech, ONE_STEP_FORESIGHT, budget=budget, criterion="one-step")
