"""Dominance certifiers: strategy-proofness, obvious strategy-proofness and
weak group strategy-proofness.

Each check enumerates exhaustively and stops at the first violation, which
is returned as a replayable witness.

Opponent moves and chance moves are quantified over pure choices.  For
pairwise comparisons against one opponent profile the search enumerates the
root paths of the first strategy, recording the opponent and chance choices
along each path; the second strategy is then only constrained at those
recorded choices.  With perfect recall this covers every profile exactly.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence

from .game import (Budget, Chance, Decision, GameTree, Strategy, Terminal,
                   branch_paths, complete_profile, enumerate_strategies,
                   expected_payoff, extremes, leaf_distribution,
                   own_actions_on_path, reachable_leaves)
from .mechanisms import Mechanism
from .witness import (CoalitionDeviation, Deviation, NoDominantStrategy,
                      ObviousViolation, Verdict)


def _payoff(tree: GameTree, u, leaf: int) -> Fraction:
    return u(tree.nodes[leaf].outcome)


def _players(mech: Mechanism, players: Iterable[int] | None) -> list[int]:
    return list(range(mech.n_players)) if players is None else list(players)


def find_deviation(mech: Mechanism, player: int, utility, strategy: Strategy,
                   budget: Budget | None = None) -> Deviation | None:
    """A profile and chance policy against which some strategy beats ``strategy``."""
    tree = mech.tree
    opponents = [q for q in range(mech.n_players) if q != player]
    for leaf, assign in branch_paths(tree, tree.root, {player: strategy}, budget=budget):
        v = _payoff(tree, utility, leaf)
        ext = extremes(tree, [tree.root], utility, fixed=assign, budget=budget)
        if ext.hi > v:
            dev = {**strategy, **own_actions_on_path(tree, ext.hi_leaf, player)}
            profile, chance = complete_profile(tree, opponents, ext.hi_leaf, assign)
            return Deviation(player, utility.name, dict(strategy), dev, profile, chance,
                             (v, ext.hi))
    return None


def weakly_dominates(mech: Mechanism, player: int, utility, s: Strategy, s2: Strategy,
                     budget: Budget | None = None) -> bool:
    """``s`` is never worse than ``s2`` and strictly better against some profile."""
    tree = mech.tree
    strict = False
    for leaf, assign in branch_paths(tree, tree.root, {player: s}, budget=budget):
        v = _payoff(tree, utility, leaf)
        ext = extremes(tree, [tree.root], utility, {player: s2}, fixed=assign, budget=budget)
        if ext.hi > v:
            return False
        if ext.lo < v:
            strict = True
    return strict


def dominant_strategies(mech: Mechanism, player: int, utility,
                        budget: Budget | None = None) -> list[dict[str, str]]:
    """Strategies that are a best response to every profile and chance policy."""
    return [s for s in enumerate_strategies(mech.tree, player)
            if find_deviation(mech, player, utility, s, budget) is None]


def is_strategy_proof(mech: Mechanism, players: Iterable[int] | None = None,
                      budget: Budget | None = None) -> Verdict:
    """Truthful play is a best response everywhere, for every type.

    A player without a truthful map passes only if each of their types has
    some dominant strategy; otherwise the witness refutes every strategy of
    the first type that has none.
    """
    budget = budget or Budget()
    cert = {"types_checked": 0, "dominant_found": {}}
    for p in _players(mech, players):
        for u in mech.types[p]:
            cert["types_checked"] += 1
            if mech.has_truthful(p):
                w = find_deviation(mech, p, u, mech.truth(p, u.name), budget)
                if w is not None:
                    return Verdict(False, w, _with_count(cert, budget), "sp")
                continue
            refutations = []
            for s in enumerate_strategies(mech.tree, p):
                w = find_deviation(mech, p, u, s, budget)
                if w is None:
                    cert["dominant_found"][f"{p}/{u.name}"] = s
                    break
                refutations.append(w)
            else:
                return Verdict(False, NoDominantStrategy(p, u.name, refutations),
                               _with_count(cert, budget), "sp")
    return Verdict(True, None, _with_count(cert, budget), "sp")


def _with_count(cert: dict, budget: Budget) -> dict:
    cert["evaluations"] = budget.used
    return cert


def own_infosets_reached(tree: GameTree, player: int, plan: Strategy,
                         other: Strategy | None = None) -> list[str]:
    """Own infosets reachable while ``player`` follows ``plan``, in preorder.

    With ``other`` given, the walk stops at infosets where the two strategies
    first disagree and returns only those.
    """
    out: list[str] = []
    seen = set()
    stack = [tree.root]
    while stack:
        n = stack.pop()
        node = tree.nodes[n]
        if isinstance(node, Terminal):
            continue
        if isinstance(node, Decision) and node.player == player:
            key = node.infoset
            diverges = other is not None and plan[key] != other[key]
            if (other is None or diverges) and key not in seen:
                seen.add(key)
                out.append(key)
            if not diverges:
                stack.append(node.child(plan[key]))
            continue
        kids = [c for _, c in node.moves] if isinstance(node, Decision) else \
            [c for _, _, c in node.moves]
        stack.extend(reversed(kids))
    return out


def deviation_best(tree: GameTree, infoset: str, action: str, utility,
                   budget: Budget | None = None):
    """Best case after taking ``action`` at ``infoset`` with every later move free."""
    starts = [tree.nodes[n].child(action) for n in tree.infosets[infoset].nodes]
    return extremes(tree, starts, utility, budget=budget)


def _obvious_check(mech: Mechanism, player: int, utility, s: Strategy, infoset: str,
                   alternatives: Sequence[str], rows: list | None,
                   budget: Budget | None) -> ObviousViolation | None:
    tree = mech.tree
    nodes = tree.infosets[infoset].nodes
    worst = extremes(tree, nodes, utility, {player: s}, budget=budget)
    found = None
    # Largest gap wins; on ties the later action, so overbids beat underbids.
    for a in alternatives:
        best = deviation_best(tree, infoset, a, utility, budget)
        if rows is not None:
            rows.append({"player": player, "type": utility.name, "infoset": infoset,
                         "action": a, "worst": str(worst.lo), "best": str(best.hi)})
        if worst.lo < best.hi and (found is None or best.hi >= found[1].hi):
            found = (a, best)
    if found is None:
        return None
    a, best = found
    dev = {**s, infoset: a, **own_actions_on_path(tree, best.hi_leaf, player)}
    return ObviousViolation(player, utility.name, infoset, dict(s), dev,
                            worst.lo, best.hi, worst.lo_leaf, best.hi_leaf)


def obvious_violation(mech: Mechanism, player: int, utility, s: Strategy, s2: Strategy,
                      budget: Budget | None = None) -> ObviousViolation | None:
    """The first earliest-divergence infoset where ``s`` fails to beat ``s2`` obviously."""
    tree = mech.tree
    for infoset in own_infosets_reached(tree, player, s, s2):
        nodes = tree.infosets[infoset].nodes
        worst = extremes(tree, nodes, utility, {player: s}, budget=budget)
        best = extremes(tree, nodes, utility, {player: s2}, budget=budget)
        if worst.lo < best.hi:
            return ObviousViolation(player, utility.name, infoset, dict(s), dict(s2),
                                    worst.lo, best.hi, worst.lo_leaf, best.hi_leaf)
    return None


def obviously_dominates(mech: Mechanism, player: int, utility, s: Strategy, s2: Strategy,
                        budget: Budget | None = None) -> bool:
    """At every infoset where ``s`` and ``s2`` first differ, the worst case of
    ``s`` is at least the best case of ``s2``."""
    return obvious_violation(mech, player, utility, s, s2, budget) is None


def is_osp(mech: Mechanism, players: Iterable[int] | None = None,
           budget: Budget | None = None) -> Verdict:
    """Truthful play obviously dominates every alternative, for every type.

    Rather than enumerating alternatives, each reachable infoset is checked
    against every other action there, with all later own moves free: that
    is the best case over all strategies that first deviate at that point.
    """
    budget = budget or Budget()
    rows: list = []
    tree = mech.tree
    for p in _players(mech, players):
        for u in mech.types[p]:
            truth = mech.truth(p, u.name)
            for infoset in own_infosets_reached(tree, p, truth):
                alts = [a for a in tree.infosets[infoset].actions if a != truth[infoset]]
                w = _obvious_check(mech, p, u, truth, infoset, alts, rows, budget)
                if w is not None:
                    return Verdict(False, w, {"table": rows, "evaluations": budget.used}, "osp")
    return Verdict(True, None, {"table": rows, "evaluations": budget.used}, "osp")


def _truthful_profile(mech: Mechanism, names: Sequence[str]) -> dict[int, Strategy]:
    return {p: mech.truth(p, t) for p, t in enumerate(names)}


def is_weakly_group_sp(mech: Mechanism, max_coalition_size: int = 2,
                       mode: str = "realized", budget: Budget | None = None) -> Verdict:
    """No coalition can deviate jointly so that every member strictly gains.

    Outsiders play truthfully.  In ``realized`` mode gains are compared
    outcome by outcome under a common chance realisation; ``expected`` mode
    compares chance-averaged payoffs instead.  On chance-free trees the two
    coincide.
    """
    if mode not in ("realized", "expected"):
        raise ValueError(f"unknown mode {mode!r}")
    for p in range(mech.n_players):
        if not mech.has_truthful(p):
            raise ValueError(f"player {p} has no truthful strategy")
    budget = budget or Budget()
    tree = mech.tree
    n = mech.n_players
    coalitions = [c for k in range(1, min(max_coalition_size, n) + 1)
                  for c in itertools.combinations(range(n), k)]
    checked = 0
    for names in itertools.product(*[[u.name for u in ts] for ts in mech.types]):
        utils = [mech.utility(p, t) for p, t in enumerate(names)]
        truth = _truthful_profile(mech, names)
        if mode == "expected" and tree.has_chance:
            for coalition in coalitions:
                checked += 1
                w = _expected_coalition(mech, names, utils, truth, coalition, budget)
                if w is not None:
                    return Verdict(False, w, {"profiles_checked": checked,
                                              "evaluations": budget.used}, "wgsp")
            continue
        truth_paths = list(branch_paths(tree, tree.root, truth, budget=budget))
        for coalition in coalitions:
            checked += 1
            outsiders = {q: truth[q] for q in range(n) if q not in coalition}
            for leaf_t, assign in truth_paths:
                base = {i: _payoff(tree, utils[i], leaf_t) for i in coalition}
                for leaf in reachable_leaves(tree, [tree.root], outsiders, assign, budget=budget):
                    if all(_payoff(tree, utils[i], leaf) > base[i] for i in coalition):
                        _, chance = complete_profile(tree, (), leaf, assign)
                        dev = {i: {**truth[i], **own_actions_on_path(tree, leaf, i)}
                               for i in coalition}
                        w = CoalitionDeviation(
                            tuple(coalition), tuple(names), dev, chance, base,
                            {i: _payoff(tree, utils[i], leaf) for i in coalition})
                        return Verdict(False, w, {"profiles_checked": checked,
                                                  "evaluations": budget.used}, "wgsp")
    return Verdict(True, None, {"profiles_checked": checked, "evaluations": budget.used},
                   "wgsp")


def _expected_coalition(mech, names, utils, truth, coalition, budget):
    tree = mech.tree
    outsiders = {q: s for q, s in truth.items() if q not in coalition}
    relevant = []
    seen = set()
    for n in tree.preorder:
        node = tree.nodes[n]
        if isinstance(node, Decision) and node.player in coalition and node.infoset not in seen:
            seen.add(node.infoset)
            relevant.append(tree.infosets[node.infoset])
    # Prune to infosets the coalition can actually reach against truthful outsiders.
    reach = set()
    stack = [tree.root]
    while stack:
        n = stack.pop()
        node = tree.nodes[n]
        if isinstance(node, Decision):
            if node.player in outsiders:
                stack.append(node.child(outsiders[node.player][node.infoset]))
            else:
                reach.add(node.infoset)
                stack.extend(c for _, c in node.moves)
        elif isinstance(node, Chance):
            stack.extend(c for _, _, c in node.moves)
    relevant = [i for i in relevant if i.id in reach]
    total = 1
    for i in relevant:
        total *= len(i.actions)
    budget.require(total, "expected-payoff coalition search")
    base = {i: expected_payoff(tree, truth, utils[i]) for i in coalition}
    for combo in itertools.product(*(i.actions for i in relevant)):
        chosen = dict(zip((i.id for i in relevant), combo))
        dev = {i: {**truth[i], **{k: a for k, a in chosen.items()
                                  if tree.infosets[k].player == i}} for i in coalition}
        profile = {**truth, **dev}
        dist = leaf_distribution(tree, profile)
        budget.charge(len(dist))
        gains = {i: sum((p * _payoff(tree, utils[i], leaf) for leaf, p in dist.items()),
                        Fraction(0)) for i in coalition}
        if all(gains[i] > base[i] for i in coalition):
            return CoalitionDeviation(tuple(coalition), tuple(names), dev, {}, base, gains,
                                      mode="expected")
    return None
