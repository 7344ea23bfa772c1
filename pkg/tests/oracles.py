"""Brute-force reference checks, written against the raw node table.

Nothing here calls the library's walkers or certifiers: strategies, chance
policies and play are re-implemented so that agreement means something.
Everything enumerates full pure profiles, so keep instances tiny.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from simplicity.game import Chance, Decision, Terminal


def infosets(tree, player):
    out = {}
    for n in sorted(tree.nodes):
        node = tree.nodes[n]
        if isinstance(node, Decision) and node.player == player:
            out.setdefault(node.infoset, tuple(a for a, _ in node.moves))
    return out


def strategies(tree, player):
    table = infosets(tree, player)
    keys = sorted(table)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(table[k] for k in keys))]


def chance_policies(tree):
    nodes = sorted(n for n, node in tree.nodes.items() if isinstance(node, Chance))
    edges = [[e for e, _, _ in tree.nodes[n].moves] for n in nodes]
    return [dict(zip(nodes, combo)) for combo in itertools.product(*edges)]


def run(tree, profile, policy):
    """Root path as a list of node ids; the last one is the leaf."""
    n, path = tree.root, [tree.root]
    while not isinstance(tree.nodes[n], Terminal):
        node = tree.nodes[n]
        label = profile[node.player][node.infoset] if isinstance(node, Decision) else policy[n]
        moves = node.moves if isinstance(node, Decision) else [(e, c) for e, _, c in node.moves]
        n = dict(moves)[label]
        path.append(n)
    return path


def outcome(tree, profile, policy):
    return tree.nodes[run(tree, profile, policy)[-1]].outcome


def expected(tree, profile, u, n=None):
    n = tree.root if n is None else n
    node = tree.nodes[n]
    if isinstance(node, Terminal):
        return u(node.outcome)
    if isinstance(node, Decision):
        return expected(tree, profile, u, dict(node.moves)[profile[node.player][node.infoset]])
    return sum((p * expected(tree, profile, u, c) for _, p, c in node.moves), Fraction(0))


def size(mech):
    tree = mech.tree
    total = len(chance_policies(tree))
    for p in range(mech.n_players):
        total *= len(strategies(tree, p))
    return total


def _others(mech, player):
    tree = mech.tree
    opps = [q for q in range(mech.n_players) if q != player]
    for combo in itertools.product(*(strategies(tree, q) for q in opps)):
        for policy in chance_policies(tree):
            yield dict(zip(opps, combo)), policy


def sp(mech) -> bool:
    """Truthful is a best reply to every pure opponent profile and chance policy."""
    tree = mech.tree
    for p in range(mech.n_players):
        own = strategies(tree, p)
        for u in mech.types[p]:
            truth = mech.truth(p, u.name)
            for prof, policy in _others(mech, p):
                v = u(outcome(tree, {**prof, p: truth}, policy))
                if any(u(outcome(tree, {**prof, p: s}, policy)) > v for s in own):
                    return False
    return True


def osp(mech) -> bool:
    """Worst truthful payoff against best deviating payoff at each first divergence."""
    tree = mech.tree
    for p in range(mech.n_players):
        own = strategies(tree, p)
        for u in mech.types[p]:
            truth = mech.truth(p, u.name)
            for s in own:
                if s == truth:
                    continue
                worst, best = {}, {}
                for prof, policy in _others(mech, p):
                    path = run(tree, {**prof, p: truth}, policy)
                    first = next((n for n in path[:-1]
                                  if isinstance(tree.nodes[n], Decision)
                                  and tree.nodes[n].player == p
                                  and truth[tree.nodes[n].infoset] != s[tree.nodes[n].infoset]),
                                 None)
                    if first is None:
                        continue
                    key = tree.nodes[first].infoset
                    a = u(tree.nodes[path[-1]].outcome)
                    b = u(outcome(tree, {**prof, p: s}, policy))
                    worst[key] = min(worst.get(key, a), a)
                    best[key] = max(best.get(key, b), b)
                if any(worst[k] < best[k] for k in worst):
                    return False
    return True


def wgsp(mech, k: int = 2) -> bool:
    """No coalition of size <= k gains strictly under a common chance policy."""
    tree = mech.tree
    n = mech.n_players
    policies = chance_policies(tree)
    for names in itertools.product(*([u.name for u in space] for space in mech.types)):
        truth = {p: mech.truth(p, names[p]) for p in range(n)}
        for size_ in range(1, min(k, n) + 1):
            for coal in itertools.combinations(range(n), size_):
                for combo in itertools.product(*(strategies(tree, p) for p in coal)):
                    dev = {**truth, **dict(zip(coal, combo))}
                    for policy in policies:
                        if all(mech.utility(p, names[p])(outcome(tree, dev, policy))
                               > mech.utility(p, names[p])(outcome(tree, truth, policy))
                               for p in coal):
                            return False
    return True


def strong_osp(mech) -> bool:
    """At each truthful-reachable own infoset, own later moves are free."""
    tree = mech.tree

    def leaves(n, pin):
        node = tree.nodes[n]
        if isinstance(node, Terminal):
            return [node.outcome]
        if isinstance(node, Decision) and node.infoset in pin:
            return leaves(dict(node.moves)[pin[node.infoset]], pin)
        kids = [c for _, c in node.moves] if isinstance(node, Decision) else \
            [c for _, _, c in node.moves]
        return [o for c in kids for o in leaves(c, pin)]

    for p in range(mech.n_players):
        for u in mech.types[p]:
            truth = mech.truth(p, u.name)
            reached = set()
            for prof, policy in _others(mech, p):
                for m in run(tree, {**prof, p: truth}, policy):
                    node = tree.nodes[m]
                    if isinstance(node, Decision) and node.player == p:
                        reached.add(node.infoset)
            for key in reached:
                nodes = [m for m, node in tree.nodes.items()
                         if isinstance(node, Decision) and node.infoset == key]
                worst = min(u(o) for m in nodes for o in leaves(m, {key: truth[key]}))
                for a in infosets(tree, p)[key]:
                    if a != truth[key]:
                        best = max(u(o) for m in nodes for o in leaves(m, {key: a}))
                        if worst < best:
                            return False
    return True


def seller_argmax(cost, prices, values):
    """Offers maximizing (s - C) * P(s <= b(V)) with b(V) the top price <= V."""
    def bid(v):
        return max(p for p in prices if p <= v)
    score = {s: (s - cost) * Fraction(sum(1 for v in values if s <= bid(v)), len(values))
             for s in prices}
    top = max(score.values())
    return sorted(s for s, x in score.items() if x == top), top


def second_price_result(values):
    """Winner and price of a sealed second-price auction, lowest index wins ties."""
    top = max(values)
    winner = values.index(top)
    rest = values[:winner] + values[winner + 1:]
    return winner, max(rest)


def pareto(allocation, prefs):
    rank = [{g: k for k, g in enumerate(p)} for p in prefs]
    base = [rank[a][allocation[a]] for a in range(len(prefs))]
    for other in itertools.permutations(prefs[0], len(prefs)):
        r = [rank[a][other[a]] for a in range(len(prefs))]
        if r != base and all(x <= y for x, y in zip(r, base)):
            return False
    return True
