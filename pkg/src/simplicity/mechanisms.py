"""Constructors for the auction, allocation and trade mechanisms.

Every constructor returns a :class:`Mechanism`: a game tree, a finite type
space per player, and (where one is intended) the truthful strategy of each
type.  Outcome labels encode the economic result (``win:0@3``,
``alloc:g1,g0,g2``, ``trade@5/2``) and utilities are filled in per type.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .game import (Decision, GameTree, Strategy, TreeBuilder, Utility,
                   Violation, rational, validate)

LOWEST_INDEX = "lowest-index"
HIGHEST_INDEX = "highest-index"
TIE_POLICIES = (LOWEST_INDEX, HIGHEST_INDEX)

MAX_RP_GOODS = 4


class ConstructionError(ValueError):
    """Parameters that cannot produce a well-formed mechanism."""


@dataclass(frozen=True)
class Mechanism:
    tree: GameTree
    types: tuple[tuple[Utility, ...], ...]
    # Per player: type name -> strategy, or None when no strategy is intended.
    truthful: tuple[Mapping[str, Strategy] | None, ...]
    name: str = ""
    params: Mapping[str, str] = field(default_factory=dict)

    @property
    def n_players(self) -> int:
        return self.tree.n_players

    def utility(self, player: int, type_name: str) -> Utility:
        for u in self.types[player]:
            if u.name == type_name:
                return u
        raise KeyError(f"player {player} has no type {type_name!r}")

    def truth(self, player: int, type_name: str) -> Strategy:
        table = self.truthful[player]
        if table is None:
            raise ValueError(f"{self.name or 'mechanism'}: player {player} has no "
                             "truthful strategy")
        return table[type_name]

    def has_truthful(self, player: int) -> bool:
        return self.truthful[player] is not None

    def validate(self) -> list[Violation]:
        out = list(validate(self.tree))
        labels = set(self.tree.outcomes)
        if len(self.types) != self.n_players or len(self.truthful) != self.n_players:
            out.append(Violation("mechanism", "type spaces and truthful maps must "
                                 "have one entry per player"))
            return out
        for p in range(self.n_players):
            names = [u.name for u in self.types[p]]
            if not names:
                out.append(Violation(f"player {p}", "empty type space"))
            if len(set(names)) != len(names):
                out.append(Violation(f"player {p}", "duplicate type names"))
            for u in self.types[p]:
                missing = labels - set(u.payoffs)
                if missing:
                    out.append(Violation(f"type {p}/{u.name}",
                                         f"no payoff for outcomes {sorted(missing)}"))
            table = self.truthful[p]
            if table is None:
                continue
            infos = {i.id: i for i in self.tree.infosets_of(p)}
            for name in names:
                if name not in table:
                    out.append(Violation(f"truthful {p}/{name}", "missing"))
                    continue
                s = table[name]
                if set(s) != set(infos):
                    out.append(Violation(f"truthful {p}/{name}",
                                         "not defined on exactly the player's infosets"))
                elif any(a not in infos[k].actions for k, a in s.items()):
                    out.append(Violation(f"truthful {p}/{name}", "illegal action"))
        return out


def _grid(values, what: str) -> tuple[Fraction, ...]:
    grid = tuple(rational(v) for v in values)
    if not grid:
        raise ConstructionError(f"{what} grid is empty")
    if list(grid) != sorted(set(grid)):
        raise ConstructionError(f"{what} grid must be sorted and duplicate-free")
    return grid


def fmt(x: Fraction) -> str:
    return str(Fraction(x))


@dataclass(frozen=True)
class AuctionParams:
    """Single-object auction parameters.

    ``prices`` is the bid grid (second price), the ascending clock, or the
    descending offer ladder (reverse clock).  When omitted it is derived from
    ``values``.  ``continue_at_value`` sets the truthful boundary: with it a
    clock bidder still accepts a price equal to their value.
    """

    n_bidders: int
    values: Sequence = tuple(range(5))
    prices: Sequence | None = None
    step: object = 1
    tie: str = LOWEST_INDEX
    order: Sequence[int] | None = None
    continue_at_value: bool = True

    def value_grid(self) -> tuple[Fraction, ...]:
        return _grid(self.values, "value")

    def checked(self) -> None:
        if self.n_bidders < 1:
            raise ConstructionError("need at least one bidder")
        if rational(self.step) <= 0:
            raise ConstructionError("step must be positive")
        if self.tie not in TIE_POLICIES:
            raise ConstructionError(f"unknown tie policy {self.tie!r}")
        if self.order is not None and sorted(self.order) != list(range(self.n_bidders)):
            raise ConstructionError("order must be a permutation of the bidders")


def _tie_winner(candidates: Sequence[int], tie: str) -> int:
    return min(candidates) if tie == LOWEST_INDEX else max(candidates)


def _auction_types(n: int, values, labels) -> tuple[tuple[Utility, ...], ...]:
    """Bidder i with value v gets v - p on ``win:i@p`` and 0 otherwise."""
    out = []
    for i in range(n):
        row = []
        for v in values:
            pay = {}
            for lab in labels:
                winner, price = parse_win(lab)
                pay[lab] = v - price if winner == i else Fraction(0)
            row.append(Utility(f"v={fmt(v)}", pay))
        out.append(tuple(row))
    return tuple(out)


def win_label(winner: int, price: Fraction) -> str:
    return f"win:{winner}@{fmt(price)}"


def parse_win(label: str) -> tuple[int, Fraction]:
    head, price = label[len("win:"):].split("@")
    return int(head), Fraction(price)


def second_price(params: AuctionParams) -> Mechanism:
    """Sealed bids, encoded sequentially; every bidder's infoset hides earlier bids."""
    params.checked()
    values = params.value_grid()
    bids = _grid(params.prices if params.prices is not None else values, "bid")
    missing = [v for v in values if v not in bids]
    if missing:
        raise ConstructionError(f"values {[fmt(v) for v in missing]} are not on the bid grid")
    n = params.n_bidders
    b = TreeBuilder()

    def sub(i: int, placed: tuple[Fraction, ...]) -> int:
        if i == n:
            top = max(placed)
            winner = _tie_winner([j for j, x in enumerate(placed) if x == top], params.tie)
            rest = [x for j, x in enumerate(placed) if j != winner]
            price = max(rest) if rest else bids[0]
            return b.terminal(win_label(winner, price))
        return b.decision(i, f"bid:{i}", [(fmt(x), sub(i + 1, placed + (x,))) for x in bids])

    tree = b.build(sub(0, ()), n, [f"bidder{i}" for i in range(n)])
    types = _auction_types(n, values, tree.outcomes)
    truthful = tuple({f"v={fmt(v)}": {f"bid:{i}": fmt(v)} for v in values} for i in range(n))
    return Mechanism(tree, types, truthful, "second-price", _auction_meta(params, bids))


def _auction_meta(params: AuctionParams, prices) -> dict[str, str]:
    return {
        "bidders": str(params.n_bidders),
        "values": ",".join(fmt(v) for v in params.value_grid()),
        "prices": ",".join(fmt(p) for p in prices),
        "tie": params.tie,
        "continue_at_value": str(params.continue_at_value).lower(),
    }


def _clock(params: AuctionParams, ascending: bool) -> tuple[Fraction, ...]:
    values = params.value_grid()
    step = rational(params.step)
    if params.prices is None:
        lo, hi = values[0], values[-1] + step
        n_steps = (hi - lo) / step
        if n_steps.denominator != 1:
            raise ConstructionError("values are not on a lattice with the given step")
        ladder = tuple(lo + k * step for k in range(int(n_steps) + 1))
    else:
        ladder = _grid(params.prices, "price")
        if any(b - a != step for a, b in zip(ladder, ladder[1:])):
            raise ConstructionError("price grid spacing does not match the step")
    return ladder if ascending else ladder[::-1]


def ascending(params: AuctionParams) -> Mechanism:
    """Clock auction that cycles through the active bidders in a fixed order.

    Each asked bidder either accepts the current price or quits for good.
    When one bidder is left they win and pay the last price they accepted
    (the opening price if they were never asked).  If the clock runs off
    the top of the grid with several bidders active, the tie policy picks
    the winner at the top price.

    The default asking order puts the bidder favoured by the tie policy last
    in every round, so equal values resolve as they do in the sealed-bid
    auction with the same policy.
    """
    params.checked()
    n = params.n_bidders
    ladder = _clock(params, ascending=True)
    values = params.value_grid()
    if values[-1] >= ladder[-1] and not (values[-1] == ladder[-1] and not params.continue_at_value):
        raise ConstructionError("the clock must reach a price above every value")
    if params.order is not None:
        order = tuple(params.order)
    else:
        order = tuple(range(n - 1, -1, -1)) if params.tie == LOWEST_INDEX else tuple(range(n))
    b = TreeBuilder()

    def node(k: int, active: tuple[int, ...], pos: int, last: dict[int, Fraction],
             history: str) -> int:
        price = ladder[k]
        if pos == len(active):
            if k + 1 == len(ladder):
                return b.terminal(win_label(_tie_winner(active, params.tie), price))
            return node(k + 1, active, 0, last, history)
        i = active[pos]
        rest = active[:pos] + active[pos + 1:]
        if len(rest) == 1:
            j = rest[0]
            quit_child = b.terminal(win_label(j, last.get(j, ladder[0])))
        else:
            quit_child = node(k, rest, pos, last, history + f"{i}q")
        stay_child = node(k, active, pos + 1, {**last, i: price}, history + f"{i}c")
        return b.decision(i, f"asc:{i}@{fmt(price)}|{history}",
                          [("continue", stay_child), ("quit", quit_child)])

    if n == 1:
        root = b.terminal(win_label(0, ladder[0]))
    else:
        start = tuple(sorted(range(n), key=order.index))
        root = node(0, start, 0, {}, "")
    tree = b.build(root, n, [f"bidder{i}" for i in range(n)])
    types = _auction_types(n, values, tree.outcomes)
    truthful = []
    for i in range(n):
        own = tree.infosets_of(i)
        table = {}
        for v in values:
            table[f"v={fmt(v)}"] = {
                info.id: ("continue" if _accepts(_asked_price(info.id), v,
                                                  params.continue_at_value) else "quit")
                for info in own}
        truthful.append(table)
    return Mechanism(tree, types, tuple(truthful), "ascending", _auction_meta(params, ladder))


def _asked_price(infoset: str) -> Fraction:
    return Fraction(infoset.split("@", 1)[1].split("|", 1)[0])


def _accepts(price: Fraction, value: Fraction, at_value: bool) -> bool:
    return price < value or (at_value and price == value)


def reverse_clock(params: AuctionParams) -> Mechanism:
    """Descending offers to each seller in turn.

    At every offer the seller quits (keeps the good, payoff 0) or continues.
    After a continue the auctioneer, modelled as a fair chance move, either
    buys at the current offer or lowers it; lowering past the bottom of the
    ladder ends that seller's process without a sale.  ``values`` are the
    sellers' costs.
    """
    params.checked()
    n = params.n_bidders
    ladder = _clock(params, ascending=False) if params.prices is not None else None
    costs = params.value_grid()
    if ladder is None:
        ladder = _grid(sorted(set(costs) | {costs[-1] + rational(params.step)}), "offer")[::-1]
    half = Fraction(1, 2)
    b = TreeBuilder()

    def seller(i: int, done: tuple[str, ...]) -> int:
        if i == n:
            return b.terminal(",".join(done))

        def offer(k: int) -> int:
            p = ladder[k]
            keep = seller(i + 1, done + (f"s{i}:keep",))
            sold = seller(i + 1, done + (f"s{i}:sold@{fmt(p)}",))
            lower = offer(k + 1) if k + 1 < len(ladder) else seller(i + 1, done + (f"s{i}:keep",))
            cont = b.chance([("sell", half, sold), ("lower", half, lower)])
            prefix = ";".join(done)
            return b.decision(i, f"rev:{i}@{fmt(p)}|{prefix}",
                              [("continue", cont), ("quit", keep)])

        return offer(0)

    tree = b.build(seller(0, ()), n, [f"seller{i}" for i in range(n)])
    types = []
    for i in range(n):
        row = []
        for c in costs:
            pay = {}
            for lab in tree.outcomes:
                part = lab.split(",")[i]
                pay[lab] = Fraction(part.split("@")[1]) - c if "@" in part else Fraction(0)
            row.append(Utility(f"c={fmt(c)}", pay))
        types.append(tuple(row))
    truthful = []
    for i in range(n):
        table = {}
        for c in costs:
            table[f"c={fmt(c)}"] = {
                info.id: ("continue" if _accepts(c, _asked_price(info.id),
                                                  params.continue_at_value) else "quit")
                for info in tree.infosets_of(i)}
        truthful.append(table)
    meta = _auction_meta(params, ladder)
    meta["sellers"] = meta.pop("bidders")
    meta["costs"] = meta.pop("values")
    return Mechanism(tree, tuple(types), tuple(truthful), "reverse-clock", meta)


# --- object allocation ------------------------------------------------------

def goods(n_goods: int) -> tuple[str, ...]:
    return tuple(f"g{k}" for k in range(n_goods))


def rank_name(ranking: Sequence[str]) -> str:
    return ">".join(ranking)


def alloc_label(allocation: Sequence[str]) -> str:
    return "alloc:" + ",".join(allocation)


def parse_alloc(label: str) -> tuple[str, ...]:
    return tuple(label[len("alloc:"):].split(","))


def serial_dictatorship(rankings: Sequence[Sequence[str]], priority: Sequence[int]) -> tuple[str, ...]:
    """Each agent in priority order takes the best remaining good on their list."""
    taken: dict[int, str] = {}
    for agent in priority:
        taken[agent] = next(g for g in rankings[agent] if g not in taken.values())
    return tuple(taken[a] for a in range(len(rankings)))


def _rp_check(n_agents: int, n_goods: int, priority) -> tuple[int, ...]:
    if not 1 <= n_agents <= n_goods:
        raise ConstructionError("need 1 <= agents <= goods")
    if n_goods > MAX_RP_GOODS:
        raise ConstructionError(f"at most {MAX_RP_GOODS} goods are supported")
    if priority is None:
        return tuple(range(n_agents))
    priority = tuple(priority)
    if sorted(priority) != list(range(n_agents)):
        raise ConstructionError("priority must be a permutation of the agents")
    return priority


def _rp_types(n_agents: int, n_goods: int, labels) -> tuple[tuple[Utility, ...], ...]:
    """Ranking r pays (n_goods - position of the assigned good in r)."""
    gs = goods(n_goods)
    out = []
    for a in range(n_agents):
        row = []
        for ranking in itertools.permutations(gs):
            score = {g: n_goods - k for k, g in enumerate(ranking)}
            row.append(Utility(rank_name(ranking),
                               {lab: Fraction(score[parse_alloc(lab)[a]]) for lab in labels}))
        out.append(tuple(row))
    return tuple(out)


def static_rp(n_agents: int, n_goods: int, priority: Sequence[int] | None = None,
              random_order: bool = False) -> Mechanism:
    """Sealed rank-order lists processed by serial dictatorship."""
    fixed = _rp_check(n_agents, n_goods, priority)
    gs = goods(n_goods)
    lists = [rank_name(r) for r in itertools.permutations(gs)]
    b = TreeBuilder()

    def sub(i: int, submitted: tuple[tuple[str, ...], ...], prio) -> int:
        if i == n_agents:
            return b.terminal(alloc_label(serial_dictatorship(submitted, prio)))
        return b.decision(i, f"rank:{i}",
                          [(lst, sub(i + 1, submitted + (tuple(lst.split(">")),), prio))
                           for lst in lists])

    if random_order:
        orders = list(itertools.permutations(range(n_agents)))
        w = Fraction(1, len(orders))
        root = b.chance([("".join(map(str, o)), w, sub(0, (), o)) for o in orders])
    else:
        root = sub(0, (), fixed)
    tree = b.build(root, n_agents, [f"agent{i}" for i in range(n_agents)])
    types = _rp_types(n_agents, n_goods, tree.outcomes)
    truthful = tuple({u.name: {f"rank:{i}": u.name} for u in types[i]} for i in range(n_agents))
    return Mechanism(tree, types, truthful, "static-rp",
                     _rp_meta(n_agents, n_goods, fixed, random_order))


def _rp_meta(n_agents, n_goods, priority, random_order) -> dict[str, str]:
    return {"agents": str(n_agents), "goods": str(n_goods),
            "priority": "random" if random_order else ",".join(map(str, priority))}


def dynamic_rp(n_agents: int, n_goods: int, priority: Sequence[int] | None = None,
               random_order: bool = False) -> Mechanism:
    """Agents are approached in priority order and pick among the remaining goods.

    An agent's information set records only which goods are left.
    """
    fixed = _rp_check(n_agents, n_goods, priority)
    gs = goods(n_goods)
    b = TreeBuilder()

    def sub(k: int, prio, taken: dict[int, str]) -> int:
        if k == n_agents:
            return b.terminal(alloc_label([taken[a] for a in range(n_agents)]))
        agent = prio[k]
        left = [g for g in gs if g not in taken.values()]
        return b.decision(agent, f"pick:{agent}|{''.join(left)}",
                          [(g, sub(k + 1, prio, {**taken, agent: g})) for g in left])

    if random_order:
        orders = list(itertools.permutations(range(n_agents)))
        w = Fraction(1, len(orders))
        root = b.chance([("".join(map(str, o)), w, sub(0, o, {})) for o in orders])
    else:
        root = sub(0, fixed, {})
    tree = b.build(root, n_agents, [f"agent{i}" for i in range(n_agents)])
    types = _rp_types(n_agents, n_goods, tree.outcomes)
    truthful = []
    for i in range(n_agents):
        table = {}
        for u in types[i]:
            ranking = u.name.split(">")
            table[u.name] = {info.id: next(g for g in ranking if g in info.actions)
                             for info in tree.infosets_of(i)}
        truthful.append(table)
    return Mechanism(tree, types, tuple(truthful), "dynamic-rp",
                     _rp_meta(n_agents, n_goods, fixed, random_order))


def is_pareto_efficient(allocation: Sequence[str],
                        preferences: Sequence[Sequence[str]]) -> bool:
    """True iff no other one-good-per-agent allocation weakly improves everyone
    and strictly improves someone.  ``preferences[a]`` ranks every good."""
    rank = [{g: k for k, g in enumerate(pref)} for pref in preferences]
    pool = sorted(set(preferences[0])) if preferences else []
    current = [rank[a][allocation[a]] for a in range(len(allocation))]
    for other in itertools.permutations(pool, len(allocation)):
        r = [rank[a][other[a]] for a in range(len(other))]
        if all(x <= y for x, y in zip(r, current)) and r != current:
            return False
    return True


# --- bilateral trade --------------------------------------------------------

SELLER, BUYER = 0, 1


@dataclass(frozen=True)
class TradeParams:
    """Double-auction grids.  Costs and values default to half a step above
    each price, which removes payoff ties between adjacent offers."""

    prices: Sequence = tuple(range(7))
    alpha: object = Fraction(1, 2)
    costs: Sequence | None = None
    values: Sequence | None = None

    def grids(self):
        prices = _grid(self.prices, "price")
        half = (prices[1] - prices[0]) / 2 if len(prices) > 1 else Fraction(1, 2)
        costs = _grid(self.costs, "cost") if self.costs is not None else tuple(p + half for p in prices)
        values = _grid(self.values, "value") if self.values is not None else tuple(p + half for p in prices)
        return prices, costs, values


def trade_label(price: Fraction | None) -> str:
    return "none" if price is None else f"trade@{fmt(price)}"


def double_auction(params: TradeParams) -> Mechanism:
    """Seller offers s, buyer offers b (hidden); trade iff s <= b at alpha*s + (1-alpha)*b.

    A truthful map exists only on the side with a dominant strategy: the buyer
    when alpha = 1 (offer the highest price not above V), the seller when
    alpha = 0 (offer the lowest price not below C).
    """
    alpha = rational(params.alpha)
    if not 0 <= alpha <= 1:
        raise ConstructionError("alpha must lie in [0, 1]")
    prices, costs, values = params.grids()
    b = TreeBuilder()
    seller_moves = []
    for s in prices:
        buyer_moves = []
        for bid in prices:
            price = alpha * s + (1 - alpha) * bid if s <= bid else None
            buyer_moves.append((fmt(bid), b.terminal(trade_label(price))))
        seller_moves.append((fmt(s), b.decision(BUYER, "buyer", buyer_moves)))
    tree = b.build(b.decision(SELLER, "seller", seller_moves), 2, ["seller", "buyer"])

    def price_of(lab):
        return None if lab == "none" else Fraction(lab[len("trade@"):])

    seller_types = tuple(
        Utility(f"C={fmt(c)}", {lab: (price_of(lab) - c if price_of(lab) is not None else Fraction(0))
                                for lab in tree.outcomes}) for c in costs)
    buyer_types = tuple(
        Utility(f"V={fmt(v)}", {lab: (v - price_of(lab) if price_of(lab) is not None else Fraction(0))
                                for lab in tree.outcomes}) for v in values)
    seller_truth = buyer_truth = None
    if alpha == 1:
        buyer_truth = {u.name: {"buyer": fmt(max([p for p in prices if p <= v], default=prices[0]))}
                       for u, v in zip(buyer_types, values)}
    elif alpha == 0:
        seller_truth = {u.name: {"seller": fmt(min([p for p in prices if p >= c], default=prices[-1]))}
                        for u, c in zip(seller_types, costs)}
    meta = {"alpha": fmt(alpha), "prices": ",".join(map(fmt, prices)),
            "costs": ",".join(map(fmt, costs)), "values": ",".join(map(fmt, values))}
    return Mechanism(tree, (seller_types, buyer_types), (seller_truth, buyer_truth),
                     "double-auction", meta)


def own_infoset_price(tree: GameTree, infoset: str) -> Fraction:
    """Asked price encoded in a clock infoset id."""
    return _asked_price(infoset)


def outcome_of(mech: Mechanism, leaf: int) -> str:
    node = mech.tree.nodes[leaf]
    assert not isinstance(node, Decision)
    return node.outcome
