"""Bilateral trade: when is there a best offer to make?

The price is split between the two offers by ``alpha``.  With ``alpha = 1``
the buyer's offer sets the price, so the buyer has a dominant offer and the
seller only has to guess which buyer they face.  With ``alpha = 1/2`` each
side's best offer depends on what the other side does, and no offer is a
best reply to every reasonable play.
"""
from fractions import Fraction

from simplicity import (FirstOrderBelief, TradeParams, double_auction, is_strategically_simple,
                        robust_strategies)


def main():
    take_it = double_auction(TradeParams(prices=range(11), alpha=1, costs=[2]))
    names = [u.name for u in take_it.types[1]]
    belief = FirstOrderBelief(0, {(n,): Fraction(1, len(names)) for n in names}, "uniform")
    robust, refuted = robust_strategies(take_it, 0, "C=2", belief)
    print("seller with cost 2, buyer values uniform on 1/2, 3/2, ..., 21/2")
    print("  robust offers:", [s["seller"] for s in robust])
    for w in refuted[:3]:
        print(f"  offer {w.strategy['seller']} loses to {w.better['seller']}: "
              f"{w.payoffs[0]} < {w.payoffs[1]}")

    print("\nstrategic simplicity on the built-in belief family")
    for alpha in (1, Fraction(1, 2)):
        mech = double_auction(TradeParams(prices=range(7), alpha=alpha))
        v = is_strategically_simple(mech)
        print(f"  alpha={alpha}: {'holds' if v.holds else 'fails'}", end="")
        if not v.holds:
            print(f" (player {v.witness.player}, {v.witness.type} has no robust offer)", end="")
        print()


if __name__ == "__main__":
    main()
