"""Sealed bids against a rising clock.

Both auctions give truthful bidders the same incentives in the usual
sense: no bid beats your value whatever the others do.  The clock is also
obviously safe, and the sealed bid is not.  Run with ``python3 demos/auctions.py``.
"""
from simplicity import (AuctionParams, ascending, is_osp, is_strategy_proof, one_step_simple,
                        second_price, strong_osp)


def show(title, verdict):
    print(f"  {title:<20} {'holds' if verdict.holds else 'fails'}")
    return verdict


def main():
    params = AuctionParams(2, values=range(5))
    sealed, clock = second_price(params), ascending(params)

    print("second-price, two bidders, values 0..4")
    show("strategy-proof", is_strategy_proof(sealed))
    w = show("obviously SP", is_osp(sealed)).witness
    print(f"    bidder {w.player} with {w.type} bids {w.plan[w.infoset]}: worst payoff {w.worst}")
    print(f"    bidding {w.deviation[w.infoset]} instead can pay {w.best}")
    print(f"    replays: {w.replay(sealed)}")

    print("\nascending clock, same bidders")
    show("strategy-proof", is_strategy_proof(clock))
    show("obviously SP", is_osp(clock))
    show("one-step simple", one_step_simple(clock))
    w = show("strongly obvious", strong_osp(clock)).witness
    # A bidder who cannot trust their own later moves fears staying in.
    print(f"    at {w.infoset!r}, {w.type} staying in may end at {w.worst}; "
          f"quitting guarantees {w.best}")


if __name__ == "__main__":
    main()
