"""Serial dictatorship, asked all at once or one agent at a time.

Both versions allocate the same goods.  When agents submit full rankings up
front, a truthful agent cannot rule out a bad outcome that a lie might
avoid, so the static form is not obviously strategy-proof.  Asking each agent
in turn for a pick from what is left is.
"""
import itertools

from simplicity import dynamic_rp, is_osp, is_strategy_proof, play, static_rp, strong_osp
from simplicity.mechanisms import goods, parse_alloc, rank_name


def main():
    static, dynamic = static_rp(3, 3), dynamic_rp(3, 3)
    print(f"static:  {len(static.tree.nodes)} nodes, SP {is_strategy_proof(static).holds}, "
          f"OSP {is_osp(static).holds}")
    print(f"dynamic: {len(dynamic.tree.nodes)} nodes, OSP {is_osp(dynamic).holds}, "
          f"strongly obvious {strong_osp(dynamic).holds}")

    w = is_osp(static).witness
    print(f"\nagent {w.player} ({w.type}) reporting truthfully can end with payoff {w.worst};")
    print(f"the report {w.deviation[w.infoset]} can end with {w.best}")

    names = [rank_name(r) for r in itertools.permutations(goods(3))]
    same = 0
    for prof in itertools.product(names, repeat=3):
        outs = []
        for mech in (static, dynamic):
            leaf = play(mech.tree, {p: mech.truth(p, n) for p, n in enumerate(prof)})
            outs.append(parse_alloc(mech.tree.nodes[leaf].outcome))
        same += outs[0] == outs[1]
    print(f"\nthe two agree on {same} of {len(names) ** 3} preference profiles")


if __name__ == "__main__":
    main()
