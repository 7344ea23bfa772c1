"""Exact extensive-form mechanisms and certifiers for incentive simplicity.

Mechanisms are finite game trees with rational payoffs.  Each certifier
returns a :class:`Verdict` that either carries a certificate or a witness
that replays against the tree.
"""
from .dominance import (dominant_strategies, is_osp, is_strategy_proof, is_weakly_group_sp,
                        obviously_dominates, weakly_dominates)
from .foresight import (FULL_FORESIGHT, ONE_STEP_FORESIGHT, SELF_FORESIGHT, ForesightSpec,
                        PartialPlan, f_dominant, is_f_simple, one_step_simple, strong_osp)
from .game import (Budget, Chance, Decision, GameError, GameTree, MalformedStrategyError,
                   SizeLimitError, Terminal, TreeBuilder, Utility, expected_payoff, play,
                   validate)
from .gamedoc import GameDoc, GameDocError, dumps, loads, parse, serialize
from .mechanisms import (AuctionParams, ConstructionError, Mechanism, TradeParams, ascending,
                         double_auction, dynamic_rp, reverse_clock, second_price, static_rp)
from .strategic import (FirstOrderBelief, builtin_beliefs, is_robust, is_strategically_simple,
                        robust_strategies, undominated)
from .witness import Verdict, Witness, witness_from_json

__all__ = [
    "AuctionParams", "Budget", "Chance", "ConstructionError", "Decision", "FULL_FORESIGHT",
    "FirstOrderBelief", "ForesightSpec", "GameDoc", "GameDocError", "GameError", "GameTree",
    "MalformedStrategyError", "Mechanism", "ONE_STEP_FORESIGHT", "PartialPlan",
    "SELF_FORESIGHT", "SizeLimitError", "Terminal", "TradeParams", "TreeBuilder", "Utility",
    "Verdict", "Witness", "ascending", "builtin_beliefs", "dominant_strategies",
    "double_auction", "dumps", "dynamic_rp", "expected_payoff", "f_dominant", "is_f_simple",
    "is_osp", "is_robust", "is_strategically_simple", "is_strategy_proof",
    "is_weakly_group_sp", "loads", "obviously_dominates", "one_step_simple", "parse", "play",
    "reverse_clock", "robust_strategies", "second_price", "serialize", "static_rp",
    "strong_osp", "undominated", "validate", "weakly_dominates", "witness_from_json",
]
