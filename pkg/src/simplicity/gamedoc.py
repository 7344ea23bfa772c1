"""The ``gamedoc/1`` text format for mechanisms, foresight tables and beliefs.

A document is a header line followed by one record per line::

    gamedoc/1
    mechanism second-price
    param n_bidders 2
    players bidder0 bidder1
    root 0
    outcome none
    node 0 decision 0 bid:0 0 1 1 2
    node 3 chance heads 1/2 4 tails 1/2 5
    node 4 terminal none
    type 0 v=1 none 0 win:0@0 1
    truthful 0 v=1 bid:0 1
    foresight bid:0 bid:0 ask:0
    belief uniform 0 1/2 v=0

Tokens are separated by blanks.  A token holding blanks, quotes, ``#`` or a
backslash is written as a JSON string.  ``#`` starts a comment.  Rationals
are ``p/q`` or decimals and are read exactly.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .foresight import TABLE, ForesightSpec
from .game import Chance, Decision, GameTree, Terminal, Utility, validate
from .mechanisms import Mechanism
from .strategic import FirstOrderBelief

HEADER = "gamedoc/1"
_TOKEN = re.compile(r'"(?:[^"\\\n]|\\.)*"|[^\s"#]+|#.*|"')
_NEEDS_QUOTES = re.compile(r'[\s"#\\]')


class Issue(NamedTuple):
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class GameDocError(ValueError):
    def __init__(self, issues: list[Issue]):
        self.issues = sorted(issues)
        super().__init__("\n".join(map(str, self.issues)))


@dataclass
class GameDoc:
    tree: GameTree
    types: tuple[tuple[Utility, ...], ...]
    truthful: tuple[dict | None, ...]
    outcomes: tuple[str, ...] = ()
    mechanism: str = ""
    params: dict[str, str] = field(default_factory=dict)
    foresight: dict[str, frozenset[str]] = field(default_factory=dict)
    beliefs: tuple[FirstOrderBelief, ...] = ()
    version: int = 1

    def __post_init__(self):
        self.outcomes = tuple(sorted(set(self.outcomes) | set(self.tree.outcomes)))

    @classmethod
    def from_mechanism(cls, mech: Mechanism, foresight: ForesightSpec | None = None,
                       beliefs=()) -> GameDoc:
        table = {}
        if foresight is not None:
            if foresight.kind != TABLE:
                raise ValueError("only table foresight is stored in documents")
            table = {k: frozenset(v) for k, v in foresight.table.items()}
        return cls(mech.tree, mech.types, tuple(None if t is None else dict(t)
                                                 for t in mech.truthful),
                   tuple(mech.tree.outcomes), mech.name, dict(mech.params), table,
                   tuple(beliefs))

    def to_mechanism(self) -> Mechanism:
        return Mechanism(self.tree, self.types, self.truthful, self.mechanism, dict(self.params))

    def foresight_spec(self) -> ForesightSpec | None:
        return ForesightSpec(TABLE, dict(self.foresight)) if self.foresight else None

    def beliefs_for(self, player: int) -> list[FirstOrderBelief]:
        return [b for b in self.beliefs if b.owner == player]


# -- serialization ----------------------------------------------------------

def quote(token: str) -> str:
    if token == "" or _NEEDS_QUOTES.search(token):
        return json.dumps(token, ensure_ascii=False)
    return token


def _line(*tokens) -> str:
    return " ".join(quote(str(t)) for t in tokens)


def serialize(doc: GameDoc) -> str:
    tree = doc.tree
    out = [HEADER]
    if doc.mechanism:
        out.append(_line("mechanism", doc.mechanism))
    out += [_line("param", k, v) for k, v in sorted(doc.params.items())]
    out.append(_line("players", *tree.player_names))
    out.append(_line("root", tree.root))
    out += [_line("outcome", o) for o in doc.outcomes]
    for n in sorted(tree.nodes):
        node = tree.nodes[n]
        if isinstance(node, Decision):
            out.append(_line("node", n, "decision", node.player, node.infoset,
                             *(x for move in node.moves for x in move)))
        elif isinstance(node, Chance):
            out.append(_line("node", n, "chance", *(x for move in node.moves for x in move)))
        else:
            out.append(_line("node", n, "terminal", node.outcome))
    for p, space in enumerate(doc.types):
        for u in space:
            out.append(_line("type", p, u.name,
                             *(x for o in doc.outcomes if o in u.payoffs
                               for x in (o, u.payoffs[o]))))
    for p, table in enumerate(doc.truthful):
        if table is None:
            continue
        for u in doc.types[p]:
            if u.name in table:
                out.append(_line("truthful", p, u.name,
                                 *(x for k in sorted(table[u.name])
                                   for x in (k, table[u.name][k]))))
    for k in sorted(doc.foresight):
        out.append(_line("foresight", k, *sorted(doc.foresight[k])))
    for b in doc.beliefs:
        for names, w in sorted(b.weights.items()):
            out.append(_line("belief", b.name, b.owner, w, *names))
    return "\n".join(out) + "\n"


# -- parsing ----------------------------------------------------------------

class _Tok(NamedTuple):
    text: str
    line: int
    col: int


def tokenize(line: str, lineno: int) -> list[_Tok]:
    out = []
    for m in _TOKEN.finditer(line):
        raw = m.group(0)
        if raw.startswith("#"):
            break
        if raw == '"':
            raise GameDocError([Issue(lineno, m.start() + 1, "unterminated string")])
        text = json.loads(raw) if raw.startswith('"') else raw
        out.append(_Tok(text, lineno, m.start() + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.issues: list[Issue] = []
        self.mechanism = ""
        self.params: dict[str, str] = {}
        self.players: list[str] | None = None
        self.root: int | None = None
        self.outcomes: dict[str, _Tok] = {}
        self.nodes: dict[int, object] = {}
        self.node_tok: dict[int, _Tok] = {}
        self.infoset_tok: dict[str, _Tok] = {}
        self.refs: list[tuple[int, _Tok]] = []
        self.labels: list[_Tok] = []
        self.types: dict[int, list[tuple[_Tok, dict[str, Fraction]]]] = {}
        self.truthful: dict[int, dict[str, tuple[_Tok, dict[str, str]]]] = {}
        self.foresight: dict[str, tuple[_Tok, frozenset[str]]] = {}
        self.beliefs: dict[tuple[str, int], tuple[_Tok, dict]] = {}

    def err(self, tok: _Tok, msg: str) -> None:
        self.issues.append(Issue(tok.line, tok.col, msg))

    def int_(self, tok: _Tok, what: str) -> int | None:
        if re.fullmatch(r"-?\d+", tok.text):
            return int(tok.text)
        self.err(tok, f"expected {what}, got {tok.text!r}")
        return None

    def rat(self, tok: _Tok) -> Fraction | None:
        try:
            return Fraction(tok.text)
        except (ValueError, ZeroDivisionError):
            self.err(tok, f"not a rational number: {tok.text!r}")
            return None

    def pairs(self, head: _Tok, rest: list[_Tok], width: int, what: str):
        if len(rest) % width:
            self.err(head, f"{what} must come in groups of {width}")
            return []
        return [rest[i:i + width] for i in range(0, len(rest), width)]

    def run(self) -> GameDoc:
        lines = self.text.split("\n")
        seen_header = False
        for lineno, raw in enumerate(lines, 1):
            try:
                toks = tokenize(raw, lineno)
            except GameDocError as e:
                self.issues += e.issues
                continue
            if not toks:
                continue
            if not seen_header:
                if toks[0].text != HEADER or len(toks) != 1:
                    self.err(toks[0], f"expected header {HEADER!r}")
                    break
                seen_header = True
                continue
            handler = getattr(self, "rec_" + toks[0].text, None)
            if handler is None:
                self.err(toks[0], f"unknown record {toks[0].text!r}")
                continue
            handler(toks[0], toks[1:])
        if not seen_header and not self.issues:
            self.issues.append(Issue(1, 1, f"missing header {HEADER!r}"))
        if self.issues:
            raise GameDocError(self.issues)
        return self.assemble()

    # records

    def rec_mechanism(self, head, rest):
        if len(rest) != 1:
            return self.err(head, "mechanism takes one name")
        self.mechanism = rest[0].text

    def rec_param(self, head, rest):
        if len(rest) != 2:
            return self.err(head, "param takes a key and a value")
        if rest[0].text in self.params:
            return self.err(rest[0], f"duplicate param {rest[0].text!r}")
        self.params[rest[0].text] = rest[1].text

    def rec_players(self, head, rest):
        if self.players is not None:
            return self.err(head, "duplicate players record")
        if not rest:
            return self.err(head, "players needs at least one name")
        self.players = [t.text for t in rest]

    def rec_root(self, head, rest):
        if len(rest) != 1:
            return self.err(head, "root takes one node id")
        self.root = self.int_(rest[0], "node id")
        self.refs.append((self.root, rest[0]))

    def rec_outcome(self, head, rest):
        if len(rest) != 1:
            return self.err(head, "outcome takes one label")
        if rest[0].text in self.outcomes:
            return self.err(rest[0], f"duplicate outcome {rest[0].text!r}")
        self.outcomes[rest[0].text] = rest[0]

    def rec_node(self, head, rest):
        if len(rest) < 2:
            return self.err(head, "node needs an id and a kind")
        n = self.int_(rest[0], "node id")
        if n is None:
            return
        if n in self.nodes:
            return self.err(rest[0], f"duplicate node {n}")
        kind, args = rest[1], rest[2:]
        if kind.text == "terminal":
            if len(args) != 1:
                return self.err(kind, "terminal takes one outcome label")
            self.labels.append(args[0])
            node = Terminal(args[0].text)
        elif kind.text == "decision":
            if len(args) < 2:
                return self.err(kind, "decision needs a player and an infoset")
            p = self.int_(args[0], "player index")
            moves = []
            for a, c in self.pairs(kind, args[2:], 2, "action/child"):
                ci = self.int_(c, "node id")
                if ci is not None:
                    self.refs.append((ci, c))
                    moves.append((a.text, ci))
            if p is None:
                return
            node = Decision(p, args[1].text, tuple(moves))
            self.infoset_tok.setdefault(args[1].text, args[1])
        elif kind.text == "chance":
            moves = []
            for e, pr, c in self.pairs(kind, args, 3, "edge/probability/child"):
                q, ci = self.rat(pr), self.int_(c, "node id")
                if q is not None and ci is not None:
                    self.refs.append((ci, c))
                    moves.append((e.text, q, ci))
            node = Chance(tuple(moves))
        else:
            return self.err(kind, f"unknown node kind {kind.text!r}")
        self.nodes[n] = node
        self.node_tok[n] = rest[0]

    def rec_type(self, head, rest):
        if len(rest) < 2:
            return self.err(head, "type needs a player and a name")
        p = self.int_(rest[0], "player index")
        pay = {}
        for lab, v in self.pairs(head, rest[2:], 2, "outcome/payoff"):
            self.labels.append(lab)
            q = self.rat(v)
            if q is not None:
                pay[lab.text] = q
        if p is not None:
            self.types.setdefault(p, []).append((rest[1], pay))

    def rec_truthful(self, head, rest):
        if len(rest) < 2:
            return self.err(head, "truthful needs a player and a type")
        p = self.int_(rest[0], "player index")
        strat = {k.text: a.text for k, a in self.pairs(head, rest[2:], 2, "infoset/action")}
        if p is not None:
            table = self.truthful.setdefault(p, {})
            if rest[1].text in table:
                return self.err(rest[1], f"duplicate truthful strategy for {rest[1].text!r}")
            table[rest[1].text] = (rest[1], strat)

    def rec_foresight(self, head, rest):
        if not rest:
            return self.err(head, "foresight needs an infoset")
        if rest[0].text in self.foresight:
            return self.err(rest[0], f"duplicate foresight entry {rest[0].text!r}")
        self.foresight[rest[0].text] = (rest[0], frozenset(t.text for t in rest[1:]))

    def rec_belief(self, head, rest):
        if len(rest) < 3:
            return self.err(head, "belief needs a name, an owner and a weight")
        owner, w = self.int_(rest[1], "player index"), self.rat(rest[2])
        if owner is None or w is None:
            return
        key = (rest[0].text, owner)
        tok, weights = self.beliefs.setdefault(key, (rest[0], {}))
        names = tuple(t.text for t in rest[3:])
        if names in weights:
            return self.err(rest[3] if len(rest) > 3 else rest[2], "duplicate belief profile")
        weights[names] = w

    # assembly and validation

    def assemble(self) -> GameDoc:
        if self.players is None:
            self.issues.append(Issue(1, 1, "missing players record"))
        if self.root is None:
            self.issues.append(Issue(1, 1, "missing root record"))
        for n, tok in self.refs:
            if n not in self.nodes:
                self.err(tok, f"dangling reference to node {n}")
        for tok in self.labels:
            if tok.text not in self.outcomes:
                self.err(tok, f"undefined outcome {tok.text!r}")
        if self.issues:
            raise GameDocError(self.issues)
        n_players = len(self.players)
        tree = GameTree(dict(self.nodes), self.root, n_players, tuple(self.players))
        for v in validate(tree):
            self._place(v.node, v.infoset, str(v))
        if self.issues:
            raise GameDocError(self.issues)
        bad = [p for p in list(self.types) + list(self.truthful) if not 0 <= p < n_players]
        for p in bad:
            self.issues.append(Issue(1, 1, f"player {p} does not exist"))
        if self.issues:
            raise GameDocError(self.issues)
        types = tuple(tuple(Utility(t.text, pay) for t, pay in self.types.get(p, ()))
                      for p in range(n_players))
        truthful = tuple(
            {name: s for name, (_, s) in self.truthful[p].items()} if p in self.truthful else None
            for p in range(n_players))
        mech = Mechanism(tree, types, truthful, self.mechanism, self.params)
        for v in mech.validate():
            self._place_subject(v)
        for k, (tok, fam) in self.foresight.items():
            if k not in tree.infosets:
                self.err(tok, f"foresight entry for unknown infoset {k!r}")
        if not self.issues:
            fs = ForesightSpec(TABLE, {k: fam for k, (_, fam) in self.foresight.items()})
            for problem in fs.problems(tree):
                self.issues.append(Issue(1, 1, problem))
        beliefs = []
        for (name, owner), (tok, weights) in self.beliefs.items():
            b = FirstOrderBelief(owner, weights, name)
            for problem in b.problems(mech) if 0 <= owner < n_players else ["bad owner"]:
                self.err(tok, f"belief {name!r}: {problem}")
            beliefs.append(b)
        if self.issues:
            raise GameDocError(self.issues)
        return GameDoc(tree, types, truthful, tuple(self.outcomes), self.mechanism,
                       dict(self.params),
                       {k: fam for k, (_, fam) in self.foresight.items()}, tuple(beliefs))

    def _place(self, node, infoset, msg):
        if node is not None and node in self.node_tok:
            return self.err(self.node_tok[node], msg)
        if infoset is not None and infoset in self.infoset_tok:
            return self.err(self.infoset_tok[infoset], msg)
        self.issues.append(Issue(1, 1, msg))

    def _place_subject(self, v):
        m = re.fullmatch(r"(type|truthful) (\d+)/(.*)", v.subject)
        if m:
            p, name = int(m.group(2)), m.group(3)
            if m.group(1) == "type":
                for tok, _ in self.types.get(p, ()):
                    if tok.text == name:
                        return self.err(tok, str(v))
            elif name in self.truthful.get(p, {}):
                return self.err(self.truthful[p][name][0], str(v))
        self._place(v.node, v.infoset, str(v))


def parse(text: str) -> GameDoc:
    """Read and validate a document; raises :class:`GameDocError` with positions."""
    return _Parser(text).run()


def dumps(mech: Mechanism, **kw) -> str:
    return serialize(GameDoc.from_mechanism(mech, **kw))


def loads(text: str) -> Mechanism:
    return parse(text).to_mechanism()
