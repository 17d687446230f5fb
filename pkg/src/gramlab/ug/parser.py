"""Agenda-based chart parser for the unification grammar.

Edges are passive constituents over half-open token spans; traces are
zero-width edges that consume the front of a threading list.  Edges with
alphabetic-variant feature structures pack (share alternatives); a packed
derivation is replayed afterwards as one big constraint problem so every
trace's consumed gap item can be read back fully resolved.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from gramlab.featstruct import (
    Atom,
    Avm,
    ListFS,
    Var,
    avm,
    failed,
    fresh_var_name,
    get_path,
    rename,
    unify_all,
    unify_shared,
    variant,
)
from gramlab.ug.grammar import (
    CONFIGS,
    MERGED,
    SLOT_FEATURES,
    ChannelConfig,
    RuntimeUG,
    UGGrammar,
    UnknownTokenError,
)

MAX_DERIVATIONS_PER_EDGE = 4000


# ---------------------------------------------------------------------------
# Parse results.


@dataclass(frozen=True)
class PWord:
    word: str
    index: int


@dataclass(frozen=True)
class PTrace:
    cat: str
    gid: str  # filler identifier "i.j" (token span of the filler)
    channel: str
    position: int  # number of real tokens to the left of the trace


@dataclass(frozen=True)
class PTree:
    cat: str
    children: tuple

    def render(self) -> str:
        return _render(self)


def _render(node) -> str:
    if isinstance(node, PWord):
        return node.word
    if isinstance(node, PTrace):
        return f"t#{node.gid}"
    inner = " ".join(_render(c) for c in node.children)
    return f"[{node.cat.upper()} {inner}]" if inner else f"[{node.cat.upper()}]"


@dataclass(frozen=True)
class Arc:
    filler_start: int
    filler_end: int
    gap_pos: int
    channel: str
    gid: str

    def interval(self):
        lo = 2 * self.filler_start
        hi = 2 * self.gap_pos - 1
        return (lo, hi) if lo <= hi else (hi, lo)


@dataclass(frozen=True)
class UGParse:
    tree: PTree
    arcs: tuple

    def render(self) -> str:
        return self.tree.render()

    def bindings(self) -> dict:
        return {a.gid: a.gap_pos for a in self.arcs}


def extract_bindings(parse: UGParse) -> dict:
    """Map each filler identifier to the token position of its trace."""
    return parse.bindings()


def arcs_cross(a: Arc, b: Arc) -> bool:
    (a1, a2), (b1, b2) = a.interval(), b.interval()
    if a1 > b1:
        (a1, a2), (b1, b2) = (b1, b2), (a1, a2)
    return a1 < b1 <= a2 < b2


def check_ncd(arcs, config: ChannelConfig = MERGED):
    """No-crossing-dependencies check over filler->gap arcs.

    Arcs threaded through the same list must nest: under the merged
    configuration WH and tough arcs share one list and are compared with
    each other; under the channelized configuration only same-channel
    arcs are compared.  Verb movement always runs on its own list, so an
    inversion arc is never compared against an extraction arc.  Returns
    None on pass, or the offending arc pair.
    """
    arcs = sorted(arcs, key=lambda a: a.interval())
    for i, a in enumerate(arcs):
        for b in arcs[i + 1:]:
            if config.slot_of(a.channel) != config.slot_of(b.channel):
                continue
            if arcs_cross(a, b):
                return (a, b)
    return None


def crossing_pairs(arcs):
    """All crossing arc pairs regardless of channel (reporting helper)."""
    out = []
    arcs = sorted(arcs, key=lambda a: a.interval())
    for i, a in enumerate(arcs):
        for b in arcs[i + 1:]:
            if arcs_cross(a, b):
                out.append((a, b))
    return out


def propose_trace(channel: str, gaps_in: ListFS, want_cat=None, want_h=None, config=MERGED):
    """Consume the front of a channel's pending-filler list.

    Returns ``(trace_category_fs, gaps_out)`` when the list has a known
    front element whose category (and optional content requirement)
    matches; None otherwise.  Traces are only proposed on a non-empty
    list, which is what terminates gap consumption.
    """
    if not isinstance(gaps_in, ListFS) or not gaps_in.items:
        return None
    front = gaps_in.items[0]
    rest = ListFS(gaps_in.items[1:], gaps_in.tail)
    req = [("gcat", Atom(want_cat))] if want_cat else []
    if want_h is not None:
        req.append(("gfs", want_h))
    got = unify_shared(front, Avm(tuple(req)))
    if failed(got):
        return None
    trace = Avm((("cat", got.get("gcat")), ("h", got.get("gfs") or Avm())))
    return trace, rest


# ---------------------------------------------------------------------------
# Chart parsing.


class Edge:
    __slots__ = ("i", "j", "cat", "fs", "alts", "popped")

    def __init__(self, i, j, cat, fs, alt):
        self.i = i
        self.j = j
        self.cat = cat
        self.fs = fs
        self.alts = [alt]
        self.popped = False

    def __repr__(self):
        return f"<Edge {self.cat} {self.i}..{self.j} alts={len(self.alts)}>"


class Active:
    __slots__ = ("rule", "fs", "dot", "i", "j", "children")

    def __init__(self, rule, fs, dot, i, j, children):
        self.rule = rule
        self.fs = fs
        self.dot = dot  # next daughter index (1-based)
        self.i = i
        self.j = j
        self.children = children


def _gap_load(fs) -> int:
    """Known items across all threading lists of a category fs."""
    total = 0
    if isinstance(fs, Avm):
        for f, v in fs.feats:
            if f.endswith("_in") or f.endswith("_out"):
                if isinstance(v, ListFS):
                    total += len(v.items)
    return total


def _fresh_var():
    return Var(fresh_var_name())


def _bind_filler_ids(fs, rule, child_span, dot):
    """Bind gid variables of pushes whose source daughter just attached."""
    for channel, slot, src, target in rule.pushes:
        if src != dot:
            continue
        fin, _ = SLOT_FEATURES[slot]
        gid = Atom(f"{child_span[0]}.{child_span[1]}")
        # open-tailed singleton so only the pushed front item is touched
        probe = Avm(
            ((f"d{target}", Avm(((fin, ListFS((avm(gid=gid),), _fresh_var())),))),)
        )
        fs = unify_shared(fs, probe)
        if failed(fs):
            return fs
    return fs


class Chart:
    def __init__(self, rt: RuntimeUG, tokens):
        self.rt = rt
        self.tokens = tokens
        self.n = len(tokens)
        self.max_load = 2 * self.n + 4
        self.passive = {}  # (i, j, cat) -> [Edge]
        self.by_start = {}  # (i, cat) -> [Edge]
        self.actives_at = {}  # (j, cat) -> [Active]
        self.agenda = deque()

    def run(self):
        for idx, word in enumerate(self.tokens):
            entries = self.rt.lexical.get(word)
            if not entries:
                raise UnknownTokenError(word, idx)
            for entry, template in entries:
                self.add_edge(idx, idx + 1, entry.cat, rename(template), ("lex", entry, idx))
        for pos in range(self.n + 1):
            for slot, cat, template in self.rt.traces:
                self.add_edge(pos, pos, cat, rename(template), ("trace", slot, cat, pos))
        while self.agenda:
            edge = self.agenda.popleft()
            edge.popped = True
            self.extend_actives(edge)
            self.start_actives(edge)

    def add_edge(self, i, j, cat, fs, alt):
        if _gap_load(fs) > self.max_load:
            return None
        for edge in self.passive.get((i, j, cat), ()):
            if variant(edge.fs, fs):
                edge.alts.append(alt)
                return None
        edge = Edge(i, j, cat, fs, alt)
        self.passive.setdefault((i, j, cat), []).append(edge)
        self.by_start.setdefault((i, cat), []).append(edge)
        self.agenda.append(edge)
        return edge

    def start_actives(self, edge):
        for rule in self.rt.rules_by_first(edge.cat):
            fs = rename(rule.fs)
            self._advance(Active(rule, fs, 1, edge.i, edge.i, ()), edge)

    def extend_actives(self, edge):
        for active in list(self.actives_at.get((edge.i, edge.cat), ())):
            self._advance(active, edge)

    def _advance(self, active, edge):
        slot = f"d{active.dot}"
        merged = unify_shared(active.fs, Avm(((slot, rename(edge.fs)),)))
        if failed(merged):
            return
        merged = _bind_filler_ids(merged, active.rule, (edge.i, edge.j), active.dot)
        if failed(merged):
            return
        children = active.children + (edge,)
        dot, j = active.dot + 1, edge.j
        if dot > active.rule.arity:
            mother = get_path(merged, ("m",))
            self.add_edge(active.i, j, active.rule.cats[0], mother, ("rule", active.rule, children))
            return
        nxt = Active(active.rule, merged, dot, active.i, j, children)
        want = active.rule.cats[dot]
        self.actives_at.setdefault((j, want), []).append(nxt)
        # pair only with edges already processed; pending ones pair when
        # they leave the agenda, so each (active, edge) combines once
        for waiting in list(self.by_start.get((j, want), ())):
            if waiting.popped:
                self._advance(nxt, waiting)


# ---------------------------------------------------------------------------
# Replay: one constraint problem per derivation.


def _derivations(edge, limit):
    out = []

    def rec(e):
        results = []
        for alt in e.alts:
            if alt[0] in ("lex", "trace"):
                results.append(alt)
            else:
                _, rule, children = alt
                combos = [()]
                for child in children:
                    child_ds = rec(child)
                    combos = [c + (d,) for c in combos for d in child_ds]
                    if len(combos) > limit:
                        combos = combos[:limit]
                results.extend(("rule", rule, c) for c in combos)
        return results[:limit]

    out = rec(edge)
    return out


def _realize(deriv, rt):
    """Solve the whole derivation in one variable scope.

    Each derivation node gets a region ``n<id>`` in one combined AVM;
    parent daughter slots are tied to child mothers by shared variables,
    and the root is closed against the empty-channel pattern.  Returns the
    solved AVM or None when the closure fails.
    """
    constraints = []
    counter = [0]

    def new_node():
        counter[0] += 1
        return counter[0]

    def build(d, node):
        """Emit constraints for derivation node ``d``; returns its span."""
        kind = d[0]
        if kind == "lex":
            _, entry, idx = d
            template = dict(rt.lexical[entry.word])[entry]
            constraints.append(Avm(((f"n{node}", Avm((("m", rename(template)),))),)))
            return (idx, idx + 1)
        if kind == "trace":
            _, slot, cat, pos = d
            template = next(t for s, c, t in rt.traces if s == slot and c == cat)
            constraints.append(Avm(((f"n{node}", Avm((("m", rename(template)),))),)))
            return (pos, pos)
        _, rule, children = d
        constraints.append(Avm(((f"n{node}", rename(rule.fs)),)))
        spans = []
        for k, child in enumerate(children, 1):
            cnode = new_node()
            link = _fresh_var()
            constraints.append(
                Avm(
                    (
                        (f"n{node}", Avm(((f"d{k}", link),))),
                        (f"n{cnode}", Avm((("m", link),))),
                    )
                )
            )
            spans.append(build(child, cnode))
        for channel, slot, src, target in rule.pushes:
            fin, _ = SLOT_FEATURES[slot]
            gid = Atom(f"{spans[src - 1][0]}.{spans[src - 1][1]}")
            constraints.append(
                Avm(
                    ((f"n{node}",
                      Avm(((f"d{target}", Avm(((fin, ListFS((avm(gid=gid),), _fresh_var())),))),))),)
                )
            )
        return (spans[0][0], spans[-1][1]) if spans else (0, 0)

    root = new_node()
    build(deriv, root)
    constraints.append(Avm(((f"n{root}", Avm((("m", rename(rt.root)),))),)))
    solved = unify_all(*constraints)
    if failed(solved):
        return None
    return solved


def _tree_of(deriv, solved, rt, node_iter, pos):
    """Rebuild the parse tree, reading resolved traces from ``solved``."""
    node = next(node_iter)
    kind = deriv[0]
    if kind == "lex":
        _, entry, idx = deriv
        return PWord(entry.word, idx), pos + 1
    if kind == "trace":
        _, slot, cat, _ = deriv
        fin, _ = SLOT_FEATURES[slot]
        fs = get_path(solved, (f"n{node}", "m"))
        item = get_path(fs, (fin,))
        gid = chan = "?"
        if isinstance(item, ListFS) and item.items:
            front = item.items[0]
            g = front.get("gid") if isinstance(front, Avm) else None
            c = front.get("chan") if isinstance(front, Avm) else None
            gid = g.name if isinstance(g, Atom) else "?"
            chan = c.name if isinstance(c, Atom) else "?"
        return PTrace(cat, gid, chan, pos), pos
    _, rule, children = deriv
    kids = []
    for child in children:
        sub, pos = _tree_of(child, solved, rt, node_iter, pos)
        kids.append(sub)
    return PTree(rule.cats[0], tuple(kids)), pos


def _arcs_of(tree):
    arcs = []

    def walk(node):
        if isinstance(node, PTrace):
            if "." in node.gid:
                s, e = node.gid.split(".")
                arcs.append(Arc(int(s), int(e), node.position, node.channel, node.gid))
        elif isinstance(node, PTree):
            for c in node.children:
                walk(c)

    walk(tree)
    return tuple(arcs)


def _node_order(deriv):
    """Node ids in the order _realize assigned them (preorder)."""
    order = []

    def rec(d):
        order.append(d)
        if d[0] == "rule":
            for child in d[2]:
                rec(child)

    rec(deriv)
    return iter(range(1, len(order) + 1))


def ug_parse(grammar: UGGrammar, tokens, config=MERGED):
    """All complete parses of ``tokens`` whose root closes every channel."""
    if isinstance(config, str):
        config = CONFIGS[config]
    rt = grammar.runtime(config)
    chart = Chart(rt, list(tokens))
    chart.run()
    n = len(tokens)
    parses = {}
    for (i, j, cat), edges in chart.passive.items():
        if (i, j, cat) != (0, n, grammar.start):
            continue
        for edge in edges:
            probe = unify_shared(rename(edge.fs), rename(rt.root))
            if failed(probe):
                continue
            for deriv in _derivations(edge, MAX_DERIVATIONS_PER_EDGE):
                solved = _realize(deriv, rt)
                if solved is None:
                    continue
                tree, _ = _tree_of(deriv, solved, rt, _node_order(deriv), 0)
                parse = UGParse(tree, _arcs_of(tree))
                parses[parse.render() + repr(sorted(parse.bindings().items()))] = parse
    return sorted(parses.values(), key=lambda p: p.render())
