"""Immutable feature structures and their unification algebra.

A feature structure is one of:

* ``Atom`` -- a case-sensitive symbol (``sg``, ``masc``, ``plus`` ...),
* ``Var`` -- a named variable, written ``?name``,
* ``Avm`` -- an attribute-value matrix with ordered, unique feature names,
* ``ListFS`` -- a sequence of feature structures with an optionally open
  tail (a difference list), written ``<a, b>`` or ``<a, b|?rest>``.

Values are immutable and may be shared freely.  Re-entrancy inside one
structure is plain object sharing: the same ``Avm`` or ``ListFS`` object
reachable along two paths is one node, printed with ``#n`` tags.  Atoms
and variables are interned, so object identity coincides with name
equality for them; two occurrences of ``?x`` always denote the same node.

``unify`` returns the most general unifier as a fresh structure (inputs
are never mutated) or a ``UnifyFailure`` carrying the feature path of the
clash.  The occurs check is always on: a binding that would create a
cyclic structure fails rather than building the cycle.

The empty AVM ``[]`` carries no information and unifies with anything,
including atoms and lists.
"""

from __future__ import annotations

import itertools
import re


class FeatureStructure:
    __slots__ = ()


class Atom(FeatureStructure):
    """Atomic value; interned by name."""

    __slots__ = ("name",)
    _interned: dict = {}

    def __new__(cls, name: str):
        cached = cls._interned.get(name)
        if cached is None:
            cached = super().__new__(cls)
            object.__setattr__(cached, "name", name)
            cls._interned[name] = cached
        return cached

    def __setattr__(self, *a):
        raise AttributeError("Atom is immutable")

    def __repr__(self):
        return f"Atom({self.name!r})"


class Var(FeatureStructure):
    """Variable; interned by name, so equal names are the same node."""

    __slots__ = ("name",)
    _interned: dict = {}

    def __new__(cls, name: str):
        cached = cls._interned.get(name)
        if cached is None:
            cached = super().__new__(cls)
            object.__setattr__(cached, "name", name)
            cls._interned[name] = cached
        return cached

    def __setattr__(self, *a):
        raise AttributeError("Var is immutable")

    def __repr__(self):
        return f"Var({self.name!r})"


class Avm(FeatureStructure):
    """Attribute-value matrix; feature order is preserved for printing."""

    __slots__ = ("feats",)

    def __init__(self, feats=()):
        pairs = tuple(feats)
        names = [f for f, _ in pairs]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate feature names in {names}")
        object.__setattr__(self, "feats", pairs)

    def __setattr__(self, *a):
        raise AttributeError("Avm is immutable")

    def get(self, name):
        for f, v in self.feats:
            if f == name:
                return v
        return None

    def names(self):
        return [f for f, _ in self.feats]

    def __repr__(self):
        return f"Avm({self.feats!r})"


class ListFS(FeatureStructure):
    """List value; ``tail`` is None for a closed list, or a Var."""

    __slots__ = ("items", "tail")

    def __init__(self, items=(), tail=None):
        if tail is not None and not isinstance(tail, Var):
            raise ValueError("list tail must be a Var or None")
        object.__setattr__(self, "items", tuple(items))
        object.__setattr__(self, "tail", tail)

    def __setattr__(self, *a):
        raise AttributeError("ListFS is immutable")

    def __repr__(self):
        return f"ListFS({self.items!r}, tail={self.tail!r})"


# Convenience constants for comparisons; embedding one object at several
# positions of a structure makes those positions re-entrant, so builders
# of larger structures should use fresh ``Avm(())``/``ListFS()`` instead.
EMPTY = Avm()
EMPTY_LIST = ListFS()


def avm(**feats) -> Avm:
    return Avm(tuple(feats.items()))


class UnifyFailure:
    """Unification clash; ``path`` locates the offending feature."""

    __slots__ = ("path", "reason")

    def __init__(self, path=(), reason="clash"):
        self.path = tuple(path)
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"UnifyFailure(path={self.path!r}, reason={self.reason!r})"


def failed(value) -> bool:
    return isinstance(value, UnifyFailure)


# ---------------------------------------------------------------------------
# Unification: union-find over the combined node graphs of both inputs.

_CLOSED = object()  # list-tail sentinel


class _Cls:
    __slots__ = ("parent", "kind", "atom", "feats", "order", "items", "tail", "vars")

    def __init__(self):
        self.parent = None
        self.kind = None  # None (var only), 'atom', 'avm', 'list'
        self.atom = None
        self.feats = None  # dict name -> _Cls
        self.order = None  # feature name order
        self.items = None  # list of _Cls
        self.tail = None  # _CLOSED or _Cls (a var class)
        self.vars = []


def _find(c: _Cls) -> _Cls:
    while c.parent is not None:
        if c.parent.parent is not None:
            c.parent = c.parent.parent
        c = c.parent
    return c


class _Workspace:
    def __init__(self):
        self.nodes = {}  # id(fs object) -> _Cls, for structural nodes
        self.varnodes = {}  # (scope, varname) -> _Cls
        self._names = {}  # extraction: varname -> owning class id

    def imp(self, fs, scope="s") -> _Cls:
        if isinstance(fs, Var):
            key = (scope, fs.name)
            cached = self.varnodes.get(key)
            if cached is None:
                cached = _Cls()
                cached.vars.append(fs.name)
                self.varnodes[key] = cached
            return cached
        cached = self.nodes.get(id(fs))
        if cached is not None:
            return cached
        c = _Cls()
        self.nodes[id(fs)] = c
        if isinstance(fs, Atom):
            c.kind = "atom"
            c.atom = fs.name
        elif isinstance(fs, Avm):
            c.kind = "avm"
            c.feats = {f: self.imp(v, scope) for f, v in fs.feats}
            c.order = [f for f, _ in fs.feats]
        elif isinstance(fs, ListFS):
            c.kind = "list"
            c.items = [self.imp(v, scope) for v in fs.items]
            c.tail = _CLOSED if fs.tail is None else self.imp(fs.tail, scope)
        else:
            raise TypeError(f"not a feature structure: {fs!r}")
        return c

    def unify(self, x: _Cls, y: _Cls, path) -> UnifyFailure | None:
        x, y = _find(x), _find(y)
        if x is y:
            return None
        # An empty AVM is top: let it adopt the other side's payload.
        if x.kind == "avm" and not x.feats and y.kind != "avm":
            x.kind = None
            x.feats = x.order = None
        if y.kind == "avm" and not y.feats and x.kind != "avm":
            y.kind = None
            y.feats = y.order = None
        if x.kind is None or y.kind is None:
            keep, drop = (x, y) if x.kind is not None else (y, x)
            drop.parent = keep
            keep.vars.extend(drop.vars)
            return None
        if x.kind != y.kind:
            return UnifyFailure(path, f"{x.kind} vs {y.kind}")
        if x.kind == "atom":
            if x.atom != y.atom:
                return UnifyFailure(path, f"{x.atom} vs {y.atom}")
            y.parent = x
            x.vars.extend(y.vars)
            return None
        if x.kind == "avm":
            # Union before recursing so re-entrant structures terminate.
            y.parent = x
            x.vars.extend(y.vars)
            yfeats, yorder = y.feats, y.order
            y.feats = y.order = None
            for f in yorder:
                yc = yfeats[f]
                xc = x.feats.get(f)
                if xc is None:
                    x.feats[f] = yc
                    x.order.append(f)
                else:
                    fail = self.unify(xc, yc, path + (f,))
                    if fail is not None:
                        return fail
            return None
        # list vs list
        y.parent = x
        x.vars.extend(y.vars)
        xi, xt = x.items, x.tail
        yi, yt = y.items, y.tail
        n = min(len(xi), len(yi))
        for i in range(n):
            fail = self.unify(xi[i], yi[i], path + (str(i),))
            if fail is not None:
                return fail
        if len(xi) == len(yi):
            x.items = xi
            x.tail = xt
            return self._unify_tails(xt, yt, path)
        if len(xi) < len(yi):
            short_t, rest, rest_tail = xt, yi[n:], yt
            x.items, x.tail = yi, yt
        else:
            short_t, rest, rest_tail = yt, xi[n:], xt
            x.items, x.tail = xi, xt
        if short_t is _CLOSED:
            return UnifyFailure(path, "list length")
        if not rest:
            return self._unify_tails(short_t, rest_tail, path)
        suffix = _Cls()
        suffix.kind = "list"
        suffix.items = rest
        suffix.tail = rest_tail
        return self.unify(short_t, suffix, path)

    def _unify_tails(self, t1, t2, path):
        if t1 is _CLOSED and t2 is _CLOSED:
            return None
        if t1 is _CLOSED or t2 is _CLOSED:
            v = t2 if t1 is _CLOSED else t1
            empty = _Cls()
            empty.kind = "list"
            empty.items = []
            empty.tail = _CLOSED
            return self.unify(v, empty, path)
        return self.unify(t1, t2, path)

    def tails_valid(self, root: _Cls) -> bool:
        """A list tail must resolve to a list or stay unconstrained."""
        seen = set()
        stack = [root]
        while stack:
            c = _find(stack.pop())
            if id(c) in seen:
                continue
            seen.add(id(c))
            if c.kind == "avm":
                stack.extend(c.feats[f] for f in c.order)
            elif c.kind == "list":
                stack.extend(c.items)
                if c.tail is not _CLOSED:
                    t = _find(c.tail)
                    if t.kind == "atom" or (t.kind == "avm" and t.feats):
                        return False
                    stack.append(t)
        return True

    def acyclic(self, root: _Cls) -> bool:
        WHITE, GREY, BLACK = 0, 1, 2
        color = {}

        def children(c):
            if c.kind == "avm":
                return [c.feats[f] for f in c.order]
            if c.kind == "list":
                out = list(c.items)
                if c.tail is not _CLOSED:
                    out.append(c.tail)
                return out
            return []

        stack = [(root, False)]
        while stack:
            c, done = stack.pop()
            c = _find(c)
            if done:
                color[id(c)] = BLACK
                continue
            st = color.get(id(c), WHITE)
            if st == GREY:
                return False
            if st == BLACK:
                continue
            color[id(c)] = GREY
            stack.append((c, True))
            for ch in children(c):
                ch = _find(ch)
                if color.get(id(ch), WHITE) == GREY:
                    return False
                if color.get(id(ch), WHITE) == WHITE:
                    stack.append((ch, False))
        return True

    def _var_name(self, c: _Cls) -> str:
        name = c.vars[0] if c.vars else fresh_var_name()
        owner = self._names.setdefault(name, id(c))
        if owner != id(c):
            name = fresh_var_name()
            self._names[name] = id(c)
        return name

    def extract(self, c: _Cls, memo) -> FeatureStructure:
        c = _find(c)
        cached = memo.get(id(c))
        if cached is not None:
            return cached
        if c.kind == "atom":
            out = Atom(c.atom)
            memo[id(c)] = out
            return out
        if c.kind is None or (c.kind == "avm" and not c.feats and c.vars):
            # a class merged only with top keeps behaving like its variable
            out = Var(self._var_name(c))
            memo[id(c)] = out
            return out
        if c.kind == "avm":
            pairs = []
            out = Avm.__new__(Avm)
            memo[id(c)] = out  # placeholder for sharing; filled below
            for f in c.order:
                pairs.append((f, self.extract(c.feats[f], memo)))
            object.__setattr__(out, "feats", tuple(pairs))
            return out
        # list: flatten bound tail chains into one item run
        items = []
        out = ListFS.__new__(ListFS)
        memo[id(c)] = out
        cur = c
        while True:
            for it in cur.items:
                items.append(self.extract(it, memo))
            if cur.tail is _CLOSED:
                tail = None
                break
            t = _find(cur.tail)
            if t.kind == "list":
                cur = t
                continue
            # unconstrained (or top-merged) tail stays open
            tail = self.extract(t, memo)
            assert isinstance(tail, Var), "tail validation missed a binding"
            break
        object.__setattr__(out, "items", tuple(items))
        object.__setattr__(out, "tail", tail)
        return out


def _run_unify(a, b, scope_a, scope_b):
    ws = _Workspace()
    ca, cb = ws.imp(a, scope_a), ws.imp(b, scope_b)
    fail = ws.unify(ca, cb, ())
    if fail is not None:
        return fail
    if not ws.acyclic(ca):
        return UnifyFailure((), "occurs check")
    if not ws.tails_valid(ca):
        return UnifyFailure((), "list tail bound to a non-list")
    return ws.extract(ca, {})


def unify(a: FeatureStructure, b: FeatureStructure):
    """Most general unifier of ``a`` and ``b``, or a ``UnifyFailure``.

    Each argument's variables are scoped to that argument: ``?x`` in ``a``
    and ``?x`` in ``b`` are different nodes.  This is the algebraic
    operation; results are defined up to alphabetic variance.
    """
    return _run_unify(a, b, "a", "b")


def unify_shared(a: FeatureStructure, b: FeatureStructure):
    """Unification with one variable scope across both arguments.

    The engine primitive: within one rule or tree instantiation, the same
    variable name in two structures is the same node, which is how
    threading chains and head-feature sharing are expressed.  Callers are
    responsible for renaming instances apart (see ``rename``).
    """
    return _run_unify(a, b, "s", "s")


def unify_all(*values):
    """Shared-scope left fold of ``unify_shared`` over several constraints."""
    out = Avm(())
    for v in values:
        out = unify_shared(out, v)
        if failed(out):
            return out
    return out


# ---------------------------------------------------------------------------
# Subsumption and alphabetic variance.


class _Suffix:
    """Remainder of a target list during subsumption (tail-var binding)."""

    __slots__ = ("lst", "k")

    def __init__(self, lst: ListFS, k: int):
        self.lst = lst
        self.k = k

    def items(self):
        return self.lst.items[self.k:]

    def tail(self):
        return self.lst.tail


def _suffix_targets_equal(t1, t2) -> bool:
    """Equality of tail-var binding targets, extensional over list spines.

    Extraction after unification flattens list spines (suffix sharing is
    not expressible in the value type), so a suffix target matches any
    list whose elements are the *same objects* position by position.
    """
    if t1 is t2:
        return True

    def as_suffix(t):
        if isinstance(t, _Suffix):
            return t.items(), t.tail()
        if isinstance(t, ListFS):
            return t.items, t.tail
        return None

    s1, s2 = as_suffix(t1), as_suffix(t2)
    if s1 is None or s2 is None:
        return False
    if len(s1[0]) != len(s2[0]) or s1[1] is not s2[1]:
        return False
    return all(u is v for u, v in zip(s1[0], s2[0]))


def subsumes(a: FeatureStructure, b: FeatureStructure) -> bool:
    """True iff ``b`` carries at least all of ``a``'s information."""
    amap = {}  # a-node id / Var -> the b-side target it corresponds to
    seen = set()

    def bind(key, target) -> bool:
        prev = amap.get(key)
        if prev is None:
            amap[key] = target
            return True
        return prev is target or _suffix_targets_equal(prev, target)

    def walk(x, y) -> bool:
        if isinstance(x, Var):
            return bind(x, y)
        if isinstance(x, Atom):
            return x is y
        if not bind(id(x), y):
            return False
        if (id(x), id(y)) in seen:
            return True
        seen.add((id(x), id(y)))
        if isinstance(x, Avm):
            if not x.feats:
                return True
            if not isinstance(y, Avm):
                return False
            for f, v in x.feats:
                yv = y.get(f)
                if yv is None or not walk(v, yv):
                    return False
            return True
        if isinstance(x, ListFS):
            if not isinstance(y, ListFS):
                return False
            k = len(x.items)
            if len(y.items) < k:
                return False
            for i in range(k):
                if not walk(x.items[i], y.items[i]):
                    return False
            if x.tail is None:
                return len(y.items) == k and y.tail is None
            if k == len(y.items) and y.tail is not None:
                return bind(x.tail, y.tail)
            return bind(x.tail, _Suffix(y, k))
        raise TypeError(f"not a feature structure: {x!r}")

    return walk(a, b)


def variant(a: FeatureStructure, b: FeatureStructure) -> bool:
    """Alphabetic variance: mutual subsumption."""
    return subsumes(a, b) and subsumes(b, a)


def get_path(fs: FeatureStructure, path):
    """Value at a feature path, or None when any step is absent."""
    cur = fs
    for name in path:
        if not isinstance(cur, Avm):
            return None
        cur = cur.get(name)
        if cur is None:
            return None
    return cur


# ---------------------------------------------------------------------------
# Fresh variables and consistent renaming.

_fresh = itertools.count(1)


def fresh_var_name() -> str:
    return f"_{next(_fresh)}"


def rename(fs: FeatureStructure, mapping=None) -> FeatureStructure:
    """Copy with all variables renamed consistently.

    ``mapping`` may pre-seed specific variables; values may be any feature
    structure (e.g. binding a variable to an atom during instantiation).
    """
    varmap = dict(mapping or {})
    memo = {}

    def walk(x):
        if isinstance(x, Atom):
            return x
        if isinstance(x, Var):
            out = varmap.get(x)
            if out is None:
                out = Var(fresh_var_name())
                varmap[x] = out
            return out
        cached = memo.get(id(x))
        if cached is not None:
            return cached
        if isinstance(x, Avm):
            out = Avm.__new__(Avm)
            memo[id(x)] = out
            object.__setattr__(out, "feats", tuple((f, walk(v)) for f, v in x.feats))
            return out
        out = ListFS.__new__(ListFS)
        memo[id(x)] = out
        object.__setattr__(out, "items", tuple(walk(v) for v in x.items))
        tail = x.tail
        if tail is not None:
            tail = walk(tail)
            if isinstance(tail, Var):
                object.__setattr__(out, "tail", tail)
            else:
                raise ValueError("cannot rename a list tail to a non-variable")
        else:
            object.__setattr__(out, "tail", None)
        return out

    return walk(fs)


# ---------------------------------------------------------------------------
# Printing.


def fs_to_text(fs: FeatureStructure) -> str:
    """Canonical text form; shared AVM/list nodes get ``#n`` tags."""
    counts = {}

    def count(x):
        if isinstance(x, (Avm, ListFS)):
            counts[id(x)] = counts.get(id(x), 0) + 1
            if counts[id(x)] > 1:
                return
            if isinstance(x, Avm):
                for _, v in x.feats:
                    count(v)
            else:
                for v in x.items:
                    count(v)

    count(fs)
    tags = {}
    next_tag = itertools.count(1)

    def emit(x) -> str:
        if isinstance(x, Atom):
            return x.name
        if isinstance(x, Var):
            return f"?{x.name}"
        if id(x) in tags:
            return f"#{tags[id(x)]}"
        prefix = ""
        if counts.get(id(x), 0) > 1:
            tags[id(x)] = next(next_tag)
            prefix = f"#{tags[id(x)]} "
        if isinstance(x, Avm):
            inner = ", ".join(f"{f}:{emit(v)}" for f, v in x.feats)
            return f"{prefix}[{inner}]"
        inner = ", ".join(emit(v) for v in x.items)
        if x.tail is not None:
            if inner:
                return f"{prefix}<{inner}|?{x.tail.name}>"
            return f"{prefix}<|?{x.tail.name}>"
        return f"{prefix}<{inner}>"

    return emit(fs)


# ---------------------------------------------------------------------------
# Parsing.

ATOM_RE = re.compile(r"[A-Za-z0-9_+.\-]+")
VAR_RE = re.compile(r"\?([A-Za-z0-9_]+)")
TAG_RE = re.compile(r"#([0-9]+)")


class FSParseError(ValueError):
    """Syntax error with the character position of the first failure."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch):
        self.skip_ws()
        if self.pos >= len(self.text) or self.text[self.pos] != ch:
            raise FSParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def match(self, regex):
        self.skip_ws()
        m = regex.match(self.text, self.pos)
        if m:
            self.pos = m.end()
        return m


def parse_fs(text: str) -> FeatureStructure:
    """Parse the AVM text grammar; see module docstring for the syntax."""
    sc = _Scanner(text)
    tags = {}
    fs = _parse_value(sc, tags)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise FSParseError("trailing input", sc.pos)
    return fs


def _starts_value(ch: str) -> bool:
    return ch in "[<?#" or bool(ch and ATOM_RE.match(ch))


def _parse_value(sc: _Scanner, tags) -> FeatureStructure:
    ch = sc.peek()
    if ch == "#":
        start = sc.pos
        m = sc.match(TAG_RE)
        n = m.group(1)
        if _starts_value(sc.peek()):
            if n in tags:
                raise FSParseError(f"tag #{n} defined twice", start)
            value = _parse_value(sc, tags)
            tags[n] = value
            return value
        if n not in tags:
            raise FSParseError(f"tag #{n} used before its definition", start)
        return tags[n]
    if ch == "[":
        sc.expect("[")
        pairs = []
        if sc.peek() == "]":
            sc.expect("]")
            return Avm(())
        while True:
            m = sc.match(ATOM_RE)
            if not m:
                raise FSParseError("expected feature name", sc.pos)
            name = m.group(0)
            sc.expect(":")
            pairs.append((name, _parse_value(sc, tags)))
            if sc.peek() == ",":
                sc.expect(",")
                continue
            sc.expect("]")
            if len({f for f, _ in pairs}) != len(pairs):
                raise FSParseError("duplicate feature name", sc.pos)
            return Avm(tuple(pairs))
    if ch == "<":
        sc.expect("<")
        if sc.peek() == ">":
            sc.expect(">")
            return ListFS()
        items = []
        tail = None
        if sc.peek() != "|":
            while True:
                items.append(_parse_value(sc, tags))
                if sc.peek() == ",":
                    sc.expect(",")
                    continue
                break
        if sc.peek() == "|":
            sc.expect("|")
            m = sc.match(VAR_RE)
            if not m:
                raise FSParseError("expected variable after '|'", sc.pos)
            tail = Var(m.group(1))
        sc.expect(">")
        return ListFS(tuple(items), tail)
    if ch == "?":
        m = sc.match(VAR_RE)
        if not m:
            raise FSParseError("expected variable name", sc.pos)
        return Var(m.group(1))
    m = sc.match(ATOM_RE)
    if m:
        return Atom(m.group(0))
    raise FSParseError("expected a feature structure", sc.pos)
