"""Unification-grammar objects: lexicon, rules, schemas, channel wiring.

A category is an AVM ``[cat:<symbol>, h:<head bundle>]``; gap-threading
features (``sai_in``/``sai_out``, ``gaps_in``/``gaps_out``, ...) are added
outside ``h`` when a grammar is wired for a channel configuration, so a
filler's content can be shared into a gap item without dragging the
filler's own threading state along.

A rule is stored as one combined AVM ``[m:<cat>, d1:<cat>, ..., dk:<cat>]``
so that head-feature sharing and threading chains are ordinary re-entrancy
within a single variable scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from gramlab.featstruct import (
    EMPTY,
    EMPTY_LIST,
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
)

CHANNELS = ("vmove", "wh", "tough", "rextra")

# feature-name pair carried by each threading slot
SLOT_FEATURES = {
    "vmove": ("sai_in", "sai_out"),
    "core": ("gaps_in", "gaps_out"),
    "wh": ("wh_in", "wh_out"),
    "tough": ("tough_in", "tough_out"),
    "rextra": ("rextra_in", "rextra_out"),
}


@dataclass(frozen=True)
class ChannelConfig:
    """Maps movement channels onto threading slots (feature pairs)."""

    name: str
    channel_slot: tuple  # ((channel, slot), ...)

    def slot_of(self, channel: str) -> str:
        for c, s in self.channel_slot:
            if c == channel:
                return s
        raise KeyError(channel)

    def slots(self):
        out = []
        for _, s in self.channel_slot:
            if s not in out:
                out.append(s)
        return out


# Inversion is always threaded apart; the merged preset runs WH and tough
# movement through one shared list, the channelized preset gives every
# movement type its own list.
MERGED = ChannelConfig(
    "merged",
    (("vmove", "vmove"), ("wh", "core"), ("tough", "core"), ("rextra", "rextra")),
)
CHANNELIZED = ChannelConfig(
    "channelized",
    (("vmove", "vmove"), ("wh", "wh"), ("tough", "tough"), ("rextra", "rextra")),
)

CONFIGS = {"merged": MERGED, "channelized": CHANNELIZED}


@dataclass(frozen=True)
class Push:
    """Filler introduction: prepend daughter ``source``'s content onto a
    channel list entering daughter ``target``."""

    channel: str
    source: int  # 1-based daughter index of the filler constituent
    target: int  # 1-based daughter index receiving the extended list
    optional: bool = False


@dataclass(frozen=True)
class Rule:
    name: str
    cats: tuple  # (mother, d1, ..., dk) category symbols
    fs: Avm  # combined [m:..., d1:..., ...] with h bundles only
    head: int = 0  # 1-based head daughter, 0 when unmarked
    pushes: tuple = ()
    schema: bool = False

    @property
    def arity(self):
        return len(self.cats) - 1


@dataclass(frozen=True)
class LexEntry:
    """Word entry; ``fs`` is ``[cat:..., h:..., subcat:<...>]`` with the
    subcat list closed."""

    word: str
    fs: Avm

    @property
    def cat(self):
        return self.fs.get("cat").name

    @property
    def head(self):
        return self.fs.get("h")

    @property
    def subcat(self):
        return self.fs.get("subcat")


def make_entry(word, cat, head=None, subcat=()):
    pairs = [("cat", Atom(cat)), ("h", head if head is not None else Avm(()))]
    pairs.append(("subcat", ListFS(tuple(subcat))))
    return LexEntry(word, Avm(tuple(pairs)))


def make_category(cat, head=None):
    return Avm((("cat", Atom(cat)), ("h", head if head is not None else Avm(()))))


def make_rule(name, mother, daughters, head=0, pushes=(), schema=False):
    """Build a rule from category AVMs sharing one variable scope."""
    cats = (mother.get("cat").name,) + tuple(d.get("cat").name for d in daughters)
    pairs = [("m", mother)]
    for i, d in enumerate(daughters, 1):
        pairs.append((f"d{i}", d))
    return Rule(name, cats, Avm(tuple(pairs)), head=head, pushes=tuple(pushes), schema=schema)


class UnknownTokenError(ValueError):
    def __init__(self, word, position):
        super().__init__(f"unknown token {word!r} at position {position}")
        self.word = word
        self.position = position


@dataclass
class UGGrammar:
    name: str
    start: str = "s"
    channels: tuple = CHANNELS
    lexicon: dict = field(default_factory=dict)  # word -> [LexEntry]
    rules: list = field(default_factory=list)
    schemas: tuple = ()  # ((mother_cat, head_cat), ...)
    features: frozenset = frozenset()

    def add_entry(self, entry: LexEntry):
        self.lexicon.setdefault(entry.word, []).append(entry)

    def entries(self):
        for word in self.lexicon:
            yield from self.lexicon[word]

    def runtime(self, config: ChannelConfig) -> "RuntimeUG":
        cache = self.__dict__.setdefault("_runtime_cache", {})
        if config.name not in cache:
            cache[config.name] = RuntimeUG(self, config)
        return cache[config.name]


def expand_subcat_schema(entry: LexEntry, mother_cat: str) -> Rule:
    """Expand a schema head's subcat list into a phrase-building rule.

    The mother shares the head daughter's whole ``h`` bundle; subcat
    patterns are spliced in as the remaining daughters.
    """
    inst = rename(entry.fs)
    head_h = inst.get("h")
    subcat = inst.get("subcat")
    head_cat = inst.get("cat").name
    mother = make_category(mother_cat, head_h)
    daughters = [Avm((("cat", inst.get("cat")), ("h", head_h)))]
    comps = subcat.items if subcat is not None else ()
    daughters.extend(comps)
    return make_rule(
        f"{mother_cat}[{entry.word}/{len(comps)}]",
        mother,
        daughters,
        head=1,
        schema=True,
    )


# ---------------------------------------------------------------------------
# Runtime wiring: add threading features per channel configuration.


def _chain_wiring(arity, slot, pushes_here):
    """Threading chain constraints for one slot across a rule.

    Returns an AVM unified into the rule fs.  ``pushes_here`` maps a target
    daughter index to the item AVM prepended onto its inbound list.
    """
    fin, fout = SLOT_FEATURES[slot]
    chain = [Var(fresh_var_name()) for _ in range(arity + 1)]
    pairs = [("m", avm(**{fin: chain[0], fout: chain[arity]}))]
    for i in range(1, arity + 1):
        inbound = chain[i - 1]
        item = pushes_here.get(i)
        if item is not None:
            inbound = ListFS((item,), chain[i - 1])
        pairs.append((f"d{i}", Avm(((fin, inbound), (fout, chain[i])))))
    return Avm(tuple(pairs))


@dataclass(frozen=True)
class RuntimeRule:
    name: str
    cats: tuple
    fs: Avm  # wired combined AVM
    pushes: tuple  # (channel, slot, source, target) for this variant
    base: Rule

    @property
    def arity(self):
        return len(self.cats) - 1


def wire_rule(rule: Rule, config: ChannelConfig):
    """Wire threading chains; optional pushes yield two rule variants."""
    optional = [p for p in rule.pushes if p.optional]
    mandatory = [p for p in rule.pushes if not p.optional]
    variants = []
    for take_optional in (False, True) if optional else (False,):
        pushes = mandatory + (optional if take_optional else [])
        by_slot = {}
        meta = []
        share = []  # (source idx, gfs var) to tie filler content
        for p in pushes:
            slot = config.slot_of(p.channel)
            gfs = Var(fresh_var_name())
            item = avm(
                gcat=Atom(rule.cats[p.source]),
                gfs=gfs,
                gid=Var(fresh_var_name()),
                chan=Atom(p.channel),
            )
            if p.target in by_slot.setdefault(slot, {}):
                raise ValueError(f"rule {rule.name}: two pushes on one slot and daughter")
            by_slot[slot][p.target] = item
            share.append((p.source, gfs))
            meta.append((p.channel, slot, p.source, p.target))
        constraints = [rule.fs]
        for slot in config.slots():
            constraints.append(_chain_wiring(rule.arity, slot, by_slot.get(slot, {})))
        for src, gfs in share:
            constraints.append(Avm(((f"d{src}", avm(h=gfs)),)))
        wired = unify_all(*constraints)
        if failed(wired):
            raise ValueError(f"rule {rule.name}: threading wiring failed: {wired}")
        suffix = "+push" if (optional and take_optional) else ""
        variants.append(RuntimeRule(rule.name + suffix, rule.cats, wired, tuple(meta), rule))
    return variants


def wire_lexical(entry: LexEntry, config: ChannelConfig) -> Avm:
    """Lexical edge template: category plus pass-through threading."""
    pairs = [("cat", entry.fs.get("cat")), ("h", entry.fs.get("h"))]
    for slot in config.slots():
        fin, fout = SLOT_FEATURES[slot]
        v = Var(fresh_var_name())
        pairs.append((fin, v))
        pairs.append((fout, v))
    return Avm(tuple(pairs))


def trace_template(slot: str, cat: str, config: ChannelConfig) -> Avm:
    """Empty-constituent template: consumes the front of one slot's list.

    The trace's own content ``h`` is the consumed item's ``gfs``, so slot
    requirements on the trace propagate to the filler by unification.
    """
    content = Var(fresh_var_name())
    rest = Var(fresh_var_name())
    item = avm(
        gcat=Atom(cat), gfs=content, gid=Var(fresh_var_name()), chan=Var(fresh_var_name())
    )
    pairs = [("cat", Atom(cat)), ("h", content)]
    for s in config.slots():
        fin, fout = SLOT_FEATURES[s]
        if s == slot:
            pairs.append((fin, ListFS((item,), rest)))
            pairs.append((fout, rest))
        else:
            v = Var(fresh_var_name())
            pairs.append((fin, v))
            pairs.append((fout, v))
    return Avm(tuple(pairs))


class RuntimeUG:
    """A grammar wired for one channel configuration."""

    def __init__(self, grammar: UGGrammar, config: ChannelConfig):
        self.grammar = grammar
        self.config = config
        self.rules = []
        schema_heads = {head: mother for mother, head in grammar.schemas}
        for rule in grammar.rules:
            self.rules.extend(wire_rule(rule, config))
        for entry in grammar.entries():
            mother = schema_heads.get(entry.cat)
            if mother is not None:
                self.rules.extend(wire_rule(expand_subcat_schema(entry, mother), config))
        self.lexical = {}
        for word, entries in grammar.lexicon.items():
            self.lexical[word] = [(e, wire_lexical(e, config)) for e in entries]
        self.traces = []
        seen = set()
        for rr in self.rules:
            for channel, slot, src, _ in rr.pushes:
                cat = rr.cats[src]
                if (slot, cat) not in seen:
                    seen.add((slot, cat))
                    self.traces.append((slot, cat, trace_template(slot, cat, config)))
        self.root = self._root_pattern()

    def _root_pattern(self):
        pairs = [("cat", Atom(self.grammar.start))]
        for slot in self.config.slots():
            fin, fout = SLOT_FEATURES[slot]
            pairs.append((fin, ListFS()))
            pairs.append((fout, ListFS()))
        return Avm(tuple(pairs))

    def rules_by_first(self, cat):
        return [r for r in self.rules if r.cats[1] == cat]


# ---------------------------------------------------------------------------
# Possessive head-feature percolation.

# verb -> the noun its idiom object is pinned to
IDIOM_NOUNS = {
    "have": "way",
    "had": "way",
    "shake": "head",
    "shook": "head",
    "shrug": "shoulders",
    "shrugged": "shoulders",
    "close": "eyes",
    "closed": "eyes",
    "take": "time",
    "took": "time",
}

NP_CATS = ("np", "nbar")
HEADISH = ("nbar", "n", "pn", "pro")


def _percolate_rule(rule: Rule) -> Rule:
    if rule.cats[0] not in NP_CATS:
        return rule
    det = None
    head = rule.head
    for i, cat in enumerate(rule.cats[1:], 1):
        if cat == "d":
            det = i
        if head == 0 and cat in HEADISH:
            head = i
    constraints = [rule.fs]
    poss_src = det if det is not None else head
    if poss_src:
        p, pa = Var(fresh_var_name()), Var(fresh_var_name())
        constraints.append(
            Avm((("m", avm(h=avm(poss=p, poss_agr=pa))),
                 (f"d{poss_src}", avm(h=avm(poss=p, poss_agr=pa)))))
        )
    if head:
        lx = Var(fresh_var_name())
        constraints.append(
            Avm((("m", avm(h=avm(lex=lx))), (f"d{head}", avm(h=avm(lex=lx)))))
        )
    fs = unify_all(*constraints)
    if failed(fs):
        raise ValueError(f"percolation wiring failed on rule {rule.name}")
    return replace(rule, fs=fs)


def _is_plain_transitive(entry: LexEntry) -> bool:
    sub = entry.subcat
    if sub is None or len(sub.items) != 1 or sub.tail is not None:
        return False
    first = sub.items[0]
    return isinstance(first, Avm) and first.get("cat") is Atom("np")


def _idiom_entry(word: str, old: LexEntry, noun: str) -> LexEntry:
    pa = Var(fresh_var_name())
    obj = make_category("np", avm(poss=Atom("plus"), poss_agr=pa, lex=Atom(noun)))
    fs = unify_shared(
        rename(old.fs),
        avm(h=avm(subj=avm(agr=pa)), subcat=ListFS((obj,))),
    )
    if failed(fs):
        raise ValueError(f"cannot build idiom entry for {word!r}: {fs}")
    return LexEntry(word, fs)


def enable_possessive_percolation(grammar: UGGrammar) -> UGGrammar:
    """NP-building rules thread ``poss``/``poss_agr``/``lex`` from the
    determiner and head noun up to the NP; idiom verbs swap their plain
    transitive frames for possessive-constrained ones."""
    rules = [_percolate_rule(r) for r in grammar.rules]
    lexicon = {}
    for word, entries in grammar.lexicon.items():
        noun = IDIOM_NOUNS.get(word)
        out = []
        for e in entries:
            if noun is not None and _is_plain_transitive(e):
                out.append(_idiom_entry(word, e, noun))
            else:
                out.append(e)
        lexicon[word] = out
    return UGGrammar(
        name=grammar.name + "+poss",
        start=grammar.start,
        channels=grammar.channels,
        lexicon=lexicon,
        rules=rules,
        schemas=grammar.schemas,
        features=grammar.features | {"poss", "poss_agr", "lex", "subj"},
    )
