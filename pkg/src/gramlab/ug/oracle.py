"""Exhaustive top-down enumerator for the unification grammar.

Independent of the chart parser's bottom-up strategy: derivations are
enumerated by recursive descent over token spans with a derivation-depth
bound, threading one growing constraint structure top-down, so channel
lists are always concrete and traces are only proposed against a
non-empty list.  Also hosts the random sentence generator used for
structural invariant checks.
"""

from __future__ import annotations

import random

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
    unify_shared,
)
from gramlab.ug.grammar import CONFIGS, MERGED, SLOT_FEATURES, UnknownTokenError
from gramlab.ug.parser import UGParse, _arcs_of, _node_order, _realize, _tree_of


def _place(big, node, value):
    return unify_shared(big, Avm(((f"n{node}", value),)))


def _gap_budget(big, node, config):
    """Known pending items entering a node; None when not yet concrete."""
    total = 0
    for slot in config.slots():
        fin, _ = SLOT_FEATURES[slot]
        lst = get_path(big, (f"n{node}", "m", fin))
        if not isinstance(lst, ListFS):
            return None
        total += len(lst.items)
    return total


def oracle_parse(grammar, tokens, config=MERGED, depth=12):
    """All parses by brute-force descent; compares equal to ug_parse."""
    if isinstance(config, str):
        config = CONFIGS[config]
    rt = grammar.runtime(config)
    tokens = list(tokens)
    for idx, word in enumerate(tokens):
        if word not in rt.lexical:
            raise UnknownTokenError(word, idx)
    n = len(tokens)
    results = []

    def expand(big, node, i, j, d, next_node):
        """Yield (big', deriv, next_node') for the constituent at ``node``
        spanning [i, j)."""
        if j == i + 1:
            for entry, template in rt.lexical[tokens[i]]:
                big2 = _place(big, node, avm(m=rename(template)))
                if not failed(big2):
                    yield big2, ("lex", entry, i), next_node
        if i == j:
            budget = _gap_budget(big, node, config)
            if budget == 0:
                return
            for slot, cat, template in rt.traces:
                big2 = _place(big, node, avm(m=rename(template)))
                if not failed(big2):
                    yield big2, ("trace", slot, cat, i), next_node
        if d <= 0:
            return
        for rr in rt.rules:
            big2 = _place(big, node, rename(rr.fs))
            if failed(big2):
                continue
            yield from seq(big2, rr, node, 1, i, j, d, next_node, ())

    def seq(big, rr, node, k, i, j, d, next_node, kids):
        """Parse daughters k..arity of rule ``rr`` over the span [i, j)."""
        if k > rr.arity:
            if i == j:
                yield big, ("rule", rr, kids), next_node
            return
        for mid in range(i, j + 1):
            big2 = big
            ok = True
            for channel, slot, src, target in rr.pushes:
                if src != k:
                    continue
                fin, _ = SLOT_FEATURES[slot]
                probe = Avm(
                    ((f"d{target}",
                      Avm(((fin, ListFS((avm(gid=Atom(f"{i}.{mid}")),), Var(fresh_var_name()))),))),)
                )
                big2 = _place(big2, node, probe)
                if failed(big2):
                    ok = False
                    break
            if not ok:
                continue
            cnode = next_node
            link_var = _link()
            big3 = unify_shared(
                big2,
                Avm(
                    (
                        (f"n{node}", Avm(((f"d{k}", link_var),))),
                        (f"n{cnode}", Avm((("m", link_var),))),
                    )
                ),
            )
            if failed(big3):
                continue
            for big4, child, nn in expand(big3, cnode, i, mid, d - 1, cnode + 1):
                yield from seq(big4, rr, node, k + 1, mid, j, d, nn, kids + (child,))

    root_big = Avm((("n1", avm(m=rename(rt.root))),))
    for _, deriv, _ in expand(root_big, 1, 0, n, depth, 2):
        results.append(deriv)

    parses = {}
    for deriv in results:
        solved = _realize(deriv, rt)
        if solved is None:
            continue
        tree, _ = _tree_of(deriv, solved, rt, _node_order(deriv), 0)
        parse = UGParse(tree, _arcs_of(tree))
        parses[parse.render() + repr(sorted(parse.bindings().items()))] = parse
    return sorted(parses.values(), key=lambda p: p.render())


def _link():
    return Var(fresh_var_name())


# ---------------------------------------------------------------------------
# Random grammar-consistent sentences.


def generate_sentences(grammar, config=MERGED, count=50, seed=0, max_len=9, max_depth=8, attempts=4000):
    """Random sentences derivable by the grammar under ``config``.

    Generation follows random top-down derivations with all unifications
    applied, including root channel closure, so every returned sentence
    parses.  Deterministic for a fixed seed.
    """
    if isinstance(config, str):
        config = CONFIGS[config]
    rt = grammar.runtime(config)
    rng = random.Random(seed)
    words = sorted(rt.lexical)
    out = []
    seen = set()

    def gen(big, node, d, budget, next_node):
        """Return (big, tokens, next_node) or None."""
        options = []
        for word in words:
            for entry, template in rt.lexical[word]:
                options.append(("lex", word, template))
        for slot, cat, template in rt.traces:
            options.append(("trace", template))
        if d > 0:
            for rr in rt.rules:
                options.append(("rule", rr))
        rng.shuffle(options)
        for opt in options:
            if opt[0] == "lex":
                if budget < 1:
                    continue
                big2 = _place(big, node, avm(m=rename(opt[2])))
                if failed(big2):
                    continue
                return big2, [opt[1]], next_node
            if opt[0] == "trace":
                if _gap_budget(big, node, config) == 0:
                    continue
                big2 = _place(big, node, avm(m=rename(opt[1])))
                if failed(big2):
                    continue
                return big2, [], next_node
            rr = opt[1]
            big2 = _place(big, node, rename(rr.fs))
            if failed(big2):
                continue
            toks = []
            cur = big2
            nn = next_node
            good = True
            for k in range(1, rr.arity + 1):
                cnode = nn
                link_var = _link()
                cur2 = unify_shared(
                    cur,
                    Avm(
                        (
                            (f"n{node}", Avm(((f"d{k}", link_var),))),
                            (f"n{cnode}", Avm((("m", link_var),))),
                        )
                    ),
                )
                if failed(cur2):
                    good = False
                    break
                sub = gen(cur2, cnode, d - 1, budget - len(toks), cnode + 1)
                if sub is None:
                    good = False
                    break
                cur, sub_toks, nn = sub
                toks.extend(sub_toks)
            if not good:
                continue
            return cur, toks, nn
        return None

    for _ in range(attempts):
        if len(out) >= count:
            break
        root_big = Avm((("n1", avm(m=rename(rt.root))),))
        got = gen(root_big, 1, max_depth, max_len, 2)
        if got is None:
            continue
        _, toks, _ = got
        if not toks or len(toks) > max_len:
            continue
        key = tuple(toks)
        if key in seen:
            continue
        seen.add(key)
        out.append(toks)
    return out
