"""Property tests for the unification algebra.

Structures are generated small (the interesting behaviour is sharing and
open tails, not size).  Properties mirror the documented algebra:
idempotence, commutativity, associativity up to variance, monotonicity,
and the list-length laws.
"""

import hypothesis.strategies as st
from hypothesis import given, settings

from gramlab.featstruct import (
    Atom,
    Avm,
    ListFS,
    Var,
    failed,
    subsumes,
    unify,
    variant,
)
from naive_unify import naive_unify

ATOMS = ["sg", "pl", "3", "masc", "fem", "plus", "minus"]
FEATS = ["num", "per", "gen", "agr", "sort", "gi", "go"]
VARS = ["v", "w", "t", "u"]


def fs_strategy(depth=3):
    atom = st.sampled_from(ATOMS).map(Atom)
    var = st.sampled_from(VARS).map(Var)
    if depth == 0:
        return st.one_of(atom, var)
    sub = fs_strategy(depth - 1)
    avm_s = st.lists(
        st.tuples(st.sampled_from(FEATS), sub), max_size=3, unique_by=lambda p: p[0]
    ).map(lambda pairs: Avm(tuple(pairs)))
    list_s = st.tuples(
        st.lists(sub, max_size=2), st.one_of(st.none(), st.sampled_from(VARS).map(Var))
    ).map(lambda p: ListFS(tuple(p[0]), p[1]))
    return st.one_of(atom, var, avm_s, list_s)


SMALL = fs_strategy()


@settings(max_examples=300)
@given(SMALL)
def test_idempotence(a):
    out = unify(a, a)
    assert not failed(out)
    assert variant(out, a)


@settings(max_examples=300)
@given(SMALL, SMALL)
def test_commutativity(a, b):
    ab = unify(a, b)
    ba = unify(b, a)
    if failed(ab):
        assert failed(ba)
    else:
        assert not failed(ba)
        assert variant(ab, ba)


@settings(max_examples=300)
@given(SMALL, SMALL, SMALL)
def test_associativity_up_to_variance(a, b, c):
    left = unify(a, b)
    left = left if failed(left) else unify(left, c)
    right = unify(b, c)
    right = right if failed(right) else unify(a, right)
    if failed(left):
        assert failed(right)
    else:
        assert not failed(right)
        assert variant(left, right)


@settings(max_examples=300)
@given(SMALL, SMALL)
def test_monotonicity(a, b):
    out = unify(a, b)
    if not failed(out):
        assert subsumes(a, out)
        assert subsumes(b, out)


@settings(max_examples=300)
@given(SMALL, SMALL)
def test_agreement_with_naive_reference(a, b):
    ours = unify(a, b)
    reference = naive_unify(a, b)
    if reference is None:
        assert failed(ours)
    else:
        assert not failed(ours)
        assert variant(ours, reference)


@settings(max_examples=200)
@given(st.lists(SMALL, max_size=3), st.lists(SMALL, max_size=3))
def test_closed_list_lengths(xs, ys):
    out = unify(ListFS(tuple(xs)), ListFS(tuple(ys)))
    if len(xs) != len(ys):
        assert failed(out)


@settings(max_examples=200)
@given(st.lists(SMALL, min_size=1, max_size=3))
def test_open_tail_binds_remainder(items):
    open_list = ListFS((items[0],), Var("t"))
    closed = ListFS(tuple(items))
    out = unify(Avm((("l", open_list), ("r", Var("t")))), Avm((("l", closed),)))
    if not failed(out):
        rest = out.get("r")
        assert isinstance(rest, ListFS)
        assert len(rest.items) == len(items) - 1


@settings(max_examples=300)
@given(SMALL)
def test_subsumption_reflexive(a):
    assert subsumes(a, a)
