import pytest

from gramlab.featstruct import (
    EMPTY,
    Atom,
    Avm,
    FSParseError,
    ListFS,
    Var,
    avm,
    failed,
    fs_to_text,
    get_path,
    parse_fs,
    rename,
    subsumes,
    unify,
    unify_shared,
    variant,
)
from naive_unify import naive_unify


def fs(text):
    return parse_fs(text)


class TestUnifyBasics:
    def test_empty_avm_is_identity(self):
        out = unify(EMPTY, fs("[agr:[num:sg]]"))
        assert variant(out, fs("[agr:[num:sg]]"))

    def test_empty_avm_is_identity_for_atoms_and_lists(self):
        assert variant(unify(EMPTY, Atom("sg")), Atom("sg"))
        assert variant(unify(fs("<a, b>"), EMPTY), fs("<a, b>"))

    def test_atom_clash(self):
        out = unify(fs("[num:sg]"), fs("[num:pl]"))
        assert failed(out)
        assert out.path == ("num",)

    def test_merge_disjoint_features(self):
        out = unify(fs("[num:sg]"), fs("[per:3]"))
        assert variant(out, fs("[num:sg, per:3]"))

    def test_reentrancy_extends_shared_node(self):
        out = unify(fs("[a:#1 [x:p], b:#1]"), fs("[b:[y:q]]"))
        assert not failed(out)
        assert variant(out, fs("[a:#1 [x:p, y:q], b:#1]"))
        # information added under b is visible under a
        assert get_path(out, ("a", "y")) is Atom("q")

    def test_shared_variable_is_one_node(self):
        out = unify(fs("[a:?v, b:?v]"), fs("[a:sg]"))
        assert get_path(out, ("b",)) is Atom("sg")

    def test_variable_against_structure(self):
        out = unify(fs("?x"), fs("[num:sg]"))
        assert variant(out, fs("[num:sg]"))

    def test_variables_are_scoped_per_argument(self):
        # ?x in a and ?x in b are different nodes for the public operation
        out = unify(fs("[p:?x]"), fs("[q:?x]"))
        assert get_path(out, ("p",)) is not get_path(out, ("q",))

    def test_occurs_check(self):
        # re-entrancy in one argument forces a node to contain itself
        out = unify(fs("[a:?x, b:[f:?x]]"), fs("[a:#1 [], b:#1]"))
        assert failed(out)

    def test_occurs_check_shared_scope(self):
        out = unify_shared(fs("?x"), fs("[f:?x]"))
        assert failed(out)

    def test_shared_scope_connects_arguments(self):
        out = unify_shared(fs("[p:?x]"), fs("[q:?x]"))
        assert get_path(out, ("p",)) is get_path(out, ("q",))

    def test_inputs_not_mutated(self):
        a = fs("[a:#1 [x:p], b:#1]")
        b = fs("[b:[y:q]]")
        unify(a, b)
        assert fs_to_text(a) == "[a:#1 [x:p], b:#1]"
        assert fs_to_text(b) == "[b:[y:q]]"

    def test_atom_vs_avm_clash(self):
        assert failed(unify(fs("[f:sg]"), fs("[f:[x:y]]")))

    def test_failure_path_is_nested(self):
        out = unify(fs("[agr:[num:sg]]"), fs("[agr:[num:pl]]"))
        assert out.path == ("agr", "num")


class TestListUnification:
    def test_closed_lists_same_length(self):
        out = unify(fs("<[n:sg], ?x>"), fs("<[p:3], q>"))
        assert variant(out, fs("<[n:sg, p:3], q>"))

    def test_closed_length_mismatch_fails(self):
        assert failed(unify(fs("<a, b>"), fs("<a>")))
        assert failed(unify(fs("<a>"), fs("<a, b>")))

    def test_open_tail_binds_remainder(self):
        out = unify(fs("[l:<a|?t>, rest:?t]"), fs("[l:<a, b, c>]"))
        assert variant(get_path(out, ("rest",)), fs("<b, c>"))

    def test_open_tail_binds_empty(self):
        out = unify(fs("[l:<a|?t>, rest:?t]"), fs("[l:<a>]"))
        assert variant(get_path(out, ("rest",)), fs("<>"))

    def test_two_open_lists(self):
        out = unify(fs("<a|?t>"), fs("<a, b|?s>"))
        assert not failed(out)
        assert len(out.items) == 2
        assert out.tail is not None

    def test_list_vs_atom_fails(self):
        assert failed(unify(fs("<a>"), Atom("a")))

    def test_tail_bound_to_atom_fails(self):
        assert failed(unify(fs("[l:<a|?t>, x:?t]"), fs("[x:sg]")))

    def test_tail_bound_to_empty_avm_stays_open(self):
        out = unify(fs("[l:<a|?t>, x:?t]"), fs("[x:[]]"))
        assert not failed(out)
        lst = get_path(out, ("l",))
        assert lst.tail is not None


class TestSubsumption:
    def test_empty_subsumes_all(self):
        assert subsumes(EMPTY, fs("[num:sg]"))
        assert subsumes(EMPTY, Atom("x"))
        assert subsumes(EMPTY, fs("<a>"))

    def test_atom_mismatch(self):
        assert not subsumes(fs("[num:sg]"), fs("[num:pl]"))

    def test_more_specific_not_subsuming(self):
        assert not subsumes(fs("[num:sg, per:3]"), fs("[num:sg]"))
        assert subsumes(fs("[num:sg]"), fs("[num:sg, per:3]"))

    def test_reentrancy_required(self):
        shared = fs("[a:#1 [], b:#1]")
        unshared = fs("[a:[x:p], b:[y:q]]")
        assert not subsumes(shared, unshared)

    def test_unifier_subsumed_by_inputs(self):
        a = fs("[a:#1 [x:p], b:#1]")
        b = fs("[b:[y:q]]")
        u = unify(a, b)
        assert subsumes(a, u)
        assert subsumes(b, u)

    def test_variant_var_bijection(self):
        assert variant(fs("[x:?v, y:?v]"), fs("[x:?w, y:?w]"))
        assert not variant(fs("[x:?v, y:?v]"), fs("[x:?w, y:?u]"))


class TestGetPath:
    def test_basic(self):
        assert get_path(fs("[agr:[num:sg]]"), ("agr", "num")) is Atom("sg")

    def test_absent(self):
        assert get_path(fs("[agr:[num:sg]]"), ("case",)) is None

    def test_through_reentrancy(self):
        out = unify(fs("[a:#1 [x:p], b:#1]"), fs("[b:[y:q]]"))
        assert get_path(out, ("a", "y")) is Atom("q")
        assert get_path(out, ("b", "x")) is Atom("p")


class TestTextRoundTrip:
    CASES = [
        "sg",
        "?x",
        "[]",
        "<>",
        "[num:sg]",
        "[agr:[num:sg, per:3], subcat:<[cat:np]>]",
        "[a:#1 [x:p], b:#1]",
        "<a, [f:g]|?t>",
        "[gaps_in:<[gcat:np, gfs:?f]|?r>, gaps_out:?r]",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_round_trip_is_variant(self, text):
        first = parse_fs(text)
        again = parse_fs(fs_to_text(first))
        assert variant(first, again)

    def test_parse_simple_avm(self):
        out = fs("[num:sg]")
        assert isinstance(out, Avm)
        assert out.get("num") is Atom("sg")

    def test_parse_reentrant_shares_node(self):
        out = fs("[a:#1 [x:p], b:#1]")
        assert out.get("a") is out.get("b")

    def test_print_tags_shared_nodes(self):
        out = unify(fs("[a:#1 [x:p], b:#1]"), fs("[b:[y:q]]"))
        assert fs_to_text(out) == "[a:#1 [x:p, y:q], b:#1]"

    def test_parse_error_position(self):
        with pytest.raises(FSParseError) as err:
            parse_fs("[num sg]")
        assert err.value.pos == 5

    def test_forward_tag_use_rejected(self):
        with pytest.raises(FSParseError):
            parse_fs("[a:#1, b:#1 [x:p]]")

    def test_trailing_garbage_rejected(self):
        with pytest.raises(FSParseError):
            parse_fs("[num:sg] extra")

    def test_duplicate_features_rejected(self):
        with pytest.raises(FSParseError):
            parse_fs("[num:sg, num:pl]")


class TestRename:
    def test_rename_consistent(self):
        a = fs("[x:?v, y:?v, z:?w]")
        out = rename(a)
        assert variant(a, out)
        assert get_path(out, ("x",)) is get_path(out, ("y",))
        assert get_path(out, ("x",)) is not Var("v")

    def test_rename_preserves_sharing(self):
        a = fs("[a:#1 [x:p], b:#1]")
        out = rename(a)
        assert out.get("a") is out.get("b")

    def test_rename_with_seed_mapping(self):
        a = fs("[id:?g]")
        out = rename(a, {Var("g"): Atom("g7")})
        assert get_path(out, ("id",)) is Atom("g7")


class TestAgainstNaiveOracle:
    # frozen expected values computed with the reference unifier
    def test_reentrancy_example_matches_oracle(self):
        a = fs("[a:#1 [x:p], b:#1]")
        b = fs("[b:[y:q]]")
        ours = unify(a, b)
        reference = naive_unify(a, b)
        assert reference is not None
        assert variant(ours, reference)

    @pytest.mark.parametrize(
        "left,right",
        [
            ("[a:?v, b:?v]", "[a:[n:sg], b:[p:3]]"),
            ("[l:<[c:np]|?t>, o:?t]", "[l:<[s:place], [c:v]>]"),
            ("[x:#1 [], y:#1]", "[x:[f:g], y:[h:i]]"),
            ("[x:#1 [], y:#1]", "[x:p, y:q]"),
            ("<a, b>", "<a|?t>"),
            ("[f:?x]", "?x"),
        ],
    )
    def test_agreement_with_oracle(self, left, right):
        a, b = fs(left), fs(right)
        ours = unify(a, b)
        reference = naive_unify(a, b)
        if reference is None:
            assert failed(ours)
        else:
            assert not failed(ours)
            assert variant(ours, reference)
