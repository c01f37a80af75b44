import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treegrow.errors import DomainError, ParseError
from treegrow.oracle import enumerate_plane_trees, enumerate_subtrees
from treegrow.treespace import (PlaneTree, RootedSubtree, children_count,
                                complete_d_ary, compose_root, decompose_root, format_tree,
                                is_bouquet_addition, is_right_leaning_leaf_addition,
                                parse_tree, to_dot, word_from_text, word_to_text)


def pt(*words):
    return PlaneTree(words)


def rs(*words):
    return RootedSubtree(words)


class TestConstruction:
    def test_plane_requires_root(self):
        with pytest.raises(DomainError):
            PlaneTree([(1,)])

    def test_plane_requires_parent_closure(self):
        with pytest.raises(DomainError):
            PlaneTree([(), (1, 1)])

    def test_plane_requires_left_siblings(self):
        with pytest.raises(DomainError):
            PlaneTree([(), (2,)])

    def test_subtree_allows_gaps(self):
        tau = rs((), (2,), (5,), (2, 3))
        assert len(tau) == 4

    def test_subtree_still_parent_closed(self):
        with pytest.raises(DomainError):
            RootedSubtree([(), (2, 3)])

    def test_letters_positive(self):
        with pytest.raises(DomainError):
            PlaneTree([(), (0,)])

    def test_value_semantics(self):
        a = pt((), (1,))
        b = pt((1,), ())
        assert a == b and hash(a) == hash(b)
        assert a != rs((), (1,))


class TestChildrenCount:
    def test_single_vertex(self):
        assert children_count(pt(()), ()) == 0

    def test_direct_count(self):
        assert children_count(pt((), (1,), (2,), (1, 1)), ()) == 2

    def test_subtree_count(self):
        assert children_count(rs((), (2,), (5,), (2, 3)), ()) == 2

    def test_missing_vertex(self):
        with pytest.raises(DomainError):
            children_count(pt(()), (1,))


class TestGrowthPredicates:
    def test_first_child(self):
        assert is_right_leaning_leaf_addition(pt(()), pt((), (1,)))

    def test_next_sibling(self):
        assert is_right_leaning_leaf_addition(pt((), (1,)), pt((), (1,), (2,)))

    def test_two_added(self):
        small = pt((), (1,), (2,))
        big = pt((), (1,), (2,), (3,), (1, 1))
        assert not is_right_leaning_leaf_addition(small, big)

    def test_left_leaning_rejected(self):
        # adding (1,1) to a tree where vertex 1 already has a child at 1 is fine,
        # but adding a *middle* position cannot even produce a plane tree; instead
        # check a non-rightmost parent choice: new leaf at root position 1 when
        # the root already has two children is position 3, not 1.
        small = pt((), (1,), (2,))
        big = pt((), (1,), (2,), (1, 1))
        assert is_right_leaning_leaf_addition(small, big)  # rightmost at vertex (1,)

    def test_bouquet_at_root(self):
        assert is_bouquet_addition(pt(()), pt((), (1,), (2,)), 2)

    def test_bouquet_at_child(self):
        small = pt((), (1,), (2,))
        big = pt((), (1,), (2,), (1, 1), (1, 2))
        assert is_bouquet_addition(small, big, 2)

    def test_single_leaf_is_not_a_pair(self):
        assert not is_bouquet_addition(pt(()), pt((), (1,)), 2)

    def test_split_bouquet_rejected(self):
        small = pt((), (1,), (2,))
        big = pt((), (1,), (2,), (3,), (1, 1))
        assert not is_bouquet_addition(small, big, 2)

    def test_leaf_addition_is_size_one_inclusion(self):
        for n in range(1, 6):
            for small in enumerate_plane_trees(n):
                for big in enumerate_plane_trees(n + 1):
                    if is_right_leaning_leaf_addition(small, big):
                        assert small.vertices < big.vertices
                        assert len(big) == len(small) + 1


class TestRootDecomposition:
    def test_single_vertex(self):
        subtrees, parts = decompose_root(pt(()))
        assert subtrees == [] and parts == ()

    def test_two_children(self):
        subtrees, parts = decompose_root(pt((), (1,), (2,), (1, 1)))
        assert parts == (2, 1)
        assert subtrees[0] == pt((), (1,))
        assert subtrees[1] == pt(())

    def test_path(self):
        subtrees, parts = decompose_root(pt((), (1,), (1, 1), (1, 1, 1)))
        assert parts == (3,)
        assert subtrees[0] == pt((), (1,), (1, 1))

    def test_compose_empty(self):
        assert compose_root([]) == pt(())

    def test_compose_two_leaves(self):
        assert compose_root([pt(()), pt(())]) == pt((), (1,), (2,))

    def test_compose_path(self):
        assert compose_root([pt((), (1,))]) == pt((), (1,), (1, 1))

    def test_round_trip_enumerated(self):
        for n in range(1, 7):
            for tree in enumerate_plane_trees(n):
                subtrees, parts = decompose_root(tree)
                assert sum(parts) == len(tree) - 1
                assert compose_root(subtrees) == tree


class TestCompletion:
    def test_root_only(self):
        assert complete_d_ary(rs(()), 2) == pt((), (1,), (2,))

    def test_one_child(self):
        assert complete_d_ary(rs((), (1,)), 2) == pt((), (1,), (2,), (1, 1), (1, 2))

    def test_ternary(self):
        got = complete_d_ary(rs((), (2,)), 3)
        assert got == pt((), (1,), (2,), (3,), (2, 1), (2, 2), (2, 3))

    def test_letter_too_big(self):
        with pytest.raises(DomainError):
            complete_d_ary(rs((), (3,)), 2)

    @pytest.mark.parametrize("d", [2, 3])
    def test_all_degrees_full_or_zero(self, d):
        for n in range(1, 6):
            for tau in enumerate_subtrees(n, dmax=d):
                tree = complete_d_ary(tau, d)
                assert len(tree) == d * len(tau) + 1
                for u in tree.vertices:
                    assert tree.children_count(u) in (0, d)


class TestSerialization:
    def test_root_text(self):
        assert word_to_text(()) == "e"
        assert word_from_text("e") == ()
        assert word_from_text("1.2") == (1, 2)

    def test_bad_word(self):
        with pytest.raises(ParseError):
            word_from_text("1.x")
        with pytest.raises(ParseError):
            word_from_text("0")

    def test_parse_root_only(self):
        assert parse_tree("e") == pt(())

    def test_parse_example(self):
        assert parse_tree("e,1,2,1.1") == pt((), (1,), (2,), (1, 1))

    def test_parse_missing_sibling(self):
        with pytest.raises(ParseError) as err:
            parse_tree("e,2")
        assert "2" in str(err.value)

    def test_parse_subtree_kind(self):
        assert parse_tree("e,2,5,2.3", kind="subtree") == rs((), (2,), (5,), (2, 3))

    def test_round_trip_plane_trees(self):
        for n in range(1, 8):
            for tree in enumerate_plane_trees(n):
                assert parse_tree(format_tree(tree)) == tree

    def test_round_trip_subtrees(self):
        for n in range(1, 6):
            for tau in enumerate_subtrees(n, dmax=3):
                assert parse_tree(format_tree(tau), kind="subtree") == tau

    def test_dot_output(self):
        dot = to_dot(pt((), (1,), (2,)))
        assert '"e" -> "1"' in dot and '"e" -> "2"' in dot

    @given(st.lists(st.integers(1, 4), min_size=0, max_size=5))
    @settings(max_examples=100)
    def test_word_text_round_trip(self, letters):
        word = tuple(letters)
        assert word_from_text(word_to_text(word)) == word
