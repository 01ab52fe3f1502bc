"""Extension store: role lifecycle NS -> delta -> S, lookups, indexes."""
import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parground.model import Atom, Term
from parground.store import BOTH_ROLE, DELTA_ROLE, S_ROLE, ExtensionStore


def atom(pred, *names):
    return Atom(pred, tuple(Term(str(n)) for n in names))


@pytest.fixture
def edges():
    return [atom("e", "a", "b"), atom("e", "b", "c"), atom("e", "b", "d")]


@pytest.fixture
def store(edges):
    s = ExtensionStore()
    s.add_edb_atoms(edges)
    return s


def test_edb_atoms_keep_input_order_and_dedup(edges):
    s = ExtensionStore()
    s.add_edb_atoms(edges + [edges[0], edges[2]])
    assert list(s.atoms_view("e")) == edges
    assert s.s_len("e") == 3
    assert s.d_len("e") == 0


def test_contains_and_seen(store, edges):
    assert store.contains(edges[0])
    assert store.seen_in_s_or_d(edges[1])
    assert not store.contains(atom("e", "z", "z"))
    assert not store.contains(atom("other", "a"))


def test_ns_lifecycle(store):
    fresh = atom("r", "a", "c")
    assert store.try_add_ns(fresh)
    assert not store.try_add_ns(fresh)  # duplicate rejected
    assert store.ns_nonempty(["r"])
    assert not store.seen_in_s_or_d(fresh)  # still pending
    assert store.contains(fresh)  # but known to the store

    store.shift_ns_to_delta(["r"])
    assert not store.ns_nonempty(["r"])
    assert store.d_len("r") == 1
    assert list(store.d_atoms("r")) == [fresh]
    assert store.seen_in_s_or_d(fresh)
    assert not store.try_add_ns(fresh)  # delta blocks re-derivation

    store.merge_delta_into_s(["r"])
    assert store.d_len("r") == 0
    assert store.s_len("r") == 1
    assert not store.try_add_ns(fresh)  # and so does S


def test_try_add_ns_rejects_atoms_already_in_s(store, edges):
    assert not store.try_add_ns(edges[0])


def test_shift_requires_merged_delta(store):
    store.try_add_ns(atom("r", "x", "y"))
    store.shift_ns_to_delta(["r"])
    store.try_add_ns(atom("r", "y", "z"))
    with pytest.raises(RuntimeError, match="not merged"):
        store.shift_ns_to_delta(["r"])


def test_atoms_view_is_s_then_delta(store):
    store.try_add_ns(atom("e", "c", "d"))
    store.shift_ns_to_delta(["e"])
    view = [str(a) for a in store.atoms_view("e")]
    assert view == ["e(a,b)", "e(b,c)", "e(b,d)", "e(c,d)"]
    assert store.s_len("e") == 3 and store.d_len("e") == 1


def test_lookup_with_mask(store):
    hits = list(store.lookup("e", S_ROLE, (0,), ("b",)))
    assert [str(a) for a in hits] == ["e(b,c)", "e(b,d)"]
    assert list(store.lookup("e", S_ROLE, (0,), ("z",))) == []
    # two-position mask pins the tuple exactly
    hits = list(store.lookup("e", S_ROLE, (0, 1), ("b", "d")))
    assert [str(a) for a in hits] == ["e(b,d)"]


def test_lookup_empty_mask_scans(store, edges):
    assert list(store.lookup("e", S_ROLE, (), ())) == edges


def test_lookup_unknown_predicate(store):
    assert list(store.lookup("nope", S_ROLE, (), ())) == []
    assert list(store.lookup("nope", BOTH_ROLE, (0,), ("a",))) == []


def test_lookup_both_role_chains(store):
    store.try_add_ns(atom("e", "b", "z"))
    store.shift_ns_to_delta(["e"])
    hits = [str(a) for a in store.lookup("e", BOTH_ROLE, (0,), ("b",))]
    assert hits == ["e(b,c)", "e(b,d)", "e(b,z)"]
    # delta-only view sees just the new atom
    hits = [str(a) for a in store.lookup("e", DELTA_ROLE, (0,), ("b",))]
    assert hits == ["e(b,z)"]


def test_indexes_rebuilt_after_transitions(store):
    assert list(store.lookup("e", DELTA_ROLE, (0,), ("c",))) == []
    store.try_add_ns(atom("e", "c", "x"))
    store.shift_ns_to_delta(["e"])
    assert [str(a) for a in store.lookup("e", DELTA_ROLE, (0,), ("c",))] == [
        "e(c,x)"
    ]
    store.merge_delta_into_s(["e"])
    assert [str(a) for a in store.lookup("e", S_ROLE, (0,), ("c",))] == ["e(c,x)"]
    assert list(store.lookup("e", DELTA_ROLE, (0,), ("c",))) == []


def test_final_extensions(store):
    store.try_add_ns(atom("r", "a", "c"))
    store.shift_ns_to_delta(["r"])
    store.merge_delta_into_s(["r"])
    final = store.final_extensions()
    assert final["r"] == {atom("r", "a", "c")}
    assert len(final["e"]) == 3


def test_final_extensions_refuses_pending_atoms(store):
    store.try_add_ns(atom("r", "a", "c"))
    with pytest.raises(RuntimeError, match="pending"):
        store.final_extensions()
    store.shift_ns_to_delta(["r"])
    with pytest.raises(RuntimeError, match="pending"):
        store.final_extensions()


def test_check_consistency_passes_on_good_store(store):
    store.try_add_ns(atom("r", "a", "b"))
    store.check_consistency()


def test_concurrent_try_add_ns_inserts_each_atom_once():
    store = ExtensionStore()
    atoms = [atom("p", i % 50, (i * 7) % 50) for i in range(400)]
    wins = []
    lock = threading.Lock()

    def worker():
        local = 0
        for a in atoms:
            if store.try_add_ns(a):
                local += 1
        with lock:
            wins.append(local)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    distinct = len(set(atoms))
    assert sum(wins) == distinct
    store.shift_ns_to_delta(["p"])
    assert store.d_len("p") == distinct
    store.check_consistency()


@given(
    st.lists(
        st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=40
    ),
    st.lists(
        st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=40
    ),
)
def test_store_roles_stay_disjoint(base, derived):
    """Whatever gets added, S, delta and NS never share an atom."""
    store = ExtensionStore()
    store.add_edb_atoms([atom("p", x, y) for x, y in base])
    for x, y in derived[: len(derived) // 2]:
        store.try_add_ns(atom("p", x, y))
    store.shift_ns_to_delta(["p"])
    for x, y in derived[len(derived) // 2 :]:
        store.try_add_ns(atom("p", x, y))

    s = set(store.s_atoms("p"))
    d = set(store.d_atoms("p"))
    view = list(store.atoms_view("p"))
    assert not (s & d)
    assert len(view) == len(s) + len(d)
    store.check_consistency()
