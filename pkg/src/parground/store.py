"""Shared atom store for semi-naive evaluation.

Each predicate's extension lives in three disjoint append-only lists:

* ``s``  -- atoms accumulated in earlier evaluation passes,
* ``d``  -- the delta: atoms new as of the current pass,
* ``ns`` -- atoms derived during the current pass (next delta).

Workers instantiating rules read ``s``/``d`` freely and funnel new
head atoms through :meth:`ExtensionStore.try_add_ns`, the only write
that runs concurrently; it is guarded by one lock per predicate.  Between passes the coordinator -- single-threaded at that
point -- shifts ``ns`` into ``d`` and folds ``d`` into ``s``.

Lookups by partially bound arguments go through per-predicate hash
indexes, keyed by ``(role, mask)`` where ``mask`` is the tuple of
bound argument positions.  Indexes are built lazily on first use and
dropped whenever the underlying list changes shape at a barrier.
"""
from __future__ import annotations

import threading
from typing import Iterable, Iterator, Sequence

from .model import Atom

# roles a lookup can address; "both" chains s and d
S_ROLE = "s"
DELTA_ROLE = "delta"
BOTH_ROLE = "both"

_Key = tuple[str, ...]
_Index = dict[_Key, list[Atom]]


class _PredicateEntry:
    __slots__ = (
        "s_list",
        "d_list",
        "ns_list",
        "s_set",
        "d_set",
        "ns_set",
        "lock",
        "indexes",
    )

    def __init__(self) -> None:
        self.s_list: list[Atom] = []
        self.d_list: list[Atom] = []
        self.ns_list: list[Atom] = []
        self.s_set: set[Atom] = set()
        self.d_set: set[Atom] = set()
        self.ns_set: set[Atom] = set()
        self.lock = threading.Lock()
        self.indexes: dict[tuple[str, tuple[int, ...]], _Index] = {}

    def contains(self, atom: Atom) -> bool:
        return atom in self.s_set or atom in self.d_set or atom in self.ns_set


def _key_for(atom: Atom, mask: tuple[int, ...]) -> _Key:
    terms = atom.terms
    return tuple(terms[i].name for i in mask)


class ExtensionStore:
    """All predicate extensions of one grounding run."""

    def __init__(self) -> None:
        self._entries: dict[str, _PredicateEntry] = {}

    def _entry(self, predicate: str) -> _PredicateEntry:
        entry = self._entries.get(predicate)
        if entry is None:
            entry = self._entries[predicate] = _PredicateEntry()
        return entry

    # -- loading ------------------------------------------------------

    def add_edb_atoms(self, atoms: Iterable[Atom]) -> None:
        """Seed input facts directly into the accumulated lists,
        preserving order and dropping duplicates."""
        for atom in atoms:
            entry = self._entry(atom.predicate)
            if atom not in entry.s_set:
                entry.s_set.add(atom)
                entry.s_list.append(atom)

    # -- plain views ---------------------------------------------------

    def atoms_view(self, predicate: str) -> Sequence[Atom]:
        """Everything currently visible to a reader: s followed by d."""
        entry = self._entries.get(predicate)
        if entry is None:
            return ()
        if not entry.d_list:
            return entry.s_list
        return entry.s_list + entry.d_list

    def s_atoms(self, predicate: str) -> Sequence[Atom]:
        entry = self._entries.get(predicate)
        return entry.s_list if entry is not None else ()

    def d_atoms(self, predicate: str) -> Sequence[Atom]:
        entry = self._entries.get(predicate)
        return entry.d_list if entry is not None else ()

    def s_len(self, predicate: str) -> int:
        entry = self._entries.get(predicate)
        return len(entry.s_list) if entry is not None else 0

    def d_len(self, predicate: str) -> int:
        entry = self._entries.get(predicate)
        return len(entry.d_list) if entry is not None else 0

    def contains(self, atom: Atom) -> bool:
        entry = self._entries.get(atom.predicate)
        return entry is not None and entry.contains(atom)

    def seen_in_s_or_d(self, atom: Atom) -> bool:
        entry = self._entries.get(atom.predicate)
        if entry is None:
            return False
        return atom in entry.s_set or atom in entry.d_set

    # -- concurrent writes ---------------------------------------------

    def try_add_ns(self, atom: Atom) -> bool:
        """Add a derived atom to the next delta unless it is already
        known anywhere.  Returns True iff the atom was new.  Safe to
        call from multiple worker threads."""
        entry = self._entry(atom.predicate)
        with entry.lock:
            if entry.contains(atom):
                return False
            entry.ns_set.add(atom)
            entry.ns_list.append(atom)
            return True

    # -- barrier transitions (single-threaded) --------------------------

    def shift_ns_to_delta(self, predicates: Iterable[str]) -> None:
        """d <- ns; ns <- empty.  The previous delta must already have
        been merged."""
        for predicate in predicates:
            entry = self._entries.get(predicate)
            if entry is None:
                continue
            if entry.d_list:
                raise RuntimeError(
                    "delta of %r not merged before shift" % predicate
                )
            if entry.ns_list:
                entry.d_list = entry.ns_list
                entry.d_set = entry.ns_set
                entry.ns_list = []
                entry.ns_set = set()
                entry.indexes.clear()

    def merge_delta_into_s(self, predicates: Iterable[str]) -> None:
        """s <- s + d; d <- empty."""
        for predicate in predicates:
            entry = self._entries.get(predicate)
            if entry is None or not entry.d_list:
                continue
            entry.s_list.extend(entry.d_list)
            entry.s_set.update(entry.d_set)
            entry.d_list = []
            entry.d_set = set()
            entry.indexes.clear()

    def ns_nonempty(self, predicates: Iterable[str]) -> bool:
        for predicate in predicates:
            entry = self._entries.get(predicate)
            if entry is not None and entry.ns_list:
                return True
        return False

    # -- indexed access --------------------------------------------------

    def _role_list(self, entry: _PredicateEntry, role: str) -> list[Atom]:
        if role == S_ROLE:
            return entry.s_list
        if role == DELTA_ROLE:
            return entry.d_list
        raise ValueError("unknown role %r" % role)

    def _index(
        self, entry: _PredicateEntry, role: str, mask: tuple[int, ...]
    ) -> _Index:
        index = entry.indexes.get((role, mask))
        if index is None:
            index = {}
            for atom in self._role_list(entry, role):
                index.setdefault(_key_for(atom, mask), []).append(atom)
            entry.indexes[(role, mask)] = index
        return index

    def lookup(
        self,
        predicate: str,
        role: str,
        mask: tuple[int, ...],
        key: _Key,
    ) -> Iterator[Atom]:
        """Atoms of ``predicate`` in ``role`` whose arguments at the
        ``mask`` positions equal ``key``.  With an empty mask this is a
        plain scan of the role's list."""
        entry = self._entries.get(predicate)
        if entry is None:
            return iter(())
        if role == BOTH_ROLE:
            if not entry.d_list:
                role = S_ROLE
            elif not entry.s_list:
                role = DELTA_ROLE
            else:
                return self._lookup_both(entry, mask, key)
        if not mask:
            return iter(self._role_list(entry, role))
        return iter(self._index(entry, role, mask).get(key, ()))

    def _lookup_both(
        self, entry: _PredicateEntry, mask: tuple[int, ...], key: _Key
    ) -> Iterator[Atom]:
        if not mask:
            yield from entry.s_list
            yield from entry.d_list
            return
        yield from self._index(entry, S_ROLE, mask).get(key, ())
        yield from self._index(entry, DELTA_ROLE, mask).get(key, ())

    # -- results ----------------------------------------------------------

    def predicates(self) -> list[str]:
        return sorted(self._entries)

    def final_extensions(self) -> dict[str, frozenset[Atom]]:
        """Extensions after a finished run, keyed by predicate."""
        result: dict[str, frozenset[Atom]] = {}
        for predicate, entry in self._entries.items():
            if entry.d_list or entry.ns_list:
                raise RuntimeError(
                    "extension of %r still has pending atoms" % predicate
                )
            result[predicate] = frozenset(entry.s_list)
        return result

    def check_consistency(self) -> None:
        """Cross-check the set/list pairs; debugging aid."""
        for predicate, entry in self._entries.items():
            for label, lst, st in (
                ("s", entry.s_list, entry.s_set),
                ("d", entry.d_list, entry.d_set),
                ("ns", entry.ns_list, entry.ns_set),
            ):
                if len(lst) != len(st) or set(lst) != st:
                    raise AssertionError(
                        "store entry %r: %s list and set disagree"
                        % (predicate, label)
                    )
