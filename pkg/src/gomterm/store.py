"""Maximally shared term storage.

Every structurally distinct term exists exactly once per store, so structural
equality is identity of references and hashing is O(1).  Stores are explicit
values (no ambient global); a reference is tagged with its store, and mixing
stores raises StoreMismatch.

Construction through :meth:`TermStore._intern` is reserved for the hook
engine: client code must build terms through a Factory so that no raw,
unnormalized term can ever be observed.
"""

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING

from .errors import ArityMismatch, SortMismatch, StoreMismatch, UnknownOperator

if TYPE_CHECKING:
    from .signature import OperatorDecl, SignatureModule


class NodeRef:
    """Identity of an interned, sorted term.

    NodeRefs are created by the store only; two refs are the same object iff
    their (operator, children) shapes are equal, so ``is``, ``==`` and hashing
    are all constant-time identity operations.
    """

    __slots__ = ("uid", "decl", "children", "sort", "store", "_printed")

    def __init__(self, uid: int, decl: OperatorDecl, children: tuple[NodeRef, ...], store: TermStore):
        self.uid = uid
        self.decl = decl
        self.children = children
        self.sort = decl.result
        self.store = store
        self._printed: str | None = None

    @property
    def operator(self) -> str:
        return self.decl.name

    def __repr__(self) -> str:
        return print_term(self)


class TermStore:
    """Interning arena for terms over one validated signature module."""

    def __init__(self, module: SignatureModule):
        self.module = module
        self._table: dict[tuple, NodeRef] = {}
        self._uids = itertools.count()

    def __len__(self) -> int:
        return len(self._table)

    def _intern(self, operator: str, children) -> NodeRef:
        """Return the unique node for this shape, creating it if needed.

        Internal: only the hook engine may call this.  Children must be
        well-sorted for the operator and come from this store.  Racing interns
        of the same shape are linearizable: dict insertion picks one winner.
        """
        decl = self.module.operator(operator)
        if decl is None:
            raise UnknownOperator(operator)
        children = tuple(children)
        for child in children:
            if child.store is not self:
                raise StoreMismatch(f"child of {operator} belongs to a different store")
        if decl.is_variadic:
            for child in children:
                if child.sort != decl.element:
                    raise SortMismatch(
                        f"{operator} takes {decl.element} elements, got {child.sort}"
                    )
        else:
            if len(children) != decl.arity:
                raise ArityMismatch(
                    f"{operator} takes {decl.arity} arguments, got {len(children)}"
                )
            for slot, child in zip(decl.slots, children):
                if child.sort != slot.sort:
                    raise SortMismatch(
                        f"slot {slot.name} of {operator} takes {slot.sort}, got {child.sort}"
                    )
        key = (operator, tuple(c.uid for c in children))
        ref = self._table.get(key)
        if ref is None:
            ref = self._table.setdefault(key, NodeRef(next(self._uids), decl, children, self))
        return ref


def _check_same_store(a: NodeRef, b: NodeRef):
    if a.store is not b.store:
        raise StoreMismatch("node references come from different stores")


def node_equal(a: NodeRef, b: NodeRef) -> bool:
    """Constant-time structural equality (identity of interned references)."""
    _check_same_store(a, b)
    return a is b


def print_term(t: NodeRef) -> str:
    """Canonical functional notation: constants bare, otherwise ``op(c1,...,cn)``.

    No whitespace is ever emitted.  This format is frozen: it is the substrate
    of compare_terms, so changing it would change the canonical sort order.
    """
    s = t._printed
    if s is None:
        if not t.children and not t.decl.is_variadic:
            s = t.decl.name
        else:
            s = f"{t.decl.name}({','.join(print_term(c) for c in t.children)})"
        t._printed = s
    return s


def compare_terms(a: NodeRef, b: NodeRef) -> int:
    """Total order on terms: lexicographic comparison of printed forms.

    Returns a negative, zero or positive int; zero iff node_equal(a, b).
    """
    _check_same_store(a, b)
    if a is b:
        return 0
    sa, sb = print_term(a), print_term(b)
    return -1 if sa < sb else 1


def sort_of(t: NodeRef) -> str:
    """The declared result sort of the node's head operator."""
    return t.sort
