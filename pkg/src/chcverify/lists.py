"""Unbounded symbolic lists.

A list is a nonnegative length plus a stream of nondeterministic elements:
no element is ever materialized, a fresh head variable appears at each
consumption step. Values may carry a concrete prefix (from cons) and an
element-wise transform chain (from map). The source id is the identity
that the synchronization transformation keys on: map preserves it,
append always mints a fresh one.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import terms as T


@dataclass(frozen=True)
class SymListSource:
    """Identity of an unbounded nondeterministic list."""

    id: str
    length: T.Term       # >= 0 wherever the source is used in a query
    declared: bool = False   # True for declare-symbolic lists


@dataclass(frozen=True)
class SymListValue:
    """A possibly partially-specified list value.

    prefix entries are final terms (transforms already applied); the chain
    applies only to elements drawn from the source.
    """

    prefix: tuple = ()
    source: SymListSource | None = None
    chain: tuple = ()    # function names applied element-wise, oldest first

    def total_length(self) -> T.Term:
        k = T.iconst(len(self.prefix))
        if self.source is None:
            return k
        return T.add(k, self.source.length)

    def with_source_length(self, length: T.Term) -> "SymListValue":
        assert self.source is not None
        return SymListValue(self.prefix, SymListSource(self.source.id, length,
                                                       self.source.declared),
                            self.chain)


def fuse_map(fname: str, lv: SymListValue, apply_prefix) -> SymListValue:
    """Append `fname` to the transform chain; the source id is preserved.

    `apply_prefix` maps a prefix term through the function now, since
    prefix elements are stored post-transform.
    """
    prefix = tuple(apply_prefix(p) for p in lv.prefix)
    return SymListValue(prefix, lv.source, lv.chain + (fname,))


def cons(head: T.Term, lv: SymListValue) -> SymListValue:
    return SymListValue((head,) + lv.prefix, lv.source, lv.chain)


def append(a: SymListValue, b: SymListValue, fresh_source) -> SymListValue:
    """Append two lists.

    Concrete-tail left operands keep element identity; otherwise the result
    is a fresh source whose length is the exact sum, with element identity
    deliberately dropped.
    """
    if a.source is None:
        return SymListValue(a.prefix + b.prefix, b.source, b.chain)
    if b.source is None and not b.prefix:
        return a
    length = T.add(a.total_length(), b.total_length())
    return SymListValue((), fresh_source(length), ())


def mergeable(a: SymListValue, b: SymListValue) -> bool:
    """Branch merge keeps list bindings only when they are the same value."""
    return a == b
