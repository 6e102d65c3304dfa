"""Packages, multisets of packages and supply feasibility.

A package is a nonempty subset of the varieties ``0..n-1`` encoded as a
bitmask ``int``; canonical order is plain integer order.  A multiset of
packages is a :class:`PackageMultiset`, an immutable sparse mapping from
package mask to a positive count.
"""
from __future__ import annotations

import os
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from .errors import DomainError, ResourceLimitError

MAX_VARIETIES = 24
DEFAULT_UNITS_GUARD = 12


def units_guard() -> int:
    """Largest total supply for which exhaustive enumeration is allowed."""
    raw = os.environ.get("PAKMARKET_GUARD")
    if raw is None:
        return DEFAULT_UNITS_GUARD
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"PAKMARKET_GUARD must be an integer, got {raw!r}") from None


def package_mask(members: Iterable[int]) -> int:
    mask = 0
    for j in members:
        if not 0 <= j < MAX_VARIETIES:
            raise DomainError(f"variety index {j} out of range")
        mask |= 1 << j
    return mask


def package_members(mask: int) -> tuple[int, ...]:
    return tuple(j for j in range(mask.bit_length()) if mask >> j & 1)


def package_size(mask: int) -> int:
    return bin(mask).count("1")


def is_subpackage(small: int, big: int) -> bool:
    return small & ~big == 0


def all_packages(n: int) -> tuple[int, ...]:
    """Every nonempty subset of ``n`` varieties in canonical order."""
    return tuple(range(1, 1 << n))


def package_label(mask: int, names: tuple[str, ...]) -> str:
    """Human readable name, e.g. ``AB`` or ``apple+pear``."""
    parts = [names[j] for j in package_members(mask)]
    if not parts:
        return "{}"
    if all(len(name) == 1 for name in names):
        return "".join(parts)
    return "+".join(parts)


class PackageMultiset(Mapping):
    """Immutable multiset of packages.

    Behaves as a read-only mapping ``mask -> count`` holding only positive
    counts; looking up an absent package yields ``0``.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[int, int] | Iterable[tuple[int, int]] | None = None):
        items = counts.items() if isinstance(counts, Mapping) else (counts or ())
        data: dict[int, int] = {}
        for mask, count in items:
            if isinstance(count, bool) or not isinstance(count, int):
                raise DomainError(f"count for package {mask} must be an integer")
            if count < 0:
                raise DomainError(f"negative count {count} for package {mask}")
            if count == 0:
                continue
            if mask <= 0:
                raise DomainError("the empty package cannot be traded")
            data[mask] = data.get(mask, 0) + count
        self._counts = dict(sorted(data.items()))
        self._hash = None

    @classmethod
    def of(cls, *packages: int) -> PackageMultiset:
        counts: dict[int, int] = {}
        for mask in packages:
            counts[mask] = counts.get(mask, 0) + 1
        return cls(counts)

    def __getitem__(self, mask: int) -> int:
        return self._counts.get(mask, 0)

    def __iter__(self) -> Iterator[int]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, mask) -> bool:
        return mask in self._counts

    def __eq__(self, other) -> bool:
        if isinstance(other, PackageMultiset):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __add__(self, other: Mapping[int, int]) -> PackageMultiset:
        merged = dict(self._counts)
        for mask, count in other.items():
            merged[mask] = merged.get(mask, 0) + count
        return PackageMultiset(merged)

    def __repr__(self) -> str:
        return f"PackageMultiset({self._counts})"

    @property
    def total(self) -> int:
        """Number of package copies, counted with multiplicity."""
        return sum(self._counts.values())

    def copies(self) -> tuple[int, ...]:
        """Package masks repeated by multiplicity, canonical order."""
        return tuple(mask for mask, count in self._counts.items() for _ in range(count))

    def union(self) -> int:
        mask = 0
        for package in self._counts:
            mask |= package
        return mask

    def is_disjoint_family(self) -> bool:
        seen = 0
        for mask, count in self._counts.items():
            if count > 1 or mask & seen:
                return False
            seen |= mask
        return True

    def label(self, names: tuple[str, ...]) -> str:
        if not self._counts:
            return "{}"
        return "{" + ", ".join(package_label(m, names) for m in self.copies()) + "}"


EMPTY = PackageMultiset()


@dataclass(frozen=True)
class Supply:
    """Named varieties and the seller's available units of each."""

    names: tuple[str, ...]
    units: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "units", tuple(self.units))
        if len(self.names) != len(self.units):
            raise DomainError("names and units differ in length")
        if not 1 <= len(self.names) <= MAX_VARIETIES:
            raise DomainError(f"number of varieties must be between 1 and {MAX_VARIETIES}")
        if len(set(self.names)) != len(self.names):
            raise DomainError("variety names must be unique")
        for name, units in zip(self.names, self.units):
            if isinstance(units, bool) or not isinstance(units, int) or units < 1:
                raise DomainError(f"variety {name!r} needs a positive integer number of units")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def total_units(self) -> int:
        return sum(self.units)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DomainError(f"unknown variety {name!r}") from None

    def label(self, mask: int) -> str:
        return package_label(mask, self.names)


def unpack(k: Mapping[int, int], n: int) -> tuple[int, ...]:
    """Units of each variety contained in the multiset ``k``."""
    counts = [0] * n
    for mask, count in k.items():
        if mask >> n:
            raise DomainError(f"package {mask:#b} uses a variety outside 0..{n - 1}")
        for j in package_members(mask):
            counts[j] += count
    return tuple(counts)


def is_feasible(k: Mapping[int, int], supply: Supply) -> bool:
    return all(used <= have for used, have in zip(unpack(k, supply.n), supply.units))


def _check_guard(supply: Supply) -> None:
    limit = units_guard()
    if supply.total_units > limit:
        raise ResourceLimitError(
            f"total supply {supply.total_units} exceeds the enumeration guard {limit}; "
            "raise PAKMARKET_GUARD to allow it"
        )


def enumerate_feasible(supply: Supply, packages: Iterable[int]) -> Iterator[PackageMultiset]:
    """Every multiset over ``packages`` whose unpacking fits inside ``supply``.

    The empty multiset comes first; later packages vary fastest.
    """
    _check_guard(supply)
    order = sorted(set(packages))
    for mask in order:
        if mask <= 0 or mask >> supply.n:
            raise DomainError(f"package {mask} is not a nonempty subset of the varieties")
    members = [package_members(m) for m in order]
    remaining = list(supply.units)
    chosen = [0] * len(order)

    def rec(i: int):
        if i == len(order):
            yield PackageMultiset(zip(order, chosen))
            return
        cap = min(remaining[j] for j in members[i])
        for count in range(cap + 1):
            chosen[i] = count
            for j in members[i]:
                remaining[j] -= count
            yield from rec(i + 1)
            for j in members[i]:
                remaining[j] += count
        chosen[i] = 0

    yield from rec(0)
