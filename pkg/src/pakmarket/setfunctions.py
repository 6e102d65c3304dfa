"""Set functions over ``2^N`` and the duality between revenue and cost."""
from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass

from .errors import DomainError
from .market import MAX_VARIETIES


@dataclass(frozen=True)
class SetFunction:
    """Integer-valued function on every subset of ``n`` varieties, zero on the empty set.

    ``table[mask]`` holds the value of subset ``mask``.
    """

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if not 0 <= self.n <= MAX_VARIETIES:
            raise DomainError(f"n must be between 0 and {MAX_VARIETIES}")
        if len(self.table) != 1 << self.n:
            raise DomainError(f"table needs {1 << self.n} entries, got {len(self.table)}")
        if self.table[0] != 0:
            raise DomainError("set function must vanish on the empty set")

    @classmethod
    def from_mapping(cls, n: int, values: Mapping[int, int], default: int | None = None) -> SetFunction:
        table = [0] * (1 << n)
        for mask in range(1, 1 << n):
            if mask in values:
                table[mask] = values[mask]
            elif default is None:
                raise DomainError(f"missing value for subset {mask:#b}")
            else:
                table[mask] = default
        for mask in values:
            if not 0 <= mask < 1 << n:
                raise DomainError(f"subset {mask} outside 2^N")
        if values.get(0, 0) != 0:
            raise DomainError("set function must vanish on the empty set")
        return cls(n, tuple(table))

    def __getitem__(self, mask: int) -> int:
        return self.table[mask]

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def as_dict(self) -> dict[int, int]:
        return {mask: self.table[mask] for mask in range(1, 1 << self.n)}


def set_function_dual(f: SetFunction) -> SetFunction:
    """``g(S) = f(N) - f(N minus S)``."""
    full = f.full
    return SetFunction(f.n, tuple(f[full] - f[full & ~s] for s in range(1 << f.n)))


def _disjoint_pairs(n: int) -> Iterator[tuple[int, int]]:
    for a in range(1, 1 << n):
        b = a + 1
        while b < 1 << n:
            if not a & b:
                yield a, b
            b += 1


def _covering_pairs(n: int) -> Iterator[tuple[int, int]]:
    full = (1 << n) - 1
    for a in range(1 << n):
        for b in range(a, 1 << n):
            if a | b == full:
                yield a, b


def superadditivity_failures(f: SetFunction) -> list[tuple[int, int]]:
    """Disjoint pairs with ``f(A) + f(B) > f(A | B)``."""
    return [(a, b) for a, b in _disjoint_pairs(f.n) if f[a] + f[b] > f[a | b]]


def subadditivity_failures(f: SetFunction) -> list[tuple[int, int]]:
    """Disjoint pairs with ``f(A) + f(B) < f(A | B)``."""
    return [(a, b) for a, b in _disjoint_pairs(f.n) if f[a] + f[b] < f[a | b]]


def is_superadditive(f: SetFunction) -> bool:
    return not superadditivity_failures(f)


def is_subadditive(f: SetFunction) -> bool:
    return not subadditivity_failures(f)


def is_set_cover_submodular(f: SetFunction) -> bool:
    """Submodular inequality restricted to pairs whose union is every variety."""
    return all(f[a] + f[b] >= f[a | b] + f[a & b] for a, b in _covering_pairs(f.n))


def is_set_cover_supermodular(f: SetFunction) -> bool:
    return all(f[a] + f[b] <= f[a | b] + f[a & b] for a, b in _covering_pairs(f.n))


def is_submodular(f: SetFunction) -> bool:
    size = 1 << f.n
    return all(f[a] + f[b] >= f[a | b] + f[a & b] for a in range(size) for b in range(a, size))


def is_supermodular(f: SetFunction) -> bool:
    size = 1 << f.n
    return all(f[a] + f[b] <= f[a | b] + f[a & b] for a in range(size) for b in range(a, size))
