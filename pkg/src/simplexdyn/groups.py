"""Finite groups as validated Cayley tables.

Groups are immutable value objects: an element is an index into a fixed
basis, multiplication is a table lookup, and every constructor runs the
full invariant suite (identity, Latin square, inverses, associativity)
before returning.  Associativity is verified exhaustively for order
<= 64 and on at least 10*n^2 sampled triples above that, which keeps
ingestion of user-supplied tables fast while still catching malformed
input.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InternalConsistencyError

MAX_SYMMETRIC_DEGREE = 6
FULL_ASSOCIATIVITY_ORDER = 64
_ASSOC_SAMPLE_SEED = 0x5D


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group presented by its Cayley table.

    Fields:
        order: number of elements n.
        labels: n distinct display strings, one per element index.
        cayley: n x n tuple table; cayley[i][j] is the index of g_i * g_j.
        identity: index of the neutral element.
        inverses: inverses[i] is the index of g_i^{-1}.
    """

    order: int
    labels: tuple[str, ...]
    cayley: tuple[tuple[int, ...], ...]
    identity: int
    inverses: tuple[int, ...]

    def __post_init__(self) -> None:
        _validate_group(self)

    @cached_property
    def cayley_array(self) -> np.ndarray:
        """Cayley table as a read-only numpy int array."""
        arr = np.asarray(self.cayley, dtype=np.intp)
        arr.setflags(write=False)
        return arr

    @cached_property
    def conv_index(self) -> np.ndarray:
        """Gather table for convolution: conv_index[h, g] = index of h^{-1} g."""
        arr = self.cayley_array[np.asarray(self.inverses, dtype=np.intp)]
        arr.setflags(write=False)
        return arr

    def mul(self, i: int, j: int) -> int:
        return self.cayley[i][j]

    def inv(self, i: int) -> int:
        return self.inverses[i]

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown element label {label!r}") from None

    def element_order(self, i: int) -> int:
        """Smallest k >= 1 with g_i^k = identity."""
        k, cur = 1, i
        while cur != self.identity:
            cur = self.cayley[cur][i]
            k += 1
            if k > self.order:
                raise InternalConsistencyError(
                    f"element {i} has no order <= group order {self.order}")
        return k

    def __repr__(self) -> str:  # keep huge tables out of tracebacks
        return f"FiniteGroup(order={self.order}, identity={self.labels[self.identity]!r})"


@dataclass(frozen=True)
class ElementSet:
    """A duplicate-free, sorted set of element indices of one group."""

    group: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        mem = tuple(sorted(set(self.members)))
        if mem != self.members:
            object.__setattr__(self, "members", mem)
        for i in self.members:
            if not 0 <= i < self.group.order:
                raise ValueError(
                    f"element index {i} out of range for group of order {self.group.order}")

    def __contains__(self, i: int) -> bool:
        return i in self._member_set

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: "ElementSet") -> bool:
        return self._member_set <= other._member_set

    @cached_property
    def _member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def label_list(self) -> list[str]:
        return [self.group.labels[i] for i in self.members]


def _validate_group(g: FiniteGroup) -> None:
    n = g.order
    if n < 1:
        raise ValueError(f"group order must be positive, got {n}")
    if len(g.labels) != n or len(set(g.labels)) != n:
        raise ValueError("labels must be exactly one distinct string per element")
    if len(g.cayley) != n or any(len(row) != n for row in g.cayley):
        raise ValueError(f"cayley table must be {n}x{n}")

    table = np.asarray(g.cayley, dtype=np.intp)
    if table.size and (table.min() < 0 or table.max() >= n):
        raise ValueError("cayley table entries must be element indices in range")

    e = g.identity
    if not 0 <= e < n:
        raise ValueError(f"identity index {e} out of range")
    idx = np.arange(n)
    if not (np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx)):
        raise ValueError(f"element {g.labels[e]!r} is not a two-sided identity")

    if not (np.array_equal(np.sort(table, axis=1), np.tile(idx, (n, 1)))
            and np.array_equal(np.sort(table, axis=0), np.tile(idx, (n, 1)).T)):
        raise ValueError("cayley table is not a Latin square")

    if len(g.inverses) != n:
        raise ValueError("inverses must list one index per element")
    inv = np.asarray(g.inverses, dtype=np.intp)
    if not (np.array_equal(table[idx, inv], np.full(n, e))
            and np.array_equal(table[inv, idx], np.full(n, e))):
        raise ValueError("inverses are not two-sided inverses")

    if n <= FULL_ASSOCIATIVITY_ORDER:
        lhs = table[table]            # lhs[i,j,k] = (ij)k
        rhs = table[:, table]         # rhs[i,j,k] = i(jk)
        if not np.array_equal(lhs, rhs):
            bad = np.argwhere(lhs != rhs)[0]
            raise ValueError(
                f"associativity fails at triple {tuple(int(v) for v in bad)}")
    else:
        rng = np.random.default_rng(_ASSOC_SAMPLE_SEED)
        ii, jj, kk = rng.integers(0, n, size=(3, 10 * n * n))
        if not np.array_equal(table[table[ii, jj], kk], table[ii, table[jj, kk]]):
            raise ValueError("associativity fails on a sampled triple")


def make_cyclic(n: int) -> FiniteGroup:
    """Cyclic group Z_n with labels t^0 .. t^{n-1} and addition mod n."""
    if n < 1:
        raise ValueError(f"cyclic group order must be >= 1, got {n}")
    cached = _CYCLIC_CACHE.get(n)
    if cached is not None:
        return cached
    cay = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    grp = FiniteGroup(
        order=n,
        labels=tuple(f"t^{i}" for i in range(n)),
        cayley=cay,
        identity=0,
        inverses=tuple((-i) % n for i in range(n)),
    )
    _CYCLIC_CACHE[n] = grp
    return grp


_CYCLIC_CACHE: dict[int, FiniteGroup] = {}


def make_dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n: rotations r0..r{n-1}, reflections s0..s{n-1}.

    Index k encodes the rotation r^k, index n+k the reflection s*r^k.
    """
    if n < 1:
        raise ValueError(f"dihedral parameter must be >= 1, got {n}")

    def mul(i: int, j: int) -> int:
        f1, k1 = divmod(i, n)
        f2, k2 = divmod(j, n)
        if f1 == 0 and f2 == 0:
            return (k1 + k2) % n
        if f1 == 0 and f2 == 1:
            return n + (k2 - k1) % n
        if f1 == 1 and f2 == 0:
            return n + (k1 + k2) % n
        return (k2 - k1) % n

    order = 2 * n
    cay = tuple(tuple(mul(i, j) for j in range(order)) for i in range(order))
    labels = tuple(f"r{k}" for k in range(n)) + tuple(f"s{k}" for k in range(n))
    inverses = tuple((-k) % n for k in range(n)) + tuple(n + k for k in range(n))
    return FiniteGroup(order=order, labels=labels, cayley=cay,
                       identity=0, inverses=inverses)


def _cycle_label(perm: tuple[int, ...]) -> str:
    seen = [False] * len(perm)
    parts = []
    for start in range(len(perm)):
        if seen[start] or perm[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        cur = perm[start]
        while cur != start:
            cyc.append(cur)
            seen[cur] = True
            cur = perm[cur]
        parts.append("(" + " ".join(str(v) for v in cyc) + ")")
    return "".join(parts) if parts else "e"


def make_symmetric(n: int) -> FiniteGroup:
    """Symmetric group on {0..n-1}, n <= 6, in lexicographic permutation order.

    Product g_i * g_j is composition applying g_j first: (g_i g_j)(x) = g_i(g_j(x)).
    Labels use cycle notation, identity labelled "e".
    """
    if not 1 <= n <= MAX_SYMMETRIC_DEGREE:
        raise ValueError(
            f"symmetric degree must be in 1..{MAX_SYMMETRIC_DEGREE}, got {n}")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    cay = tuple(
        tuple(index[tuple(p[q[x]] for x in range(n))] for q in perms)
        for p in perms)
    inverses = []
    for p in perms:
        inv = [0] * n
        for x, v in enumerate(p):
            inv[v] = x
        inverses.append(index[tuple(inv)])
    return FiniteGroup(
        order=len(perms),
        labels=tuple(_cycle_label(p) for p in perms),
        cayley=cay,
        identity=index[tuple(range(n))],
        inverses=tuple(inverses),
    )


def direct_product(a: FiniteGroup, b: FiniteGroup) -> FiniteGroup:
    """Direct product with componentwise multiplication; index (i,j) -> i*|b|+j."""
    nb = b.order
    order = a.order * nb

    def mul(u: int, v: int) -> int:
        ia, ja = divmod(u, nb)
        ib, jb = divmod(v, nb)
        return a.cayley[ia][ib] * nb + b.cayley[ja][jb]

    cay = tuple(tuple(mul(u, v) for v in range(order)) for u in range(order))
    labels = tuple(f"({la},{lb})" for la in a.labels for lb in b.labels)
    inverses = tuple(a.inverses[u // nb] * nb + b.inverses[u % nb]
                     for u in range(order))
    return FiniteGroup(order=order, labels=labels, cayley=cay,
                       identity=a.identity * nb + b.identity,
                       inverses=inverses)


def from_cayley_table(table: Sequence[Sequence[int]],
                      labels: Sequence[str] | None = None) -> FiniteGroup:
    """Build and fully validate a group from a raw index table.

    The identity is inferred as the unique index e with e*x = x*e = x for
    all x; inverses are then read off the table.  Any violation of the
    group axioms raises ValueError.
    """
    n = len(table)
    if n == 0:
        raise ValueError("cayley table must be nonempty")
    rows = [tuple(int(v) for v in row) for row in table]
    if any(len(row) != n for row in rows):
        raise ValueError(f"cayley table must be square, expected {n}x{n}")
    if labels is None:
        labels = tuple(f"g{i}" for i in range(n))
    else:
        labels = tuple(labels)

    ident = None
    for e in range(n):
        if all(rows[e][j] == j and rows[j][e] == j for j in range(n)):
            ident = e
            break
    if ident is None:
        raise ValueError("table has no two-sided identity element")

    inverses = []
    for i in range(n):
        j = next((j for j in range(n)
                  if rows[i][j] == ident and rows[j][i] == ident), None)
        if j is None:
            raise ValueError(f"element {labels[i]!r} has no two-sided inverse")
        inverses.append(j)

    return FiniteGroup(order=n, labels=labels, cayley=tuple(rows),
                       identity=ident, inverses=tuple(inverses))


def read_cayley_csv(path: str) -> FiniteGroup:
    """Ingest a Cayley table CSV: a header row of labels, then n rows of n labels."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if len(rows) < 2:
        raise ValueError(f"{path}: expected a header row plus n table rows")
    header = [cell.strip() for cell in rows[0]]
    if len(set(header)) != len(header):
        raise ValueError(f"{path}: duplicate labels in header")
    pos = {lab: i for i, lab in enumerate(header)}
    body = rows[1:]
    if len(body) != len(header):
        raise ValueError(
            f"{path}: expected {len(header)} table rows, got {len(body)}")
    table = []
    for rownum, row in enumerate(body):
        cells = [cell.strip() for cell in row]
        if len(cells) != len(header):
            raise ValueError(f"{path}: row {rownum + 2} has {len(cells)} cells")
        try:
            table.append([pos[c] for c in cells])
        except KeyError as exc:
            raise ValueError(f"{path}: unknown label {exc.args[0]!r} "
                             f"in row {rownum + 2}") from None
    return from_cayley_table(table, header)


def generated_subgroup(g: FiniteGroup, seed: ElementSet | Iterable[int]) -> ElementSet:
    """Smallest subgroup of g containing the seed elements.

    Breadth-first closure over the Cayley table; the result contains the
    identity and is closed under products and inverses.
    """
    if isinstance(seed, ElementSet):
        if seed.group is not g and seed.group != g:
            raise ValueError("seed belongs to a different group")
        start = list(seed.members)
    else:
        start = sorted(set(int(i) for i in seed))
    if not start:
        raise ValueError("generated_subgroup requires a nonempty seed")

    members = {g.identity}
    queue = []
    for i in start:
        if not 0 <= i < g.order:
            raise ValueError(f"seed index {i} out of range")
        if i not in members:
            members.add(i)
            queue.append(i)
    while queue:
        x = queue.pop()
        for y in list(members):
            for z in (g.cayley[x][y], g.cayley[y][x]):
                if z not in members:
                    members.add(z)
                    queue.append(z)
    return ElementSet(group=g, members=tuple(sorted(members)))
