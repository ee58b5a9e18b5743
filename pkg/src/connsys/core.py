"""Universes, connectivity systems, property verification and separations."""

from __future__ import annotations

import dataclasses
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import bits
from ._backend import kernels
from .errors import EvaluationError, PreconditionError, SizeLimitError


@dataclass
class Limits:
    """Exhaustive-search size caps (universe size unless noted)."""

    evaluate: int = 24
    exhaustive: int = 16
    dp: int = 14
    treewidth: int = 12
    enumerate: int = 12
    cover: int = 14
    linked: int = 14
    duality: int = 12
    canonical: int = 10


LIMITS = Limits()


def require(op: str, size: int, limit_name: str, hint: str = "") -> None:
    limit = getattr(LIMITS, limit_name)
    if size > limit:
        raise SizeLimitError(op, size, limit, hint)


class Universe:
    """Ordered finite set of distinct labels; index i is bit i."""

    __slots__ = ("labels", "n", "full", "_index")

    def __init__(self, labels: Iterable):
        self.labels = tuple(str(x) for x in labels)
        self.n = len(self.labels)
        self.full = (1 << self.n) - 1
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != self.n:
            raise PreconditionError("universe labels must be distinct")

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise PreconditionError(f"unknown element {label!r}") from None

    def subset(self, labels: Iterable) -> int:
        return bits.from_indices(self.index(x) for x in labels)

    def labels_of(self, mask: int) -> list[str]:
        return [self.labels[i] for i in bits.iter_bits(mask)]

    def complement(self, mask: int) -> int:
        return self.full ^ mask

    def contains(self, mask: int) -> bool:
        return 0 <= mask <= self.full

    def __eq__(self, other):
        return isinstance(other, Universe) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"Universe({list(self.labels)!r})"


# ``enumerator(k)`` returns all masks with value < k, ascending, or None when
# the structural enumeration does not apply.
Enumerator = Callable[[int], Optional[np.ndarray]]


class ConnectivitySystem:
    """A universe with a memoized integer value oracle.

    ``table_builder`` maps an int64 array of masks to their values in bulk.
    ``enumerator`` lists low-order separations without scanning 2**n sets;
    systems that provide one are exempt from exhaustive-size caps in the
    list-based algorithms.
    """

    def __init__(
        self,
        universe: Universe,
        oracle: Callable[[int], int],
        *,
        name: str = "",
        table_builder: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        enumerator: Optional[Enumerator] = None,
    ):
        self.universe = universe
        self.name = name
        self._oracle = oracle
        self._table_builder = table_builder
        self._enumerator = enumerator
        self._cache: dict[int, int] = {}
        self._table: Optional[np.ndarray] = None
        self._lock = threading.Lock()
        self._sep_cache: dict[int, np.ndarray] = {}
        self.memo: dict = {}  # per-system results of higher-level operations

    @property
    def n(self) -> int:
        return self.universe.n

    @property
    def full(self) -> int:
        return self.universe.full

    @property
    def has_enumerator(self) -> bool:
        return self._enumerator is not None

    def __call__(self, x: int) -> int:
        return self.evaluate(x)

    def evaluate(self, x: int) -> int:
        x = int(x)
        v = self._cache.get(x)
        if v is not None:
            return v
        if not 0 <= x <= self.universe.full:
            raise PreconditionError(f"subset {x:#x} not within universe of size {self.n}")
        if self._table is not None:
            return int(self._table[x])
        try:
            v = self._oracle(x)
        except Exception as exc:  # noqa: BLE001 - any oracle failure is reported uniformly
            raise EvaluationError(f"oracle failed on {x:#x}: {exc}") from exc
        if isinstance(v, (bool, float)) or not isinstance(v, (int, np.integer)):
            raise EvaluationError(f"oracle returned non-integer {v!r} on {x:#x}")
        v = int(v)
        self._cache[x] = v  # identical value on racing inserts
        return v

    def values(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        if self._table is not None:
            return self._table[masks]
        if self._table_builder is not None:
            return np.asarray(self._table_builder(masks), dtype=np.int64)
        return np.fromiter((self.evaluate(int(m)) for m in masks), dtype=np.int64, count=len(masks))

    def table(self) -> np.ndarray:
        """All 2**n values as an int64 array indexed by bitmask."""
        if self._table is None:
            require("table", self.n, "evaluate")
            with self._lock:
                if self._table is None:
                    masks = np.arange(1 << self.n, dtype=np.int64)
                    if self._table_builder is not None:
                        t = np.asarray(self._table_builder(masks), dtype=np.int64)
                    else:
                        t = np.fromiter(
                            (self.evaluate(int(m)) for m in masks), dtype=np.int64, count=len(masks)
                        )
                    t.setflags(write=False)
                    self._table = t
        return self._table

    def singleton_values(self) -> list[int]:
        return [self.evaluate(1 << i) for i in range(self.n)]

    def valence(self) -> int:
        if self.n == 0:
            return 0
        base = self.evaluate(0)
        return max(abs(v - base) for v in self.singleton_values())

    def separations_below(self, k: int) -> np.ndarray:
        """Ascending int64 array of all masks X with value < k."""
        cached = self._sep_cache.get(k)
        if cached is not None:
            return cached
        out = None
        if self._enumerator is not None:
            out = self._enumerator(k)
        if out is None:
            require("separations_below", self.n, "evaluate")
            out = np.nonzero(self.table() < k)[0].astype(np.int64)
        out = np.asarray(out, dtype=np.int64)
        out.setflags(write=False)
        self._sep_cache[k] = out
        return out

    def permuted(self, perm: Sequence[int]) -> "ConnectivitySystem":
        """Relabel: old index i becomes new index perm[i]; labels travel along."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n)):
            raise PreconditionError("not a permutation of universe indices")
        inv = [0] * self.n
        for i, p in enumerate(perm):
            inv[p] = i
        labels = [None] * self.n
        for i, p in enumerate(perm):
            labels[p] = self.universe.labels[i]
        base = self

        def oracle(x):
            return base.evaluate(bits.permute_mask(x, inv))

        enum = None
        if self._enumerator is not None:
            def enum(k):
                src = base.separations_below(k)
                return np.sort(permute_array(src, perm))

        builder = None
        if self._table_builder is not None:
            def builder(masks):
                return base.values(permute_array(masks, inv))

        return ConnectivitySystem(
            Universe(labels), oracle, name=self.name, table_builder=builder, enumerator=enum
        )

    def __repr__(self):
        return f"ConnectivitySystem({self.name or 'oracle'}, n={self.n})"


def permute_array(masks: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros_like(masks)
    for i, p in enumerate(perm):
        out |= ((masks >> i) & 1) << p
    return out


def from_table(values: Sequence[int], labels: Optional[Sequence[str]] = None, name="oracle"):
    """System given by an explicit table of 2**n values."""
    size = len(values)
    n = size.bit_length() - 1
    if size != 1 << n:
        raise PreconditionError("table length must be a power of two")
    labels = list(labels) if labels is not None else [str(i) for i in range(n)]
    arr = np.array([int(v) for v in values], dtype=np.int64)
    return ConnectivitySystem(
        Universe(labels), lambda x: int(arr[x]), name=name, table_builder=lambda m: arr[m]
    )


@dataclass
class PropertyReport:
    normalised: bool
    symmetric: bool
    submodular: bool
    posimodular: bool
    nonnegative: bool
    valence: int
    counterexample: Optional[tuple] = None
    violation: Optional[str] = None
    witnesses: dict = field(default_factory=dict)

    @property
    def is_connectivity_function(self) -> bool:
        return self.normalised and self.symmetric and self.submodular and self.nonnegative

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["witnesses"] = {k: list(v) for k, v in self.witnesses.items()}
        d["counterexample"] = list(self.counterexample) if self.counterexample else None
        return d


def check_properties(sys: ConnectivitySystem) -> PropertyReport:
    """Exhaustively verify the connectivity-function axioms.

    Each failing property records its first violation in ascending
    bitmask order (pairs ordered lexicographically).
    """
    n = sys.n
    require("check_properties", n, "exhaustive", "no sampling fallback")
    t = sys.table()
    full = sys.full
    witnesses: dict[str, tuple] = {}
    if t[0] != 0:
        witnesses["normalised"] = (0,)
    neg = np.nonzero(t < 0)[0]
    if len(neg):
        witnesses["nonnegative"] = (int(neg[0]),)
    idx = np.arange(1 << n, dtype=np.int64)
    asym = np.nonzero(t != t[full ^ idx])[0]
    if len(asym):
        witnesses["symmetric"] = (int(asym[0]),)
    tc = np.ascontiguousarray(t, dtype=np.int64)
    if not kernels.local_submodular_ok(tc, n):
        pair = kernels.first_submodular_violation(tc, n)
        witnesses["submodular"] = tuple(int(v) for v in pair)
    if "symmetric" in witnesses or "submodular" in witnesses:
        pair = kernels.first_posimodular_violation(tc, n)
        if pair is not None:
            witnesses["posimodular"] = tuple(int(v) for v in pair)
    first = None
    for key in ("normalised", "nonnegative", "symmetric", "submodular", "posimodular"):
        if key in witnesses:
            first = key
            break
    return PropertyReport(
        normalised="normalised" not in witnesses,
        symmetric="symmetric" not in witnesses,
        submodular="submodular" not in witnesses,
        posimodular="posimodular" not in witnesses,
        nonnegative="nonnegative" not in witnesses,
        valence=sys.valence(),
        counterexample=witnesses.get(first) if first else None,
        violation=first,
        witnesses=witnesses,
    )


def lipschitz_check(sys: ConnectivitySystem, x: int, y: int) -> bool:
    diff = x ^ y
    total = sum(sys.evaluate(1 << i) for i in bits.iter_bits(diff))
    return abs(sys.evaluate(x) - sys.evaluate(y)) <= total <= sys.valence() * bits.popcount(diff)


def min_separations(sys: ConnectivitySystem, x: int, y: int) -> tuple[int, np.ndarray]:
    """Minimum order and all minimum-order Z with X ⊆ Z ⊆ complement(Y)."""
    if x & y:
        raise PreconditionError("X and Y must be disjoint")
    require("min_separations", sys.n, "evaluate")
    free = sys.full & ~(x | y)
    cands = x | bits.submask_array(free)
    vals = sys.values(cands)
    best = int(vals.min())
    return best, cands[vals == best]


def leftmost_min_separation(sys: ConnectivitySystem, x: int, y: int) -> int:
    """Minimum order, then minimum cardinality, then smallest bitmask."""
    _, mins = min_separations(sys, x, y)
    sizes = bits.popcount_array(mins)
    pick = mins[sizes == sizes.min()]
    return int(pick.min())
