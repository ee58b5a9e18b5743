"""Decompositions versus tangles, and branch width versus well-linked sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import bits
from .branchdec import AtomFamily, DirectedDecomposition, branch_width, decompose_over, width
from .core import ConnectivitySystem, require
from .errors import InternalInconsistency, PreconditionError
from .tangles import Tangle, is_tangle, is_well_linked, max_free_set, tangle_levels, well_linked_sets


@dataclass
class DualityVerdict:
    k: int
    atoms: str
    decomposition: Optional[DirectedDecomposition] = None
    tangle: Optional[Tangle] = None

    @property
    def has_decomposition(self) -> bool:
        return self.decomposition is not None


def duality_check(sys: ConnectivitySystem, family: Optional[AtomFamily] = None, k: int = 1) -> DualityVerdict:
    """Exactly one of: a decomposition over the family with all cones of order < k,
    or a tangle of order k with no member in the family."""
    require("duality_check", sys.n, "duality")
    if family is None:
        family = AtomFamily.singletons()
    for i in range(sys.n):
        if (1 << i) not in family:
            raise PreconditionError("the atom family must contain every singleton")
    dec = decompose_over(sys, family, k)
    tangles = tangle_levels(sys, k)[k] if k >= 0 else []
    if family.name == "singletons":
        # no member of a tangle is empty or a singleton
        tangle = tangles[0] if tangles else None
    else:
        tangle = next((t for t in tangles if not any(x in family for x in t.members)), None)
    if (dec is None) == (tangle is None):
        raise InternalInconsistency(
            f"duality failed at k={k}: decomposition {'found' if dec else 'missing'}, "
            f"tangle {'found' if tangle else 'missing'}"
        )
    if dec is not None and width(dec, sys) >= k:
        raise InternalInconsistency("decomposition witness is too wide")
    if tangle is not None and not is_tangle(sys, tangle):
        raise InternalInconsistency("tangle witness does not verify")
    return DualityVerdict(k, family.name, dec, tangle)


def branch_width_via_tangles(sys: ConnectivitySystem) -> int:
    """Largest k with a tangle of order k."""
    k = 0
    while tangle_levels(sys, k + 1)[k + 1]:
        k += 1
    return k


def _nontrivial_valence(sys: ConnectivitySystem) -> int:
    val = sys.valence()
    if val == 0:
        raise PreconditionError("connectivity function is trivial (valence 0)")
    return val


def large_well_linked_set(sys: ConnectivitySystem, k: int) -> Optional[int]:
    """A well-linked set W with |W| > k/val - 1, or None."""
    val = _nontrivial_valence(sys)
    for w in well_linked_sets(sys):
        if bits.popcount(w) * val > k - val:
            return w
    return None


def decomposition_from_no_well_linked(sys: ConnectivitySystem, k: int, strict: bool = False) -> DirectedDecomposition:
    """Complete decomposition of width at most k by repeated leaf splitting.

    A leaf X with kappa(X) <= k - val sheds its smallest element. Otherwise a
    maximal free set Y of the complement is too large to be well-linked, and
    the first set Z witnessing that splits X into X & Z and X - Z, both of
    smaller order. The hypothesis (no large well-linked set) is only needed
    in the second case and is checked there; ``strict`` verifies it for all
    sets before starting.
    """
    require("decomposition_from_no_well_linked", sys.n, "linked")
    if k < 1:
        raise PreconditionError("k must be at least 1")
    val = _nontrivial_valence(sys)
    if strict:
        w = large_well_linked_set(sys, k)
        if w is not None:
            raise PreconditionError(f"well-linked set {sys.universe.labels_of(w)} is larger than k/val - 1")
    full = sys.full
    children: list[tuple] = [()]
    cones = [full]
    todo = [0]
    while todo:
        t = todo.pop(0)
        x = cones[t]
        if bits.popcount(x) < 2:
            continue
        if sys.evaluate(x) <= k - val:
            low = x & -x
            parts = (low, x ^ low)
        else:
            y = max_free_set(sys, full ^ x)
            check = is_well_linked(sys, y)
            if check.ok:
                raise PreconditionError(f"well-linked set {sys.universe.labels_of(y)} is larger than k/val - 1")
            z = check.witness[0]
            parts = (x & z, x & ~z)
            kx = sys.evaluate(x)
            if not all(p and sys.evaluate(p) < kx for p in parts):
                raise InternalInconsistency("split did not lower the order")
        kids = []
        for p in parts:
            kids.append(len(cones))
            cones.append(p)
            children.append(())
            todo.append(len(cones) - 1)
        children[t] = tuple(kids)
    d = DirectedDecomposition(full, children, cones, 0)
    d.validate(exact=True)
    if not d.is_complete() or width(d, sys) > k:
        raise InternalInconsistency("leaf splitting produced an invalid decomposition")
    return d


def well_linked_obstruction_check(sys: ConnectivitySystem) -> bool:
    """With k = max(bw, 1), no well-linked set has more than 3k elements."""
    require("well_linked_obstruction_check", sys.n, "duality")
    k = max(branch_width(sys).value, 1)
    return not any(bits.popcount(w) > 3 * k for w in well_linked_sets(sys, 3 * k + 1))
