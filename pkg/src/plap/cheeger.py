"""Exact Dirichlet Cheeger constants.

The constant is the minimum over nonempty interior subsets U of
(edges leaving U) / |U|, computed by exhausting all subsets with integer
arithmetic only; no floating point enters this module. It equals the
first Dirichlet eigenvalue at p = 1.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyInterior, TooLarge
from .graphs import Graph, boundary_partition

MAX_INTERIOR = 25


@dataclass(frozen=True)
class CheegerResult:
    """Exact constant with a deterministic witness subset.

    ``value`` is the reduced cut/size ratio, ``witness`` the first
    minimising subset in size-then-lexicographic order, ``ties`` the
    number of minimising subsets.
    """

    value: Fraction
    witness: tuple[int, ...]
    ties: int

    def to_json_dict(self) -> dict:
        return {
            "h_num": self.value.numerator,
            "h_den": self.value.denominator,
            "witness": list(self.witness),
            "ties": self.ties,
        }


def dirichlet_cheeger(g: Graph) -> CheegerResult:
    """Exhaustive minimum of |E(U, U^c)| / |U| over nonempty interior U.

    The complement includes the boundary vertices. Subsets are scanned in
    increasing size then lexicographic order and compared by integer
    cross-multiplication; the witness is the first minimiser found.
    Graphs without boundary are accepted (the whole vertex set yields 0).
    """
    part = boundary_partition(g)
    interior = sorted(part.interior)
    k = len(interior)
    if k == 0:
        raise EmptyInterior("graph has no interior vertices")
    if k > MAX_INTERIOR:
        raise TooLarge(f"interior of size {k} exceeds the 2^{MAX_INTERIOR} scan bound")
    slot = {v: j for j, v in enumerate(interior)}
    nbr_mask = []
    degree = []
    for v in interior:
        mask = 0
        for u in g.adj[v]:
            j = slot.get(u)
            if j is not None:
                mask |= 1 << j
        nbr_mask.append(mask)
        degree.append(len(g.adj[v]))
    best_cut = -1
    best_size = 0
    best_combo: tuple[int, ...] = ()
    ties = 0
    for size in range(1, k + 1):
        for combo in itertools.combinations(range(k), size):
            mask = 0
            for j in combo:
                mask |= 1 << j
            # edges leaving U = sum of degrees minus twice the inside edges
            cut = 0
            for j in combo:
                cut += degree[j] - (nbr_mask[j] & mask).bit_count()
            if best_cut < 0 or cut * best_size < best_cut * size:
                best_cut = cut
                best_size = size
                best_combo = combo
                ties = 1
            elif cut * best_size == best_cut * size:
                ties += 1
    witness = tuple(interior[j] for j in best_combo)
    return CheegerResult(value=Fraction(best_cut, best_size), witness=witness, ties=ties)


def lambda_1_1(g: Graph) -> Fraction:
    """First Dirichlet eigenvalue at p = 1: the Dirichlet Cheeger constant."""
    return dirichlet_cheeger(g).value
