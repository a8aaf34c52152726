"""Structural analysis of the finite quotients.

Each quotient of interest is small (at most ~1.2e5 elements, and at most 1e4
wherever exhaustive search runs), so this module materializes a quotient as
index arrays: per-generator translation tables, inverse and order arrays,
and the projection onto the Frattini quotient.  Everything downstream -
centers, closures, lower central series, maximal subgroups, and the
exhaustive homomorphism searches - runs vectorized over those arrays.
Tables are built from `FiniteQuotient.reduce`, and `consistency_check`
cross-validates them against direct reduction.

Enumeration output is deterministic: candidate tuples are scanned in
lexicographic index order, so results do not depend on chunking.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .hall import FreeNilElement
from .quotients import FiniteQuotient, PcElement, QuotientError

__all__ = [
    "DenseGroup",
    "dense_group",
    "SubgroupHandle",
    "Homomorphism",
    "FrattiniMatrix",
    "subgroup_functors",
    "series_invariants",
    "SeriesInvariants",
    "maximal_subgroups",
    "all_isomorphisms",
    "is_isomorphic",
    "automorphism_count",
    "induced_frattini_matrix",
    "IsoScanSummary",
    "isomorphism_det_scan",
]

_SCAN_BOUND = 130_000  # admits the order-7^6 quotient
_SEARCH_BOUND = 10_000


class DenseGroup:
    """Index-level view of a finite quotient."""

    def __init__(self, quotient: FiniteQuotient):
        self.quotient = quotient
        self.n = quotient.order
        self.p = quotient.prime
        self.pc_syms = quotient.pc_symbols
        self._moduli = [quotient.moduli[s] for s in self.pc_syms]
        self._strides = [quotient._strides[s] for s in self.pc_syms]
        idx = np.arange(self.n, dtype=np.int64)
        self._exps = [
            (idx // st) % m for st, m in zip(self._strides, self._moduli)
        ]
        self.slabs: list[np.ndarray] = []
        for k, s in enumerate(self.pc_syms):
            m = self._moduli[k]
            tab = np.empty((m, self.n), dtype=np.int64)
            tab[0] = idx
            row = np.empty(self.n, dtype=np.int64)
            for g in range(self.n):
                vec = quotient.decode(g)
                letters = [(i, e) for i, e in enumerate(vec) if e]
                row[g] = quotient.reduce_letters(letters + [(s, 1)]).index()
            if m > 1:
                tab[1] = row
            for e in range(2, m):
                tab[e] = row[tab[e - 1]]
            self.slabs.append(tab)
        self._inv: np.ndarray | None = None
        self._orders: np.ndarray | None = None
        self._coords: np.ndarray | None = None

    # -- arithmetic ------------------------------------------------------------

    def mult(self, a, b):
        aa = np.asarray(a, dtype=np.int64)
        bb = np.asarray(b, dtype=np.int64)
        shape = np.broadcast_shapes(aa.shape, bb.shape)
        out = np.broadcast_to(aa, shape)
        rem = np.broadcast_to(bb, shape)
        if not self.pc_syms:
            res = np.zeros(shape, dtype=np.int64)
            return res if shape else 0
        for k in range(len(self.pc_syms)):
            e = (rem // self._strides[k]) % self._moduli[k]
            out = self.slabs[k][e, out]
        return out if shape else int(out)

    @property
    def inv(self) -> np.ndarray:
        if self._inv is None:
            o = self.orders
            inv = np.zeros(self.n, dtype=np.int64)
            idx = np.arange(self.n, dtype=np.int64)
            for val in np.unique(o):
                sel = o == val
                inv[sel] = self.power(idx[sel], int(val) - 1)
            assert (self.mult(idx, inv) == 0).all()
            self._inv = inv
        return self._inv

    def power(self, a, e: int):
        aa = np.asarray(a, dtype=np.int64)
        scalar = aa.shape == ()
        if e < 0:
            aa = self.inv[aa]
            e = -e
        res = np.zeros(aa.shape, dtype=np.int64)
        base = aa
        while e:
            if e & 1:
                res = self.mult(res, base)
            e >>= 1
            if e:
                base = self.mult(base, base)
        return int(res) if scalar else res

    @property
    def orders(self) -> np.ndarray:
        if self._orders is None:
            o = np.ones(self.n, dtype=np.int64)
            cur = np.arange(self.n, dtype=np.int64)
            guard = 0
            while True:
                alive = cur != 0
                if not alive.any():
                    break
                cur = np.where(alive, self.power(cur, self.p), 0)
                o[alive] *= self.p
                guard += 1
                if guard > 64:  # pragma: no cover
                    raise QuotientError("element order computation ran away")
            self._orders = o
        return self._orders

    def comm(self, a, b):
        ia = self.inv[np.asarray(a, dtype=np.int64)]
        ib = self.inv[np.asarray(b, dtype=np.int64)]
        return self.mult(self.mult(self.mult(ia, ib), a), b)

    def conj(self, a, b):
        """b^-1 a b."""
        ib = self.inv[np.asarray(b, dtype=np.int64)]
        return self.mult(self.mult(ib, a), b)

    def element(self, idx: int) -> PcElement:
        return PcElement(self.quotient, self.quotient.decode(int(idx)))

    def gen_indices(self) -> list[int]:
        """Indices of the images of the ambient weight-1 generators."""
        q = self.quotient
        return [q.generator_image(j).index() for j in range(q.basis.rank)]

    # -- Frattini projection -----------------------------------------------------

    @property
    def coords(self) -> np.ndarray:
        """Projection onto the Frattini quotient: per element, the exponents
        of the non-eliminated weight-1 symbols mod p.  The kernel is checked
        against the computed Frattini subgroup once per group."""
        if self._coords is None:
            q = self.quotient
            w1 = [s for s in self.pc_syms if s < q.basis.rank]
            cols = [self._exps[self.pc_syms.index(s)] % self.p for s in w1]
            coords = (np.stack(cols, axis=1) if cols
                      else np.zeros((self.n, 0), dtype=np.int64))
            self._coords = coords.astype(np.int64)
            self._check_frattini_kernel()
        return self._coords

    @property
    def frattini_dim(self) -> int:
        return self.coords.shape[1]

    def _check_frattini_kernel(self) -> None:
        coords = self._coords
        claimed = np.flatnonzero((coords % self.p == 0).all(axis=1))
        gens = self.gen_indices()
        pows = np.unique(self.power(np.arange(self.n, dtype=np.int64), self.p))
        comms = [int(self.comm(a, b)) for a, b in combinations(gens, 2)]
        phi = self.normal_closure(list(np.unique(pows)) + comms)
        if not np.array_equal(phi, claimed):  # pragma: no cover - sanity
            raise QuotientError(
                f"Frattini projection of {self.quotient.label} is inconsistent")

    # -- subgroup machinery --------------------------------------------------------

    def closure(self, gen_idxs: Sequence[int]) -> np.ndarray:
        """Sorted indices of the subgroup generated by the given elements."""
        member = np.zeros(self.n, dtype=bool)
        member[0] = True
        gens = np.unique(np.asarray(list(gen_idxs) or [0], dtype=np.int64))
        frontier = np.array([0], dtype=np.int64)
        while frontier.size:
            prods = self.mult(frontier[:, None], gens[None, :]).ravel()
            prods = np.unique(prods)
            fresh = prods[~member[prods]]
            member[fresh] = True
            frontier = fresh
        return np.flatnonzero(member)

    def normal_closure(self, gen_idxs: Sequence[int]) -> np.ndarray:
        current = self.closure(gen_idxs)
        gens = np.asarray(self.gen_indices(), dtype=np.int64)
        while True:
            conj = self.conj(current[:, None], gens[None, :]).ravel()
            conj = np.unique(conj)
            if np.isin(conj, current, assume_unique=False).all():
                return current
            current = self.closure(np.union1d(current, conj))

    def center_indices(self) -> np.ndarray:
        idx = np.arange(self.n, dtype=np.int64)
        mask = np.ones(self.n, dtype=bool)
        for k in range(len(self.pc_syms)):
            g = int(self.slabs[k][1, 0])  # the k-th pc generator itself
            mask &= self.mult(idx, g) == self.mult(g, idx)
        return np.flatnonzero(mask)


_DENSE_CACHE: dict[int, DenseGroup] = {}


def dense_group(q: FiniteQuotient) -> DenseGroup:
    got = _DENSE_CACHE.get(id(q))
    if got is None or got.quotient is not q:
        got = DenseGroup(q)
        _DENSE_CACHE[id(q)] = got
    return got


class SubgroupHandle:
    """A subgroup of a finite quotient, materialized as an index set."""

    def __init__(self, parent: FiniteQuotient, indices: np.ndarray,
                 generators: list[PcElement] | None = None):
        self.parent = parent
        self.indices = np.unique(np.asarray(indices, dtype=np.int64))
        self._dense = dense_group(parent)
        if self.indices.size > _SCAN_BOUND:
            raise QuotientError("subgroup too large to materialize")
        self._gens = generators
        self._abelian: bool | None = None
        self._normal: bool | None = None

    @property
    def order(self) -> int:
        return int(self.indices.size)

    def contains(self, g: PcElement) -> bool:
        return bool(np.isin(g.index(), self.indices))

    def contains_index(self, idx: int) -> bool:
        pos = np.searchsorted(self.indices, idx)
        return pos < self.indices.size and self.indices[pos] == idx

    @property
    def generators(self) -> list[PcElement]:
        if self._gens is None:
            dense = self._dense
            chosen: list[int] = []
            have = np.array([0], dtype=np.int64)
            for idx in self.indices:
                if not np.isin(idx, have):
                    chosen.append(int(idx))
                    have = dense.closure(chosen)
            self._gens = [dense.element(i) for i in chosen]
        return self._gens

    def elements(self) -> frozenset[PcElement]:
        return frozenset(self._dense.element(i) for i in self.indices)

    @property
    def is_abelian(self) -> bool:
        if self._abelian is None:
            dense = self._dense
            S = self.indices
            ok = True
            chunk = max(1, 4_000_000 // max(S.size, 1))
            for start in range(0, S.size, chunk):
                blk = S[start:start + chunk]
                if not (dense.mult(blk[:, None], S[None, :])
                        == dense.mult(S[None, :], blk[:, None])).all():
                    ok = False
                    break
            self._abelian = ok
        return self._abelian

    @property
    def is_normal(self) -> bool:
        if self._normal is None:
            dense = self._dense
            gens = np.asarray(dense.gen_indices(), dtype=np.int64)
            conj = np.unique(dense.conj(self.indices[:, None], gens[None, :]))
            self._normal = bool(np.isin(conj, self.indices).all())
        return self._normal

    def __eq__(self, other) -> bool:
        return (isinstance(other, SubgroupHandle)
                and self.parent is other.parent
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((id(self.parent), self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"SubgroupHandle(order={self.order} of {self.parent.label})"


def subgroup_functors(q: FiniteQuotient) -> dict[str, SubgroupHandle]:
    """Center, derived subgroup, and the subgroup of p-th powers."""
    if q.order > _SCAN_BOUND:
        raise QuotientError("group too large for element scans")
    dense = dense_group(q)
    center = SubgroupHandle(q, dense.center_indices())
    gens = dense.gen_indices()
    comms = [int(dense.comm(a, b)) for a, b in combinations(gens, 2)]
    derived = SubgroupHandle(q, dense.normal_closure(comms))
    pows = np.unique(dense.power(np.arange(q.order, dtype=np.int64), dense.p))
    agemo = SubgroupHandle(q, dense.closure(list(pows)))
    return {"center": center, "derived": derived, "agemo_p": agemo}


@dataclass(frozen=True)
class SeriesInvariants:
    order: int
    exponent: int
    nilpotency_class: int
    lower_central_orders: tuple[int, ...]


_SERIES_CACHE: dict[int, SeriesInvariants] = {}


def series_invariants(q: FiniteQuotient) -> SeriesInvariants:
    cached = _SERIES_CACHE.get(id(q))
    if cached is not None:
        return cached
    if q.order > _SCAN_BOUND:
        raise QuotientError("group too large for element scans")
    dense = dense_group(q)
    exponent = int(dense.orders.max()) if q.order > 1 else 1
    gens = np.asarray(dense.gen_indices(), dtype=np.int64)
    gamma = np.arange(q.order, dtype=np.int64)
    lcs = [q.order]
    while gamma.size > 1:
        comms = np.unique(dense.comm(gamma[:, None], gens[None, :]))
        nxt = dense.normal_closure(list(comms))
        if nxt.size == gamma.size:  # pragma: no cover - not nilpotent
            raise QuotientError("lower central series does not descend")
        gamma = nxt
        lcs.append(int(gamma.size))
    nil_class = len(lcs) - 1
    out = SeriesInvariants(q.order, exponent, nil_class, tuple(lcs))
    _SERIES_CACHE[id(q)] = out
    return out


def maximal_subgroups(q: FiniteQuotient) -> list[SubgroupHandle]:
    """The maximal subgroups: preimages of the hyperplanes of the Frattini
    quotient, one per normalized covector, (p^d - 1)/(p - 1) in total."""
    dense = dense_group(q)
    coords = dense.coords
    d = dense.frattini_dim
    p = dense.p
    out = []
    for vec in product(range(p), repeat=d):
        arr = np.array(vec, dtype=np.int64)
        nz = np.flatnonzero(arr)
        if nz.size == 0 or arr[nz[0]] != 1:
            continue  # normalize: first nonzero coefficient is 1
        mask = (coords @ arr) % p == 0
        out.append(SubgroupHandle(q, np.flatnonzero(mask)))
    return out


@dataclass(frozen=True)
class FrattiniMatrix:
    """Matrix of an induced map on the Frattini quotient, over F_p."""

    p: int
    entries: tuple[tuple[int, ...], ...]

    @property
    def det(self) -> int:
        n = len(self.entries)
        if n == 0:
            return 1 % self.p
        if n == 1:
            return self.entries[0][0] % self.p
        if n == 2:
            (a, b), (c, d) = self.entries
            return (a * d - b * c) % self.p
        total = 0
        rows = self.entries
        for j in range(n):
            minor = FrattiniMatrix(self.p, tuple(
                row[:j] + row[j + 1:] for row in rows[1:]))
            term = rows[0][j] * minor.det
            total += term if j % 2 == 0 else -term
        return total % self.p

    @property
    def invertible(self) -> bool:
        return self.det % self.p != 0

    def __mul__(self, other: "FrattiniMatrix") -> "FrattiniMatrix":
        if self.p != other.p or len(self.entries) != len(other.entries):
            raise ValueError("shape or characteristic mismatch")
        n = len(self.entries)
        return FrattiniMatrix(self.p, tuple(
            tuple(sum(self.entries[i][k] * other.entries[k][j]
                      for k in range(n)) % self.p for j in range(n))
            for i in range(n)))


class Homomorphism:
    """A homomorphism between finite quotients, given by the images of the
    ambient weight-1 generators.  Construction verifies that the source's
    relators die in the target."""

    def __init__(self, source: FiniteQuotient, target: FiniteQuotient,
                 images: Sequence[PcElement], _verified: bool = False):
        if len(images) != source.basis.rank:
            raise QuotientError("one image per ambient generator required")
        for im in images:
            if im.quotient is not target:
                raise QuotientError("image living in the wrong quotient")
        self.source = source
        self.target = target
        self.images = tuple(images)
        if not _verified:
            for rel in source.relator_set.relators:
                if not self.apply_free(rel).is_identity():
                    raise QuotientError(
                        f"images do not kill the relator {rel!r}")

    def symbol_images(self) -> list[PcElement]:
        basis = self.source.basis
        out = list(self.images)
        for i in range(basis.rank, basis.size):
            hi, lo = basis.symbols[i].bracket
            out.append(self.target.pc_commutator(out[hi], out[lo]))
        return out

    def apply_free(self, elem: FreeNilElement) -> PcElement:
        """Image of an ambient free element."""
        syms = self.symbol_images()
        acc = self.target.identity
        for s, e in elem.letters():
            acc = acc * self.target.pc_power(syms[s], e)
        return acc

    def __call__(self, g: PcElement) -> PcElement:
        if g.quotient is not self.source:
            raise QuotientError("argument from the wrong quotient")
        return self.apply_free(g.lift())

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """self after other."""
        if other.target is not self.source:
            raise QuotientError("composition mismatch")
        return Homomorphism(other.source, self.target,
                            tuple(self(im) for im in other.images))

    def is_bijective(self) -> bool:
        if self.source.order != self.target.order:
            return False
        mat = induced_frattini_matrix(self)
        return mat.invertible

    def __repr__(self) -> str:
        ims = ", ".join(repr(im) for im in self.images)
        return f"Homomorphism({self.source.label} -> {self.target.label}; {ims})"


def _pc_weight1(q: FiniteQuotient) -> list[int]:
    return [s for s in q.pc_symbols if s < q.basis.rank]


def induced_frattini_matrix(phi: Homomorphism) -> FrattiniMatrix:
    """Matrix of the induced map on Frattini quotients; column j carries the
    coordinates of the image of the j-th surviving weight-1 generator.
    Coordinates are read off canonical representatives directly (the kernel
    of that projection is validated against the computed Frattini subgroup
    in `DenseGroup.coords`)."""
    src_w1 = _pc_weight1(phi.source)
    tgt_w1 = _pc_weight1(phi.target)
    d = len(src_w1)
    if d != len(tgt_w1):
        raise QuotientError("generator ranks differ")
    p = phi.target.prime
    cols = []
    for s in src_w1:
        im = phi.images[s]
        cols.append([im.vector[t] % p for t in tgt_w1])
    entries = tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))
    return FrattiniMatrix(p, entries)


# ---------------------------------------------------------------------------
# exhaustive isomorphism search
# ---------------------------------------------------------------------------

def _span_rank_mod_p(rows: np.ndarray, p: int) -> int:
    m = rows % p
    m = m.astype(np.int64)
    rank = 0
    ncols = m.shape[1]
    row_used = np.zeros(m.shape[0], dtype=bool)
    for col in range(ncols):
        pivot = None
        for i in range(m.shape[0]):
            if not row_used[i] and m[i, col] % p:
                pivot = i
                break
        if pivot is None:
            continue
        row_used[pivot] = True
        rank += 1
        inv = pow(int(m[pivot, col]), p - 2, p)
        m[pivot] = (m[pivot] * inv) % p
        for i in range(m.shape[0]):
            if i != pivot and m[i, col]:
                m[i] = (m[i] - m[i, col] * m[pivot]) % p
    return rank


def _relator_masks(source: FiniteQuotient, dtgt: DenseGroup,
                   prefix: tuple[int, ...], last_cands: np.ndarray) -> np.ndarray:
    """Vector over the last generator's candidates: which completed tuples
    kill every relator of the source."""
    basis = source.basis
    syms: list = list(prefix) + [last_cands]
    for i in range(basis.rank, basis.size):
        hi, lo = basis.symbols[i].bracket
        syms.append(dtgt.comm(syms[hi], syms[lo]))
    ok = np.ones(last_cands.shape, dtype=bool)
    for rel in source.relator_set.relators:
        acc = np.zeros(last_cands.shape, dtype=np.int64)
        for s, e in rel.letters():
            acc = dtgt.mult(acc, dtgt.power(syms[s], e))
        ok &= acc == 0
        if not ok.any():
            break
    return ok


def all_isomorphisms(G: FiniteQuotient, H: FiniteQuotient) -> Iterator[Homomorphism]:
    """All isomorphisms G -> H as generator-image tuples, in lexicographic
    order of target element indices.

    Candidates are pruned by element order (images must match the orders of
    the generator images in G) and by surjectivity onto the Frattini
    quotient; the relator check then decides exactly.
    """
    if G.order != H.order:
        return
    if G.order > _SEARCH_BOUND:
        raise QuotientError("exhaustive search bound exceeded")
    dG = dense_group(G)
    dH = dense_group(H)
    if dG.frattini_dim != dH.frattini_dim:
        return
    p = dH.p
    d = dH.frattini_dim
    rank = G.basis.rank
    gen_orders = [int(dG.orders[g]) for g in dG.gen_indices()]
    cands = []
    for o in gen_orders:
        cands.append(np.flatnonzero(dH.orders == o).astype(np.int64))
    if any(c.size == 0 for c in cands):
        return
    coordsH = dH.coords
    last = cands[-1]
    for prefix in product(*(map(int, c) for c in cands[:-1])):
        mask = _relator_masks(G, dH, prefix, last)
        if not mask.any():
            continue
        for y in last[mask]:
            tup = prefix + (int(y),)
            rows = coordsH[list(tup)]
            if _span_rank_mod_p(rows, p) != d:
                continue
            images = [dH.element(i) for i in tup]
            yield Homomorphism(G, H, images, _verified=True)


def is_isomorphic(G: FiniteQuotient, H: FiniteQuotient) -> bool:
    for _phi in all_isomorphisms(G, H):
        return True
    return False


def automorphism_count(G: FiniteQuotient) -> int:
    return sum(1 for _ in all_isomorphisms(G, G))


@dataclass(frozen=True)
class IsoScanSummary:
    candidates_checked: int
    isomorphisms_found: int
    det_residues: tuple[int, ...]


def isomorphism_det_scan(G: FiniteQuotient, H: FiniteQuotient) -> IsoScanSummary:
    """Exhaustive isomorphism scan that only accumulates the determinant
    residues of the induced Frattini matrices.  Same enumeration as
    `all_isomorphisms`, vectorized for two-generated quotients."""
    if G.order != H.order:
        return IsoScanSummary(0, 0, ())
    if G.order > _SEARCH_BOUND:
        raise QuotientError("exhaustive search bound exceeded")
    dG = dense_group(G)
    dH = dense_group(H)
    if dG.frattini_dim != dH.frattini_dim:
        return IsoScanSummary(0, 0, ())
    d = dH.frattini_dim
    if d != 2 or G.basis.rank != 2:
        dets = set()
        seen = 0
        found = 0
        for phi in all_isomorphisms(G, H):
            found += 1
            dets.add(induced_frattini_matrix(phi).det)
        return IsoScanSummary(found, found, tuple(sorted(dets)))
    p = dH.p
    coordsH = dH.coords
    gen_orders = [int(dG.orders[g]) for g in dG.gen_indices()]
    cand_x = np.flatnonzero(dH.orders == gen_orders[0]).astype(np.int64)
    cand_y = np.flatnonzero(dH.orders == gen_orders[1]).astype(np.int64)
    checked = 0
    found = 0
    dets: set[int] = set()
    cy = coordsH[cand_y]
    for x in map(int, cand_x):
        checked += cand_y.size
        mask = _relator_masks(G, dH, (x,), cand_y)
        if not mask.any():
            continue
        cx = coordsH[x]
        det = (cx[0] * cy[:, 1] - cx[1] * cy[:, 0]) % p
        ok = mask & (det != 0)
        found += int(ok.sum())
        dets.update(int(v) for v in np.unique(det[ok]))
    return IsoScanSummary(checked, found, tuple(sorted(dets)))
