"""Bit-packed Pauli strings, Clifford tableaux, and twirl verification.

Pauli strings are stored as a pair of bit masks (x, z) plus a power of i,
with the operator convention phase * prod_j X_j^{x_j} Z_j^{z_j} and qubit 0
on the leftmost character of a literal like ``-XIZ``.  Clifford elements are
tableaux: signed Pauli images of each X_j and Z_j, with global phase
quotiented away.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .dense import ID2, PAULI_1Q, kron_all

__all__ = [
    "PauliString", "CliffordElement", "PauliChannel",
    "pauli_mul", "commutes",
    "clifford_apply", "clifford_compose", "clifford_tensor", "clifford_identity",
    "enumerate_clifford", "random_clifford", "clifford_to_matrix",
    "verify_twirl", "channel_pauli_coeffs",
    "all_paulis", "paulis_on_support",
]

_PHASES = {0: 1.0 + 0j, 1: 1j, 2: -1.0 + 0j, 3: -1j}


@dataclass(frozen=True)
class PauliString:
    """phase * prod_j X_j^{x_j} Z_j^{z_j} with phase = i^k."""

    n: int
    x: int
    z: int
    k: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one qubit")
        mask = (1 << self.n) - 1
        if (self.x | self.z) & ~mask:
            raise ValueError("mask exceeds %d qubits" % self.n)
        object.__setattr__(self, "k", self.k % 4)

    @property
    def phase(self) -> complex:
        return _PHASES[self.k]

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def weight(self) -> int:
        return self.support.bit_count()

    def is_identity_axis(self) -> bool:
        return self.support == 0

    def is_hermitian(self) -> bool:
        return (self.k - (self.x & self.z).bit_count()) % 2 == 0

    def sign(self) -> int:
        """+1 or -1 for a Hermitian string written over {I, X, Y, Z}."""
        if not self.is_hermitian():
            raise ValueError("sign is only defined for Hermitian strings")
        val = _PHASES[(self.k - (self.x & self.z).bit_count()) % 4]
        return int(round(val.real))

    def axes_key(self) -> tuple[int, int]:
        """Unsigned (x, z) masks: the string modulo its phase."""
        return (self.x, self.z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a literal like ``-XIZ``, ``iY`` or ``+ZZ`` (qubit 0 leftmost)."""
        s = label.strip()
        k = 0
        if s.startswith(("+", "-")):
            if s[0] == "-":
                k = 2
            s = s[1:]
        if s.startswith(("i", "j")):
            k += 1
            s = s[1:]
        if not s:
            raise ValueError("empty Pauli literal %r" % label)
        x = z = 0
        for pos, ch in enumerate(s.upper()):
            if ch == "I":
                continue
            if ch == "X":
                x |= 1 << pos
            elif ch == "Z":
                z |= 1 << pos
            elif ch == "Y":
                x |= 1 << pos
                z |= 1 << pos
                k += 1
            else:
                raise ValueError("bad character %r in Pauli literal %r" % (ch, label))
        return cls(len(s), x, z, k)

    def label(self) -> str:
        """Inverse of from_label for Hermitian strings."""
        chars = []
        n_y = 0
        for j in range(self.n):
            xb = (self.x >> j) & 1
            zb = (self.z >> j) & 1
            if xb and zb:
                chars.append("Y")
                n_y += 1
            elif xb:
                chars.append("X")
            elif zb:
                chars.append("Z")
            else:
                chars.append("I")
        head = {0: "", 1: "i", 2: "-", 3: "-i"}[(self.k - n_y) % 4]
        return head + "".join(chars)

    def to_matrix(self) -> np.ndarray:
        facs = []
        for j in range(self.n):
            xb = (self.x >> j) & 1
            zb = (self.z >> j) & 1
            m = ID2
            if xb:
                m = PAULI_1Q["X"]
            if zb:
                m = m @ PAULI_1Q["Z"] if xb else PAULI_1Q["Z"]
            facs.append(m)
        return self.phase * kron_all(facs)


def pauli_mul(p: PauliString, q: PauliString) -> PauliString:
    """Product PQ with exact phase tracking."""
    if p.n != q.n:
        raise ValueError("dimension mismatch: %d vs %d qubits" % (p.n, q.n))
    k = (p.k + q.k + 2 * (p.z & q.x).bit_count()) % 4
    return PauliString(p.n, p.x ^ q.x, p.z ^ q.z, k)


def commutes(p: PauliString, q: PauliString) -> bool:
    if p.n != q.n:
        raise ValueError("dimension mismatch: %d vs %d qubits" % (p.n, q.n))
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def all_paulis(n: int, *, include_identity: bool = True) -> Iterator[PauliString]:
    """All 4^n unsigned Hermitian Pauli strings on n qubits."""
    for x in range(1 << n):
        for z in range(1 << n):
            if not include_identity and x == 0 and z == 0:
                continue
            yield PauliString(n, x, z, (x & z).bit_count())


def paulis_on_support(n: int, support: int) -> Iterator[PauliString]:
    """The 3^|support| unsigned Paulis acting as X, Y or Z exactly on ``support``."""
    bits = [j for j in range(n) if (support >> j) & 1]
    for choice in itertools.product("XYZ", repeat=len(bits)):
        x = z = 0
        n_y = 0
        for j, ax in zip(bits, choice):
            if ax in ("X", "Y"):
                x |= 1 << j
            if ax in ("Z", "Y"):
                z |= 1 << j
            n_y += ax == "Y"
        yield PauliString(n, x, z, n_y)


@dataclass(frozen=True)
class CliffordElement:
    """Tableau: signed Pauli images of the generators X_j and Z_j."""

    n: int
    x_images: tuple[PauliString, ...]
    z_images: tuple[PauliString, ...]

    def __post_init__(self):
        if len(self.x_images) != self.n or len(self.z_images) != self.n:
            raise ValueError("tableau needs one image per generator")
        for img in (*self.x_images, *self.z_images):
            if img.n != self.n:
                raise ValueError("image qubit count mismatch")
            if not img.is_hermitian():
                raise ValueError("tableau image signs must be +1 or -1")

    def key(self) -> tuple:
        return tuple((g.x, g.z, g.k) for g in (*self.x_images, *self.z_images))

    def is_symplectic(self) -> bool:
        """Check all pairwise (anti)commutation relations of the images."""
        gens = list(self.x_images) + list(self.z_images)
        for i, gi in enumerate(gens):
            for j in range(i + 1, len(gens)):
                want = not (j == i + self.n and j - self.n == i)
                if commutes(gi, gens[j]) != want:
                    return False
        return True


def clifford_identity(n: int) -> CliffordElement:
    xs = tuple(PauliString(n, 1 << j, 0, 0) for j in range(n))
    zs = tuple(PauliString(n, 0, 1 << j, 0) for j in range(n))
    return CliffordElement(n, xs, zs)


def clifford_apply(c: CliffordElement, p: PauliString) -> PauliString:
    """Conjugation C P C^dag via the tableau."""
    if c.n != p.n:
        raise ValueError("dimension mismatch: %d vs %d qubits" % (c.n, p.n))
    acc = PauliString(p.n, 0, 0, p.k)
    for j in range(p.n):
        if (p.x >> j) & 1:
            acc = pauli_mul(acc, c.x_images[j])
        if (p.z >> j) & 1:
            acc = pauli_mul(acc, c.z_images[j])
    return acc


def clifford_compose(first: CliffordElement, second: CliffordElement) -> CliffordElement:
    """Tableau of (second . first): apply ``first``, then ``second``."""
    xs = tuple(clifford_apply(second, g) for g in first.x_images)
    zs = tuple(clifford_apply(second, g) for g in first.z_images)
    return CliffordElement(first.n, xs, zs)


def clifford_tensor(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """Tensor product tableau, a on the low qubits, b appended after."""
    n = a.n + b.n

    def lift_a(p: PauliString) -> PauliString:
        return PauliString(n, p.x, p.z, p.k)

    def lift_b(p: PauliString) -> PauliString:
        return PauliString(n, p.x << a.n, p.z << a.n, p.k)

    xs = tuple(lift_a(g) for g in a.x_images) + tuple(lift_b(g) for g in b.x_images)
    zs = tuple(lift_a(g) for g in a.z_images) + tuple(lift_b(g) for g in b.z_images)
    return CliffordElement(n, xs, zs)


def _gen_hadamard(n: int, j: int) -> CliffordElement:
    base = clifford_identity(n)
    xs = list(base.x_images)
    zs = list(base.z_images)
    xs[j] = PauliString(n, 0, 1 << j, 0)
    zs[j] = PauliString(n, 1 << j, 0, 0)
    return CliffordElement(n, tuple(xs), tuple(zs))


def _gen_phase(n: int, j: int) -> CliffordElement:
    base = clifford_identity(n)
    xs = list(base.x_images)
    xs[j] = PauliString(n, 1 << j, 1 << j, 1)   # S X S^dag = Y
    return CliffordElement(n, tuple(xs), base.z_images)


def _gen_cz(n: int, i: int, j: int) -> CliffordElement:
    base = clifford_identity(n)
    xs = list(base.x_images)
    xs[i] = PauliString(n, 1 << i, 1 << j, 0)
    xs[j] = PauliString(n, 1 << j, 1 << i, 0)
    return CliffordElement(n, tuple(xs), base.z_images)


@lru_cache(maxsize=4)
def enumerate_clifford(m: int) -> tuple[CliffordElement, ...]:
    """All Clifford tableaux on m qubits (global phase quotiented), m <= 2.

    BFS closure over the generators {H_j, S_j, CZ_jk} starting from the
    identity.  Sizes follow the group order 2^{m^2+2m} prod_j (4^j - 1):
    24 at m = 1 and 11520 at m = 2.
    """
    if m > 2:
        raise ValueError("enumeration too large for m=%d (supported: m <= 2)" % m)
    gens = [_gen_hadamard(m, j) for j in range(m)]
    gens += [_gen_phase(m, j) for j in range(m)]
    gens += [_gen_cz(m, i, j) for i in range(m) for j in range(i + 1, m)]
    start = clifford_identity(m)
    seen = {start.key(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for c in frontier:
            for g in gens:
                cand = clifford_compose(c, g)
                key = cand.key()
                if key not in seen:
                    seen[key] = cand
                    nxt.append(cand)
        frontier = nxt
    return tuple(seen.values())


def _symp_product(a: int, b: int, m: int) -> int:
    """Symplectic inner product of (x|z) packed vectors of length 2m."""
    mask = (1 << m) - 1
    ax, az = a & mask, a >> m
    bx, bz = b & mask, b >> m
    return ((ax & bz).bit_count() + (az & bx).bit_count()) % 2


def _complement_basis(pairs: list[tuple[int, int]], m: int) -> list[int]:
    """GF(2) basis of the symplectic complement of the chosen pairs."""
    basis: list[int] = []
    pivots: list[int] = []
    for e in range(2 * m):
        v = 1 << e
        for vi, wi in pairs:
            if _symp_product(v, wi, m):
                v ^= vi
            if _symp_product(v, vi, m):
                v ^= wi
        for bvec, piv in zip(basis, pivots):
            if (v >> piv) & 1:
                v ^= bvec
        if v:
            piv = v.bit_length() - 1
            basis.append(v)
            pivots.append(piv)
    return basis


def _vec_to_pauli(vec: int, m: int, sign_bit: int) -> PauliString:
    mask = (1 << m) - 1
    x, z = vec & mask, vec >> m
    return PauliString(m, x, z, ((x & z).bit_count() + 2 * sign_bit) % 4)


def random_clifford(m: int, rng: np.random.Generator) -> CliffordElement:
    """Uniformly random Clifford tableau on m qubits.

    Row-by-row anticommuting-pair construction: the image of X_j is drawn
    uniformly from the nonzero vectors of the symplectic complement of the
    pairs fixed so far, and the image of Z_j uniformly from the affine set
    with unit symplectic product against it.  Every partial choice extends
    to the same number of group elements, so the draw is uniform without
    rejection.  Signs are independent fair bits.
    """
    if m < 1:
        raise ValueError("m must be positive")
    pairs: list[tuple[int, int]] = []
    for _ in range(m):
        comp = _complement_basis(pairs, m)
        coeffs = int(rng.integers(1, 1 << len(comp)))
        v = 0
        for idx, bvec in enumerate(comp):
            if (coeffs >> idx) & 1:
                v ^= bvec
        anti = [u for u in comp if _symp_product(v, u, m) == 1]
        commuting = [u for u in comp if _symp_product(v, u, m) == 0]
        u0 = anti[0]
        kernel = [u ^ u0 for u in anti[1:]] + commuting
        kernel = [u for u in kernel if u]
        w = u0
        if kernel:
            coeffs = int(rng.integers(0, 1 << len(kernel)))
            for idx, bvec in enumerate(kernel):
                if (coeffs >> idx) & 1:
                    w ^= bvec
        pairs.append((v, w))
    sign_bits = rng.integers(0, 2, size=2 * m)
    xs = tuple(_vec_to_pauli(v, m, int(sign_bits[j])) for j, (v, w) in enumerate(pairs))
    zs = tuple(_vec_to_pauli(w, m, int(sign_bits[m + j])) for j, (v, w) in enumerate(pairs))
    return CliffordElement(m, xs, zs)


def clifford_to_matrix(c: CliffordElement, *, max_qubits: int = 5) -> np.ndarray:
    """Dense unitary realizing the tableau, unique up to the fixed phase gauge.

    The first column is the joint +1 eigenvector of the images of all Z_j;
    column b is then prod_j (image of X_j)^{b_j} applied to it.  The global
    phase is fixed by making the first nonzero entry real and positive.
    """
    if c.n > max_qubits:
        raise ValueError("dense reconstruction too large for m=%d" % c.n)
    dim = 1 << c.n
    proj = np.eye(dim, dtype=complex)
    for g in c.z_images:
        proj = proj @ (np.eye(dim, dtype=complex) + g.to_matrix()) / 2
    col0 = None
    for trial in range(dim):
        cand = proj[:, trial]
        nrm = np.linalg.norm(cand)
        if nrm > 1e-6:
            col0 = cand / nrm
            break
    if col0 is None:
        raise ArithmeticError("stabilizer projector vanished; tableau inconsistent")
    xmats = [g.to_matrix() for g in c.x_images]
    u = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        col = col0
        for j in range(c.n):
            if (b >> (c.n - 1 - j)) & 1:
                col = xmats[j] @ col
        u[:, b] = col
    flat = u.reshape(-1)
    first = flat[np.argmax(np.abs(flat) > 1e-9)]
    u = u * (first.conjugate() / abs(first))
    return u


def verify_twirl(kind: str, q: PauliString, qp: PauliString,
                 rho: np.ndarray) -> float:
    """Max-norm residual of sum_G (G q G^dag) rho (G q' G^dag) over a twirl group.

    The three supported groups are the full Pauli group (kind ``pauli``),
    the full Clifford group (kind ``clifford``, m <= 2) and tensor products
    of single-qubit Cliffords (kind ``local_clifford``).  For q != q' each
    sum vanishes identically, so the residual is pure numerical noise.
    """
    if q.axes_key() == qp.axes_key():
        raise ValueError("twirl lemma requires distinct Pauli operators")
    if q.n != qp.n:
        raise ValueError("dimension mismatch")
    m = q.n
    rho = np.asarray(rho, dtype=complex)
    total = np.zeros_like(rho)
    if kind == "pauli":
        if m > 3:
            raise ValueError("pauli twirl enumeration capped at m = 3")
        for p in all_paulis(m):
            pm = p.to_matrix()
            total += (pm @ q.to_matrix() @ pm) @ rho @ (pm @ qp.to_matrix() @ pm)
    elif kind == "clifford":
        if m > 2:
            raise ValueError("full Clifford enumeration capped at m = 2")
        for c in enumerate_clifford(m):
            total += clifford_apply(c, q).to_matrix() @ rho @ clifford_apply(c, qp).to_matrix()
    elif kind == "local_clifford":
        if m > 3:
            raise ValueError("local Clifford enumeration capped at m = 3")
        singles = enumerate_clifford(1)
        for combo in itertools.product(singles, repeat=m):
            c = combo[0]
            for extra in combo[1:]:
                c = clifford_tensor(c, extra)
            total += clifford_apply(c, q).to_matrix() @ rho @ clifford_apply(c, qp).to_matrix()
    else:
        raise ValueError("unknown twirl kind %r" % kind)
    return float(np.max(np.abs(total)))


@dataclass(frozen=True)
class PauliChannel:
    """Pauli decomposition a_{alpha,P} of each Kraus operator of a channel."""

    n: int
    terms: tuple[tuple[tuple[complex, PauliString], ...], ...]

    def completeness(self) -> float:
        return float(sum(abs(a) ** 2 for kraus in self.terms for a, _ in kraus))

    def pauli_weights(self) -> dict[tuple[int, int], float]:
        """Total twirled weight sum_alpha |a_{alpha,P}|^2 per unsigned Pauli."""
        out: dict[tuple[int, int], float] = {}
        for kraus in self.terms:
            for a, p in kraus:
                key = p.axes_key()
                out[key] = out.get(key, 0.0) + abs(a) ** 2
        return out

    def identity_weight(self) -> float:
        return self.pauli_weights().get((0, 0), 0.0)


def channel_pauli_coeffs(kraus: Sequence[np.ndarray]) -> PauliChannel:
    """Expand Kraus operators over the Pauli basis, a_{alpha,P} = Tr(P A)/2^m."""
    mats = [np.asarray(a, dtype=complex) for a in kraus]
    dim = mats[0].shape[0]
    m = dim.bit_length() - 1
    if 2 ** m != dim:
        raise ValueError("Kraus dimension %d is not a power of two" % dim)
    total = sum(a.conj().T @ a for a in mats)
    if np.max(np.abs(total - np.eye(dim))) > 1e-9:
        raise ValueError("channel is not trace preserving")
    paulis = list(all_paulis(m))
    pmats = [p.to_matrix() for p in paulis]
    terms = []
    for a in mats:
        row = []
        for p, pm in zip(paulis, pmats):
            coeff = complex(np.trace(pm @ a)) / dim
            if abs(coeff) > 1e-14:
                row.append((coeff, p))
        terms.append(tuple(row))
    return PauliChannel(m, tuple(terms))
