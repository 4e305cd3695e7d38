"""Rank-two reductions of the flow: block ODEs and an integro-differential PDE.

For the skew generator with a single rotation block in the first two
coordinates, a symmetric matrix splits as scalars (a, b, c), coupling
vectors (u, v) and a frozen symmetric block B.  The quadratic and cubic
flows S' = [N, S^2] and S' = [N, S^3] close on these block variables; the
right-hand sides here are the exact block extraction of the matrix
commutator (the matrix form is authoritative and doubles as the per-call
oracle), including the b(a+c)- and (c^2-a^2)-type terms that vanish on
the invariant slice a + c = 0.  In all cases c' = -a' and B' = 0.

At a = b = c = 0 the cubic flow closes further on (u, v) alone; promoting
B^2 to -d^2/dx^2 on [0, 2pi) gives the spectral system

    u_t =  <u,v> u + <v,v> v - v_xx,
    v_t = -<u,u> u - <u,v> v + u_xx,

whose inner products are plain L^2 scalars, so the nonlinearity is a
scalar multiple of the field: coefficients couple only through those
scalars, mode support never grows, and <u,u> + <v,v> is conserved.  The
sign of the <u,u> u term is the one forced by the cubic block flow (it is
what conserves the L^2 pair); the opposite printed variant is available
behind a flag for comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flows import rk4_path
from .matcore import SkewMatrix, SymMatrix

__all__ = [
    "BlockState",
    "PDEState",
    "embed",
    "extract",
    "n0",
    "rhs_quadratic",
    "rhs_cubic",
    "rhs_reduced",
    "pde_rhs",
    "integrate_block",
    "integrate_pde",
    "parity_leakage",
    "l2_pair",
]


@dataclass(frozen=True)
class BlockState:
    """Block coordinates (a, b, c, u, v, B) of a symmetric matrix."""

    a: float
    b: float
    c: float
    u: np.ndarray
    v: np.ndarray
    B: SymMatrix

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError("u and v must be vectors of equal length")
        if self.B.n != u.size:
            raise ValueError("B dimension must match the vectors")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.u.size + 2


def embed(bs: BlockState) -> SymMatrix:
    """Symmetric matrix with corner [[a, b], [b, c]], border (u, v), core B."""
    n = bs.n
    s = np.zeros((n, n))
    s[0, 0], s[0, 1], s[1, 1] = bs.a, bs.b, bs.c
    s[1, 0] = bs.b
    s[0, 2:] = bs.u
    s[2:, 0] = bs.u
    s[1, 2:] = bs.v
    s[2:, 1] = bs.v
    s[2:, 2:] = bs.B.full()
    return SymMatrix.from_full(s)


def extract(s: SymMatrix) -> BlockState:
    """Inverse of :func:`embed`."""
    f = s.full()
    if s.n < 3:
        raise ValueError("block splitting needs dimension at least 3")
    return BlockState(
        float(f[0, 0]),
        float(f[0, 1]),
        float(f[1, 1]),
        f[0, 2:].copy(),
        f[1, 2:].copy(),
        SymMatrix.from_full(f[2:, 2:]),
    )


def n0(n: int) -> SkewMatrix:
    """The rank-two skew generator: a single rotation in coordinates 1, 2."""
    if n < 3:
        raise ValueError("block splitting needs dimension at least 3")
    k = np.zeros((n, n))
    k[0, 1], k[1, 0] = 1.0, -1.0
    return SkewMatrix.from_full(k)


def rhs_quadratic(bs: BlockState) -> BlockState:
    """Block extraction of [N, S^2]."""
    bf = bs.B.full()
    da = 2.0 * (bs.b * (bs.a + bs.c) + float(bs.u @ bs.v))
    db = bs.c ** 2 - bs.a ** 2 + float(bs.v @ bs.v) - float(bs.u @ bs.u)
    du = bs.b * bs.u + bs.c * bs.v + bf @ bs.v
    dv = -(bs.a * bs.u + bs.b * bs.v + bf @ bs.u)
    return BlockState(da, db, -da, du, dv, SymMatrix.zero(bs.B.n))


def rhs_cubic(bs: BlockState) -> BlockState:
    """Block extraction of [N, S^3]."""
    bf = bs.B.full()
    bu, bv = bf @ bs.u, bf @ bs.v
    uu, vv, uv = float(bs.u @ bs.u), float(bs.v @ bs.v), float(bs.u @ bs.v)
    t11 = bs.a ** 2 + bs.b ** 2 + uu
    t12 = bs.b * (bs.a + bs.c) + uv
    t22 = bs.b ** 2 + bs.c ** 2 + vv
    da = 2.0 * (bs.b * t11 + bs.c * t12 + bs.a * uv + bs.b * vv + float(bs.u @ bv))
    s3_22 = bs.b * t12 + bs.c * t22 + bs.b * uv + bs.c * vv + float(bs.v @ bv)
    s3_11 = bs.a * t11 + bs.b * t12 + bs.a * uu + bs.b * uv + float(bs.u @ bu)
    db = s3_22 - s3_11
    du = t12 * bs.u + t22 * bs.v + bs.b * bu + bs.c * bv + bf @ bv
    dv = -(t11 * bs.u + t12 * bs.v + bs.a * bu + bs.b * bv + bf @ bu)
    return BlockState(da, db, -da, du, dv, SymMatrix.zero(bs.B.n))


def rhs_reduced(
    u: np.ndarray, v: np.ndarray, b: SymMatrix, printed_variant: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Closed (u, v) system at a = b = c = 0.

    The default sign -<u,u> u in v' is the one inherited from the cubic
    block flow and conserves <u,u> + <v,v>; ``printed_variant`` flips that
    one term for side-by-side comparison.
    """
    bf = b.full()
    uu, vv, uv = float(u @ u), float(v @ v), float(u @ v)
    du = uv * u + vv * v + bf @ (bf @ v)
    sign = 1.0 if printed_variant else -1.0
    dv = sign * uu * u - uv * v - bf @ (bf @ u)
    return du, dv


@dataclass(frozen=True)
class PDEState:
    """Fourier data of real fields u, v on [0, 2pi).

    Coefficients follow numpy's FFT layout divided by the mode count, so
    u(x) = sum_k u_hat[k] exp(i k x); conjugate symmetry keeps the fields
    real.  ``parity`` marks an even (cosine) or odd (sine) sector and is
    carried, not enforced: the flow itself preserves it.
    """

    u_hat: np.ndarray
    v_hat: np.ndarray
    parity: str | None = None

    def __post_init__(self):
        u = np.asarray(self.u_hat, dtype=complex)
        v = np.asarray(self.v_hat, dtype=complex)
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError("coefficient arrays must be vectors of equal length")
        if self.parity not in (None, "even", "odd"):
            raise ValueError("parity must be None, 'even' or 'odd'")
        object.__setattr__(self, "u_hat", u)
        object.__setattr__(self, "v_hat", v)

    @property
    def modes(self) -> int:
        return self.u_hat.size

    @classmethod
    def from_fields(cls, u: np.ndarray, v: np.ndarray, parity: str | None = None):
        k = len(u)
        return cls(np.fft.fft(u) / k, np.fft.fft(v) / k, parity)

    def fields(self) -> tuple[np.ndarray, np.ndarray]:
        k = self.modes
        return np.fft.ifft(self.u_hat * k).real, np.fft.ifft(self.v_hat * k).real

    def conj_symmetry_residual(self) -> float:
        ru = self.u_hat - np.conj(np.roll(self.u_hat[::-1], 1))
        rv = self.v_hat - np.conj(np.roll(self.v_hat[::-1], 1))
        return float(max(np.abs(ru).max(), np.abs(rv).max()))


def _wavenumbers(k: int) -> np.ndarray:
    return np.fft.fftfreq(k, d=1.0 / k)


def _inner(a_hat: np.ndarray, b_hat: np.ndarray) -> float:
    """L^2 inner product on [0, 2pi) of the real fields behind the modes."""
    return float(2.0 * np.pi * np.real(np.vdot(b_hat, a_hat)))


def l2_pair(st: PDEState) -> float:
    """Conserved quantity <u,u> + <v,v>."""
    return _inner(st.u_hat, st.u_hat) + _inner(st.v_hat, st.v_hat)


def pde_rhs(st: PDEState, printed_variant: bool = False) -> PDEState:
    """Spectral right-hand side; scalar inner products via Parseval.

    The nonlinearity is scalar * field, so the evaluation is alias-free:
    no padding is needed and the mode support of (u, v) never grows.
    """
    ksq = _wavenumbers(st.modes) ** 2
    uu = _inner(st.u_hat, st.u_hat)
    vv = _inner(st.v_hat, st.v_hat)
    uv = _inner(st.u_hat, st.v_hat)
    du = uv * st.u_hat + vv * st.v_hat + ksq * st.v_hat
    sign = 1.0 if printed_variant else -1.0
    dv = sign * uu * st.u_hat - uv * st.v_hat - ksq * st.u_hat
    return PDEState(du, dv, st.parity)


def integrate_block(
    bs0: BlockState, rhs, t_final: float, h: float
) -> tuple[np.ndarray, list[BlockState]]:
    """RK4 on the block variables; B rides along frozen."""
    nb = bs0.u.size
    b_frozen = bs0.B

    def pack(bs: BlockState) -> np.ndarray:
        return np.concatenate([[bs.a, bs.b, bs.c], bs.u, bs.v])

    def unpack(y: np.ndarray) -> BlockState:
        return BlockState(y[0], y[1], y[2], y[3 : 3 + nb], y[3 + nb :], b_frozen)

    times, path = rk4_path(lambda y: pack(rhs(unpack(y))), pack(bs0), t_final, h)
    return times, [unpack(y) for y in path]


def integrate_pde(
    st0: PDEState, t_final: float, h: float, printed_variant: bool = False
) -> tuple[np.ndarray, list[PDEState]]:
    """RK4 in coefficient space with a reality projection each step."""
    k = st0.modes

    def pack(st: PDEState) -> np.ndarray:
        return np.concatenate([st.u_hat, st.v_hat])

    def unpack(y: np.ndarray) -> PDEState:
        return PDEState(y[:k], y[k:], st0.parity)

    def project(y: np.ndarray) -> np.ndarray:
        out = []
        for part in (y[:k], y[k:]):
            out.append(0.5 * (part + np.conj(np.roll(part[::-1], 1))))
        return np.concatenate(out)

    times, path = rk4_path(
        lambda y: pack(pde_rhs(unpack(y), printed_variant)),
        pack(st0).astype(complex),
        t_final,
        h,
        project=project,
    )
    return times, [unpack(y) for y in path]


def parity_leakage(st: PDEState) -> float:
    """Largest coefficient mass in the sector opposite the declared parity.

    Even fields have u_hat[k] = u_hat[-k]; odd fields flip the sign.  The
    constant mode belongs to the even sector.
    """
    if st.parity is None:
        raise ValueError("state carries no parity flag")
    sgn = 1.0 if st.parity == "even" else -1.0
    worst = 0.0
    for arr in (st.u_hat, st.v_hat):
        mirrored = np.roll(arr[::-1], 1)  # index k -> -k
        bad = 0.5 * (arr - sgn * mirrored)
        worst = max(worst, float(np.abs(bad).max()))
    return worst
