"""Finite matrix Laurent series and the loop-algebra operations on them.

A loop is a finite sum X(z) = sum_j X_j z^j of real n x n coefficient
matrices.  This module supplies the Cauchy product, the splitting into
nonnegative/negative degree parts, the involution sigma(X)(z) = -X(-z)^T
with its fixed-locus and dual-locus parity tests, the residue pairing
(X, Y) = sum_j tr(X_j Y_{-j-1}), the factorization (R-) bracket, truncated
exponentials for generating group elements near the identity, inversion
through the loop-group symmetry g(z) g(-z)^T = I, and the coadjoint action
built from those pieces.

All arithmetic is exact on finite windows.  A global cap on the degree span
guards products against runaway windows; exceeding it raises instead of
silently truncating.  Loops are immutable after construction.
"""

from __future__ import annotations

import numpy as np

from .matcore import SkewMatrix, SplitMix64, SymMatrix, as_matrix

__all__ = [
    "DEFAULT_MAX_SPAN",
    "LaurentLoop",
    "BILoop",
    "WindowOverflowError",
    "LoopSymmetryError",
    "LoopConvergenceError",
    "mul",
    "loop_commutator",
    "loop_power",
    "symmetry_defect",
    "proj_plus",
    "proj_minus",
    "sigma",
    "is_sigma_fixed",
    "is_sigma_star",
    "pairing",
    "rbracket",
    "rbracket_via_r",
    "exp_truncated",
    "loop_inverse_by_symmetry",
    "coadjoint",
    "random_sigma_fixed_loop",
    "random_dual_loop",
]

DEFAULT_MAX_SPAN = 64


class WindowOverflowError(RuntimeError):
    """Product window would exceed the configured degree-span cap."""


class LoopSymmetryError(ValueError):
    """Loop does not satisfy g(z) g(-z)^T = I within tolerance."""


class LoopConvergenceError(RuntimeError):
    """Truncated exponential failed to converge within the term cap."""


class LaurentLoop:
    """Immutable finite Laurent series with matrix coefficients.

    Zero coefficients at the window edges are trimmed on construction, so
    equal loops have identical windows regardless of how they were built.
    The zero loop is canonically stored with window [0, 0].
    """

    __slots__ = ("lo", "coeffs")

    def __init__(self, lo: int, coeffs):
        arr = np.array(coeffs, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"coefficients must be stacked square matrices, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("coefficients must be finite")
        nz = [k for k in range(arr.shape[0]) if np.any(arr[k])]
        if not nz:
            lo, arr = 0, np.zeros((1, arr.shape[1], arr.shape[2]))
        else:
            lo, arr = lo + nz[0], arr[nz[0] : nz[-1] + 1]
        arr.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentLoop is immutable")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "LaurentLoop":
        return cls(0, np.zeros((1, n, n)))

    @classmethod
    def identity(cls, n: int) -> "LaurentLoop":
        return cls(0, np.eye(n)[None])

    @classmethod
    def monomial(cls, mat, degree: int) -> "LaurentLoop":
        return cls(degree, as_matrix(mat)[None])

    @classmethod
    def from_terms(cls, terms: dict[int, np.ndarray], n: int | None = None) -> "LaurentLoop":
        if not terms:
            if n is None:
                raise ValueError("empty loop needs an explicit dimension")
            return cls.zero(n)
        lo, hi = min(terms), max(terms)
        dim = as_matrix(next(iter(terms.values()))).shape[0]
        arr = np.zeros((hi - lo + 1, dim, dim))
        for deg, mat in terms.items():
            arr[deg - lo] = as_matrix(mat)
        return cls(lo, arr)

    # -- basic structure -------------------------------------------------------

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.shape[0] - 1

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def window(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    @property
    def span(self) -> int:
        return self.hi - self.lo + 1

    def coeff(self, degree: int) -> np.ndarray:
        """Coefficient of z^degree (zeros outside the window)."""
        if self.lo <= degree <= self.hi:
            return self.coeffs[degree - self.lo]
        return np.zeros((self.n, self.n))

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def norm(self) -> float:
        """Largest coefficient Frobenius norm."""
        return float(max(np.linalg.norm(c) for c in self.coeffs))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def evaluate(self, z: complex) -> np.ndarray:
        """Value of the loop at one point of C*."""
        out = np.zeros((self.n, self.n), dtype=complex)
        for k, deg in enumerate(self.degrees()):
            out += self.coeffs[k] * (z ** deg)
        return out

    def restrict(self, lo: int, hi: int) -> "LaurentLoop":
        """Keep only degrees in [lo, hi]."""
        terms = {d: self.coeff(d) for d in self.degrees() if lo <= d <= hi}
        return LaurentLoop.from_terms(terms, self.n)

    def shift(self, k: int) -> "LaurentLoop":
        """Multiply by z^k."""
        return LaurentLoop(self.lo + k, self.coeffs)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: "LaurentLoop") -> "LaurentLoop":
        self._check_dim(other)
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        arr = np.zeros((hi - lo + 1, self.n, self.n))
        arr[self.lo - lo : self.hi - lo + 1] += self.coeffs
        arr[other.lo - lo : other.hi - lo + 1] += other.coeffs
        return LaurentLoop(lo, arr)

    def __sub__(self, other: "LaurentLoop") -> "LaurentLoop":
        return self + (-other)

    def __neg__(self) -> "LaurentLoop":
        return LaurentLoop(self.lo, -self.coeffs)

    def __rmul__(self, scalar: float) -> "LaurentLoop":
        return LaurentLoop(self.lo, float(scalar) * self.coeffs)

    def __matmul__(self, other: "LaurentLoop") -> "LaurentLoop":
        return mul(self, other)

    def transpose_flip(self) -> "LaurentLoop":
        """The loop z -> X(-z)^T, coefficient j -> (-1)^j X_j^T."""
        arr = np.array([((-1.0) ** d) * self.coeff(d).T for d in self.degrees()])
        return LaurentLoop(self.lo, arr)

    def _check_dim(self, other: "LaurentLoop"):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __repr__(self):
        return f"LaurentLoop(window=[{self.lo},{self.hi}], n={self.n})"


class BILoop:
    """The dual-space loop S + z N with exact symmetric/skew coefficients."""

    __slots__ = ("S", "N")

    def __init__(self, S: SymMatrix, N: SkewMatrix):
        if S.n != N.n:
            raise ValueError(f"dimension mismatch: {S.n} vs {N.n}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "N", N)

    def __setattr__(self, name, value):
        raise AttributeError("BILoop is immutable")

    @property
    def n(self) -> int:
        return self.S.n

    def loop(self) -> LaurentLoop:
        return LaurentLoop(0, np.stack([self.S.full(), self.N.full()]))

    def __repr__(self):
        return f"BILoop(n={self.n})"


def mul(x: LaurentLoop, y: LaurentLoop, max_span: int | None = None) -> LaurentLoop:
    """Cauchy product of two loops.

    The result window is the sum of the factor windows; a span above
    ``max_span`` (default :data:`DEFAULT_MAX_SPAN`) raises
    :class:`WindowOverflowError` rather than truncating.
    """
    x._check_dim(y)
    cap = DEFAULT_MAX_SPAN if max_span is None else max_span
    lo = x.lo + y.lo
    hi = x.hi + y.hi
    if hi - lo + 1 > cap:
        raise WindowOverflowError(f"product span {hi - lo + 1} exceeds cap {cap}")
    arr = np.zeros((hi - lo + 1, x.n, x.n))
    for i, ci in enumerate(x.coeffs):
        arr[i : i + y.coeffs.shape[0]] += np.einsum("ab,kbc->kac", ci, y.coeffs)
    return LaurentLoop(lo, arr)


def loop_commutator(x: LaurentLoop, y: LaurentLoop, max_span: int | None = None) -> LaurentLoop:
    return mul(x, y, max_span) - mul(y, x, max_span)


def loop_power(x: LaurentLoop, k: int, max_span: int | None = None) -> LaurentLoop:
    if k < 0:
        raise ValueError("power must be nonnegative")
    out = LaurentLoop.identity(x.n)
    for _ in range(k):
        out = mul(out, x, max_span)
    return out


def proj_plus(x: LaurentLoop) -> LaurentLoop:
    """Keep degrees >= 0."""
    return x.restrict(0, max(x.hi, 0))


def proj_minus(x: LaurentLoop) -> LaurentLoop:
    """Keep degrees < 0."""
    return x.restrict(min(x.lo, -1), -1)


def sigma(x: LaurentLoop) -> LaurentLoop:
    """The involution (sigma X)(z) = -X(-z)^T."""
    return -x.transpose_flip()


def is_sigma_fixed(x: LaurentLoop, tol: float = 0.0) -> bool:
    """Fixed-locus parity: even-degree coefficients skew, odd symmetric."""
    return _parity_holds(x, even_skew=True, tol=tol)


def is_sigma_star(x: LaurentLoop, tol: float = 0.0) -> bool:
    """Dual-locus parity: even-degree coefficients symmetric, odd skew."""
    return _parity_holds(x, even_skew=False, tol=tol)


def _parity_holds(x: LaurentLoop, even_skew: bool, tol: float) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    for d in x.degrees():
        c = x.coeff(d)
        skew_here = (d % 2 == 0) == even_skew
        dev = np.linalg.norm(c + c.T) if skew_here else np.linalg.norm(c - c.T)
        if dev > tol * max(1.0, np.linalg.norm(c)):
            return False
    return True


def pairing(x: LaurentLoop, y: LaurentLoop) -> float:
    """Residue pairing (X, Y) = sum_j tr(X_j Y_{-j-1}); exact finite sum."""
    x._check_dim(y)
    total = 0.0
    for d in x.degrees():
        e = -d - 1
        if y.lo <= e <= y.hi:
            total += float(np.trace(x.coeff(d) @ y.coeff(e)))
    return total


def rbracket(x: LaurentLoop, y: LaurentLoop, max_span: int | None = None) -> LaurentLoop:
    """Factorization bracket [P+X, P+Y] - [P-X, P-Y]."""
    plus = loop_commutator(proj_plus(x), proj_plus(y), max_span)
    minus = loop_commutator(proj_minus(x), proj_minus(y), max_span)
    return plus - minus


def rbracket_via_r(x: LaurentLoop, y: LaurentLoop, max_span: int | None = None) -> LaurentLoop:
    """Same bracket as ([RX, Y] + [X, RY]) / 2 with R = P+ - P-."""
    rx = proj_plus(x) - proj_minus(x)
    ry = proj_plus(y) - proj_minus(y)
    return 0.5 * (loop_commutator(rx, y, max_span) + loop_commutator(x, ry, max_span))


def exp_truncated(
    x: LaurentLoop,
    window: tuple[int, int],
    tol: float = 1e-14,
    max_terms: int = 500,
) -> LaurentLoop:
    """Partial sum of exp(X) restricted to a degree window.

    X must be one-sided (all degrees negative, or all nonnegative) so that
    coefficients dropped outside the window can never flow back in; the sum
    stops once the window-restricted norm of the next term drops below tol.
    """
    lo_w, hi_w = window
    if lo_w > hi_w:
        raise ValueError("empty window")
    if not (0 >= lo_w and 0 <= hi_w):
        raise ValueError("window must contain degree zero (exp has unit constant term)")
    if not (x.hi <= -1 or x.lo >= 0) and not x.is_zero():
        raise ValueError("exponent must be one-sided in degree")
    out = LaurentLoop.identity(x.n)
    term = LaurentLoop.identity(x.n)
    span_cap = (hi_w - lo_w + 1) + x.span + 2
    for m in range(1, max_terms + 1):
        term = (1.0 / m) * mul(term, x, max_span=max(span_cap, DEFAULT_MAX_SPAN))
        term = term.restrict(lo_w, hi_w)
        if term.is_zero() or term.norm() < tol:
            if not term.is_zero():
                out = out + term
            return out
        out = out + term
    raise LoopConvergenceError(f"exponential did not converge in {max_terms} terms")


def symmetry_defect(g: LaurentLoop, window: tuple[int, int] | None = None) -> float:
    """Deviation of g(z) g(-z)^T from the identity on a degree window.

    The window defaults to that of g itself: outside it a truncated group
    element cannot cancel its own dropped tail, so only in-window degrees
    are meaningful.
    """
    lo, hi = window if window is not None else g.window
    cap = max(2 * g.span + 1, DEFAULT_MAX_SPAN)
    prod = mul(g, g.transpose_flip(), max_span=cap) - LaurentLoop.identity(g.n)
    prod = prod.restrict(min(lo, 0), max(hi, 0))
    return 0.0 if prod.is_zero() else prod.norm()


def loop_inverse_by_symmetry(g: LaurentLoop, tol: float = 1e-10) -> LaurentLoop:
    """Inverse z -> g(-z)^T of a loop satisfying g(z) g(-z)^T = I.

    Raises :class:`LoopSymmetryError` when the symmetry fails beyond tol on
    the loop's own window.
    """
    defect = symmetry_defect(g)
    if defect > tol:
        raise LoopSymmetryError(f"loop symmetry violated (defect {defect:.3e})")
    return g.transpose_flip()


def coadjoint(
    g_plus: LaurentLoop,
    g_minus: LaurentLoop,
    x: LaurentLoop,
    tol: float = 1e-10,
    max_span: int | None = None,
) -> LaurentLoop:
    """Coadjoint action P-(g+^-1 X g+) + P+(g-^-1 X g-).

    Inverses are taken through the loop symmetry.  Because g+ carries only
    nonnegative degrees and g- only nonpositive ones with unit constant
    term, the output window is contained in that of X by construction.
    """
    if g_plus.lo < 0:
        raise ValueError("g_plus must have nonnegative degrees")
    if g_minus.hi > 0 or np.linalg.norm(g_minus.coeff(0) - np.eye(g_minus.n)) > tol:
        raise ValueError("g_minus must have nonpositive degrees and unit constant term")
    cap = max_span if max_span is not None else max(
        DEFAULT_MAX_SPAN, 2 * g_plus.span + x.span + 2, 2 * g_minus.span + x.span + 2
    )
    gp_inv = loop_inverse_by_symmetry(g_plus, tol)
    gm_inv = loop_inverse_by_symmetry(g_minus, tol)
    part_minus = proj_minus(mul(mul(gp_inv, x, cap), g_plus, cap))
    part_plus = proj_plus(mul(mul(gm_inv, x, cap), g_minus, cap))
    return part_minus + part_plus


def random_sigma_fixed_loop(
    n: int, lo: int, hi: int, seed: int, scale: float = 1.0
) -> LaurentLoop:
    """Random loop in the fixed locus: even degrees skew, odd symmetric."""
    rng = SplitMix64(seed)
    terms = {}
    for d in range(lo, hi + 1):
        a = scale * rng.matrix(n)
        terms[d] = 0.5 * (a - a.T) if d % 2 == 0 else 0.5 * (a + a.T)
    return LaurentLoop.from_terms(terms, n)


def random_dual_loop(n: int, lo: int, hi: int, seed: int, scale: float = 1.0) -> LaurentLoop:
    """Random loop in the dual locus: even degrees symmetric, odd skew."""
    rng = SplitMix64(seed)
    terms = {}
    for d in range(lo, hi + 1):
        a = scale * rng.matrix(n)
        terms[d] = 0.5 * (a + a.T) if d % 2 == 0 else 0.5 * (a - a.T)
    return LaurentLoop.from_terms(terms, n)
