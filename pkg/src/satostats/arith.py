"""Frobenius data: primes, curve models, L-polynomials, base change, ingestion.

Point counting is exhaustive: O(p) per prime for elliptic curves via a
quadratic-residue table, O(p) + O(p^2) for genus 2 (counts over F_p and
F_{p^2}).  Genus-2 counting refuses primes above a configurable cap; large
ranges are meant to be ingested from files produced by external tools.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator

import numpy as np
from numba import njit

from . import _kernels
from .errors import (
    BadReduction,
    BudgetExceeded,
    OrderError,
    ParseError,
    WeilViolation,
)

ANGLE_TOL = 1e-9
DEFAULT_G2_CAP = 3000


# ---------------------------------------------------------------------------
# primes

def sieve_primes(bound: int) -> np.ndarray:
    """All primes <= bound, ascending (int64). Requires bound >= 2."""
    if bound < 2:
        raise ValueError("bound must be >= 2")
    is_prime = np.ones(bound + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if is_prime[p]:
            is_prime[p * p:: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


# ---------------------------------------------------------------------------
# exact integer discriminants

def _bareiss_det(m: list[list[int]]) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    a = [row[:] for row in m]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _resultant(p: list[int], q: list[int]) -> int:
    """Resultant of two integer polynomials (ascending coefficients)."""
    dp = len(p) - 1
    dq = len(q) - 1
    n = dp + dq
    rows = []
    for i in range(dq):
        row = [0] * n
        for j, c in enumerate(reversed(p)):
            row[i + j] = c
        rows.append(row)
    for i in range(dp):
        row = [0] * n
        for j, c in enumerate(reversed(q)):
            row[i + j] = c
        rows.append(row)
    return _bareiss_det(rows)


def _poly_disc(p: list[int]) -> int:
    """Discriminant of an integer polynomial (ascending, nonzero lead)."""
    d = len(p) - 1
    dp = [i * c for i, c in enumerate(p)][1:]
    res = _resultant(p, dp)
    assert res % p[-1] == 0
    return (-1) ** (d * (d - 1) // 2) * (res // p[-1])


def discriminant_elliptic(ainvs: tuple[int, int, int, int, int]) -> int:
    a1, a2, a3, a4, a6 = ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def discriminant_genus2(f: tuple[int, ...], h: tuple[int, ...]) -> int:
    """Integral-model discriminant 2^-12 disc_6(h^2 + 4f) of y^2 + hy = f."""
    F = _squared_model(f, h)
    d = len(F) - 1
    if d == 6:
        disc6 = _poly_disc(F)
    elif d == 5:
        # degree-6 binary form with vanishing leading coefficient
        disc6 = F[-1] ** 2 * _poly_disc(F)
    else:
        raise ValueError("h^2 + 4f must have degree 5 or 6")
    assert disc6 % 4096 == 0
    return disc6 // 4096


def _squared_model(f: tuple[int, ...], h: tuple[int, ...]) -> list[int]:
    """Coefficients of h^2 + 4f, ascending, trailing zeros stripped."""
    F = [0] * 7
    for i, c in enumerate(f):
        F[i] += 4 * c
    for i, a in enumerate(h):
        for j, b in enumerate(h):
            F[i + j] += a * b
    while len(F) > 1 and F[-1] == 0:
        F.pop()
    return F


# ---------------------------------------------------------------------------
# curve models

@dataclass(frozen=True)
class CurveModel:
    """Integral model of an elliptic curve or genus-2 curve over Q.

    Elliptic: Weierstrass coefficients ainvs = (a1, a2, a3, a4, a6).
    Genus 2: y^2 + h(x) y = f(x) with integer f (degree 5 or 6 after
    completing the square) and h (degree <= 3), ascending coefficients.
    """

    label: str
    kind: str  # "ec" | "g2"
    ainvs: tuple[int, ...] | None = None
    f: tuple[int, ...] | None = None
    h: tuple[int, ...] | None = None
    conductor: int | None = None
    rank: int | None = None
    rank_sym3: int | None = None
    cm: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind == "ec":
            if self.ainvs is None or len(self.ainvs) != 5:
                raise ValueError("elliptic model needs 5 Weierstrass coefficients")
        elif self.kind == "g2":
            if self.f is None or self.h is None:
                raise ValueError("genus-2 model needs f and h coefficient lists")
            if len(_squared_model(self.f, self.h)) - 1 not in (5, 6):
                raise ValueError("h^2 + 4f must have degree 5 or 6")
            if len(self.h) > 4:
                raise ValueError("h must have degree <= 3")
        else:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.discriminant == 0:
            raise ValueError("singular model (zero discriminant)")

    @classmethod
    def elliptic(cls, label: str, ainvs: Iterable[int], **kw) -> "CurveModel":
        return cls(label=label, kind="ec", ainvs=tuple(int(a) for a in ainvs), **kw)

    @classmethod
    def genus2(cls, label: str, f: Iterable[int], h: Iterable[int], **kw) -> "CurveModel":
        return cls(label=label, kind="g2", f=tuple(int(c) for c in f),
                   h=tuple(int(c) for c in h), **kw)

    @property
    def genus(self) -> int:
        return 1 if self.kind == "ec" else 2

    @property
    def discriminant(self) -> int:
        if self.kind == "ec":
            return discriminant_elliptic(self.ainvs)
        return discriminant_genus2(self.f, self.h)

    def b_invariants(self) -> tuple[int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        return (a1 * a1 + 4 * a2, 2 * a4 + a1 * a3, a3 * a3 + 4 * a6)


def good_reduction(curve: CurveModel, p: int) -> bool:
    """True iff p does not divide the model discriminant (and p odd for g2)."""
    if curve.kind == "g2" and p == 2:
        return False
    return curve.discriminant % p != 0


# ---------------------------------------------------------------------------
# Euler factors

def _check_real_angles_g1(c1: int | float, norm: int) -> None:
    if abs(c1) > 2.0 * math.sqrt(norm) + ANGLE_TOL:
        raise WeilViolation(f"|{c1}| > 2*sqrt({norm})")


def _check_real_angles_g2(c1: int, c2: int, norm: int) -> None:
    if abs(c1) > 4.0 * math.sqrt(norm) + ANGLE_TOL:
        raise WeilViolation(f"|{c1}| > 4*sqrt({norm})")
    a1 = c1 / math.sqrt(norm)
    a2 = c2 / norm
    # cos(angles) solve z^2 - (a1/2) z + (a2-2)/4 = 0; demand real roots in [-1,1]
    disc = (a1 / 2.0) ** 2 - (a2 - 2.0)
    if disc < -ANGLE_TOL:
        raise WeilViolation(f"complex eigen-angles for ({c1},{c2}) at norm {norm}")
    s = math.sqrt(max(disc, 0.0)) / 2.0
    for root in (a1 / 4.0 - s, a1 / 4.0 + s):
        if not -1.0 - ANGLE_TOL <= root <= 1.0 + ANGLE_TOL:
            raise WeilViolation(f"eigen-angle cos {root} outside [-1,1]")


@dataclass(frozen=True)
class LPolynomial:
    """Integer Euler factor at a good prime p (unnormalized).

    genus 1: coefficients (a_p,) for 1 - a_p T + p T^2.
    genus 2: coefficients (c1, c2) for 1 - c1 T + c2 T^2 - p c1 T^3 + p^2 T^4;
    the functional-equation symmetry is built into this representation.
    """

    prime: int
    genus: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if self.genus == 1:
            if len(self.coefficients) != 1:
                raise ValueError("genus 1 takes one coefficient a_p")
            _check_real_angles_g1(self.coefficients[0], self.prime)
        elif self.genus == 2:
            if len(self.coefficients) != 2:
                raise ValueError("genus 2 takes coefficients (c1, c2)")
            _check_real_angles_g2(*self.coefficients, self.prime)
        else:
            raise ValueError("genus must be 1 or 2")

    def full_coefficients(self) -> tuple[int, ...]:
        """Coefficients of the degree-2g polynomial, constant term first."""
        p = self.prime
        if self.genus == 1:
            (a,) = self.coefficients
            return (1, -a, p)
        c1, c2 = self.coefficients
        return (1, -c1, c2, -p * c1, p * p)

    def to_normed(self) -> "NormedEulerFactor":
        return NormedEulerFactor(norm=self.prime, genus=self.genus,
                                 coefficients=self.coefficients)


@dataclass(frozen=True)
class NormedEulerFactor:
    """Euler factor indexed by the absolute norm of a prime ideal.

    Same coefficient conventions as LPolynomial with the norm in place of p;
    norms may be prime powers (inert primes of a quadratic field).
    """

    norm: int
    genus: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if self.norm < 2:
            raise ValueError("norm must be >= 2")
        if self.genus == 1:
            _check_real_angles_g1(self.coefficients[0], self.norm)
        elif self.genus == 2:
            _check_real_angles_g2(*self.coefficients, self.norm)
        else:
            raise ValueError("genus must be 1 or 2")

    def normalized(self) -> tuple[float, ...]:
        """(a1_bar,) or (a1_bar, a2_bar): coefficients of det(1 - yT)."""
        if self.genus == 1:
            return (self.coefficients[0] / math.sqrt(self.norm),)
        return (self.coefficients[0] / math.sqrt(self.norm),
                self.coefficients[1] / self.norm)


# ---------------------------------------------------------------------------
# elliptic counting

def _ec_count_affine(ainvs, p):
    a1, a2, a3, a4, a6 = ainvs
    n = 0
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                n += 1
    return n


def ec_trace(curve: CurveModel, p: int) -> int:
    """a_p = p + 1 - #E(F_p) by exhaustive counting."""
    if curve.kind != "ec":
        raise ValueError("ec_trace needs an elliptic model")
    if not good_reduction(curve, p):
        raise BadReduction(f"{curve.label} has bad reduction at {p}")
    if p <= 3:
        return p + 1 - (_ec_count_affine(curve.ainvs, p) + 1)
    b2, b4, b6 = curve.b_invariants()
    x = np.arange(p, dtype=np.int64)
    g = (4 * (x * x % p) * x + b2 * x * x + 2 * b4 * x + b6) % p
    chi = np.full(p, -1, dtype=np.int8)
    chi[(x * x) % p] = 1
    chi[0] = 0
    a = -int(chi[g].sum())
    _check_real_angles_g1(a, p)
    return a


def ec_trace_batch(curves: list[CurveModel], primes: np.ndarray) -> np.ndarray:
    """a_p matrix (len(primes), len(curves)) via the compiled kernel.

    Every prime must be odd and of good reduction for every curve; small or
    bad primes are the caller's business (see frobenius_data).
    """
    bcs = np.array([c.b_invariants() for c in curves], dtype=np.int64)
    return _kernels.trace_batch(np.asarray(primes, dtype=np.int64), bcs)


# ---------------------------------------------------------------------------
# genus-2 counting

@njit(cache=True)
def _g2_counts(p, F, deg, d):
    """(N1, N2): point counts over F_p and F_{p2} = F_p[t]/(t^2-d)."""
    chi = np.full(p, -1, dtype=np.int8)
    chi[0] = 0
    s = 0
    for x in range(1, (p - 1) // 2 + 1):
        s += 2 * x - 1
        if s >= p:
            s -= p
        chi[s] = 1
    n1 = p
    for x in range(p):
        v = 0
        for k in range(deg, -1, -1):
            v = (v * x + F[k]) % p
        n1 += chi[v]
    if deg == 5:
        n1 += 1
    else:
        n1 += 1 + chi[F[6]]
    n2 = p * p
    for u in range(p):
        for w in range(p):
            A = 0
            B = 0
            for k in range(deg, -1, -1):
                A2 = (A * u + d * B % p * w + F[k]) % p
                B = (A * w + B * u) % p
                A = A2
            n2 += chi[(A * A - d * B % p * B) % p]
    if deg == 5:
        n2 += 1
    else:
        n2 += 2  # every unit of F_p is a square in F_{p^2}
    return n1, n2


def _smallest_nonresidue(p: int) -> int:
    for d in range(2, p):
        if pow(d, (p - 1) // 2, p) == p - 1:
            return d
    raise ValueError(f"no quadratic nonresidue mod {p}")


def g2_lpoly(curve: CurveModel, p: int, cap: int = DEFAULT_G2_CAP) -> LPolynomial:
    """L-polynomial of a genus-2 curve from counts over F_p and F_{p^2}."""
    if curve.kind != "g2":
        raise ValueError("g2_lpoly needs a genus-2 model")
    if not good_reduction(curve, p):
        raise BadReduction(f"{curve.label} has bad reduction at {p}")
    if p > cap:
        raise BudgetExceeded(f"prime {p} above genus-2 cap {cap}")
    Fall = _squared_model(curve.f, curve.h)
    F = np.zeros(7, dtype=np.int64)
    F[: len(Fall)] = [c % p for c in Fall]
    deg = 6
    while deg > 0 and F[deg] == 0:
        deg -= 1
    assert deg in (5, 6), "degree drop below 5 at a good prime"
    n1, n2 = _g2_counts(p, F, deg, _smallest_nonresidue(p))
    t1 = p + 1 - int(n1)
    t2 = p * p + 1 - int(n2)
    c1 = t1
    assert (t1 * t1 - t2) % 2 == 0
    c2 = (t1 * t1 - t2) // 2
    return LPolynomial(prime=p, genus=2, coefficients=(c1, c2))


# ---------------------------------------------------------------------------
# curve streams

def frobenius_data(curve: CurveModel, bound: int,
                   g2_cap: int = DEFAULT_G2_CAP) -> tuple[np.ndarray, np.ndarray]:
    """(norms, coeffs) over good primes <= bound, ascending.

    coeffs has shape (n, 1) for genus 1 (a_p) and (n, 2) for genus 2.
    Counting runs in parallel per prime; emission order is by norm.
    """
    primes = sieve_primes(bound)
    good = np.array([good_reduction(curve, int(p)) for p in primes])
    primes = primes[good]
    if curve.kind == "ec":
        small = primes <= 3
        coeffs = np.empty((len(primes), 1), dtype=np.int64)
        for i in np.flatnonzero(small):
            coeffs[i, 0] = ec_trace(curve, int(primes[i]))
        if (~small).any():
            coeffs[~small, 0] = ec_trace_batch([curve], primes[~small])[:, 0]
        return primes, coeffs
    if len(primes) and primes[-1] > g2_cap:
        raise BudgetExceeded(
            f"bound {bound} needs primes above the genus-2 cap {g2_cap}; "
            "raise the cap or ingest externally computed factors")
    coeffs = np.empty((len(primes), 2), dtype=np.int64)
    for i, p in enumerate(primes):
        lp = g2_lpoly(curve, int(p), cap=g2_cap)
        coeffs[i] = lp.coefficients
    return primes, coeffs


def euler_factor_stream(curve: CurveModel, bound: int,
                        g2_cap: int = DEFAULT_G2_CAP) -> Iterator[NormedEulerFactor]:
    """Ordered stream of NormedEulerFactor for good primes <= bound."""
    norms, coeffs = frobenius_data(curve, bound, g2_cap)
    for i in range(len(norms)):
        yield NormedEulerFactor(norm=int(norms[i]), genus=curve.genus,
                                coefficients=tuple(int(c) for c in coeffs[i]))


# ---------------------------------------------------------------------------
# quadratic base change

def quadratic_base_change(a_p: int, p: int, split: bool) -> list[NormedEulerFactor]:
    """Euler factors over a quadratic field attached to (a_p, p).

    Split primes give two copies of the factor at norm p; an inert prime
    gives one factor at norm p^2 with trace a_p^2 - 2p (the eigenvalues are
    squared, so the normalized trace is abar^2 - 2).
    """
    if abs(a_p) > 2.0 * math.sqrt(p):
        raise WeilViolation(f"|{a_p}| > 2*sqrt({p})")
    if split:
        f = NormedEulerFactor(norm=p, genus=1, coefficients=(a_p,))
        return [f, f]
    return [NormedEulerFactor(norm=p * p, genus=1,
                              coefficients=(a_p * a_p - 2 * p,))]


def split_from_legendre(p: int, disc: int) -> bool:
    """True iff p splits in the quadratic field of discriminant disc (p odd,
    unramified)."""
    if p == 2 or disc % p == 0:
        raise ValueError("p must be odd and unramified")
    return pow(disc % p, (p - 1) // 2, p) == 1


# ---------------------------------------------------------------------------
# file interfaces

def ingest_lpoly_file(path) -> Iterator[NormedEulerFactor]:
    """Stream factors from CSV with header norm,c1 or norm,c1,c2.

    Rows must be sorted ascending by norm; coefficients unnormalized with
    the sign convention 1 - c1 T + ... ; every row is Weil-validated.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file")
        header = [c.strip() for c in header]
        if header == ["norm", "c1"]:
            genus = 1
        elif header == ["norm", "c1", "c2"]:
            genus = 2
        else:
            raise ParseError(f"{path}: bad header {header}")
        last = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != genus + 1:
                raise ParseError(f"{path}:{lineno}: expected {genus + 1} fields")
            try:
                values = [int(v) for v in row]
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            norm, coeffs = values[0], tuple(values[1:])
            if norm <= last:
                raise OrderError(f"{path}:{lineno}: norms not ascending")
            last = norm
            yield NormedEulerFactor(norm=norm, genus=genus, coefficients=coeffs)


def write_lpoly_csv(path, factors: Iterable[NormedEulerFactor],
                    header_comment: str | None = None) -> None:
    factors = list(factors)
    genus = factors[0].genus if factors else 1
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh)
        w.writerow(["norm", "c1"] if genus == 1 else ["norm", "c1", "c2"])
        for f in factors:
            w.writerow([f.norm, *f.coefficients])


def curve_from_json(obj: dict) -> CurveModel:
    try:
        label = obj["label"]
        kind = obj["kind"]
        coeffs = obj["coeffs"]
        extra = {k: obj[k] for k in ("conductor", "rank", "rank_sym3", "cm")
                 if k in obj}
        if kind == "ec":
            return CurveModel.elliptic(label, coeffs["ainvs"], **extra,
                                       meta=obj.get("meta", {}))
        if kind == "g2":
            return CurveModel.genus2(label, coeffs["f"], coeffs["h"], **extra,
                                     meta=obj.get("meta", {}))
        raise ParseError(f"unknown curve kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad curve record: {exc}") from None


def load_curve_file(path) -> list[CurveModel]:
    """Curves from a JSON-lines file, one object per line."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            out.append(curve_from_json(obj))
    return out


def bundled_curves() -> dict[str, CurveModel]:
    """Curve models shipped with the package, keyed by label."""
    text = resources.files("satostats.data").joinpath("curves.jsonl").read_text()
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            c = curve_from_json(json.loads(line))
            out[c.label] = c
    return out
