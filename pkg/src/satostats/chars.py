"""Characters of the supported groups and their exact polynomial algebra.

Irreducible characters are evaluated through integer polynomials in the
coordinates x = 2 cos(alpha), y = 2 cos(beta).  The building block is the
monic family S_k with S_k(2 cos t) = sin((k+1)t)/sin(t):

    S_0 = 1,  S_1 = x,  S_k = x S_{k-1} - S_{k-2}.

On SU2 the irreducibles are chi_n = S_n(x).  On USp4 the Weyl quotient
formula becomes the exact polynomial division

    chi_{m,n} = [S_{m+1}(x) S_n(y) - S_{m+1}(y) S_n(x)] / (x - y),

whose numerator is antisymmetric, so the quotient has integer coefficients
and no singular denominators at alpha = beta or sin(alpha) = 0.  U1 uses
exponentials nu_m = e^{i m theta} (kept as Laurent coefficients), NU1 the
induced two-dimensional rho_m (2 cos(m theta) on the identity component,
0 on sigma) together with the trivial and sign characters.

Virtual characters are finite complex combinations of labels; class
functions carry an exact algebra (sums, products, powers) that decomposes
back into irreducibles by triangular elimination, independently of the
Gauss-Legendre quadrature route used for the numeric decompositions.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import GroupMismatch, ResidualTooLarge, TrivialPresent
from .stgroup import ClassGrid, ClassPoint, STGroup, grid_power

QUAD_NODES = 512
ROUND_TOL = 1e-6
RESIDUAL_HARD = 1e-4


# ---------------------------------------------------------------------------
# exact polynomials in x = 2cos(alpha) (, y = 2cos(beta))

class ChebPoly:
    """Polynomial with exact coefficients in one or two cosine coordinates.

    Coefficients are kept in a 2D object array C with C[a, b] the
    coefficient of x^a y^b (univariate polynomials have a single column).
    """

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=object)
        if c.ndim == 0:
            c = c.reshape(1, 1)
        elif c.ndim == 1:
            c = c.reshape(-1, 1)
        self.c = c
        self._trim()

    def _trim(self):
        c = self.c
        while c.shape[0] > 1 and not any(c[-1, :]):
            c = c[:-1, :]
        while c.shape[1] > 1 and not any(c[:, -1]):
            c = c[:, :-1]
        self.c = c

    @classmethod
    def const(cls, v) -> "ChebPoly":
        return cls([[v]])

    @classmethod
    def x(cls) -> "ChebPoly":
        return cls([[0], [1]])

    @classmethod
    def y(cls) -> "ChebPoly":
        return cls([[0, 1]])

    @property
    def deg_x(self) -> int:
        return self.c.shape[0] - 1

    @property
    def deg_y(self) -> int:
        return self.c.shape[1] - 1

    def is_zero(self) -> bool:
        return not any(self.c.flat)

    def is_symmetric(self) -> bool:
        n = max(self.c.shape)
        p = np.zeros((n, n), dtype=object)
        p[: self.c.shape[0], : self.c.shape[1]] = self.c
        return bool(np.all(p == p.T))

    def __eq__(self, other) -> bool:
        return isinstance(other, ChebPoly) and (self - other).is_zero()

    def __add__(self, other) -> "ChebPoly":
        other = other if isinstance(other, ChebPoly) else ChebPoly.const(other)
        nx = max(self.c.shape[0], other.c.shape[0])
        ny = max(self.c.shape[1], other.c.shape[1])
        out = np.zeros((nx, ny), dtype=object)
        out[: self.c.shape[0], : self.c.shape[1]] += self.c
        out[: other.c.shape[0], : other.c.shape[1]] += other.c
        return ChebPoly(out)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self) -> "ChebPoly":
        return ChebPoly(-self.c)

    def __sub__(self, other) -> "ChebPoly":
        other = other if isinstance(other, ChebPoly) else ChebPoly.const(other)
        return self + (-other)

    def __mul__(self, other) -> "ChebPoly":
        if not isinstance(other, ChebPoly):
            return ChebPoly(self.c * other)
        out = np.zeros((self.c.shape[0] + other.c.shape[0] - 1,
                        self.c.shape[1] + other.c.shape[1] - 1), dtype=object)
        for a in range(self.c.shape[0]):
            for b in range(self.c.shape[1]):
                v = self.c[a, b]
                if v:
                    out[a: a + other.c.shape[0],
                        b: b + other.c.shape[1]] += v * other.c
        return ChebPoly(out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int) -> "ChebPoly":
        if n < 0:
            raise ValueError("negative power")
        out = ChebPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def swap_xy(self) -> "ChebPoly":
        return ChebPoly(self.c.T)

    def divide_x_minus_y(self) -> "ChebPoly":
        """Exact quotient by (x - y); the input must be divisible."""
        # Horner in x over Z[y]: q_{a-1} = p_a + y * q_a
        p = self.c
        nx, ny = p.shape
        q = np.zeros((max(nx - 1, 1), ny + nx), dtype=object)
        carry = np.zeros(ny + nx, dtype=object)
        for a in range(nx - 1, 0, -1):
            row = np.zeros(ny + nx, dtype=object)
            row[:ny] = p[a, :]
            row += carry
            q[a - 1, :] = row
            carry = np.roll(row, 1)
            carry[0] = 0
        rem = np.zeros(ny + nx, dtype=object)
        rem[:ny] = p[0, :]
        rem += carry
        if any(rem):
            raise ValueError("polynomial not divisible by (x - y)")
        return ChebPoly(q)

    def eval(self, x: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
        cf = self.c.astype(np.complex128)
        x = np.asarray(x, dtype=np.float64)
        if self.deg_y == 0:
            out = np.zeros_like(x, dtype=np.complex128)
            for a in range(cf.shape[0] - 1, -1, -1):
                out = out * x + cf[a, 0]
            return out
        assert y is not None, "bivariate polynomial needs y values"
        y = np.asarray(y, dtype=np.float64)
        ypow = np.ones_like(y, dtype=np.complex128)
        yrows = []
        for b in range(cf.shape[1]):
            yrows.append(ypow.copy())
            ypow = ypow * y
        out = np.zeros_like(x, dtype=np.complex128)
        for a in range(cf.shape[0] - 1, -1, -1):
            row = np.zeros_like(x, dtype=np.complex128)
            for b in range(cf.shape[1]):
                if cf[a, b]:
                    row = row + cf[a, b] * yrows[b]
            out = out * x + row
        return out

    def eval_at(self, xv, yv=None):
        """Exact evaluation at scalar arguments (Python arithmetic)."""
        total = 0
        for a in range(self.c.shape[0]):
            for b in range(self.c.shape[1]):
                v = self.c[a, b]
                if v:
                    total += v * xv ** a * (yv ** b if b else 1)
        return total

    def monomials(self):
        for a in range(self.c.shape[0]):
            for b in range(self.c.shape[1]):
                if self.c[a, b]:
                    yield a, b, self.c[a, b]

    def __repr__(self):
        terms = [f"{v}*x^{a}y^{b}" for a, b, v in self.monomials()]
        return "ChebPoly(" + (" + ".join(terms) or "0") + ")"


@functools.lru_cache(maxsize=None)
def S(k: int) -> ChebPoly:
    """Monic Chebyshev-like family: S_k(2 cos t) = sin((k+1)t)/sin(t)."""
    if k < 0:
        return ChebPoly.const(0)
    if k == 0:
        return ChebPoly.const(1)
    if k == 1:
        return ChebPoly.x()
    return ChebPoly.x() * S(k - 1) - S(k - 2)


@functools.lru_cache(maxsize=None)
def D(k: int) -> ChebPoly:
    """Trace family: D_k(2 cos t) = 2 cos(k t); monic for k >= 1."""
    if k == 0:
        return ChebPoly.const(2)
    if k == 1:
        return ChebPoly.x()
    return ChebPoly.x() * D(k - 1) - D(k - 2)


# ---------------------------------------------------------------------------
# character labels

@dataclass(frozen=True)
class CharLabel:
    """Irreducible-character label of one of the five groups."""

    group: STGroup
    family: str  # nu | triv | sign | rho | chi | box | chi2
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        fam, idx, g = self.family, self.indices, self.group
        ok = (
            (fam == "nu" and g is STGroup.U1 and len(idx) == 1)
            or (fam in ("triv", "sign") and g is STGroup.NU1 and not idx)
            or (fam == "rho" and g is STGroup.NU1 and len(idx) == 1 and idx[0] >= 1)
            or (fam == "chi" and g is STGroup.SU2 and len(idx) == 1 and idx[0] >= 0)
            or (fam == "box" and g is STGroup.SU2xSU2 and len(idx) == 2
                and min(idx) >= 0)
            or (fam == "chi2" and g is STGroup.USp4 and len(idx) == 2
                and idx[0] >= idx[1] >= 0)
        )
        if not ok:
            raise ValueError(f"bad label {fam}{idx} for {g.value}")

    @property
    def degree(self) -> int:
        if self.family in ("nu", "triv", "sign"):
            return 1
        if self.family == "rho":
            return 2
        if self.family == "chi":
            return self.indices[0] + 1
        if self.family == "box":
            return (self.indices[0] + 1) * (self.indices[1] + 1)
        m, n = self.indices
        return (m - n + 1) * (n + 1) * (m + 2) * (m + n + 3) // 6

    @property
    def weight(self) -> int:
        if self.family in ("triv", "sign"):
            return 0
        if self.family == "nu":
            return abs(self.indices[0])
        if self.family in ("rho", "chi"):
            return self.indices[0]
        return self.indices[0] + self.indices[1]

    @property
    def is_trivial(self) -> bool:
        return self == trivial_label(self.group)

    def dual(self) -> "CharLabel":
        if self.family == "nu":
            return CharLabel(self.group, "nu", (-self.indices[0],))
        return self

    def __str__(self) -> str:
        f, idx = self.family, self.indices
        if f == "nu":
            return f"nu_{idx[0]}"
        if f == "rho":
            return f"rho_{idx[0]}"
        if f in ("triv", "sign"):
            return f
        if f == "chi":
            return f"chi_{idx[0]}"
        if f == "box":
            return f"chi_{idx[0]}xchi_{idx[1]}"
        return f"chi_{{{idx[0]},{idx[1]}}}"


def trivial_label(group: STGroup) -> CharLabel:
    return {
        STGroup.U1: CharLabel(STGroup.U1, "nu", (0,)),
        STGroup.NU1: CharLabel(STGroup.NU1, "triv"),
        STGroup.SU2: CharLabel(STGroup.SU2, "chi", (0,)),
        STGroup.SU2xSU2: CharLabel(STGroup.SU2xSU2, "box", (0, 0)),
        STGroup.USp4: CharLabel(STGroup.USp4, "chi2", (0, 0)),
    }[group]


_LABEL_RES = [
    (re.compile(r"^nu_(-?\d+)$"), lambda g, m: CharLabel(g, "nu", (int(m[1]),))),
    (re.compile(r"^rho_(\d+)$"), lambda g, m: CharLabel(g, "rho", (int(m[1]),))),
    (re.compile(r"^(triv|1)$"), lambda g, m: trivial_label(g)),
    (re.compile(r"^sign$"), lambda g, m: CharLabel(g, "sign")),
    (re.compile(r"^chi_(\d+)xchi_(\d+)$"),
     lambda g, m: CharLabel(g, "box", (int(m[1]), int(m[2])))),
    (re.compile(r"^chi_\{(\d+),(\d+)\}$"),
     lambda g, m: CharLabel(g, "chi2", (int(m[1]), int(m[2])))),
    (re.compile(r"^chi_(\d+)$"), lambda g, m: CharLabel(g, "chi", (int(m[1]),))),
]


def parse_label(text: str, group: STGroup) -> CharLabel:
    text = text.strip()
    for rx, mk in _LABEL_RES:
        m = rx.match(text)
        if m:
            try:
                return mk(group, m)
            except ValueError as exc:
                raise ValueError(f"label {text!r} invalid for {group.value}: {exc}")
    raise ValueError(f"cannot parse character label {text!r}")


def labels_up_to(group: STGroup, max_index: int) -> list[CharLabel]:
    """The label set searched by numeric decomposition."""
    if group is STGroup.U1:
        return [CharLabel(group, "nu", (m,))
                for m in range(-max_index, max_index + 1)]
    if group is STGroup.NU1:
        out = [CharLabel(group, "triv"), CharLabel(group, "sign")]
        out += [CharLabel(group, "rho", (m,)) for m in range(1, max_index + 1)]
        return out
    if group is STGroup.SU2:
        return [CharLabel(group, "chi", (n,)) for n in range(max_index + 1)]
    if group is STGroup.SU2xSU2:
        return [CharLabel(group, "box", (i, j))
                for i in range(max_index + 1) for j in range(max_index + 1)]
    return [CharLabel(group, "chi2", (m, n))
            for m in range(max_index + 1) for n in range(m + 1)]


# ---------------------------------------------------------------------------
# character evaluation

@functools.lru_cache(maxsize=None)
def char_poly(label: CharLabel) -> ChebPoly:
    """Exact polynomial of a label in the cosine coordinates.

    For rho_m this is the identity-component restriction (the sigma value 0
    is handled by evaluation); U1 labels other than nu_0 have no polynomial
    expression in x and raise ValueError.
    """
    f = label.family
    if f in ("triv", "sign"):
        return ChebPoly.const(1)
    if f == "nu":
        if label.indices[0] == 0:
            return ChebPoly.const(1)
        raise ValueError("nu_m (m != 0) is not a polynomial in 2cos(theta)")
    if f == "rho":
        return D(label.indices[0])
    if f == "chi":
        return S(label.indices[0])
    if f == "box":
        i, j = label.indices
        return S(i) * S(j).swap_xy()
    m, n = label.indices
    num = S(m + 1) * S(n).swap_xy() - S(m + 1).swap_xy() * S(n)
    return num.divide_x_minus_y()


def label_values(label: CharLabel, grid: ClassGrid) -> np.ndarray:
    """Vectorized character values on a grid of class points."""
    if label.group is not grid.group:
        raise GroupMismatch(f"{label} evaluated on {grid.group.value} classes")
    th = grid.angles
    if label.family == "nu":
        return np.exp(1j * label.indices[0] * th[:, 0])
    if label.family == "triv":
        return np.ones(len(grid), dtype=np.complex128)
    if label.family == "sign":
        return np.where(grid.sigma, -1.0, 1.0).astype(np.complex128)
    if label.family == "rho":
        vals = 2.0 * np.cos(label.indices[0] * th[:, 0]).astype(np.complex128)
        vals[grid.sigma] = 0.0
        return vals
    x = 2.0 * np.cos(th[:, 0])
    y = 2.0 * np.cos(th[:, 1]) if th.shape[1] == 2 else None
    return char_poly(label).eval(x, y)


def eval_char(label: CharLabel, point: ClassPoint) -> complex:
    """Character value at one class point."""
    grid = ClassGrid.from_points(point.group, [point])
    return complex(label_values(label, grid)[0])


# ---------------------------------------------------------------------------
# virtual characters

class VirtualCharacter:
    """Finite complex combination of irreducible-character labels."""

    def __init__(self, group: STGroup, coeffs: dict[CharLabel, complex]):
        self.group = group
        self.coeffs = {}
        for lab, c in coeffs.items():
            if lab.group is not group:
                raise GroupMismatch(f"label {lab} not in {group.value}")
            c = complex(c)
            if c != 0:
                self.coeffs[lab] = c

    @classmethod
    def single(cls, label: CharLabel, coeff: complex = 1) -> "VirtualCharacter":
        return cls(label.group, {label: coeff})

    def __add__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        if other.group is not self.group:
            raise GroupMismatch("cannot add characters of different groups")
        out = dict(self.coeffs)
        for lab, c in other.coeffs.items():
            out[lab] = out.get(lab, 0) + c
        return VirtualCharacter(self.group, out)

    def __sub__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        return self + (other * -1)

    def __mul__(self, scalar: complex) -> "VirtualCharacter":
        return VirtualCharacter(self.group,
                                {lab: c * scalar for lab, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, VirtualCharacter)
                and self.group is other.group
                and not (self - other).coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def conj_dual(self) -> "VirtualCharacter":
        """c_chi -> conj(c_chibar) rearrangement (equals self iff selfdual)."""
        return VirtualCharacter(
            self.group,
            {lab.dual(): complex(c).conjugate() for lab, c in self.coeffs.items()})

    def is_selfdual(self, tol: float = 1e-12) -> bool:
        diff = self - self.conj_dual()
        return all(abs(c) <= tol for c in diff.coeffs.values())

    def trivial_coefficient(self) -> complex:
        return self.coeffs.get(trivial_label(self.group), 0j)

    def tilde(self) -> "VirtualCharacter":
        """Remove the trivial constituent."""
        out = dict(self.coeffs)
        out.pop(trivial_label(self.group), None)
        return VirtualCharacter(self.group, out)

    def evaluate(self, grid: ClassGrid) -> np.ndarray:
        out = np.zeros(len(grid), dtype=np.complex128)
        for lab, c in self.coeffs.items():
            out += c * label_values(lab, grid)
        return out

    def to_function(self) -> "ClassFunction":
        fn = ClassFunction.zero(self.group)
        for lab, c in self.coeffs.items():
            fn = fn + ClassFunction.from_label(lab) * c
        return fn

    def sorted_items(self) -> list[tuple[CharLabel, complex]]:
        return sorted(self.coeffs.items(),
                      key=lambda kv: (kv[0].weight, str(kv[0])))

    def to_json(self) -> dict:
        coeffs = [{"label": str(lab), "re": c.real, "im": c.imag}
                  for lab, c in self.sorted_items()]
        return {"group": self.group.value, "coeffs": coeffs}

    @classmethod
    def from_json(cls, obj: dict) -> "VirtualCharacter":
        group = STGroup.from_tag(obj["group"])
        coeffs = {}
        for item in obj["coeffs"]:
            lab = parse_label(item["label"], group)
            coeffs[lab] = complex(item.get("re", 0), item.get("im", 0))
        return cls(group, coeffs)

    def __repr__(self):
        parts = [f"{c if c.imag else c.real:g}*{lab}"
                 for lab, c in self.sorted_items()]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# exact class-function algebra

class ClassFunction:
    """Class function with an exact finite-dimensional representation.

    U1 functions are Laurent series in u = e^{i theta} (dict m -> coeff);
    the other groups carry a ChebPoly in the cosine coordinates, NU1
    additionally the value on the sigma class.  Sums, products and powers
    stay exact, so decomposition into irreducibles is a triangular
    elimination with no quadrature involved.
    """

    def __init__(self, group: STGroup, poly: ChebPoly | None = None,
                 laurent: dict[int, complex] | None = None, sigma_value=0):
        self.group = group
        if group is STGroup.U1:
            self.laurent = {m: c for m, c in (laurent or {}).items() if c != 0}
            self.poly = None
        else:
            self.poly = poly if poly is not None else ChebPoly.const(0)
            self.laurent = None
        self.sigma_value = sigma_value if group is STGroup.NU1 else 0

    @classmethod
    def zero(cls, group: STGroup) -> "ClassFunction":
        return cls(group, poly=ChebPoly.const(0), laurent={})

    @classmethod
    def constant(cls, group: STGroup, v) -> "ClassFunction":
        if group is STGroup.U1:
            return cls(group, laurent={0: v})
        return cls(group, poly=ChebPoly.const(v), sigma_value=v)

    @classmethod
    def from_label(cls, label: CharLabel) -> "ClassFunction":
        g = label.group
        if label.family == "nu":
            return cls(g, laurent={label.indices[0]: 1})
        if label.family == "triv":
            return cls(g, poly=ChebPoly.const(1), sigma_value=1)
        if label.family == "sign":
            return cls(g, poly=ChebPoly.const(1), sigma_value=-1)
        if label.family == "rho":
            return cls(g, poly=D(label.indices[0]), sigma_value=0)
        return cls(g, poly=char_poly(label))

    def _require_same_group(self, other: "ClassFunction"):
        if self.group is not other.group:
            raise GroupMismatch("class functions live on different groups")

    def __add__(self, other):
        if not isinstance(other, ClassFunction):
            other = ClassFunction.constant(self.group, other)
        self._require_same_group(other)
        if self.group is STGroup.U1:
            lt = dict(self.laurent)
            for m, c in other.laurent.items():
                lt[m] = lt.get(m, 0) + c
            return ClassFunction(self.group, laurent=lt)
        return ClassFunction(self.group, poly=self.poly + other.poly,
                             sigma_value=self.sigma_value + other.sigma_value)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ClassFunction):
            other = ClassFunction.constant(self.group, other)
        return self + other * (-1)

    def __mul__(self, other):
        if not isinstance(other, ClassFunction):
            if self.group is STGroup.U1:
                return ClassFunction(
                    self.group,
                    laurent={m: c * other for m, c in self.laurent.items()})
            return ClassFunction(self.group, poly=self.poly * other,
                                 sigma_value=self.sigma_value * other)
        self._require_same_group(other)
        if self.group is STGroup.U1:
            lt = {}
            for m1, c1 in self.laurent.items():
                for m2, c2 in other.laurent.items():
                    lt[m1 + m2] = lt.get(m1 + m2, 0) + c1 * c2
            return ClassFunction(self.group, laurent=lt)
        return ClassFunction(self.group, poly=self.poly * other.poly,
                             sigma_value=self.sigma_value * other.sigma_value)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ClassFunction":
        out = ClassFunction.constant(self.group, 1)
        for _ in range(n):
            out = out * self
        return out

    def evaluate(self, grid: ClassGrid) -> np.ndarray:
        if self.group is not grid.group:
            raise GroupMismatch("function evaluated on wrong group")
        if self.group is STGroup.U1:
            th = grid.angles[:, 0]
            out = np.zeros(len(grid), dtype=np.complex128)
            for m, c in self.laurent.items():
                out += c * np.exp(1j * m * th)
            return out
        x = 2.0 * np.cos(grid.angles[:, 0])
        y = (2.0 * np.cos(grid.angles[:, 1])
             if grid.angles.shape[1] == 2 else None)
        out = self.poly.eval(x, y)
        if self.group is STGroup.NU1:
            out = np.where(grid.sigma, complex(self.sigma_value), out)
        return out

    def __call__(self, grid: ClassGrid) -> np.ndarray:
        return self.evaluate(grid)

    # -- exact decomposition ------------------------------------------------

    def to_vchar(self) -> VirtualCharacter:
        """Exact decomposition into irreducible labels."""
        g = self.group
        if g is STGroup.U1:
            return VirtualCharacter(
                g, {CharLabel(g, "nu", (m,)): c for m, c in self.laurent.items()})
        if g is STGroup.SU2:
            coeffs = _reduce_1var(self.poly, S)
            return VirtualCharacter(
                g, {CharLabel(g, "chi", (k,)): c for k, c in coeffs.items()})
        if g is STGroup.NU1:
            dcoef = _reduce_1var(self.poly, D)
            rho = {CharLabel(g, "rho", (k,)): c
                   for k, c in dcoef.items() if k >= 1}
            c0 = dcoef.get(0, 0) * 2  # D_0 = 2: constant part of the poly
            sv = self.sigma_value
            rho[CharLabel(g, "triv")] = (c0 + sv) / 2
            rho[CharLabel(g, "sign")] = (c0 - sv) / 2
            return VirtualCharacter(g, rho)
        if g is STGroup.SU2xSU2:
            return VirtualCharacter(g, _reduce_box(self.poly))
        return VirtualCharacter(g, _reduce_usp4(self.poly))


def _half_int(c):
    """Return an int when exactly representable (keeps decompositions exact)."""
    if isinstance(c, complex):
        return c
    if isinstance(c, float):
        return int(c) if c == int(c) else c
    return c


def _reduce_1var(poly: ChebPoly, family) -> dict[int, complex]:
    """Expand a univariate poly over the monic family S or D (leading term 1)."""
    assert poly.deg_y == 0
    out = {}
    p = poly
    while not p.is_zero():
        k = p.deg_x
        lead = p.c[k, 0]
        if k == 0:
            base = family(0).c[0, 0]  # 1 for S, 2 for D
            out[0] = _half_int(lead / base if base != 1 else lead)
            break
        out[k] = lead
        p = p - family(k) * lead
    return {k: c for k, c in out.items() if c != 0}


def _reduce_box(poly: ChebPoly) -> dict[CharLabel, complex]:
    out = {}
    p = poly
    guard = 0
    while not p.is_zero():
        guard += 1
        assert guard < 10000, "box reduction failed to terminate"
        best = max(p.monomials(), key=lambda t: (t[0], t[1]))
        a, b, v = best
        lab = CharLabel(STGroup.SU2xSU2, "box", (a, b))
        out[lab] = out.get(lab, 0) + v
        p = p - char_poly(lab) * v
    return {k: c for k, c in out.items() if c != 0}


def _reduce_usp4(poly: ChebPoly) -> dict[CharLabel, complex]:
    if not poly.is_symmetric():
        raise ValueError("USp4 class functions must be symmetric in (x, y)")
    out = {}
    p = poly
    guard = 0
    while not p.is_zero():
        guard += 1
        assert guard < 10000, "USp4 reduction failed to terminate"
        a, b, v = max(p.monomials(), key=lambda t: (t[0] + t[1], t[0]))
        assert a >= b, "nonsymmetric remainder in USp4 reduction"
        lab = CharLabel(STGroup.USp4, "chi2", (a, b))
        out[lab] = out.get(lab, 0) + v
        p = p - char_poly(lab) * v
    return {k: c for k, c in out.items() if c != 0}


# ---------------------------------------------------------------------------
# moment and power-sum families

def moment_function(k: int, group: STGroup) -> ClassFunction:
    """The coefficient character a_k (k-th exterior power trace) as a function."""
    if k == 1:
        if group is STGroup.U1:
            return ClassFunction(group, laurent={1: 1, -1: 1})
        if group.genus == 1:
            return ClassFunction(group, poly=ChebPoly.x(), sigma_value=0)
        return ClassFunction(group, poly=ChebPoly.x() + ChebPoly.y())
    if k == 2:
        if group.genus == 1:
            # Lambda^2 of the symplectic 2-dim representation is trivial
            return ClassFunction.constant(group, 1)
        return ClassFunction(group, poly=ChebPoly.x() * ChebPoly.y() + 2)
    raise ValueError("only k in {1, 2} is supported")


def power_sum_function(n: int, k: int, group: STGroup) -> ClassFunction:
    """s_n^k: the a_k character evaluated on n-th powers of classes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if k == 2:
        if group.genus == 1:
            return ClassFunction.constant(group, 1)
        return ClassFunction(group, poly=D(n) * D(n).swap_xy() + 2)
    if k != 1:
        raise ValueError("only k in {1, 2} is supported")
    if group is STGroup.U1:
        return ClassFunction(group, laurent={n: 1, -n: 1})
    if group is STGroup.SU2:
        return ClassFunction(group, poly=D(n))
    if group is STGroup.NU1:
        if n % 2 == 1:
            sv = 0
        else:
            sv = 2 * (-1) ** (n // 2)  # a_1 at the class of sigma^n
        return ClassFunction(group, poly=D(n), sigma_value=sv)
    return ClassFunction(group, poly=D(n) + D(n).swap_xy())


def moment_char(k: int, n: int, group: STGroup
                ) -> tuple[ClassFunction, VirtualCharacter]:
    """a_k^n as an evaluable together with its exact decomposition."""
    fn = moment_function(k, group) ** n
    return fn, fn.to_vchar()


def power_sum_char(k: int, n: int, group: STGroup
                   ) -> tuple[ClassFunction, VirtualCharacter]:
    """s_n^k as an evaluable together with its exact decomposition."""
    fn = power_sum_function(n, k, group)
    return fn, fn.to_vchar()


# ---------------------------------------------------------------------------
# quadrature

class Quadrature:
    """Weighted nodes integrating the Haar class measure of a group."""

    def __init__(self, group: STGroup, grid: ClassGrid, weights: np.ndarray):
        self.group = group
        self.grid = grid
        self.weights = weights

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.dot(self.weights, values))

    def integrate_f(self, f) -> complex:
        return self.integrate(values_on(f, self.grid))

    def inner(self, fv: np.ndarray, gv: np.ndarray) -> complex:
        """<f, g> = integral of f * conj(g)."""
        return complex(np.dot(self.weights, fv * np.conjugate(gv)))


@functools.lru_cache(maxsize=None)
def quadrature(group: STGroup, nodes: int = QUAD_NODES) -> Quadrature:
    """Gauss-Legendre scheme with `nodes` points per angle dimension.

    U1 duplicates the nodes with signed angles so that single exponentials
    nu_m integrate correctly; NU1 appends the sigma atom of mass 1/2.
    """
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    t = (xg + 1.0) * (math.pi / 2.0)
    w = wg * (math.pi / 2.0)
    if group is STGroup.U1:
        ang = np.concatenate([t, -t])[:, None]
        ww = np.concatenate([w, w]) / (2.0 * math.pi)
        return Quadrature(group, ClassGrid(group, ang), ww)
    if group is STGroup.NU1:
        ang = np.concatenate([t, [0.0]])[:, None]
        sigma = np.zeros(nodes + 1, dtype=bool)
        sigma[-1] = True
        ww = np.concatenate([w / (2.0 * math.pi), [0.5]])
        return Quadrature(group, ClassGrid(group, ang, sigma), ww)
    if group is STGroup.SU2:
        ww = w * (2.0 / math.pi) * np.sin(t) ** 2
        return Quadrature(group, ClassGrid(group, t[:, None]), ww)
    A, B = np.meshgrid(t, t, indexing="ij")
    WA, WB = np.meshgrid(w, w, indexing="ij")
    ang = np.stack([A.ravel(), B.ravel()], axis=1)
    if group is STGroup.SU2xSU2:
        dens = (2.0 / math.pi) ** 2 * np.sin(A) ** 2 * np.sin(B) ** 2
    else:
        dens = (8.0 / math.pi ** 2) * (np.cos(A) - np.cos(B)) ** 2 \
            * np.sin(A) ** 2 * np.sin(B) ** 2
    ww = (WA * WB * dens).ravel()
    return Quadrature(group, ClassGrid(group, ang), ww)


def values_on(f, grid: ClassGrid) -> np.ndarray:
    """Evaluate a label / virtual character / class function / callable."""
    if isinstance(f, CharLabel):
        return label_values(f, grid)
    if isinstance(f, (VirtualCharacter, ClassFunction)):
        return f.evaluate(grid)
    if callable(f):
        return np.asarray(f(grid), dtype=np.complex128)
    return np.full(len(grid), complex(f))


# ---------------------------------------------------------------------------
# numeric decomposition and allied quantities

def trivial_multiplicity(group: STGroup, f, nodes: int = QUAD_NODES):
    """Haar mean of f, integer-rounded when within tolerance."""
    q = quadrature(group, nodes)
    v = q.integrate_f(f)
    return _round_coeff(v)


def _round_coeff(c: complex):
    re = round(c.real)
    im = round(c.imag)
    if abs(c.real - re) < ROUND_TOL and abs(c.imag - im) < ROUND_TOL:
        return complex(re, im) if im else complex(re)
    return c


@dataclass
class Decomposition:
    """Result of a numeric decomposition: coefficients and L^2 residual."""

    vchar: VirtualCharacter
    residual: float
    rounded: bool = True

    def coeff_map(self) -> dict[str, complex]:
        return {str(lab): c for lab, c in self.vchar.sorted_items()}


def decompose_numeric(group: STGroup, f, max_index: int,
                      nodes: int = QUAD_NODES,
                      residual_tol: float = RESIDUAL_HARD) -> Decomposition:
    """Quadrature inner products against all labels with index <= max_index.

    Coefficients within 1e-6 of an integer pair are rounded; a residual
    above residual_tol means labels beyond max_index are needed and raises
    ResidualTooLarge.
    """
    q = quadrature(group, nodes)
    fv = values_on(f, q.grid)
    coeffs = {}
    rem = fv.astype(np.complex128).copy()
    for lab in labels_up_to(group, max_index):
        lv = label_values(lab, q.grid)
        c = q.inner(fv, lv)
        if abs(c) > 1e-9:
            c = _round_coeff(c)
            coeffs[lab] = c
            rem -= c * lv
        del lv
    residual = float(np.real(q.inner(rem, rem)))
    if residual > residual_tol:
        raise ResidualTooLarge(
            f"residual {residual:.3e} > {residual_tol:.0e}; "
            f"labels beyond index {max_index} needed")
    return Decomposition(VirtualCharacter(group, coeffs), residual)


# ---------------------------------------------------------------------------
# Frobenius-Schur indices

def fs_index_numeric(label: CharLabel, nodes: int = QUAD_NODES) -> float:
    """u_chi = integral of chi(g^2) against Haar measure (quadrature)."""
    q = quadrature(label.group, nodes)
    squared = grid_power(q.grid, 2)
    v = complex(np.dot(q.weights, label_values(label, squared)))
    assert abs(v.imag) < 1e-8
    return v.real


@functools.lru_cache(maxsize=None)
def fs_index(label: CharLabel) -> int:
    """Frobenius-Schur index in {-1, 0, 1}.

    nu_m, chi_n and chi_{m,n} use the closed table (u = 1 iff m = 0 for
    nu_m; (-1)^n; (-1)^{m+n}); the remaining families are settled by the
    quadrature oracle and rounded.
    """
    f = label.family
    if f == "nu":
        return 1 if label.indices[0] == 0 else 0
    if f == "chi":
        return (-1) ** label.indices[0]
    if f == "chi2":
        return (-1) ** (label.indices[0] + label.indices[1])
    u = fs_index_numeric(label)
    r = round(u)
    assert abs(u - r) < ROUND_TOL and r in (-1, 0, 1)
    return int(r)


# ---------------------------------------------------------------------------
# restriction to subgroups

def restrict(obj, subgroup: STGroup) -> ClassFunction:
    """Restriction along the shared class coordinates.

    Supported embeddings: SU2xSU2 in USp4 (same angle pair), and U1 or NU1
    inside SU2 (same angle; the sigma class of NU1 sits at theta = pi/2).
    """
    fn = obj.to_function() if isinstance(obj, VirtualCharacter) else obj
    if not isinstance(fn, ClassFunction):
        raise TypeError("restrict needs a VirtualCharacter or ClassFunction")
    src = fn.group
    if src is STGroup.USp4 and subgroup is STGroup.SU2xSU2:
        return ClassFunction(subgroup, poly=fn.poly)
    if src is STGroup.SU2 and subgroup is STGroup.NU1:
        sv = fn.poly.eval_at(0)  # the sigma class has trace zero in SU2
        return ClassFunction(subgroup, poly=fn.poly, sigma_value=sv)
    if src is STGroup.SU2 and subgroup is STGroup.U1:
        dcoef = _reduce_1var(fn.poly, D)
        lt = {}
        for k, c in dcoef.items():
            if k == 0:
                lt[0] = lt.get(0, 0) + 2 * c  # D_0 = 2
            else:
                lt[k] = lt.get(k, 0) + c
                lt[-k] = lt.get(-k, 0) + c
        return ClassFunction(subgroup, laurent=lt)
    raise ValueError(f"unsupported restriction {src.value} -> {subgroup.value}")


# ---------------------------------------------------------------------------
# constituent statistics for the bound formulas

@dataclass
class ConstituentStats:
    """R (constituent count), C (sum of squared coefficients), and the
    degree/weight of each constituent."""

    R: int
    C: float
    constituents: list[tuple[CharLabel, complex, int, int]] = field(
        default_factory=list)  # (label, coeff, degree, weight)


def rc_stats(vchar: VirtualCharacter) -> ConstituentStats:
    if abs(vchar.trivial_coefficient()) > 0:
        raise TrivialPresent("rc_stats needs a character without trivial part")
    cons = [(lab, c, lab.degree, lab.weight) for lab, c in vchar.sorted_items()]
    C = float(sum(abs(c) ** 2 for _, c, _, _ in cons))
    return ConstituentStats(R=len(cons), C=C, constituents=cons)
