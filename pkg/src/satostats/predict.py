"""Predicted convergence quantities from user-supplied ranks and zeros.

The limit of the asymptotic L^2-norm splits as I = I1 + I2 with

    I1 = |sum_chi c_chi (2 r_chi + u_chi)|^2,
    I2 = sum_chi sum_{gamma_chi > 0} 2 |c_chi|^2 / (1/4 + gamma_chi^2),

where r_chi is the analytic rank of L(chi, s) at the central point, u_chi
the Frobenius-Schur index, and gamma_chi the positive ordinates of the
critical-line zeros.  Ranks and zero lists are inputs, never computed
here.  The bound formulas carry absolute constants K1..K6 that are not
pinned down anywhere; they default to 1 and are reported explicitly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import chars
from .chars import CharLabel, VirtualCharacter
from .errors import CMConstraintViolation, MissingRank
from .stgroup import STGroup


@dataclass
class RankProfile:
    """Analytic ranks r_chi per character label (r_chi = r_chibar)."""

    ranks: dict[CharLabel, int] = field(default_factory=dict)

    def __post_init__(self):
        for lab, r in self.ranks.items():
            if r < 0:
                raise ValueError(f"negative rank for {lab}")
            dual = lab.dual()
            if dual in self.ranks and self.ranks[dual] != r:
                raise ValueError(f"rank mismatch r({lab}) != r({dual})")

    def get(self, label: CharLabel) -> int:
        if label in self.ranks:
            return self.ranks[label]
        dual = label.dual()
        if dual in self.ranks:
            return self.ranks[dual]
        raise MissingRank(f"no rank supplied for {label}")

    @classmethod
    def from_json(cls, obj, group: STGroup) -> "RankProfile":
        """[{"label": "chi_1", "rank": 2}, ...] or {"chi_1": 2, ...}."""
        ranks = {}
        items = obj.items() if isinstance(obj, dict) else \
            ((e["label"], e["rank"]) for e in obj)
        for key, val in items:
            ranks[chars.parse_label(key, group)] = int(val)
        return cls(ranks)


@dataclass
class ZeroList:
    """Positive ordinates of critical-line zeros per label, ascending."""

    zeros: dict[CharLabel, list[float]] = field(default_factory=dict)

    def __post_init__(self):
        for lab, gs in self.zeros.items():
            if any(g <= 0 for g in gs):
                raise ValueError(f"ordinates must be positive for {lab}")
            if sorted(gs) != list(gs):
                raise ValueError(f"ordinates must be ascending for {lab}")

    def get(self, label: CharLabel) -> list[float]:
        return self.zeros.get(label, self.zeros.get(label.dual(), []))


def read_zero_file(path, label: CharLabel) -> ZeroList:
    """Plain text, one positive ordinate per line; negatives are implied by
    selfduality (the factor 2 in i2)."""
    gs = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                gs.append(float(line))
    return ZeroList({label: sorted(gs)})


# ---------------------------------------------------------------------------
# the limit formulas

def i1(vchar: VirtualCharacter, ranks: RankProfile) -> float:
    """|sum_chi c_chi (2 r_chi + u_chi)|^2."""
    total = 0j
    for lab, c in vchar.coeffs.items():
        total += c * (2 * ranks.get(lab) + chars.fs_index(lab))
    return abs(total) ** 2


def bias_prediction(vchar: VirtualCharacter, ranks: RankProfile) -> complex:
    """Predicted log-average of psi: -sum_chi c_chi (2 r_chi + u_chi)."""
    total = 0j
    for lab, c in vchar.coeffs.items():
        total += c * (2 * ranks.get(lab) + chars.fs_index(lab))
    return -total


def i2(vchar: VirtualCharacter, zeros: ZeroList) -> float:
    """sum over constituents and positive ordinates of 2|c|^2/(1/4+gamma^2).

    Zero lists are finite truncations, so this is a lower estimate whose
    missing tail is unknown; pair it with i2_truncation_info for reporting.
    """
    total = 0.0
    for lab, c in vchar.coeffs.items():
        for g in zeros.get(lab):
            total += 2.0 * abs(c) ** 2 / (0.25 + g * g)
    return total


def i2_truncation_info(vchar: VirtualCharacter, zeros: ZeroList) -> dict:
    """Largest ordinate used per constituent (None when no zeros given)."""
    out = {}
    for lab in vchar.coeffs:
        gs = zeros.get(lab)
        out[str(lab)] = gs[-1] if gs else None
    return out


_A1CUBED_OFFSETS = {
    "nonCM-overQ": -3,
    "CM-overQ": -4,
    "nonCM-overK": -3,
    "CM-overK": 0,
}


def i1_formula_a1cubed(kind: str, r: int, r_sym3: int) -> float:
    """Closed forms of I1 for the cube of the trace character.

    kind selects the constellation: elliptic curve without CM over Q or
    over a quadratic field (offset -3), CM curve over Q (offset -4), CM
    curve over its CM field (offset 0):  (4 r + 2 r_sym3 + offset)^2.
    """
    if kind not in _A1CUBED_OFFSETS:
        raise ValueError(f"unknown kind {kind!r}; one of {sorted(_A1CUBED_OFFSETS)}")
    if r < 0 or r_sym3 < 0:
        raise ValueError("ranks must be nonnegative")
    return float((4 * r + 2 * r_sym3 + _A1CUBED_OFFSETS[kind]) ** 2)


# ---------------------------------------------------------------------------
# bound machinery

@dataclass
class BoundInputs:
    """Inputs of the explicit upper bounds (constants default to 1)."""

    d_chi: int = 1
    field_degree: int = 1
    conductor_norm: float = 1.0
    weight: int = 1
    K: dict[int, float] = field(default_factory=dict)
    T: float = 0.0

    def k(self, i: int) -> float:
        return float(self.K.get(i, 1.0))


def s_bound(inputs: BoundInputs) -> float:
    """S_chi = d_chi [k:Q] log(N (w_chi + 3))."""
    return inputs.d_chi * inputs.field_degree * math.log(
        inputs.conductor_norm * (inputs.weight + 3))


def zero_count_bound(inputs: BoundInputs) -> float:
    """m(chi, T) <= K4 d_chi [k:Q] log(N (T + 5) (w_chi + 3))."""
    return inputs.k(4) * inputs.d_chi * inputs.field_degree * math.log(
        inputs.conductor_norm * (inputs.T + 5.0) * (inputs.weight + 3))


def upper_bound(R: float, S: float, C: float, K6: float = 1.0) -> float:
    """I(phi) <= K6 R_phi S_phi^2 C_phi."""
    return K6 * R * S * S * C


def upper_bound_for(vchar: VirtualCharacter, inputs: BoundInputs) -> dict:
    """Cor-style bound of I for a virtual character without trivial part.

    S_phi = max over constituents of S_chi with per-label degree/weight;
    returns the pieces so reports can show the symbolic K dependence.
    """
    st = chars.rc_stats(vchar)
    s_phi = 0.0
    for lab, _, d, w in st.constituents:
        s_phi = max(s_phi, s_bound(BoundInputs(
            d_chi=d, field_degree=inputs.field_degree,
            conductor_norm=inputs.conductor_norm, weight=w)))
    val = upper_bound(st.R, s_phi, st.C, inputs.k(6))
    return {"R": st.R, "C": st.C, "S": s_phi, "K6": inputs.k(6),
            "bound": val, "formula": "K6 * R * S^2 * C"}


# ---------------------------------------------------------------------------
# rank bookkeeping for quadratic base change

def rank_base_change(r_e: int, r_twist: int, r_sym3_e: int = 0,
                     r_sym3_twist: int = 0, cm_by_k: bool = False
                     ) -> tuple[int, int]:
    """(r over K, r of the symmetric cube over K) after base change.

    Generic case: ranks add over the curve and its quadratic twist.  When
    the curve has CM by the (imaginary) field itself the twist is
    isogenous to the curve, the ranks double, and r_sym3 >= r must hold.
    """
    if min(r_e, r_twist, r_sym3_e, r_sym3_twist) < 0:
        raise ValueError("ranks must be nonnegative")
    if cm_by_k:
        rk, rs = 2 * r_e, 2 * r_sym3_e
        if rs < rk:
            raise CMConstraintViolation(
                f"CM base change needs r_sym3 ({rs}) >= r ({rk})")
        return rk, rs
    return r_e + r_twist, r_sym3_e + r_sym3_twist


def load_rank_file(path, group: STGroup) -> RankProfile:
    with open(path) as fh:
        obj = json.load(fh)
    return RankProfile.from_json(obj, group)
