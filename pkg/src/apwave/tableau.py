"""Double Butcher tableaux for implicit-explicit Runge-Kutta stepping.

A pair of s-stage tableaux drives the time integrator: a strictly lower
triangular explicit matrix for the advective terms and a lower triangular
diagonally-implicit matrix for the stiff acoustic terms.  Only tableaux whose
implicit matrix is invertible (type A) or has the zero-first-row/column
structure with an invertible trailing block (type CK) are admitted; the
stepper relies on that structure for its stage solves.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

BUILTIN_NAMES = ("EULER111", "ARS222")


class TableauType(enum.Enum):
    TYPE_A = "type-A"
    TYPE_CK = "type-CK"
    OTHER = "other"


@dataclass(frozen=True)
class IMEXTableau:
    """Immutable pair of explicit/implicit Butcher tableaux.

    The explicit matrix must be strictly lower triangular, the implicit one
    lower triangular (diagonally implicit).  Both are stored padded to the
    same stage count s; vectors c and w carry the abscissae and weights.
    """

    name: str
    a_explicit: np.ndarray
    a_implicit: np.ndarray
    c_explicit: np.ndarray
    c_implicit: np.ndarray
    w_explicit: np.ndarray
    w_implicit: np.ndarray

    def __post_init__(self):
        for attr in ("a_explicit", "a_implicit", "c_explicit", "c_implicit",
                     "w_explicit", "w_implicit"):
            arr = np.asarray(getattr(self, attr), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        s = self.a_implicit.shape[0]
        if self.a_implicit.shape != (s, s) or self.a_explicit.shape != (s, s):
            raise ConfigurationError(
                f"tableau {self.name!r}: coefficient matrices must be {s}x{s}")
        for vec in (self.c_explicit, self.c_implicit, self.w_explicit, self.w_implicit):
            if vec.shape != (s,):
                raise ConfigurationError(
                    f"tableau {self.name!r}: coefficient vectors must have length {s}")
        if np.any(np.triu(self.a_explicit) != 0.0):
            raise ConfigurationError(
                f"tableau {self.name!r}: explicit matrix must be strictly lower triangular")
        if np.any(np.triu(self.a_implicit, k=1) != 0.0):
            raise ConfigurationError(
                f"tableau {self.name!r}: implicit matrix must be lower triangular")

    @property
    def s(self) -> int:
        """Stage count."""
        return self.a_implicit.shape[0]


def classify(tableau: IMEXTableau) -> TableauType:
    """Classify the implicit matrix as type A, type CK, or other.

    Type A: A invertible (nonzero diagonal, as A is lower triangular).
    Type CK: s >= 2, zero first row and a trailing (s-1)x(s-1) invertible
    block; the first column below the corner is unconstrained.
    """
    a = tableau.a_implicit
    diag = np.abs(np.diagonal(a))
    if np.all(diag > 0.0):
        return TableauType.TYPE_A
    s = tableau.s
    if s >= 2 and np.all(a[0, :] == 0.0) and np.all(diag[1:] > 0.0):
        return TableauType.TYPE_CK
    return TableauType.OTHER


@dataclass(frozen=True)
class OrderCondition:
    name: str
    value: float
    target: float

    @property
    def residual(self) -> float:
        return abs(self.value - self.target)

    def satisfied(self, tol: float = 1e-13) -> bool:
        return self.residual <= tol


@dataclass(frozen=True)
class OrderConditionReport:
    order: int
    conditions: tuple[OrderCondition, ...]
    # Coupling conditions are reported but do not gate validity; the pure
    # per-tableau conditions do.
    gating: tuple[str, ...] = field(default=())

    def all_satisfied(self, tol: float = 1e-13) -> bool:
        return all(c.satisfied(tol) for c in self.conditions)

    def gating_satisfied(self, tol: float = 1e-13) -> bool:
        return all(c.satisfied(tol) for c in self.conditions if c.name in self.gating)

    def violations(self, tol: float = 1e-13) -> list[OrderCondition]:
        return [c for c in self.conditions if not c.satisfied(tol)]


def check_order_conditions(tableau: IMEXTableau, order: int) -> OrderConditionReport:
    """Evaluate the classical order conditions up to the requested order.

    Order 1 requires both weight vectors to sum to one.  Order 2 adds the
    quadrature conditions w.c = 1/2 for each tableau plus the two mixed
    couplings pairing explicit weights with implicit abscissae and vice
    versa.  Orders above 2 are not supported.
    """
    if order not in (1, 2):
        raise ConfigurationError(f"unsupported order {order}; only 1 and 2 are checked")
    wt, w = tableau.w_explicit, tableau.w_implicit
    ct, c = tableau.c_explicit, tableau.c_implicit
    conditions = [
        OrderCondition("sum(w_explicit) = 1", float(np.sum(wt)), 1.0),
        OrderCondition("sum(w_implicit) = 1", float(np.sum(w)), 1.0),
    ]
    gating = ["sum(w_explicit) = 1", "sum(w_implicit) = 1"]
    if order == 2:
        conditions += [
            OrderCondition("w_explicit . c_explicit = 1/2", float(wt @ ct), 0.5),
            OrderCondition("w_implicit . c_implicit = 1/2", float(w @ c), 0.5),
            OrderCondition("w_explicit . c_implicit = 1/2 (mixed)", float(wt @ c), 0.5),
            OrderCondition("w_implicit . c_explicit = 1/2 (mixed)", float(w @ ct), 0.5),
        ]
        gating += ["w_explicit . c_explicit = 1/2", "w_implicit . c_implicit = 1/2"]
    return OrderConditionReport(order=order, conditions=tuple(conditions),
                                gating=tuple(gating))


def _euler111() -> IMEXTableau:
    # Forward/backward Euler pair: one stage, first order.
    return IMEXTableau(
        name="EULER111",
        a_explicit=np.array([[0.0]]),
        a_implicit=np.array([[1.0]]),
        c_explicit=np.array([0.0]),
        c_implicit=np.array([1.0]),
        w_explicit=np.array([1.0]),
        w_implicit=np.array([1.0]),
    )


def _ars222() -> IMEXTableau:
    # Second order, stiffly accurate; gamma = 1 - 1/sqrt(2), delta = 1 - 1/(2 gamma).
    # The explicit tableau is padded to the implicit stage count with a zero
    # third column (its own stage value never feeds a later explicit term).
    gamma = 1.0 - 1.0 / math.sqrt(2.0)
    delta = 1.0 - 1.0 / (2.0 * gamma)
    return IMEXTableau(
        name="ARS222",
        a_explicit=np.array([
            [0.0, 0.0, 0.0],
            [gamma, 0.0, 0.0],
            [delta, 1.0 - delta, 0.0],
        ]),
        a_implicit=np.array([
            [0.0, 0.0, 0.0],
            [0.0, gamma, 0.0],
            [0.0, 1.0 - gamma, gamma],
        ]),
        c_explicit=np.array([0.0, gamma, 1.0]),
        c_implicit=np.array([0.0, gamma, 1.0]),
        w_explicit=np.array([delta, 1.0 - delta, 0.0]),
        w_implicit=np.array([0.0, 1.0 - gamma, gamma]),
    )


_BUILDERS = {"EULER111": _euler111, "ARS222": _ars222}
_EXPECTED_ORDER = {"EULER111": 1, "ARS222": 2}


def builtin_tableau(name: str) -> IMEXTableau:
    """Return a named builtin tableau, cross-checked on construction.

    Raises ConfigurationError for unknown names, and asserts that the
    constructed tableau is of type A or CK and satisfies its nominal order
    conditions, so the stepper can take both for granted.
    """
    key = name.upper()
    if key not in _BUILDERS:
        raise ConfigurationError(
            f"unknown tableau {name!r}; available: {', '.join(BUILTIN_NAMES)}")
    tab = _BUILDERS[key]()
    kind = classify(tab)
    if kind is TableauType.OTHER:
        raise ConfigurationError(f"builtin tableau {name!r} failed type-A/CK classification")
    report = check_order_conditions(tab, _EXPECTED_ORDER[key])
    if not report.gating_satisfied(1e-13):
        bad = ", ".join(c.name for c in report.violations())
        raise ConfigurationError(f"builtin tableau {name!r} violates order conditions: {bad}")
    return tab
