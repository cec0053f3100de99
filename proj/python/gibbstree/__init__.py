"""Splitting Gibbs measures of the (2,q)-Ising-Potts model on Cayley trees."""

import json

from . import _gibbstree
from ._gibbstree import (
    OracleSizeError,
    count_quartic_positive_roots,
    count_roots,
    quartic_coefficients,
    quartic_thresholds,
)

__all__ = [
    "OracleSizeError",
    "apply_W",
    "case2_critical_points",
    "classify",
    "classify_case2",
    "count_quartic_positive_roots",
    "count_roots",
    "is_fixed_point",
    "params",
    "quartic_coefficients",
    "quartic_thresholds",
    "solve_case1",
    "verify",
]


def params(q=3, k=2, alpha=0.0, beta=1.0, J_I=0.0, J_P=0.0):
    """Model parameters as the JSON document the core expects."""
    return json.dumps({"q": q, "k": k, "alpha": alpha, "beta": beta, "J_I": J_I, "J_P": J_P})


def _doc(p):
    return p if isinstance(p, str) else json.dumps(p)


def classify(p, dedup_tol=1e-9, form="derived"):
    return json.loads(_gibbstree.classify(_doc(p), dedup_tol, form))


def classify_case2(a, dedup_tol=1e-9, form="derived"):
    return json.loads(_gibbstree.classify_case2(a, dedup_tol, form))


def case2_critical_points(lo=1.1, hi=10.0, tol=1e-4, form="derived"):
    return json.loads(_gibbstree.case2_critical_points(lo, hi, tol, form))


def verify(p, depth=2, perturb=1.0):
    return json.loads(_gibbstree.verify(_doc(p), depth, perturb))


def solve_case1(p):
    return _gibbstree.solve_case1(_doc(p))


def apply_W(p, z):
    return _gibbstree.apply_W(_doc(p), list(z))


def is_fixed_point(p, z, tol=1e-9):
    return _gibbstree.is_fixed_point(_doc(p), list(z), tol)
