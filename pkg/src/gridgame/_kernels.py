"""Hot numeric kernels: susceptance assembly, per-island reduced solves and
branch-flow recovery.

Two interchangeable implementations: numba @njit kernels (default when numba
imports) and pure numpy. Select with GRIDGAME_BACKEND=numba|numpy|auto.
The game's hot path is thousands of small dense solves (the greedy baseline
simulates every line disconnection each step), where per-call overhead
dominates; the numba path exists for that regime. Grids above
_DENSE_LIMIT buses take the scipy sparse route regardless of backend.
"""
from __future__ import annotations

import os

import numpy as np

_DENSE_LIMIT = 512


def _pick_backend() -> str:
    choice = os.environ.get("GRIDGAME_BACKEND", "auto").lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"GRIDGAME_BACKEND must be auto|numba|numpy, got {choice}")
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _pick_backend()


# --- pure numpy -------------------------------------------------------------

def _assemble_numpy(n_buses, from_bus, to_bus, reactance, active):
    b = np.where(active, 1.0 / reactance, 0.0)
    mat = np.zeros((n_buses, n_buses))
    np.add.at(mat, (from_bus, from_bus), b)
    np.add.at(mat, (to_bus, to_bus), b)
    np.add.at(mat, (from_bus, to_bus), -b)
    np.add.at(mat, (to_bus, from_bus), -b)
    return mat


def _solve_islands_numpy(mat, p_pu, labels, ref_of_comp):
    theta = np.zeros(len(p_pu))
    singular = False
    for comp, ref in enumerate(ref_of_comp):
        if ref < 0:
            continue
        keep = np.flatnonzero((labels == comp) & (np.arange(len(p_pu)) != ref))
        if keep.size == 0:
            continue
        try:
            theta[keep] = np.linalg.solve(mat[np.ix_(keep, keep)], p_pu[keep])
        except np.linalg.LinAlgError:
            singular = True
    return theta, singular


def _flows_numpy(theta, from_bus, to_bus, reactance, active, base_mva):
    flow = base_mva * (theta[from_bus] - theta[to_bus]) / reactance
    return np.where(active, flow, 0.0)


# --- numba ------------------------------------------------------------------

if BACKEND == "numba":
    from numba import njit

    @njit(cache=True)
    def _assemble_nb(n_buses, from_bus, to_bus, reactance, active):
        mat = np.zeros((n_buses, n_buses))
        for i in range(from_bus.shape[0]):
            if not active[i]:
                continue
            b = 1.0 / reactance[i]
            f, t = from_bus[i], to_bus[i]
            mat[f, f] += b
            mat[t, t] += b
            mat[f, t] -= b
            mat[t, f] -= b
        return mat

    @njit(cache=True)
    def _gauss_solve(a, x):
        # in-place partial-pivot elimination; returns False on zero pivot
        n = a.shape[0]
        for col in range(n):
            piv = col
            best = abs(a[col, col])
            for r in range(col + 1, n):
                v = abs(a[r, col])
                if v > best:
                    best = v
                    piv = r
            if best < 1e-12:
                return False
            if piv != col:
                for c in range(col, n):
                    a[col, c], a[piv, c] = a[piv, c], a[col, c]
                x[col], x[piv] = x[piv], x[col]
            inv = 1.0 / a[col, col]
            for r in range(col + 1, n):
                factor = a[r, col] * inv
                if factor != 0.0:
                    for c in range(col, n):
                        a[r, c] -= factor * a[col, c]
                    x[r] -= factor * x[col]
        for col in range(n - 1, -1, -1):
            acc = x[col]
            for c in range(col + 1, n):
                acc -= a[col, c] * x[c]
            x[col] = acc / a[col, col]
        return True

    @njit(cache=True)
    def _solve_islands_nb(mat, p_pu, labels, ref_of_comp):
        n = p_pu.shape[0]
        theta = np.zeros(n)
        singular = False
        for comp in range(ref_of_comp.shape[0]):
            ref = ref_of_comp[comp]
            if ref < 0:
                continue
            size = 0
            for i in range(n):
                if labels[i] == comp and i != ref:
                    size += 1
            if size == 0:
                continue
            keep = np.empty(size, dtype=np.int64)
            k = 0
            for i in range(n):
                if labels[i] == comp and i != ref:
                    keep[k] = i
                    k += 1
            sub = np.empty((size, size))
            rhs = np.empty(size)
            for r in range(size):
                rhs[r] = p_pu[keep[r]]
                for c in range(size):
                    sub[r, c] = mat[keep[r], keep[c]]
            if _gauss_solve(sub, rhs):
                for r in range(size):
                    theta[keep[r]] = rhs[r]
            else:
                singular = True
        return theta, singular

    @njit(cache=True)
    def _flows_nb(theta, from_bus, to_bus, reactance, active, base_mva):
        out = np.zeros(from_bus.shape[0])
        for i in range(from_bus.shape[0]):
            if active[i]:
                out[i] = (
                    base_mva * (theta[from_bus[i]] - theta[to_bus[i]]) / reactance[i]
                )
        return out

    def assemble_matrix(n_buses, from_bus, to_bus, reactance, active):
        return _assemble_nb(
            n_buses, from_bus, to_bus, reactance, active.astype(np.bool_)
        )

    def solve_islands(mat, p_pu, labels, ref_of_comp):
        return _solve_islands_nb(
            mat,
            np.ascontiguousarray(p_pu),
            np.ascontiguousarray(labels),
            np.ascontiguousarray(ref_of_comp),
        )

    def branch_flows(theta, from_bus, to_bus, reactance, active, base_mva):
        return _flows_nb(
            theta, from_bus, to_bus, reactance, active.astype(np.bool_), base_mva
        )

else:
    assemble_matrix = _assemble_numpy
    solve_islands = _solve_islands_numpy
    branch_flows = _flows_numpy


def solve_islands_sparse(mat, p_pu, labels, ref_of_comp):
    """scipy splu route for grids past the dense cutoff."""
    from scipy.sparse import csc_matrix
    from scipy.sparse.linalg import splu

    theta = np.zeros(len(p_pu))
    singular = False
    for comp, ref in enumerate(ref_of_comp):
        if ref < 0:
            continue
        keep = np.flatnonzero((labels == comp) & (np.arange(len(p_pu)) != ref))
        if keep.size == 0:
            continue
        try:
            lu = splu(csc_matrix(mat[np.ix_(keep, keep)]))
            theta[keep] = lu.solve(p_pu[keep])
        except RuntimeError:
            singular = True
    return theta, singular
