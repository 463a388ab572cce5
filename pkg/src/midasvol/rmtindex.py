"""Composite indices from the leading eigenvector of a correlation matrix.

Members are standardised with the population standard deviation, their
correlation matrix is diagonalised by cyclic Jacobi rotations, and the
composite is the leading-eigenvector-weighted average of the *raw* member
series, divided by the sum of the weights.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import AlignmentError, ConfigError, DegeneracyError, LengthError, NumericError, ZeroVarianceError
from .timeseries import MonthlySeries, read_monthly_csv

__all__ = [
    "GroupConfig",
    "CorrelationMatrix",
    "Eigenportfolio",
    "standardize",
    "common_range",
    "correlation_matrix",
    "jacobi_eigh",
    "eigen_decompose",
    "eigenportfolio_index",
    "composite_index",
    "load_groups",
    "default_groups",
    "load_panel_dir",
]


@dataclass(frozen=True)
class GroupConfig:
    name: str
    members: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.members) < 2:
            raise ConfigError(f"group {self.name!r} needs at least two members, got {len(self.members)}")
        if len(set(self.members)) != len(self.members):
            raise ConfigError(f"group {self.name!r} lists a member twice")

    def resolve(self, panel: Mapping[str, MonthlySeries]) -> list[MonthlySeries]:
        missing = [m for m in self.members if m not in panel]
        if missing:
            raise ConfigError(f"group {self.name!r}: unknown member label {missing[0]!r}")
        return [panel[m] for m in self.members]


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        n = len(self.labels)
        if v.shape != (n, n):
            raise LengthError(f"correlation matrix must be {n}x{n}, got {v.shape}")
        if not np.array_equal(v, v.T):
            raise NumericError("correlation matrix is not symmetric")
        if not np.all(np.diag(v) == 1.0) or np.any(np.abs(v) > 1.0):
            raise NumericError("correlation matrix needs a unit diagonal and entries in [-1, 1]")
        if n and np.linalg.eigvalsh(v)[0] < -1e-10:
            raise NumericError("correlation matrix is not positive semi-definite")
        v.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class Eigenportfolio:
    labels: tuple[str, ...]
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    leading: np.ndarray
    weights: np.ndarray | None = None
    index: MonthlySeries | None = None
    sweeps: int = 0

    def summary(self) -> dict:
        return {
            "members": list(self.labels),
            "eigenvalues": self.eigenvalues.tolist(),
            "leading_vector": self.leading.tolist(),
            "weights": None if self.weights is None else self.weights.tolist(),
            "explained_share": float(self.eigenvalues[0] / self.eigenvalues.sum()),
        }


def standardize(series: MonthlySeries) -> MonthlySeries:
    """Zero mean, unit population standard deviation."""
    x = series.values
    if x.shape[0] < 2:
        raise LengthError(f"{series.label or 'series'}: need at least 2 observations")
    if np.ptp(x) == 0.0:
        raise ZeroVarianceError(f"{series.label or 'series'} is constant")
    # centred two-pass form of sqrt(<x^2> - <x>^2); the raw-moment form cancels for large offsets
    d = x - x.mean()
    d -= d.mean()
    z = d / math.sqrt(float(np.mean(d * d)))
    return MonthlySeries(series.months, z, series.label)


def common_range(series: Sequence[MonthlySeries]) -> list[MonthlySeries]:
    """Trim every series to the months they all cover."""
    if not series:
        return []
    lo = max(s.months[0] for s in series)
    hi = min(s.months[-1] for s in series)
    if lo > hi:
        raise AlignmentError("member series share no common months")
    out = []
    for s in series:
        i = int((lo - s.months[0]).astype(int))
        j = int((hi - s.months[0]).astype(int)) + 1
        out.append(MonthlySeries(s.months[i:j], s.values[i:j], s.label))
    return out


def correlation_matrix(panel: Sequence[MonthlySeries]) -> CorrelationMatrix:
    if len(panel) < 1:
        raise LengthError("empty panel")
    ref = panel[0].months
    for s in panel[1:]:
        if not np.array_equal(s.months, ref):
            raise AlignmentError(f"{s.label or 'series'} does not share the month range of {panel[0].label}")
    Z = np.vstack([standardize(s).values for s in panel])
    C = Z @ Z.T / Z.shape[1]
    C = 0.5 * (C + C.T)
    np.clip(C, -1.0, 1.0, out=C)
    np.fill_diagonal(C, 1.0)
    return CorrelationMatrix(tuple(s.label for s in panel), C)


def jacobi_eigh(A, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` unsorted; column j of the
    vector matrix pairs with eigenvalue j. Stops once the Frobenius norm of
    the off-diagonal part drops to ``tol``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise LengthError("matrix must be square")
    V = np.eye(n)
    upper = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        if math.sqrt(2.0) * float(np.linalg.norm(A[upper])) <= tol:
            return np.diag(A).copy(), V, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    raise NumericError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def eigen_decompose(C: CorrelationMatrix) -> Eigenportfolio:
    """Eigenvalues in descending order; each vector signed so its entries sum positive.

    The leading vector must have a clearly non-zero sum.
    """
    w, V, sweeps = jacobi_eigh(C.values)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    sums = V.sum(axis=0)
    V = V * np.where(sums < 0.0, -1.0, 1.0)
    if abs(sums[0]) <= 1e-12:
        raise DegeneracyError("leading eigenvector sums to zero under both signs")
    return Eigenportfolio(C.labels, w, V, V[:, 0].copy(), sweeps=sweeps)


def eigenportfolio_index(panel: Sequence[MonthlySeries], decomposition: Eigenportfolio,
                         name: str = "composite") -> Eigenportfolio:
    if len(panel) < 2:
        raise ConfigError("an eigenportfolio needs at least two members")
    if tuple(s.label for s in panel) != decomposition.labels:
        raise AlignmentError("panel members do not match the decomposition labels")
    u = decomposition.leading
    total = float(u.sum())
    if abs(total) <= 1e-12:
        raise DegeneracyError("leading eigenvector weights sum to zero")
    X = np.vstack([s.values for s in panel])
    index = MonthlySeries(panel[0].months, u @ X / total, name)
    return Eigenportfolio(decomposition.labels, decomposition.eigenvalues, decomposition.eigenvectors,
                          u, u / total, index, decomposition.sweeps)


def composite_index(panel: Mapping[str, MonthlySeries], group: GroupConfig) -> Eigenportfolio:
    """Resolve a group, align its members and build the eigenportfolio index."""
    members = common_range(group.resolve(panel))
    return eigenportfolio_index(members, eigen_decompose(correlation_matrix(members)), group.name)


def _parse_groups(doc) -> list[GroupConfig]:
    try:
        items = doc["groups"]
        return [GroupConfig(g["name"], tuple(g["members"])) for g in items]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed group configuration: {exc}") from None


def load_groups(path) -> list[GroupConfig]:
    """Read ``{"groups": [{"name": ..., "members": [...]}, ...]}``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return _parse_groups(doc)


def default_groups() -> list[GroupConfig]:
    """The eighteen regional and production/trade baskets shipped with the package."""
    text = resources.files("midasvol").joinpath("data/groups_default.json").read_text(encoding="utf-8")
    return _parse_groups(json.loads(text))


def load_panel_dir(directory) -> dict[str, MonthlySeries]:
    """Load every ``<label>.csv`` monthly file in a directory, keyed by label."""
    directory = Path(directory)
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise FileNotFoundError(f"no CSV files in {directory}")
    return {f.stem: read_monthly_csv(f, f.stem) for f in files}
