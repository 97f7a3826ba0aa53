"""Dense tensors, metric contractions and the Kulkarni-Nomizu product.

Tensors are plain ``numpy.ndarray`` objects of shape ``(m,) * q`` in
row-major index order ``(i1, ..., iq)``.  A :class:`Metric` is needed only
at the boundary; internally every curvature computation runs in an
orthonormal frame (see :func:`orthonormalize`), where ``g = identity`` and
raising or lowering an index is a no-op.

Conventions
-----------
* ``inner(A, B, g)`` is the full contraction ``A_{i1..iq} B^{i1..iq}``.
* 2-forms are full antisymmetric matrices, so ``|e1 ^ e2|^2 = 2``.
* ``(E ∧ F)_{ijkt} = E_ik F_jt + E_jt F_ik - E_it F_jk - E_jk F_it``;
  in particular ``g ∧ g`` has sectional curvature 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DecompositionError, DomainError, NumericError, ShapeError

MAX_DIM = 16
MAX_RANK = 6


def rng(seed: int, case: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, case)``.

    Independent of call order, so case-parallel runs reproduce serial ones.
    """
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, int(case) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class Metric:
    """Symmetric positive-definite metric with cached Cholesky factor and inverse."""

    g: np.ndarray
    chol: np.ndarray = field(init=False, repr=False)
    inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = np.array(self.g, dtype=np.float64)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ShapeError(f"metric must be a square matrix, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError("metric has non-finite entries")
        g = 0.5 * (g + g.T)
        try:
            chol = np.linalg.cholesky(g)
        except np.linalg.LinAlgError as exc:
            raise DecompositionError("metric is not positive definite") from exc
        if np.any(np.diag(chol) <= 0):
            raise DecompositionError("metric is not positive definite")
        inv = np.linalg.inv(g)
        inv = 0.5 * (inv + inv.T)
        for name, arr in (("g", g), ("chol", chol), ("inv", inv)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def identity(cls, m: int) -> "Metric":
        check_dimension(m, minimum=1)
        return cls(np.eye(m))

    @property
    def m(self) -> int:
        return self.g.shape[0]

    def frame(self) -> np.ndarray:
        """Columns are a g-orthonormal basis: ``F.T @ g @ F = I``."""
        return np.linalg.inv(self.chol).T

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.g, np.eye(self.m)))


def check_dimension(m: int, minimum: int = 2) -> int:
    if int(m) != m or m < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {m}")
    if m > MAX_DIM:
        raise DomainError(f"dimension {m} exceeds the supported maximum {MAX_DIM}")
    return int(m)


def tensor_shape(A: np.ndarray) -> tuple[int, int]:
    """Return ``(m, q)`` for an array of shape ``(m,) * q``."""
    A = np.asarray(A)
    if A.ndim == 0 or len(set(A.shape)) != 1:
        raise ShapeError(f"not a cubical tensor: shape {A.shape}")
    if A.ndim > MAX_RANK:
        raise ShapeError(f"rank {A.ndim} exceeds {MAX_RANK}")
    return A.shape[0], A.ndim


def _check_pair(A, B):
    ma, qa = tensor_shape(A)
    mb, qb = tensor_shape(B)
    if (ma, qa) != (mb, qb):
        raise ShapeError(f"tensors differ in shape: {np.shape(A)} vs {np.shape(B)}")
    return ma, qa


def raise_all(A: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    """Contract every slot of ``A`` with ``ginv``."""
    out = np.asarray(A, dtype=np.float64)
    for axis in range(out.ndim):
        out = np.moveaxis(np.tensordot(ginv, out, axes=([1], [axis])), 0, axis)
    return out


def inner(A: np.ndarray, B: np.ndarray, g: Optional[Metric] = None) -> float:
    """Full contraction ``<A, B>`` using ``q`` copies of the inverse metric."""
    m, _ = _check_pair(A, B)
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if g is None or g.is_identity():
        if g is not None and g.m != m:
            raise ShapeError(f"metric dimension {g.m} != tensor dimension {m}")
        return float(np.dot(A.ravel(), B.ravel()))
    if g.m != m:
        raise ShapeError(f"metric dimension {g.m} != tensor dimension {m}")
    return float(np.dot(raise_all(A, g.inv).ravel(), B.ravel()))


def norm(A: np.ndarray, g: Optional[Metric] = None) -> float:
    return float(np.sqrt(max(inner(A, A, g), 0.0)))


def symmetric(a: np.ndarray) -> np.ndarray:
    """Symmetric 2-tensor from a square matrix (symmetrized)."""
    a = np.asarray(a, dtype=np.float64)
    tensor_shape(a)
    if a.ndim != 2:
        raise ShapeError("expected a matrix")
    return 0.5 * (a + a.T)


def two_form(a: np.ndarray) -> np.ndarray:
    """2-form from a square matrix (antisymmetrized)."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("expected a square matrix")
    return 0.5 * (a - a.T)


def wedge(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``u ^ v = u ⊗ v - v ⊗ u``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return np.outer(u, v) - np.outer(v, u)


def kulkarni_nomizu(E: np.ndarray, F: Optional[np.ndarray] = None) -> np.ndarray:
    """Kulkarni-Nomizu product of two symmetric 2-tensors (``F`` defaults to ``g = I``)."""
    E = np.asarray(E, dtype=np.float64)
    if F is None:
        F = np.eye(E.shape[0])
    F = np.asarray(F, dtype=np.float64)
    _check_pair(E, F)
    if E.ndim != 2:
        raise ShapeError("Kulkarni-Nomizu product takes 2-tensors")
    return (
        np.einsum("ik,jt->ijkt", E, F)
        + np.einsum("jt,ik->ijkt", E, F)
        - np.einsum("it,jk->ijkt", E, F)
        - np.einsum("jk,it->ijkt", E, F)
    )


def first_bianchi(T: np.ndarray) -> np.ndarray:
    """Cyclic sum ``T_ijkt + T_iktj + T_itjk`` over the last three slots."""
    T = np.asarray(T)
    return T + np.einsum("iktj->ijkt", T) + np.einsum("itjk->ijkt", T)


def curvature_residuals(T: np.ndarray) -> tuple[float, float]:
    """Relative residuals of the pair symmetries and of the first Bianchi identity."""
    T = np.asarray(T, dtype=np.float64)
    m, q = tensor_shape(T)
    if q != 4:
        raise ShapeError(f"expected a rank-4 tensor, got rank {q}")
    scale = np.linalg.norm(T)
    if scale == 0.0:
        return 0.0, 0.0
    sym = max(
        np.linalg.norm(T + np.einsum("jikt->ijkt", T)),
        np.linalg.norm(T + np.einsum("ijtk->ijkt", T)),
        np.linalg.norm(T - np.einsum("ktij->ijkt", T)),
    )
    return float(sym / scale), float(np.linalg.norm(first_bianchi(T)) / scale)


def is_curvature_tensor(T: np.ndarray, tol: float = 1e-12) -> bool:
    try:
        sym, b1 = curvature_residuals(T)
    except ShapeError:
        return False
    return sym <= tol and b1 <= tol


def project_curvature_symmetries(D: np.ndarray) -> np.ndarray:
    """Orthogonal projection of a rank-4 tensor onto algebraic curvature tensors.

    Antisymmetrize in (i,j) and (k,t), symmetrize under pair exchange, then
    remove the totally antisymmetric part with ``I - B1/3``.
    """
    D = np.asarray(D, dtype=np.float64)
    m, q = tensor_shape(D)
    if q != 4:
        raise ShapeError(f"expected a rank-4 tensor, got rank {q}")
    X = 0.5 * (D - np.einsum("jikt->ijkt", D))
    X = 0.5 * (X - np.einsum("ijtk->ijkt", X))
    X = 0.5 * (X + np.einsum("ktij->ijkt", X))
    return X - first_bianchi(X) / 3.0


def random_curvature_tensor(m: int, seed: int, case: int = 0) -> np.ndarray:
    """Standard-normal entries projected onto the algebraic curvature tensors."""
    m = check_dimension(m)
    if m < 3:
        raise DomainError("random curvature tensors need m >= 3")
    return project_curvature_symmetries(rng(seed, case).standard_normal((m,) * 4))


def random_symmetric(m: int, gen: np.random.Generator) -> np.ndarray:
    return symmetric(gen.standard_normal((m, m)))


def random_orthogonal(m: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix."""
    q, r = np.linalg.qr(gen.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def random_spd(m: int, gen: np.random.Generator) -> np.ndarray:
    a = gen.standard_normal((m, m))
    return a @ a.T + m * np.eye(m)


def transform(A: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Components of a covariant tensor in the frame given by the columns of ``F``.

    ``A'_{a b ...} = A_{i j ...} F_{i a} F_{j b} ...``.  With ``F`` orthogonal
    this is the rotation ``A -> Q·A`` acting on every slot (``F = Q.T``).
    """
    out = np.asarray(A, dtype=np.float64)
    for axis in range(out.ndim):
        out = np.moveaxis(np.tensordot(out, F, axes=([axis], [0])), -1, axis)
    return out


def rotate(A: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Apply the orthogonal map ``Q`` to every slot: ``A'_{ab..} = Q_ai Q_bj .. A_ij..``."""
    return transform(A, np.asarray(Q).T)


def to_orthonormal(A: np.ndarray, g: Metric) -> np.ndarray:
    """Components of any covariant tensor in the Cholesky orthonormal frame of ``g``."""
    m, _ = tensor_shape(A)
    if g.m != m:
        raise ShapeError(f"metric dimension {g.m} != tensor dimension {m}")
    if g.is_identity():
        return np.array(A, dtype=np.float64)
    return transform(A, g.frame())


def orthonormalize(T: np.ndarray, g: Metric) -> np.ndarray:
    """Curvature tensor components in an orthonormal frame, so downstream ``g = I``."""
    m, q = tensor_shape(T)
    if q != 4:
        raise ShapeError(f"expected a rank-4 tensor, got rank {q}")
    return to_orthonormal(T, g)


# -- JSON interchange --------------------------------------------------------

def tensor_to_json(A: np.ndarray, g: Optional[Metric] = None) -> dict:
    m, q = tensor_shape(A)
    obj = {"m": m, "rank": q, "data": [float(x) for x in np.asarray(A, dtype=np.float64).ravel()]}
    if g is not None and not g.is_identity():
        obj["g"] = [[float(x) for x in row] for row in g.g]
    return obj


def tensor_from_json(obj: dict) -> tuple[np.ndarray, Metric]:
    """Parse ``{"m", "rank", "data", "g"?}``; raises ``ShapeError`` on inconsistent fields."""
    try:
        m = obj["m"]
        q = obj["rank"]
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ShapeError(f"tensor JSON missing field: {exc}") from exc
    if not isinstance(m, int) or not isinstance(q, int) or not 1 <= q <= MAX_RANK:
        raise ShapeError("fields 'm' and 'rank' must be integers with 1 <= rank <= 6")
    check_dimension(m, minimum=1)
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 1 or arr.size != m**q:
        raise ShapeError(f"'data' must be a flat list of {m}**{q} = {m**q} reals, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NumericError("tensor data has non-finite entries")
    g = Metric(np.asarray(obj["g"], dtype=np.float64)) if obj.get("g") is not None else Metric.identity(m)
    if g.m != m:
        raise ShapeError(f"metric dimension {g.m} != m = {m}")
    return arr.reshape((m,) * q), g
