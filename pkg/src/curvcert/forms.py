"""Alternating form fields on a chart: evaluation, wedge, contraction,
pullbacks, finite-difference exterior derivative and metric norms.

A degree-k field stores one evaluator mapping a chart point to the
C(m, k) components indexed by strictly increasing multi-indices.  Forms
are closed over their evaluators; nothing is gridded.  Evaluation on a
k-tuple of vectors is a sum of k x k minors, so alternation is exact.

Norm choice: components are re-expressed in an h-orthonormal coframe
(from the Cholesky factor of the Gram matrix) and measured in the
Euclidean norm of that component vector.  Contraction by an h-unit
vector never increases this norm, which is the property the primitive
bound chain consumes.  The comass is only estimated for sanity checks;
the two norms differ by at most C(m, k)^(1/2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ValidationError
from .spaces import ModelSpace, metric_at
from . import geodesics as geo


@lru_cache(maxsize=256)
def multi_indices(m: int, k: int):
    """Strictly increasing k-tuples in range(m), lexicographic."""
    if k < 0 or k > m:
        return ()
    return tuple(combinations(range(m), k))


@lru_cache(maxsize=256)
def index_position(m: int, k: int):
    return {idx: p for p, idx in enumerate(multi_indices(m, k))}


@lru_cache(maxsize=256)
def _insertion_table(m: int, k: int):
    """For degree-k contraction output: entries (j, target_pos, sign) per
    output index I meaning comp_out[I] += sign * Z_j * comp_in[sort(j, I)]."""
    table = []
    pos_in = index_position(m, k)
    for I in multi_indices(m, k - 1):
        rows = []
        for j in range(m):
            if j in I:
                continue
            merged = tuple(sorted(I + (j,)))
            sign = (-1) ** merged.index(j)
            rows.append((j, pos_in[merged], float(sign)))
        table.append(rows)
    return table


@lru_cache(maxsize=256)
def _wedge_table(m: int, k1: int, k2: int):
    """Shuffle table: for each output index K, the list of
    (pos1, pos2, sign) with K = I union J."""
    pos1 = index_position(m, k1)
    pos2 = index_position(m, k2)
    table = []
    for K in multi_indices(m, k1 + k2):
        rows = []
        for I in combinations(K, k1):
            J = tuple(q for q in K if q not in I)
            perm = I + J
            sign = _perm_sign_sorted(perm)
            rows.append((pos1[I], pos2[J], float(sign)))
        table.append(rows)
    return table


def _perm_sign_sorted(seq):
    """Sign of the permutation sorting seq (entries distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=256)
def _d_table(m: int, k: int):
    """Exterior derivative table: for each output index K (degree k+1),
    entries (coordinate, source_pos, sign)."""
    pos_in = index_position(m, k)
    table = []
    for K in multi_indices(m, k + 1):
        rows = []
        for a, j in enumerate(K):
            rest = K[:a] + K[a + 1:]
            rows.append((j, pos_in[rest], float((-1) ** a)))
        table.append(rows)
    return table


@dataclass
class KFormField:
    """Degree-k alternating form field on an m-dimensional chart."""

    degree: int
    dim: int
    components: Callable[[np.ndarray], np.ndarray]
    label: str = ""
    # set for interior-product fields so evaluation can use the defining
    # identity (iota_Z F)(v...) = F(Z, v...), which makes annihilation of
    # tuples containing Z exact rather than merely tiny
    iota_parent: Optional["KFormField"] = None
    iota_vector: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if not 0 <= self.degree <= self.dim:
            raise ValidationError(f"degree {self.degree} out of range for dim {self.dim}")

    @property
    def n_components(self) -> int:
        return len(multi_indices(self.dim, self.degree))

    def comps(self, x) -> np.ndarray:
        c = np.asarray(self.components(np.asarray(x, dtype=float)), dtype=float)
        if c.shape != (self.n_components,):
            raise ValidationError(
                f"component evaluator returned shape {c.shape}, expected ({self.n_components},)")
        return c

    def __call__(self, x, *vectors) -> float:
        return eval_form(self, x, vectors)


def constant_form(m: int, k: int, comps, label: str = "") -> KFormField:
    comps = np.asarray(comps, dtype=float).copy()
    return KFormField(degree=k, dim=m, components=lambda x: comps, label=label)


def coordinate_form(m: int, index, label: str = "") -> KFormField:
    """The constant form dx_{i1} ^ ... ^ dx_{ik} for a sorted index tuple."""
    index = tuple(index)
    k = len(index)
    comps = np.zeros(len(multi_indices(m, k)))
    comps[index_position(m, k)[index]] = 1.0
    return KFormField(degree=k, dim=m, components=lambda x: comps.copy(),
                      label=label or f"dx{index}")


def eval_form(F: KFormField, x, vectors) -> float:
    """Multilinear alternating evaluation on k vectors (k x k minors).

    Alternation is exact: the argument tuple is brought to a canonical
    order (tracking the permutation sign) before any determinant is
    taken, so swapping two arguments flips the sign bitwise and a
    repeated argument gives exactly zero.
    """
    vectors = [np.asarray(v, dtype=float) for v in vectors]
    if len(vectors) != F.degree:
        raise ValidationError(f"expected {F.degree} vectors, got {len(vectors)}")
    if F.iota_parent is not None:
        # defining identity (iota_Z F)(v...) = F(Z, v...)
        z = np.asarray(F.iota_vector(np.asarray(x, dtype=float)), dtype=float)
        return eval_form(F.iota_parent, x, [z] + vectors)
    if F.degree == 0:
        return float(F.comps(x)[0])
    keyed = sorted(range(len(vectors)), key=lambda i: vectors[i].tobytes())
    for a, b in zip(keyed, keyed[1:]):
        if np.array_equal(vectors[a], vectors[b]):
            return 0.0
    sign = _perm_sign_sorted(keyed)
    V = np.stack([vectors[i] for i in keyed], axis=1)  # canonical columns
    idx = multi_indices(F.dim, F.degree)
    rows = np.array(idx)
    subs = V[rows]                 # (nI, k, k)
    dets = np.linalg.det(subs)
    return sign * float(np.dot(F.comps(x), dets))


def interior_product(F: KFormField, Z) -> KFormField:
    """Contraction F |_ Z in the first slot; Z is a fixed vector or a field.

    Contracting twice by the same vector is recognized structurally and
    returns the zero field exactly.
    """
    if F.degree < 1:
        raise ValidationError("cannot contract a 0-form")
    z_fn = Z if callable(Z) else _FixedVector(Z)

    if F.iota_vector is not None and _same_contraction(F.iota_vector, z_fn):
        n_out = len(multi_indices(F.dim, F.degree - 1))
        zero = np.zeros(n_out)
        return KFormField(degree=F.degree - 1, dim=F.dim,
                          components=lambda x: zero.copy(),
                          label=f"iota^2({F.label}) = 0")

    def comps(x):
        return interior_components(F.comps(x), np.asarray(z_fn(x), dtype=float),
                                   F.dim, F.degree)

    return KFormField(degree=F.degree - 1, dim=F.dim, components=comps,
                      label=f"iota({F.label})", iota_parent=F, iota_vector=z_fn)


class _FixedVector:
    """Constant vector field wrapper keeping the vector inspectable."""

    def __init__(self, v):
        self.vector = np.asarray(v, dtype=float)

    def __call__(self, x):
        return self.vector


def _same_contraction(prev, new) -> bool:
    if prev is new:
        return True
    if isinstance(prev, _FixedVector) and isinstance(new, _FixedVector):
        return np.array_equal(prev.vector, new.vector)
    return False


def interior_components(comps_in: np.ndarray, Z: np.ndarray, m: int, k: int) -> np.ndarray:
    table = _insertion_table(m, k)
    out = np.zeros(len(table))
    for p, rows in enumerate(table):
        acc = 0.0
        for (j, src, sign) in rows:
            acc += sign * Z[j] * comps_in[src]
        out[p] = acc
    return out


def wedge(F1: KFormField, F2: KFormField) -> KFormField:
    if F1.dim != F2.dim:
        raise ValidationError("wedge of forms on different charts")
    k = F1.degree + F2.degree
    if k > F1.dim:
        raise ValidationError("wedge degree exceeds chart dimension")

    def comps(x):
        return wedge_components(F1.comps(x), F2.comps(x), F1.dim, F1.degree, F2.degree)

    return KFormField(degree=k, dim=F1.dim, components=comps,
                      label=f"({F1.label})^({F2.label})")


def wedge_components(c1: np.ndarray, c2: np.ndarray, m: int, k1: int, k2: int) -> np.ndarray:
    table = _wedge_table(m, k1, k2)
    out = np.zeros(len(table))
    for p, rows in enumerate(table):
        acc = 0.0
        for (p1, p2, sign) in rows:
            acc += sign * c1[p1] * c2[p2]
        out[p] = acc
    return out


def pullback_linear(comps_target: np.ndarray, M: np.ndarray, k: int) -> np.ndarray:
    """Components of the pullback of a degree-k form under the linear map M.

    M maps the source space (columns) to the target space (rows); the
    result is indexed on the source:
    (M* psi)(e_{i1}, ..., e_{ik}) = sum_J psi_J det(M[J, I]).
    """
    if k == 0:
        return np.asarray(comps_target, dtype=float).copy()
    m_target, m_source = M.shape
    if k == 1:
        return M.T @ comps_target
    rows_t = np.array(multi_indices(m_target, k))
    rows_s = np.array(multi_indices(m_source, k))
    # gather (nJ, nI, k, k) submatrices and take batched determinants
    sub = M[rows_t[:, None, :, None], rows_s[None, :, None, :]]
    dets = np.linalg.det(sub)
    return comps_target @ dets


def pullback_scaling(space: ModelSpace, base, F: KFormField, t: float) -> KFormField:
    """(tau_t)^* F: evaluate F at tau_t(x) on pushed-forward arguments."""
    if not 0.0 < t <= 1.0 + 1e-12:
        raise ValidationError("pullback parameter t must lie in (0, 1]")

    def comps(x):
        r, targets, _, mats = geo.pushforward_matrices(space, base, x, [t])
        return pullback_linear(F.comps(targets[0]), mats[0], F.degree)

    return KFormField(degree=F.degree, dim=F.dim, components=comps,
                      label=f"tau_{t}^*({F.label})")


def exterior_derivative(F: KFormField, step: float = 1.0e-4,
                        space: Optional[ModelSpace] = None,
                        step_scale: Optional[Callable[[np.ndarray], float]] = None) -> KFormField:
    """Central finite-difference exterior derivative.

    The stencil step is step * max(1, |x|), multiplied by the local
    feature scale when a space (or explicit scale) is supplied; near the
    chart boundary the step shrinks so the stencil stays interior.
    """
    k = F.degree
    if k >= F.dim:
        raise ValidationError("exterior derivative would exceed chart dimension")
    table = _d_table(F.dim, k)

    def comps(x):
        x = np.asarray(x, dtype=float)
        h = step * max(1.0, float(np.linalg.norm(x)))
        if step_scale is not None:
            h *= float(step_scale(x))
        elif space is not None:
            h *= space.feature_scale(x)
        if space is not None:
            margin = space.chart_bound() - float(np.linalg.norm(x))
            if margin <= 0:
                raise DomainError("FD stencil outside the chart")
            h = min(h, margin / 2.0)
        m = F.dim
        dcomps = np.empty((m, F.n_components))
        for j in range(m):
            e = np.zeros(m)
            e[j] = h
            dcomps[j] = (F.comps(x + e) - F.comps(x - e)) / (2.0 * h)
        out = np.zeros(len(table))
        for p, rows in enumerate(table):
            acc = 0.0
            for (j, src, sign) in rows:
                acc += sign * dcomps[j, src]
            out[p] = acc
        return out

    return KFormField(degree=k + 1, dim=F.dim, components=comps, label=f"d({F.label})")


# ---------------------------------------------------------------------------
# metric norms
# ---------------------------------------------------------------------------

def orthonormal_components(space: ModelSpace, F: KFormField, x,
                           comps: Optional[np.ndarray] = None) -> np.ndarray:
    """Components of F(x) in an h-orthonormal coframe at x."""
    G = metric_at(space, x)
    L = np.linalg.cholesky(G)
    frame = np.linalg.inv(L).T  # columns are h-orthonormal frame vectors
    c = F.comps(x) if comps is None else comps
    return pullback_linear(c, frame, F.degree)


def h_norm_form(space: ModelSpace, F: KFormField, x) -> float:
    """Inner-product norm of F(x) induced by the metric on Lambda^k."""
    return float(np.linalg.norm(orthonormal_components(space, F, x)))


def h_norm_covector(space: ModelSpace, x, covector) -> float:
    G = metric_at(space, x)
    c = np.asarray(covector, dtype=float)
    return float(np.sqrt(max(0.0, c @ np.linalg.solve(G, c))))


@dataclass(frozen=True)
class SupEstimate:
    value: float
    argmax: np.ndarray
    n_samples: int


def sup_norm_estimate(space: ModelSpace, F: KFormField, points) -> SupEstimate:
    """Sampled supremum of |F|_h over the given points (max over supersets
    is monotone, so nested point streams give nondecreasing estimates)."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise ValidationError("empty sample set")
    best = -1.0
    arg = points[0]
    for p in points:
        v = h_norm_form(space, F, p)
        if v > best:
            best, arg = v, p
    return SupEstimate(value=float(best), argmax=np.asarray(arg), n_samples=len(points))


def comass_estimate(space: ModelSpace, F: KFormField, x, n_tuples: int = 200,
                    rng: Optional[np.random.Generator] = None) -> float:
    """Estimated comass: max |F(v_1, ..., v_k)| over random h-orthonormal
    k-tuples.  A lower bound of the true comass; the inner-product norm
    exceeds it by at most C(m, k)^(1/2)."""
    rng = rng or np.random.default_rng(0)
    G = metric_at(space, x)
    L = np.linalg.cholesky(G)
    frame = np.linalg.inv(L).T
    k = F.degree
    comps = F.comps(x)
    best = 0.0
    for _ in range(n_tuples):
        A = rng.normal(size=(space.dim, k))
        Q, _ = np.linalg.qr(A)
        vecs = frame @ Q  # h-orthonormal k-tuple
        idx = multi_indices(F.dim, k)
        rows = np.array(idx)
        dets = np.linalg.det(vecs[rows])
        best = max(best, abs(float(np.dot(comps, dets))))
    return best


# ---------------------------------------------------------------------------
# the radial field of a base point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialField:
    """Unit radial vector field d/dr of the distance to ``center``."""

    space: ModelSpace
    center: np.ndarray

    def __call__(self, x) -> np.ndarray:
        return unit_radial(self.space, self.center, x)


def unit_radial(space: ModelSpace, center, x) -> np.ndarray:
    """d/dr at x for r = d(center, .); h-unit, undefined at the center."""
    center = space.check_point(center)
    x = space.check_point(x)
    r = geo.distance(space, center, x)
    if r < 1.0e-12:
        raise DomainError("radial direction undefined at the center")
    from_origin = float(np.linalg.norm(center)) < 1.0e-12
    if space.kind in ("euclidean", "hyperbolic", "warped") and from_origin:
        return x / float(np.linalg.norm(x))
    if space.kind == "euclidean":
        return (x - center) / r
    if space.kind == "complex_hyperbolic" and from_origin:
        rho = float(np.linalg.norm(x))
        return (1.0 - rho * rho) / rho * x
    data = geo.radial_transport(space, center, x, [r])
    return data.frames[0][:, 0]
