"""Undirected confusion mining over row-stochastic correlation matrices.

The six (feature view, model) confusion matrices plus their mean give seven
perspectives on one dataset. Each perspective's matrix is decomposed by PCA
over its columns; the eigenvalue-weighted average of the retained
eigenvectors is that perspective's emotion feature vector. Stacking the seven
vectors gives per-emotion feature columns, whose absolute differences yield
centered distance matrices, absolute confusion scores, per-perspective
confusion rankings, and an entropy filter that keeps only the rank columns
the perspectives agree on.

The symmetric eigenproblem is solved in-package with cyclic Jacobi rotations;
the tests cross-check it against an independent solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .emotions import NUM_EMOTIONS, emotion_name
from .errors import ConfigurationError, DataError, DegenerateSpectrumError

ROW_SUM_TOL = 1e-9
NUM_PERSPECTIVES = 6  # 3 feature views x 2 models


@dataclass(frozen=True)
class CorrelationMatrix:
    """A 6x6 row-stochastic matrix: row = true emotion, column = prediction."""

    values: np.ndarray
    feature: str
    model: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (NUM_EMOTIONS, NUM_EMOTIONS):
            raise ConfigurationError(f"expected a 6x6 matrix, got {vals.shape}")
        if (vals < 0).any():
            raise DataError("correlation matrix entries must be non-negative")
        sums = vals.sum(axis=1)
        bad = np.where(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise DataError(
                f"row {bad[0]} ({emotion_name(int(bad[0]))}) sums to {sums[bad[0]]!r}"
            )

    @property
    def tag(self) -> str:
        if self.feature == self.model:
            return self.feature  # the mean perspective carries one tag
        return f"{self.feature}_{self.model}"


def row_normalize(counts, feature: str, model: str) -> CorrelationMatrix:
    """Divide each row of a 6x6 count matrix by its sum.

    A zero row means the emotion never appeared as a true label, which leaves
    that perspective undefined; the caller may merge splits or drop it.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (NUM_EMOTIONS, NUM_EMOTIONS):
        raise ConfigurationError(f"expected a 6x6 count matrix, got {counts.shape}")
    sums = counts.sum(axis=1)
    for idx in range(NUM_EMOTIONS):
        if sums[idx] <= 0:
            raise DataError(
                f"emotion {emotion_name(idx)} has no true-label counts; "
                "cannot normalize its row"
            )
    return CorrelationMatrix(values=counts / sums[:, None], feature=feature, model=model)


@dataclass(frozen=True)
class PerspectiveSet:
    """The six view-model matrices plus their elementwise mean (7 in total)."""

    matrices: tuple
    mean: CorrelationMatrix

    @property
    def perspectives(self) -> tuple:
        return self.matrices + (self.mean,)

    @property
    def tags(self) -> tuple:
        return tuple(m.tag for m in self.perspectives)


def assemble_perspectives(matrices: Sequence) -> PerspectiveSet:
    """Bundle exactly six distinct-tag matrices and append their mean.

    Matrices are ordered canonically by tag, so any permutation of the same
    six produces an identical PerspectiveSet (and identical reports).
    """
    matrices = tuple(sorted(matrices, key=lambda m: m.tag))
    if len(matrices) != NUM_PERSPECTIVES:
        raise ConfigurationError(
            f"expected {NUM_PERSPECTIVES} correlation matrices, got {len(matrices)}"
        )
    tags = [m.tag for m in matrices]
    if len(set(tags)) != len(tags):
        raise ConfigurationError(f"duplicate (feature, model) tags: {sorted(tags)}")
    stacked = np.stack([m.values for m in matrices])
    mean = CorrelationMatrix(values=stacked.mean(axis=0), feature="mean", model="mean")
    return PerspectiveSet(matrices=matrices, mean=mean)


def jacobi_eigh(matrix, tol: float = 1e-13, max_sweeps: int = 100):
    """Eigendecompose a symmetric matrix with cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) unsorted, eigenvectors as columns.
    Off-diagonal mass shrinks quadratically, so a handful of sweeps reaches
    machine precision for the small matrices used here.
    """
    a = np.asarray(matrix, dtype=float).copy()
    n = a.shape[0]
    if a.shape != (n, n) or not np.allclose(a, a.T, atol=1e-12):
        raise ConfigurationError("jacobi_eigh needs a symmetric square matrix")
    a = (a + a.T) / 2.0
    vecs = np.eye(n)
    scale = max(1.0, float(np.abs(np.diag(a)).max()))
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        # summing the off-diagonal entries directly avoids the catastrophic
        # cancellation of total-minus-diagonal once they become tiny
        off = math.sqrt(float((a[off_mask] ** 2).sum()))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                # zeroing a negligible entry moves eigenvalues by at most its
                # own magnitude, far below the convergence tolerance
                if abs(apq) <= 1e-30 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:  # tau*tau would overflow; use the limit
                    t = 1.0 / (2.0 * tau)
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vec_p, vec_q = vecs[:, p].copy(), vecs[:, q].copy()
                vecs[:, p] = c * vec_p - s * vec_q
                vecs[:, q] = s * vec_p + c * vec_q
    return np.diag(a).copy(), vecs


@dataclass(frozen=True)
class EigenDecomposition:
    covariance: np.ndarray   # (D, D) symmetric PSD
    eigenvalues: np.ndarray  # descending, clamped at zero
    eigenvectors: np.ndarray # orthonormal columns, sign-fixed


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude component is positive.

    PCA directions are sign-ambiguous but the weighted average downstream is
    sign-sensitive, so a fixed convention is required for reproducibility.
    """
    out = vectors.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        if out[k, j] < 0:
            out[:, j] = -out[:, j]
    return out


def principal_components(matrix) -> EigenDecomposition:
    """Full PCA of a matrix whose columns are the data points.

    The covariance uses the population divisor (the number of columns).
    Eigenpairs come back sorted by descending eigenvalue; tiny negative
    eigenvalues from round-off are clamped to zero.
    """
    data = np.asarray(matrix, dtype=float)
    if data.ndim != 2:
        raise ConfigurationError("expected a 2-D matrix of column data points")
    n_points = data.shape[1]
    mean = data.mean(axis=1, keepdims=True)
    centered = data - mean
    cov = centered @ centered.T / n_points
    evals, evecs = jacobi_eigh(cov)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]
    evals = np.where((evals < 0) & (evals > -1e-12), 0.0, evals)
    return EigenDecomposition(covariance=cov, eigenvalues=evals,
                              eigenvectors=_fix_signs(evecs))


def emotion_feature_vector(decomp: EigenDecomposition,
                           variance_threshold: float = 0.85):
    """Eigenvalue-weighted average of the leading eigenvectors.

    Retains the smallest component count whose cumulative variance fraction
    reaches the threshold, then returns (vector, retained_count).
    """
    if not 0.0 < variance_threshold <= 1.0:
        raise ConfigurationError("variance_threshold must lie in (0, 1]")
    evals = decomp.eigenvalues
    total = float(evals.sum())
    # identical data points leave only rounding dust in the spectrum; for
    # probability-scale data anything at 1e-30 is exactly that
    if total <= 1e-30:
        raise DegenerateSpectrumError("degenerate spectrum")
    cumulative = np.cumsum(evals) / total
    retained = int(np.searchsorted(cumulative, variance_threshold, side="left")) + 1
    retained = min(retained, len(evals))
    weights = evals[:retained] / evals[:retained].sum()
    vector = decomp.eigenvectors[:, :retained] @ weights
    return vector, retained


@dataclass(frozen=True)
class EmotionFeatureMatrix:
    """One feature vector per perspective (rows); columns are per-emotion."""

    rows: np.ndarray      # (perspectives, emotions)
    retained: tuple       # component count per perspective

    def column(self, emotion: int) -> np.ndarray:
        return self.rows[:, emotion]


def feature_matrix(perspectives: PerspectiveSet,
                   variance_threshold: float = 0.85) -> EmotionFeatureMatrix:
    rows = []
    retained = []
    for matrix in perspectives.perspectives:
        decomp = principal_components(matrix.values)
        vector, count = emotion_feature_vector(decomp, variance_threshold)
        rows.append(vector)
        retained.append(count)
    return EmotionFeatureMatrix(rows=np.vstack(rows), retained=tuple(retained))


@dataclass(frozen=True)
class DistanceMatrix:
    """Elementwise |e_i - e_center| per perspective; the center column is 0."""

    center: int
    values: np.ndarray  # (perspectives, emotions)


def distance_and_scores(features: EmotionFeatureMatrix, center: int):
    """Distance matrix centered on one emotion plus its absolute score.

    The score is the mean over all entries; a larger score means the emotion
    sits farther from the rest, i.e. is less confusable overall.
    """
    if not 0 <= center < NUM_EMOTIONS:
        raise ConfigurationError(f"center emotion out of range: {center}")
    anchor = features.rows[:, center][:, None]
    values = np.abs(features.rows - anchor)
    score = float(values.sum() / values.size)
    return DistanceMatrix(center=center, values=values), score


def sequence_and_entropy(distances: DistanceMatrix):
    """Rank emotions by ascending distance per perspective row.

    The center opens every row (self-distance 0); remaining ties break toward
    the lower emotion index. Returns (sequence matrix, per-column entropies),
    where a column's entropy (natural log) scores how much the perspectives
    disagree about that rank position.
    """
    n_rows, n_emotions = distances.values.shape
    others = [i for i in range(n_emotions) if i != distances.center]
    sequence = np.empty((n_rows, n_emotions), dtype=int)
    sequence[:, 0] = distances.center
    for r in range(n_rows):
        row = distances.values[r]
        sequence[r, 1:] = sorted(others, key=lambda i: (row[i], i))
    entropies = np.array([column_entropy(sequence[:, c]) for c in range(n_emotions)])
    return sequence, entropies


def column_entropy(labels) -> float:
    """Shannon entropy (natural log) of the label proportions in one column."""
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum() + 0.0)  # + 0.0 normalizes -0.0


@dataclass(frozen=True)
class CenterAnalysis:
    """Everything computed for one center emotion."""

    center: int
    distances: DistanceMatrix
    absolute_score: float
    sequence: np.ndarray
    column_entropies: np.ndarray


def analyze_centers(features: EmotionFeatureMatrix) -> list:
    out = []
    for center in range(NUM_EMOTIONS):
        dist, score = distance_and_scores(features, center)
        sequence, entropies = sequence_and_entropy(dist)
        out.append(CenterAnalysis(center=center, distances=dist,
                                  absolute_score=score, sequence=sequence,
                                  column_entropies=entropies))
    return out


@dataclass(frozen=True)
class LawColumn:
    """One evaluated rank column: the max- or min-confusion partner of a center."""

    center: int
    relation: str   # "max" (second rank column) | "min" (last rank column)
    partner: int    # modal emotion of the column
    entropy: float
    kept: bool      # entropy at or below the mean over all evaluated columns
    tie: bool       # modal count tied; lowest index reported, low confidence


@dataclass(frozen=True)
class ConfusionLaw:
    absolute_scores: tuple  # per center emotion
    ranking: tuple          # centers by ascending score = most confusable first
    entropy_mean: float
    columns: tuple          # 12 LawColumn records


def _modal_label(labels):
    values, counts = np.unique(np.asarray(labels), return_counts=True)
    top = counts.max()
    candidates = values[counts == top]
    return int(candidates.min()), bool(len(candidates) > 1)


def confusion_law_report(analyses: Sequence) -> ConfusionLaw:
    """Entropy-filtered relative confusion plus the absolute-score ranking.

    Only the second and last rank columns are evaluated (the most- and
    least-confused partners). The filter keeps columns whose entropy is at or
    below the mean of those evaluated columns; the inclusive comparison means
    unanimous columns survive even when every column is unanimous.
    """
    if len(analyses) != NUM_EMOTIONS:
        raise ConfigurationError("expected one analysis per emotion")
    raw = []
    for analysis in analyses:
        last = analysis.sequence.shape[1] - 1
        for relation, col in (("max", 1), ("min", last)):
            labels = analysis.sequence[:, col]
            partner, tie = _modal_label(labels)
            raw.append((analysis.center, relation, partner,
                        float(analysis.column_entropies[col]), tie))
    mean_entropy = float(np.mean([r[3] for r in raw]))
    columns = tuple(
        LawColumn(center=c, relation=rel, partner=p, entropy=h,
                  kept=h <= mean_entropy, tie=tie)
        for c, rel, p, h, tie in raw
    )
    scores = tuple(float(a.absolute_score) for a in analyses)
    ranking = tuple(int(i) for i in np.argsort(scores, kind="stable"))
    return ConfusionLaw(absolute_scores=scores, ranking=ranking,
                        entropy_mean=mean_entropy, columns=columns)


def mine_confusion(perspectives: PerspectiveSet,
                   variance_threshold: float = 0.85):
    """Full confusion pipeline: features, per-center analyses, and the law."""
    features = feature_matrix(perspectives, variance_threshold)
    analyses = analyze_centers(features)
    law = confusion_law_report(analyses)
    return features, analyses, law
