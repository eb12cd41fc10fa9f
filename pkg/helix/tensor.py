"""
Contingency tensors, probabilities and Shannon entropies.

All entropies are in bits. Zero-probability cells contribute nothing
(0 * log2(0) = 0).
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .exceptions import EmptyDataError, InvalidAxesError, InvalidDistributionError


AXES = ("geo", "org", "tech")

DISTRIBUTION_TOLERANCE = 1e-9


def resolve_axis(axis):
    """Return the positional index (0, 1, 2) of an axis name or index."""
    if isinstance(axis, str):
        try:
            return AXES.index(axis.lower())
        except ValueError:
            raise InvalidAxesError(f"unknown axis {axis!r}; expected one of {', '.join(AXES)}")
    if isinstance(axis, (int, np.integer)) and not isinstance(axis, bool) and 0 <= axis < 3:
        return int(axis)
    raise InvalidAxesError(f"unknown axis {axis!r}; expected one of {', '.join(AXES)}")


def _freeze(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ContingencyTensor:
    """
    Counts n_ijk over three labelled categorical axes
    (geography, organization, technology).
    """

    labels: tuple
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = tuple(tuple(str(name) for name in axis_labels) for axis_labels in self.labels)
        if len(labels) != 3:
            raise InvalidAxesError("a contingency tensor needs exactly three axes")
        for name, axis_labels in zip(AXES, labels):
            if not axis_labels:
                raise InvalidAxesError(f"axis {name} has no categories")
            if len(set(axis_labels)) != len(axis_labels):
                raise InvalidAxesError(f"axis {name} has duplicate categories")

        counts = np.array(self.counts)
        if counts.dtype.kind == "f":
            if not np.all(np.isfinite(counts)) or not np.all(counts == np.round(counts)):
                raise InvalidDistributionError("counts must be whole numbers")
        elif counts.dtype.kind not in "iu":
            raise InvalidDistributionError("counts must be integers")
        counts = counts.astype(np.int64)
        if counts.shape != tuple(len(axis_labels) for axis_labels in labels):
            raise InvalidAxesError(
                f"counts have shape {counts.shape}, labels describe "
                f"{tuple(len(axis_labels) for axis_labels in labels)}"
            )
        if np.any(counts < 0):
            raise InvalidDistributionError("counts must be non-negative")

        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "counts", _freeze(counts))

    @classmethod
    def from_counts(cls, counts, labels=None):
        """Build a tensor from a nested list/array, generating labels when omitted."""
        counts = np.asarray(counts)
        if labels is None:
            labels = tuple(
                tuple(f"{name}{index}" for index in range(size))
                for name, size in zip(AXES, counts.shape)
            )
        return cls(labels=labels, counts=counts)

    @property
    def shape(self):
        return self.counts.shape

    @property
    def total(self):
        return int(self.counts.sum())

    def axis_labels(self, axis):
        return self.labels[resolve_axis(axis)]

    def permuted(self, order):
        """Return the tensor with its axes reordered (``order`` as in numpy.transpose)."""
        order = tuple(resolve_axis(axis) for axis in order)
        if sorted(order) != [0, 1, 2]:
            raise InvalidAxesError(f"{order} is not a permutation of the three axes")
        return ContingencyTensor(
            labels=tuple(self.labels[axis] for axis in order),
            counts=np.transpose(self.counts, order),
        )


@dataclass(frozen=True)
class ProbabilityModel:
    """Joint distribution p_ijk with marginals derived on demand."""

    joint: np.ndarray = field(repr=False)

    def marginal(self, *axes):
        """
        Marginal over the given axes, e.g. ``marginal(0)`` is p_i and
        ``marginal(0, 2)`` is p_ik. Axis order in the result follows the
        tensor's order.
        """
        keep = sorted({resolve_axis(axis) for axis in axes})
        drop = tuple(axis for axis in range(3) if axis not in keep)
        return self.joint.sum(axis=drop) if drop else self.joint

    @property
    def p_i(self):
        return self.marginal(0)

    @property
    def p_j(self):
        return self.marginal(1)

    @property
    def p_k(self):
        return self.marginal(2)

    @property
    def p_ij(self):
        return self.marginal(0, 1)

    @property
    def p_ik(self):
        return self.marginal(0, 2)

    @property
    def p_jk(self):
        return self.marginal(1, 2)


@dataclass(frozen=True)
class EntropySet:
    """One-, two- and three-dimensional entropies (bits)."""

    h1: float
    h2: float
    h3: float
    h12: float
    h13: float
    h23: float
    h123: float

    @property
    def synergy(self):
        # T = H1 + H2 + H3 - H12 - H13 - H23 + H123
        return self.h1 + self.h2 + self.h3 - self.h12 - self.h13 - self.h23 + self.h123

    def single(self, axis):
        return (self.h1, self.h2, self.h3)[resolve_axis(axis)]

    def pair(self, first, second):
        key = tuple(sorted((resolve_axis(first), resolve_axis(second))))
        return {(0, 1): self.h12, (0, 2): self.h13, (1, 2): self.h23}[key]


def probabilities(tensor):
    total = tensor.total
    if total < 1:
        raise EmptyDataError("the tensor holds no events (N = 0)")
    return ProbabilityModel(joint=_freeze(tensor.counts / total))


def plogp(p):
    """Elementwise -p * log2(p) with 0 * log2(0) = 0."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    positive = p > 0
    out[positive] = -p[positive] * np.log2(p[positive])
    return out


def _entropy(p):
    return max(0.0, float(plogp(p).sum())) + 0.0


def entropy(dist):
    """Shannon entropy in bits of a probability vector or array."""
    p = np.asarray(dist, dtype=float)
    if p.size == 0 or not np.all(np.isfinite(p)):
        raise InvalidDistributionError("distribution must be a non-empty array of finite numbers")
    if np.any(p < 0) or np.any(p > 1):
        raise InvalidDistributionError("probabilities must lie in [0, 1]")
    if abs(p.sum() - 1.0) > DISTRIBUTION_TOLERANCE:
        raise InvalidDistributionError(f"probabilities sum to {p.sum():.12g}, expected 1")
    return _entropy(p)


def entropy_set(model):
    return EntropySet(
        h1=_entropy(model.p_i),
        h2=_entropy(model.p_j),
        h3=_entropy(model.p_k),
        h12=_entropy(model.p_ij),
        h13=_entropy(model.p_ik),
        h23=_entropy(model.p_jk),
        h123=_entropy(model.joint),
    )


def mutual_info_2d(model, axes):
    """Two-way mutual information H_a + H_b - H_ab between two of the three axes."""
    first, second = (resolve_axis(axis) for axis in axes)
    if first == second:
        raise InvalidAxesError("mutual information needs two distinct axes")
    return (
        _entropy(model.marginal(first))
        + _entropy(model.marginal(second))
        - _entropy(model.marginal(first, second))
    )


def synergy_3d(model):
    """Signed three-way mutual information T (bits); negative means synergy."""
    return entropy_set(model).synergy


def pairwise_informations(model):
    """Mutual information for each of the three axis pairs, keyed by axis names."""
    return {
        f"{AXES[first]}-{AXES[second]}": mutual_info_2d(model, (first, second))
        for first, second in combinations(range(3), 2)
    }
