"""
Additive decomposition of the three-way synergy into per-group shares,
transmission power and average-deviation statistics.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import DegenerateDenominatorError, ZeroMeanBaselineError
from .tensor import AXES, entropy_set, probabilities, resolve_axis

logger = logging.getLogger(__name__)

ZERO_TOLERANCE = 1e-12


class Branch(str, Enum):
    NEGATIVE = "negative-T"
    POSITIVE = "positive-T"
    ZERO = "zero-T"


@dataclass(frozen=True)
class TransmissionPower:
    tau: float
    branch: Branch

    @property
    def percent(self):
        """tau in relative units x 100."""
        return self.tau * 100.0


def _power(synergy, joint_entropy, singles_sum):
    if abs(synergy) <= ZERO_TOLERANCE:
        return TransmissionPower(tau=0.0, branch=Branch.ZERO)
    if synergy < 0:
        denominator = joint_entropy - singles_sum
        branch = Branch.NEGATIVE
    else:
        denominator = joint_entropy
        branch = Branch.POSITIVE
    if abs(denominator) <= ZERO_TOLERANCE:
        raise DegenerateDenominatorError(
            f"transmission power undefined: T = {synergy:.6g} with a zero denominator ({branch.value})"
        )
    return TransmissionPower(tau=synergy / denominator, branch=branch)


def transmission_power(entropies):
    """
    tau = T / (H123 - H1 - H2 - H3) when T < 0, T / H123 when T > 0,
    0 when T = 0.
    """
    return _power(entropies.synergy, entropies.h123, entropies.h1 + entropies.h2 + entropies.h3)


def _weighted_plog(weights, reference):
    """Sum of -w * log2(q) over cells with w > 0; q broadcasts against w."""
    reference = np.broadcast_to(reference, weights.shape)
    out = np.zeros(weights.shape, dtype=float)
    positive = weights > 0
    out[positive] = -weights[positive] * np.log2(reference[positive])
    return out


@dataclass(frozen=True)
class GroupShares:
    """
    One group's additive share of each entropy term of the synergy, with the
    decomposition axis listed first (g) and the remaining axes as a, b.
    """

    h_g: float
    h_a: float
    h_b: float
    h_ga: float
    h_gb: float
    h_ab: float
    h_gab: float

    @property
    def synergy(self):
        return self.h_g + self.h_a + self.h_b - self.h_ga - self.h_gb - self.h_ab + self.h_gab

    def transmission_power(self):
        return _power(self.synergy, self.h_gab, self.h_g + self.h_a + self.h_b)


@dataclass(frozen=True)
class DecompositionResult:
    axis: str
    group_labels: tuple
    contributions: np.ndarray = field(repr=False)
    total: float
    shares: tuple = field(repr=False, default=())

    def as_dict(self):
        return dict(zip(self.group_labels, (float(value) for value in self.contributions)))

    def powers(self):
        return {label: share.transmission_power() for label, share in zip(self.group_labels, self.shares)}

    @property
    def residual(self):
        """Sum of contributions minus the total; zero up to rounding."""
        return float(self.contributions.sum() - self.total)


def group_shares(model, axis):
    """Per-group shares of the seven entropy terms along ``axis``."""
    axis = resolve_axis(axis)
    others = [other for other in range(3) if other != axis]
    p = np.transpose(model.joint, [axis] + others)

    p_g = p.sum(axis=(1, 2))
    p_ga = p.sum(axis=2)
    p_gb = p.sum(axis=1)
    p_a = p.sum(axis=(0, 2))
    p_b = p.sum(axis=(0, 1))
    p_ab = p.sum(axis=0)

    h_g = _weighted_plog(p_g, p_g)
    h_a = _weighted_plog(p_ga, p_a[np.newaxis, :]).sum(axis=1)
    h_b = _weighted_plog(p_gb, p_b[np.newaxis, :]).sum(axis=1)
    h_ga = _weighted_plog(p_ga, p_ga).sum(axis=1)
    h_gb = _weighted_plog(p_gb, p_gb).sum(axis=1)
    h_ab = _weighted_plog(p, p_ab[np.newaxis, :, :]).sum(axis=(1, 2))
    h_gab = _weighted_plog(p, p).sum(axis=(1, 2))

    return tuple(
        GroupShares(*(float(term[group]) for term in (h_g, h_a, h_b, h_ga, h_gb, h_ab, h_gab)))
        for group in range(p.shape[0])
    )


def decompose(tensor, axis):
    """
    Split T into per-group contributions T_g along ``axis`` such that
    sum(T_g) == T. Each entropy term of T is assigned to groups by the
    group's joint-probability weight.
    """
    axis = resolve_axis(axis)
    model = probabilities(tensor)
    shares = group_shares(model, axis)
    contributions = np.array([share.synergy for share in shares])
    contributions.setflags(write=False)
    return DecompositionResult(
        axis=AXES[axis],
        group_labels=tensor.labels[axis],
        contributions=contributions,
        total=entropy_set(model).synergy,
        shares=shares,
    )


def group_transmission_power(result, label):
    return result.shares[result.group_labels.index(label)].transmission_power()


def decompose_panel(panel, axis):
    return [decompose(tensor, axis) for _, tensor in panel]


def national_series(panel):
    """Per-year (entropies, transmission power) of the whole system."""
    rows = []
    for _, tensor in panel:
        entropies = entropy_set(probabilities(tensor))
        rows.append((entropies, transmission_power(entropies)))
    return rows


# ---------------------------------------------------------------------------
# Average deviations
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DeviationReport:
    axis: str
    group_labels: tuple
    tau_means: np.ndarray = field(repr=False)
    synergy_means: np.ndarray = field(repr=False)
    years_used: tuple
    tau_overall: float
    synergy_overall: float
    k: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)

    def rows(self):
        return [
            {
                "label": label,
                "tau_mean": float(tau),
                "synergy_mean": float(synergy),
                "years_used": years,
                "k_percent": float(k),
                "p_percent": float(p),
            }
            for label, tau, synergy, years, k, p in zip(
                self.group_labels, self.tau_means, self.synergy_means, self.years_used, self.k, self.p
            )
        ]


def relative_deviation(values, name="value"):
    """Percent deviation of each value from the arithmetic mean of all values."""
    values = np.asarray(values, dtype=float)
    baseline = float(values.mean())
    if abs(baseline) <= ZERO_TOLERANCE:
        raise ZeroMeanBaselineError(f"mean {name} across groups is zero; percent deviation undefined")
    return (values - baseline) / baseline * 100.0, baseline


def deviations(panel, axis):
    """
    K and P percent deviations of each group's period-average transmission
    power and synergy from the cross-group averages. Years in which a group
    holds no events are left out of that group's averages.
    """
    axis = resolve_axis(axis)
    results = decompose_panel(panel, axis)
    labels = panel.labels[axis]
    present = np.array([
        tensor.counts.sum(axis=tuple(other for other in range(3) if other != axis)) > 0
        for _, tensor in panel
    ])
    synergy = np.array([result.contributions for result in results])
    tau = np.array([
        [share.transmission_power().tau if present[year, group] else 0.0 for group, share in enumerate(result.shares)]
        for year, result in enumerate(results)
    ])

    years_used = present.sum(axis=0)
    keep = years_used > 0
    for label in np.asarray(labels)[~keep]:
        logger.warning("Group %s holds no events in any year; left out of the deviation table", label)

    counts = years_used[keep]
    tau_means = (tau * present).sum(axis=0)[keep] / counts
    synergy_means = (synergy * present).sum(axis=0)[keep] / counts
    k, tau_overall = relative_deviation(tau_means, "transmission power")
    p, synergy_overall = relative_deviation(synergy_means, "synergy")
    return DeviationReport(
        axis=AXES[axis],
        group_labels=tuple(label for label, used in zip(labels, keep) if used),
        tau_means=tau_means,
        synergy_means=synergy_means,
        years_used=tuple(int(count) for count in counts),
        tau_overall=tau_overall,
        synergy_overall=synergy_overall,
        k=k,
        p=p,
    )
