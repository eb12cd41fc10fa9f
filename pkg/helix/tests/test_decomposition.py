import logging

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from helix.decomposition import (
    Branch,
    decompose,
    decompose_panel,
    deviations,
    group_transmission_power,
    national_series,
    relative_deviation,
    transmission_power,
)
from helix.exceptions import DegenerateDenominatorError, EmptyDataError, ZeroMeanBaselineError
from helix.ingest import PanelSeries
from helix.tensor import ContingencyTensor, EntropySet, entropy_set, probabilities, synergy_3d

from .factories import random_panel, random_tensor, repeated_panel, uniform_tensor, xor_tensor


def regrouping_oracle(counts, group):
    """Per-group share of the synergy written out with explicit loops along axis 0."""
    p = np.asarray(counts, dtype=float) / counts.sum()
    _, nj, nk = p.shape
    p_a = p.sum(axis=(0, 2))
    p_b = p.sum(axis=(0, 1))
    p_ab = p.sum(axis=0)
    p_g = p[group].sum()

    def term(weight, reference):
        return -weight * np.log2(reference) if weight > 0 else 0.0

    value = term(p_g, p_g)
    for j in range(nj):
        p_gj = p[group, j].sum()
        value += term(p_gj, p_a[j]) - term(p_gj, p_gj)
    for k in range(nk):
        p_gk = p[group, :, k].sum()
        value += term(p_gk, p_b[k]) - term(p_gk, p_gk)
    for j in range(nj):
        for k in range(nk):
            value += term(p[group, j, k], p[group, j, k]) - term(p[group, j, k], p_ab[j, k])
    return value


class DecomposeTests(SimpleTestCase):
    def test_single_group_equals_total(self):
        tensor = random_tensor(np.random.default_rng(1), shape=(1, 4, 5))
        result = decompose(tensor, "geo")
        self.assertEqual(result.group_labels, tensor.labels[0])
        self.assertAlmostEqual(result.contributions[0], result.total, delta=1e-12)

    def test_identical_slices_share_equally(self):
        slab = np.random.default_rng(2).integers(1, 20, size=(3, 4))
        tensor = ContingencyTensor.from_counts(np.stack([slab, slab]))
        result = decompose(tensor, 0)
        self.assertAlmostEqual(result.contributions[0], result.contributions[1], delta=1e-12)

    def test_matches_regrouping_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            tensor = random_tensor(rng, shape=(4, 3, 3), sparsity=0.2)
            result = decompose(tensor, "geo")
            for group in range(4):
                self.assertAlmostEqual(result.contributions[group], regrouping_oracle(tensor.counts, group), delta=1e-12)
            self.assertAlmostEqual(result.contributions.sum(), synergy_3d(probabilities(tensor)), delta=1e-9)

    def test_additivity_on_every_axis(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            tensor = random_tensor(rng, sparsity=0.3)
            for axis in ("geo", "org", "tech"):
                result = decompose(tensor, axis)
                self.assertLessEqual(abs(result.residual), 1e-9)
                self.assertEqual(len(result.contributions), len(tensor.axis_labels(axis)))

    def test_oracle_on_other_axes(self):
        tensor = random_tensor(np.random.default_rng(5), shape=(3, 4, 5))
        for axis in (1, 2):
            moved = tensor.permuted([axis] + [other for other in range(3) if other != axis])
            result = decompose(tensor, axis)
            for group in range(tensor.shape[axis]):
                self.assertAlmostEqual(
                    result.contributions[group], regrouping_oracle(moved.counts, group), delta=1e-12
                )

    def test_relabeling_permutes_contributions(self):
        rng = np.random.default_rng(6)
        tensor = random_tensor(rng, shape=(5, 3, 4))
        order = rng.permutation(5)
        permuted = ContingencyTensor.from_counts(tensor.counts[order])
        assert_allclose(decompose(permuted, 0).contributions, decompose(tensor, 0).contributions[order], atol=1e-12)

    def test_merging_groups_touches_only_the_merged_group(self):
        tensor = random_tensor(np.random.default_rng(7), shape=(4, 3, 3))
        counts = tensor.counts
        merged = ContingencyTensor.from_counts(np.concatenate([counts[:2], counts[2:].sum(axis=0, keepdims=True)]))
        before = decompose(tensor, 0)
        after = decompose(merged, 0)
        assert_allclose(after.contributions[:2], before.contributions[:2], atol=1e-12)
        self.assertLessEqual(abs(after.residual), 1e-9)

    def test_empty_tensor(self):
        with self.assertRaises(EmptyDataError):
            decompose(ContingencyTensor.from_counts(np.zeros((2, 2, 2), dtype=int)), 0)

    def test_as_dict_and_powers(self):
        result = decompose(xor_tensor(), "org")
        self.assertEqual(set(result.as_dict()), {"org0", "org1"})
        powers = result.powers()
        self.assertEqual(set(powers), {"org0", "org1"})
        self.assertEqual(group_transmission_power(result, "org0"), powers["org0"])


class TransmissionPowerTests(SimpleTestCase):
    def test_xor_parity(self):
        power = transmission_power(entropy_set(probabilities(xor_tensor())))
        self.assertAlmostEqual(power.tau, 1.0, delta=1e-12)
        self.assertIs(power.branch, Branch.NEGATIVE)
        self.assertAlmostEqual(power.percent, 100.0, delta=1e-10)

    def test_correlated_diagonal(self):
        counts = np.zeros((2, 2, 2), dtype=int)
        counts[0, 0, 0] = counts[1, 1, 1] = 4
        power = transmission_power(entropy_set(probabilities(ContingencyTensor.from_counts(counts))))
        self.assertAlmostEqual(power.tau, 1.0, delta=1e-12)
        self.assertIs(power.branch, Branch.POSITIVE)

    def test_independent_uniform(self):
        power = transmission_power(entropy_set(probabilities(uniform_tensor())))
        self.assertEqual(power.tau, 0.0)
        self.assertIs(power.branch, Branch.ZERO)

    def test_degenerate_denominator(self):
        # T = 1.5 with H123 = 0
        entropies = EntropySet(h1=1.0, h2=1.0, h3=1.0, h12=0.5, h13=0.5, h23=0.5, h123=0.0)
        with self.assertRaises(DegenerateDenominatorError) as caught:
            transmission_power(entropies)
        self.assertEqual(caught.exception.code, "degenerate-denominator")

    def test_degenerate_denominator_negative_branch(self):
        # T = -1.5 with H123 equal to the sum of single entropies
        entropies = EntropySet(h1=1.0, h2=1.0, h3=1.0, h12=2.5, h13=2.5, h23=2.5, h123=3.0)
        with self.assertRaises(DegenerateDenominatorError) as caught:
            transmission_power(entropies)
        self.assertEqual(caught.exception.code, "degenerate-denominator")

    def test_sign_contract_over_random_tensors(self):
        rng = np.random.default_rng(8)
        taus = []
        for _ in range(10000):
            tensor = random_tensor(rng, shape=tuple(rng.integers(1, 4, size=3)), high=6, sparsity=0.4)
            power = transmission_power(entropy_set(probabilities(tensor)))
            if power.branch is not Branch.ZERO:
                self.assertGreaterEqual(power.tau, 0.0)
            else:
                self.assertEqual(power.tau, 0.0)
            taus.append(power.tau)
        # Boundedness by 1 is measured, not asserted.
        logging.getLogger(__name__).info("tau range over random tensors: %.6f .. %.6f", min(taus), max(taus))
        self.assertTrue(np.all(np.isfinite(taus)))


class DeviationTests(SimpleTestCase):
    def test_homogeneous_groups(self):
        # The two parity slices are mirror images: T_g = -0.5 and tau_g = 1 for both.
        report = deviations(repeated_panel(xor_tensor(), years=4), "geo")
        assert_allclose(report.synergy_means, [-0.5, -0.5], atol=1e-12)
        assert_allclose(report.tau_means, [1.0, 1.0], atol=1e-12)
        assert_allclose(report.k, [0.0, 0.0], atol=1e-9)
        assert_allclose(report.p, [0.0, 0.0], atol=1e-9)

    def test_identical_independent_groups_have_no_baseline(self):
        slab = np.random.default_rng(9).integers(1, 20, size=(3, 4))
        panel = repeated_panel(ContingencyTensor.from_counts(np.stack([slab, slab, slab])), years=4)
        with self.assertRaises(ZeroMeanBaselineError):
            deviations(panel, "geo")

    def test_relative_deviation_two_points(self):
        k, baseline = relative_deviation([0.1, 0.3])
        self.assertAlmostEqual(baseline, 0.2)
        assert_allclose(k, [-50.0, 50.0])

    def test_zero_baseline(self):
        with self.assertRaises(ZeroMeanBaselineError) as caught:
            relative_deviation([0.1, -0.1], "synergy")
        self.assertEqual(caught.exception.code, "zero-mean-baseline")

    def test_spreadsheet_oracle(self):
        panel = random_panel(np.random.default_rng(10), years=5, shape=(3, 3, 4))
        report = deviations(panel, "geo")

        taus = np.zeros((5, 3))
        synergy = np.zeros((5, 3))
        for year, (_, tensor) in enumerate(panel):
            result = decompose(tensor, "geo")
            synergy[year] = result.contributions
            taus[year] = [result.powers()[label].tau for label in result.group_labels]
        tau_means = taus.mean(axis=0)
        synergy_means = synergy.mean(axis=0)
        assert_allclose(report.tau_means, tau_means, atol=1e-12)
        assert_allclose(report.synergy_means, synergy_means, atol=1e-12)
        assert_allclose(report.k, (tau_means - tau_means.mean()) / tau_means.mean() * 100.0, atol=1e-9)
        assert_allclose(report.p, (synergy_means - synergy_means.mean()) / synergy_means.mean() * 100.0, atol=1e-9)
        self.assertAlmostEqual(float(report.k.mean()), 0.0, delta=1e-9)
        self.assertAlmostEqual(float(report.p.mean()), 0.0, delta=1e-9)
        self.assertEqual(report.years_used, (5, 5, 5))

    def test_missing_years_are_excluded(self):
        rng = np.random.default_rng(11)
        panel = random_panel(rng, years=4, shape=(3, 3, 3))
        tensors = list(panel.tensors)
        counts = np.array(tensors[1].counts)
        counts[2] = 0
        tensors[1] = ContingencyTensor(labels=tensors[1].labels, counts=counts)
        gapped = PanelSeries(years=panel.years, tensors=tuple(tensors))

        report = deviations(gapped, "geo")
        self.assertEqual(report.years_used, (4, 4, 3))
        kept = [decompose(tensor, "geo").contributions[2] for year, tensor in gapped if year != gapped.years[1]]
        self.assertAlmostEqual(report.synergy_means[2], float(np.mean(kept)), delta=1e-12)

    def test_absent_group_is_dropped(self):
        panel = random_panel(np.random.default_rng(12), years=3, shape=(3, 3, 3))
        tensors = []
        for _, tensor in panel:
            counts = np.array(tensor.counts)
            counts[1] = 0
            tensors.append(ContingencyTensor(labels=tensor.labels, counts=counts))
        with self.assertLogs("helix.decomposition", level="WARNING"):
            report = deviations(PanelSeries(years=panel.years, tensors=tuple(tensors)), "geo")
        self.assertEqual(report.group_labels, ("county0", "county2"))
        self.assertEqual(len(report.rows()), 2)


class PanelSeriesTests(SimpleTestCase):
    def test_decompose_panel_and_national_series(self):
        panel = random_panel(np.random.default_rng(13), years=3)
        results = decompose_panel(panel, "org")
        self.assertEqual(len(results), 3)
        rows = national_series(panel)
        for result, (entropies, power) in zip(results, rows):
            self.assertAlmostEqual(result.total, entropies.synergy, delta=1e-12)
            self.assertEqual(power, transmission_power(entropies))
