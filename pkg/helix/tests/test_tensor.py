import itertools

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from helix.decomposition import transmission_power
from helix.exceptions import EmptyDataError, InvalidAxesError, InvalidDistributionError
from helix.tensor import (
    ContingencyTensor,
    entropy,
    entropy_set,
    mutual_info_2d,
    pairwise_informations,
    probabilities,
    resolve_axis,
    synergy_3d,
)

from .factories import product_tensor, random_tensor, uniform_tensor, xor_tensor


def brute_force_synergy(counts):
    """Synergy from loops over cells, independent of numpy marginals."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    ni, nj, nk = counts.shape

    def h(cells):
        value = 0.0
        for n in cells.values():
            if n > 0:
                p = n / total
                value -= p * np.log2(p)
        return value

    singles = [{}, {}, {}]
    pairs = [{}, {}, {}]
    joint = {}
    for i, j, k in itertools.product(range(ni), range(nj), range(nk)):
        n = counts[i, j, k]
        for axis, key in enumerate((i, j, k)):
            singles[axis][key] = singles[axis].get(key, 0.0) + n
        for index, key in enumerate(((i, j), (i, k), (j, k))):
            pairs[index][key] = pairs[index].get(key, 0.0) + n
        joint[(i, j, k)] = n
    return sum(h(s) for s in singles) - sum(h(p) for p in pairs) + h(joint)


class ContingencyTensorTests(SimpleTestCase):
    def test_total_is_sum_of_cells(self):
        tensor = ContingencyTensor.from_counts([[[1, 2], [3, 4]], [[5, 6], [7, 8]]])
        self.assertEqual(tensor.total, 36)
        self.assertEqual(tensor.shape, (2, 2, 2))
        self.assertEqual(tensor.labels[0], ("geo0", "geo1"))

    def test_rejects_negative_counts(self):
        with self.assertRaises(InvalidDistributionError):
            ContingencyTensor.from_counts([[[1, -1]]])

    def test_rejects_fractional_counts(self):
        with self.assertRaises(InvalidDistributionError):
            ContingencyTensor.from_counts([[[1.5]]])

    def test_rejects_duplicate_labels(self):
        with self.assertRaises(InvalidAxesError):
            ContingencyTensor(labels=(("a", "a"), ("x",), ("t",)), counts=np.ones((2, 1, 1), dtype=int))

    def test_rejects_shape_mismatch(self):
        with self.assertRaises(InvalidAxesError):
            ContingencyTensor(labels=(("a",), ("x",), ("t",)), counts=np.ones((2, 1, 1), dtype=int))

    def test_counts_are_read_only(self):
        tensor = uniform_tensor()
        with self.assertRaises(ValueError):
            tensor.counts[0, 0, 0] = 5

    def test_resolve_axis(self):
        self.assertEqual(resolve_axis("geo"), 0)
        self.assertEqual(resolve_axis("TECH"), 2)
        self.assertEqual(resolve_axis(1), 1)
        for bad in ("sector", 3, -1, True):
            with self.assertRaises(InvalidAxesError):
                resolve_axis(bad)


class ProbabilityTests(SimpleTestCase):
    def test_uniform(self):
        model = probabilities(uniform_tensor())
        assert_allclose(model.joint, np.full((2, 2, 2), 0.125))

    def test_single_cell(self):
        counts = np.zeros((2, 2, 2), dtype=int)
        counts[1, 0, 1] = 5
        model = probabilities(ContingencyTensor.from_counts(counts))
        self.assertEqual(model.joint[1, 0, 1], 1.0)
        self.assertEqual(model.joint.sum(), 1.0)

    def test_direct_division(self):
        counts = np.array([2, 1, 1, 0, 1, 1, 0, 2]).reshape(2, 2, 2)
        model = probabilities(ContingencyTensor.from_counts(counts))
        assert_array_equal(model.joint.ravel(), [0.25, 0.125, 0.125, 0, 0.125, 0.125, 0, 0.25])

    def test_marginals_match_joint(self):
        model = probabilities(random_tensor(np.random.default_rng(1), shape=(3, 4, 5)))
        assert_allclose(model.p_i, model.joint.sum(axis=(1, 2)), atol=1e-12)
        assert_allclose(model.p_jk, model.joint.sum(axis=0), atol=1e-12)
        assert_allclose(model.marginal("geo", "tech"), model.joint.sum(axis=1), atol=1e-12)
        self.assertAlmostEqual(model.joint.sum(), 1.0, delta=1e-12)

    def test_empty_tensor(self):
        with self.assertRaises(EmptyDataError) as caught:
            probabilities(ContingencyTensor.from_counts(np.zeros((2, 2, 2), dtype=int)))
        self.assertEqual(caught.exception.code, "empty-data")


class EntropyTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(entropy([0.5, 0.5]), 1.0)
        self.assertEqual(entropy([1.0, 0.0]), 0.0)
        self.assertEqual(entropy([0.25] * 4), 2.0)

    def test_invalid_distributions(self):
        for dist in ([-0.5, 1.5], [0.5, 0.6], [], [np.nan, 1.0]):
            with self.assertRaises(InvalidDistributionError):
                entropy(dist)

    def test_uniform_entropy_set(self):
        entropies = entropy_set(probabilities(uniform_tensor()))
        self.assertEqual((entropies.h1, entropies.h2, entropies.h3), (1.0, 1.0, 1.0))
        self.assertEqual((entropies.h12, entropies.h13, entropies.h23), (2.0, 2.0, 2.0))
        self.assertEqual(entropies.h123, 3.0)

    def test_xor_entropy_set(self):
        entropies = entropy_set(probabilities(xor_tensor()))
        self.assertEqual((entropies.h1, entropies.h2, entropies.h3), (1.0, 1.0, 1.0))
        self.assertEqual((entropies.h12, entropies.h13, entropies.h23), (2.0, 2.0, 2.0))
        self.assertEqual(entropies.h123, 2.0)

    def test_single_category_axis_is_never_negative(self):
        rng = np.random.default_rng(11)
        for shape in ((1, 7, 9), (6, 1, 13), (5, 8, 1), (1, 1, 17)):
            for _ in range(50):
                e = entropy_set(probabilities(random_tensor(rng, shape=shape, sparsity=0.3)))
                for value in (e.h1, e.h2, e.h3, e.h12, e.h13, e.h23, e.h123):
                    self.assertGreaterEqual(value, 0.0)
                certain = [e.h1, e.h2, e.h3][shape.index(1)]
                self.assertLess(certain, 1e-12)

    def test_subadditivity(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            e = entropy_set(probabilities(random_tensor(rng, sparsity=0.3)))
            for value in (e.h1, e.h2, e.h3, e.h12, e.h13, e.h23, e.h123):
                self.assertGreaterEqual(value, 0.0)
            self.assertLessEqual(e.h12, e.h1 + e.h2 + 1e-9)
            self.assertLessEqual(e.h13, e.h1 + e.h3 + 1e-9)
            self.assertLessEqual(e.h23, e.h2 + e.h3 + 1e-9)
            self.assertLessEqual(e.h123, e.h12 + e.h3 + 1e-9)
            self.assertLessEqual(e.h123, e.h13 + e.h2 + 1e-9)
            self.assertLessEqual(e.h123, e.h23 + e.h1 + 1e-9)

    def test_random_matches_direct_summation(self):
        tensor = random_tensor(np.random.default_rng(3), shape=(3, 4, 5))
        p = tensor.counts / tensor.total
        expected = -sum(value * np.log2(value) for value in p.ravel() if value > 0)
        self.assertAlmostEqual(entropy_set(probabilities(tensor)).h123, expected, delta=1e-12)


class MutualInformationTests(SimpleTestCase):
    def test_independent_uniform(self):
        self.assertAlmostEqual(mutual_info_2d(probabilities(uniform_tensor()), ("geo", "org")), 0.0, delta=1e-12)

    def test_copy_channel(self):
        counts = np.zeros((2, 2, 1), dtype=int)
        counts[0, 0, 0] = counts[1, 1, 0] = 3
        model = probabilities(ContingencyTensor.from_counts(counts))
        self.assertAlmostEqual(mutual_info_2d(model, (0, 1)), 1.0, delta=1e-12)

    def test_same_axis_twice(self):
        with self.assertRaises(InvalidAxesError):
            mutual_info_2d(probabilities(uniform_tensor()), ("tech", 2))

    def test_kl_form(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            model = probabilities(random_tensor(rng, sparsity=0.2))
            p_ab = model.p_ij
            outer = np.outer(model.p_i, model.p_j)
            mask = p_ab > 0
            expected = float((p_ab[mask] * np.log2(p_ab[mask] / outer[mask])).sum())
            value = mutual_info_2d(model, ("geo", "org"))
            self.assertAlmostEqual(value, expected, delta=1e-9)
            self.assertGreaterEqual(value, -1e-12)

    def test_pairwise_keys(self):
        informations = pairwise_informations(probabilities(xor_tensor()))
        self.assertEqual(sorted(informations), ["geo-org", "geo-tech", "org-tech"])
        for value in informations.values():
            self.assertAlmostEqual(value, 0.0, delta=1e-12)


class SynergyTests(SimpleTestCase):
    def test_xor_parity(self):
        model = probabilities(xor_tensor())
        self.assertAlmostEqual(synergy_3d(model), -1.0, delta=1e-12)
        power = transmission_power(entropy_set(model))
        self.assertAlmostEqual(power.tau, 1.0, delta=1e-12)

    def test_independent_uniform(self):
        self.assertAlmostEqual(synergy_3d(probabilities(uniform_tensor())), 0.0, delta=1e-12)

    def test_correlated_diagonal(self):
        counts = np.zeros((2, 2, 2), dtype=int)
        counts[0, 0, 0] = counts[1, 1, 1] = 1
        self.assertAlmostEqual(synergy_3d(probabilities(ContingencyTensor.from_counts(counts))), 1.0, delta=1e-12)

    def test_exact_products_are_independent(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            shape = rng.integers(2, 6, size=3)
            # integer weights over their sums give exact rational marginals
            weights = [rng.integers(1, 9, size=size) for size in shape]
            scale = int(np.prod([w.sum() for w in weights]))
            tensor = product_tensor(*(w / w.sum() for w in weights), scale=scale)
            self.assertAlmostEqual(synergy_3d(probabilities(tensor)), 0.0, delta=1e-12)

    def test_rounded_products_are_nearly_independent(self):
        rng = np.random.default_rng(6)
        for _ in range(500):
            shape = rng.integers(2, 8, size=3)
            marginals = [rng.dirichlet(np.ones(size)) for size in shape]
            tensor = product_tensor(*marginals, scale=int(rng.integers(10**5, 10**6)))
            self.assertLessEqual(abs(synergy_3d(probabilities(tensor))), 5e-3)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            tensor = random_tensor(rng, shape=tuple(rng.integers(1, 5, size=3)), high=9, sparsity=0.3)
            self.assertAlmostEqual(
                synergy_3d(probabilities(tensor)), brute_force_synergy(tensor.counts), delta=1e-10
            )

    def test_axis_permutation_invariance(self):
        tensor = random_tensor(np.random.default_rng(17), shape=(4, 3, 5))
        expected = synergy_3d(probabilities(tensor))
        for order in itertools.permutations(range(3)):
            self.assertAlmostEqual(synergy_3d(probabilities(tensor.permuted(order))), expected, delta=1e-12)

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(19)
        tensor = random_tensor(rng, shape=(4, 3, 5))
        shuffled = tensor.counts[rng.permutation(4)][:, rng.permutation(3)][:, :, rng.permutation(5)]
        self.assertAlmostEqual(
            synergy_3d(probabilities(ContingencyTensor.from_counts(shuffled))),
            synergy_3d(probabilities(tensor)),
            delta=1e-12,
        )

    def test_scaling_invariance(self):
        tensor = random_tensor(np.random.default_rng(23), shape=(3, 3, 3))
        scaled = ContingencyTensor.from_counts(tensor.counts * 7)
        a = entropy_set(probabilities(tensor))
        b = entropy_set(probabilities(scaled))
        for name in ("h1", "h2", "h3", "h12", "h13", "h23", "h123"):
            self.assertAlmostEqual(getattr(a, name), getattr(b, name), delta=1e-12)
        self.assertAlmostEqual(a.synergy, b.synergy, delta=1e-12)

    def test_single_category_axis(self):
        rng = np.random.default_rng(29)
        for shape in ((1, 4, 5), (3, 1, 5), (3, 4, 1)):
            tensor = random_tensor(rng, shape=shape)
            self.assertAlmostEqual(synergy_3d(probabilities(tensor)), 0.0, delta=1e-12)
