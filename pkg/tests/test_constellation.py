import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shape4d.constellation import (
    FirstOrthantSeed,
    LabeledConstellation,
    expand_orthant_symmetric,
    extract_first_orthant,
    first_orthant_points,
    is_orthant_symmetric,
    labeling_matrix,
    mirror_matrices,
    normalize,
)
from shape4d.formats import (
    BUILTIN_NAMES,
    OS128_T,
    builtin,
    d4_points,
    d4_shells,
    d4_spherical_subset,
    os128_seed,
    pm16qam_seed,
    qam16_seed,
)


def _same_rows(a: LabeledConstellation, b: LabeledConstellation, atol=1e-12) -> bool:
    ka = np.hstack([a.labels, np.round(a.points / atol) * atol])
    kb = np.hstack([b.labels, np.round(b.points / atol) * atol])
    oa = np.lexsort(ka.T[::-1])
    ob = np.lexsort(kb.T[::-1])
    return np.array_equal(a.labels[oa], b.labels[ob]) and np.allclose(a.points[oa], b.points[ob], atol=atol)


class TestMirrorMatrices:
    def test_one_dimension(self):
        ms = mirror_matrices(1)
        np.testing.assert_array_equal(ms.matrices[:, 0, 0], [1.0, -1.0])

    def test_two_dimensions_order(self):
        ms = mirror_matrices(2)
        np.testing.assert_array_equal(ms.signs, [[1, 1], [-1, 1], [1, -1], [-1, -1]])

    def test_four_dimensions_first_is_identity(self):
        ms = mirror_matrices(4)
        assert ms.matrices.shape == (16, 4, 4)
        np.testing.assert_array_equal(ms.matrices[0], np.eye(4))

    @pytest.mark.parametrize("N", [0, 17, -1])
    def test_out_of_range(self, N):
        with pytest.raises(ValueError):
            mirror_matrices(N)

    @given(st.integers(1, 10))
    def test_sign_pattern_matches_labels(self, N):
        ms = mirror_matrices(N)
        np.testing.assert_array_equal(ms.signs, 1 - 2 * ms.orthant_labels.astype(float))
        assert len(np.unique(ms.signs, axis=0)) == 2**N


class TestLabeledConstellation:
    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValueError, match="enumerate"):
            LabeledConstellation([[0.0], [1.0]], [[0], [0]])

    def test_rejects_duplicate_points(self):
        with pytest.raises(ValueError, match="duplicate"):
            LabeledConstellation([[1.0], [1.0]], [[0], [1]])

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            LabeledConstellation([[0.0], [1.0], [2.0]], [[0, 0], [0, 1], [1, 0]])

    def test_arrays_are_read_only(self):
        c = builtin("pm-qpsk")
        with pytest.raises(ValueError):
            c.points[0, 0] = 5.0

    def test_map_bits_inverts_labels(self):
        c = builtin("4d-os128")
        np.testing.assert_array_equal(c.map_bits(c.labels), c.points)


class TestExpandExtract:
    def test_gray_16qam_seed_roundtrip(self):
        c = expand_orthant_symmetric(qam16_seed())
        assert c.M == 16 and c.m == 4
        rep = extract_first_orthant(c)
        assert rep.is_symmetric
        np.testing.assert_array_equal(np.sort(rep.seed.points, axis=0), np.sort(qam16_seed().points, axis=0))

    def test_16qam_is_gray(self):
        # nearest neighbours of Gray 16QAM differ in exactly one bit
        c = builtin("16qam")
        d = np.sum((c.points[:, None] - c.points[None]) ** 2, -1)
        dmin = d[d > 0].min()
        i, j = np.nonzero(np.isclose(d, dmin))
        assert np.all(np.sum(c.labels[i] != c.labels[j], axis=1) == 1)

    def test_16qam_block_layout(self):
        c = expand_orthant_symmetric(qam16_seed())
        # second block is mirrored across the first axis with orthant bits 1,0
        np.testing.assert_array_equal(c.points[4:8], qam16_seed().points * [-1, 1])
        np.testing.assert_array_equal(c.labels[4:8, :2], [[1, 0]] * 4)

    def test_pm16qam_from_seed(self):
        c = expand_orthant_symmetric(pm16qam_seed())
        assert c.M == 256
        assert set(np.unique(c.points)) == {-3.0, -1.0, 1.0, 3.0}
        assert _same_rows(normalize(c), builtin("pm-16qam"))

    @pytest.mark.parametrize("name", ["16qam", "pm-16qam", "pm-64qam", "4d-os128", "pm-qpsk"])
    def test_roundtrip_builtins(self, name):
        c = builtin(name)
        rep = extract_first_orthant(c)
        assert rep.is_symmetric, rep.violation
        assert _same_rows(expand_orthant_symmetric(rep.seed), c)

    def test_os128_seed_alphabet(self):
        c = builtin("4d-os128")
        seed = extract_first_orthant(c).seed
        assert seed.points.shape == (8, 4)
        scale = np.sqrt(2.0 / np.mean(np.sum(os128_seed().points ** 2, axis=1)))
        t = np.array(OS128_T) * scale
        assert np.all(np.min(np.abs(seed.points[..., None] - t), axis=-1) < 1e-12)

    def test_os128_sign_bits_are_orthant_bits(self):
        c = builtin("4d-os128")
        np.testing.assert_array_equal(c.labels[:, :4], (c.points < 0).astype(np.uint8))

    def test_perturbed_16qam_is_not_symmetric(self):
        c = builtin("16qam")
        pts = np.array(c.points)
        pts[5, 0] += 0.01
        rep = extract_first_orthant(c.with_points(pts))
        assert not rep.is_symmetric
        assert "mirror" in rep.violation

    @pytest.mark.parametrize("name", ["128sp-16qam", "7b4d-2a8psk", "l4-128"])
    def test_non_os_builtins(self, name):
        assert not is_orthant_symmetric(builtin(name))

    def test_rejects_zero_coordinate(self):
        seed = FirstOrthantSeed([[0.0, 1.0], [1.0, 1.0]], [[0], [1]])
        with pytest.raises(ValueError, match="strictly positive"):
            expand_orthant_symmetric(seed)

    def test_rejects_negative_seed(self):
        with pytest.raises(ValueError):
            FirstOrthantSeed([[-1.0, 1.0], [1.0, 1.0]], [[0], [1]])

    def test_rejects_label_count_mismatch(self):
        with pytest.raises(ValueError):
            FirstOrthantSeed([[1.0, 1.0], [2.0, 1.0], [1.0, 2.0]], [[0], [1], [1]])

    def test_first_orthant_points_of_sp128(self):
        seed = first_orthant_points(builtin("128sp-16qam"))
        assert seed.points.shape == (8, 4)
        levels = np.unique(np.round(seed.points, 9))
        assert len(levels) == 2

    @settings(max_examples=30, deadline=None)
    @given(
        N=st.integers(1, 4),
        q=st.integers(0, 3),
        data=st.data(),
    )
    def test_random_seed_roundtrip(self, N, q, data):
        n = 2**q
        coords = data.draw(
            st.lists(
                st.lists(st.floats(0.05, 5.0, allow_nan=False), min_size=N, max_size=N),
                min_size=n, max_size=n, unique_by=lambda r: tuple(round(v, 6) for v in r),
            )
        )
        perm = data.draw(st.permutations(range(n)))
        seed = FirstOrthantSeed(np.array(coords), labeling_matrix(q)[list(perm)])
        c = expand_orthant_symmetric(seed)
        counts = np.bincount(c.labels[:, :N] @ (1 << np.arange(N - 1, -1, -1)), minlength=2**N)
        assert np.all(counts == n)
        np.testing.assert_array_equal(c.labels[:, :N], (c.points < 0).astype(np.uint8))
        rep = extract_first_orthant(c)
        assert rep.is_symmetric
        assert _same_rows(expand_orthant_symmetric(rep.seed), c)
        # mirroring preserves norms
        e = np.sort(np.sum(c.points**2, axis=1))
        np.testing.assert_allclose(e, np.sort(np.tile(np.sum(seed.points**2, axis=1), 2**N)))


class TestNormalize:
    def test_scaling_roundtrip(self):
        c = builtin("4d-os128")
        np.testing.assert_allclose(normalize(c.scaled(3.0), 2.0).points, c.points, atol=1e-12)

    def test_pm16qam_alphabet(self):
        # per-dimension energy (1 + 9) / 2 = 5 must become Es / 4 = 0.5
        c = builtin("pm-16qam")
        np.testing.assert_allclose(np.unique(np.abs(c.points)), np.array([1.0, 3.0]) / np.sqrt(10.0))
        c4 = normalize(c, 4.0)
        np.testing.assert_allclose(np.unique(np.abs(c4.points)), np.array([1.0, 3.0]) / np.sqrt(5.0))

    def test_labels_unchanged(self):
        c = builtin("l4-128")
        np.testing.assert_array_equal(normalize(c, 7.0).labels, c.labels)

    def test_all_zero(self):
        c = LabeledConstellation(np.zeros((1, 2)), np.zeros((1, 0)))
        with pytest.raises(ValueError, match="all-zero"):
            normalize(c, 2.0)

    @given(st.sampled_from(BUILTIN_NAMES), st.floats(0.1, 10.0))
    @settings(deadline=None, max_examples=20)
    def test_idempotent(self, name, es):
        c = normalize(builtin(name), es)
        assert abs(c.mean_energy - es) <= 1e-9 * es
        np.testing.assert_allclose(normalize(c, es).points, c.points, rtol=1e-12)


class TestBuiltins:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_normalized(self, name):
        c = builtin(name)
        assert abs(c.mean_energy - 2.0) < 2e-9

    def test_shapes(self):
        c = builtin("4d-os128")
        assert (c.M, c.m, c.N) == (128, 7, 4)
        assert builtin("pm-qpsk").M == 16

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown format"):
            builtin("pm-1024qam")

    def test_sp128_is_even_parity_subset(self):
        full = builtin("pm-16qam")
        sp = builtin("128sp-16qam")
        fullset = {tuple(np.round(p, 9)) for p in full.points}
        assert all(tuple(np.round(p, 9)) in fullset for p in sp.points)
        # the dropped eighth bit is the parity of the seven label bits
        levels = np.round(np.abs(sp.points) * np.sqrt(10.0)).astype(int)
        a4 = (levels[:, 3] == 3).astype(int)
        np.testing.assert_array_equal(a4, sp.labels.sum(axis=1) % 2)

    def test_2a8psk_constant_modulus(self):
        c = builtin("7b4d-2a8psk")
        np.testing.assert_allclose(c.energies, 2.0)
        rx = np.hypot(c.points[:, 0], c.points[:, 1])
        ry = np.hypot(c.points[:, 2], c.points[:, 3])
        ratios = np.minimum(rx, ry) / np.maximum(rx, ry)
        np.testing.assert_allclose(ratios, 0.59)


class TestD4:
    def test_kissing_shell(self):
        shells = d4_shells(np.sqrt(2.0) + 1e-9)
        assert len(shells[2.0]) == 24
        assert np.all(np.sum(shells[2.0], axis=1) % 2 == 0)

    def test_shell_sizes(self):
        sizes = {k: len(v) for k, v in d4_shells(np.sqrt(6.0) + 1e-9).items()}
        assert sizes == {0.0: 1, 2.0: 24, 4.0: 24, 6.0: 96}
        assert sum(sizes.values()) >= 128

    def test_points_sorted(self):
        pts = d4_points(2.5, (0.5, 0.5, 0.5, 0.5))
        d2 = np.sum((pts - 0.5) ** 2, axis=1)
        assert np.all(np.diff(d2) >= -1e-12)

    def test_l4_128(self):
        c = d4_spherical_subset(128)
        assert c.M == 128 and abs(c.mean_energy - 2.0) < 1e-12
        np.testing.assert_allclose(c.points.mean(axis=0), 0.0, atol=1e-12)
        # all points are a common affine image of D4 points
        raw = d4_points(4.0)[:128]
        shift = raw - raw.mean(axis=0)
        scale = np.sqrt(2.0 / np.mean(np.sum(shift**2, axis=1)))
        np.testing.assert_allclose(c.points, shift * scale, atol=1e-12)

    def test_antipodal_pair(self):
        c = d4_spherical_subset(2)
        np.testing.assert_allclose(c.points[0], -c.points[1])

    def test_insufficient_points(self):
        with pytest.raises(ValueError, match="lattice points"):
            d4_spherical_subset(128, search_radius=1.0)

    def test_requires_power_of_two(self):
        with pytest.raises(ValueError):
            d4_spherical_subset(24)
