import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shape4d.constellation import is_orthant_symmetric, expand_orthant_symmetric
from shape4d.formats import builtin, os128_seed, qam16_seed
from shape4d.gmi import AwgnSpec, chunk_rng
from shape4d.optimize import (
    CrnEvaluator,
    OptimizerConfig,
    binary_switching,
    optimize_os,
    optimize_unconstrained,
)

FAST = OptimizerConfig(target_snr_db=6.0, mc_samples=3000, max_iterations=3)


def _hamming_of_nearest(c):
    """Bit differences between each point and its nearest neighbours."""
    d = np.sum((c.points[:, None] - c.points[None]) ** 2, axis=2)
    np.fill_diagonal(d, np.inf)
    out = []
    for i in range(c.M):
        for j in np.flatnonzero(np.isclose(d[i], d[i].min())):
            out.append(int(np.sum(c.labels[i] != c.labels[j])))
    return out


class TestConfig:
    @pytest.mark.parametrize("kw", [{"step": 0.0}, {"tol": 0.0}, {"decay": 1.0}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            OptimizerConfig(**kw)

    def test_trace_csv_header(self):
        _, tr = binary_switching(builtin("qpsk"), FAST)
        assert tr.to_csv().splitlines()[0] == "iter,gmi,stderr,step,accepted"


class TestBinarySwitching:
    def test_fixes_natural_qpsk(self):
        q = builtin("qpsk")
        bad = q.with_labels(np.array([[0, 0], [1, 1], [0, 1], [1, 0]])[np.argsort(q.label_ints)])
        assert max(_hamming_of_nearest(bad)) == 2
        out, tr = binary_switching(bad, OptimizerConfig(target_snr_db=3.0, mc_samples=5000))
        assert max(_hamming_of_nearest(out)) == 1
        np.testing.assert_array_equal(out.points, bad.points)

    def test_gray_pm_qpsk_untouched(self):
        c = builtin("pm-qpsk")
        out, tr = binary_switching(c, FAST)
        assert tr.rows[0].accepted == 0 and len(tr.rows) == 1
        np.testing.assert_array_equal(out.labels, c.labels)

    def test_deterministic(self):
        c = builtin("16qam").with_labels(np.roll(builtin("16qam").labels, 3, axis=0))
        a, _ = binary_switching(c, FAST)
        b, _ = binary_switching(c, FAST)
        np.testing.assert_array_equal(a.labels, b.labels)


class TestSwapState:
    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 15), st.integers(0, 15))
    def test_incremental_matches_full(self, a, b):
        if a == b:
            return
        c = builtin("16qam")
        ev = CrnEvaluator(c.M, c.N, AwgnSpec(6.0), 2000, chunk_rng(0, 0))
        state = ev.swap_state(c.points, c.labels)
        g0 = ev.gmi(c.points, c.labels)[0]
        assert state.gmi == pytest.approx(g0, abs=1e-9)
        gain = state.swap_gain(a, b)
        lab = np.array(c.labels)
        lab[[a, b]] = lab[[b, a]]
        assert gain == pytest.approx(ev.gmi(c.points, lab)[0] - g0, abs=1e-9)
        state.commit(a, b)
        assert state.gmi == pytest.approx(ev.gmi(c.points, lab)[0], abs=1e-9)


class TestOrthantAscent:
    def test_output_is_orthant_symmetric_and_normalized(self):
        seed, tr = optimize_os(qam16_seed(), OptimizerConfig(target_snr_db=8.0, mc_samples=3000, max_iterations=2))
        c = tr.final_constellation
        assert is_orthant_symmetric(c)
        assert c.mean_energy == pytest.approx(2.0)
        assert np.all(seed.points > 0)

    def test_single_pass_never_worse_on_its_batch(self):
        cfg = OptimizerConfig(target_snr_db=9.5, mc_samples=4000, max_iterations=1, step=0.05)
        start = os128_seed()
        seed, _ = optimize_os(start, cfg)
        ev = CrnEvaluator(128, 4, cfg.spec, cfg.mc_samples, chunk_rng(cfg.seed, 0))
        c0 = expand_orthant_symmetric(start)
        c0 = c0.scaled(np.sqrt(2.0 / c0.mean_energy))
        c1 = expand_orthant_symmetric(seed)
        c1 = c1.scaled(np.sqrt(2.0 / c1.mean_energy))
        assert ev.gmi(c1.points, c1.labels)[0] >= ev.gmi(c0.points, c0.labels)[0] - 1e-12

    def test_rejects_zero_coordinate(self):
        from shape4d.constellation import FirstOrthantSeed

        with pytest.raises(ValueError):
            optimize_os(FirstOrthantSeed([[0.0, 1.0], [1.0, 1.0]], [[0], [1]]), FAST)


class TestUnconstrained:
    def test_power_and_labels_preserved(self):
        c = builtin("16qam")
        out, tr = optimize_unconstrained(c, OptimizerConfig(target_snr_db=8.0, mc_samples=2000, max_iterations=40, step=0.05))
        assert out.mean_energy == pytest.approx(2.0)
        np.testing.assert_array_equal(out.labels, c.labels)
        assert len(tr.rows) >= 1

    def test_deterministic(self):
        c = builtin("qpsk")
        cfg = OptimizerConfig(target_snr_db=3.0, mc_samples=1000, max_iterations=12, step=0.1)
        a, _ = optimize_unconstrained(c, cfg)
        b, _ = optimize_unconstrained(c, cfg)
        np.testing.assert_array_equal(a.points, b.points)

    def test_strict_acceptance_freezes_qpsk(self):
        # QPSK is optimal; with a significance requirement no noise-driven move passes
        c = builtin("qpsk")
        cfg = OptimizerConfig(target_snr_db=3.0, mc_samples=4000, max_iterations=16, step=0.02, accept_sigma=3.0)
        out, _ = optimize_unconstrained(c, cfg)
        np.testing.assert_allclose(out.points, c.points)
