import numpy as np
import pytest

from irpulse.errors import ValidationError
from irpulse.evaluation import evaluate, relative_error, resample_mean, rmse, write_report
from irpulse.model import IhrSeries


def series(bpm, t=None):
    bpm = np.asarray(bpm, dtype=float)
    if t is None:
        t = np.arange(len(bpm), dtype=float)
    return IhrSeries(timestamps_s=np.asarray(t, float), bpm=bpm)


class TestResampleMean:
    def test_constant(self):
        out = resample_mean(series(np.full(100, 72.0)), 10.0)
        assert np.allclose(out.bpm, 72.0)

    def test_two_samples_one_window(self):
        out = resample_mean(series([60.0, 80.0], t=[0.0, 2.0]), 2.0)
        assert len(out) == 1
        assert out.bpm[0] == pytest.approx(70.0)

    def test_trailing_partial_dropped(self):
        out = resample_mean(series(np.full(66, 60.0), t=np.arange(66.0)), 30.0)
        assert len(out) == 2

    def test_identity_values_at_native_step(self):
        b = np.array([60.0, 61.0, 62.0, 63.0])
        out = resample_mean(series(b), 1.0)
        # interior windows hold exactly one sample; the final window also
        # absorbs the closing boundary sample
        assert np.allclose(out.bpm[:2], b[:2])

    def test_too_short(self):
        with pytest.raises(ValidationError, match="shorter"):
            resample_mean(series([60.0, 61.0], t=[0.0, 1.0]), 30.0)


class TestRmse:
    def test_identical_zero(self):
        a = series([60.0, 70.0, 65.0])
        assert rmse(a, a) == 0.0

    def test_constant_offset(self):
        a = series(np.full(10, 63.0))
        b = series(np.full(10, 60.0))
        assert rmse(a, b) == pytest.approx(3.0, rel=1e-12)

    def test_hand_value(self):
        a = series([60.0, 70.0])
        b = series([62.0, 66.0])
        assert rmse(a, b) == pytest.approx(np.sqrt(10.0), rel=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        a = series(60 + rng.uniform(size=20))
        b = series(60 + rng.uniform(size=20))
        assert rmse(a, b) == rmse(b, a)

    def test_no_overlap(self):
        a = series([60.0, 61.0], t=[0.0, 1.0])
        b = series([60.0, 61.0], t=[5.0, 6.0])
        with pytest.raises(ValidationError, match="overlap"):
            rmse(a, b)

    def test_alignment_interpolates_denser_grid(self):
        a = series(np.full(21, 60.0), t=np.linspace(0, 10, 21))
        b = series(np.full(6, 66.0), t=np.linspace(0, 10, 6))
        assert rmse(a, b) == pytest.approx(6.0, rel=1e-9)


class TestRelativeError:
    def test_identical_zero(self):
        a = series([70.0, 71.0])
        assert relative_error(a, a) == 0.0

    def test_five_percent(self):
        a = series(np.full(5, 63.0))
        truth = series(np.full(5, 60.0))
        assert relative_error(a, truth) == pytest.approx(5.0, rel=1e-12)

    def test_hand_value(self):
        a = series([66.0, 54.0])
        truth = series([60.0, 60.0])
        assert relative_error(a, truth) == pytest.approx(10.0, rel=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        a = series(60 + rng.uniform(size=15))
        truth = series(60 + rng.uniform(size=15))
        r1 = relative_error(a, truth)
        r2 = relative_error(series(2.0 * a.bpm), series(2.0 * truth.bpm))
        assert r2 == pytest.approx(r1, rel=1e-12)


class TestEvaluate:
    def test_report_structure(self):
        t = np.arange(0.0, 120.0, 1.0)
        rec = series(np.full(len(t), 72.0), t=t)
        truth = series(np.full(len(t), 70.0), t=t)
        rep = evaluate(rec, truth, label="d1")
        assert set(rep.rmse_bpm) == {1.0, 10.0, 30.0}
        for g in rep.rmse_bpm:
            assert rep.rmse_bpm[g] == pytest.approx(2.0, rel=1e-9)
        assert rep.relative_error_pct == pytest.approx(100 * 2 / 70, rel=1e-9)
        assert all(n >= 1 for n in rep.n_points.values())

    def test_write_report(self, tmp_path):
        t = np.arange(0.0, 60.0, 1.0)
        rep = evaluate(series(np.full(60, 60.0), t=t), series(np.full(60, 60.0), t=t),
                       label="d1")
        path = tmp_path / "report.txt"
        write_report([rep], path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("dataset\t")
        assert lines[1].split("\t")[0] == "d1"
