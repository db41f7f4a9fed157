import json

import numpy as np
import pytest

from logavgcov.mc import empirical_logavg_cov
from logavgcov.models import AutocovModel, reference_arma
from logavgcov.specfun import trigamma
from logavgcov.transform import BinPartition


class TestEmpiricalLogavgCov:
    def test_too_few_reps_rejected(self):
        with pytest.raises(ValueError, match="at least 100"):
            empirical_logavg_cov(
                AutocovModel.white(), BinPartition(p=8, m=2), 50, seed=1
            )

    def test_remainder_partition_rejected(self):
        with pytest.raises(ValueError, match="divisible"):
            empirical_logavg_cov(
                AutocovModel.white(), BinPartition(p=9, m=2), 200, seed=1
            )

    @pytest.mark.parametrize("m", [1, 2, 5])
    def test_white_noise_midsize(self, m):
        p = 20
        report = empirical_logavg_cov(
            AutocovModel.white(), BinPartition(p=p, m=m), 20_000, seed=5
        )
        T = p // m
        assert report.empirical_cov.shape == (T, T)
        np.testing.assert_array_equal(report.empirical_cov, report.empirical_cov.T)
        assert np.all(report.std_err > 0)
        np.testing.assert_array_equal(
            report.formula_cov.matrix, trigamma(m / 2.0) * np.eye(T)
        )
        # independence makes the formula exact here; 4 SE at modest n
        assert report.max_dev_in_se_units < 4.0

    def test_report_serialization(self):
        report = empirical_logavg_cov(
            AutocovModel.white(2.0), BinPartition(p=8, m=2), 200, seed=9
        )
        payload = json.loads(report.to_json())
        assert payload["n_reps"] == 200 and payload["seed"] == 9
        assert payload["T"] == 4
        np.testing.assert_allclose(payload["empirical_cov"], report.empirical_cov)
        rows = report.to_rows()
        assert len(rows) == 16
        assert "max |emp - formula|" in report.summary()

    def test_worker_count_bitwise_identical(self):
        model = reference_arma()
        part = BinPartition(p=20, m=2)
        r1 = empirical_logavg_cov(model, part, 400, seed=11, workers=1)
        r2 = empirical_logavg_cov(model, part, 400, seed=11, workers=2)
        assert r1.to_json() == r2.to_json()
        np.testing.assert_array_equal(r1.empirical_cov, r2.empirical_cov)
        np.testing.assert_array_equal(r1.std_err, r2.std_err)

    def test_se_shrinks_like_sqrt_n(self):
        model = AutocovModel.white()
        part = BinPartition(p=8, m=2)
        se_small = empirical_logavg_cov(model, part, 10_000, seed=3).std_err
        se_big = empirical_logavg_cov(model, part, 20_000, seed=3).std_err
        ratio = np.mean(se_big / se_small)
        target = 1.0 / np.sqrt(2.0)
        assert target * 0.9 < ratio < target * 1.1
