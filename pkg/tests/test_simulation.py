import json
import math

import numpy as np
import pytest

from atomdecon import simulation as sim
from atomdecon.errors import DegenerateModel, EmptyInput
from atomdecon.numerics import integrate
from atomdecon.simulation import GammaFamily, MixtureFamily, ModelSpec, NormalFamily

FAMILIES = [NormalFamily(3.0, 9.0), GammaFamily(8.0), MixtureFamily((0.5, 0.5), (-2.0, 2.0), (1.0, 1.0))]
IDS = ["normal", "gamma", "mixture"]


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_density_integrates_to_one(family):
    lo, hi = family.support()
    assert integrate(family.pdf, lo, hi, tol=1e-10, panels=64) == pytest.approx(1.0, abs=1e-6)
    assert family.cf(0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_cf_matches_monte_carlo(family):
    rng = np.random.Generator(np.random.Philox(99))
    v = family.draw(rng, 10**5)
    for t in (0.5, 1.0, 2.0):
        assert abs(family.cf(t) - np.mean(np.exp(1j * t * v))) < 5 / math.sqrt(v.size)


@pytest.mark.parametrize("family", FAMILIES, ids=IDS)
def test_family_moments(family):
    lo, hi = family.support()
    mean = integrate(lambda x: x * family.pdf(x), lo, hi, tol=1e-10, panels=64)
    second = integrate(lambda x: x * x * family.pdf(x), lo, hi, tol=1e-9, panels=64)
    assert mean == pytest.approx(family.expectation, abs=1e-6)
    assert second - mean**2 == pytest.approx(family.var, abs=1e-5)


def test_gamma_sampler_moments():
    # numpy's standard_gamma (Marsaglia-Tsang for shape >= 1)
    rng = np.random.Generator(np.random.Philox(3))
    fam = GammaFamily(8.0, 2.0)
    v = fam.draw(rng, 10**6)
    assert abs(v.mean() - 4.0) < 4 * math.sqrt(2.0) / 1000
    assert v.var() == pytest.approx(2.0, rel=0.01)
    third = np.mean((v - 4.0) ** 3)
    assert third == pytest.approx(2 * 8 / 2**3, rel=0.05)


class TestModelSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelSpec(1.0, NormalFamily(0, 1), 1.0)
        with pytest.raises(ValueError):
            ModelSpec(0.1, NormalFamily(0, 1), -1.0)

    def test_moments(self, normal_model):
        assert normal_model.var_y == pytest.approx(8.91)
        assert normal_model.mean_x == pytest.approx(2.7)

    def test_cf_x(self, normal_model):
        t = 0.7
        expected = (0.1 + 0.9 * NormalFamily(3.0, 9.0).cf(t)) * math.exp(-t * t / 2)
        assert normal_model.cf_x(t) == pytest.approx(expected)


@pytest.mark.parametrize("text,family", [
    ("normal:3,9", NormalFamily(3.0, 9.0)),
    ("gamma:8", GammaFamily(8.0)),
    ("gamma:8,2", GammaFamily(8.0, 2.0)),
    ("mixture:0.5,-2,1,0.5,2,1", MixtureFamily((0.5, 0.5), (-2.0, 2.0), (1.0, 1.0))),
])
def test_parse_family(text, family):
    parsed = sim.parse_family(text)
    assert parsed.describe() == family.describe()
    assert parsed.var == pytest.approx(family.var)


@pytest.mark.parametrize("text", ["cauchy:1", "normal:3", "normal:a,b", "mixture:0.5,1", ""])
def test_parse_family_rejects(text):
    with pytest.raises(ValueError):
        sim.parse_family(text)


class TestNSR:
    def test_reference_model(self, normal_model):
        assert sim.nsr(normal_model) == pytest.approx(100 / 8.91, abs=1e-10)
        assert sim.nsr(normal_model) == pytest.approx(11.22, abs=0.01)

    def test_trivial_cases(self):
        assert sim.nsr(ModelSpec(0.0, NormalFamily(3.0, 9.0), 0.0)) == 0.0
        assert sim.nsr(ModelSpec(0.0, NormalFamily(0.0, 1.0), 1.0)) == pytest.approx(100.0)

    def test_degenerate(self):
        class Flat(NormalFamily):
            @property
            def var(self):
                return 0.0

        with pytest.raises(DegenerateModel):
            sim.nsr(ModelSpec(0.0, Flat(0.0, 1.0), 1.0))


class TestDrawSample:
    def test_deterministic(self, normal_model):
        a = sim.draw_sample(normal_model, 500, 42)
        b = sim.draw_sample(normal_model, 500, 42)
        assert np.array_equal(a.values, b.values)
        c = sim.draw_sample(normal_model, 500, 43)
        assert not np.array_equal(a.values, c.values)

    @pytest.mark.parametrize("family", FAMILIES, ids=IDS)
    def test_prefix_stable(self, family):
        model = ModelSpec(0.3, family, 0.5)
        short = sim.draw_sample(model, 100, (7, 1))
        long = sim.draw_sample(model, 1000, (7, 1))
        assert np.array_equal(short.values, long.values[:100])

    def test_near_full_atom(self):
        s = sim.draw_sample(ModelSpec(0.999, NormalFamily(3.0, 9.0), 0.0), 1000, 1)
        assert np.mean(s.values == 0.0) > 0.99
        assert s.sigma == 0.0

    def test_noiseless_mean(self):
        fam = NormalFamily(3.0, 9.0)
        s = sim.draw_sample(ModelSpec(0.0, fam, 0.0), 4000, 5)
        assert abs(s.values.mean() - 3.0) < 4 * 3.0 / math.sqrt(4000)

    def test_large_sample_moments(self, normal_model):
        n = 10**6
        s = sim.draw_sample(normal_model, n, 2024)
        sd_x = math.sqrt(9.91)
        assert abs(s.values.mean() - 2.7) < 4 * sd_x / math.sqrt(n)
        assert s.values.var() == pytest.approx(9.91, rel=0.01)

    def test_replication_streams_disjoint(self, normal_model):
        draws = [sim.draw_sample(normal_model, 2000, (1, 0, r)).values for r in range(20)]
        pooled = np.concatenate(draws)
        assert np.unique(pooled).size == pooled.size
        corr = np.corrcoef(draws[0], draws[1])[0, 1]
        assert abs(corr) < 4 / math.sqrt(2000)

    def test_validation(self, normal_model):
        with pytest.raises(ValueError):
            sim.draw_sample(normal_model, 0, 1)


class TestMCStudy:
    def test_reference_run(self, normal_model):
        rows = sim.mc_study(normal_model, 1000, [0.5], 200, 1)
        r = rows[0]
        assert 0.080 <= r.sample_mean <= 0.112
        assert 0.040 <= r.sample_sd <= 0.065
        assert r.estimates.shape == (200,)
        assert r.corrected_sd == pytest.approx(0.0700, abs=2e-3)

    def test_low_noise_run(self):
        model = ModelSpec(0.1, NormalFamily(3.0, 9.0), 0.3)
        r = sim.mc_study(model, 500, [0.45], 200, 1)[0]
        assert 0.085 <= r.sample_mean <= 0.110
        assert 0.020 <= r.sample_sd <= 0.036

    def test_determinism_and_workers(self, normal_model):
        a = sim.mc_study(normal_model, 200, [0.5, 0.6], 6, 9)
        b = sim.mc_study(normal_model, 200, [0.5, 0.6], 6, 9)
        c = sim.mc_study(normal_model, 200, [0.5, 0.6], 6, 9, workers=2)
        for x, y, z in zip(a, b, c):
            assert np.array_equal(x.estimates, y.estimates)
            assert np.array_equal(x.estimates, z.estimates)
        assert not np.array_equal(a[0].estimates, a[1].estimates)

    def test_validation(self, normal_model):
        with pytest.raises(ValueError):
            sim.mc_study(normal_model, 100, [0.5], 1, 0)

    def test_serialization(self, normal_model):
        rows = sim.mc_study(normal_model, 200, [0.5, 0.6], 4, 3)
        text = sim.summaries_to_csv(rows)
        lines = text.splitlines()
        assert lines[0] == ",".join(sim.CSV_COLUMNS)
        assert len(lines) == 3
        data = json.loads(sim.summaries_to_json(rows))
        for line, rec in zip(lines[1:], data):
            fields = line.split(",")
            assert float(fields[3]) == rec["mean"] and float(fields[4]) == rec["sd"]
            assert len(rec["estimates"]) == 4


class TestHistogram:
    def test_single_bin(self):
        edges, counts = sim.histogram([1, 2, 3], 1)
        assert list(counts) == [3] and len(edges) == 2

    def test_right_closed_last_bin(self):
        edges, counts = sim.histogram([0, 1], 2)
        assert list(counts) == [1, 1]

    def test_counts_sum(self, rng):
        vals = rng.normal(size=137)
        edges, counts = sim.histogram(vals)
        assert counts.sum() == 137 and len(counts) == 20
        assert edges[0] == vals.min() and edges[-1] == vals.max()

    def test_errors(self):
        with pytest.raises(EmptyInput):
            sim.histogram([], 3)
        with pytest.raises(ValueError):
            sim.histogram([1.0], 0)


def test_presets():
    t1, t2 = sim.PRESETS["table1"], sim.PRESETS["table2"]
    assert t1["bandwidths"] == [0.5, 0.55, 0.6, 0.65] and t1["n"] == 1000
    assert t2["bandwidths"] == [0.45, 0.5, 0.6, 0.65] and t2["model"].sigma == 0.3 and t2["n"] == 500
    assert sim.PRESETS["fig7"]["model"].family == GammaFamily(8.0)
