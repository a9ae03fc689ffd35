import csv
import json
import math

import numpy as np
import pytest

from posmult import symbols as sym
from posmult.engine import GridSpec, apply_multiplier, fejer_kernel
from posmult.errors import ConfigInvalid
from posmult.harness import (
    DEFAULT_TOLERANCES,
    KINDS,
    Check,
    Report,
    Scenario,
    run,
    stream,
    trial_field,
    verify_example_2_6,
    verify_semigroup,
    verify_theorem_2_2,
)
from posmult.psd import gram
from posmult.synth import MollifierSpec, basis_test_field, mollifier

LK_QUAD = {"alpha": 0.0, "beta": [0.0], "A": [[1.0]]}
SMALL = {"fields": 3, "plan": {"trials": 10}}


def cfg(kind, seed=7, **params):
    return {"version": 1, "scenario": kind, "seed": seed, "params": params}


def failed(rep):
    return sorted(c.name for c in rep.checks if not c.passed)


class TestForwardAndProbe:
    def test_cos_passes_both_directions(self):
        rep = verify_theorem_2_2(cfg("theorem-2-2", G="cos", fields=5, plan={"trials": 10}))
        assert rep.passed, failed(rep)
        names = {c.name for c in rep.checks}
        assert {"entry-psd", "positivity", "probe-positivity", "probe-gram"} <= names
        assert rep.check("probe-positivity").detail["falsified"] is False

    def test_random_bochner_measures(self):
        rep = verify_theorem_2_2(cfg("theorem-2-2", random={"m": 2, "count": 2, "atoms": 3},
                                     probe=False, **SMALL))
        assert rep.passed, failed(rep)
        assert rep.check("G01/oracle").value <= 1e-8
        assert len([r for r in rep.trial_rows if r[0] == "G00/positivity"]) == 3

    def test_explicit_measure(self):
        mu = {"n": 1, "locations": [[0.0], [1.25]], "weights": [0.5, 0.5]}
        rep = run(cfg("theorem-2-2", measure=mu, probe=False, **SMALL))
        assert rep.passed and rep.check("oracle").value <= 1e-8

    def test_bump_entry_is_caught(self):
        G = {"family": "entries", "entries": [["bump", "gaussian"], ["gaussian", "gaussian"]]}
        rep = run(cfg("theorem-2-2", G=G, fields=3, plan={"trials": 10}, eps=[0.5, 0.25, 0.125]))
        assert not rep.passed
        w = rep.check("entry-psd").witness
        assert w["entry"] == [0, 0]
        pos = rep.check("probe-positivity")
        assert not pos.passed and pos.detail["falsified"]
        assert pos.witness["k"] == 1


class TestWitnessValidity:
    def test_cpsd_witness_reevaluates(self):
        rep = run(cfg("example-2-6", a="pos-quadratic", b=0.0, t=[1.0], fields=2, plan={"trials": 10}))
        c = rep.check("1-a-cpsd")
        assert not c.passed
        pts = np.array(c.witness["points"])
        v = np.array([complex(*z) for z in c.witness["vector"]])
        assert abs(v.sum()) < 1e-10
        form = np.vdot(v, gram(sym.quadratic(1, 1.0), pts) @ v).real
        assert form < -DEFAULT_TOLERANCES["psd"]

    def test_positivity_witness_regenerates(self):
        # sin maps a nonnegative field to a purely imaginary one
        rep = run(cfg("theorem-2-2", G="sin", fields=2, probe=False, plan={"trials": 5}))
        c = rep.check("positivity")
        assert not c.passed
        w = c.witness
        seed, key, trial = w["stream"]
        grid = GridSpec(**w["grid"])
        f = trial_field(seed, key, trial, grid, 1)
        out = apply_multiplier(sym.sine(1.0), f)
        z = out.data[(w["component"],) + tuple(w["index"])]
        np.testing.assert_allclose([z.real, z.imag], w["value"])
        assert abs(z.imag) / out.sup_norm() > 1e-8

    def test_falsify_witnesses_regenerate(self):
        rep = run(cfg("falsify", eps=[0.5, 0.25, 0.125, 0.0625], plan={"trials": 20}))
        assert rep.exit_code == 1
        G = sym.bump(1, 4.0)

        ks = rep.check("kernel-sign")
        kern = fejer_kernel(G, GridSpec(**rep.grid))
        i = ks.witness["index"][0]
        assert kern.data[0, i].real == pytest.approx(ks.witness["value"])
        assert ks.witness["value"] < 0

        pp = rep.check("probe-positivity").witness
        grid = GridSpec(**pp["grid"])
        out = apply_multiplier(G, basis_test_field(pp["eps"], pp["k"], 1, grid, pp["plateau"]))
        z = out.data[(pp["component"],) + tuple(pp["index"])]
        assert z.real == pytest.approx(pp["value"][0])
        assert z.real / out.sup_norm() <= -1e-3

        pg = rep.check("probe-gram").witness
        hat = mollifier(MollifierSpec(1, pg["eps"], pg["plateau"])).phi_hat
        M = gram(G * hat, np.array(pg["points"]))
        v = np.array([complex(*z) for z in pg["vector"]])
        assert np.vdot(v, M @ v).real <= -1e-6


class TestSemigroups:
    def test_diagonal_heat(self):
        rep = verify_semigroup(cfg("corollary-2-4", diagonal=[LK_QUAD, LK_QUAD], **SMALL))
        assert rep.passed, failed(rep)
        assert {c.name for c in rep.checks} >= {f"t={t}/diagonal-exact" for t in ("0.1", "1", "10")}

    def test_same_quadratic_everywhere(self):
        rep = verify_semigroup(cfg("corollary-2-3", entries=[[LK_QUAD, LK_QUAD], [LK_QUAD, LK_QUAD]], **SMALL))
        assert rep.passed, failed(rep)

    def test_random_lk_entries(self):
        assert verify_semigroup(cfg("corollary-2-3", **SMALL)).passed
        assert verify_semigroup(cfg("corollary-2-4", **SMALL)).passed

    def test_constant_psd_entries_series(self):
        F = {"family": "entries", "entries": [[{"family": "constant", "value": 1.0}, {"family": "constant", "value": 0.5}],
                                               [{"family": "constant", "value": 0.5}, {"family": "constant", "value": 1.0}]]}
        rep = verify_semigroup(cfg("corollary-2-5", F=F, **SMALL))
        assert rep.passed, failed(rep)
        assert rep.check("t=10/series").value <= 1e-10

    def test_random_bochner_generator(self):
        rep = verify_semigroup(cfg("corollary-2-5", **SMALL))
        assert rep.passed, failed(rep)

    def test_rejects_other_scenarios(self):
        with pytest.raises(ConfigInvalid):
            verify_semigroup(cfg("schur-suite"))


class TestTwoByTwoFamily:
    def test_all_six_pass(self):
        rep = verify_example_2_6(cfg("example-2-6", a="neg-quadratic", b=1.0, t=[1.0], **SMALL))
        assert rep.passed, failed(rep)
        prefixes = {c.name.split("/")[0] for c in rep.checks}
        assert prefixes == {"1-a-cpsd", "2-f0-mlak", "3-closed-form", "4-block-psd", "5-grid", "6-quadratic-form"}

    def test_positive_quadratic_fails_downstream(self):
        rep = run(cfg("example-2-6", a="pos-quadratic", b=0.0, t=[1.0], **SMALL))
        assert "1-a-cpsd" in failed(rep)
        assert "5-grid/t=1/positivity" in failed(rep)
        assert rep.check("5-grid/t=1/positivity").witness["kind"] == "error"
        assert rep.exit_code == 1

    def test_zero_coupling_reduces_to_diagonal(self):
        rep = run(cfg("example-2-6", a="neg-quadratic", b=0.0, t=[0.5, 2.0], **SMALL))
        assert rep.passed, failed(rep)


class TestSuites:
    @pytest.mark.parametrize("kind,params", [
        ("bochner-suite", {"count": 6, "plan": {"trials": 10}}),
        ("lk-suite", {"count": 2, "fields": 2, "plan": {"trials": 10}}),
        ("schur-suite", {"count": 40}),
        ("norm-suite", {"fields": 5}),
    ])
    def test_suite_passes(self, kind, params):
        rep = run(cfg(kind, **params))
        assert rep.passed, failed(rep)

    def test_norm_suite_values(self):
        rep = run(cfg("norm-suite", fields=5))
        assert rep.check("gaussian-tv").value == pytest.approx(math.sqrt(2 * math.pi), abs=1e-4)
        assert rep.check("delta-tv").value == pytest.approx(1.0, abs=1e-10)
        assert rep.check("cos-tv").value == pytest.approx(1.0, abs=1e-6)
        assert rep.check("roundtrip").value <= 1e-12


class TestCoherence:
    """Symbols that pass synthesis are never falsified; falsified ones fail synthesis."""

    @pytest.mark.parametrize("G", ["cos", "gaussian", {"family": "bochner", "measure":
                                   {"n": 1, "locations": [[-2.0], [0.5]], "weights": [0.3, 0.9]}}])
    def test_psd_symbols_not_falsified(self, G):
        rep = run(cfg("falsify", G=G, plan={"trials": 10}))
        assert rep.passed, failed(rep)
        assert rep.check("probe-positivity").detail["falsified"] is False
        assert rep.check("probe-positivity").value > -DEFAULT_TOLERANCES["falsify"]

    def test_falsified_bump_fails_synthesis(self):
        rep = run(cfg("falsify", plan={"trials": 10}))
        assert rep.check("probe-positivity").detail["falsified"]
        syn = run(cfg("theorem-2-2", G="bump", probe=False, fields=2, plan={"trials": 10}))
        assert not syn.check("entry-psd").passed


class TestDeterminism:
    @pytest.mark.parametrize("kind,params", [
        ("schur-suite", {"count": 30}),
        ("bochner-suite", {"count": 4, "plan": {"trials": 5}}),
        ("theorem-2-2", {"random": {"m": 2}, "probe": False, "fields": 2, "plan": {"trials": 5}}),
        ("example-2-6", {"t": [1.0], "fields": 2, "plan": {"trials": 5}}),
    ])
    def test_payload_identical(self, kind, params):
        a = run(cfg(kind, **params))
        b = run(cfg(kind, **params))
        assert a.payload() == b.payload()

    def test_seed_changes_payload(self):
        a = run(cfg("schur-suite", seed=1, count=10))
        b = run(cfg("schur-suite", seed=2, count=10))
        assert a.payload() != b.payload()

    def test_streams_independent_of_order(self):
        x = stream(3, "a", 1).random()
        stream(3, "b", 0).random()
        assert stream(3, "a", 1).random() == x
        assert stream(3, "a", 2).random() != x


class TestScenarioConfig:
    def test_unknown_kind(self):
        with pytest.raises(ConfigInvalid):
            run({"version": 1, "scenario": "nope", "seed": 1})

    def test_seed_mandatory_and_nonnegative(self):
        with pytest.raises(ConfigInvalid):
            run({"version": 1, "scenario": "schur-suite"})
        with pytest.raises(ConfigInvalid):
            run({"version": 1, "scenario": "schur-suite", "seed": -1})
        with pytest.raises(ConfigInvalid):
            run({"version": 1, "scenario": "schur-suite", "seed": 1.5})

    def test_unknown_tolerance(self):
        with pytest.raises(ConfigInvalid):
            run(dict(cfg("schur-suite"), tolerances={"psdd": 1e-3}))

    def test_tolerance_override(self):
        rep = run(dict(cfg("schur-suite", count=5), tolerances={"schur": 1e-6}))
        assert rep.tolerances["schur"] == 1e-6
        sc = Scenario.from_config(cfg("schur-suite"), tol=1e-5)
        assert sc.tolerances["psd"] == sc.tolerances["positivity"] == 1e-5

    def test_bad_t(self):
        with pytest.raises(ConfigInvalid):
            run(cfg("example-2-6", t=[0.0]))

    def test_kinds(self):
        assert len(KINDS) == 10 and len(set(KINDS)) == 10


class TestReport:
    def make(self):
        checks = [Check("b", True, 1.0, 1e-9), Check("a", False, float("nan"), float("inf"), {"x": [1.0]})]
        return Report({"kind": "demo"}, checks, 3, None, {"psd": 1e-9}, 12.5, [("a", 1, -0.5), ("a", 0, 0.25)])

    def test_schema(self):
        d = self.make().to_dict()
        assert {"version", "scenario", "checks", "seed", "grid", "elapsed_ms", "tool", "passed"} <= set(d)
        assert [c["name"] for c in d["checks"]] == ["a", "b"]
        assert set(d["checks"][0]) >= {"name", "passed", "value", "tol", "witness"}
        # NaN and inf are written as valid JSON
        json.loads(json.dumps(d, allow_nan=False))
        assert d["checks"][0]["value"] is None

    def test_pass_iff_all_checks_pass(self):
        rep = self.make()
        assert not rep.passed and rep.exit_code == 1
        rep.checks = rep.checks[:1]
        assert rep.passed and rep.exit_code == 0

    def test_payload_excludes_timing(self):
        a, b = self.make(), self.make()
        b.elapsed_ms = 99.0
        assert a.payload() == b.payload()
        assert a.to_json() != b.to_json()

    def test_write_files(self, tmp_path):
        rep = self.make()
        rep.write(tmp_path / "r.json")
        assert json.loads((tmp_path / "r.json").read_text())["seed"] == 3
        rep.write_csv(tmp_path / "r.csv")
        rows = list(csv.reader(open(tmp_path / "r.csv")))
        assert rows == [["check", "trial", "value"], ["a", "0", "0.25"], ["a", "1", "-0.5"]]

    def test_check_lookup(self):
        assert self.make().check("b").value == 1.0
        with pytest.raises(KeyError):
            self.make().check("zzz")
