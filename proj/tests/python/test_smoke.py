from fractions import Fraction

import pytest

import naesat


def test_version():
    assert naesat.__version__ == naesat.version()
    assert naesat.version().startswith("0.1.0")


def test_instance_round_trip():
    inst = naesat.generate_instance(12, 3, 4, seed=5)
    assert (inst.n, inst.m, inst.d, inst.k) == (12, 9, 3, 4)
    assert len(inst.clause_vars) == 36
    assert naesat.parse_instance(inst.serialize()) == inst
    assert naesat.generate_instance(12, 3, 4, seed=5) == inst


def test_solvers_agree():
    for seed in range(20):
        inst = naesat.generate_instance(9, 3, 3, seed=seed)
        z = naesat.count_solutions(inst)
        x = naesat.decide(inst)
        assert (x is not None) == (z > 0)
        if x is not None:
            assert naesat.is_nae_solution(inst, x)
            eta = naesat.coarsen(inst, x)
            assert naesat.is_valid_frozen(inst, eta)
            assert x in naesat.cluster_preimage(inst, eta)


def test_contradiction():
    inst = naesat.make_instance(1, 3, 3, [0, 0, 0], [0, 0, 0])
    assert naesat.count_solutions(inst) == 0
    assert naesat.decide(inst) is None


def test_frozen_and_auxiliary_counts():
    inst = naesat.generate_instance(8, 3, 4, seed=2)
    assert naesat.aux_count(inst) == len(naesat.enumerate_frozen(inst))
    assert naesat.aux_count(inst, truncated=True) == len(naesat.enumerate_frozen(inst, truncated=True))


def test_expected_z():
    assert naesat.expected_z(3, 2, 3) == Fraction(9, 2)


def test_threshold_numerics():
    t = naesat.thresholds(10)
    assert float(t["d_lbd"]) < float(t["d_fm"]) < float(t["d_ubd"])
    s = naesat.d_star(10)
    assert float(s["d_star"]) == pytest.approx(3542.931261043603, rel=1e-12)
    fp = naesat.fixed_point(15, 170339)
    assert abs(2**15 * float(fp["q_free"]) - 0.5) < 5 * 15**2 / 2**15
    assert float(naesat.phi_star(15, "170339")) == pytest.approx(-4.0733597616067365e-07, rel=1e-12)


def test_errors():
    with pytest.raises(ValueError):
        naesat.generate_instance(5, 3, 4, seed=1)
    with pytest.raises(ValueError):
        naesat.fixed_point(2, 10)


def test_experiments():
    rows = naesat.sat_sweep(4, [2, 6], 12, 10, seed=3)
    assert [r["d"] for r in rows] == [2, 6]
    assert rows[0]["sat_fraction"] >= rows[1]["sat_fraction"]
    s = naesat.coarsening_survival(4, 20, 40, 0.0, 10)
    assert s["survival"] == 1.0
    z = naesat.sample_ez(3, 0, 10, 5)
    assert z["mean"] == 1024.0


def test_cli_in_process():
    code, out, err = naesat.cli(["threshold", "--k", "10"])
    assert code == 0 and err == ""
    assert '"d_star"' in out
    assert naesat.cli(["nope"])[0] == 2
