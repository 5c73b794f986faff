import math

import numpy as np
import pytest

from qgauge.core import DEFAULT_THRESHOLDS
from qgauge.domains import CATALOG
from qgauge.verify import (
    CHECKS, boundary_sample, check_defining_function, check_homogeneity, check_plurisubharmonic_gauge,
    check_pseudoconvex, check_quasi_balanced, check_transversality, estimate_hopf_constant, expected_to_pass,
    run_suite, sample_rng, transversality_margin,
)

N = 60


def test_sample_rng_is_reproducible():
    a = sample_rng(42, "psh", 7).standard_normal(3)
    b = sample_rng(42, "psh", 7).standard_normal(3)
    c = sample_rng(42, "psh", 8).standard_normal(3)
    d = sample_rng(42, "homogeneity", 7).standard_normal(3)
    assert np.array_equal(a, b) and not np.array_equal(a, c) and not np.array_equal(a, d)


def test_boundary_samples_lie_on_boundary(domains):
    dom = domains["egg23"]
    for i in range(30):
        xi = boundary_sample(dom, sample_rng(1, "b", i), i)
        assert abs(dom.psi(list(xi))) < 1e-10


@pytest.mark.parametrize("name", ["ball2", "egg12", "product_egg"])
def test_positive_domains_pass(name, domains):
    dom = domains[name]
    reports, hopf = run_suite(dom, CHECKS, n_samples=N, seed=5, psh_samples=20, hopf_interior=20, hopf_mesh=300)
    for rep in reports:
        assert rep.passed, (rep.check_name, rep.worst_violation, rep.failure)
        assert rep.samples == (20 if rep.check_name == "psh" else N)
        assert rep.seed == 5
    assert hopf.passed and hopf.c_hat > 0


def test_transversality_margin_on_ball(domains):
    tau, dg = transversality_margin(domains["ball2"], [1.0, 0, 0, 0])
    assert tau == pytest.approx(1.0, abs=1e-12)
    assert dg < 0


def test_offcenter_fails_quasi_balanced_with_witness(domains):
    rep = check_quasi_balanced(domains["offcenter2"], N, 42)
    assert not rep.passed and rep.worst_violation > 1.0
    assert rep.witness is not None
    assert check_homogeneity(domains["offcenter2"], N, 42).passed is False


def test_indefinite_egg_fails_levi_checks(domains):
    dom = domains["indefinite_egg"]
    rep = check_pseudoconvex(dom, N, 42)
    assert not rep.passed and rep.witness is not None
    assert not check_plurisubharmonic_gauge(dom, 40, 42).passed
    assert check_quasi_balanced(dom, N, 42).passed


def test_polydisc_reports_nonsmooth_failure(domains):
    rep = check_pseudoconvex(domains["polydisc2"], 30, 42)
    assert not rep.passed
    assert rep.failure and "NonSmoothPoint" in rep.failure
    assert rep.worst_violation == math.inf
    assert check_quasi_balanced(domains["polydisc2"], 30, 42).passed


def test_reports_are_seed_deterministic(domains):
    dom = domains["egg12"]
    a = check_defining_function(dom, 30, 9).as_dict()
    b = check_defining_function(dom, 30, 9).as_dict()
    assert a == b
    c = check_defining_function(dom, 30, 10).as_dict()
    assert a["worst_violation"] != c["worst_violation"]


def test_thresholds_are_respected(domains):
    dom = domains["egg12"]
    strict = DEFAULT_THRESHOLDS.replace(transversality=1e6)
    assert not check_transversality(dom, 20, 1, strict).passed
    assert check_transversality(dom, 20, 1).passed


def test_hopf_ball_near_one(domains):
    est = estimate_hopf_constant(domains["ball2"], 30, 500, 3)
    assert 0.99 < est.c_hat <= 1.0 + 1e-9


def test_expected_to_pass_table():
    flags = {"quasi_balanced": True, "pseudoconvex": False, "smooth_boundary": True}
    assert expected_to_pass("quasi_balanced", flags)
    assert not expected_to_pass("psh", flags)
    assert not expected_to_pass("hopf", flags)
