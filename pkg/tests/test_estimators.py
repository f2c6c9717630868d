import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from hamperc.errors import ConfigError, RegimeError
from hamperc.estimators import (
    DominationParams,
    TrialRecord,
    check_domination,
    estimate_cluster_tail,
    estimate_z_geq_concentration,
    middle_window,
    no_middle_ground_rate,
    require_regime,
    run_trial,
    theorem_check,
)
from hamperc.model import derive_params, params_at, second_component_bound
from hamperc.percolation import exact_small_oracle
from hamperc.percolation.graph import all_edges


def exact_probe_tail_n2(p, N):
    """P(|Q((1,1))| >= N) on H(2, 2) by enumerating the 16 subgraphs."""
    u, v = all_edges(2)
    total = 0.0
    for mask in range(16):
        sel = np.array([(mask >> e) & 1 for e in range(4)], dtype=bool)
        a = coo_matrix((np.ones(sel.sum()), (u[sel], v[sel])), shape=(4, 4))
        _, lab = connected_components(a, directed=False)
        size = int(np.sum(lab == lab[0]))
        k = int(sel.sum())
        total += (size >= N) * p**k * (1 - p) ** (4 - k)
    return total


# -- regime gate -------------------------------------------------------------------


def test_regime_gate_modes():
    pr = derive_params(500, 0.1)  # ratio 3.43 < 4
    with pytest.raises(RegimeError):
        require_regime(pr)
    with pytest.warns(RuntimeWarning):
        assert require_regime(pr, "warn") is False
    assert require_regime(pr, "ignore") is False
    assert require_regime(derive_params(1000, 0.1)) is True
    with pytest.raises(ConfigError):
        require_regime(pr, "loud")


# -- cluster tail ----------------------------------------------------------------


def test_tail_p_zero():
    te = estimate_cluster_tail(derive_params(50, -1.0), 5, 200, 1, on_violation="ignore")
    assert te.estimate == 0.0 and te.stderr == 0.0


def test_tail_n_equal_one():
    te = estimate_cluster_tail(derive_params(1000, 0.1), 1, 50, 1, on_violation="ignore")
    assert te.estimate == 1.0


def test_tail_threshold_check():
    with pytest.raises(ConfigError):
        estimate_cluster_tail(derive_params(1000, 0.1), 999, 10, 1)
    te = estimate_cluster_tail(derive_params(1000, 0.1), 1000, 10, 1)
    assert te.threshold == 1000 and te.target == pytest.approx(0.2)


def test_tail_regime_error():
    with pytest.raises(RegimeError):
        estimate_cluster_tail(derive_params(500, 0.1), 1000, 10, 1)


@pytest.mark.parametrize("p,N", [(0.3, 2), (0.5, 3), (0.7, 4)])
def test_tail_matches_exact_n2(p, N):
    trials = 20000
    te = estimate_cluster_tail(params_at(2, p), N, trials, 3, on_violation="ignore")
    exact = exact_probe_tail_n2(p, N)
    assert abs(te.estimate - exact) <= 3 * math.sqrt(exact * (1 - exact) / trials) + 1e-12


def test_tail_probe_modes_agree():
    pr = derive_params(60, 0.4)
    single = estimate_cluster_tail(pr, 100, 3000, 4, on_violation="ignore")
    multi = estimate_cluster_tail(pr, 100, 3000, 5, on_violation="ignore", probes_per_graph=10)
    assert abs(single.estimate - multi.estimate) <= 4 * math.hypot(single.stderr, multi.stderr * math.sqrt(10))


# -- concentration ---------------------------------------------------------------


def test_z_geq_p_one():
    c = estimate_z_geq_concentration(params_at(6, 1.0), 3, 5, 1)
    assert np.all(c.samples == 36) and c.variance == 0.0


def test_z_geq_above_n2():
    c = estimate_z_geq_concentration(derive_params(20, 0.5), 401, 5, 1)
    assert np.all(c.samples == 0)


def test_z_geq_concentrated_n1000():
    eps = 0.15
    pr = derive_params(1000, eps)
    c = estimate_z_geq_concentration(pr, math.ceil(10 / eps**2), 30, 6)
    assert c.within(0.25)


# -- middle ground ---------------------------------------------------------------


def test_middle_window_empty():
    with pytest.raises(ConfigError):
        no_middle_ground_rate(derive_params(100, 0.1), 20, 10, 1)  # [2000, 200)


def test_middle_window_values():
    assert middle_window(derive_params(2000, 0.1), 20) == (2000.0, 80000.0)


def test_middle_rate_n2000():
    m = no_middle_ground_rate(derive_params(2000, 0.1), 20, 300, 7)
    assert m.estimate <= 0.02
    assert m.bound == pytest.approx(3 * (0.1 * math.exp(-20 / 256) + 2000.0**-6))


# -- domination ------------------------------------------------------------------


def test_domination_params():
    dp = DominationParams.from_params(derive_params(500, 0.1), 500)
    assert dp.omega_prime == math.floor(998 - 2.5 * math.log(500)) == 982
    assert dp.degree_ok
    dp2 = DominationParams.from_params(derive_params(500, 0.1), 500, c_log=10)
    assert not dp2.degree_ok


def test_domination_ell_one():
    r = check_domination(derive_params(200, 0.2), 1, 100, 1)
    assert r.cluster == r.upper == r.lower == 1.0 and r.holds


def test_domination_ell_two():
    pr = derive_params(300, 0.2)
    trials = 20000
    r = check_domination(pr, 2, trials, 2)
    exact = 1 - (1 - pr.p) ** pr.omega
    se = math.sqrt(exact * (1 - exact) / trials)
    assert abs(r.cluster - exact) <= 3 * se
    assert abs(r.upper - exact) <= 3 * se


def test_domination_brackets_n500():
    r = check_domination(derive_params(500, 0.1), 500, 2000, 8)
    assert r.holds and r.window_ok


# -- trial records ---------------------------------------------------------------


def _record(**kw):
    base = dict(
        master_seed=0, stream_id=0, trial=0, n=1000, epsilon=0.1, edge_count=0, c1=1, c2=0, probe_size=1,
        z_geq=0, middle_count=0, giant_rel_error=0.0, theorem_ok=None, margin=None, runtime=None,
    )
    base.update(kw)
    return TrialRecord(**base)


def test_theorem_check_single_component():
    assert theorem_check(_record(c2=0), derive_params(1000, 0.1)) == (True, 0.0)


def test_theorem_check_boundary():
    pr = derive_params(1000, 0.1)
    b = second_component_bound(pr)
    ok, margin = theorem_check(_record(c2=b), pr)
    assert ok and margin == 1.0
    ok, _ = theorem_check(_record(c2=math.ceil(b)), pr)
    assert not ok


def test_theorem_check_vacuous():
    with pytest.raises(RegimeError):
        theorem_check(_record(), derive_params(1000, 0.01))


def test_run_trial_fields():
    pr = derive_params(300, 0.3)
    rec = run_trial(pr, 5, 17, (20 / 0.09, 0.2 * 0.3 * 300**2), trial=3)
    assert rec.trial == 3 and rec.stream_id == 17
    assert rec.c1 >= rec.c2 >= 1
    assert rec.z_geq >= rec.c1
    assert rec.giant_rel_error == pytest.approx(abs(rec.c1 - 0.6 * 300**2) / (0.6 * 300**2))
    assert rec.theorem_ok is True and 0 <= rec.margin < 1
    assert rec.runtime > 0
    again = run_trial(pr, 5, 17, (20 / 0.09, 0.2 * 0.3 * 300**2), trial=3)
    assert replace(again, runtime=None) == replace(rec, runtime=None)


def test_run_trial_without_bound():
    rec = run_trial(derive_params(40, 0.05), 1, 0, (10, 20))
    assert rec.theorem_ok is None and rec.margin is None


@pytest.mark.parametrize("p", [0.2, 1 / 3, 0.5])
def test_trial_means_match_exact_n3(p):
    pr = params_at(3, p)
    law = exact_small_oracle(3, p)
    e_c1 = sum(a * w for (a, _), w in law.joint.items())
    e_c2 = sum(b * w for (_, b), w in law.joint.items())
    v_c1 = sum(a * a * w for (a, _), w in law.joint.items()) - e_c1**2
    v_c2 = sum(b * b * w for (_, b), w in law.joint.items()) - e_c2**2
    recs = [run_trial(pr, 9, k, (2, 5)) for k in range(4000)]
    c1 = np.array([r.c1 for r in recs])
    c2 = np.array([r.c2 for r in recs])
    assert abs(c1.mean() - e_c1) <= 3 * math.sqrt(v_c1 / c1.size)
    assert abs(c2.mean() - e_c2) <= 3 * math.sqrt(v_c2 / c2.size)
