import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oddcycle.bell import (
    InsufficientDataError,
    SettingCounts,
    advantage_window,
    calibrate_visibility,
    chsh_reference,
    estimate_omega,
    nonlocal_content,
    nonsignaling_check,
    predicted_omega,
    raw_nonlocal_content,
    relevant_pairs,
    run_bell_test,
    theoretical_pnl_bound,
)
from oddcycle.game import omega_c
from oddcycle.protocol.inproc import GameConfig, run_bell_actors
from oddcycle.quantum import IDEAL, NoiseModel, omega_q, output_distribution, prepared_state, alice_angle, bob_angle


def expected_counts(n, trials, noise=IDEAL):
    # exact expected table from the simulator, scaled and rounded
    out = np.zeros((n, n, 2, 2))
    state = prepared_state(None, noise)
    for x in range(n):
        for y in range(n):
            p = output_distribution(state, alice_angle(n, x), bob_angle(n, y), noise.readout_error)
            out[x, y] = p.reshape(2, 2) * trials
    return SettingCounts(n, np.rint(out).astype(np.int64))


def test_synthetic_counts_recover_omega_q():
    n = 5
    est = estimate_omega(expected_counts(n, 10**9))
    assert est.omega_hat == pytest.approx(omega_q(n), abs=1e-8)
    assert est.p_nl_lower == pytest.approx(theoretical_pnl_bound(n), abs=1e-7)


def test_hand_counts():
    n = 3
    c = np.zeros((n, n, 2, 2), dtype=np.int64)
    for x, y in relevant_pairs(n):
        if x == y:
            c[x, y, 0, 0], c[x, y, 1, 1], c[x, y, 0, 1] = 45, 45, 10
        else:
            c[x, y, 0, 1], c[x, y, 1, 0], c[x, y, 0, 0] = 40, 40, 20
    est = estimate_omega(SettingCounts(n, c))
    assert est.omega_hat == pytest.approx((0.9 * 3 + 0.8 * 3) / 6)
    se = math.sqrt(3 * 0.9 * 0.1 / 100 + 3 * 0.8 * 0.2 / 100) / 6
    assert est.std_error == pytest.approx(se)
    assert est.p_nl_error == pytest.approx(se * 2 * n)


@given(st.integers(0, 2**32 - 1))
def test_irrelevant_pairs_do_not_matter(seed):
    rng = np.random.default_rng(seed)
    n = 5
    c = rng.integers(1, 50, size=(n, n, 2, 2))
    full = SettingCounts(n, c)
    assert estimate_omega(full) == estimate_omega(full.restricted())


def test_missing_pair_raises():
    c = expected_counts(3, 100).counts
    c[0, 1] = 0
    with pytest.raises(InsufficientDataError):
        estimate_omega(SettingCounts(3, c))


@pytest.mark.parametrize("n", range(3, 100, 2))
def test_pnl_identity(n):
    assert raw_nonlocal_content(omega_q(n), n) == pytest.approx(theoretical_pnl_bound(n), abs=1e-12)
    assert theoretical_pnl_bound(n) == pytest.approx(1 - n * (1 - math.cos(math.pi / (2 * n))), abs=1e-12)


@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from([3, 5, 9, 27]))
def test_pnl_monotone(w1, w2, n):
    lo, hi = sorted((w1, w2))
    assert nonlocal_content(lo, n) <= nonlocal_content(hi, n)


def test_pnl_clamped(caplog):
    n = 5
    sub = omega_c(n) - 0.01
    with caplog.at_level("INFO"):
        assert nonlocal_content(sub, n) == 0.0
    assert raw_nonlocal_content(sub, n) < 0
    assert "sub-classical" in caplog.text
    assert nonlocal_content(omega_c(n), n) == pytest.approx(0.0, abs=1e-12)
    assert nonlocal_content(1.0, n) == 1.0


def test_chsh_constants():
    ref = chsh_reference()
    assert ref["pnl"] == pytest.approx(0.414, abs=5e-4)
    assert ref["omega_q"] == pytest.approx(0.8536, abs=1e-4)


@pytest.mark.parametrize("n", [3, 5, 11, 27])
def test_calibration_round_trip(n):
    for r in (0.978, 0.99, 1.0):
        v = calibrate_visibility(r, n)
        assert predicted_omega(n, NoiseModel(v)) == pytest.approx(r * omega_q(n), abs=1e-12)
    with pytest.raises(ValueError):
        calibrate_visibility(0.3, n)


def test_advantage_window():
    w = advantage_window(0.978, 99)
    assert w.last_n == 21 and not w.open_ended
    assert advantage_window(1.0, 27).open_ended
    assert advantage_window(0.5, 27).last_n is None


def test_nonsignaling_flags_signalling_counts():
    n = 3
    good = expected_counts(n, 10000)
    assert nonsignaling_check(good).passed
    c = good.counts.copy()
    # Alice's marginal now depends on Bob's setting
    c[0, 1, 0, :] += 2000
    bad = nonsignaling_check(SettingCounts(n, c))
    assert not bad.passed and bad.worst[:2] == ("alice", 0)


def test_bell_actor_and_batch_agree():
    cfg = GameConfig(3, rounds=600, seed=5)
    from_actors = SettingCounts.from_records(3, run_bell_actors(cfg))
    batch = run_bell_test(cfg)
    assert np.array_equal(from_actors.counts, batch.counts)
    assert batch.counts.sum() == 600


def test_bell_tcp_matches(tmp_path):
    cfg = GameConfig(3, rounds=300, seed=6, transport="tcp")
    log = tmp_path / "bell.csv"
    tcp = run_bell_test(cfg, log_path=log)
    batch = run_bell_test(GameConfig(3, rounds=300, seed=6))
    assert np.array_equal(tcp.counts, batch.counts)
    lines = log.read_text().splitlines()
    assert lines[0] == "round,x,y,a,b" and len(lines) == 301


def test_bell_simulation_matches_prediction():
    n, rounds = 3, 200_000
    est = estimate_omega(run_bell_test(GameConfig(n, rounds=rounds, seed=11)))
    assert abs(est.omega_hat - omega_q(n)) < 4 * est.std_error
