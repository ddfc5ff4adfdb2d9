"""
测试信道模型与快照
"""

import math

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings, strategies as st

from channel import (
    LINK_CSV_COLUMNS,
    ChannelSnapshot,
    LinkType,
    achievable_rate,
    build_snapshot,
    draw_fading_gain,
    draw_shadowing,
    noise_power_dbm,
    path_loss_db,
    received_snr,
    write_links_csv,
)
from topology import generate_topology
from utils.config import SimConfig
from utils.errors import OutageRate
from utils.rng import SeededRng


# ==========================================
# 路径损耗与速率
# ==========================================

def test_path_loss_reference_points():
    assert path_loss_db(LinkType.MLINK, 1000.0) == pytest.approx(128.0)
    assert path_loss_db(LinkType.MLINK, 500.0) == pytest.approx(116.68, abs=0.01)
    assert path_loss_db(LinkType.PHLINK, 10.0) == pytest.approx(57.0)
    assert path_loss_db(LinkType.DLINK, 1.0) == pytest.approx(42.0)


@settings(max_examples=200, deadline=None)
@given(link_type=st.sampled_from(list(LinkType)),
       d1=st.floats(min_value=1.0, max_value=1e4),
       d2=st.floats(min_value=1.0, max_value=1e4))
def test_path_loss_is_monotone_in_distance(link_type, d1, d2):
    lo, hi = sorted((d1, d2))
    assert path_loss_db(link_type, lo) <= path_loss_db(link_type, hi)


def test_noise_power_over_10_mhz():
    assert noise_power_dbm(10e6) == pytest.approx(-77.0)


def test_macro_link_budget_by_hand():
    """40 W、116.68 dB: 接收 -70.66 dBm，SNR 约 6.34 dB，速率约 2.4e7 bit/s"""
    rx_dbm, snr = received_snr(40.0, 116.68, 0.0, 1.0, 10e6)
    assert rx_dbm == pytest.approx(-70.66, abs=0.01)
    assert 10 * math.log10(snr) == pytest.approx(6.34, abs=0.01)
    assert achievable_rate(40.0, 116.68, 0.0, 1.0, 10e6) == pytest.approx(2.4e7, rel=0.01)


def test_unit_snr_gives_rate_equal_to_bandwidth():
    """1 W 经 107 dB 到达 -77 dBm，恰好等于 10 MHz 噪声功率"""
    _, snr = received_snr(1.0, 107.0, 0.0, 1.0, 10e6)
    assert snr == pytest.approx(1.0, rel=1e-12)
    assert achievable_rate(1.0, 107.0, 0.0, 1.0, 10e6) == pytest.approx(10e6, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(tx=st.floats(min_value=0.01, max_value=100.0),
       pl=st.floats(min_value=30.0, max_value=120.0),
       bandwidth=st.floats(min_value=1e5, max_value=1e8))
def test_doubling_bandwidth_at_fixed_snr_doubles_rate(tx, pl, bandwidth):
    # 功率与带宽同时加倍，噪声功率也加倍，信噪比不变
    single = achievable_rate(tx, pl, 0.0, 1.0, bandwidth, rate_floor_bps=0.0)
    double = achievable_rate(2 * tx, pl, 0.0, 1.0, 2 * bandwidth, rate_floor_bps=0.0)
    assert double == pytest.approx(2 * single, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(pl=st.floats(min_value=30.0, max_value=160.0),
       delta=st.floats(min_value=0.1, max_value=50.0))
def test_rate_strictly_decreases_with_path_loss(pl, delta):
    near = achievable_rate(10.0, pl, 0.0, 1.0, 10e6, rate_floor_bps=0.0)
    far = achievable_rate(10.0, pl + delta, 0.0, 1.0, 10e6, rate_floor_bps=0.0)
    assert near > far


@settings(max_examples=200, deadline=None)
@given(tx=st.floats(min_value=0.01, max_value=100.0),
       factor=st.floats(min_value=1.01, max_value=100.0),
       pl=st.floats(min_value=30.0, max_value=160.0))
def test_rate_strictly_increases_with_tx_power(tx, factor, pl):
    weak = achievable_rate(tx, pl, 0.0, 1.0, 10e6, rate_floor_bps=0.0)
    strong = achievable_rate(tx * factor, pl, 0.0, 1.0, 10e6, rate_floor_bps=0.0)
    assert strong > weak


def test_rate_below_floor_is_outage():
    with pytest.raises(OutageRate) as exc:
        achievable_rate(0.125, 300.0, 0.0, 1.0, 10e6)
    assert exc.value.rate < exc.value.floor == 1e3


# ==========================================
# 阴影与衰落统计
# ==========================================

def test_shadowing_sample_statistics():
    rng = SeededRng(2024)
    samples = np.array([draw_shadowing(rng) for _ in range(1_000_000)])
    assert samples.mean() == pytest.approx(0.0, abs=0.03)
    assert samples.std() == pytest.approx(8.0, abs=0.03)


def test_fading_gain_sample_mean():
    rng = SeededRng(2025)
    samples = np.array([draw_fading_gain(rng) for _ in range(1_000_000)])
    assert samples.min() > 0.0
    assert samples.mean() == pytest.approx(1.0, abs=0.01)


def test_disabled_randomness_is_neutral():
    rng = SeededRng(0)
    assert draw_shadowing(rng, enabled=False) == 0.0
    assert draw_fading_gain(rng, enabled=False) == 1.0
    assert draw_shadowing(rng, std_db=0.0) == 0.0


def test_shadowing_variance_knob():
    config = SimConfig(shadowing_db=64.0, shadowing_is_variance=True)
    assert config.shadowing_std_db == 8.0


# ==========================================
# 信道快照
# ==========================================

@pytest.fixture
def world():
    config = SimConfig(phantom_count=3, users_per_cell=4)
    rng = SeededRng(17)
    topology = generate_topology(config, rng)
    return config, topology, build_snapshot(topology, config, rng)


def test_snapshot_has_macro_and_home_links_only(world):
    config, topology, snapshot = world
    assert sorted(snapshot.macro) == [u.id for u in topology.users]
    assert sorted(snapshot.phantom) == sorted((u.id, u.home_cell) for u in topology.users)
    for user in topology.users:
        assert snapshot.macro_link(user.id).peer_id == 0
        assert [b.peer_id for b in snapshot.phantom_links(user.id)] == [user.home_cell]


def test_candidate_all_phantoms_builds_every_cell():
    config = SimConfig(phantom_count=3, users_per_cell=2, candidate_all_phantoms=True)
    rng = SeededRng(4)
    topology = generate_topology(config, rng)
    snapshot = build_snapshot(topology, config, rng)
    for user in topology.users:
        assert [b.peer_id for b in snapshot.phantom_links(user.id)] == [1, 2, 3]


def test_budget_fields_are_consistent(world):
    _, _, snapshot = world
    for budget in snapshot.all_links():
        assert budget.distance >= 1.0
        assert budget.fading_gain > 0.0
        assert budget.rate == pytest.approx(budget.recomputed_rate(), rel=1e-12)
        assert budget.outage == (budget.rate < 1e3)


def test_d2d_independent_of_query_order(world):
    config, topology, first = world
    rng = SeededRng(17)
    generate_topology(config, rng)
    second = build_snapshot(topology, config, rng)

    members = [u.id for u in topology.users_in_cell(1)]
    pairs = [(a, b) for a in members for b in members if a < b]
    forward = {pair: first.d2d(*pair).rate for pair in pairs}
    backward = {pair: second.d2d(pair[1], pair[0]).rate for pair in reversed(pairs)}
    assert forward == backward


def test_d2d_direction_and_cell_checks(world):
    _, topology, snapshot = world
    a, b = [u.id for u in topology.users_in_cell(1)][:2]
    head_to_member = snapshot.d2d(a, b)
    member_to_head = snapshot.d2d(b, a)
    assert (head_to_member.user_id, head_to_member.peer_id) == (b, a)
    assert (member_to_head.user_id, member_to_head.peer_id) == (a, b)
    assert head_to_member.rate == member_to_head.rate

    other = topology.users_in_cell(2)[0].id
    with pytest.raises(ValueError):
        snapshot.d2d(a, other)
    with pytest.raises(ValueError):
        snapshot.d2d(a, a)


def test_snapshot_round_trip_keeps_lazy_stream(world):
    config, topology, snapshot = world
    members = [u.id for u in topology.users_in_cell(2)]
    snapshot.d2d(members[0], members[1])

    restored = ChannelSnapshot.from_dict(snapshot.to_dict(), topology, config)
    assert restored.to_dict() == snapshot.to_dict()
    assert restored.d2d(members[2], members[3]) == snapshot.d2d(members[2], members[3])


def test_write_links_csv(world, tmp_path):
    _, _, snapshot = world
    path = tmp_path / 'links.csv'
    write_links_csv(snapshot, path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == LINK_CSV_COLUMNS
    assert len(frame) == len(snapshot.all_links())
    assert set(frame['link_type']) == {'M-Link', 'PH-Link'}


def test_snapshot_rates_come_from_achievable_rate(world):
    config, topology, snapshot = world
    members = [u.id for u in topology.users_in_cell(1)]
    snapshot.d2d(members[0], members[1])
    for budget in snapshot.all_links():
        expected = achievable_rate(snapshot.model.tx_power[budget.link_type], budget.path_loss,
                                   budget.shadowing, budget.fading_gain, budget.bandwidth,
                                   config.noise_density_dbm_hz, rate_floor_bps=0.0)
        assert budget.rate == expected


def test_macro_only_users_get_no_phantom_links():
    config = SimConfig(phantom_count=3, users_per_cell=2, macro_only_users=2,
                       candidate_all_phantoms=True)
    rng = SeededRng(9)
    topology = generate_topology(config, rng)
    snapshot = build_snapshot(topology, config, rng)
    outsiders = [u.id for u in topology.users if u.home_cell is None]
    assert len(outsiders) == 2
    for user_id in outsiders:
        assert snapshot.phantom_links(user_id) == []
        assert snapshot.macro_link(user_id).peer_id == 0
    for user in topology.users:
        if user.home_cell is not None:
            assert [b.peer_id for b in snapshot.phantom_links(user.id)] == [1, 2, 3]
