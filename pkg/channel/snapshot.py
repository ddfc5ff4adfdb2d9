"""
信道快照
一次蒙特卡洛抽样中所有候选链路的链路预算；D-Link 按需计算并缓存
"""

import threading
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple, Any

import pandas as pd

from topology import Topology, Point2D, distance
from utils.errors import IoError, OutageRate
from utils.logger import get_logger
from utils.rng import SeededRng, mix_seed
from .propagation import (
    LinkType, PathLossModel, NOISE_DENSITY_DBM_HZ, DEFAULT_RATE_FLOOR_BPS,
    SHADOWING_STD_DB, path_loss_models_from_config, draw_shadowing, draw_fading_gain,
    received_snr, achievable_rate, rate_from_snr,
)

logger = get_logger('supercell.channel')

LINK_CSV_COLUMNS = [
    'user_id', 'link_type', 'peer_id', 'distance_m', 'path_loss_db',
    'shadowing_db', 'fading_gain', 'rate_bps',
]


@dataclass(frozen=True)
class LinkBudget:
    """
    单条链路的预算

    peer_id 为发射端：M-Link 为宏基站 ID，PH-Link 为小区 ID，D-Link 为簇头用户 ID
    """
    link_type: LinkType
    user_id: int
    peer_id: int
    distance: float      # m
    path_loss: float     # dB
    shadowing: float     # dB
    fading_gain: float   # 线性
    rx_power: float      # dBm
    snr: float           # 线性
    bandwidth: float     # Hz
    rate: float          # bit/s
    outage: bool = False

    def recomputed_rate(self) -> float:
        """由 snr 重新计算速率（用于一致性检查）"""
        return rate_from_snr(self.snr, self.bandwidth)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'link_type': self.link_type.value,
            'user_id': self.user_id,
            'peer_id': self.peer_id,
            'distance': self.distance,
            'path_loss': self.path_loss,
            'shadowing': self.shadowing,
            'fading_gain': self.fading_gain,
            'rx_power': self.rx_power,
            'snr': self.snr,
            'bandwidth': self.bandwidth,
            'rate': self.rate,
            'outage': self.outage,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'LinkBudget':
        return cls(
            link_type=LinkType(data['link_type']),
            user_id=int(data['user_id']),
            peer_id=int(data['peer_id']),
            distance=float(data['distance']),
            path_loss=float(data['path_loss']),
            shadowing=float(data['shadowing']),
            fading_gain=float(data['fading_gain']),
            rx_power=float(data['rx_power']),
            snr=float(data['snr']),
            bandwidth=float(data['bandwidth']),
            rate=float(data['rate']),
            outage=bool(data.get('outage', False)),
        )


@dataclass(frozen=True)
class ChannelModel:
    """由配置派生的信道参数"""
    path_loss: Dict[LinkType, PathLossModel]
    tx_power: Dict[LinkType, float]
    bandwidth: Dict[LinkType, float]
    noise_density_dbm_hz: float = NOISE_DENSITY_DBM_HZ
    shadowing_std_db: float = SHADOWING_STD_DB
    enable_shadowing: bool = True
    enable_fading: bool = True
    min_distance_m: float = 1.0
    rate_floor_bps: float = DEFAULT_RATE_FLOOR_BPS

    @classmethod
    def from_config(cls, config) -> 'ChannelModel':
        return cls(
            path_loss=path_loss_models_from_config(config),
            tx_power={
                LinkType.MLINK: config.tx_m_w,
                LinkType.PHLINK: config.tx_ph_w,
                LinkType.DLINK: config.tx_d_w,
            },
            bandwidth={
                LinkType.MLINK: config.bandwidth_hz * config.bw_share_macro,
                LinkType.PHLINK: config.bandwidth_hz * config.bw_share_phantom,
                LinkType.DLINK: config.bandwidth_hz * config.bw_share_d2d,
            },
            noise_density_dbm_hz=config.noise_density_dbm_hz,
            shadowing_std_db=config.shadowing_std_db,
            enable_shadowing=config.enable_shadowing,
            enable_fading=config.enable_fading,
            min_distance_m=config.min_distance_m,
            rate_floor_bps=config.rate_floor_bps,
        )

    def link_budget(self, link_type: LinkType, user_id: int, peer_id: int,
                    tx_position: Point2D, rx_position: Point2D, rng) -> LinkBudget:
        """抽取阴影与衰落并计算一条链路的预算（先阴影后衰落）"""
        d = distance(tx_position, rx_position, self.min_distance_m)
        pl = self.path_loss[link_type](d)
        shadowing = draw_shadowing(rng, self.shadowing_std_db, self.enable_shadowing)
        fading = draw_fading_gain(rng, self.enable_fading)
        bandwidth = self.bandwidth[link_type]
        tx_power = self.tx_power[link_type]
        rx_dbm, snr = received_snr(tx_power, pl, shadowing, fading, bandwidth, self.noise_density_dbm_hz)
        try:
            rate = achievable_rate(tx_power, pl, shadowing, fading, bandwidth,
                                   self.noise_density_dbm_hz, self.rate_floor_bps)
            outage = False
        except OutageRate as e:
            rate, outage = e.rate, True
        return LinkBudget(
            link_type=link_type,
            user_id=user_id,
            peer_id=peer_id,
            distance=d,
            path_loss=pl,
            shadowing=shadowing,
            fading_gain=fading,
            rx_power=rx_dbm,
            snr=snr,
            bandwidth=bandwidth,
            rate=rate,
            outage=outage,
        )


class ChannelSnapshot:
    """
    一次抽样的信道快照

    构造后宏链路与 phantom 链路不可变；D-Link 由 d2d() 惰性计算，
    每对用户使用由 (d2d_seed, 较小 ID, 较大 ID) 派生的独立随机流，
    因此结果与计算顺序无关。缓存写入由锁保护。
    """

    def __init__(self,
                 model: ChannelModel,
                 macro: Dict[int, LinkBudget],
                 phantom: Dict[Tuple[int, int], LinkBudget],
                 positions: Dict[int, Point2D],
                 home_cells: Dict[int, Optional[int]],
                 d2d_seed: int,
                 allow_cross_cell_d2d: bool = False):
        self.model = model
        self.macro = macro
        self.phantom = phantom
        self.positions = positions
        self.home_cells = home_cells
        self.d2d_seed = d2d_seed
        self.allow_cross_cell_d2d = allow_cross_cell_d2d
        self._d2d_cache: Dict[Tuple[int, int], LinkBudget] = {}
        self._lock = threading.Lock()

    @property
    def user_ids(self) -> List[int]:
        return sorted(self.positions)

    def macro_link(self, user_id: int) -> LinkBudget:
        return self.macro[user_id]

    def phantom_link(self, user_id: int, cell_id: int) -> Optional[LinkBudget]:
        return self.phantom.get((user_id, cell_id))

    def phantom_links(self, user_id: int) -> List[LinkBudget]:
        """用户的全部候选 PH-Link（按小区 ID 排序）"""
        return sorted(
            (b for (uid, _), b in self.phantom.items() if uid == user_id),
            key=lambda b: b.peer_id,
        )

    def d2d(self, head_id: int, member_id: int) -> LinkBudget:
        """
        簇头 -> 成员的 D-Link 预算（按需计算并缓存）

        Raises:
            ValueError: 两个用户不在同一 phantom 小区
        """
        if head_id == member_id:
            raise ValueError(f"D-Link 两端不能是同一用户: {head_id}")
        if not self.allow_cross_cell_d2d:
            home_a, home_b = self.home_cells[head_id], self.home_cells[member_id]
            if home_a is None or home_a != home_b:
                raise ValueError(f"用户 {head_id} 与 {member_id} 不在同一 phantom 小区")

        lo, hi = min(head_id, member_id), max(head_id, member_id)
        with self._lock:
            budget = self._d2d_cache.get((lo, hi))
            if budget is None:
                rng = SeededRng(mix_seed(self.d2d_seed, lo, hi))
                budget = self.model.link_budget(
                    LinkType.DLINK, hi, lo, self.positions[lo], self.positions[hi], rng
                )
                self._d2d_cache[(lo, hi)] = budget

        if budget.user_id == member_id:
            return budget
        return replace(budget, user_id=member_id, peer_id=head_id)

    def cached_d2d(self) -> List[LinkBudget]:
        with self._lock:
            return [self._d2d_cache[key] for key in sorted(self._d2d_cache)]

    def all_links(self) -> List[LinkBudget]:
        """全部已计算链路：宏链路、PH-Link、已缓存的 D-Link"""
        links = [self.macro[uid] for uid in sorted(self.macro)]
        links += [self.phantom[key] for key in sorted(self.phantom)]
        links += self.cached_d2d()
        return links

    def outage_links(self) -> List[LinkBudget]:
        return [b for b in self.all_links() if b.outage]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'd2d_seed': self.d2d_seed,
            'allow_cross_cell_d2d': self.allow_cross_cell_d2d,
            'macro': [self.macro[uid].to_dict() for uid in sorted(self.macro)],
            'phantom': [self.phantom[key].to_dict() for key in sorted(self.phantom)],
            'd2d': [b.to_dict() for b in self.cached_d2d()],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], topology: Topology, config) -> 'ChannelSnapshot':
        """从 JSON 字典恢复快照；未缓存的 D-Link 按同一种子继续惰性计算"""
        macro = {}
        for item in data.get('macro', []):
            budget = LinkBudget.from_dict(item)
            macro[budget.user_id] = budget
        phantom = {}
        for item in data.get('phantom', []):
            budget = LinkBudget.from_dict(item)
            phantom[(budget.user_id, budget.peer_id)] = budget

        snapshot = cls(
            model=ChannelModel.from_config(config),
            macro=macro,
            phantom=phantom,
            positions={u.id: u.position for u in topology.users},
            home_cells={u.id: u.home_cell for u in topology.users},
            d2d_seed=int(data['d2d_seed']),
            allow_cross_cell_d2d=bool(data.get('allow_cross_cell_d2d', False)),
        )
        for item in data.get('d2d', []):
            budget = LinkBudget.from_dict(item)
            key = (min(budget.user_id, budget.peer_id), max(budget.user_id, budget.peer_id))
            snapshot._d2d_cache[key] = budget
        return snapshot

    def __repr__(self) -> str:
        return (f"ChannelSnapshot(macro={len(self.macro)}, phantom={len(self.phantom)}, "
                f"d2d_cached={len(self._d2d_cache)})")


def build_snapshot(topology: Topology, config, rng) -> ChannelSnapshot:
    """
    为拓扑中每个用户抽取宏链路与 phantom 链路

    每条链路独立抽取阴影与衰落；默认只为用户所在小区建立 PH-Link，
    candidate_all_phantoms 打开时为每个 phantom 基站都建立一条；
    不在任何小区内的用户只有宏链路。
    中断链路以 outage 标记保存，不抛异常。

    Args:
        topology: 拓扑
        config: SimConfig
        rng: SeededRng

    Returns:
        ChannelSnapshot
    """
    model = ChannelModel.from_config(config)
    macro_position = topology.macro_bts.position

    macro: Dict[int, LinkBudget] = {}
    phantom: Dict[Tuple[int, int], LinkBudget] = {}
    for user in sorted(topology.users, key=lambda u: u.id):
        macro[user.id] = model.link_budget(
            LinkType.MLINK, user.id, topology.macro_bts.id, macro_position, user.position, rng
        )
        if user.home_cell is None:
            cells = []
        elif config.candidate_all_phantoms:
            cells = topology.cell_ids
        else:
            cells = [user.home_cell]
        for cell_id in cells:
            bts = topology.phantom(cell_id)
            phantom[(user.id, cell_id)] = model.link_budget(
                LinkType.PHLINK, user.id, cell_id, bts.position, user.position, rng
            )

    snapshot = ChannelSnapshot(
        model=model,
        macro=macro,
        phantom=phantom,
        positions={u.id: u.position for u in topology.users},
        home_cells={u.id: u.home_cell for u in topology.users},
        d2d_seed=rng.next_seed(),
        allow_cross_cell_d2d=config.candidate_all_phantoms,
    )
    outages = len(snapshot.outage_links())
    if outages:
        logger.debug(f"快照中有 {outages} 条中断链路")
    return snapshot


def write_links_csv(snapshot: ChannelSnapshot, path) -> None:
    """导出快照中全部已计算链路的预算"""
    rows = [{
        'user_id': b.user_id,
        'link_type': b.link_type.value,
        'peer_id': b.peer_id,
        'distance_m': b.distance,
        'path_loss_db': b.path_loss,
        'shadowing_db': b.shadowing,
        'fading_gain': b.fading_gain,
        'rate_bps': b.rate,
    } for b in snapshot.all_links()]
    frame = pd.DataFrame(rows, columns=LINK_CSV_COLUMNS)
    try:
        frame.to_csv(path, index=False, float_format='%.15g', lineterminator='\n')
    except OSError as e:
        raise IoError(f"写入链路预算失败 {path}: {e}")
