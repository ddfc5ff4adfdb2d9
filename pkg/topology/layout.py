"""
Super cell 拓扑
一个宏小区圆盘内放置若干 phantom 小区圆盘，用户位于 phantom 小区内
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Any, Sequence

import orjson

from utils.errors import PlacementExhausted
from utils.logger import get_logger
from .geometry import Point2D, raw_distance, uniform_in_disk

logger = get_logger('supercell.topology')

MACRO_BTS_ID = 0

# 浮点容差：判断点是否在圆盘内
_EPS = 1e-9


class Tier(Enum):
    """基站层级"""
    MACRO = "macro"
    PHANTOM = "phantom"


@dataclass
class BaseStation:
    """基站"""
    id: int
    tier: Tier
    position: Point2D
    tx_power: float  # W
    radius: float    # m

    def __post_init__(self):
        if self.tx_power <= 0:
            raise ValueError(f"基站 {self.id} 发射功率必须为正: {self.tx_power}")
        if self.radius <= 0:
            raise ValueError(f"基站 {self.id} 覆盖半径必须为正: {self.radius}")

    def contains(self, point: Point2D) -> bool:
        return raw_distance(self.position, point) <= self.radius + _EPS

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'tier': self.tier.value,
            'position': self.position.to_dict(),
            'tx_power': self.tx_power,
            'radius': self.radius,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BaseStation':
        return cls(
            id=int(data['id']),
            tier=Tier(data['tier']),
            position=Point2D.from_dict(data['position']),
            tx_power=float(data['tx_power']),
            radius=float(data['radius']),
        )


@dataclass
class UserTerminal:
    """用户终端"""
    id: int
    position: Point2D
    home_cell: Optional[int] = None  # 所在 phantom 小区 ID，仅宏小区覆盖时为 None

    def to_dict(self) -> Dict[str, Any]:
        return {'id': self.id, 'position': self.position.to_dict(), 'home_cell': self.home_cell}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UserTerminal':
        home = data.get('home_cell')
        return cls(
            id=int(data['id']),
            position=Point2D.from_dict(data['position']),
            home_cell=None if home is None else int(home),
        )


@dataclass
class Topology:
    """
    一个 Super cell 的几何布局

    宏基站位于原点；phantom 小区 ID 从 1 开始，用户 ID 从 0 开始
    """
    macro_bts: BaseStation
    phantom_bts: List[BaseStation] = field(default_factory=list)
    users: List[UserTerminal] = field(default_factory=list)

    def __post_init__(self):
        self._phantoms_by_id = {bts.id: bts for bts in self.phantom_bts}
        self._users_by_id = {user.id: user for user in self.users}

    @property
    def cell_ids(self) -> List[int]:
        return sorted(self._phantoms_by_id)

    def phantom(self, cell_id: int) -> BaseStation:
        return self._phantoms_by_id[cell_id]

    def user(self, user_id: int) -> UserTerminal:
        return self._users_by_id[user_id]

    def users_in_cell(self, cell_id: int) -> List[UserTerminal]:
        return [u for u in self.users if u.home_cell == cell_id]

    def macro_only_users(self) -> List[UserTerminal]:
        return [u for u in self.users if u.home_cell is None]

    def cell_user_counts(self) -> Dict[int, int]:
        return {cell_id: len(self.users_in_cell(cell_id)) for cell_id in self.cell_ids}

    def validate(self, allow_overlap: bool = False) -> None:
        """
        检查拓扑不变量

        Raises:
            ValueError: 任一不变量不成立
        """
        macro = self.macro_bts
        for bts in self.phantom_bts:
            if raw_distance(macro.position, bts.position) > macro.radius - bts.radius + _EPS:
                raise ValueError(f"phantom 小区 {bts.id} 超出宏小区范围")

        if not allow_overlap:
            for i, a in enumerate(self.phantom_bts):
                for b in self.phantom_bts[i + 1:]:
                    if raw_distance(a.position, b.position) < a.radius + b.radius - _EPS:
                        raise ValueError(f"phantom 小区 {a.id} 与 {b.id} 重叠")

        for user in self.users:
            if user.home_cell is None:
                continue
            if user.home_cell not in self._phantoms_by_id:
                raise ValueError(f"用户 {user.id} 的 home_cell {user.home_cell} 不存在")
            if not self.phantom(user.home_cell).contains(user.position):
                raise ValueError(f"用户 {user.id} 不在其 phantom 小区 {user.home_cell} 内")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'macro_bts': self.macro_bts.to_dict(),
            'phantom_bts': [bts.to_dict() for bts in self.phantom_bts],
            'users': [user.to_dict() for user in self.users],
        }

    def to_json(self) -> bytes:
        return orjson.dumps(self.to_dict(), option=orjson.OPT_INDENT_2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Topology':
        return cls(
            macro_bts=BaseStation.from_dict(data['macro_bts']),
            phantom_bts=[BaseStation.from_dict(b) for b in data.get('phantom_bts', [])],
            users=[UserTerminal.from_dict(u) for u in data.get('users', [])],
        )

    def __repr__(self) -> str:
        return f"Topology(phantoms={len(self.phantom_bts)}, users={len(self.users)})"


def split_users(total_users: int, phantom_count: int) -> List[int]:
    """
    把总用户数平均分到各 phantom 小区，余数从编号最小的小区开始分配
    """
    if phantom_count == 0:
        return []
    base, remainder = divmod(total_users, phantom_count)
    return [base + (1 if i < remainder else 0) for i in range(phantom_count)]


def _place_phantoms(config, rng) -> List[BaseStation]:
    placement_radius = config.macro_radius_m - config.phantom_radius_m
    origin = Point2D(0.0, 0.0)
    placed: List[BaseStation] = []

    for index in range(config.phantom_count):
        for _ in range(config.placement_retries):
            center = uniform_in_disk(origin, placement_radius, rng)
            if config.allow_overlap or all(
                raw_distance(center, other.position) >= 2 * config.phantom_radius_m
                for other in placed
            ):
                break
        else:
            raise PlacementExhausted(
                f"第 {index + 1} 个 phantom 小区在 {config.placement_retries} 次尝试内无法放置 "
                f"(半径 {config.phantom_radius_m} m，宏小区半径 {config.macro_radius_m} m)"
            )
        placed.append(BaseStation(
            id=index + 1,
            tier=Tier.PHANTOM,
            position=center,
            tx_power=config.tx_ph_w,
            radius=config.phantom_radius_m,
        ))
    return placed


def generate_topology(config, rng,
                      cell_user_counts: Optional[Sequence[int]] = None,
                      macro_only_users: Optional[int] = None) -> Topology:
    """
    生成一个 Super cell 拓扑

    Args:
        config: SimConfig
        rng: SeededRng
        cell_user_counts: 每个 phantom 小区的用户数，默认均为 users_per_cell
        macro_only_users: 位于所有 phantom 小区之外的用户数，默认取配置值

    Returns:
        Topology

    Raises:
        PlacementExhausted: 半径与数量组合不可行
    """
    if cell_user_counts is None:
        cell_user_counts = [config.users_per_cell] * config.phantom_count
    if len(cell_user_counts) != config.phantom_count:
        raise ValueError(f"cell_user_counts 长度 {len(cell_user_counts)} 与 phantom_count 不一致")
    if macro_only_users is None:
        macro_only_users = config.macro_only_users

    macro = BaseStation(
        id=MACRO_BTS_ID,
        tier=Tier.MACRO,
        position=Point2D(0.0, 0.0),
        tx_power=config.tx_m_w,
        radius=config.macro_radius_m,
    )
    phantoms = _place_phantoms(config, rng)

    users: List[UserTerminal] = []
    for bts, count in zip(phantoms, cell_user_counts):
        for _ in range(count):
            users.append(UserTerminal(
                id=len(users),
                position=uniform_in_disk(bts.position, bts.radius, rng),
                home_cell=bts.id,
            ))

    for _ in range(macro_only_users):
        for _ in range(config.placement_retries):
            position = uniform_in_disk(macro.position, macro.radius, rng)
            if not any(bts.contains(position) for bts in phantoms):
                break
        else:
            raise PlacementExhausted(f"{config.placement_retries} 次尝试内无法放置仅宏小区用户")
        users.append(UserTerminal(id=len(users), position=position, home_cell=None))

    topology = Topology(macro_bts=macro, phantom_bts=phantoms, users=users)
    logger.debug(f"生成拓扑: {len(phantoms)} 个 phantom 小区, {len(users)} 个用户")
    return topology
