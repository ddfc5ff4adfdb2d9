"""
服务方案数据结构
每个用户恰好有一条服务链路：宏基站直连、phantom 基站直连或经簇头 D-Link
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Any

import orjson

from channel import LinkType
from topology import Topology, Tier
from utils.errors import MalformedPlan


@dataclass
class Cluster:
    """簇：一个簇头及其 D-Link 成员（成员不含簇头，且不为空）"""
    cell_id: int
    head: int
    members: List[int] = field(default_factory=list)

    def users(self) -> List[int]:
        return [self.head] + list(self.members)

    def to_dict(self) -> Dict[str, Any]:
        return {'cell_id': self.cell_id, 'head': self.head, 'members': list(self.members)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Cluster':
        return cls(
            cell_id=int(data['cell_id']),
            head=int(data['head']),
            members=[int(m) for m in data.get('members', [])],
        )


@dataclass(frozen=True)
class Designation:
    """基站指派结果"""
    user_id: int
    tier: Tier
    cell_id: Optional[int] = None


@dataclass(frozen=True)
class ClusterStep:
    """分簇迭代的一步（用于审计簇头选择）"""
    head: int
    head_rate: float
    candidates: Tuple[int, ...]
    joined: Tuple[int, ...]


@dataclass
class CellClustering:
    """
    单个 phantom 小区的分簇结果

    steps 是迭代分簇的原始轨迹；released 为修正阶段放回直连的成员，
    fallback 表示最终改用了全部直连
    """
    cell_id: int
    clusters: List[Cluster] = field(default_factory=list)
    direct_users: List[int] = field(default_factory=list)
    steps: List[ClusterStep] = field(default_factory=list)
    released: List[int] = field(default_factory=list)
    fallback: bool = False

    def users(self) -> List[int]:
        users = list(self.direct_users)
        for cluster in self.clusters:
            users.extend(cluster.users())
        return users


@dataclass
class ServingPlan:
    """
    服务方案

    macro_users、direct_phantom_users、clusters 三者构成全部用户的划分
    """
    macro_users: List[int] = field(default_factory=list)
    direct_phantom_users: List[Tuple[int, int]] = field(default_factory=list)  # (小区 ID, 用户 ID)
    clusters: List[Cluster] = field(default_factory=list)

    def all_users(self) -> List[int]:
        users = list(self.macro_users)
        users.extend(user_id for _, user_id in self.direct_phantom_users)
        for cluster in self.clusters:
            users.extend(cluster.users())
        return users

    def add_cell(self, clustering: CellClustering) -> None:
        self.direct_phantom_users.extend((clustering.cell_id, u) for u in clustering.direct_users)
        self.clusters.extend(clustering.clusters)

    def serving_link(self, user_id: int) -> Tuple[LinkType, int]:
        """
        用户的服务链路与发射端

        Returns:
            (链路类型, 发射端 ID)：宏基站 ID / 小区 ID / 簇头用户 ID
        """
        if user_id in self.macro_users:
            return LinkType.MLINK, 0
        for cell_id, direct in self.direct_phantom_users:
            if direct == user_id:
                return LinkType.PHLINK, cell_id
        for cluster in self.clusters:
            if cluster.head == user_id:
                return LinkType.PHLINK, cluster.cell_id
            if user_id in cluster.members:
                return LinkType.DLINK, cluster.head
        raise KeyError(user_id)

    def validate(self, topology: Topology, allow_cross_cell: bool = False) -> None:
        """
        检查划分约束

        Raises:
            MalformedPlan: 重复覆盖、漏覆盖、空簇或小区不一致
        """
        counts = Counter(self.all_users())
        doubled = sorted(u for u, n in counts.items() if n > 1)
        if doubled:
            raise MalformedPlan(f"用户被重复覆盖: {doubled}")
        expected = {u.id for u in topology.users}
        missing = sorted(expected - set(counts))
        if missing:
            raise MalformedPlan(f"用户未被覆盖: {missing}")
        unknown = sorted(set(counts) - expected)
        if unknown:
            raise MalformedPlan(f"方案中出现未知用户: {unknown}")

        for cluster in self.clusters:
            if not cluster.members:
                raise MalformedPlan(f"簇头 {cluster.head} 的簇为空，应作为直连用户")

        if allow_cross_cell:
            return
        for cell_id, user_id in self.direct_phantom_users:
            if topology.user(user_id).home_cell != cell_id:
                raise MalformedPlan(f"直连用户 {user_id} 不属于小区 {cell_id}")
        for cluster in self.clusters:
            for user_id in cluster.users():
                if topology.user(user_id).home_cell != cluster.cell_id:
                    raise MalformedPlan(f"簇用户 {user_id} 不属于小区 {cluster.cell_id}")

    def summary(self) -> Dict[str, int]:
        return {
            'macro_users': len(self.macro_users),
            'direct_phantom_users': len(self.direct_phantom_users),
            'clusters': len(self.clusters),
            'cluster_members': sum(len(c.members) for c in self.clusters),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            'macro_users': list(self.macro_users),
            'direct_phantom_users': [[cell_id, user_id] for cell_id, user_id in self.direct_phantom_users],
            'clusters': [c.to_dict() for c in self.clusters],
        }

    def to_json(self) -> bytes:
        return orjson.dumps(self.to_dict(), option=orjson.OPT_INDENT_2)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ServingPlan':
        return cls(
            macro_users=[int(u) for u in data.get('macro_users', [])],
            direct_phantom_users=[(int(c), int(u)) for c, u in data.get('direct_phantom_users', [])],
            clusters=[Cluster.from_dict(c) for c in data.get('clusters', [])],
        )

    def __repr__(self) -> str:
        s = self.summary()
        return (f"ServingPlan(macro={s['macro_users']}, direct={s['direct_phantom_users']}, "
                f"clusters={s['clusters']}, members={s['cluster_members']})")
