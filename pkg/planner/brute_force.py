"""
小区分簇穷举
枚举一个小区内用户的全部划分（直连 | 指定簇头的簇），取小区总能耗最小者。
只用于校验贪心结果，规模受 Bell 数限制
"""

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence

from channel import ChannelSnapshot
from energy_model import PowerProfile, cell_terms
from utils.errors import NoFeasibleLink, TooLarge
from .plan import Cluster, CellClustering

MAX_BRUTE_FORCE_USERS = 8


@dataclass
class BruteForceResult:
    clustering: CellClustering
    energy: float
    evaluated: int


def set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
    """按固定顺序生成 items 的全部集合划分"""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def cell_energy(clustering: CellClustering, snapshot: ChannelSnapshot, profile: PowerProfile,
                strict_eq3_min: bool = False) -> float:
    """分簇结果的小区总能耗；有中断链路时为无穷大"""
    terms = cell_terms(clustering.cell_id, clustering.direct_users, clustering.clusters,
                       snapshot, profile, strict_eq3_min)
    if terms.outage:
        return math.inf
    return terms.total


def _candidates(cell_id: int, partition: List[List[int]]) -> Iterator[CellClustering]:
    singles = sorted(block[0] for block in partition if len(block) == 1)
    groups = [sorted(block) for block in partition if len(block) > 1]
    for heads in itertools.product(*groups):
        clusters = [
            Cluster(cell_id=cell_id, head=head, members=[u for u in group if u != head])
            for head, group in zip(heads, groups)
        ]
        yield CellClustering(cell_id=cell_id, clusters=clusters, direct_users=list(singles))


def brute_force_plan(cell_users: Sequence[int], snapshot: ChannelSnapshot, profile: PowerProfile,
                     cell_id: int, strict_eq3_min: bool = False,
                     max_users: int = MAX_BRUTE_FORCE_USERS) -> BruteForceResult:
    """
    一个小区在情形 3 目标下的最优分簇

    能耗相同的划分保留先枚举到的那个

    Raises:
        TooLarge: 用户数超过 max_users
        NoFeasibleLink: 不存在没有中断链路的划分
    """
    users = sorted(cell_users)
    if len(users) > max_users:
        raise TooLarge(f"穷举最多支持 {max_users} 个用户，当前 {len(users)}")

    best, best_energy, evaluated = None, math.inf, 0
    for partition in set_partitions(users):
        for candidate in _candidates(cell_id, partition):
            evaluated += 1
            energy = cell_energy(candidate, snapshot, profile, strict_eq3_min)
            if energy < best_energy:
                best, best_energy = candidate, energy

    if best is None:
        if not users:
            return BruteForceResult(CellClustering(cell_id=cell_id), 0.0, evaluated)
        raise NoFeasibleLink(users[0])
    return BruteForceResult(best, best_energy, evaluated)
