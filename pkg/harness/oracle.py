"""
贪心分簇与穷举最优的对照
在随机生成的单个小区上比较贪心、穷举最优与全部直连三种小区能耗
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Any

from channel import build_snapshot
from energy_model import PowerProfile
from planner import (
    CellClustering,
    PlannerOptions,
    MAX_BRUTE_FORCE_USERS,
    brute_force_plan,
    cell_energy,
    cluster_cell,
)
from topology import generate_topology
from utils.config import SimConfig
from utils.errors import NoFeasibleLink, TooLarge
from utils.logger import get_logger
from utils.rng import SeededRng, mix_seed

logger = get_logger('supercell.harness')

ORACLE_SALT = 0x0AC1E


@dataclass
class OracleCase:
    instance: int
    seed: int
    users: int
    greedy_j: float
    optimal_j: float
    all_direct_j: float

    @property
    def ratio(self) -> float:
        return self.greedy_j / self.optimal_j

    def to_dict(self) -> Dict[str, Any]:
        return {
            'instance': self.instance,
            'seed': self.seed,
            'users': self.users,
            'greedy_j': self.greedy_j,
            'optimal_j': self.optimal_j,
            'all_direct_j': self.all_direct_j,
            'ratio': self.ratio,
        }


@dataclass
class OracleSummary:
    cases: List[OracleCase] = field(default_factory=list)
    skipped: int = 0

    @property
    def greedy_never_below_optimum(self) -> bool:
        return all(c.greedy_j >= c.optimal_j * (1 - 1e-12) for c in self.cases)

    @property
    def optimum_never_above_direct(self) -> bool:
        return all(c.optimal_j <= c.all_direct_j * (1 + 1e-12) for c in self.cases)

    @property
    def greedy_never_above_direct(self) -> bool:
        return all(c.greedy_j <= c.all_direct_j * (1 + 1e-12) for c in self.cases)

    @property
    def greedy_within_direct_fraction(self) -> float:
        if not self.cases:
            return 0.0
        return sum(1 for c in self.cases if c.greedy_j <= c.all_direct_j * (1 + 1e-12)) / len(self.cases)

    @property
    def mean_ratio(self) -> float:
        if not self.cases:
            return math.nan
        return math.fsum(c.ratio for c in self.cases) / len(self.cases)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'instances': len(self.cases) + self.skipped,
            'evaluated': len(self.cases),
            'skipped': self.skipped,
            'greedy_never_below_optimum': self.greedy_never_below_optimum,
            'optimum_never_above_direct': self.optimum_never_above_direct,
            'greedy_never_above_direct': self.greedy_never_above_direct,
            'greedy_within_direct_fraction': self.greedy_within_direct_fraction,
            'mean_greedy_optimal_ratio': self.mean_ratio,
            'cases': [c.to_dict() for c in self.cases],
        }


def compare_cell(config: SimConfig, instance: int, users: int) -> OracleCase:
    """
    在一个单小区拓扑上运行贪心与穷举

    Raises:
        NoFeasibleLink: 小区内存在无论如何都中断的用户
        TooLarge: users 超过穷举上限
    """
    cell_config = config.with_overrides(phantom_count=1, users_per_cell=users, macro_only_users=0)
    seed = mix_seed(config.master_seed, ORACLE_SALT, instance, users)
    rng = SeededRng(seed)
    topology = generate_topology(cell_config, rng.child(0))
    snapshot = build_snapshot(topology, cell_config, rng.child(1))

    profile = PowerProfile.from_config(cell_config)
    options = PlannerOptions.from_config(cell_config)
    cell_id = topology.cell_ids[0]
    cell_users = [u.id for u in topology.users_in_cell(cell_id)]

    greedy = cluster_cell(cell_users, snapshot, profile, cell_id, options)
    optimal = brute_force_plan(cell_users, snapshot, profile, cell_id, options.strict_eq3_min)
    direct = CellClustering(cell_id=cell_id, direct_users=list(cell_users))

    greedy_j = cell_energy(greedy, snapshot, profile, options.strict_eq3_min)
    direct_j = cell_energy(direct, snapshot, profile, options.strict_eq3_min)
    if math.isinf(greedy_j):
        raise NoFeasibleLink(cell_users[0])
    return OracleCase(
        instance=instance,
        seed=seed,
        users=users,
        greedy_j=greedy_j,
        optimal_j=optimal.energy,
        all_direct_j=direct_j,
    )


def run_oracle(config: SimConfig, instances: int = 500, max_users: int = 6) -> OracleSummary:
    """
    依次生成 instances 个小区，用户数在 1..max_users 间循环

    有中断链路的实例计入 skipped
    """
    if not 1 <= max_users <= MAX_BRUTE_FORCE_USERS:
        raise TooLarge(f"max_users 必须在 1..{MAX_BRUTE_FORCE_USERS} 之间，当前 {max_users}")

    summary = OracleSummary()
    for instance in range(instances):
        users = 1 + instance % max_users
        try:
            summary.cases.append(compare_cell(config, instance, users))
        except NoFeasibleLink as e:
            summary.skipped += 1
            logger.debug(f"穷举实例 {instance} 跳过: {e}")
    logger.info(f"穷举对照完成: {len(summary.cases)} 个实例, 平均贪心/最优比 {summary.mean_ratio:.6f}")
    return summary
