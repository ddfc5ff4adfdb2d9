"""
单次试验
生成拓扑与信道快照，规划服务方案，并在同一快照上计算各场景能耗
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Any

import orjson

from channel import ChannelSnapshot, build_snapshot
from energy_model import (
    EnergyReport,
    PowerProfile,
    energy_situation1,
    energy_situation2,
    energy_situation3,
    energy_hybrid,
)
from planner import PlannerOptions, ServingPlan, build_plan, cluster_all_plan
from topology import Topology, generate_topology, split_users
from utils.config import SimConfig
from utils.errors import NoFeasibleLink, OutageInScenario, ScenarioNotApplicable
from utils.logger import get_logger
from utils.rng import SeededRng, mix_seed

logger = get_logger('supercell.harness')

MACRO = 'macro'
PHANTOM = 'phantom'
SUPER_CELL = 'supercell'
PURE_EQ3 = 'pure_eq3'

CORE_SCENARIOS = (MACRO, PHANTOM, SUPER_CELL)


def trial_seed(master_seed: int, trial_index: int, user_count: int, phantom_count: int) -> int:
    """试验种子 = mix_seed(master_seed, trial_index, user_count, phantom_count)"""
    return mix_seed(master_seed, trial_index, user_count, phantom_count)


@dataclass
class TrialReport:
    """
    单次试验结果

    reports 的键为场景名（macro / phantom / supercell / pure_eq3）；
    rejected 时 reports 为空。拓扑不满足前提的场景（例如存在仅宏小区用户时的
    phantom）直接缺省，不算拒绝
    """
    trial_index: int
    seed: int
    user_count: int
    phantom_count: int
    reports: Dict[str, EnergyReport] = field(default_factory=dict)
    rejected: bool = False
    reason: Optional[str] = None
    plan_summary: Dict[str, int] = field(default_factory=dict)

    def total(self, scenario: str) -> Optional[float]:
        report = self.reports.get(scenario)
        return None if report is None else report.total

    def to_dict(self) -> Dict[str, Any]:
        return {
            'trial_index': self.trial_index,
            'seed': self.seed,
            'user_count': self.user_count,
            'phantom_count': self.phantom_count,
            'rejected': self.rejected,
            'reason': self.reason,
            'reports': {name: self.reports[name].to_dict() for name in sorted(self.reports)},
            'plan_summary': dict(self.plan_summary),
        }

    def to_json(self) -> bytes:
        return orjson.dumps(self.to_dict(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'TrialReport':
        return cls(
            trial_index=int(data['trial_index']),
            seed=int(data['seed']),
            user_count=int(data['user_count']),
            phantom_count=int(data['phantom_count']),
            reports={name: EnergyReport.from_dict(r) for name, r in data.get('reports', {}).items()},
            rejected=bool(data.get('rejected', False)),
            reason=data.get('reason'),
            plan_summary=dict(data.get('plan_summary', {})),
        )


@dataclass
class TrialOutcome:
    """
    试验结果及其中间产物（供 run --out 导出）

    snapshot 是生成 plan 所用的快照；非配对模式下即 Super cell 场景的那一次抽样
    """
    report: TrialReport
    topology: Topology
    snapshot: ChannelSnapshot
    plan: Optional[ServingPlan] = None


def _trial_config(config: SimConfig, phantom_count: Optional[int]) -> SimConfig:
    if phantom_count is None or phantom_count == config.phantom_count:
        return config
    return config.with_overrides(phantom_count=phantom_count)


def _generate(config: SimConfig, rng: SeededRng, user_count: Optional[int]) -> Topology:
    if user_count is None:
        return generate_topology(config, rng)
    if config.phantom_count == 0:
        return generate_topology(config, rng, [], config.macro_only_users + user_count)
    return generate_topology(config, rng, split_users(user_count, config.phantom_count))


def simulate_trial(config: SimConfig, trial_index: int,
                   user_count: Optional[int] = None,
                   phantom_count: Optional[int] = None) -> TrialOutcome:
    """
    运行一次试验并保留拓扑、快照与方案

    Args:
        config: SimConfig
        trial_index: 试验序号
        user_count: phantom 小区内的总用户数（按小区平均分配），None 时为
            phantom_count * users_per_cell；仅宏小区用户另按 macro_only_users 计
        phantom_count: 覆盖配置中的 phantom 小区数

    Raises:
        PlacementExhausted: 配置的半径与数量组合无法放置
    """
    config = _trial_config(config, phantom_count)
    users = config.default_user_count if user_count is None else user_count
    seed = trial_seed(config.master_seed, trial_index, users, config.phantom_count)
    rng = SeededRng(seed)

    topology = _generate(config, rng.child(0), user_count)

    def snapshot_for(slot: int) -> ChannelSnapshot:
        # 非配对模式下每个场景各抽一次信道
        return build_snapshot(topology, config, rng.child(1 if config.paired_snapshots else 1 + slot))

    shared = snapshot_for(0)
    snapshots = [shared] + [shared if config.paired_snapshots else snapshot_for(i) for i in (1, 2, 3)]

    profile = PowerProfile.from_config(config)
    options = PlannerOptions.from_config(config)
    report = TrialReport(
        trial_index=trial_index,
        seed=seed,
        user_count=users,
        phantom_count=config.phantom_count,
    )

    plan = None
    try:
        report.reports[MACRO] = energy_situation1(snapshots[0], profile)
        try:
            report.reports[PHANTOM] = energy_situation2(snapshots[1], topology, profile)
        except ScenarioNotApplicable as e:
            logger.debug(f"试验 {trial_index} 跳过 {PHANTOM}: {e}")

        plan = build_plan(snapshots[2], topology, profile, options)
        report.reports[SUPER_CELL] = energy_hybrid(
            snapshots[2], plan, profile, options.strict_eq3_min
        )
        report.plan_summary = plan.summary()

        if config.include_pure_eq3:
            full_plan = cluster_all_plan(snapshots[3], topology, profile, options)
            try:
                report.reports[PURE_EQ3] = energy_situation3(
                    snapshots[3], full_plan, profile, options.strict_eq3_min
                )
            except ScenarioNotApplicable as e:
                logger.debug(f"试验 {trial_index} 跳过 {PURE_EQ3}: {e}")
    except (OutageInScenario, NoFeasibleLink) as e:
        report.reports = {}
        report.rejected = True
        report.reason = str(e)
        logger.warning(f"试验 {trial_index} (用户 {users}) 被拒绝: {e}")

    return TrialOutcome(report=report, topology=topology, snapshot=snapshots[2], plan=plan)


def run_trial(config: SimConfig, trial_index: int,
              user_count: Optional[int] = None,
              phantom_count: Optional[int] = None) -> TrialReport:
    """
    运行一次试验

    同样的 (config, trial_index, user_count, phantom_count) 总是得到相同的报告；
    链路中断导致的拒绝作为数据返回
    """
    return simulate_trial(config, trial_index, user_count, phantom_count).report
