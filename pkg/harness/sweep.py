"""
Monte Carlo 扫描
对用户数（或 phantom 小区数）逐点运行多次试验并统计均值、标准差与 95% 置信半宽
"""

import logging
import math
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool
from typing import Dict, Iterable, List, Optional, Sequence, Any

import pandas as pd

from utils.config import SimConfig
from utils.errors import InsufficientTrials, ValidationError
from utils.logger import get_logger, log_event
from .trial import TrialReport, run_trial

logger = get_logger('supercell.harness')

Z_95 = 1.96

USERS_AXIS = 'users'
PHANTOM_AXIS = 'phantom_count'


@dataclass(frozen=True)
class SampleStats:
    mean: float
    std: float
    ci95: float
    n: int


def summarize(values: Sequence[float]) -> SampleStats:
    """
    样本均值、样本标准差（n-1）与 1.96*std/sqrt(n)

    求和用 math.fsum，结果与样本顺序无关

    Raises:
        InsufficientTrials: 没有样本
    """
    n = len(values)
    if n == 0:
        raise InsufficientTrials("没有可统计的试验")
    mean = math.fsum(values) / n
    if n == 1:
        return SampleStats(mean=mean, std=0.0, ci95=0.0, n=1)
    std = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))
    return SampleStats(mean=mean, std=std, ci95=Z_95 * std / math.sqrt(n), n=n)


@dataclass
class SweepRow:
    """某扫描点上一个场景的统计"""
    point: int
    scenario: str
    mean: float
    std: float
    ci95: float
    trials: int
    rejected: int
    mean_rx: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'point': self.point,
            'scenario': self.scenario,
            'mean_energy_j': self.mean,
            'std_energy_j': self.std,
            'ci95_j': self.ci95,
            'trials': self.trials,
            'rejected': self.rejected,
            'mean_rx_j': self.mean_rx,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepRow':
        return cls(
            point=int(data['point']),
            scenario=str(data['scenario']),
            mean=float(data['mean_energy_j']),
            std=float(data['std_energy_j']),
            ci95=float(data['ci95_j']),
            trials=int(data['trials']),
            rejected=int(data['rejected']),
            mean_rx=float(data.get('mean_rx_j', 0.0)),
        )


def aggregate(trials: Iterable[TrialReport], point: Optional[int] = None) -> List[SweepRow]:
    """
    把一个扫描点的全部试验汇总为每个场景一行

    只统计未被拒绝的试验；每行满足 trials + rejected = 该点试验总数

    Raises:
        InsufficientTrials: 没有未被拒绝的试验
    """
    trials = list(trials)
    accepted = [t for t in trials if not t.rejected]
    if not accepted:
        raise InsufficientTrials(f"扫描点 {point} 的 {len(trials)} 次试验全部被拒绝")
    rejected = len(trials) - len(accepted)
    if point is None:
        point = accepted[0].user_count

    scenarios = sorted({name for t in accepted for name in t.reports})
    rows = []
    for scenario in scenarios:
        reports = [t.reports[scenario] for t in accepted if scenario in t.reports]
        stats = summarize([r.total for r in reports])
        rows.append(SweepRow(
            point=point,
            scenario=scenario,
            mean=stats.mean,
            std=stats.std,
            ci95=stats.ci95,
            trials=stats.n,
            rejected=rejected,
            mean_rx=math.fsum(r.rx_total for r in reports) / stats.n,
        ))
    return rows


@dataclass
class SweepReport:
    """扫描结果：axis 为 'users' 或 'phantom_count'"""
    axis: str = USERS_AXIS
    rows: List[SweepRow] = field(default_factory=list)

    def sorted_rows(self) -> List[SweepRow]:
        return sorted(self.rows, key=lambda r: (r.point, r.scenario))

    def points(self) -> List[int]:
        return sorted({r.point for r in self.rows})

    def scenarios(self) -> List[str]:
        return sorted({r.scenario for r in self.rows})

    def row(self, point: int, scenario: str) -> Optional[SweepRow]:
        for r in self.rows:
            if r.point == point and r.scenario == scenario:
                return r
        return None

    def to_frame(self) -> pd.DataFrame:
        """按 (扫描点, 场景) 排序的 DataFrame，列名即 CSV 表头"""
        records = [{
            self.axis: r.point,
            'scenario': r.scenario,
            'mean_energy_j': r.mean,
            'std_energy_j': r.std,
            'ci95_j': r.ci95,
            'trials': r.trials,
            'rejected': r.rejected,
        } for r in self.sorted_rows()]
        columns = [self.axis, 'scenario', 'mean_energy_j', 'std_energy_j', 'ci95_j', 'trials', 'rejected']
        return pd.DataFrame(records, columns=columns)

    def to_dict(self) -> Dict[str, Any]:
        return {'axis': self.axis, 'rows': [r.to_dict() for r in self.sorted_rows()]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SweepReport':
        return cls(axis=data.get('axis', USERS_AXIS),
                   rows=[SweepRow.from_dict(r) for r in data.get('rows', [])])


def run_point(config: SimConfig, user_count: Optional[int], phantom_count: Optional[int],
              pool=None) -> List[TrialReport]:
    """
    运行一个扫描点的全部试验，结果按试验序号排列

    pool 为 multiprocessing.Pool 时并行执行；种子只由序号决定，
    因此结果与串行执行一致
    """
    job = partial(run_trial, config, user_count=user_count, phantom_count=phantom_count)
    indices = range(config.trials)
    if pool is None:
        return [job(i) for i in indices]
    return pool.map(job, indices)


def _sweep(config: SimConfig, axis: str, points: Sequence[int], workers: int) -> SweepReport:
    if workers < 1:
        raise ValueError(f"workers 至少为 1，当前为: {workers}")

    report = SweepReport(axis=axis)
    pool = Pool(workers) if workers > 1 else None
    try:
        for point in points:
            log_event(logger, logging.INFO, f"扫描点 {axis}={point} 开始", axis=axis, point=point,
                      trials=config.trials)
            if axis == USERS_AXIS:
                trials = run_point(config, point, None, pool)
            else:
                trials = run_point(config, config.phantom_sweep_users, point, pool)
            rows = aggregate(trials, point)
            report.rows.extend(rows)
            log_event(logger, logging.INFO, f"扫描点 {axis}={point} 完成", axis=axis, point=point,
                      rejected=rows[0].rejected)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return report


def sweep_users(config: SimConfig, workers: int = 1) -> SweepReport:
    """
    按 user_sweep 扫描总用户数

    Raises:
        InsufficientTrials: 某个扫描点全部试验被拒绝
    """
    return _sweep(config, USERS_AXIS, config.user_sweep, workers)


def sweep_phantoms(config: SimConfig, workers: int = 1) -> SweepReport:
    """
    在固定总用户数 phantom_sweep_users 下按 phantom_sweep 扫描 phantom 小区数

    Raises:
        ValidationError: phantom_sweep 为空
        InsufficientTrials: 某个扫描点全部试验被拒绝
    """
    if not config.phantom_sweep:
        raise ValidationError("phantom_sweep", "不能为空")
    return _sweep(config, PHANTOM_AXIS, config.phantom_sweep, workers)
