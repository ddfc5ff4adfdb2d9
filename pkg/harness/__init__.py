"""
实验引擎
带种子的 Monte Carlo 试验、扫描统计与穷举对照
"""

from .trial import (
    MACRO,
    PHANTOM,
    SUPER_CELL,
    PURE_EQ3,
    CORE_SCENARIOS,
    TrialReport,
    TrialOutcome,
    trial_seed,
    simulate_trial,
    run_trial,
)
from .sweep import (
    SampleStats,
    SweepRow,
    SweepReport,
    summarize,
    aggregate,
    run_point,
    sweep_users,
    sweep_phantoms,
)
from .oracle import OracleCase, OracleSummary, compare_cell, run_oracle

__all__ = [
    'MACRO',
    'PHANTOM',
    'SUPER_CELL',
    'PURE_EQ3',
    'CORE_SCENARIOS',
    'TrialReport',
    'TrialOutcome',
    'trial_seed',
    'simulate_trial',
    'run_trial',
    'SampleStats',
    'SweepRow',
    'SweepReport',
    'summarize',
    'aggregate',
    'run_point',
    'sweep_users',
    'sweep_phantoms',
    'OracleCase',
    'OracleSummary',
    'compare_cell',
    'run_oracle',
]
