"""
能耗计算
三种情形的总能耗公式，以及贪心方案对应的混合能耗
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, TYPE_CHECKING

from channel import ChannelSnapshot, LinkBudget
from topology import Topology
from utils.errors import OutageInScenario, MalformedPlan, ScenarioNotApplicable
from .profile import PowerProfile, EnergyReport, Scenario

if TYPE_CHECKING:
    from planner.plan import ServingPlan, Cluster


@dataclass
class CellTerms:
    """一个 phantom 小区的能耗分项"""
    cell_id: int
    tx_phantom: float = 0.0
    tx_d2d: float = 0.0
    rx_terms: List[float] = field(default_factory=list)
    outage: List[int] = field(default_factory=list)

    @property
    def total(self) -> float:
        return math.fsum([self.tx_phantom, self.tx_d2d, math.fsum(self.rx_terms)])


def _usable(budget: Optional[LinkBudget]) -> bool:
    return budget is not None and not budget.outage


def _broadcast_energy(profile: PowerProfile, tx_power: float, rates: Sequence[float]) -> float:
    """广播发射能耗：按最差用户速率计，无接收者时为零"""
    if not rates:
        return 0.0
    return profile.service_bits * tx_power / min(rates)


def _receive_energy(profile: PowerProfile, rx_power: float, rate: float) -> float:
    return profile.service_bits * rx_power / rate


def cell_terms(cell_id: int,
               direct_users: Sequence[int],
               clusters: Sequence['Cluster'],
               snapshot: ChannelSnapshot,
               profile: PowerProfile,
               strict_eq3_min: bool = False) -> CellTerms:
    """
    计算单个 phantom 小区在给定簇结构下的能耗分项

    第一项的最小速率默认只取实际从 phantom 基站接收的用户（簇头与直连用户）；
    strict_eq3_min 时也计入簇成员自身的 PH-Link 速率。
    中断用户记入 outage 并从各项中剔除。
    """
    terms = CellTerms(cell_id=cell_id)

    ph_rates: List[float] = []
    receivers = list(direct_users) + [c.head for c in clusters]
    for user_id in receivers:
        budget = snapshot.phantom_link(user_id, cell_id)
        if not _usable(budget):
            terms.outage.append(user_id)
            continue
        ph_rates.append(budget.rate)
        terms.rx_terms.append(_receive_energy(profile, profile.rx_ph, budget.rate))

    if strict_eq3_min:
        for cluster in clusters:
            for member_id in cluster.members:
                budget = snapshot.phantom_link(member_id, cell_id)
                if _usable(budget):
                    ph_rates.append(budget.rate)

    terms.tx_phantom = _broadcast_energy(profile, profile.tx_ph, ph_rates)

    d2d_energies: List[float] = []
    for cluster in clusters:
        d_rates: List[float] = []
        for member_id in cluster.members:
            budget = snapshot.d2d(cluster.head, member_id)
            if not _usable(budget):
                terms.outage.append(member_id)
                continue
            d_rates.append(budget.rate)
            terms.rx_terms.append(_receive_energy(profile, profile.rx_d, budget.rate))
        d2d_energies.append(_broadcast_energy(profile, profile.tx_d, d_rates))
    terms.tx_d2d = math.fsum(d2d_energies)
    return terms


def _assemble(scenario: Scenario,
              tx_macro: float,
              cells: Sequence[CellTerms],
              extra_rx: Sequence[float] = (),
              outage_users: int = 0) -> EnergyReport:
    rx_terms = list(extra_rx)
    for terms in cells:
        rx_terms.extend(terms.rx_terms)
    return EnergyReport(
        scenario=scenario,
        tx_macro=tx_macro,
        tx_phantom=math.fsum(t.tx_phantom for t in cells),
        tx_d2d=math.fsum(t.tx_d2d for t in cells),
        rx_total=math.fsum(rx_terms),
        per_cell=[(t.cell_id, t.total) for t in sorted(cells, key=lambda t: t.cell_id)],
        outage_users=outage_users,
    )


def _macro_terms(user_ids: Sequence[int], snapshot: ChannelSnapshot,
                 profile: PowerProfile) -> Tuple[float, List[float], List[int]]:
    rates: List[float] = []
    rx_terms: List[float] = []
    outage: List[int] = []
    for user_id in user_ids:
        budget = snapshot.macro_link(user_id)
        if budget.outage:
            outage.append(user_id)
            continue
        rates.append(budget.rate)
        rx_terms.append(_receive_energy(profile, profile.rx_m, budget.rate))
    return _broadcast_energy(profile, profile.tx_m, rates), rx_terms, outage


def energy_situation1(snapshot: ChannelSnapshot, profile: PowerProfile,
                      skip_outage: bool = False) -> EnergyReport:
    """
    情形 1：所有用户直接由宏基站服务

    E = S_T * P_T,M / min R_k + Σ S_T * P_R,M / R_k

    Raises:
        OutageInScenario: 有用户的 M-Link 中断（skip_outage 时改为计数）
    """
    tx_macro, rx_terms, outage = _macro_terms(snapshot.user_ids, snapshot, profile)
    if outage and not skip_outage:
        raise OutageInScenario(Scenario.MACRO.value, outage)
    return _assemble(Scenario.MACRO, tx_macro, [], rx_terms, len(outage))


def energy_situation2(snapshot: ChannelSnapshot, topology: Topology, profile: PowerProfile,
                      skip_outage: bool = False) -> EnergyReport:
    """
    情形 2：每个 phantom 基站直接向本小区全部用户广播

    E = Σ_i S_T * P_T,PH / min_k R_k,i + Σ_i Σ_k S_T * P_R,PH / R_k,i
    没有用户的小区贡献为零

    Raises:
        ScenarioNotApplicable: 存在不属于任何 phantom 小区的用户
        OutageInScenario: 有用户的 PH-Link 中断
    """
    macro_only = [u.id for u in topology.macro_only_users()]
    if macro_only:
        raise ScenarioNotApplicable(f"情形 2 不覆盖仅宏小区用户: {macro_only}")

    cells = []
    outage: List[int] = []
    for cell_id in topology.cell_ids:
        members = [u.id for u in topology.users_in_cell(cell_id)]
        terms = cell_terms(cell_id, members, [], snapshot, profile)
        outage.extend(terms.outage)
        cells.append(terms)

    if outage and not skip_outage:
        raise OutageInScenario(Scenario.PHANTOM.value, outage)
    return _assemble(Scenario.PHANTOM, 0.0, cells, outage_users=len(outage))


def _check_partition(plan: 'ServingPlan', expected: Sequence[int]) -> None:
    seen: Dict[int, int] = defaultdict(int)
    for user_id in plan.all_users():
        seen[user_id] += 1
    doubled = sorted(u for u, n in seen.items() if n > 1)
    if doubled:
        raise MalformedPlan(f"用户被重复覆盖: {doubled}")
    missing = sorted(set(expected) - set(seen))
    if missing:
        raise MalformedPlan(f"用户未被覆盖: {missing}")
    unknown = sorted(set(seen) - set(expected))
    if unknown:
        raise MalformedPlan(f"方案中出现未知用户: {unknown}")


def _group_by_cell(plan: 'ServingPlan', snapshot: ChannelSnapshot):
    """按小区汇总直连用户与簇，并检查簇内用户同属一个小区"""
    directs: Dict[int, List[int]] = defaultdict(list)
    clusters: Dict[int, List['Cluster']] = defaultdict(list)
    for cell_id, user_id in plan.direct_phantom_users:
        directs[cell_id].append(user_id)
    for cluster in plan.clusters:
        if not snapshot.allow_cross_cell_d2d:
            for user_id in [cluster.head] + list(cluster.members):
                if snapshot.home_cells.get(user_id) != cluster.cell_id:
                    raise MalformedPlan(
                        f"簇 (小区 {cluster.cell_id}, 簇头 {cluster.head}) 含其他小区的用户 {user_id}"
                    )
        clusters[cluster.cell_id].append(cluster)
    if not snapshot.allow_cross_cell_d2d:
        for cell_id, users in directs.items():
            for user_id in users:
                if snapshot.home_cells.get(user_id) != cell_id:
                    raise MalformedPlan(f"直连用户 {user_id} 不属于小区 {cell_id}")
    return directs, clusters


def _phantom_cells(plan: 'ServingPlan', snapshot: ChannelSnapshot, profile: PowerProfile,
                   strict_eq3_min: bool) -> List[CellTerms]:
    directs, clusters = _group_by_cell(plan, snapshot)
    cells = []
    for cell_id in sorted(set(directs) | set(clusters)):
        cells.append(cell_terms(cell_id, directs[cell_id], clusters[cell_id],
                                snapshot, profile, strict_eq3_min))
    return cells


def energy_situation3(snapshot: ChannelSnapshot, plan: 'ServingPlan', profile: PowerProfile,
                      strict_eq3_min: bool = False, skip_outage: bool = False) -> EnergyReport:
    """
    情形 3：phantom 基站服务簇头与直连用户，簇头经 D-Link 转发给簇成员

    E = Σ_i S_T * P_T,PH / min R_k,i
      + Σ_i Σ_j S_T * P_T,D / min R_k,ij
      + Σ 每个用户按其服务链路的接收能耗

    Raises:
        ScenarioNotApplicable: 存在仅宏小区用户
        MalformedPlan: 方案含宏用户、漏掉或重复覆盖小区用户、簇跨小区
        OutageInScenario: 服务链路中断
    """
    macro_only = [u for u in snapshot.user_ids if snapshot.home_cells[u] is None]
    if macro_only:
        raise ScenarioNotApplicable(f"情形 3 不覆盖仅宏小区用户: {macro_only}")
    if plan.macro_users:
        raise MalformedPlan(f"情形 3 的方案不能包含宏用户: {sorted(plan.macro_users)}")
    _check_partition(plan, snapshot.user_ids)

    cells = _phantom_cells(plan, snapshot, profile, strict_eq3_min)
    outage = [u for t in cells for u in t.outage]
    if outage and not skip_outage:
        raise OutageInScenario(Scenario.SUPER_CELL.value, outage)
    return _assemble(Scenario.SUPER_CELL, 0.0, cells, outage_users=len(outage))


def energy_hybrid(snapshot: ChannelSnapshot, plan: 'ServingPlan', profile: PowerProfile,
                  strict_eq3_min: bool = False, skip_outage: bool = False) -> EnergyReport:
    """
    贪心方案的混合能耗

    宏项只对 M-Link 用户取最小速率（没有宏用户时为零），
    phantom 项与 D2D 项同情形 3，接收项按每个用户的服务链路计

    Raises:
        MalformedPlan: 用户未覆盖或重复覆盖
        OutageInScenario: 服务链路中断
    """
    _check_partition(plan, snapshot.user_ids)

    tx_macro, macro_rx, outage = _macro_terms(sorted(plan.macro_users), snapshot, profile)
    cells = _phantom_cells(plan, snapshot, profile, strict_eq3_min)
    outage = outage + [u for t in cells for u in t.outage]
    if outage and not skip_outage:
        raise OutageInScenario(Scenario.HYBRID.value, outage)
    return _assemble(Scenario.HYBRID, tx_macro, cells, macro_rx, len(outage))
