"""
贪心服务方案
第一步为每个用户指派基站（宏基站或 phantom 基站），
第二步在每个 phantom 小区内迭代选择簇头并分簇
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from channel import ChannelSnapshot, LinkBudget
from energy_model.profile import PowerProfile, per_user_cost
from topology import Topology, Tier
from utils.errors import NoFeasibleLink
from utils.logger import get_logger
from .brute_force import cell_energy
from .plan import Cluster, ClusterStep, CellClustering, Designation, ServingPlan

logger = get_logger('supercell.planner')


@dataclass(frozen=True)
class PlannerOptions:
    """
    规划器开关

    tie_break: 'wide' 时代价相等归宏基站 / 直连；'narrow' 时归 phantom / 入簇
    head_selection: 'rate' 选 PH-Link 速率最高者为簇头；'distance' 选离基站最近者
    candidate_all_phantoms: 指派时比较所有 phantom 基站而不仅是所在小区
    strict_eq3_min: 情形 3 第一项最小速率是否计入簇成员
    refine_clusters: 迭代分簇后按小区能耗修正（放回直连、解散簇、全部直连兜底）
    """
    tie_break: str = 'wide'
    head_selection: str = 'rate'
    candidate_all_phantoms: bool = False
    strict_eq3_min: bool = False
    refine_clusters: bool = True

    @classmethod
    def from_config(cls, config) -> 'PlannerOptions':
        return cls(
            tie_break=config.tie_break,
            head_selection=config.head_selection,
            candidate_all_phantoms=config.candidate_all_phantoms,
            strict_eq3_min=config.strict_eq3_min,
            refine_clusters=config.cluster_refine,
        )

    def prefers_narrow(self, narrow_cost: float, wide_cost: float) -> bool:
        """是否选择更窄的一层（phantom 优于宏、入簇优于直连）"""
        if self.tie_break == 'narrow':
            return narrow_cost <= wide_cost
        return narrow_cost < wide_cost


DEFAULT_OPTIONS = PlannerOptions()


def link_cost(budget: Optional[LinkBudget], profile: PowerProfile) -> float:
    """链路的单用户代价；链路不存在或中断时为无穷大"""
    if budget is None or budget.outage:
        return math.inf
    return per_user_cost(budget.link_type, budget.rate, profile)


def designate_bts(snapshot: ChannelSnapshot, topology: Topology, profile: PowerProfile,
                  options: PlannerOptions = DEFAULT_OPTIONS) -> Dict[int, Designation]:
    """
    为每个用户指派服务基站

    phantom 链路的单用户代价严格低于宏链路时指派给 phantom 基站，否则给宏基站；
    不属于任何 phantom 小区的用户直接归宏基站（candidate_all_phantoms 也不例外）

    Raises:
        NoFeasibleLink: 两类候选链路都中断
    """
    designations: Dict[int, Designation] = {}
    for user in sorted(topology.users, key=lambda u: u.id):
        macro_cost = link_cost(snapshot.macro_link(user.id), profile)

        if user.home_cell is None:
            candidates = []
        elif options.candidate_all_phantoms:
            candidates = snapshot.phantom_links(user.id)
        else:
            home = snapshot.phantom_link(user.id, user.home_cell)
            candidates = [home] if home is not None else []

        best_cell, best_cost = None, math.inf
        for budget in candidates:
            cost = link_cost(budget, profile)
            if cost < best_cost:
                best_cell, best_cost = budget.peer_id, cost

        if math.isinf(macro_cost) and math.isinf(best_cost):
            raise NoFeasibleLink(user.id)

        if not math.isinf(best_cost) and options.prefers_narrow(best_cost, macro_cost):
            designations[user.id] = Designation(user.id, Tier.PHANTOM, best_cell)
        else:
            designations[user.id] = Designation(user.id, Tier.MACRO)
    return designations


def _select_head(remaining: Sequence[int], cell_id: int, snapshot: ChannelSnapshot,
                 options: PlannerOptions) -> int:
    """速率相同或距离相同时取 ID 最小者"""
    def budget(user_id: int) -> Optional[LinkBudget]:
        return snapshot.phantom_link(user_id, cell_id)

    if options.head_selection == 'distance':
        def distance_key(user_id: int):
            b = budget(user_id)
            return (b is None or b.outage, math.inf if b is None else b.distance, user_id)
        return min(remaining, key=distance_key)

    def rate_key(user_id: int):
        b = budget(user_id)
        usable_rate = -1.0 if b is None or b.outage else b.rate
        return (-usable_rate, user_id)
    return min(remaining, key=rate_key)


def cluster_cell(cell_users: Sequence[int], snapshot: ChannelSnapshot, profile: PowerProfile,
                 cell_id: int, options: PlannerOptions = DEFAULT_OPTIONS) -> CellClustering:
    """
    对一个 phantom 小区的用户分簇

    循环：在未分配用户中选 PH-Link 速率最高者为候选簇头；其余未分配用户中，
    经 D-Link 接收的单用户代价严格低于直连代价者入簇；无人入簇时簇头改为直连；
    对剩余用户重复，直到全部分配。每轮至少移除一个用户。
    refine_clusters 打开时结果再经 refine_cell 修正。
    """
    result = CellClustering(cell_id=cell_id)
    remaining = sorted(cell_users)

    while remaining:
        head = _select_head(remaining, cell_id, snapshot, options)
        head_budget = snapshot.phantom_link(head, cell_id)
        others = [u for u in remaining if u != head]

        joined = []
        for user_id in others:
            d_budget = snapshot.d2d(head, user_id)
            if d_budget.outage:
                continue
            d_cost = link_cost(d_budget, profile)
            ph_cost = link_cost(snapshot.phantom_link(user_id, cell_id), profile)
            if options.prefers_narrow(d_cost, ph_cost):
                joined.append(user_id)

        result.steps.append(ClusterStep(
            head=head,
            head_rate=0.0 if head_budget is None else head_budget.rate,
            candidates=tuple(others),
            joined=tuple(joined),
        ))
        if joined:
            result.clusters.append(Cluster(cell_id=cell_id, head=head, members=joined))
        else:
            result.direct_users.append(head)

        joined_set = set(joined)
        remaining = [u for u in others if u not in joined_set]

    if options.refine_clusters:
        return refine_cell(result, snapshot, profile, options)
    return result


# ==========================================
# 分簇修正
# ==========================================

def _usable_rate(budget: Optional[LinkBudget]) -> Optional[float]:
    if budget is None or budget.outage:
        return None
    return budget.rate


def _release_members(clustering: CellClustering, snapshot: ChannelSnapshot,
                     profile: PowerProfile, strict_eq3_min: bool) -> None:
    """
    把成员放回直连，只接受使小区能耗严格下降的改动

    每轮先逐个成员（D-Link 速率低者优先）、再逐个整簇尝试，直到一轮内没有改动。
    每次接受都至少减少一个成员，循环必然结束
    """
    cell_id = clustering.cell_id
    ph_rate = {u: _usable_rate(snapshot.phantom_link(u, cell_id)) for u in clustering.users()}
    receivers = list(clustering.direct_users) + [c.head for c in clustering.clusters]
    if any(ph_rate[u] is None for u in receivers):
        return
    d_rate = {m: snapshot.d2d(c.head, m).rate for c in clustering.clusters for m in c.members}

    receivers_min = min(ph_rate[u] for u in receivers)

    def tx_ph_delta(rates: List[float]) -> float:
        # 严格口径下成员本来就计入最小速率
        if strict_eq3_min:
            return 0.0
        new_min = min([receivers_min] + rates)
        return profile.tx_ph / new_min - profile.tx_ph / receivers_min

    def tx_d(members: Sequence[int]) -> float:
        if not members:
            return 0.0
        return profile.tx_d / min(d_rate[m] for m in members)

    def rx_delta(member: int) -> float:
        return profile.rx_ph / ph_rate[member] - profile.rx_d / d_rate[member]

    def release(cluster: Cluster, moved: List[int]) -> None:
        nonlocal receivers_min
        cluster.members = [m for m in cluster.members if m not in moved]
        clustering.direct_users.extend(moved)
        clustering.released.extend(moved)
        receivers_min = min([receivers_min] + [ph_rate[m] for m in moved])

    changed = True
    while changed:
        changed = False
        for cluster in clustering.clusters:
            for member in sorted(cluster.members, key=lambda m: (d_rate[m], m)):
                if ph_rate[member] is None:
                    continue
                rest = [m for m in cluster.members if m != member]
                delta = (tx_ph_delta([ph_rate[member]]) + tx_d(rest) - tx_d(cluster.members)
                         + rx_delta(member))
                if delta < 0:
                    release(cluster, [member])
                    changed = True

        for cluster in clustering.clusters:
            members = list(cluster.members)
            if not members or any(ph_rate[m] is None for m in members):
                continue
            delta = (tx_ph_delta([ph_rate[m] for m in members]) - tx_d(members)
                     + math.fsum(rx_delta(m) for m in members))
            if delta < 0:
                release(cluster, members)
                changed = True

        emptied = [c for c in clustering.clusters if not c.members]
        if emptied:
            clustering.clusters = [c for c in clustering.clusters if c.members]
            clustering.direct_users.extend(c.head for c in emptied)


def refine_cell(clustering: CellClustering, snapshot: ChannelSnapshot, profile: PowerProfile,
                options: PlannerOptions = DEFAULT_OPTIONS) -> CellClustering:
    """
    按小区能耗修正迭代分簇的结果

    先把放回直连能降低小区能耗的成员放回（成员变空的簇头改为直连），
    再与全部直连比较，全部直连不更差（按 tie_break）时改用全部直连。
    只移出成员，留在簇内的成员仍满足入簇规则；结果不高于全部直连
    """
    if not clustering.clusters:
        return clustering

    users = sorted(clustering.users())
    refined = CellClustering(
        cell_id=clustering.cell_id,
        clusters=[Cluster(c.cell_id, c.head, list(c.members)) for c in clustering.clusters],
        direct_users=list(clustering.direct_users),
        steps=list(clustering.steps),
    )
    _release_members(refined, snapshot, profile, options.strict_eq3_min)
    if not refined.clusters:
        return refined

    clustered_j = cell_energy(refined, snapshot, profile, options.strict_eq3_min)
    direct = CellClustering(cell_id=clustering.cell_id, direct_users=users)
    direct_j = cell_energy(direct, snapshot, profile, options.strict_eq3_min)
    if options.prefers_narrow(clustered_j, direct_j):
        return refined

    logger.debug(f"小区 {clustering.cell_id} 分簇 {clustered_j:.6g} J 不优于全部直连 {direct_j:.6g} J")
    direct.steps = list(clustering.steps)
    direct.released = [m for c in clustering.clusters for m in c.members]
    direct.fallback = True
    return direct


def build_plan(snapshot: ChannelSnapshot, topology: Topology, profile: PowerProfile,
               options: PlannerOptions = DEFAULT_OPTIONS) -> ServingPlan:
    """
    组合两步得到完整服务方案（各小区按 ID 顺序合并）

    Raises:
        NoFeasibleLink: 有用户两类链路都中断
    """
    designations = designate_bts(snapshot, topology, profile, options)

    plan = ServingPlan()
    by_cell: Dict[int, List[int]] = defaultdict(list)
    for user_id in sorted(designations):
        designation = designations[user_id]
        if designation.tier is Tier.MACRO:
            plan.macro_users.append(user_id)
        else:
            by_cell[designation.cell_id].append(user_id)

    for cell_id in sorted(by_cell):
        plan.add_cell(cluster_cell(by_cell[cell_id], snapshot, profile, cell_id, options))

    logger.debug(f"服务方案: {plan}")
    return plan


def cluster_all_plan(snapshot: ChannelSnapshot, topology: Topology, profile: PowerProfile,
                     options: PlannerOptions = DEFAULT_OPTIONS) -> ServingPlan:
    """不做基站指派，直接对每个小区的全部用户分簇（纯情形 3）"""
    plan = ServingPlan()
    for cell_id in topology.cell_ids:
        users = [u.id for u in topology.users_in_cell(cell_id)]
        if users:
            plan.add_cell(cluster_cell(users, snapshot, profile, cell_id, options))
    plan.macro_users = [u.id for u in topology.macro_only_users()]
    return plan
