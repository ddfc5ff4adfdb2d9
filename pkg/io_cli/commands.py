"""
命令行入口
子命令: run / sweep / plan / validate-config / oracle

退出码: 0 成功；1 配置或参数错误；2 运行期错误
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import orjson

from channel import ChannelSnapshot, write_links_csv
from energy_model import PowerProfile
from harness import (
    simulate_trial,
    sweep_users,
    sweep_phantoms,
    run_oracle,
)
from planner import PlannerOptions, build_plan
from topology import Topology
from utils.config import SimConfig, load_config, seed_from_env
from utils.errors import ConfigError, ParseError, SuperCellError, ValidationError
from utils.logger import get_logger
from .serialization import JSON_OPTIONS, RunManifest, read_json, write_json, write_sweep_csv

logger = get_logger('supercell.cli')

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _ArgumentParser(argparse.ArgumentParser):
    """参数错误按配置错误处理（退出码 1），不直接退出进程"""

    def error(self, message):
        raise ParseError(f"命令行参数错误: {message}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"应为逗号分隔的整数: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='KEY=value 配置文件路径')
    common.add_argument('--seed', type=int, help='主种子（缺省时读取 SUPERCELL_SEED）')
    common.add_argument('--json', action='store_true', help='stdout 输出机器可读 JSON')
    common.add_argument('-v', '--verbose', action='count', default=0, help='-v 输出 INFO，-vv 输出 DEBUG')

    parser = _ArgumentParser(prog='supercell', description='Super cell 三层广播能耗仿真器')
    sub = parser.add_subparsers(dest='command', parser_class=_ArgumentParser)
    sub.required = True

    run = sub.add_parser('run', parents=[common], help='运行一次试验，输出 TrialReport JSON')
    run.add_argument('--trial-index', type=int, default=0)
    run.add_argument('--users', type=_int_list, help='phantom 小区内总用户数（单个值）')
    run.add_argument('--out', help='导出拓扑+快照 JSON、链路 CSV 与 manifest.json 的目录；'
                                   'manifest.json 只有设置 SOURCE_DATE_EPOCH 时才逐字节可复现')

    sweep = sub.add_parser('sweep', parents=[common], help='按用户数（或 phantom 小区数）扫描')
    sweep.add_argument('--trials', type=int)
    sweep.add_argument('--users', type=_int_list, help='逗号分隔的用户数列表')
    sweep.add_argument('--phantoms', type=_int_list, help='改为扫描 phantom 小区数')
    sweep.add_argument('--out', default='results',
                       help='输出目录（默认 results）；manifest.json 只有设置 SOURCE_DATE_EPOCH 时才逐字节可复现')
    sweep.add_argument('--workers', type=int, default=1, help='并行进程数，不影响结果')

    plan = sub.add_parser('plan', parents=[common], help='由拓扑+快照 JSON 生成服务方案')
    plan.add_argument('input', help='run --out 写出的 inputs.json')
    plan.add_argument('--out', help='方案 JSON 输出路径（缺省写 stdout）')

    sub.add_parser('validate-config', parents=[common], help='只解析并验证配置')

    oracle = sub.add_parser('oracle', parents=[common], help='小规模小区上对照贪心与穷举最优')
    oracle.add_argument('--instances', type=int, default=500)
    oracle.add_argument('--max-users', type=int, default=6)
    return parser


def _configure_verbosity(verbose: int) -> None:
    if verbose:
        level = logging.DEBUG if verbose > 1 else logging.INFO
        logging.getLogger('supercell').setLevel(level)


def _resolve_config(args, **overrides) -> SimConfig:
    """配置文件 -> 命令行覆盖，返回重新验证后的配置"""
    config = load_config(args.config)
    seed = args.seed if args.seed is not None else seed_from_env(config.master_seed)
    overrides = {key: value for key, value in overrides.items() if value is not None}
    return config.with_overrides(master_seed=seed, **overrides)


def _emit(data: bytes) -> None:
    sys.stdout.write(data.decode('utf-8') + '\n')
    sys.stdout.flush()


# ==========================================
# 子命令
# ==========================================

def cmd_run(args) -> int:
    config = _resolve_config(args)
    user_count = None
    if args.users:
        if len(args.users) != 1:
            raise ValidationError('users', f"run 只接受一个用户数，当前为: {args.users}")
        user_count = args.users[0]
        if user_count < 0:
            raise ValidationError('users', f"不能为负数，当前为: {user_count}")

    outcome = simulate_trial(config, args.trial_index, user_count)
    report_json = outcome.report.to_json()
    _emit(report_json)

    if args.out:
        out = Path(args.out)
        manifest = RunManifest.for_config(config, command='run')
        paths = [out / 'inputs.json', out / 'links.csv', out / 'trial.json']
        write_json(paths[0], {
            'config': config.to_dict(),
            'topology': outcome.topology.to_dict(),
            'snapshot': outcome.snapshot.to_dict(),
        })
        write_links_csv(outcome.snapshot, paths[1])
        write_json(paths[2], outcome.report.to_dict())
        for path in paths:
            manifest.add_output(path)
        manifest.write(out / 'manifest.json')
        logger.info(f"试验输入与链路预算已写入 {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _resolve_config(
        args,
        trials=args.trials,
        user_sweep=tuple(args.users) if args.users else None,
        phantom_sweep=tuple(args.phantoms) if args.phantoms else None,
    )
    if args.workers < 1:
        raise ValidationError('workers', f"至少为 1，当前为: {args.workers}")

    if args.phantoms:
        report = sweep_phantoms(config, workers=args.workers)
        stem = 'phantom_sweep'
    else:
        report = sweep_users(config, workers=args.workers)
        stem = 'sweep'

    out = Path(args.out)
    manifest = RunManifest.for_config(config, command=stem)
    csv_path = out / f'{stem}.csv'
    json_path = out / f'{stem}.json'
    write_sweep_csv(report, csv_path)
    write_json(json_path, report.to_dict())
    manifest.add_output(csv_path)
    manifest.add_output(json_path)
    manifest.write(out / 'manifest.json')

    if args.json:
        _emit(orjson.dumps(report.to_dict(), option=JSON_OPTIONS))
    else:
        print(report.to_frame().to_string(index=False))
        print(f"\n结果目录: {out}")
    return EXIT_OK


def cmd_plan(args) -> int:
    document = read_json(args.input)
    if args.config:
        config = load_config(args.config)
    else:
        config = SimConfig.from_dict(document.get('config', {}))

    try:
        topology = Topology.from_dict(document['topology'])
        snapshot = ChannelSnapshot.from_dict(document['snapshot'], topology, config)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"{args.input} 不是合法的方案输入: {e}")

    plan = build_plan(snapshot, topology, PowerProfile.from_config(config),
                      PlannerOptions.from_config(config))
    if args.out:
        write_json(args.out, plan.to_dict())
        logger.info(f"服务方案已写入 {args.out}")
    else:
        _emit(plan.to_json())
    return EXIT_OK


def cmd_validate_config(args) -> int:
    config = _resolve_config(args)
    if args.json:
        _emit(orjson.dumps(config.to_dict(), option=JSON_OPTIONS))
    else:
        sys.stdout.write(config.to_kv())
        print("配置有效")
    return EXIT_OK


def cmd_oracle(args) -> int:
    config = _resolve_config(args)
    summary = run_oracle(config, instances=args.instances, max_users=args.max_users)
    if args.json:
        _emit(orjson.dumps(summary.to_dict(), option=JSON_OPTIONS))
    else:
        data = summary.to_dict()
        print(f"实例数: {data['instances']}（跳过 {data['skipped']}）")
        print(f"贪心从不低于最优: {data['greedy_never_below_optimum']}")
        print(f"最优从不高于全部直连: {data['optimum_never_above_direct']}")
        print(f"贪心从不高于全部直连: {data['greedy_never_above_direct']}")
        print(f"贪心不高于全部直连的比例: {data['greedy_within_direct_fraction']:.4f}")
        print(f"平均贪心/最优比: {data['mean_greedy_optimal_ratio']:.6f}")
    return EXIT_OK


COMMANDS = {
    'run': cmd_run,
    'sweep': cmd_sweep,
    'plan': cmd_plan,
    'validate-config': cmd_validate_config,
    'oracle': cmd_oracle,
}


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    解析参数并执行子命令，返回退出码

    ConfigError（含参数错误）-> 1；其他 SuperCellError 与 OSError -> 2
    """
    try:
        args = build_parser().parse_args(argv)
        _configure_verbosity(args.verbose)
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"配置错误: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SuperCellError, OSError) as e:
        logger.debug("运行失败", exc_info=True)
        print(f"运行错误: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as e:
        print(f"参数错误: {e}", file=sys.stderr)
        return EXIT_CONFIG
