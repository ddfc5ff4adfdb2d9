"""
检查扫描结果目录
校验 manifest.json 中的 sha256，并用 pandas 重新读取扫描结果或链路表
"""

import sys
from pathlib import Path

import pandas as pd

from channel import LINK_CSV_COLUMNS
from io_cli import RunManifest, read_sweep_csv
from utils.errors import SuperCellError


def check_results(directory: str = 'results') -> bool:
    print(f"\n=== 结果目录检查: {directory} ===\n")
    root = Path(directory)

    manifest_path = root / 'manifest.json'
    if not manifest_path.exists():
        print(f"  ✗ manifest.json: 不存在")
        return False

    try:
        manifest = RunManifest.load(manifest_path)
        manifest.resolved_config()
    except SuperCellError as e:
        print(f"  ✗ manifest.json: {e}")
        return False
    print(f"  ✓ manifest.json: 版本 {manifest.version}, 主种子 {manifest.master_seed}, 时间 {manifest.timestamp}")

    failures = manifest.verify(root)
    for name in sorted(manifest.outputs):
        mark = '✗' if name in failures else '✓'
        print(f"  {mark} {name}: sha256 {manifest.outputs[name][:16]}...")

    ok = not failures
    for name in sorted(manifest.outputs):
        if not name.endswith('.csv') or name in failures:
            continue
        if manifest.command == 'run':
            frame = pd.read_csv(root / name)
            if list(frame.columns) != LINK_CSV_COLUMNS:
                print(f"    - 链路表头不符: {list(frame.columns)}")
                ok = False
                continue
            print(f"    - {len(frame)} 条链路")
            continue
        try:
            frame = read_sweep_csv(root / name)
        except SuperCellError as e:
            print(f"    - 读取失败: {e}")
            ok = False
            continue
        axis = frame.columns[0]
        print(f"    - {len(frame)} 行, {frame[axis].nunique()} 个扫描点, 场景: {sorted(frame['scenario'].unique())}")

    print("\n=== 检查完成 ===\n")
    return ok


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else 'results'
    sys.exit(0 if check_results(target) else 1)
