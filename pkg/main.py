"""
Super cell 仿真器主入口
宏小区 + phantom 小区 + D2D 簇三层广播的能耗对比

用法:
    python main.py validate-config --config configs/default.env
    python main.py run --seed 42
    python main.py sweep --trials 200 --out results
"""

import sys

# 设置UTF-8输出（Windows系统）
if sys.platform == 'win32':
    try:
        sys.stdout.reconfigure(encoding='utf-8')
        sys.stderr.reconfigure(encoding='utf-8')
    except AttributeError:
        pass

# 加载环境变量（必须在读取 SUPERCELL_* 之前）
from dotenv import load_dotenv
load_dotenv()

from io_cli import cli_dispatch


def main():
    """主函数"""
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
