"""
Feature-Leveling Networks - CLI Entry Point

Trains fully connected networks whose per-layer L0 gates route each feature
either straight to a final GLM layer or into the next hidden layer.

FEATURES:
- Hard-concrete gates with exact zeros
- Proposed (gated) and baseline FCNN training
- Pruning to the star architecture
- Per-level reports and weight heatmaps

USAGE:
    python app.py gen-ixor --n 10000 --seed 7 --out ixor.csv --split
    python app.py train --config config/experiments/ixor.json
    python app.py eval --model runs/ixor/model.json --data ixor-test
    python app.py prune --model runs/ixor/model.json --out runs/ixor/pruned.json
    python app.py report --model runs/ixor/model.json --out runs/ixor/report.json
    python app.py heatmap --model runs/ixor/model.json --layer 1 --out layer1.pgm

EXIT CODES:
    0 success, 1 usage error, 2 data or parse error, 3 training divergence
"""

# Load environment variables FIRST, before config.settings reads them
from dotenv import load_dotenv
load_dotenv()

import logging
import sys
from typing import List, Optional

from cli.commands import dispatch, parse_args
from utils.errors import (
    ArgumentError,
    FeatureLevelingError,
    NumericError,
    TrainingDivergedError,
    UsageError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


def exit_code_for(error: BaseException) -> int:
    """Map an expected error to the documented exit code."""
    if isinstance(error, (UsageError, ArgumentError)):
        return EXIT_USAGE
    if isinstance(error, (TrainingDivergedError, NumericError)):
        return EXIT_DIVERGED
    return EXIT_DATA


def run(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: arguments without the program name (default: sys.argv[1:])

    Returns:
        Process exit code
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    try:
        return dispatch(args)
    except (FeatureLevelingError, OSError) as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed: {e}")
        return code


if __name__ == "__main__":
    sys.exit(run())
