import os
import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import argparse
from pathlib import Path

from tqdm import tqdm

from config import DEFAULT_OUTPUT_DIR, DEFAULT_THREADS
from modules.presets import PRESETS, run_preset
from services.sweep_service import SweepService
from utils.logging_setup import configure_logging, get_logger

logger = get_logger("reproduce")


def reproduce_figures(out: Path, threads: int, names=None):
    names = list(names or PRESETS)
    service = SweepService(threads=threads)
    written = []
    failed = []

    with tqdm(total=len(names), desc="Presets") as pbar:
        for name in names:
            pbar.set_postfix_str(name)
            try:
                written += run_preset(name, out, service)
            except Exception as e:
                logger.exception(f"Preset {name} failed: {e}")
                failed.append(name)
            pbar.update(1)

    logger.info(f"Wrote {len(written)} files under {out}")
    if failed:
        logger.warning(f"Failed presets: {', '.join(failed)}")
    return written, failed


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run every bundled figure preset.")
    parser.add_argument("--out", default=DEFAULT_OUTPUT_DIR)
    parser.add_argument("--threads", type=int, default=DEFAULT_THREADS)
    parser.add_argument("names", nargs="*", help=f"subset of: {', '.join(sorted(PRESETS))}")
    args = parser.parse_args()
    unknown = sorted(set(args.names) - set(PRESETS))
    if unknown:
        parser.error(f"unknown preset(s): {', '.join(unknown)}")

    configure_logging()
    _, failed = reproduce_figures(Path(args.out), args.threads, args.names)
    sys.exit(1 if failed else 0)
