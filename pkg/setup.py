#!/usr/bin/env python
"""
One-shot bootstrap for a fresh checkout: check the interpreter, install the
pinned requirements and write the body template file that the API and the
CLI read on start.

    python setup.py                      # everything
    python setup.py --skip-install       # template only
    python setup.py --template out.json  # template somewhere else
"""
import argparse
import logging
import subprocess
import sys
from pathlib import Path
from typing import List, Optional

logger = logging.getLogger("setup")

MIN_PYTHON = (3, 9)
ROOT = Path(__file__).resolve().parent


def check_python(version=None) -> None:
    version = tuple(version or sys.version_info[:2])
    if version < MIN_PYTHON:
        raise SystemExit(f"Python {MIN_PYTHON[0]}.{MIN_PYTHON[1]}+ required, found {version[0]}.{version[1]}")


def install_requirements(requirements: Path = ROOT / "requirements.txt") -> None:
    logger.info("Installing %s", requirements.name)
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", str(requirements)])
    except subprocess.CalledProcessError as e:
        raise SystemExit(f"pip exited with status {e.returncode}") from e


def write_template(path: Optional[str] = None) -> str:
    # imported late: numpy and scipy may only exist after the install step
    from services.body.template_store import init_template
    return init_template(path) if path else init_template()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="setup.py", description="Bootstrap metric-hmr-toolkit.")
    parser.add_argument("--skip-install", action="store_true", help="do not run pip")
    parser.add_argument("--template", default=None, help="body template path (default BODY_TEMPLATE_PATH)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    check_python()
    if not args.skip_install:
        install_requirements()
    logger.info("Body template at %s", write_template(args.template))
    logger.info("Serve with `uvicorn main:app --reload` or run `python cli.py --help`")
    return 0


if __name__ == "__main__":
    sys.exit(main())
