"""
Command-line front end: ``scirtm <subcommand> [flags]``.

Exit codes: 0 on success, 1 when a computation fails, 2 on usage errors.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from ..errors import ScirtmError
from ..parallel import configure_workers
from .commands import COMMANDS
from .config import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="JSON file with settings; flags override it")
    p.add_argument("--save-config", help="Write the effective settings to this JSON file")
    p.add_argument("-v", "--verbose", action="count", help="-v for INFO, -vv for DEBUG")
    p.add_argument("--out", help="Output CSV path; images and side tables go next to it")
    p.add_argument("--workers", type=int, help="Worker processes (env SCIRTM_WORKERS)")
    p.add_argument("--cache-dir", help="Resume directory for job results (env SCIRTM_CACHE_DIR)")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")
    return p


def _add_mu(p: argparse.ArgumentParser, with_range: bool = False) -> None:
    p.add_argument("--mu", type=float, help="Map parameter")
    if with_range:
        p.add_argument("--mu-range", help="a:b:step")


def _add_point(p: argparse.ArgumentParser) -> None:
    p.add_argument("--psi", type=float)
    p.add_argument("--w", type=float)


def _add_rotation(p: argparse.ArgumentParser) -> None:
    p.add_argument("-P", dest="P", type=int, help="Number of summations")
    p.add_argument("-Q", dest="Q", type=int, help="log2 of the iterate count")
    p.add_argument("--tol", type=float, help="Rational/irrational threshold")
    p.add_argument("--control-w", type=float, help="Escape threshold on |w|")


def _add_raster(p: argparse.ArgumentParser) -> None:
    _add_rotation(p)
    p.add_argument("--psi-range", help="a:b")
    p.add_argument("--w-range", help="a:b")
    p.add_argument("--cell-side", type=float)
    p.add_argument("--budget-fast", type=int)
    p.add_argument("--budget-deep", type=int)
    p.add_argument("--max-passes", type=int)


def _add_precision(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bits", type=int, help="Mantissa bits")
    p.add_argument("--order", type=int, help="Initial series order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scirtm",
        description="Longitudinal phase dynamics of the race-track microtron.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common()]

    def add(name: str, help: str) -> argparse.ArgumentParser:
        return sub.add_parser(
            name, help=help, parents=common, argument_default=argparse.SUPPRESS
        )

    p = add("map", "Iterate the map from one point")
    _add_mu(p)
    _add_point(p)
    p.add_argument("--steps", type=int, help="Number of iterates (negative: inverse map)")

    p = add("classify", "Classify the orbit of one point")
    _add_mu(p)
    _add_point(p)
    _add_rotation(p)

    p = add("rotnum", "Rotation numbers at a point or along a symmetry line")
    _add_mu(p)
    _add_point(p)
    _add_rotation(p)
    p.add_argument("--psi-range", help="a:b, sampled with --points")
    p.add_argument("--points", type=int)
    p.add_argument("--line", choices=["fix_r0", "fix_r1"])

    for name, text in (("raster", "Stability raster with PPM image"), ("extents", "Acceptance extents")):
        p = add(name, text)
        _add_mu(p)
        _add_raster(p)

    p = add("sweep", "Areas of A and D over a range of mu")
    _add_mu(p, with_range=True)
    _add_raster(p)
    p.add_argument("--local", action="store_true", help="Windows fitted to small mu")

    p = add("sections", "Symmetry-line section sets over (mu, psi)")
    _add_mu(p, with_range=True)
    _add_raster(p)
    p.add_argument("--points", type=int, help="Samples in psi")

    p = add("hamiltonian", "Interpolating Hamiltonians: values or level curves")
    _add_mu(p)
    _add_point(p)
    p.add_argument("--scenario", choices=["saddle_center", "fourth_order", "third_order"])
    p.add_argument("--ham-order", type=int)
    p.add_argument("--levels", help="Comma-separated levels; omit to evaluate at (psi, w)")
    p.add_argument("--psi-range", help="a:b")
    p.add_argument("--w-range", help="a:b")
    p.add_argument("--points", type=int, help="Grid points per axis")

    p = add("manifold", "Globalized stable or unstable curve")
    _add_mu(p)
    _add_precision(p)
    p.add_argument("--branch", choices=["unstable", "stable"])
    p.add_argument("--resonance", help="m/n of a hyperbolic SPO; omit for p_h")
    p.add_argument("--line", choices=["fix_r0", "fix_r1"])
    p.add_argument("--domains", type=int, help="Fundamental domains to iterate")

    p = add("lobe", "Lobe area between the primary homoclinic points of p_h")
    _add_mu(p)
    _add_precision(p)
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false")

    p = add("splitfit", "Fit of the splitting asymptotics")
    _add_precision(p)
    p.add_argument("--h-range", help="a:b")
    p.add_argument("--h-points", type=int)

    p = add("spo", "Symmetric periodic orbits on a symmetry line")
    _add_mu(p)
    p.add_argument("--resonance", help="m/n")
    p.add_argument("--line", choices=["fix_r0", "fix_r1"])
    p.add_argument("--kind", choices=["elliptic", "hyperbolic"])

    p = add("obstruct", "Obstruction check between p_h and a hyperbolic SPO")
    _add_mu(p)
    _add_precision(p)
    p.add_argument("--resonance", help="m/n, default 1/3")

    p = add("repro", "Run a reproduction recipe")
    p.add_argument("recipe", nargs="?", help="Recipe id, see --list")
    p.add_argument("--list", dest="list_recipes", action="store_true")
    _add_raster(p)
    p.add_argument("--bits", type=int)
    return parser


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses ``argv``, runs one subcommand and returns the exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    flags = vars(args)
    _setup_logging(flags.pop("verbose", 0))
    config_path = flags.pop("config", None)
    save_path = flags.pop("save_config", None)

    try:
        config = RunConfig.build(flags, config_path).validate()
    except ValueError as exc:
        # DomainError 也是 ValueError：配置阶段一律按用法错误处理
        print(f"scirtm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if save_path is not None:
            config.save(save_path)
            logger.info(f"saved config to {save_path}")
        configure_workers(config.workers)
        COMMANDS[config.command](config, sys.stdout)
    except ScirtmError as exc:
        logger.debug("computation failed", exc_info=True)
        logger.error(f"{args.command}: {type(exc).__name__}: {exc}")
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"scirtm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        logger.error(f"{args.command}: {exc}")
        return EXIT_FAILURE
    return EXIT_OK
