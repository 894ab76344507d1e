"""``pncsim`` command line.

Exit codes: 0 success, 1 validation failure, 2 invalid configuration.
"""
import argparse
import logging
import sys

from . import harness
from .relay import SchemeId

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_run_options(p):
    p.add_argument("--config", help="flat key = value config file; flags override it")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--symbols", type=int, help="symbols per packet (default 4096)")
    p.add_argument("--packets", type=int, help="packets per point (default 256)")
    p.add_argument("--noise-convention", choices=["resolved", "paper_printed"])
    p.add_argument("--out", default="-", help="CSV destination (default stdout)")


def build_parser():
    parser = _Parser(prog="pncsim", description="Physical-layer network coding link simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="run a figure preset sweep")
    sw.add_argument("--preset", required=True, choices=["fig2", "fig3", "fig4"])
    sw.add_argument("--sync", action="store_true", help="force h13 = h23 real (phase-synchronized uplink)")
    _add_run_options(sw)

    pt = sub.add_parser("point", help="run a single operating point")
    pt.add_argument("--scheme", required=True, choices=[s.value for s in SchemeId])
    pt.add_argument("--uplink-db", type=float, required=True)
    pt.add_argument("--downlink-db", type=float, required=True)
    pt.add_argument("--phase13", type=float, help="radians; omit both phases for a random relative phase per packet")
    pt.add_argument("--phase23", type=float)
    _add_run_options(pt)

    va = sub.add_parser("validate", help="run the validation suite")
    va.add_argument("--seed", type=int)
    return parser


def _load_config(path):
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return harness.parse_config(fh.read())


def _spec(args, base):
    cfg = _load_config(args.config)
    spec = harness.spec_with(base, **cfg)
    return harness.spec_with(spec, master_seed=args.seed, packet_symbols=args.symbols,
                             packets=args.packets, noise_convention=args.noise_convention)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "validate":
        from .validate import validate_suite
        results = validate_suite(seed=args.seed)
        failed = [r for r in results if not r.passed]
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
        return EXIT_VALIDATION if failed else EXIT_OK

    try:
        if args.command == "sweep":
            base = harness.preset(args.preset, sync=args.sync)
            spec = _spec(args, base)
            if args.sync:
                spec = harness.spec_with(spec, phase13=0.0, phase23=0.0)
            rows = harness.run_sweep(spec)
        else:
            if (args.phase13 is None) != (args.phase23 is None):
                raise ValueError("give both --phase13 and --phase23 or neither")
            base = harness.ExperimentSpec(schemes=(args.scheme,), uplink_snr_db=(args.uplink_db,),
                                          downlink_snr_db=(args.downlink_db,),
                                          phase13=args.phase13, phase23=args.phase23)
            spec = _spec(args, base)
            rows = harness.run_sweep(spec)
    except (ValueError, OSError) as exc:
        print(f"pncsim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        harness.write_csv(rows, args.out)
    except OSError as exc:
        print(f"pncsim: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if any(r.msue_relay is None for r in rows):
        print("pncsim: some points failed; see log", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
