"""
Command-line entry point.

    python cli.py run <preset|scenario.json> [options]
    python cli.py compare <preset|scenario.json> [options]
    python cli.py export-qasm <preset|scenario.json> --step j [--out FILE]
    python cli.py presets

Exit codes: 0 success, 1 invalid input or I/O failure, 2 when `compare`
exceeds the acceptance tolerance.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import Config
from emitter import emit_outputs
from errors import EmulatorError
from harness import CLASSICAL, QUANTUM, build_readout_circuit, compare_runs, run_classical_path, run_quantum_path
from qasm_io import export_qasm
from scenarios import PRESETS, load_scenario, with_overrides

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ACCEPTANCE = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1 so that 2 stays reserved for acceptance failures"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _add_run_options(parser: argparse.ArgumentParser):
    parser.add_argument('scenario', help='preset name or path to a JSON scenario document')
    parser.add_argument('--mode', choices=['multi', 'single'], help='propagation mode')
    parser.add_argument('--qft-approx', type=int, metavar='D', help='QFT approximation degree')
    parser.add_argument('--shots', type=int, metavar='S', help='read out with S measurement shots')
    parser.add_argument('--seed', type=int, metavar='K', help='seed for shots and noise')
    parser.add_argument('--noise', type=float, metavar='P', help='Pauli error probability per gate')
    parser.add_argument('--init', choices=['exact', 'circuit'], help='state injection or initializer circuit')
    parser.add_argument('--merge-potentials', action='store_true', default=None,
                        help='merge touching half-step potentials between steps')
    parser.add_argument('--out', metavar='DIR', help='output directory')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='cli.py', description='Grid quantum dynamics emulator')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    run = sub.add_parser('run', help='run one path and write series, frames and report')
    _add_run_options(run)
    run.add_argument('--path', choices=[QUANTUM, CLASSICAL], default=QUANTUM)

    compare = sub.add_parser('compare', help='run both paths and write a comparison report')
    _add_run_options(compare)
    compare.add_argument('--tolerance', type=float, default=None,
                         help=f'acceptance threshold (default {Config.COMPARE_TOLERANCE})')

    export = sub.add_parser('export-qasm', help='write the OpenQASM 2.0 circuit for read-out j')
    _add_run_options(export)
    export.add_argument('--step', type=int, required=True, metavar='J')

    sub.add_parser('presets', help='list the preset scenarios')
    return parser


def _scenario_from_args(args):
    config = load_scenario(args.scenario)
    return with_overrides(
        config,
        propagation=args.mode,
        qft_approx=args.qft_approx,
        shots=args.shots,
        seed=args.seed,
        noise_p=args.noise,
        init_mode=args.init,
        merge_half_potentials=args.merge_potentials,
    )


def _out_dir(args, config, suffix: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(Config.OUTPUT_DIR) / f"{config.name}-{suffix}"


def cmd_run(args) -> int:
    config = _scenario_from_args(args)
    result = run_quantum_path(config) if args.path == QUANTUM else run_classical_path(config)
    out = _out_dir(args, config, args.path)
    emit_outputs(result, out)
    final = result.records[-1].observables
    print(f"{config.name} [{args.path}] t={result.records[-1].t:g}: <r>={final.mean_r:.6f} "
          f"sigma={final.sigma:.6f} -> {out}")
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _scenario_from_args(args)
    report = compare_runs(run_quantum_path(config), run_classical_path(config))
    out = _out_dir(args, config, 'compare')
    emit_outputs(report, out)
    tolerance = Config.COMPARE_TOLERANCE if args.tolerance is None else args.tolerance
    print(f"{config.name}: max deviation {report.max_overall:.3e} (tolerance {tolerance:.1e}) -> {out}")
    if not report.passes(tolerance):
        logger.error(f"Comparison for '{config.name}' exceeds tolerance: {report.max_overall:.3e} >= {tolerance:.1e}")
        return EXIT_ACCEPTANCE
    return EXIT_OK


def cmd_export_qasm(args) -> int:
    config = _scenario_from_args(args)
    if not 0 <= args.step <= config.n_steps:
        logger.error(f"--step must be in [0, {config.n_steps}], got {args.step}")
        return EXIT_INVALID
    text = export_qasm(build_readout_circuit(config, args.step))
    if args.out:
        path = Path(args.out)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
        except OSError as e:
            logger.error(f"Failed to write {path}: {e}")
            return EXIT_INVALID
        logger.info(f"Wrote circuit for step {args.step} to {path}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_presets(args) -> int:
    for name in PRESETS:
        print(json.dumps(load_scenario(name).describe(), sort_keys=True))
    return EXIT_OK


COMMANDS = {
    'run': cmd_run,
    'compare': cmd_compare,
    'export-qasm': cmd_export_qasm,
    'presets': cmd_presets,
}


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EmulatorError as e:
        logger.error(str(e))
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
