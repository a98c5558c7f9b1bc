"""
Write run artifacts: series.csv, per-step animation frames, report.txt and,
for comparisons, deviations.csv.

Every number goes through one formatter, there are no timestamps, and rows
follow step order, so identical inputs give byte-identical files.
"""

import csv
import logging
import os
from pathlib import Path
from typing import List, Optional, Union

from errors import OutputError
from harness import CLASSICAL, QUANTUM, ComparisonReport, RunResult

logger = logging.getLogger(__name__)

SERIES_HEADER = ['step', 't', 'mean_r', 'sigma', 'p_tunnel', 'norm', 'overlap_oracle']
FRAME_HEADER = ['m', 'r', 'prob_quantum', 'prob_classical']
DEVIATION_HEADER = ['step', 't', 'd_mean_r', 'd_sigma', 'd_p_tunnel']


def fmt(value: Optional[float]) -> str:
    """12 significant digits; empty for a missing value"""
    if value is None:
        return ''
    return f"{float(value):.12g}"


def _write_csv(path: Path, header: List[str], rows):
    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise OutputError(f"Failed to write {path.name}: {e.strerror or e}", path) from e


def _write_text(path: Path, text: str):
    try:
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"Failed to write {path.name}: {e.strerror or e}", path) from e


def write_series(result: RunResult, path: Path):
    rows = []
    for record in result.records:
        obs = record.observables
        rows.append([record.step, fmt(record.t), fmt(obs.mean_r), fmt(obs.sigma), fmt(obs.p_tunnel),
                     fmt(obs.norm), fmt(record.overlap_oracle)])
    _write_csv(path, SERIES_HEADER, rows)


def _frame_columns(result: RunResult, other: Optional[RunResult]):
    """Pick the quantum and classical probability series for the frames"""
    runs = [result] + ([other] if other is not None else [])
    quantum = next((r.probabilities for r in runs if r.path == QUANTUM), None)
    classical = next((r.probabilities for r in runs if r.path == CLASSICAL), None)
    if classical is None:
        classical = result.reference_probabilities
    return quantum, classical


def write_frames(result: RunResult, frames_dir: Path, other: Optional[RunResult] = None):
    grid = result.scenario.grid
    quantum, classical = _frame_columns(result, other)
    for j, record in enumerate(result.records):
        rows = []
        for m in range(grid.M):
            rows.append([
                m,
                fmt(grid.points[m]),
                fmt(quantum[j][m]) if quantum is not None else '',
                fmt(classical[j][m]) if classical is not None else '',
            ])
        _write_csv(frames_dir / f"step_{record.step:04d}.csv", FRAME_HEADER, rows)


def write_deviations(report: ComparisonReport, path: Path):
    rows = [[d['step'], fmt(d['t']), fmt(d['d_mean_r']), fmt(d['d_sigma']), fmt(d['d_p_tunnel'])]
            for d in report.deviations]
    _write_csv(path, DEVIATION_HEADER, rows)


def _census_lines(census: Optional[dict], indent: str = '  ') -> List[str]:
    if not census:
        return [f"{indent}(none)"]
    lines = []
    for key in sorted(census):
        value = census[key]
        if isinstance(value, dict):
            inner = ', '.join(f"{k}={value[k]}" for k in sorted(value))
            lines.append(f"{indent}{key}: {inner}")
        elif isinstance(value, float):
            lines.append(f"{indent}{key}: {fmt(value)}")
        else:
            lines.append(f"{indent}{key}: {value}")
    return lines


def _run_lines(result: RunResult) -> List[str]:
    first, last = result.records[0], result.records[-1]
    lines = [f"[{result.path} path]"]
    for label, record in (('initial', first), ('final', last)):
        obs = record.observables
        lines.append(
            f"  {label:7s} t={fmt(record.t)} mean_r={fmt(obs.mean_r)} sigma={fmt(obs.sigma)} "
            f"p_tunnel={fmt(obs.p_tunnel) or '-'} norm={fmt(obs.norm)}"
        )
    energies = [(label, record.observables.energy) for label, record in (('initial', first), ('final', last))]
    if all(e is not None for _, e in energies):
        e0, e1 = energies[0][1], energies[1][1]
        lines.append(f"  energy  initial={fmt(e0)} Ha final={fmt(e1)} Ha "
                     f"(initial {fmt(e0 * 1000.0)} mHa)")
    overlaps = [r.overlap_oracle for r in result.records if r.overlap_oracle is not None]
    if overlaps:
        lines.append(f"  min overlap with oracle: {fmt(min(overlaps))}")
    lines.append("  gate census:")
    lines.extend(_census_lines(result.gate_census, indent='    '))
    return lines


def render_report(result: Union[RunResult, ComparisonReport]) -> str:
    primary = result.a if isinstance(result, ComparisonReport) else result
    scenario = primary.scenario
    lines = [f"Scenario: {scenario.name}"]
    for key, value in sorted(scenario.describe().items()):
        if key == 'name':
            continue
        lines.append(f"  {key}: {fmt(value) if isinstance(value, float) else value}")
    lines.append('')

    if isinstance(result, ComparisonReport):
        lines.extend(_run_lines(result.a))
        lines.append('')
        lines.extend(_run_lines(result.b))
        lines.append('')
        lines.append(f"[comparison {result.a.path} vs {result.b.path}]")
        for key in ('d_mean_r', 'd_sigma', 'd_p_tunnel'):
            lines.append(f"  max {key}: {fmt(result.max_deviation.get(key)) or '-'}"
                         f"  final: {fmt(result.final_deviation.get(key)) or '-'}")
        lines.append(f"  final total-variation distance: {fmt(result.final_tv_distance)}")
        lines.append(f"  max deviation overall: {fmt(result.max_overall)}")
    else:
        lines.extend(_run_lines(result))
    return '\n'.join(lines) + '\n'


def emit_outputs(result: Union[RunResult, ComparisonReport], out_dir: Union[str, os.PathLike]) -> List[Path]:
    """
    Write series.csv, frames/step_####.csv and report.txt (plus deviations.csv
    for a comparison) into out_dir.

    Returns:
        Paths of the files written

    Raises:
        OutputError: when the directory or a file cannot be written
    """
    out = Path(out_dir)
    frames_dir = out / 'frames'
    try:
        frames_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(f"Cannot create output directory: {e.strerror or e}", frames_dir) from e

    if isinstance(result, ComparisonReport):
        primary, other = result.a, result.b
    else:
        primary, other = result, None

    written = [out / 'series.csv']
    write_series(primary, written[0])
    write_frames(primary, frames_dir, other)
    written.extend(frames_dir / f"step_{r.step:04d}.csv" for r in primary.records)

    if isinstance(result, ComparisonReport):
        write_deviations(result, out / 'deviations.csv')
        written.append(out / 'deviations.csv')

    _write_text(out / 'report.txt', render_report(result))
    written.append(out / 'report.txt')
    logger.info(f"Wrote {len(written)} files to {out}")
    return written

