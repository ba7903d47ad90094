"""Plain-text report files for runs and batches.

Reports are a ``key: value`` header followed by tab-separated tables.  They
hold no timing data, so identical inputs give byte-identical files; wall
times go to a separate ``.timing`` sidecar.
"""

from __future__ import annotations

import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from .benchmarks import BatchReport, Quartiles
from .evolution import RunConfig, RunReport
from .syntax import print_program

QUARTILE_FIELDS = ("min", "q1", "median", "q3", "max", "mean")


def fraction_text(f: Fraction, total: int = 0) -> str:
    """``k/n = decimal``; with ``total`` the fraction is shown over that many examples."""
    if total and (f * total).denominator == 1:
        return f"{f * total}/{total} = {float(f)!r}"
    return f"{f.numerator}/{f.denominator} = {float(f)!r}"


def _config_lines(cfg: RunConfig) -> List[str]:
    return [f"config.{name}: {value}" for name, value in vars(cfg).items()]


def _indented(text: str) -> List[str]:
    return ["  " + line for line in text.splitlines()] or ["  (empty program)"]


def run_report_text(rep: RunReport) -> str:
    lines = [
        f"algorithm: {rep.algorithm}",
        f"problem: {rep.problem}",
        f"seed: {rep.seed}",
        f"success: {str(rep.success).lower()}",
        f"best_fitness: {fraction_text(rep.best_fitness)}",
        f"iterations: {rep.iterations}",
        f"population_size: {rep.population_size}",
        f"evaluations: {rep.evaluations}",
    ]
    if rep.error:
        lines.append(f"error: {rep.error}")
    lines += _config_lines(rep.config)
    lines += ["", "[best_program]"] + _indented(print_program(rep.best_program, numeral_sugar=True))
    lines += ["", "[best_program_plain]"] + _indented(print_program(rep.best_program))
    lines += ["", "[trajectory]", "iteration\tbest\tmean"]
    for it, best, mean in rep.trajectory:
        lines.append(f"{it}\t{best}\t{float(mean):.6f}")
    lines += ["", "[operators]", "operator\trate\tselected\tapplied\timproved"]
    for name, (selected, applied, improved) in rep.operator_usage.items():
        rate = rep.operator_rates.get(name)
        rate_text = f"{rate:.6f}" if rate is not None else "-"
        lines.append(f"{name}\t{rate_text}\t{selected}\t{applied}\t{improved}")
    return "\n".join(lines) + "\n"


def run_file_stem(rep: RunReport) -> str:
    return f"run-{rep.algorithm}-{rep.problem or 'dataset'}-seed{rep.seed}"


def batch_table_text(batch: BatchReport) -> str:
    """Machine-readable table, one row per algorithm and problem."""
    lines = ["algorithm\tproblem\truns\tsuccesses\tfailures\tsuccess_percent"]
    for row in batch.rows():
        lines.append(f"{row.algorithm}\t{row.problem}\t{row.runs}\t{row.successes}\t"
                     f"{row.failures}\t{row.success_percent:.2f}")
    return "\n".join(lines) + "\n"


def _quartile_values(q: Quartiles) -> Tuple[float, ...]:
    return (q.minimum, q.q1, q.median, q.q3, q.maximum, q.mean)


def _bar(percent: float, width: int = 40) -> str:
    filled = round(percent / 100 * width)
    return "#" * filled + "." * (width - filled)


def batch_summary_text(batch: BatchReport) -> str:
    lines = [
        f"runs_per_problem: {batch.runs_per_problem}",
        f"seed: {batch.seed}",
        f"algorithms: {','.join(batch.algorithms())}",
    ]
    errors = [r for r in batch.reports if r.error]
    if errors:
        lines.append(f"errors: {len(errors)}")
    for alg in batch.algorithms():
        lines += ["", f"[{alg}]", "problem\tsuccesses\tfailures\tbar (# success, . failure)"]
        for row in batch.rows(alg):
            lines.append(f"{row.problem}\t{row.successes}\t{row.failures}\t{_bar(row.success_percent)}")
    lines += ["", "[quartiles of per-problem success percent]", "algorithm\t" + "\t".join(QUARTILE_FIELDS)]
    for alg in batch.algorithms():
        values = _quartile_values(batch.quartiles(alg))
        lines.append(alg + "\t" + "\t".join(f"{v:.3f}" for v in values))
    if errors:
        lines += ["", "[errors]"] + [f"{r.algorithm}\t{r.problem}\t{r.seed}\t{r.error}" for r in errors]
    return "\n".join(lines) + "\n"


def batch_file_stem(batch: BatchReport, problems: Sequence[str], all_problems: bool) -> str:
    tag = "all" if all_problems else "+".join(problems)
    return f"batch-{'+'.join(batch.algorithms())}-{tag}-seed{batch.seed}"


def timing_text(entries: Iterable[Tuple[str, float]]) -> str:
    return "".join(f"{label}\t{seconds:.3f}\n" for label, seconds in entries)


def write_files(out_dir: Union[str, Path], files: Dict[str, str]) -> List[Path]:
    """Write every file or none: contents go to temporaries first, then are renamed."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    staged: List[Tuple[str, Path]] = []
    try:
        for name, text in files.items():
            (out / name).parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=out)
            staged.append((tmp, out / name))
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]
