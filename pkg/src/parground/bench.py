"""Timing harness: grounding wall times, spread and efficiency.

For each instance size the harness grounds once serially to fix the
reference output, then for every worker/level configuration first
asserts that the rendered ground program is byte-identical to the
reference and only then measures wall times over the configured
number of repeated runs.  Efficiency of a configuration is the serial
mean divided by (workers times the configuration's mean), so the
serial row scores exactly 1.0 by construction.
"""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

from .engine import ALL_LEVELS, SchedulerConfig, ground_program
from .generators import generate_instance
from .parser import parse_program, render_ground_program

DEFAULT_RUNS = 5


@dataclass(slots=True)
class BenchRow:
    problem: str
    params: dict
    workers: int
    levels: str
    runs: list[float]
    mean: float
    stddev: float
    efficiency: float

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "params": self.params,
            "workers": self.workers,
            "levels_enabled": self.levels,
            "runs": self.runs,
            "mean": self.mean,
            "stddev": self.stddev,
            "efficiency": self.efficiency,
        }


@dataclass(slots=True)
class BenchReport:
    problem: str
    runs_per_config: int
    rows: list[BenchRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "runs_per_config": self.runs_per_config,
            "rows": [row.to_dict() for row in self.rows],
        }

    def render_table(self) -> str:
        header = (
            "problem",
            "params",
            "workers",
            "levels",
            "mean_s",
            "stddev_s",
            "efficiency",
        )
        body = [
            (
                row.problem,
                _format_params(row.params),
                str(row.workers),
                row.levels or "-",
                "%.4f" % row.mean,
                "%.4f" % row.stddev,
                "%.3f" % row.efficiency,
            )
            for row in self.rows
        ]
        widths = [
            max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
            for i in range(len(header))
        ]
        lines = [
            "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)),
            "  ".join("-" * w for w in widths),
        ]
        lines += [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r))
            for r in body
        ]
        return "\n".join(lines) + "\n"


def _format_params(params: dict) -> str:
    return ",".join("%s=%s" % (k, params[k]) for k in sorted(params))


def _timed_runs(program, config: SchedulerConfig, runs: int) -> list[float]:
    times = []
    for _ in range(runs):
        started = time.perf_counter()
        ground_program(program, config)
        times.append(time.perf_counter() - started)
    return times


def run_bench(
    problem: str,
    param_sets: list[dict],
    threads_list: list[int],
    levels: frozenset[str] = ALL_LEVELS,
    runs: int = DEFAULT_RUNS,
    **tuning,
) -> BenchReport:
    """Measure every instance x worker-count configuration.

    ``param_sets`` are keyword dicts for the instance generator.  The
    serial configuration (one worker, no levels) is always measured as
    the efficiency baseline, whether or not 1 is in ``threads_list``.
    Extra keyword arguments (``w_seq``, ``w_hard``, ``split_factor``,
    ``max_ground``) are forwarded to every scheduler configuration.
    """
    if runs < 1:
        raise ValueError("need runs >= 1")
    report = BenchReport(problem=problem, runs_per_config=runs)
    serial = SchedulerConfig(workers=1, levels=frozenset(), **tuning)
    for params in param_sets:
        program = parse_program(generate_instance(problem, **params))
        reference = render_ground_program(ground_program(program, serial).pi)

        serial_times = _timed_runs(program, serial, runs)
        serial_mean = statistics.mean(serial_times)
        report.rows.append(
            BenchRow(
                problem=problem,
                params=dict(params),
                workers=1,
                levels="",
                runs=serial_times,
                mean=serial_mean,
                stddev=statistics.pstdev(serial_times),
                efficiency=1.0,
            )
        )

        for workers in threads_list:
            if workers == 1:
                continue  # the serial baseline row already covers it
            config = SchedulerConfig(workers=workers, levels=levels, **tuning)
            rendered = render_ground_program(ground_program(program, config).pi)
            if rendered != reference:
                raise AssertionError(
                    "ground output of %s with %d workers differs from serial"
                    % (_format_params(params), workers)
                )
            times = _timed_runs(program, config, runs)
            mean = statistics.mean(times)
            report.rows.append(
                BenchRow(
                    problem=problem,
                    params=dict(params),
                    workers=workers,
                    levels="".join(sorted(levels)),
                    runs=times,
                    mean=mean,
                    stddev=statistics.pstdev(times),
                    efficiency=serial_mean / (workers * mean),
                )
            )
    return report
