"""Parameter sweeps over resource states and figure-bundle CSV output."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidSpecError, NGTeleportError
from .fock import (
    DEFAULT_TAIL_TOL,
    Family,
    SINGLE_MODE_FAMILIES,
    StateSpec,
    build_input,
    build_resource,
)
from .gaussian import covariance_of
from .measures import (
    MEASURES,
    MeasureReport,
    entanglement_entropy,
    epr_uncertainty,
    squeezing_degree,
    sva,
    two_mode_ng,
    two_mode_ng_direct,
    wehrl_ng,
)
from .teleport import fidelity_coherent

CSV_COLUMNS = (
    "family", "m", "r", "cutoff",
    "F", "E", "delta", "eta_sva", "epr", "f_sq",
    "epr_correlated", "squeezed", "qt",
    "status",
)
FIGURE_R_STEP = 0.02
FIGURE_R_STOP = 1.2
# rounding applied to grid values so that start + i*step prints cleanly
_R_DIGITS = 12


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return "%.12g" % value
    return str(value)


def r_grid(start: float, stop: float, step: float) -> list[float]:
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise InvalidSpecError("r grid bounds must be finite")
    if step <= 0:
        raise InvalidSpecError(f"r step must be positive, got {step}")
    if stop < start:
        raise InvalidSpecError(f"r stop {stop} is below r start {start}")
    if start < 0:
        raise InvalidSpecError(f"r start must be non-negative, got {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, _R_DIGITS) for i in range(count)]


def _subtracts_from_vacuum(family: Family, m: int, r: float) -> bool:
    return r == 0 and ((family is Family.PSS and m > 0) or family is Family.TMPS)


@dataclass(frozen=True)
class SweepConfig:
    """Grid of ``(family, m, r)`` points and the measures to evaluate.

    Two-mode families carry no ``m``; they contribute one series each.
    """

    families: tuple[Family, ...]
    m_values: tuple[int, ...] = (0,)
    r_start: float = 0.0
    r_stop: float = 1.2
    r_step: float = 0.05
    cutoff: int | None = None
    measures: tuple[str, ...] = MEASURES
    output_path: str | None = None
    tail_tol: float = DEFAULT_TAIL_TOL
    workers: int = 1

    def __post_init__(self) -> None:
        if not self.families:
            raise InvalidSpecError("at least one family is required")
        object.__setattr__(self, "families", tuple(Family(f) for f in self.families))
        m_values = tuple(int(m) for m in self.m_values)
        if not m_values or any(m < 0 for m in m_values):
            raise InvalidSpecError("m values must be non-negative integers")
        object.__setattr__(self, "m_values", m_values)
        unknown = set(self.measures) - set(MEASURES)
        if unknown:
            raise InvalidSpecError(f"unknown measures: {sorted(unknown)}")
        object.__setattr__(self, "measures", tuple(m for m in MEASURES if m in self.measures))
        if self.cutoff is not None and self.cutoff < 2:
            raise InvalidSpecError(f"cutoff must be at least 2, got {self.cutoff}")
        if self.workers < 1:
            raise InvalidSpecError(f"workers must be at least 1, got {self.workers}")
        grid = r_grid(self.r_start, self.r_stop, self.r_step)
        for family in self.families:
            for m in self._m_for(family):
                if _subtracts_from_vacuum(family, m, grid[0]):
                    raise InvalidSpecError(
                        f"{family.value} m={m} is undefined at r=0; start the r grid above 0"
                    )

    def _m_for(self, family: Family) -> tuple[int, ...]:
        if family in SINGLE_MODE_FAMILIES and family is not Family.SQUEEZED_VACUUM:
            return self.m_values
        return (0,)

    @property
    def r_values(self) -> list[float]:
        return r_grid(self.r_start, self.r_stop, self.r_step)

    def specs(self) -> list[StateSpec]:
        """Grid points in output order: family, then m, then r."""
        r_values = self.r_values
        return [
            StateSpec(family, r, m, self.cutoff)
            for family in self.families
            for m in self._m_for(family)
            for r in r_values
        ]


class SweepRow(NamedTuple):
    spec: StateSpec
    cutoff: int | None
    report: MeasureReport
    status: str

    def cells(self) -> list[str]:
        values = self.report.as_dict()
        return [
            self.spec.family.value,
            str(self.spec.m),
            format_value(float(self.spec.r)),
            format_value(self.cutoff),
            *(format_value(values[name]) for name in CSV_COLUMNS[4:13]),
            self.status,
        ]


def evaluate(
    spec: StateSpec,
    measures: Sequence[str] = MEASURES,
    tail_tol: float = DEFAULT_TAIL_TOL,
    check: bool = False,
) -> tuple[MeasureReport, int]:
    """Evaluate the requested measures of the resource built from ``spec``.

    Returns the report and the Fock cutoff actually used.
    """
    unknown = set(measures) - set(MEASURES)
    if unknown:
        raise InvalidSpecError(f"unknown measures: {sorted(unknown)}")
    resource = build_resource(spec, tail_tol)
    values: dict[str, float] = {}
    if "F" in measures:
        values["F"] = fidelity_coherent(resource, check=check)
    if "E" in measures:
        values["E"] = entanglement_entropy(resource)
    if "delta" in measures:
        if spec.family in SINGLE_MODE_FAMILIES:
            values["delta"] = two_mode_ng(resource, wehrl_ng(build_input(spec, tail_tol)))
        else:
            values["delta"] = two_mode_ng_direct(resource)
    if "eta_sva" in measures:
        values["eta_sva"] = sva(resource)
    if "epr" in measures:
        values["epr"] = epr_uncertainty(resource)
    if "f_sq" in measures:
        values["f_sq"] = squeezing_degree(covariance_of(resource))
    return MeasureReport(**values), resource.cutoff


def _evaluate_row(task) -> SweepRow:
    spec, measures, tail_tol, check = task
    try:
        report, cutoff = evaluate(spec, measures, tail_tol, check)
    except NGTeleportError as exc:
        return SweepRow(spec, spec.cutoff, MeasureReport(), type(exc).__name__)
    return SweepRow(spec, cutoff, report, "ok")


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Evaluate every grid point, in grid order regardless of ``workers``.

    Row-level numerical failures are reported in the ``status`` column. The
    quadrature doubling check runs on the last (largest ``r``) point of each
    series, where the state is widest.
    """
    specs = config.specs()
    r_last = config.r_values[-1]
    tasks = [(s, config.measures, config.tail_tol, s.r == r_last) for s in specs]
    if config.workers == 1:
        rows = [_evaluate_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_evaluate_row, tasks, chunksize=1))
    if config.output_path is not None:
        write_csv(rows, config.output_path)
    return rows


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def _write_text(text: str, path: str | os.PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise InvalidSpecError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_csv(rows: Iterable[SweepRow], path: str | os.PathLike) -> Path:
    return _write_text(rows_to_csv(rows), path)


# --------------------------------------------------------------------------
# figure bundles

@dataclass(frozen=True)
class Panel:
    name: str
    families: tuple[Family, ...]
    m_values: tuple[int, ...]
    reference: tuple[str, float] | None = None
    labels: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FigureBundle:
    measure: str
    panels: tuple[Panel, ...]


_BS_PANELS = (("pas", Family.PAS), ("pss", Family.PSS), ("sns", Family.SNS))
_ALL_M = (0, 1, 2, 3, 4)


def _bs_bundle(measure, m_values, reference=None) -> FigureBundle:
    return FigureBundle(
        measure,
        tuple(Panel(name, (fam,), m_values, reference) for name, fam in _BS_PANELS),
    )


FIGURES: dict[str, FigureBundle] = {
    "fig1_F": _bs_bundle("F", _ALL_M, ("F=1/2", 0.5)),
    "fig2_E": _bs_bundle("E", _ALL_M),
    "fig3_delta": _bs_bundle("delta", (1, 2, 3, 4)),
    # odd m vanish identically
    "fig4_sva": _bs_bundle("eta_sva", (0, 2, 4)),
    "fig5_epr": _bs_bundle("epr", _ALL_M, ("epr=2", 2.0)),
    "fig6_fsq_tmsv_family": FigureBundle(
        "f_sq",
        (
            Panel(
                "",
                (Family.TMSV, Family.TMPA, Family.TMPS, Family.TMSN),
                (0,),
                ("f_sq=1", 1.0),
            ),
        ),
    ),
    "fig7_fsq_bs": _bs_bundle("f_sq", _ALL_M, ("f_sq=1", 1.0)),
}
FIGURE_ALIASES = {key.split("_")[0]: key for key in FIGURES}


def resolve_figure(fig_id: str) -> str:
    if fig_id in FIGURES:
        return fig_id
    if fig_id in FIGURE_ALIASES:
        return FIGURE_ALIASES[fig_id]
    raise InvalidSpecError(f"unknown figure id {fig_id!r}; choose from {sorted(FIGURES)}")


def _series_label(spec: StateSpec) -> str:
    if spec.family in SINGLE_MODE_FAMILIES:
        return f"{spec.family.value} m={spec.m}"
    return spec.family.value


def _panel_configs(panel: Panel, measure: str, r_step: float, r_stop: float, workers: int):
    configs = []
    for family in panel.families:
        for m in panel.m_values if family in SINGLE_MODE_FAMILIES else (0,):
            # subtraction from the vacuum is undefined, so that series starts one step in
            start = r_step if _subtracts_from_vacuum(family, m, 0.0) else 0.0
            configs.append(
                SweepConfig(
                    families=(family,),
                    m_values=(m,),
                    r_start=start,
                    r_stop=r_stop,
                    r_step=r_step,
                    measures=(measure,),
                    workers=workers,
                )
            )
    return configs


def figure_csv(
    fig_id: str,
    r_step: float = FIGURE_R_STEP,
    r_stop: float = FIGURE_R_STOP,
    workers: int = 1,
) -> dict[str, str]:
    """CSV text per panel file name for one figure bundle."""
    fig_id = resolve_figure(fig_id)
    bundle = FIGURES[fig_id]
    out = {}
    for panel in bundle.panels:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("series_label", "r", "value"))
        r_all = r_grid(0.0, r_stop, r_step)
        for config in _panel_configs(panel, bundle.measure, r_step, r_stop, workers):
            for row in run_sweep(config):
                value = getattr(row.report, bundle.measure)
                if row.status != "ok":
                    value = None
                writer.writerow(
                    (_series_label(row.spec), format_value(float(row.spec.r)), format_value(value))
                )
        if panel.reference is not None:
            label, level = panel.reference
            for r in r_all:
                writer.writerow((label, format_value(float(r)), format_value(level)))
        name = fig_id if not panel.name else f"{fig_id}_{panel.name}"
        out[f"{name}.csv"] = buf.getvalue()
    return out


def reproduce_figure(
    fig_id: str,
    out_dir: str | os.PathLike = ".",
    r_step: float = FIGURE_R_STEP,
    r_stop: float = FIGURE_R_STOP,
    workers: int = 1,
) -> list[Path]:
    """Write the CSV files of one figure bundle into ``out_dir``."""
    files = figure_csv(fig_id, r_step, r_stop, workers)
    return [_write_text(text, Path(out_dir) / name) for name, text in files.items()]


def gnuplot_script(csv_path: str | os.PathLike, ylabel: str) -> str:
    """Companion gnuplot script drawing every series of a figure CSV."""
    csv_path = Path(csv_path)
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead outside\n"
        "set xlabel 'r'\n"
        f"set ylabel '{ylabel}'\n"
        f"set output '{csv_path.with_suffix('.png').name}'\n"
        "set terminal pngcairo size 800,600\n"
        f"data = '{csv_path.name}'\n"
        "labels = system(\"tail -n +2 \".data.\" | cut -d, -f1 | uniq\")\n"
        "plot for [s in labels] data using 2:($1 eq s ? $3 : 1/0) with lines title s\n"
    )


# --------------------------------------------------------------------------
# key=value configuration files

def parse_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidSpecError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidSpecError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def split_list(value: str) -> list[str]:
    return [item for item in value.replace(",", " ").split() if item]


def parse_m_values(value: str) -> list[int]:
    """``"0,2,4"`` or ``"0..4"``."""
    out = []
    for item in split_list(value):
        try:
            if ".." in item:
                lo, hi = item.split("..", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(item))
        except ValueError:
            raise InvalidSpecError(f"invalid m value {item!r}") from None
    return out
