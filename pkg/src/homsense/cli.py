"""Command-line front end: spec ingestion, sweeps, tables, simulation.

Every output starts with a provenance comment carrying the resolved
configuration, so any emitted file can be reproduced byte-for-byte by
replaying the recorded options.  Files are written atomically (temp
file plus rename); floats are printed with 17 significant digits.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import sys
import tempfile

import click
import numpy as np

from . import __version__
from .chronocyclic import marginals, wigner_grid
from .errors import HomsenseError, InvalidSpec
from .estimator import (TrialCounts, cr_saturation_study, default_window,
                        mle_estimate, simulate_trials)
from .hommodel import DetectionModel, fisher_matrix, outcome_probs
from .qfi import (invert, printed_inverse, qcr_table, qfi_analytic,
                  qfi_canonical, table1_rows, table2_rows)
from .statefamilies import PhaseMatchingSpec, load_spec, spectral_terms, temporal_terms

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _n_workers() -> int:
    raw = os.environ.get("HOMSENSE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _spec_params(spec: PhaseMatchingSpec) -> str:
    parts = []
    for f in dataclasses.fields(spec):
        if f.name == "family":
            continue
        v = getattr(spec, f.name)
        if v is None or v == f.default:
            continue
        if dataclasses.is_dataclass(v):
            v = f"{v.sign:+d}*{_fmt(v.c)}"
        parts.append(f"{f.name}={_fmt(v)}")
    return ";".join(parts)


def _provenance(config: dict) -> str:
    payload = json.dumps(config, sort_keys=True, default=str)
    return f"# homsense {__version__} {payload}"


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".homsense-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: list[str], rows: list[list], provenance: str) -> str:
    lines = [provenance, ",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_doc(provenance: str, payload) -> str:
    doc = {"provenance": provenance, "data": payload}
    return json.dumps(doc, indent=2, sort_keys=True, default=float) + "\n"


def _parse_range(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(":")
        count = int(count)
        if count < 2:
            raise ValueError
        return np.linspace(float(start), float(stop), count)
    except ValueError:
        raise InvalidSpec(
            f"range must be start:stop:count with count >= 2, got {text!r}")


def _run(body) -> None:
    try:
        body()
    except (InvalidSpec, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except HomsenseError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Time-frequency HOM metrology toolkit."""


_state_opt = click.option("--state", "state_path", type=click.Path(exists=True),
                          help="JSON state-spec file.")
_out_opt = click.option("--out", type=click.Path(), default=None,
                        help="Output path (default: stdout).")
_format_opt = click.option("--format", "fmt",
                           type=click.Choice(["csv", "json"]), default="csv")
_gamma_opt = click.option("--gamma", type=float, default=0.0,
                          help="Detector loss reflectivity.")


def _qfi_row(spec: PhaseMatchingSpec, convention: str) -> list:
    if convention == "printed":
        q = qfi_analytic(spec)
        cov = printed_inverse(spec)
    else:
        q = qfi_canonical(spec)
        cov = invert(q)
    return [spec.family.value, _spec_params(spec), convention,
            q.f_tt, q.f_mm, q.f_mt,
            cov.var_tau, cov.var_mu, cov.cov_mu_tau]


_QFI_HEADER = ["family", "params", "convention", "f_tt", "f_mm", "f_mt",
               "var_tau", "var_mu", "cov"]


@main.command("qfi")
@_state_opt
@click.option("--preset", type=click.Choice(["table1", "table2"]), default=None)
@click.option("--convention", type=click.Choice(["printed", "canonical"]),
              default="printed")
@_out_opt
@_format_opt
def cmd_qfi(state_path, preset, convention, out, fmt):
    """QFI matrix and Cramer-Rao blocks for a state or a preset table."""

    def body():
        if (state_path is None) == (preset is None):
            raise InvalidSpec("provide exactly one of --state or --preset")
        prov = _provenance({"cmd": "qfi", "state": state_path,
                            "preset": preset, "convention": convention,
                            "format": fmt})
        if preset is not None:
            rows = table1_rows() if preset == "table1" else table2_rows()
            table = qcr_table(rows)
            header = list(table[0].keys())
            data = [[r[k] for k in header] for r in table]
        else:
            spec = load_spec(state_path)
            header = _QFI_HEADER
            data = [_qfi_row(spec, convention)]
        if fmt == "csv":
            _write_out(_csv(header, data, prov), out)
        else:
            _write_out(_json_doc(prov, [dict(zip(header, r)) for r in data]),
                       out)

    _run(body)


@main.command("fi-sweep")
@_state_opt
@_gamma_opt
@click.option("--axis", type=click.Choice(["tau", "mu"]), default="tau")
@click.option("--range", "range_text", required=True,
              help="Sweep values start:stop:count.")
@click.option("--qfi-ref", "qfi_ref", type=click.Path(), default=None,
              help="Companion file with the canonical QFI reference value.")
@_out_opt
@_format_opt
def cmd_fi_sweep(state_path, gamma, axis, range_text, qfi_ref, out, fmt):
    """Outcome probabilities and FI along a tau or mu sweep."""

    def body():
        if state_path is None:
            raise InvalidSpec("--state is required")
        spec = load_spec(state_path)
        det = DetectionModel(gamma)
        values = _parse_range(range_text)
        prov = _provenance({"cmd": "fi-sweep", "state": state_path,
                            "gamma": gamma, "axis": axis,
                            "range": range_text, "format": fmt})
        rows = []
        for v in values:
            mu, tau = (0.0, float(v)) if axis == "tau" else (float(v), 0.0)
            p = outcome_probs(spec, mu, tau, det)
            fm = fisher_matrix(spec, mu, tau, det)
            rows.append([float(v), p.p0, p.p1, p.p2, p.p2 / max(
                (1.0 - gamma) ** 2, 1e-300),
                fm.f_tt, fm.f_mm, fm.f_mt])
        header = ["param_value", "p0", "p1", "p2", "coincidence",
                  "f_tt", "f_mm", "f_mt"]
        if fmt == "csv":
            _write_out(_csv(header, rows, prov), out)
        else:
            _write_out(_json_doc(prov, [dict(zip(header, r)) for r in rows]),
                       out)
        if qfi_ref is not None:
            q = qfi_canonical(spec)
            ref = q.f_tt if axis == "tau" else q.f_mm
            _write_out(_csv(["canonical_qfi"], [[ref]], prov), qfi_ref)

    _run(body)


@main.command("wigner")
@_state_opt
@click.option("--nx", type=int, default=101)
@click.option("--ny", type=int, default=101)
@click.option("--omega-range", "omega_text", default=None,
              help="omega_min:omega_max (default: amplitude support).")
@click.option("--t-range", "t_text", default=None,
              help="t_min:t_max (default: temporal support).")
@_out_opt
@click.option("--format", "fmt", type=click.Choice(["csv", "long", "json"]),
              default="csv")
def cmd_wigner(state_path, nx, ny, omega_text, t_text, out, fmt):
    """Chronocyclic Wigner distribution on a uniform grid."""

    def body():
        if state_path is None:
            raise InvalidSpec("--state is required")
        spec = load_spec(state_path)

        def bounds(text, terms):
            if text is not None:
                lo, hi = (float(v) for v in text.split(":"))
                return lo, hi
            return terms.support()

        w_range = bounds(omega_text, spectral_terms(spec))
        t_range = bounds(t_text, temporal_terms(spec))
        grid = wigner_grid(spec, w_range, t_range, nx, ny)
        prov = _provenance({"cmd": "wigner", "state": state_path,
                            "nx": nx, "ny": ny,
                            "omega_range": list(w_range),
                            "t_range": list(t_range), "format": fmt})
        meta = (f"# {_fmt(w_range[0])} {_fmt(w_range[1])} {nx} "
                f"{_fmt(t_range[0])} {_fmt(t_range[1])} {ny} "
                f"{_fmt(grid.unit_scale)}")
        norm_line = f"# norm {_fmt(grid.norm_estimate)}"
        if fmt == "json":
            _write_out(_json_doc(prov, {
                "omega_axis": grid.omega_axis.tolist(),
                "time_axis": grid.time_axis.tolist(),
                "values": grid.values.tolist(),
                "norm_estimate": grid.norm_estimate}), out)
            return
        lines = [prov, meta, norm_line]
        if fmt == "csv":
            lines += [",".join(_fmt(float(v)) for v in row)
                      for row in grid.values]
        else:
            lines.append("omega,t,value")
            for i, w in enumerate(grid.omega_axis):
                for j, t in enumerate(grid.time_axis):
                    lines.append(f"{_fmt(float(w))},{_fmt(float(t))},"
                                 f"{_fmt(float(grid.values[i, j]))}")
        _write_out("\n".join(lines) + "\n", out)

    _run(body)


@main.command("simulate")
@_state_opt
@_gamma_opt
@click.option("--mu", type=float, default=0.0)
@click.option("--tau", type=float, default=0.0)
@click.option("--trials", type=int, default=10000)
@click.option("--seed", type=int, required=True)
@_out_opt
def cmd_simulate(state_path, gamma, mu, tau, trials, seed, out):
    """Draw multinomial outcome counts for one experiment."""

    def body():
        if state_path is None:
            raise InvalidSpec("--state is required")
        spec = load_spec(state_path)
        counts = simulate_trials(spec, mu, tau, DetectionModel(gamma),
                                 trials, seed)
        prov = _provenance({"cmd": "simulate", "state": state_path,
                            "gamma": gamma, "mu": mu, "tau": tau,
                            "trials": trials, "seed": seed})
        payload = {"n0": counts.n0, "n1": counts.n1, "n2": counts.n2,
                   "seed": seed}
        _write_out(_json_doc(prov, payload), out)

    _run(body)


@main.command("estimate")
@_state_opt
@_gamma_opt
@click.option("--counts", "counts_text", required=True,
              help="Observed counts n0,n1,n2.")
@click.option("--which", type=click.Choice(["tau", "mu"]), default="tau")
@click.option("--window", "window_text", default=None,
              help="Search window lo:hi (default: family preset).")
@_out_opt
def cmd_estimate(state_path, gamma, counts_text, which, window_text, out):
    """Maximum-likelihood shift estimate from outcome counts."""

    def body():
        if state_path is None:
            raise InvalidSpec("--state is required")
        spec = load_spec(state_path)
        det = DetectionModel(gamma)
        try:
            n0, n1, n2 = (int(v) for v in counts_text.split(","))
        except ValueError:
            raise InvalidSpec("--counts must be n0,n1,n2")
        counts = TrialCounts(n0, n1, n2)
        if window_text is not None:
            lo, hi = (float(v) for v in window_text.split(":"))
            window = (lo, hi)
        else:
            window = default_window(spec, which)
        res = mle_estimate(counts, spec, det, window, which)
        prov = _provenance({"cmd": "estimate", "state": state_path,
                            "gamma": gamma, "counts": counts_text,
                            "which": which,
                            "window": [window[0], window[1]]})
        payload = {
            "estimate": res.estimate,
            "dip_value_hat": res.dip_value_hat,
            "stderr": res.stderr,
            "cr_bound": res.cr_bound,
            "gamma_hat": res.gamma_hat,
            "search_window": list(res.search_window),
            "converged": res.converged,
        }
        _write_out(_json_doc(prov, payload), out)

    _run(body)


@main.command("cr-study")
@_state_opt
@_gamma_opt
@click.option("--mu", type=float, default=0.0)
@click.option("--tau", type=float, default=0.0)
@click.option("--trials", type=int, default=10000)
@click.option("--experiments", type=int, default=500)
@click.option("--seed", type=int, required=True)
@click.option("--which", type=click.Choice(["tau", "mu"]), default="tau")
@click.option("--window", "window_text", default=None)
@_out_opt
@click.option("--summary-out", type=click.Path(), default=None,
              help="Write the summary JSON here (default: stderr echo).")
def cmd_cr_study(state_path, gamma, mu, tau, trials, experiments, seed,
                 which, window_text, out, summary_out):
    """Monte-Carlo Cramer-Rao saturation study."""

    def body():
        if state_path is None:
            raise InvalidSpec("--state is required")
        spec = load_spec(state_path)
        det = DetectionModel(gamma)
        window = None
        if window_text is not None:
            lo, hi = (float(v) for v in window_text.split(":"))
            window = (lo, hi)
        report = cr_saturation_study(spec, mu, tau, det, trials, experiments,
                                     seed, which=which, window=window,
                                     n_workers=_n_workers())
        prov = _provenance({"cmd": "cr-study", "state": state_path,
                            "gamma": gamma, "mu": mu, "tau": tau,
                            "trials": trials, "experiments": experiments,
                            "seed": seed, "which": which})
        rows = [[idx, est, int(ok)] for idx, est, ok in report["records"]]
        _write_out(_csv(["experiment_id", "tau_hat", "converged"], rows, prov),
                   out)
        summary = {k: v for k, v in report.items()
                   if k not in ("records", "estimates")}
        doc = _json_doc(prov, summary)
        if summary_out is not None:
            _write_out(doc, summary_out)
        else:
            click.echo(doc, nl=False, err=True)

    _run(body)


@main.command("tables")
@_out_opt
@_format_opt
def cmd_tables(out, fmt):
    """Both precision survey tables in one document."""

    def body():
        prov = _provenance({"cmd": "tables", "format": fmt})
        rows = []
        for name, preset in (("table1", table1_rows()),
                             ("table2", table2_rows())):
            for r in qcr_table(preset):
                rows.append({"table": name, **r})
        header = list(rows[0].keys())
        if fmt == "csv":
            _write_out(_csv(header, [[r[k] for k in header] for r in rows],
                            prov), out)
        else:
            _write_out(_json_doc(prov, rows), out)

    _run(body)


if __name__ == "__main__":
    main()
