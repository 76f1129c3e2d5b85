"""``rlcm-kms`` command line: config ingestion, dispatch and JSON/CSV reports.

Every subcommand takes the semigroup either from family flags or from a TOML
config (``--config``); flags given explicitly override config parameters.
Exit codes: 0 ok or undecided, 1 a check failed, 2 usage or validation
error, 3 sizing error.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable

import click

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import tomli_w

from . import analysis, kms, rep
from .core import CappedComputationError, ConstructionError, Element, RlcmError, Semigroup, SizingError, UsageError
from .families import (
    BaumslagSolitarSpec,
    DilationMatrixSpec,
    EasyArtinSpec,
    FiniteFieldShiftSpec,
    FreeMonoidSpec,
    NSemidirectPSpec,
    SelfSimilarSpec,
    build,
    spec_from_dict,
)

SCHEMA_VERSION = 1
COMMANDS = ("describe", "check-admissible", "action", "zeta", "kms-eval", "kappa", "ground", "classify", "verify-rep")
EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_SIZING = 0, 1, 2, 3


# -- JSON encoding ---------------------------------------------------------------
def rational(x: Fraction | int) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def enclosure(lo, hi) -> dict:
    return {"lo": rational(lo), "hi": rational(hi)}


class _Encoder:
    def __init__(self, S: Semigroup | None):
        self.S = S

    def __call__(self, obj: Any) -> Any:
        if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
            return obj
        if isinstance(obj, float):
            raise TypeError("reports never carry floats")
        if isinstance(obj, Fraction):
            return rational(obj)
        if isinstance(obj, Element):
            return self.S.render(obj) if self.S is not None else repr(obj)
        if isinstance(obj, kms.StateValue):
            out = {"value": rational(obj.lo)} if obj.lo == obj.hi else {"enclosure": enclosure(obj.lo, obj.hi)}
            out["mode"] = obj.mode
            if obj.cutoff is not None:
                out["cutoff"] = obj.cutoff
            if obj.tail_bound is not None:
                out["tail_bound"] = rational(obj.tail_bound)
            if obj.note:
                out["note"] = obj.note
            return out
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            body = {f.name: self(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
            return {"type": type(obj).__name__, **body}
        if isinstance(obj, dict):
            return {self._key(k): self(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self(x) for x in obj]
        if isinstance(obj, (set, frozenset)):
            items = list(obj)
            if self.S is not None and all(isinstance(x, Element) for x in items):
                items.sort(key=self.S.sort_key)
            return [self(x) for x in items]
        raise TypeError(f"cannot encode {type(obj).__name__}")

    def _key(self, k) -> str:
        if isinstance(k, str):
            return k
        if isinstance(k, tuple):
            return "|".join(self._key(x) for x in k)
        if isinstance(k, Element):
            return self.S.render(k)
        return str(k)


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rlcm-kms-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([str(x) for x in row])  # Fractions print as p/q
    return buf.getvalue()


# -- configuration ---------------------------------------------------------------
def _ints(text: str | None, what: str) -> tuple[int, ...]:
    if text is None:
        return ()
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _matrix(text: str) -> tuple[tuple[int, ...], ...]:
    rows = tuple(_ints(r, "--matrix") for r in text.split(";"))
    if not rows or any(len(r) != len(rows) for r in rows):
        raise UsageError("--matrix: expected a square matrix such as '1,1;1,-1'")
    return rows


def spec_from_flags(opts: dict):
    fam = opts.get("family")
    if fam is None:
        return None
    if fam == "bs":
        return BaumslagSolitarSpec(opts.get("c") or 2, opts.get("d") or 3)
    if fam == "nxp":
        return NSemidirectPSpec(_ints(opts.get("primes"), "--primes") or (2, 3))
    if fam == "free":
        return FreeMonoidSpec(opts.get("m") or 2)
    if fam == "artin":
        return EasyArtinSpec(opts.get("m") or 2, opts.get("n") or 1)
    if fam == "dilation":
        return DilationMatrixSpec(_matrix(opts.get("matrix") or "2"))
    if fam == "ffs":
        return FiniteFieldShiftSpec(opts.get("q") or 2, opts.get("f_degree") or 1, _ints(opts.get("units"), "--units"))
    if fam == "adding-machine":
        return SelfSimilarSpec()
    raise UsageError(f"unknown family {fam!r}")


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config parse error in {path}: {exc}") from None
    if "semigroup" not in data:
        raise UsageError("config validation error: field 'semigroup' is required (a table with a 'family' key)")
    unknown = set(data) - {"semigroup", "command", "parameters", "output"}
    if unknown:
        raise UsageError(f"config validation error: unknown top-level fields {sorted(unknown)}")
    cmd = data.get("command")
    if cmd is not None and cmd not in COMMANDS:
        raise UsageError(f"config validation error: field 'command' must be one of {', '.join(COMMANDS)}")
    return data


class Job:
    """Resolved configuration for one invocation."""

    def __init__(self, command: str, opts: dict):
        self.command = command
        self.config_data: dict = {}
        if opts.get("config"):
            self.config_data = load_config(opts["config"])
            if self.config_data.get("command") not in (None, command):
                raise UsageError(f"config is for command {self.config_data['command']!r}, not {command!r}")
        params = dict(self.config_data.get("parameters", {}))
        for k, v in opts.items():
            if k in _FAMILY_KEYS or k in ("config", "output", "csv", "no_timestamp"):
                continue
            if v is not None and v != ():
                params[k] = v
        self.params = params
        spec = spec_from_flags(opts)
        if spec is None and self.config_data:
            spec = spec_from_dict(self.config_data["semigroup"])
        self.spec = spec
        out = self.config_data.get("output", {})
        self.output = opts.get("output") or out.get("path")
        self.csv = opts.get("csv") or out.get("csv")
        self.timestamp = not (opts.get("no_timestamp") or out.get("timestamp") is False)

    def semigroup(self) -> Semigroup:
        if self.spec is None:
            raise UsageError("no semigroup given: use --family or --config")
        return build(self.spec)

    def echo(self) -> dict:
        return {
            "command": self.command,
            "semigroup": self.spec.to_dict() if self.spec is not None else None,
            # TOML floats are echoed as text; reports carry no binary floats
            "parameters": {k: str(v) if isinstance(v, float) else v for k, v in sorted(self.params.items())},
        }


_FAMILY_KEYS = {"family", "c", "d", "primes", "m", "n", "matrix", "q", "f_degree", "units"}


def family_options(fn: Callable) -> Callable:
    opts = [
        click.option("--config", type=click.Path(dir_okay=False), help="TOML job config."),
        click.option("--family", type=click.Choice(["bs", "nxp", "free", "artin", "dilation", "ffs", "adding-machine"])),
        click.option("--c", type=int, help="BS: exponent c in a b^c = b^d a."),
        click.option("--d", type=int, help="BS: exponent d."),
        click.option("--primes", help="nxp: comma-separated primes."),
        click.option("--m", type=int, help="free/artin: number of free letters."),
        click.option("--n", type=int, help="artin: rank of the commuting part."),
        click.option("--matrix", help="dilation: rows separated by ';', entries by ','."),
        click.option("--q", type=int, help="ffs: field size."),
        click.option("--f-degree", type=int, help="ffs: degree of the shift."),
        click.option("--units", help="ffs: comma-separated generators of the unit group."),
        click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the JSON report here."),
        click.option("--csv", type=click.Path(dir_okay=False), help="Write the per-level table as CSV."),
        click.option("--no-timestamp", is_flag=True, help="Omit generated_at for byte-identical reports."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


# -- element parsing ---------------------------------------------------------------
def parse_element(S: Semigroup, text: str, search_bound: int | None = None) -> Element:
    """Parse ``text`` as rendered by ``S.render``; BS words go through the rewriting system."""
    text = text.strip()
    word = getattr(S, "word", None)
    if callable(word):
        try:
            return word(text)
        except (RlcmError, ValueError, KeyError):
            pass
    bound = search_bound or S.default_depth()
    for weight in (0, 2, 4, 6):
        for x in S.elements_upto(bound, weight):
            if S.render(x) == text:
                return x
    raise UsageError(f"cannot parse {text!r} as an element of {S.tag} with scale <= {bound}")


def _beta(text) -> Fraction | None:
    if text is None:
        return None
    if str(text).lower() in ("inf", "infinity"):
        return None
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--beta: expected a rational number or 'inf', got {text!r}") from None


def _trace(params: dict) -> kms.TraceSpec:
    name = params.get("trace", "canonical")
    if name == "canonical":
        return kms.Canonical()
    if name == "rho":
        return kms.Rho(params.get("level"))
    raise UsageError(f"--trace must be 'canonical' or 'rho', got {name!r}")


# -- command bodies ----------------------------------------------------------------
class Outcome:
    def __init__(self):
        self.results: list = []
        self.warnings: list[str] = []
        self.failed = False
        self.table: tuple[list[str], list[list]] | None = None


def _describe(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    desc = S.describe()
    desc["tag"] = S.tag
    desc["default_depth"] = S.default_depth()
    desc["right_cancellative"] = S.right_cancellative
    desc["certificates"] = {
        "faithful": analysis.certificate_summary(S.faithful_certificate()),
        "almost_free": analysis.certificate_summary(S.almost_free_certificate()),
        "finite_propagation": analysis.certificate_summary(S.propagation_certificate()),
    }
    desc["transversal_sizes"] = [[n, len(lvl)] for n, lvl in S.levels(S.default_depth())]
    out.results.append(desc)
    emit = job.params.get("emit_config")
    if emit:
        atomic_write(emit, tomli_w.dumps({"semigroup": job.spec.to_dict()}))


def _check_admissible(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    r = analysis.check_admissible(S, job.params.get("depth"), job.params.get("core_weight", 3))
    for name, c in r.checks.items():
        entry = {"condition": name, "status": type(c).__name__}
        if isinstance(c, analysis.Fail):
            entry.update({"reason": c.reason, "counterexample": c.counterexample})
            out.failed = True
        elif isinstance(c, analysis.Exhausted):
            out.warnings.append(f"{name} exhausted at depth {c.depth}")
            entry["depth"] = c.depth
        out.results.append(entry)
    out.results.append({"depth": r.depth, "irreducible_scales": list(r.irreducible_scales)})


_PROPERTIES = {
    "faithful": analysis.check_faithful,
    "almost-free": analysis.check_almost_free,
    "propagation": analysis.check_propagation,
}


def _action(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    which = job.params.get("property", "all")
    names = list(_PROPERTIES) if which == "all" else [which]
    cw = job.params.get("core_weight", analysis.DEFAULT_CORE_WEIGHT)
    level = job.params.get("level")
    rows = []
    for name in names:
        r = _PROPERTIES[name](S, cw, level)
        v = r.verdict
        entry = {"property": r.property, "verdict": type(v).__name__, "level": r.level, "core_weight": r.core_weight}
        if isinstance(v, analysis.Holds):
            entry["certificate"] = v.certificate
        elif isinstance(v, analysis.Violated):
            entry.update({"witness": list(v.witness), "reason": v.reason})
            if name == "almost-free" and len(v.witness) == 2:
                growth = analysis.fixed_point_growth(S, v.witness[0], v.witness[1], r.level)
                entry["fixed_point_growth"] = growth
                rows += [[name, n, k] for n, k in growth]
        else:
            entry["note"] = v.note
            out.warnings.append(f"{r.property} undecided at level {v.bound}: {v.note}")
        out.results.append(entry)
    out.table = (["property", "level", "fixed_points"], rows)


def _zeta(job: Job, out: Outcome) -> None:
    p = job.params
    beta = _beta(p.get("beta"))
    if beta is None:
        raise UsageError("zeta needs a finite --beta")
    if p.get("irr"):
        irr = _ints(p["irr"], "--irr")
    else:
        irr = job.semigroup().irreducible_scales
    z = kms.zeta(irr, beta)
    entry: dict = {"index": list(z.index), "beta": beta, "converges": z.converges}
    if z.converges:
        entry["value"] = z.value
    else:
        out.warnings.append(f"ζ diverges at β = {beta}")
    cutoff = p.get("cutoff")
    if cutoff and z.converges and beta.denominator == 1:
        rows, acc = [], Fraction(0)
        from .core import monoid_closure

        for n in monoid_closure(irr, cutoff):
            acc += Fraction(n) / Fraction(n) ** int(beta)
            rows.append([n, acc])
        entry["partial_sum"] = acc
        entry["tail"] = z.value.value - acc
        entry["geometric_tail_bound"] = kms.geometric_tail_bound(irr, beta, cutoff)
        out.table = (["n", "partial_sum"], rows)
    out.results.append(entry)


def _kms_eval(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    p = job.params
    beta = _beta(p.get("beta"))
    if beta is None:
        raise UsageError("kms-eval needs a finite --beta; use 'ground' for β = ∞")
    s, t = parse_element(S, p.get("s", "1")), parse_element(S, p.get("t", "1"))
    v = kms.kms_value(S, beta, s, t, _trace(p), p.get("cutoff"))
    out.results.append({"s": s, "t": t, "beta": beta, "trace": p.get("trace", "canonical"), "value": v})


def _kappa(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    p = job.params
    a, b = parse_element(S, p.get("a", "1")), parse_element(S, p.get("b", "1"))
    level = p.get("level") or S.default_depth()
    tbl = analysis.kappa_table(S, a, b, level)
    rows = [[r.n, r.size, r.exact, r.g_minus_t, r.kappa] for r in tbl.rows]
    lo, hi = tbl.enclosure
    out.results.append({"a": a, "b": b, "level": level, "enclosure": enclosure(lo, hi),
                        "rows": [{"n": r[0], "size": r[1], "exact": r[2], "g_minus_t": r[3], "kappa": r[4]} for r in rows]})
    if lo != hi:
        out.warnings.append(f"κ enclosure has width {hi - lo} at level {level}")
    out.table = (["n", "size", "exact_fixed", "class_only", "kappa"], rows)


def _ground(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    p = job.params
    s, t = parse_element(S, p.get("s", "1")), parse_element(S, p.get("t", "1"))
    v = kms.ground_state_value(S, s, t, _trace(p))
    out.results.append({"s": s, "t": t, "value": v})


def _classify(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    raw = job.params.get("beta")
    if raw is None:
        raise UsageError("classify needs --beta (a rational >= 1 or 'inf')")
    beta = _beta(raw)
    if beta is not None and beta < 1:
        raise kms.NoKmsStateError(f"no KMS_β states exist for β = {beta} < 1")
    c = kms.classify(S, "inf" if beta is None else beta, job.params.get("depth"))
    for item in c.items:
        entry = {"key": item.key, "statement": item.statement, "verdict": item.verdict, "payload": _plain_payload(item.payload)}
        out.results.append(entry)
        if item.verdict == "failed":
            out.failed = True
        elif item.verdict == "undecided":
            out.warnings.append(f"{item.key}: undecided")


def _plain_payload(payload: dict) -> dict:
    out = {}
    for k, v in payload.items():
        if isinstance(v, tuple) and len(v) == 2 and all(isinstance(x, Fraction) for x in v):
            out[k] = enclosure(*v)
        elif isinstance(v, dict):
            out[k] = {kk: (enclosure(*vv) if isinstance(vv, tuple) and len(vv) == 2 and all(isinstance(x, Fraction) for x in vv) else vv)
                      for kk, vv in v.items()}
        else:
            out[k] = v
    return out


def _verify_rep(job: Job, out: Outcome) -> None:
    S = job.semigroup()
    p = job.params
    r = rep.build_rep(S, kms.Canonical(), p.get("level_cap", 9), p.get("core_cap", 2), p.get("core_basis", "group"))
    report = rep.verify_relations(r)
    for c in report.checks:
        out.results.append({"check": c.name, "passed": c.passed, "interior": c.interior, "witnesses": list(c.witnesses)})
    if not report.passed:
        out.failed = True
    out.results.append({"basis_size": r.size, "interior": int(r.interior_mask().sum())})
    beta = _beta(p.get("beta"))
    if beta is not None and r.core_basis == "group":
        I = _ints(p.get("index"), "--index") or S.irreducible_scales
        samples = [(s, s) for s in rep.relation_elements(S)][:5]
        rr = rep.verify_reconstruction(r, beta, I, samples)
        out.results.append({
            "reconstruction": {
                "beta": rr.beta, "index": list(rr.index), "phi_QI": rr.phi_QI, "zeta_I": rr.zeta_I,
                "excluded_mass": rr.excluded_mass, "bound": rr.bound, "max_deviation": rr.max_deviation,
                "passed": rr.passed,
                "samples": [{"s": a, "t": b, "exact": e, "direct": d, "reconstructed": rc} for a, b, e, d, rc, _ in rr.samples],
            }
        })
        if not rr.passed:
            out.failed = True


_BODIES = {
    "describe": _describe,
    "check-admissible": _check_admissible,
    "action": _action,
    "zeta": _zeta,
    "kms-eval": _kms_eval,
    "kappa": _kappa,
    "ground": _ground,
    "classify": _classify,
    "verify-rep": _verify_rep,
}


def run(command: str, opts: dict) -> int:
    """Execute one job; returns the exit status and writes the report."""
    out = Outcome()
    S = None
    try:
        job = Job(command, opts)
        if job.spec is not None:
            S = job.semigroup()
        _BODIES[command](job, out)
    except SizingError as exc:
        click.echo(f"sizing error: {exc}; suggestion: {json.dumps(exc.suggestion)}", err=True)
        return EXIT_SIZING
    except CappedComputationError as exc:
        click.echo(f"sizing error: {exc}", err=True)
        return EXIT_SIZING
    except (UsageError, ConstructionError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": job.echo(),
        "results": out.results,
        "warnings": out.warnings,
    }
    if job.timestamp:
        report["generated_at"] = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    text = json.dumps(_Encoder(S)(report), indent=2, ensure_ascii=False) + "\n"
    if job.output:
        atomic_write(job.output, text)
    else:
        click.echo(text, nl=False)
    if job.csv:
        if out.table is None:
            click.echo(f"warning: {command} has no per-level table; --csv ignored", err=True)
        else:
            atomic_write(job.csv, csv_text(*out.table))
    return EXIT_FAILED if out.failed else EXIT_OK


# -- click wiring ------------------------------------------------------------------
@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main() -> None:
    """Exact computations for right LCM semigroups and their KMS states."""


def _finish(command: str, **opts) -> None:
    try:
        from .parallel import thread_count

        thread_count()
    except UsageError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    sys.exit(run(command, opts))


@main.command("describe")
@family_options
@click.option("--emit-config", type=click.Path(dir_okay=False), help="Write the semigroup as a TOML config.")
def describe_cmd(**opts):
    """Family parameters, certificates and transversal sizes."""
    _finish("describe", **opts)


@main.command("check-admissible")
@family_options
@click.option("--depth", type=int, help="Scale bound; default max(Irr)^3.")
@click.option("--core-weight", type=int)
def check_admissible_cmd(**opts):
    """Check conditions A1-A4 up to the depth bound."""
    _finish("check-admissible", **opts)


@main.command("action")
@family_options
@click.option("--property", type=click.Choice(["faithful", "almost-free", "propagation", "all"]))
@click.option("--core-weight", type=int)
@click.option("--level", type=int)
def action_cmd(**opts):
    """Faithfulness, almost freeness and finite propagation of the core action."""
    _finish("action", **opts)


@main.command("zeta")
@family_options
@click.option("--irr", help="Comma-separated index set; defaults to the family's irreducible scales.")
@click.option("--beta", required=True)
@click.option("--cutoff", type=int, help="Also report partial sums up to this scale.")
def zeta_cmd(**opts):
    """ζ_I(β) as an exact product, optionally with partial sums."""
    _finish("zeta", **opts)


@main.command("kms-eval")
@family_options
@click.option("--beta")
@click.option("--s")
@click.option("--t")
@click.option("--trace", type=click.Choice(["canonical", "rho"]))
@click.option("--level", type=int, help="κ level for the rho trace.")
@click.option("--cutoff", type=int, help="Force series evaluation up to this scale.")
def kms_eval_cmd(**opts):
    """ψ_β(v_s v_t*)."""
    _finish("kms-eval", **opts)


@main.command("kappa")
@family_options
@click.option("--a")
@click.option("--b")
@click.option("--level", type=int)
def kappa_cmd(**opts):
    """Per-level κ table and enclosure for a pair of core elements."""
    _finish("kappa", **opts)


@main.command("ground")
@family_options
@click.option("--s")
@click.option("--t")
@click.option("--trace", type=click.Choice(["canonical", "rho"]))
@click.option("--level", type=int)
def ground_cmd(**opts):
    """Ground-state value on v_s v_t*."""
    _finish("ground", **opts)


@main.command("classify")
@family_options
@click.option("--beta")
@click.option("--depth", type=int)
def classify_cmd(**opts):
    """Structured KMS and ground-state classification at β."""
    _finish("classify", **opts)


@main.command("verify-rep")
@family_options
@click.option("--level-cap", type=int)
@click.option("--core-cap", type=int)
@click.option("--core-basis", type=click.Choice(["group", "semigroup"]))
@click.option("--beta", help="Also run the weighted reconstruction checks at this integer β > 1.")
@click.option("--index", help="Comma-separated subset I of the irreducible scales.")
def verify_rep_cmd(**opts):
    """Relation, defect-projection and reconstruction checks on a truncation."""
    _finish("verify-rep", **opts)


if __name__ == "__main__":
    main()
