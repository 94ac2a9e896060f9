"""Semantic evaluation of generated premise predictions.

The loop: deduplicate predictions, decode each generated line, classify it
as a known library statement / a new conjecture / unparsable, assemble an
ATP problem per prediction (dropping the conjecture itself if proposed),
run a prover with a short countersatisfiability pre-pass and a longer proof
pass, and aggregate the verdict counts split by whether the problem
contains any new conjecture.
"""

from __future__ import annotations

import csv
import os
import re
import subprocess
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Union

from . import prefix, tptp
from .library import FormulaLibrary, UnknownName
from .tptp import AnnotatedFormula, Formula, Problem


# ---------------------------------------------------------------------------
# Data types


@dataclass(frozen=True)
class Prediction:
    """One generated premise list for one conjecture."""

    conjecture_name: str
    sample_index: int
    lines: tuple[tuple[str, ...], ...]  # prefix token streams, one per premise


@dataclass(frozen=True)
class Known:
    name: str
    chrono_index: int
    formula: Formula


@dataclass(frozen=True)
class NewConjecture:
    formula: Formula


@dataclass(frozen=True)
class Unparsable:
    reason: str


PremiseClass = Union[Known, NewConjecture, Unparsable]


@dataclass(frozen=True)
class Proved:
    used_premise_names: tuple[str, ...] = ()


@dataclass(frozen=True)
class CounterSatisfiable:
    pass


@dataclass(frozen=True)
class Unknown:
    reason: str = "gaveup"  # timeout | gaveup | error


AtpVerdict = Union[Proved, CounterSatisfiable, Unknown]


class ProverNotFound(RuntimeError):
    pass


class ProverCrashed(RuntimeError):
    def __init__(self, returncode: int, output: str):
        self.returncode = returncode
        self.output = output[:2000]
        super().__init__(f"prover exited with {returncode}: {self.output[:200]!r}")


@dataclass
class EvalOptions:
    strict_chronology: bool = False
    cs_limit: float = 1.0
    proof_limit: float = 6.0
    jobs: int = 0  # 0 = number of processors


@dataclass
class ProblemRecord:
    conjecture_name: str
    sample_index: int
    n_known: int
    n_new: int
    n_unparsable: int
    self_premise: bool
    has_new: bool
    verdict: str  # proved | countersatisfiable | unknown
    unknown_reason: str
    used_premises: tuple[str, ...]
    single_premise: bool


@dataclass
class EvalReport:
    predictions: int = 0
    unique_after_dedup: int = 0
    problems_no_new_conjecture: int = 0
    problems_with_new_conjecture: int = 0
    proved: int = 0
    countersatisfiable: int = 0
    unknown: int = 0
    proved_theorems: int = 0
    single_premise_proofs: int = 0
    self_premise_proofs: int = 0
    unparsable_lines: int = 0
    new_formula_count: int = 0
    new_formula_unique: int = 0
    verdicts_no_new: dict = field(
        default_factory=lambda: {"proved": 0, "countersatisfiable": 0, "unknown": 0}
    )
    verdicts_with_new: dict = field(
        default_factory=lambda: {"proved": 0, "countersatisfiable": 0, "unknown": 0}
    )

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Dedup and classification


def dedup(predictions: list[Prediction]) -> list[Prediction]:
    """Drop exact duplicates of (conjecture, token-line sequence), keep first."""
    seen: set[tuple] = set()
    out = []
    for p in predictions:
        key = (p.conjecture_name, p.lines)
        if key in seen:
            continue
        seen.add(key)
        out.append(p)
    return out


def decode_line(
    tokens: tuple[str, ...], sig: prefix.SignatureMap
) -> Formula | Exception:
    try:
        return prefix.decode_tokens(list(tokens), sig)
    except (prefix.PrefixError, tptp.OpenFormula) as err:
        return err


def decode_status(
    pred: Prediction, sig: prefix.SignatureMap
) -> list[Formula | Exception]:
    """Per-line decode outcome: the formula on success, the error otherwise."""
    return [decode_line(line, sig) for line in pred.lines]


def classify_premise(
    f_or_err: Formula | Exception, library: FormulaLibrary
) -> PremiseClass:
    """Failed decode -> Unparsable; alpha-class hit -> Known; else new."""
    if isinstance(f_or_err, Exception):
        return Unparsable(f"{type(f_or_err).__name__}: {f_or_err}")
    entry = library.lookup_alpha(f_or_err)
    if entry is not None:
        return Known(entry.name, entry.chrono_index, entry.formula)
    return NewConjecture(f_or_err)


def assemble_problem(
    conjecture_name: str,
    premises: list[PremiseClass],
    library: FormulaLibrary,
    *,
    strict_chronology: bool = False,
) -> Problem:
    """Build the ATP problem for one prediction.

    The conjecture comes from the library; each usable premise becomes an
    axiom.  Any premise alpha-equal to the conjecture is dropped, as are
    unparsable lines, duplicate known names, and (in strict chronology
    mode) known premises not strictly earlier than the conjecture.
    """
    conj = library.get(conjecture_name)
    conj_key = tptp.alpha_key(conj.formula)
    formulas: list[AnnotatedFormula] = []
    used_names = {conjecture_name}
    fresh = 0
    for pc in premises:
        if isinstance(pc, Unparsable):
            continue
        formula = pc.formula
        if tptp.alpha_key(formula) == conj_key:
            continue
        if isinstance(pc, Known):
            if strict_chronology and pc.chrono_index >= conj.chrono_index:
                continue
            if pc.name in used_names:
                continue
            used_names.add(pc.name)
            formulas.append(AnnotatedFormula(pc.name, "axiom", formula))
        else:
            fresh += 1
            name = f"new_{fresh}"
            while name in used_names:
                fresh += 1
                name = f"new_{fresh}"
            used_names.add(name)
            formulas.append(AnnotatedFormula(name, "axiom", formula))
    formulas.append(AnnotatedFormula(conjecture_name, "conjecture", conj.formula))
    return Problem(tuple(formulas))


# ---------------------------------------------------------------------------
# Provers


SZS_RE = re.compile(r"SZS status\s+([A-Za-z]+)")
FILE_SOURCE_RE = re.compile(r"file\(\s*[^,()]*,\s*([A-Za-z0-9_]+)\s*\)")

_PROVED_STATUSES = {"Theorem", "Unsatisfiable", "ContradictoryAxioms"}
_CS_STATUSES = {"CounterSatisfiable", "Satisfiable"}
_TIMEOUT_STATUSES = {"ResourceOut", "Timeout"}


def parse_szs_output(output: str, axiom_names: list[str]) -> AtpVerdict | None:
    """Map a prover transcript to a verdict; None when no SZS status found."""
    m = SZS_RE.search(output)
    if not m:
        return None
    status = m.group(1)
    if status in _PROVED_STATUSES:
        allowed = set(axiom_names)
        used, seen = [], set()
        for name in FILE_SOURCE_RE.findall(output):
            if name in allowed and name not in seen:
                seen.add(name)
                used.append(name)
        return Proved(tuple(used))
    if status in _CS_STATUSES:
        return CounterSatisfiable()
    if status in _TIMEOUT_STATUSES:
        return Unknown("timeout")
    return Unknown("gaveup")


class StubProver:
    """Hermetic in-process prover with deliberately narrow coverage.

    Proves a conjecture that is alpha-equal to some axiom (reporting that
    axiom as the proof's single premise) or that is a propositional
    tautology; reports CounterSatisfiable for a propositional contradiction;
    gives up on everything else.  Limits are accepted and ignored.
    """

    name = "stub"

    def prove(self, problem: Problem, limit_seconds: float) -> AtpVerdict:
        from .stubprover import stub_verdict

        return stub_verdict(problem)


class SubprocessProver:
    """External prover run on a temp file, verdict read from SZS output."""

    def __init__(self, executable: str, extra_args: list[str] | None = None, grace: float = 3.0):
        self.executable = executable
        self.extra_args = (
            list(extra_args)
            if extra_args is not None
            else ["--auto-schedule", "--proof-object"]
        )
        self.grace = grace
        self.name = os.path.basename(executable)

    def prove(self, problem: Problem, limit_seconds: float) -> AtpVerdict:
        axiom_names = [af.name for af in problem.formulas if af.role == "axiom"]
        with tempfile.TemporaryDirectory(prefix="folgen_atp_") as tmp:
            path = os.path.join(tmp, "problem.p")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(tptp.print_problem(problem))
            args = (
                [self.executable]
                + self.extra_args
                + [f"--cpu-limit={max(1, int(limit_seconds))}", path]
            )
            try:
                proc = subprocess.run(
                    args,
                    capture_output=True,
                    text=True,
                    timeout=limit_seconds + self.grace,
                )
            except FileNotFoundError as err:
                raise ProverNotFound(str(err)) from err
            except subprocess.TimeoutExpired:
                return Unknown("timeout")
        verdict = parse_szs_output(proc.stdout + "\n" + proc.stderr, axiom_names)
        if verdict is None:
            if proc.returncode != 0:
                raise ProverCrashed(proc.returncode, proc.stdout + proc.stderr)
            return Unknown("gaveup")
        return verdict


def make_prover(spec: str):
    """'stub' or a path to an executable speaking SZS conventions."""
    if spec == "stub":
        return StubProver()
    return SubprocessProver(spec)


def run_prover(problem: Problem, limit_seconds: float, prover) -> AtpVerdict:
    return prover.prove(problem, limit_seconds)


# ---------------------------------------------------------------------------
# End-to-end evaluation


def _verdict_fields(verdict: AtpVerdict) -> tuple[str, str, tuple[str, ...]]:
    if isinstance(verdict, Proved):
        return "proved", "", verdict.used_premise_names
    if isinstance(verdict, CounterSatisfiable):
        return "countersatisfiable", "", ()
    return "unknown", verdict.reason, ()


def evaluate(
    predictions: list[Prediction],
    library: FormulaLibrary,
    sig: prefix.SignatureMap,
    prover,
    opts: EvalOptions | None = None,
) -> tuple[EvalReport, list[ProblemRecord]]:
    """dedup -> classify -> assemble -> prove over all predictions."""
    opts = opts or EvalOptions()
    report = EvalReport(predictions=len(predictions))
    unique = dedup(predictions)
    report.unique_after_dedup = len(unique)

    staged = []  # (prediction, classes, self_premise, has_new, problem | None)
    new_keys: list[tuple] = []
    for pred in unique:
        classes = [
            classify_premise(decode_line(line, sig), library) for line in pred.lines
        ]
        report.unparsable_lines += sum(1 for c in classes if isinstance(c, Unparsable))
        for c in classes:
            if isinstance(c, NewConjecture):
                report.new_formula_count += 1
                new_keys.append(tptp.alpha_key(c.formula))
        try:
            conj_key = tptp.alpha_key(library.get(pred.conjecture_name).formula)
            self_premise = any(
                not isinstance(c, Unparsable) and tptp.alpha_key(c.formula) == conj_key
                for c in classes
            )
            problem = assemble_problem(
                pred.conjecture_name,
                classes,
                library,
                strict_chronology=opts.strict_chronology,
            )
        except UnknownName:
            conj_key = None
            self_premise = False
            problem = None
        # new conjectures survive assembly unless they duplicate the conjecture
        has_new = any(
            isinstance(c, NewConjecture)
            and (conj_key is None or tptp.alpha_key(c.formula) != conj_key)
            for c in classes
        )
        staged.append((pred, classes, self_premise, has_new, problem))
    report.new_formula_unique = len(set(new_keys))

    def attempt(item) -> AtpVerdict:
        problem = item[-1]
        if problem is None:
            return Unknown("error")
        try:
            verdict = run_prover(problem, opts.cs_limit, prover)
            if isinstance(verdict, Unknown):
                verdict = run_prover(problem, opts.proof_limit, prover)
            return verdict
        except ProverCrashed:
            return Unknown("error")

    jobs = opts.jobs or os.cpu_count() or 1
    if jobs > 1 and len(staged) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(attempt, staged))
    else:
        verdicts = [attempt(item) for item in staged]

    records: list[ProblemRecord] = []
    proved_conjectures: set[str] = set()
    for (pred, classes, self_premise, has_new, problem), verdict in zip(staged, verdicts):
        kind, reason, used = _verdict_fields(verdict)
        record = ProblemRecord(
            conjecture_name=pred.conjecture_name,
            sample_index=pred.sample_index,
            n_known=sum(1 for c in classes if isinstance(c, Known)),
            n_new=sum(1 for c in classes if isinstance(c, NewConjecture)),
            n_unparsable=sum(1 for c in classes if isinstance(c, Unparsable)),
            self_premise=self_premise,
            has_new=has_new,
            verdict=kind,
            unknown_reason=reason,
            used_premises=used,
            single_premise=(kind == "proved" and len(used) == 1),
        )
        records.append(record)
        stream = report.verdicts_with_new if has_new else report.verdicts_no_new
        stream[kind] += 1
        if has_new:
            report.problems_with_new_conjecture += 1
        else:
            report.problems_no_new_conjecture += 1
        if kind == "proved":
            report.proved += 1
            proved_conjectures.add(pred.conjecture_name)
            if record.single_premise:
                report.single_premise_proofs += 1
        elif kind == "countersatisfiable":
            report.countersatisfiable += 1
        else:
            report.unknown += 1
        if self_premise:
            report.self_premise_proofs += 1
    report.proved_theorems = len(proved_conjectures)
    return report, records


# ---------------------------------------------------------------------------
# Premise selection for new conjectures


def formula_symbols(f: Formula) -> frozenset[str]:
    sig = prefix.SignatureMap()
    prefix.register_formula_symbols(f, sig)
    return frozenset(sig.entries)


def symbol_overlap_selector(
    formula: Formula, library: FormulaLibrary, n: int
) -> list[str]:
    """Top-n library names by Jaccard similarity of symbol sets."""
    target = formula_symbols(formula)
    scored = []
    for entry in library.entries:
        symbols = formula_symbols(entry.formula)
        union = len(target | symbols)
        score = len(target & symbols) / union if union else 0.0
        scored.append((-score, entry.chrono_index, entry.name))
    scored.sort()
    return [name for _, _, name in scored[:n]]


def prove_new_conjectures(
    new_formulas: list[Formula],
    library: FormulaLibrary,
    selector: Callable[[Formula, FormulaLibrary, int], list[str]] | None = None,
    limit_seconds: float = 6.0,
    prover=None,
    n_premises: int = 32,
) -> list[tuple[Formula, AtpVerdict]]:
    """Try to prove each new formula from its selected library premises."""
    selector = selector or symbol_overlap_selector
    prover = prover or StubProver()
    results = []
    for formula in new_formulas:
        names = selector(formula, library, n_premises)
        axioms = tuple(
            AnnotatedFormula(name, "axiom", library.get(name).formula)
            for name in names
        )
        problem = Problem(
            axioms + (AnnotatedFormula("new_conjecture", "conjecture", formula),)
        )
        results.append((formula, run_prover(problem, limit_seconds, prover)))
    return results


# ---------------------------------------------------------------------------
# Prediction files and reports


def prediction_filename(conjecture_name: str, sample_index: int) -> str:
    return f"{conjecture_name}___{sample_index}"


_PREDICTION_NAME_RE = re.compile(r"(.+)___([0-9]+)(?:\.txt)?\Z")


def save_prediction(directory, pred: Prediction, conjecture_line: str) -> Path:
    """One file per (conjecture, sample): conjecture line first, then premises."""
    path = Path(directory) / prediction_filename(pred.conjecture_name, pred.sample_index)
    body = "\n".join([conjecture_line] + [" ".join(line) for line in pred.lines])
    path.write_text(body + "\n", encoding="utf-8")
    return path


def load_predictions(directory) -> list[Prediction]:
    """Read every prediction file in a directory (sorted for determinism)."""
    preds = []
    for path in sorted(Path(directory).iterdir()):
        if not path.is_file():
            continue
        m = _PREDICTION_NAME_RE.match(path.name)
        if not m:
            continue
        lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
        premise_lines = tuple(tuple(ln.split()) for ln in lines[1:])
        preds.append(Prediction(m.group(1), int(m.group(2)), premise_lines))
    return preds


def write_records_csv(path, records: list[ProblemRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "conjecture",
                "sample",
                "known",
                "new",
                "unparsable",
                "self_premise",
                "has_new",
                "verdict",
                "unknown_reason",
                "single_premise",
                "used_premises",
            ]
        )
        for r in records:
            writer.writerow(
                [
                    r.conjecture_name,
                    r.sample_index,
                    r.n_known,
                    r.n_new,
                    r.n_unparsable,
                    int(r.self_premise),
                    int(r.has_new),
                    r.verdict,
                    r.unknown_reason,
                    int(r.single_premise),
                    ";".join(r.used_premises),
                ]
            )
