"""Command-line entry point: query holistic explanations from a JSON file.

Input schema (UTF-8 JSON)::

    {
      "models": [
        {"id": "a",
         "external_inputs": ["MRI"],
         "internal_inputs": [],
         "outputs": ["BA"],
         "prob": [{"output": "BA", "given": ["MRI"], "theta": 0.7}]},
        ...
      ],
      "links": [["a", "c"], ...]        // optional, cross-checked
    }

Reports go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 validation or precondition failure, 2 infeasible rules (the
conflicting rules are listed), 3 resource or convergence limits.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any

from .errors import (
    ConvergenceError,
    HolexError,
    InfeasibleSystemError,
    InputFormatError,
    ResourceLimitError,
    SystemValidationError,
)
from .oracle import oracle_extremal, sample_feasible
from .rules import compile_system
from .solver import Criterion, HolisticExplanation, explanation_constraints, holistic_explanation
from .system import Model, MultiModelSystem, ProbEntry, validate_system
from .worlds import DEFAULT_ATOM_CAP

_VERIFY_SAMPLES = 1000
_VERIFY_SEED = 0


def _expect(value: Any, kind: type, path: str) -> Any:
    names = {list: "array", dict: "object", str: "string"}
    if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
        raise InputFormatError(f"{path}: expected {names.get(kind, kind.__name__)}, "
                               f"got {type(value).__name__}")
    return value


def _atom_list(value: Any, path: str) -> tuple[str, ...]:
    _expect(value, list, path)
    out = []
    for i, item in enumerate(value):
        _expect(item, str, f"{path}[{i}]")
        out.append(item)
    return tuple(out)


def _parse_entry(raw: Any, path: str) -> ProbEntry:
    _expect(raw, dict, path)
    unknown = set(raw) - {"output", "given", "theta"}
    if unknown:
        raise InputFormatError(f"{path}: unknown field {sorted(unknown)[0]!r}")
    if "output" not in raw:
        raise InputFormatError(f"{path}: missing field 'output'")
    if "theta" not in raw:
        raise InputFormatError(f"{path}: missing field 'theta'")
    output = _expect(raw["output"], str, f"{path}.output")
    given = _atom_list(raw.get("given", []), f"{path}.given")
    theta = raw["theta"]
    if isinstance(theta, bool) or not isinstance(theta, (int, float)):
        raise InputFormatError(f"{path}.theta: expected number, got {type(theta).__name__}")
    try:
        return ProbEntry(output, given, float(theta))
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def _parse_model(raw: Any, path: str) -> Model:
    _expect(raw, dict, path)
    known = {"id", "external_inputs", "internal_inputs", "outputs", "prob"}
    unknown = set(raw) - known
    if unknown:
        raise InputFormatError(f"{path}: unknown field {sorted(unknown)[0]!r}")
    if "id" not in raw:
        raise InputFormatError(f"{path}: missing field 'id'")
    model_id = _expect(raw["id"], str, f"{path}.id")
    entries = []
    prob = raw.get("prob", [])
    _expect(prob, list, f"{path}.prob")
    for i, item in enumerate(prob):
        entries.append(_parse_entry(item, f"{path}.prob[{i}]"))
    try:
        return Model(
            id=model_id,
            external_inputs=_atom_list(raw.get("external_inputs", []),
                                       f"{path}.external_inputs"),
            internal_inputs=_atom_list(raw.get("internal_inputs", []),
                                       f"{path}.internal_inputs"),
            outputs=_atom_list(raw.get("outputs", []), f"{path}.outputs"),
            table=tuple(entries),
        )
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from exc


def load_system(path: str) -> MultiModelSystem:
    """Parse and validate a system description file.

    Every violation is rejected with a diagnostic naming the file
    location or field path.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc

    _expect(raw, dict, "top level")
    unknown = set(raw) - {"models", "links"}
    if unknown:
        raise InputFormatError(f"top level: unknown field {sorted(unknown)[0]!r}")
    if "models" not in raw:
        raise InputFormatError("top level: missing field 'models'")
    models_raw = _expect(raw["models"], list, "models")
    models = tuple(_parse_model(m, f"models[{i}]") for i, m in enumerate(models_raw))

    links = None
    if "links" in raw:
        links_raw = _expect(raw["links"], list, "links")
        parsed = []
        for i, pair in enumerate(links_raw):
            _expect(pair, list, f"links[{i}]")
            if len(pair) != 2:
                raise InputFormatError(f"links[{i}]: expected a pair of model ids")
            parsed.append((_expect(pair[0], str, f"links[{i}][0]"),
                           _expect(pair[1], str, f"links[{i}][1]")))
        links = tuple(parsed)

    try:
        system = MultiModelSystem(models, links)
    except ValueError as exc:
        raise InputFormatError(str(exc)) from exc
    report = validate_system(system)
    if report:
        raise SystemValidationError(report)
    return system


def _verify_extremal(cs, explanandum: str, direction: str, value: float, tol: float) -> dict:
    exact = oracle_extremal(cs, explanandum, direction)
    gap = abs(exact - value)
    return {
        "method": "vertex-enumeration",
        "oracle_value": exact,
        "difference": gap,
        "tolerance": tol,
        "ok": gap <= tol,
    }


def _verify_maxent(cs, entropy: float, tol: float) -> dict:
    samples = sample_feasible(cs, _VERIFY_SAMPLES, _VERIFY_SEED)
    best = max((s.entropy() for s in samples), default=float("-inf"))
    excess = best - entropy
    return {
        "method": f"entropy dominance over {len(samples)} sampled feasible points",
        "max_sampled_entropy": best,
        "excess": excess,
        "tolerance": tol,
        "ok": excess <= tol,
    }


def _report_dict(expl: HolisticExplanation, atoms: tuple[str, ...],
                 verify: dict | None) -> dict:
    worlds = []
    k = len(expl.pruned_language)
    for bits in range(1 << k):
        assignment = {a: bool((bits >> i) & 1) for i, a in enumerate(expl.pruned_language)}
        worlds.append({"assignment": assignment, "prob": float(expl.distribution.probs[bits])})
    out: dict[str, Any] = {
        "explanandum": expl.explanandum,
        "criterion": expl.criterion.value,
        "atoms": list(atoms),
        "worlds": worlds,
        "marginals": {a: expl.marginals[a] for a in expl.pruned_language},
        "objective": expl.objective,
        "entropy": expl.entropy,
        "pruned_language": list(expl.pruned_language),
        "feasible": True,
    }
    if verify is not None:
        out["verify"] = verify
    return out


def _render_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _render_table(report: dict) -> str:
    lines = []
    lines.append(f"holistic explanation for {report['explanandum']} "
                 f"(criterion: {report['criterion']})")
    lines.append(f"pruned language: {', '.join(report['pruned_language'])}")
    lines.append("")
    lines.append("world" + " " * 35 + "probability")
    ranked = sorted(enumerate(report["worlds"]),
                    key=lambda pair: (-pair[1]["prob"], pair[0]))
    for _, world in ranked:
        label = " ".join(f"{a}={int(v)}" for a, v in world["assignment"].items())
        lines.append(f"{label:<40}{world['prob']:.6g}")
    lines.append("")
    lines.append("marginals")
    for atom, value in report["marginals"].items():
        lines.append(f"{atom:<40}{value:.6g}")
    lines.append("")
    lines.append(f"objective Pr({report['explanandum']}) = {report['objective']:.6g}")
    lines.append(f"entropy = {report['entropy']:.6g} nats")
    if "verify" in report:
        verify = report["verify"]
        status = "OK" if verify["ok"] else "FAILED"
        lines.append(f"verify [{verify['method']}]: {status}")
    return "\n".join(lines) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's default exit code 2 clashes with ours
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="holex",
        description="Reconcile the probability tables of a multi-model system "
                    "into one consistent distribution for a final output.")
    parser.add_argument("--system", required=True, help="system description JSON file")
    parser.add_argument("--explanandum", required=True, help="final-output atom to explain")
    parser.add_argument("--criterion", required=True,
                        choices=[c.value for c in Criterion])
    parser.add_argument("--format", default="table", choices=["table", "json"])
    parser.add_argument("--max-atoms", type=int, default=DEFAULT_ATOM_CAP,
                        help=f"cap on enumerated atoms (default {DEFAULT_ATOM_CAP})")
    parser.add_argument("--no-pruning", action="store_true",
                        help="solve over the full language (testing only)")
    parser.add_argument("--verify", action="store_true",
                        help="cross-check against the brute-force oracle (small systems)")
    parser.add_argument("--tol", type=float, default=1e-6,
                        help="tolerance for --verify agreement (default 1e-6)")
    return parser


def run(argv=None) -> int:
    """Execute one query; returns the process exit code."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        system = load_system(ns.system)
        criterion = Criterion(ns.criterion)
        expl = holistic_explanation(
            system, ns.explanandum, criterion,
            prune=not ns.no_pruning, atom_cap=ns.max_atoms)
        verify = None
        if ns.verify:
            cs = explanation_constraints(
                system, ns.explanandum, prune=not ns.no_pruning, atom_cap=ns.max_atoms)
            if criterion is Criterion.LAPLACE:
                verify = _verify_maxent(cs, expl.entropy, ns.tol)
            else:
                direction = "max" if criterion is Criterion.OPTIMISTIC else "min"
                verify = _verify_extremal(cs, ns.explanandum, direction,
                                          expl.objective, ns.tol)
        atoms = compile_system(system).language
        report = _report_dict(expl, atoms, verify)
        text = _render_json(report) if ns.format == "json" else _render_table(report)
        sys.stdout.write(text)
        if verify is not None and not verify["ok"]:
            print("verify: oracle disagreement above tolerance", file=sys.stderr)
            return 3
        return 0
    except InfeasibleSystemError as exc:
        print(f"holex: infeasible: {exc}", file=sys.stderr)
        for rule in exc.core:
            print(f"holex:   conflicting rule: {rule}", file=sys.stderr)
        return 2
    except (ResourceLimitError, ConvergenceError) as exc:
        print(f"holex: {exc}", file=sys.stderr)
        return 3
    except HolexError as exc:
        print(f"holex: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
