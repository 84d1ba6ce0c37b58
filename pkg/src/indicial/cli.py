"""Command line front end: ``indicial <command> pencil.json``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

import numpy as np

from . import __version__
from .corpus import random_unimodular, tau_star
from .errors import IndicialError, NumericalError, PreconditionError, ValidationError
from .extensions import (
    boundary_expansion,
    build_quotient,
    construct_invariant_selfadjoint,
    deficiency_indices,
    friedrichs_subspace,
    krein_subspace,
    semibounded_check,
    sign_condition,
)
from .forms import local_pairing, total_signature
from .germs import germ_from_log_coeffs, kernel_space, log_coeffs_from_germ
from .numerics import Tolerances
from .oracle import CutoffSpec, QuasiPolynomial, mellin_numeric, pairing_direct
from .pencil import PencilSpec, load_pencil, pencil_to_dict, poly_mul, shift_poly, trim
from .roots import boundary_spectrum, minimal_domain_flag
from .spectralflow import sf_at_root

REPORT_VERSION = 1
COMMANDS = ("roots", "classify", "sf", "extensions", "verify", "all")
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_PRECONDITION = 0, 2, 3, 4
VERIFY_RTOL = 1e-6


# -- serialization ------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError("non-finite number in report")
    s = format(x, ".17g")
    return s if ("." in s or "e" in s) else s + ".0"


def to_json(obj, indent: int = 0) -> str:
    """JSON text with floats written to 17 significant digits."""
    pad, inner = " " * indent, " " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([float(obj.real), float(obj.imag)], indent)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{to_json(str(k))}: {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, complex, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + to_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)}")


def _c(z) -> list:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


def _vec(v) -> list:
    return [_c(z) for z in np.asarray(v).reshape(-1)]


# -- report sections -------------------------------------------------------------------


class Analysis:
    def __init__(self, p: PencilSpec, tol: Tolerances, window: Optional[float], samples: int, seed: int):
        self.p, self.tol, self.window, self.samples, self.seed = p, tol, window, samples, seed
        self.roots = boundary_spectrum(p, tol, window)
        self._Q = None

    @property
    def Q(self):
        if self._Q is None:
            self._Q = build_quotient(self.p, self.tol, roots=self.roots)
        return self._Q

    def roots_section(self) -> dict:
        rows = []
        for r in self.roots:
            row = {"sigma0": _c(r.sigma0), "alg_mult": r.alg_mult, "band": r.band, "star_partner": r.star_partner}
            if r.in_strip:
                k = self.Q.root_index(r.sigma0)
                row["partial_mults"] = list(self.Q.germs[k].partial_mults)
            rows.append(row)
        return {
            "roots": rows,
            "minimal_domain": minimal_domain_flag(self.roots),
            "quotient_dim": self.Q.dim,
            "warnings": list(self.Q.warnings),
        }

    def classify_section(self) -> dict:
        Q = self.Q
        crit = []
        for k, ana in Q.critical.items():
            inv = ana.invariants
            crit.append(
                {
                    "sigma0": _c(inv.sigma0),
                    "partial_mults": list(inv.partial_mults),
                    "m0": list(inv.m0),
                    "m_plus": list(inv.m_plus),
                    "m_minus": list(inv.m_minus),
                    "signature_contribution": inv.signature_contribution,
                    "normal_form": [list(b) for b in ana.normal_form.blocks],
                }
            )
        return {
            "critical_roots": crit,
            "signature": total_signature(a.invariants for a in Q.critical.values()),
            "deficiency_indices": list(deficiency_indices(Q)),
            "sign_condition": sign_condition(Q),
            "semibounded": semibounded_check(self.p, self.tol, self.samples, Q=Q),
        }

    def sf_section(self) -> dict:
        flows = [sf_at_root(self.p, r.sigma0, self.tol, self.roots) for r in self.roots if r.band == "critical"]
        return {
            "spectral_flow": [{"sigma0": _c(f.sigma0), "delta": f.delta, "eps0": f.eps0, "sf": f.sf} for f in flows],
            "sf_total": sum(f.sf for f in flows),
        }

    def _expansion(self, D) -> list:
        return [
            [{"sigma0": _c(s), "log_coeffs": [_vec(e) for e in es]} for s, es in terms]
            for terms in boundary_expansion(self.Q, D)
        ]

    def extensions_section(self) -> tuple[dict, list]:
        out, errors = {}, []
        for name, build in (
            ("friedrichs", friedrichs_subspace),
            ("krein", krein_subspace),
            ("invariant_selfadjoint", lambda Q: construct_invariant_selfadjoint(Q, self.seed)),
        ):
            try:
                D = build(self.Q)
                out[name] = {"dim": D.dim, "basis": self._expansion(D)}
            except PreconditionError as exc:
                out[name] = {"error": type(exc).__name__, "message": str(exc)}
                errors.append(exc)
        return out, errors

    def verify_section(self) -> dict:
        checks = []
        Q, p = self.Q, self.p

        def record(name, value, reference, atol=0.0):
            value, reference = complex(value), complex(reference)
            err = abs(value - reference) / max(abs(reference), 1.0)
            checks.append(
                {"check": name, "value": _c(value), "reference": _c(reference), "rel_error": err, "pass": bool(err <= VERIFY_RTOL)}
            )

        basis = Q.basis
        cut_a, cut_b = CutoffSpec.for_degree(p.mu), CutoffSpec.for_degree(p.mu, 0.3, 0.9)
        for i, u in enumerate(basis):
            for j, v in enumerate(basis):
                ref = local_pairing(p, u, v)
                U = QuasiPolynomial.from_log_coeffs(log_coeffs_from_germ(u), cut_a)
                V = QuasiPolynomial.from_log_coeffs(log_coeffs_from_germ(v), cut_a)
                direct = pairing_direct(p, U, V)
                record(f"pairing[{i},{j}]", direct, ref)
                U2 = QuasiPolynomial.from_log_coeffs(log_coeffs_from_germ(u), cut_b)
                V2 = QuasiPolynomial.from_log_coeffs(log_coeffs_from_germ(v), cut_b)
                record(f"pairing_cutoff_independence[{i},{j}]", pairing_direct(p, U2, V2), direct)
        for i, u in enumerate(basis):
            lc = log_coeffs_from_germ(u)
            sigma = u.sigma0 + 0.7 + 0.5j
            s = sigma - u.sigma0
            ref = sum(germ_from_log_coeffs(lc).f[l] * s ** (-(l + 1)) for l in range(u.L))
            got = mellin_numeric(QuasiPolynomial.from_log_coeffs(lc, CutoffSpec.indicator()), sigma)
            for c in range(p.n):
                record(f"mellin[{i}][{c}]", got[c], ref[c])
        flows = {}
        for k, ana in Q.critical.items():
            f = sf_at_root(p, Q.roots[k].sigma0, self.tol, self.roots)
            flows[k] = f.sf
            record(f"sf_vs_signature[{k}]", f.sf, ana.invariants.signature_contribution)
        npl, nm = deficiency_indices(Q)
        record("deficiency_vs_sf", npl - nm, sum(flows.values()))
        # randomized congruence self-test
        rng = np.random.default_rng(self.seed)
        U = random_unimodular(rng, p.n, 1 if p.mu <= 2 and p.n > 1 else 0)
        q = shift_poly(p.coeffs, -0.5j * p.m)
        p2 = PencilSpec.from_tau(trim(poly_mul(poly_mul(tau_star(U), q), U)), p.m)
        A2 = Analysis(p2, self.tol, self.window, self.samples, self.seed)
        inv1 = sorted((complex(a.invariants.sigma0).real, a.normal_form.blocks) for a in Q.critical.values())
        inv2 = sorted((complex(a.invariants.sigma0).real, a.normal_form.blocks) for a in A2.Q.critical.values())
        same = [b for _, b in inv1] == [b for _, b in inv2] and deficiency_indices(A2.Q) == (npl, nm)
        record("congruence_invariance", 1.0 if same else 0.0, 1.0)
        return {"verification": checks, "all_passed": all(c["pass"] for c in checks)}


def _tolerances(args) -> Tolerances:
    base = Tolerances()
    return Tolerances(
        rank_rel=args.tol_rank if args.tol_rank is not None else base.rank_rel,
        zero_eig_abs=args.tol_zero if args.tol_zero is not None else base.zero_eig_abs,
        root_cluster=base.root_cluster,
        line_snap=base.line_snap,
    )


def _tol_dict(tol: Tolerances) -> dict:
    return {"rank_rel": tol.rank_rel, "zero_eig_abs": tol.zero_eig_abs, "root_cluster": tol.root_cluster, "line_snap": tol.line_snap}


def run(command: str, path: str, args) -> tuple[int, dict]:
    report: dict = {"report_version": REPORT_VERSION, "command": command}
    try:
        tol = _tolerances(args)
        p = load_pencil(path, tol)
        report["pencil"] = pencil_to_dict(p)
        report["tolerances"] = _tol_dict(tol)
        A = Analysis(p, tol, args.window, args.samples, args.seed)
        report.update(A.roots_section())
        if command in ("classify", "all"):
            report.update(A.classify_section())
        if command in ("sf", "all"):
            report.update(A.sf_section())
        code = EXIT_OK
        if command in ("extensions", "all"):
            ext, errors = A.extensions_section()
            report["extensions"] = ext
            if errors:
                code = EXIT_PRECONDITION
        if command in ("verify", "all"):
            report.update(A.verify_section())
            if not report["all_passed"]:
                code = max(code, EXIT_NUMERICAL)
        return code, report
    except (ValidationError, OSError, ValueError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return EXIT_VALIDATION, report
    except NumericalError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return EXIT_NUMERICAL, report
    except PreconditionError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return EXIT_PRECONDITION, report
    except IndicialError as exc:  # pragma: no cover - all errors belong to a group
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return EXIT_NUMERICAL, report


def format_text(report: dict) -> str:
    lines = [f"indicial report ({report['command']})"]
    if "error" in report:
        lines.append(f"error: {report['error']['type']}: {report['error']['message']}")
        return "\n".join(lines)
    pen = report["pencil"]
    lines.append(f"pencil: n={pen['n']} mu={pen['mu']} m={pen['m']}")
    lines.append("roots:")
    for r in report["roots"]:
        z = complex(*r["sigma0"])
        extra = f" partial_mults={r['partial_mults']}" if "partial_mults" in r else ""
        lines.append(f"  {z.real:+.10g} {z.imag:+.10g}i  mult={r['alg_mult']}  {r['band']}{extra}")
    lines.append(f"quotient dim: {report['quotient_dim']}   minimal domain flag: {report['minimal_domain']}")
    for w in report["warnings"]:
        lines.append(f"warning: {w}")
    if "signature" in report:
        for c in report["critical_roots"]:
            z = complex(*c["sigma0"])
            lines.append(f"critical root {z.real:+.10g}: blocks (size, +, -) = {c['normal_form']}")
        lines.append(f"signature: {report['signature']}")
        lines.append(f"deficiency indices: {tuple(report['deficiency_indices'])}")
        lines.append(f"sign condition: {report['sign_condition']}   semibounded: {report['semibounded']}")
    if "sf_total" in report:
        lines.append(f"spectral flow: {report['sf_total']}")
    if "extensions" in report:
        for name, ext in report["extensions"].items():
            if "error" in ext:
                lines.append(f"{name}: unavailable ({ext['error']})")
            else:
                lines.append(f"{name}: dim {ext['dim']}")
                for vec in ext["basis"]:
                    parts = []
                    for term in vec:
                        s = complex(*term["sigma0"])
                        parts.append(f"x^(i({s.real:+.6g}{s.imag:+.6g}i)) with {len(term['log_coeffs']) - 1} log powers")
                    lines.append("    " + "; ".join(parts))
    if "verification" in report:
        bad = [c for c in report["verification"] if not c["pass"]]
        lines.append(f"verification: {len(report['verification']) - len(bad)}/{len(report['verification'])} checks passed")
        for c in bad:
            lines.append(f"  FAILED {c['check']}: rel error {c['rel_error']:.3g}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="indicial", description="Boundary spectrum and extension analysis of symmetric indicial families.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("pencil", help="pencil JSON file")
    ap.add_argument("--tol-rank", type=float, default=None, help="relative singular value cutoff")
    ap.add_argument("--tol-zero", type=float, default=None, help="absolute zero-eigenvalue cutoff")
    ap.add_argument("--window", type=float, default=None, help="bound on |Re sigma| for root search")
    ap.add_argument("--samples", type=int, default=201, help="critical-line samples for the positivity check")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized self-tests")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    code, report = run(args.command, args.pencil, args)
    out = to_json(report) if args.fmt == "json" else format_text(report)
    sys.stdout.write(out + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
