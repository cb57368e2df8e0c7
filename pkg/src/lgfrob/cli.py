"""Command-line interface: ``lgfrob <command> -n N "<laurent polynomial>"``.

Exit codes: 0 ok, 2 input error, 3 precondition failure (not convenient,
degenerate, not subdiagram, omega not generating), 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .hm import (GenerationFailure, check_wdvv, extended_primitive_map, germ_cubic_form, jacobi_cubic_form,
                 frobenius_manifold_from_deformation, germ_to_json, universal_choice, universal_good_deformation,
                 hm_extend, verify_extension)
from .jacobi import BasisMismatch, ReductionBudgetExceeded, monomial_basis
from .laurent import LaurentPoly, ParseError, format_poly, format_rational, parse_laurent, specialize
from .linalg import SingularSystem
from .newton import NotConvenient, is_nondegenerate, newton_polyhedron, subdiagram_monomials
from .oracle import OracleDidNotStabilize, jacobi_dim_bruteforce, spectrum_bruteforce
from .structure import (NotSubdiagram, StructureError, build_canonical_structure, build_good_maximal_deformation,
                        check_GC_global, classify_deformation, is_good, perturb_binf, primitive_map,
                        restriction_check, structure_to_json, verify_structure_relations)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_VERIFY = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    text: str
    n: int
    deform: str = "good-max"
    order: int = 6
    json: bool = False
    seed: int = 0
    trials: int = 32
    exact: bool = False
    budget: int = 10**6


class Precondition(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class VerificationFailed(Exception):
    pass


@dataclass
class Output:
    cfg: RunConfig
    doc: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)

    def put(self, key: str, value, text: str | None = None) -> None:
        self.doc[key] = value
        self.lines.append(f"{key}: {text if text is not None else value}")

    def emit(self, stream=None) -> None:
        stream = stream or sys.stdout
        if self.cfg.json:
            stream.write(json.dumps(self.doc, indent=2) + "\n")
        else:
            stream.write("\n".join(self.lines) + "\n")


def _exp(e) -> list[int]:
    return [int(a) for a in e]


def _rationals(vs) -> list[str]:
    return [format_rational(Fraction(v)) for v in vs]


def _checked_polynomial(cfg: RunConfig) -> LaurentPoly:
    f = parse_laurent(cfg.text, cfg.n)
    P = newton_polyhedron(f)
    if not P.origin_interior:
        raise Precondition("not-convenient", "origin is not an interior point of the Newton polyhedron")
    rep = is_nondegenerate(f, trials=cfg.trials, seed=cfg.seed, exact=cfg.exact)
    if not rep.ok:
        raise Precondition("degenerate" if rep.verdict == "DegenerateWitness" else "nondegeneracy-unknown",
                           f"{rep.verdict} on face {rep.face}: {rep.witness}")
    return f


def _deformation(cfg: RunConfig, f: LaurentPoly):
    basis = monomial_basis(f, cfg.budget)
    if cfg.deform == "good-max":
        return build_good_maximal_deformation(f, basis)
    gs = [parse_laurent(t.strip(), cfg.n) for t in cfg.deform.split(",") if t.strip()]
    if not gs:
        raise ParseError("empty deformation list", 0)
    return classify_deformation(f, gs, basis, check_good=False)


# commands -----------------------------------------------------------------

def cmd_analyze(cfg: RunConfig) -> Output:
    f = parse_laurent(cfg.text, cfg.n)
    P = newton_polyhedron(f)
    out = Output(cfg)
    out.put("polynomial", format_poly(f))
    out.put("vertices", [_exp(v) for v in sorted(P.vertices)])
    out.put("facets", [_rationals(fc.normal) for fc in P.facets],
            "; ".join(" ".join(_rationals(fc.normal)) for fc in P.facets))
    out.put("convenient", P.origin_interior)
    if not P.origin_interior:
        raise Precondition("not-convenient", "origin is not an interior point of the Newton polyhedron")
    rep = is_nondegenerate(f, trials=cfg.trials, seed=cfg.seed, exact=cfg.exact)
    out.put("nondegeneracy", rep.verdict)
    if not rep.ok:
        raise Precondition("degenerate", f"{rep.verdict} on face {rep.face}: {rep.witness}")
    basis = monomial_basis(f, cfg.budget)
    sub = subdiagram_monomials(P)
    out.put("mu", basis.mu)
    out.put("nu", len(sub))
    out.put("subdiagram_monomials", [_exp(e) for e in sub], " ".join(str(tuple(e)) for e in sub))
    out.put("basis", [_exp(e) for e in basis.monomials], " ".join(str(tuple(e)) for e in basis.monomials))
    out.put("spectrum", _rationals(basis.alphas), " ".join(_rationals(basis.alphas)))
    return out


def cmd_spectrum(cfg: RunConfig) -> Output:
    f = _checked_polynomial(cfg)
    basis = monomial_basis(f, cfg.budget)
    out = Output(cfg)
    out.put("mu", basis.mu)
    out.put("spectrum", _rationals(basis.alphas), " ".join(_rationals(basis.alphas)))
    return out


def cmd_structure(cfg: RunConfig) -> Output:
    f = _checked_polynomial(cfg)
    D = _deformation(cfg, f)
    S = build_canonical_structure(D)
    out = Output(cfg)
    doc = json.loads(structure_to_json(S))
    for key, value in doc.items():
        text = None
        if key in ("B0", "Binf", "g"):
            text = "\n" + _matrix_text(value)
        elif key == "C":
            text = "\n" + "\n".join(f"C{i + 1} =\n{_matrix_text(c)}" for i, c in enumerate(value))
        out.put(key, value, text)
    return out


def _matrix_text(rows) -> str:
    cells = [[str(v) for v in row] for row in rows]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  [" + ", ".join(c.rjust(width) for c in row) + "]" for row in cells)


def cmd_deform(cfg: RunConfig) -> Output:
    f = _checked_polynomial(cfg)
    D = _deformation(cfg, f)
    S = build_canonical_structure(D)
    out = Output(cfg)
    out.put("deformation", [format_poly(g) for g in D.gs], ", ".join(format_poly(g) for g in D.gs))
    out.put("injective", D.injective)
    out.put("maximal", D.maximal)
    out.put("lattice", D.surjective)
    good = is_good(S)
    out.put("good", good)
    out.put("primitive_map", [format_poly(LaurentPoly(S.r, p, "x")) for p in primitive_map(S).components],
            str(primitive_map(S)))
    gc = check_GC_global(S)
    out.put("generation_global", gc)
    if not gc:
        raise Precondition("generation", "omega does not generate over Q[x]; no semi-global extension")
    H = universal_good_deformation(S, cfg.order) if good else hm_extend(S, universal_choice(S), cfg.order)
    out.put("extra_variables", H.ell)
    chi = extended_primitive_map(H)
    out.put("extended_primitive_map", [_series_text(p, H.names()) for p in chi],
            "(" + ", ".join(_series_text(p, H.names()) for p in chi) + ")")
    rep = verify_extension(H)
    out.put("extended_relations", "pass" if rep.ok else rep.first_failure())
    if not rep.ok:
        raise VerificationFailed(rep.first_failure())
    return out


def _series_text(p: dict, names: Sequence[str]) -> str:
    if not p:
        return "0"
    terms = []
    for e, c in sorted(p.items(), key=lambda t: (sum(t[0]), [-a for a in t[0]])):
        mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(names, e) if k)
        coef = format_rational(Fraction(c))
        if not mono:
            terms.append(coef)
        elif c == 1:
            terms.append(mono)
        elif c == -1:
            terms.append("-" + mono)
        else:
            terms.append(f"{coef}*{mono}")
    return " + ".join(terms).replace("+ -", "- ")


def cmd_potential(cfg: RunConfig) -> Output:
    f = _checked_polynomial(cfg)
    D = _deformation(cfg, f)
    S = build_canonical_structure(D)
    if not check_GC_global(S):
        raise Precondition("generation", "omega does not generate over Q[x]; no semi-global extension")
    H = universal_good_deformation(S, cfg.order) if is_good(S) else hm_extend(S, universal_choice(S), cfg.order)
    G = frobenius_manifold_from_deformation(H)
    out = Output(cfg)
    doc = json.loads(germ_to_json(G))
    out.doc.update(doc)
    out.lines.append(f"flat coordinates: {' '.join(G.names)} (unit {G.names[G.unit_index]})")
    out.lines.append("charges: " + " ".join(doc["charges"]))
    out.lines.append("euler: " + " + ".join(f"({_series_text(p, G.names)})*d/d{t}" for p, t in zip(G.euler, G.names) if p))
    out.lines.append(f"potential through degree {G.N + 3}:")
    for e, c in sorted(G.potential.items(), key=lambda t: (sum(t[0]), [-a for a in t[0]])):
        out.lines.append(f"  {format_rational(c)}  {_series_text({e: 1}, G.names)}")
    return out


def cmd_verify(cfg: RunConfig) -> Output:
    f = _checked_polynomial(cfg)
    out = Output(cfg)
    checks: list[tuple[str, bool]] = []
    basis = monomial_basis(f, cfg.budget)
    P = newton_polyhedron(f)
    from .newton import milnor_number

    mu = milnor_number(P)
    checks.append(("milnor number equals basis size", mu == basis.mu))
    try:
        checks.append(("milnor number equals box-rank oracle", jacobi_dim_bruteforce(f).value == mu))
        checks.append(("spectrum equals graded-dimension oracle", spectrum_bruteforce(f) == list(basis.alphas)))
    except OracleDidNotStabilize:
        checks.append(("oracles stabilized", False))
    al = basis.alphas
    checks.append(("spectrum symmetric about n/2", all(al[i] + al[-1 - i] == f.n for i in range(len(al)))))
    D = _deformation(cfg, f)
    S = build_canonical_structure(D, verify=False)
    checks.append(("structure relations", verify_structure_relations(S).ok))
    checks.append(("perturbed B_inf is rejected", not verify_structure_relations(perturb_binf(S)).ok))
    rng = random.Random(cfg.seed)
    a = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(S.r)]
    rc = restriction_check(S, a)
    checks.append((f"restriction at a = ({', '.join(map(format_rational, a))})", rc.ok))
    Fa = specialize(D.F(), a)
    checks.append(("spectrum constant along the deformation", list(monomial_basis(Fa).alphas) == list(al)))
    if check_GC_global(S):
        H = universal_good_deformation(S, cfg.order) if is_good(S) else hm_extend(S, universal_choice(S), cfg.order)
        checks.append((f"extended relations through order {cfg.order}", verify_extension(H).ok))
        if H.nvars == S.mu:
            G = frobenius_manifold_from_deformation(H)
            checks.append((f"WDVV through order {cfg.order}", check_wdvv(G).ok))
            checks.append(("cubic terms match the Jacobi algebra", germ_cubic_form(G) == jacobi_cubic_form(S)))
    else:
        out.lines.append("SKIP  extension checks: omega does not generate over Q[x]")
    for name, ok in checks:
        out.lines.append(f"{'PASS' if ok else 'FAIL'}  {name}")
    out.doc["checks"] = [{"name": name, "passed": ok} for name, ok in checks]
    out.doc["passed"] = all(ok for _, ok in checks)
    if not out.doc["passed"]:
        out.emit()
        raise VerificationFailed("; ".join(name for name, ok in checks if not ok))
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "spectrum": cmd_spectrum,
    "structure": cmd_structure,
    "deform": cmd_deform,
    "potential": cmd_potential,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lgfrob", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("polynomial", help='Laurent polynomial, e.g. "u1+u2+u1^-1*u2^-1"')
    p.add_argument("-n", type=int, required=True, help="number of torus variables")
    p.add_argument("--deform", default="good-max", help='"good-max" or comma-separated subdiagram polynomials')
    p.add_argument("--order", type=int, default=6, help="truncation order of the extension")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=32, help="random primes for the probabilistic nondegeneracy test")
    p.add_argument("--exact", action="store_true", help="decide nondegeneracy over Q instead of modulo random primes")
    p.add_argument("--budget", type=int, default=10**6, help="reduction step budget")
    return p


def _error(cfg_json: bool, kind: str, message: str, code: int) -> int:
    if cfg_json:
        sys.stdout.write(json.dumps({"error": {"kind": kind, "message": message}}, indent=2) + "\n")
    else:
        sys.stderr.write(f"error ({kind}): {message}\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, args.polynomial, args.n, args.deform, args.order, args.json, args.seed,
                    args.trials, args.exact, args.budget)
    try:
        out = COMMANDS[cfg.command](cfg)
    except ParseError as exc:
        return _error(cfg.json, "parse", str(exc), EXIT_INPUT)
    except NotConvenient as exc:
        return _error(cfg.json, "not-convenient", str(exc), EXIT_PRECONDITION)
    except Precondition as exc:
        return _error(cfg.json, exc.kind, str(exc), EXIT_PRECONDITION)
    except NotSubdiagram as exc:
        return _error(cfg.json, "not-subdiagram", str(exc), EXIT_PRECONDITION)
    except GenerationFailure as exc:
        return _error(cfg.json, "generation", str(exc), EXIT_PRECONDITION)
    except VerificationFailed as exc:
        return _error(cfg.json, "verification", str(exc), EXIT_VERIFY)
    except BasisMismatch as exc:
        return _error(cfg.json, "degenerate", str(exc), EXIT_PRECONDITION)
    except (ReductionBudgetExceeded, OracleDidNotStabilize) as exc:
        return _error(cfg.json, "budget", str(exc), EXIT_PRECONDITION)
    except (StructureError, SingularSystem) as exc:
        return _error(cfg.json, "verification", str(exc), EXIT_VERIFY)
    except ValueError as exc:
        return _error(cfg.json, "input", str(exc), EXIT_INPUT)
    out.emit()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
