"""``outer-rates`` command line."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .intpoly import (IRREDUCIBLE, UNKNOWN, IntPolynomial, P, Q, certify_irreducible, char_poly,
                      poly_family, table1_audit)
from .words import VARIANTS, ParameterError, Word, family_pair, is_inverse_pair, phi_family, printed_inverse

log = logging.getLogger("outer_rates")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3
PASS, FAIL, UNVERIFIED = "PASS", "FAIL", "UNVERIFIED"
DYNAMICS_CAP = 10**6  # letters per word for materialized (non-positive) trajectories


# --- output -------------------------------------------------------------------------

def _clean(obj):
    """Round floats to 15 significant digits and make everything JSON-native."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.15g}")
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (Word, IntPolynomial)):
        return str(obj)
    return obj


def dumps(doc, compact: bool = False) -> str:
    if compact:
        return json.dumps(_clean(doc), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return json.dumps(_clean(doc), sort_keys=True, indent=2, ensure_ascii=False)


def _tsv(rows) -> str:
    return "".join("\t".join(str(_clean(x)) for x in row) + "\n" for row in rows)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- argument parsing -------------------------------------------------------------------

def parse_int_list(text: str) -> list[int]:
    """``"10"``, ``"10,100"`` or ``"3..20"`` (inclusive)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {text!r}")
    return out


def _int_list(text):
    try:
        return parse_int_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=_int_list, default=[3], help="rank (list or range allowed)")
    common.add_argument("--k", type=_int_list, default=[10], help="k, e.g. 10 or 10,100 or 3..20")
    common.add_argument("--format", choices=("json", "tsv", "svg"), default="json")
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--window", type=int, default=4)
    common.add_argument("--iters", type=int, default=12)
    common.add_argument("--p-max", type=int, default=50, dest="p_max")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--which", choices=(P, Q), default=None)
    common.add_argument("--variant", choices=VARIANTS, default="printed",
                        help="g is the printed map (default) or the exact inverse of phi_k")

    parser = argparse.ArgumentParser(prog="outer-rates", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("family", parents=[common], help="the automorphisms, matrices and polynomials")
    sub.add_parser("poly", parents=[common], help="p_k / q_k and irreducibility certificates")
    r = sub.add_parser("roots", parents=[common], help="root report and spectral ratio")
    r.add_argument("--poly", help="explicit polynomial, e.g. 'x^3 - 10*x^2 - 1'")
    sub.add_parser("verify", parents=[common], help="check every claim for (N, k)")
    t = sub.add_parser("table", parents=[common], help="audit the mod-p irreducibility table")
    t.add_argument("--Ns", type=_int_list, default=None)
    sub.add_parser("traintrack", parents=[common], help="gates, turns, Whitehead graphs")
    sub.add_parser("axes", parents=[common], help="axis separation grid")
    sub.add_parser("dynamics", parents=[common], help="projective convergence rates")
    pl = sub.add_parser("plot", parents=[common], help="SVG figures")
    pl.add_argument("--figure", choices=("poly", "roots"), default="poly")
    pl.add_argument("--poly", help="explicit polynomial for --figure roots")
    pl.add_argument("--xlim", type=float, nargs=2, default=(-12.0, 12.0))
    pl.add_argument("--ylim", type=float, nargs=2, default=(-1000.0, 1000.0))
    return parser


# --- subcommands -------------------------------------------------------------------------

def cmd_family(N: int, k: int, args) -> tuple[dict, bool]:
    from .traintrack import GraphMap, transition_matrix

    phi, inv = phi_family(N, k)
    g, g_inv = printed_inverse(N, k)
    A = transition_matrix(GraphMap.from_automorphism(phi))
    B = transition_matrix(GraphMap.from_automorphism(g))
    B_exact = transition_matrix(GraphMap.from_automorphism(inv))
    doc = {
        "N": N, "k": k,
        "phi": {key: Word.parse(v, N).compact() for key, v in phi.to_json().items()},
        "phi_inverse": {key: Word.parse(v, N).compact() for key, v in inv.to_json().items()},
        "printed_map_g": {key: Word.parse(v, N).compact() for key, v in g.to_json().items()},
        "inverse_check": is_inverse_pair(phi, inv),
        "printed_map_inverts_phi": is_inverse_pair(phi, g),
        "A": A, "B": B, "B_exact_inverse": B_exact,
        "char_poly_A": str(char_poly(A)), "char_poly_B": str(char_poly(B)),
        "char_poly_B_exact_inverse": str(char_poly(B_exact)),
    }
    return doc, True


def _family_tsv(doc) -> str:
    rows = []
    for name in ("A", "B", "B_exact_inverse"):
        rows.append([f"# {name}", f"N={doc['N']}", f"k={doc['k']}"])
        rows.extend(doc[name])
    return _tsv(rows)


def cmd_poly(N: int, k: int, args) -> tuple[dict, bool]:
    doc = {"N": N, "k": k}
    for which in ([args.which] if args.which else [P, Q]):
        f = poly_family(N, k, which)
        cert = certify_irreducible(N, k, which, args.p_max)
        doc[which] = {"polynomial": str(f), "coefficients_descending": f.descending(),
                      "certificate": cert.to_json(), "recheck": cert.recheck(f)}
    return doc, True


def cmd_roots(N: int, k: int, args, poly: IntPolynomial | None = None) -> tuple[dict, bool]:
    from .roots import root_report, spectral_ratio

    targets = [("poly", poly)] if poly is not None else \
        [(w, poly_family(N, k, w)) for w in ([args.which] if args.which else [P, Q])]
    doc = {} if poly is not None else {"N": N, "k": k}
    for name, f in targets:
        rep = root_report(f, args.tol).to_json()
        if f.degree >= 2:
            rep["spectral"] = spectral_ratio(f, args.tol).to_json()
        doc[name] = rep
    return doc, True


def _claim(name, status, **detail) -> dict:
    if isinstance(status, (bool, np.bool_)):
        status = PASS if status else FAIL
    return {"name": name, "status": status, "detail": detail}


def cmd_verify(N: int, k: int, args) -> tuple[dict, bool]:
    from .outer_geometry import axis_data, axis_distance_formula, lipschitz_distance
    from .roots import family_spectral_ratio, verify_root_lemma
    from .traintrack import (family_maps, gates, is_primitive, is_train_track,
                             local_whitehead_graph, pf_eigen, transition_matrix, MATRIX_CONVENTION)

    claims = []
    for lc in verify_root_lemma(N, k, args.which):
        claims.append(_claim(lc.name, lc.passed, **lc.witness))
    for which in ([args.which] if args.which else [P, Q]):
        cert = certify_irreducible(N, k, which, args.p_max)
        status = PASS if cert.verdict == IRREDUCIBLE and cert.recheck(poly_family(N, k, which)) else \
            (UNKNOWN if cert.verdict == UNKNOWN else FAIL)
        claims.append(_claim(f"{which.lower()}_irreducible", status, **cert.to_json()))
        sr = family_spectral_ratio(N, k, which)
        if which == P:
            claims.append(_claim("spectral_ratio_p_at_least_k", sr.ratio_interval[0] >= k,
                                 ratio=sr.ratio, interval=list(sr.ratio_interval)))
        else:
            bound = 1 + 1 / math.sqrt(k)
            claims.append(_claim("spectral_ratio_q_at_most_1_plus_inv_sqrt_k",
                                 sr.ratio_interval[1] <= bound, ratio=sr.ratio,
                                 interval=list(sr.ratio_interval), bound=bound))
    f, g = family_maps(N, k, args.variant)
    A, B = transition_matrix(f), transition_matrix(g)
    claims.append(_claim("char_poly_A_is_p", char_poly(A) == poly_family(N, k, P),
                         char_poly=str(char_poly(A))))
    if args.variant == "printed":
        claims.append(_claim("char_poly_B_is_q", char_poly(B) == poly_family(N, k, Q),
                             char_poly=str(char_poly(B))))
    for name, m in (("f", f), ("g", g)):
        ok, wit = is_train_track(m)
        claims.append(_claim(f"train_track_{name}", ok, witness=list(wit) if wit else None))
    gf = gates(f)
    claims.append(_claim("gates_f_positive_directions_collapse",
                         gf == sorted([list(range(1, N + 1))] + [[-i] for i in range(1, N + 1)]),
                         gates=gf))
    gg = gates(g)
    # the printed map pairs A_i with a_{i+2}; the exact inverse pairs A_i with a_{i-1}
    shift, label = (1, "i_plus_2") if args.variant == "printed" else (-2, "i_minus_1")
    expected = sorted(sorted([-i, (i + shift) % N + 1]) for i in range(1, N + 1))
    claims.append(_claim(f"gates_g_pair_inverse_i_with_{label}", gg == expected, gates=gg))
    for name, m in (("f", f), ("g", g)):
        claims.append(_claim(f"whitehead_{name}_connected", local_whitehead_graph(m).connected))
    for name, M in (("A", A), ("B", B)):
        ok, power = is_primitive(M)
        claims.append(_claim(f"primitive_{name}", ok, power=power, convention=MATRIX_CONVENTION))
    claims.append(_claim("nielsen_paths", UNVERIFIED, reason="periodic Nielsen paths are not searched"))
    try:
        data = axis_data(N, k, args.variant)
        lam, lb = data.lam, data.lam_bar
        ea, eb = pf_eigen(A, pivot=N - 1), pf_eigen(B, pivot=0)
        ok_a = max(abs(ea.vector[i] / lam ** (N - 1 - i) - 1) for i in range(N)) <= 1e-9
        ok_b = max(abs(eb.vector[i] / lb ** i - 1) for i in range(N)) <= 1e-9
        claims.append(_claim("pf_vector_A_powers_of_lambda", ok_a, value=ea.value, residual=ea.residual))
        claims.append(_claim("pf_vector_B_powers_of_lambda_bar", ok_b, value=eb.value, residual=eb.residual))
        dxx = lipschitz_distance(data.X(0), data.X(1)).value
        dyy = lipschitz_distance(data.Y(0), data.Y(1)).value
        claims.append(_claim("d_X0_X1_is_log_lambda", abs(dxx - math.log(lam)) <= 1e-9, value=dxx))
        claims.append(_claim("d_Y0_Y1_is_log_lambda_bar", abs(dyy - math.log(lb)) <= 1e-9, value=dyy))
        form = axis_distance_formula(N, k, args.variant, data)
        dxy = lipschitz_distance(data.X0, data.Y0)
        claims.append(_claim("closed_form_matches_candidates", abs(form.value - dxy.value) <= 1e-9,
                             formula=form.value, candidates=dxy.value, witness=str(dxy.witness)))
        claims.append(_claim("closed_form_at_least_(N-1)log(k)-4", form.holds, **form.to_json()))
    except ArithmeticError as exc:
        claims.append(_claim("axis_data", FAIL, error=str(exc)))
    ok = all(c["status"] in (PASS, UNKNOWN, UNVERIFIED) for c in claims)
    return {"N": N, "k": k, "variant": args.variant, "claims": claims,
            "all_pass": ok}, ok


def cmd_traintrack(N: int, k: int, args) -> tuple[dict, bool]:
    from .traintrack import family_maps, full_irreducibility_report, gates, local_whitehead_graph, direction_name

    f, g = family_maps(N, k, args.variant)
    doc = full_irreducibility_report(N, k, args.variant).to_json()
    for name, m in (("f", f), ("g", g)):
        doc[f"gates_{name}"] = [[direction_name(d) for d in gate] for gate in gates(m)]
        doc[f"whitehead_{name}"] = local_whitehead_graph(m).to_json()
    return doc, True


def cmd_axes(N: int, k: int, args) -> tuple[dict, bool]:
    from .outer_geometry import axis_separation_report

    rep = axis_separation_report(N, k, args.window, args.variant)
    return rep.to_json(), True


def _axes_tsv(doc) -> str:
    idx = doc["indices"]
    rows = [["i\\j"] + idx]
    for i, row in zip(idx, doc["grid"]):
        rows.append([i] + row)
    return _tsv(rows)


def cmd_dynamics(N: int, k: int, args) -> tuple[dict, bool]:
    from .dynamics import RateError, iterate_lengths, power_rate, projective_rate
    from .roots import spectral_ratio
    from .traintrack import family_maps, transition_matrix

    phi, g = family_pair(N, k, args.variant)
    fm, gm = family_maps(N, k, args.variant)
    doc = {"N": N, "k": k, "iters": args.iters, "variant": args.variant, "rows": []}
    for name, aut, M in (("phi", phi, transition_matrix(fm)), ("g", g, transition_matrix(gm))):
        row = {"map": name}
        c = char_poly(M)
        sr = spectral_ratio(c if c.leading > 0 else -c)
        row["spectral_ratio"] = sr.ratio
        try:
            row["power_rate"] = power_rate(M).rho
        except (RateError, ValueError) as exc:
            row["power_rate"] = None
            row["power_rate_error"] = str(exc)
        traj = iterate_lengths(aut, n_max=args.iters, cap=DYNAMICS_CAP)
        row["trajectory_truncated"] = traj.truncated
        try:
            est = projective_rate(traj)
            row["projective_rate"] = est.rho
            row["dispersion"] = est.dispersion
        except RateError as exc:
            row["projective_rate"] = None
            row["projective_rate_error"] = str(exc)
        doc["rows"].append(row)
    return doc, True


def _dynamics_tsv(doc) -> str:
    keys = ["map", "spectral_ratio", "power_rate", "projective_rate"]
    return _tsv([keys] + [[r.get(key) for key in keys] for r in doc["rows"]])


def cmd_plot(args) -> str:
    from .roots import find_roots
    from .svg import polynomial_curves, root_scatter

    N = args.N[0]
    if args.figure == "poly":
        if args.poly:
            polys = [(args.poly, IntPolynomial.parse(args.poly))]
        elif args.which:
            polys = [(f"{args.which.lower()}_{k}", poly_family(N, k, args.which)) for k in args.k]
        elif len(args.k) == 2:
            # p for the first k, q for the second
            polys = [(f"p_{args.k[0]}", poly_family(N, args.k[0], P)),
                     (f"q_{args.k[1]}", poly_family(N, args.k[1], Q))]
        else:
            polys = [(f"{w.lower()}_{k}", poly_family(N, k, w)) for k in args.k for w in (P, Q)]
        return polynomial_curves(polys, tuple(args.xlim), tuple(args.ylim),
                                 title=f"N = {N}" if not args.poly else "")
    f = IntPolynomial.parse(args.poly) if args.poly else poly_family(N, args.k[0], args.which or P)
    z = [complex(v) for v in find_roots(f, args.tol)]
    z.sort(key=lambda c: (round(c.real, 9), round(c.imag, 9)))
    return root_scatter(z, title=str(f), label=f"{sum(abs(v) < 1 for v in z)} inside unit circle")


def cmd_table(args) -> tuple[dict, bool]:
    from .intpoly import PUBLISHED_TABLE

    Ns = args.Ns or [row[0] for row in PUBLISHED_TABLE]
    rows = table1_audit(Ns, args.p_max)
    return {"p_max": args.p_max, "rows": [r.to_json() for r in rows],
            "discrepant": [r.N for r in rows if r.status == "DISCREPANT"]}, True


def _table_tsv(doc) -> str:
    keys = ["N", "table_p", "table_residue", "status", "found_p", "found_residue", "note"]
    return _tsv([keys] + [[r[key] for key in keys] for r in doc["rows"]])


COMMANDS = {
    "family": (cmd_family, _family_tsv),
    "poly": (cmd_poly, None),
    "roots": (cmd_roots, None),
    "verify": (cmd_verify, None),
    "traintrack": (cmd_traintrack, None),
    "axes": (cmd_axes, _axes_tsv),
    "dynamics": (cmd_dynamics, _dynamics_tsv),
}


def _setup_logging():
    level = os.environ.get("OUTER_RATES_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def run(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "plot":
            if args.format not in ("svg", "json"):
                raise ParameterError("plot writes SVG")
            _emit(cmd_plot(args), args.out)
            return EXIT_OK
        if args.command == "table":
            doc, ok = cmd_table(args)
            _emit(_table_tsv(doc) if args.format == "tsv" else dumps(doc) + "\n", args.out)
            return EXIT_OK if ok else EXIT_FAIL
        if args.command == "roots" and getattr(args, "poly", None):
            doc, ok = cmd_roots(0, 0, args, IntPolynomial.parse(args.poly))
            _emit(dumps(doc) + "\n", args.out)
            return EXIT_OK
        func, tsv = COMMANDS[args.command]
        if args.format == "svg":
            raise ParameterError(f"{args.command} has no SVG output; use plot")
        if args.format == "tsv" and tsv is None:
            raise ParameterError(f"{args.command} has no TSV output")
        params = [(N, k) for N in args.N for k in args.k]
        docs, all_ok = [], True
        for N, k in params:
            t0 = time.perf_counter()
            doc, ok = func(N, k, args)
            log.info("%s N=%d k=%d done in %.2fs", args.command, N, k, time.perf_counter() - t0)
            docs.append(doc)
            all_ok = all_ok and ok
        if args.format == "tsv":
            text = "".join(tsv(d) for d in docs)
        elif len(docs) == 1:
            text = dumps(docs[0]) + "\n"
        else:
            summary = {"summary": {"command": args.command, "count": len(docs), "all_pass": all_ok,
                                   "failed": [[N, k] for (N, k), d in zip(params, docs)
                                              if d.get("all_pass") is False]}}
            text = "".join(dumps(d, compact=True) + "\n" for d in docs + [summary])
        _emit(text, args.out)
        return EXIT_OK if all_ok else EXIT_FAIL
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ArithmeticError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
