"""Batch experiment runner.

Simple queries (classify, solve, obstruct, verify-coloring, omega, distance,
ring, weights, divstat, folner) take ordinary flags.  Experiment subcommands
(concentrate, tk, ldelta, probe-nonneg, correlate, levelset) read a flat
key=value description, either from --config or as positional tokens, checked
against a typed schema with unknown keys rejected.

Every run carries a deterministic id (content hash of the resolved spec);
reruns of an identical spec produce byte-identical output.  Floats print with
shortest round-trip formatting.  Exit codes: 0 ok, 2 usage, 3 resource cap,
4 internal invariant.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from typing import Callable, Sequence

from . import averaging, experiments, multfunc, quadrings, regularity
from .caps import CAPS
from .errors import DomainError, InvariantError, ResourceError
from .multfunc import TwistData, dirichlet_characters, function_from_name
from .quadforms import (
    BinaryQuadraticForm,
    construct_congruence_pair,
    hensel_lift,
    local_root_count,
    local_root_count_fast,
    parse_form,
    parse_linear_form,
    partner_prime_sets,
)


# --------------------------------------------------------------------------
# spec handling
# --------------------------------------------------------------------------


def parse_kv_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"expected key = value, got {line!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def resolve_spec(subcommand: str, schema: dict, raw: dict[str, str]) -> tuple[dict, str, str]:
    """Coerce raw strings against the schema.

    Returns (typed values, canonical spec text, run id).  Unknown keys and
    missing required keys are usage errors.
    """
    unknown = set(raw) - set(schema)
    if unknown:
        raise DomainError(f"unknown keys for {subcommand}: {sorted(unknown)}")
    values: dict = {}
    canonical_items = []
    for key in sorted(schema):
        coerce, default = schema[key]
        if key in raw:
            text = raw[key]
        elif default is None:
            raise DomainError(f"{subcommand} requires {key}=")
        else:
            text = default
        values[key] = coerce(text)
        canonical_items.append(f"{key} = {text}")
    canonical = subcommand + "\n" + "\n".join(canonical_items) + "\n"
    run_id = hashlib.sha256(canonical.encode()).hexdigest()[:16]
    return values, canonical, run_id


def _t_int(s: str) -> int:
    return int(s)


def _t_float(s: str) -> float:
    return float(s)


def _t_str(s: str) -> str:
    return s


def _t_form(s: str) -> BinaryQuadraticForm:
    return parse_form(s)


def _t_func(s: str):
    return function_from_name(s)


def _t_complex(s: str) -> complex:
    return complex(s)


def _t_int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _t_chi(s: str):
    """Character literal q:index."""
    q, idx = s.split(":")
    return dirichlet_characters(int(q))[int(idx)]


def _t_factors(s: str) -> list[tuple]:
    """liouville@[1,0];liouville@[0,1]"""
    out = []
    for item in s.split(";"):
        if not item.strip():
            continue
        fname, lform = item.split("@")
        out.append((function_from_name(fname.strip()), parse_linear_form(lform.strip())))
    return out


def _t_region(s: str):
    if not s.strip():
        return experiments.FULL_QUADRANT
    planes = []
    for item in s.split(";"):
        u, v = (int(x) for x in item.split(","))
        planes.append((u, v))
    return experiments.RegionSpec(tuple(planes))


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _jsonable(value):
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def emit(rows: list[dict], fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = "\n".join(json.dumps(_jsonable(r), sort_keys=True) for r in rows) + "\n"
    else:
        buf = io.StringIO()
        fields: list[str] = []
        for r in rows:
            for k in r:
                if k not in fields:
                    fields.append(k)
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            flat = {}
            for k, v in r.items():
                if isinstance(v, complex):
                    flat[k] = repr(v.real) + "+" + repr(v.imag) + "j"
                elif isinstance(v, float):
                    flat[k] = repr(v)
                elif isinstance(v, (dict, list, tuple)):
                    flat[k] = json.dumps(_jsonable(v), sort_keys=True)
                else:
                    flat[k] = v
            writer.writerow(flat)
        text = buf.getvalue()
    if out_path:
        directory = os.path.dirname(os.path.abspath(out_path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qpairs-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, out_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# experiment schemas and handlers
# --------------------------------------------------------------------------

SCHEMAS: dict[str, dict] = {
    "concentrate": {
        "form": (_t_form, None),
        "f": (_t_func, None),
        "chi": (_t_chi, "1:0"),
        "t": (_t_float, "0"),
        "q": (_t_int, None),
        "a": (_t_int, "1"),
        "b": (_t_int, "0"),
        "c": (_t_int, "1"),
        "k": (_t_int, None),
        "n": (_t_int, None),
    },
    "tk": {
        "form": (_t_form, None),
        "q": (_t_int, None),
        "a": (_t_int, "1"),
        "b": (_t_int, "0"),
        "c": (_t_int, "1"),
        "k": (_t_int, None),
        "n": (_t_int, None),
        "h_primes": (_t_int_list, None),
        "h_value": (_t_complex, "1"),
    },
    "ldelta": {
        "f": (_t_func, None),
        "p1": (_t_form, None),
        "p2": (_t_form, None),
        "delta": (_t_float, "0.3"),
        "q": (_t_int, "1"),
        "a": (_t_int, "1"),
        "b": (_t_int, "0"),
        "n": (_t_int, None),
        "mode": (_t_str, "weighted"),
    },
    "probe-nonneg": {
        "f": (_t_func, None),
        "p1": (_t_form, None),
        "p2": (_t_form, None),
        "delta": (_t_float, "0.1"),
        "k": (_t_int, "2"),
        "n": (_t_int, None),
    },
    "correlate": {
        "factors": (_t_factors, None),
        "g": (_t_func, "principal"),
        "form": (_t_form, None),
        "region": (_t_region, ""),
        "q": (_t_int, "1"),
        "a": (_t_int, "0"),
        "b": (_t_int, "0"),
        "n": (_t_int, None),
    },
    "levelset": {
        "f": (_t_func, None),
        "arc": (_t_float, None),
        "p1": (_t_form, None),
        "p2": (_t_form, None),
        "kmax": (_t_int, "500"),
        "mnmax": (_t_int, "60"),
        "lmax": (_t_int, "40"),
    },
}


def run_experiment(sub: str, values: dict, run_id: str, threads: int) -> list[dict]:
    if sub == "concentrate":
        twist = TwistData(values["t"], values["chi"])
        setup = experiments.concentration_setup(
            values["form"], values["f"], twist, values["q"], values["a"], values["b"],
            values["c"], values["k"], values["n"],
        )
        g = experiments.concentration_exponent_form(
            values["form"], values["f"], twist, values["k"], values["n"]
        )
        g_linear = experiments.concentration_exponent(
            values["f"], twist, values["k"], values["n"]
        )
        lhs = experiments.concentration_lhs(setup, threads)
        return [{
            "run_id": run_id, "quantity": "concentration_deviation_mean",
            "lhs": lhs, "exponent": g, "exponent_linear": g_linear,
            "n": values["n"], "k": values["k"],
        }]
    if sub == "tk":
        setup = experiments.concentration_setup(
            values["form"], multfunc.one(), experiments.principal_twist(),
            values["q"], values["a"], values["b"], values["c"], values["k"], values["n"],
        )
        h = multfunc.additive_from_prime_values(
            {p: values["h_value"] for p in values["h_primes"]}
        )
        rep = experiments.turan_kubilius_variance(setup, h)
        return [{
            "run_id": run_id, "quantity": "additive_variance",
            "variance": rep.variance, "predicted_mean": rep.predicted_mean,
            "dist_sq_low": rep.dist_sq_low, "dist_sq_high": rep.dist_sq_high,
            "k_term": rep.k_term,
        }]
    if sub == "ldelta":
        if values["mode"] == "pair":
            val = experiments.pair_correlation(
                values["f"], values["p1"], values["p2"],
                values["q"], values["a"], values["b"], values["n"], threads,
            )
            quantity = "pair_correlation"
        else:
            val = experiments.weighted_pair_average(
                values["f"], values["p1"], values["p2"], values["delta"],
                values["q"], values["a"], values["b"], values["n"], threads,
            )
            quantity = "weighted_pair_average"
        return [{
            "run_id": run_id, "quantity": quantity, "value": val,
            "abs": abs(val), "n": values["n"],
        }]
    if sub == "probe-nonneg":
        val = experiments.nonnegativity_probe(
            values["f"], values["p1"], values["p2"], values["delta"],
            values["k"], values["n"], threads,
        )
        return [{
            "run_id": run_id, "quantity": "folner_mean_real_part",
            "value": val, "k": values["k"], "n": values["n"],
        }]
    if sub == "correlate":
        val = experiments.correlation_probe(
            values["factors"], values["g"], values["form"], values["region"],
            values["q"], values["a"], values["b"], values["n"], threads,
        )
        return [{
            "run_id": run_id, "quantity": "correlation_mean",
            "value": val, "abs": abs(val), "n": values["n"],
        }]
    if sub == "levelset":
        spec = experiments.LevelSetSpec(values["f"], values["arc"], values["lmax"])
        hit = experiments.level_set_search(
            spec, values["p1"], values["p2"], values["kmax"], values["mnmax"]
        )
        if hit is None:
            return [{"run_id": run_id, "quantity": "level_set_hit", "found": False}]
        return [{
            "run_id": run_id, "quantity": "level_set_hit", "found": True,
            "k": hit.k, "m": hit.m, "n": hit.n,
            "value1": hit.value1, "value2": hit.value2,
            "f_at_k1": hit.f_at_k1, "f_at_k2": hit.f_at_k2,
            "surrogate": hit.surrogate,
        }]
    raise DomainError(f"unknown experiment {sub}")  # pragma: no cover


# --------------------------------------------------------------------------
# flag-style subcommands
# --------------------------------------------------------------------------


def _run_id_for(sub: str, parts: dict) -> str:
    canonical = sub + "\n" + "\n".join(f"{k} = {parts[k]}" for k in sorted(parts)) + "\n"
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def cmd_classify(args) -> list[dict]:
    t = regularity.EquationTriple(args.a, args.b, args.c)
    verdict = regularity.classify(t, args.pair, args.prime_limit)
    row = {"run_id": _run_id_for("classify", vars(args)), "quantity": "pair_regularity_verdict"}
    row.update(verdict.to_dict())
    return [row]


def cmd_solve(args) -> list[dict]:
    t = regularity.EquationTriple(args.a, args.b, args.c)
    tag, gen = regularity.parametric_family(t, args.family)
    x, y, z = gen(args.k, args.m, args.n)
    return [{
        "run_id": _run_id_for("solve", vars(args)), "quantity": "parametric_solution",
        "family": tag, "x": x, "y": y, "z": z,
        "check": args.a * x * x + args.b * y * y == args.c * z * z,
    }]


def cmd_obstruct(args) -> list[dict]:
    rid = _run_id_for("obstruct", vars(args))
    if args.split:
        f1 = [int(x) for x in args.split[0].split(",") if x.strip()]
        f2 = [int(x) for x in args.split[1].split(",") if x.strip()]
        p = regularity.find_split_prime(f1, f2, args.prime_limit)
        return [{"run_id": rid, "quantity": "residue_split_prime", "prime": p}]
    t = regularity.EquationTriple(args.a, args.b, args.c)
    p = regularity.find_qr_obstruction(t, args.prime_limit)
    return [{"run_id": rid, "quantity": "residue_obstruction_prime", "prime": p}]


def cmd_verify_coloring(args) -> list[dict]:
    t = regularity.EquationTriple(args.a, args.b, args.c)
    coloring = regularity.coloring_from_name(args.coloring)
    rep = regularity.verify_no_monochromatic(t, coloring, args.bound)
    return [{
        "run_id": _run_id_for("verify-coloring", vars(args)),
        "quantity": "monochromatic_pair_count",
        "solutions": rep.solution_count,
        "monochromatic": rep.monochromatic_count,
        "first_counterexample": rep.first_counterexample,
    }]


def cmd_omega(args) -> list[dict]:
    form = parse_form(args.form)
    rid = _run_id_for("omega", vars(args))
    if args.hensel:
        p, root, k = (int(x) for x in args.hensel.split(","))
        return [{"run_id": rid, "quantity": "hensel_lift", "lift": hensel_lift(form, p, root, k)}]
    if args.partner:
        other = parse_form(args.partner)
        p1, p2 = partner_prime_sets(form, other, args.modulus)
        return [{"run_id": rid, "quantity": "partner_prime_sets", "set1": p1, "set2": p2}]
    if args.congruence_pair:
        other = parse_form(args.congruence_pair)
        exps = {}
        for item in (args.exponents or "").split(","):
            if item.strip():
                p, l = item.split(":")
                exps[int(p)] = int(l)
        pair = construct_congruence_pair(form, other, args.r, args.modulus, exps)
        return [{
            "run_id": rid, "quantity": "congruence_pair",
            "a": pair.a, "b": pair.b, "q": pair.q, "q1": pair.q1, "q2": pair.q2,
        }]
    if args.fast:
        return [{
            "run_id": rid, "quantity": "local_root_count",
            "count": local_root_count_fast(form, args.modulus), "method": "residue",
        }]
    return [{
        "run_id": rid, "quantity": "local_root_count",
        "count": local_root_count(form, args.modulus), "method": "direct",
    }]


def cmd_distance(args) -> list[dict]:
    f = function_from_name(args.f)
    g = function_from_name(args.g)
    rid = _run_id_for("distance", vars(args))
    if args.profile:
        checkpoints = [float(x) for x in args.profile.split(",")]
        form = parse_form(args.form) if args.form else None
        profile = multfunc.distance_profile(f, g, checkpoints, form)
        return [
            {"run_id": rid, "quantity": "distance_profile", "y": y, "value": v}
            for y, v in profile
        ]
    if args.y is None:
        raise DomainError("distance needs --y (or --profile)")
    if args.form:
        val = multfunc.distance_form(parse_form(args.form), f, g, args.x, args.y)
        kind = "form_weighted"
    else:
        val = multfunc.distance(f, g, args.x, args.y)
        kind = "plain"
    return [{"run_id": rid, "quantity": "pretentious_distance", "kind": kind, "value": val}]


def _parse_element(ring: quadrings.QuadraticRing, text: str) -> quadrings.RingElement:
    """m+n*tau or a bare integer."""
    text = text.replace(" ", "")
    if "tau" not in text:
        return ring.element(int(text), 0)
    head, _ = text.split("tau", 1)
    head = head.rstrip("*")
    if "+" in head[1:]:
        cut = head.rfind("+")
    else:
        cut = head.rfind("-")
        cut = cut if cut > 0 else 0
    m_text = head[:cut] if cut else "0"
    n_text = head[cut:] if cut else head
    if n_text in ("", "+"):
        n_text = "1"
    if n_text == "-":
        n_text = "-1"
    return ring.element(int(m_text) if m_text else 0, int(n_text))


def cmd_ring(args) -> list[dict]:
    ring = quadrings.QuadraticRing(args.d)
    rid = _run_id_for("ring", vars(args))
    if args.action == "norm":
        z = _parse_element(ring, args.element)
        return [{"run_id": rid, "quantity": "ring_norm", "value": z.norm()}]
    if args.action == "count-solutions":
        return [{
            "run_id": rid, "quantity": "norm_solution_count",
            "count": quadrings.count_norm_solutions(args.d, args.k, args.box),
        }]
    if args.action == "count-ideals":
        return [{
            "run_id": rid, "quantity": "ideal_count",
            "count": quadrings.count_ideals(args.d, args.k),
        }]
    if args.action == "unit":
        u, nrm = quadrings.fundamental_unit(args.d)
        return [{
            "run_id": rid, "quantity": "fundamental_unit",
            "m": u.m, "n": u.n, "norm": nrm,
        }]
    if args.action == "regular":
        z = _parse_element(ring, args.element)
        ok = quadrings.is_regular(z, args.c_bound, args.box)
        return [{"run_id": rid, "quantity": "box_regularity", "regular": ok}]
    if args.action == "associate":
        z = _parse_element(ring, args.element)
        found = quadrings.find_regular_associate(z, args.c_bound, args.box, args.t_range)
        if found is None:
            return [{"run_id": rid, "quantity": "regular_associate", "found": False}]
        assoc, t, sign = found
        return [{
            "run_id": rid, "quantity": "regular_associate", "found": True,
            "m": assoc.m, "n": assoc.n, "t": t, "sign": sign,
        }]
    raise DomainError(f"unknown ring action {args.action}")


def cmd_weights(args) -> list[dict]:
    spec = averaging.WeightSpec(args.delta, parse_form(args.p1), parse_form(args.p2))
    est = averaging.mu_estimate(spec, args.n)
    return [{
        "run_id": _run_id_for("weights", vars(args)), "quantity": "weight_mean",
        "grid": est.grid, "riemann": est.riemann, "agreement": est.agreement,
    }]


def cmd_divstat(args) -> list[dict]:
    form = parse_form(args.form)
    rid = _run_id_for("divstat", vars(args))
    if args.bound_l:
        exact, reference = averaging.divisor_bound_probe(
            form, args.q, args.a, args.b, args.bound_l, args.n
        )
        return [{
            "run_id": rid, "quantity": "divisor_bound_probe",
            "l": args.bound_l, "exact": exact, "reference": reference,
        }]
    primes = [int(x) for x in args.primes.split(",")]
    rows = []
    for i, p in enumerate(primes):
        for p2 in primes[i:]:
            exact = averaging.divisor_stat_exact(form, args.q, args.a, args.b, p, p2, args.n)
            try:
                pred = averaging.divisor_stat_predicted(form, p, p2, args.q)
            except DomainError:
                pred = float("nan")
            rows.append({
                "run_id": rid, "quantity": "exact_divisibility_frequency",
                "p": p, "q": p2, "exact": exact, "predicted": pred,
                "abs_err": abs(exact - pred),
            })
    return rows


def cmd_folner(args) -> list[dict]:
    rid = _run_id_for("folner", vars(args))
    if args.partner:
        form1, form2 = (parse_form(x) for x in args.partner)
        box = averaging.folner_partner(args.k, args.j, form1, form2)
        return [{
            "run_id": rid, "quantity": "folner_partner_box",
            "j": args.j, "size": len(box),
            "elements": [dict(e.exponents) for e in box],
        }]
    f = function_from_name(args.f)
    mean = averaging.folner_average(f, args.k)
    return [{
        "run_id": rid, "quantity": "folner_mean",
        "mean_re": mean.real, "mean_im": mean.imag,
        "box_size": len(averaging.folner_enumerate(args.k)),
    }]


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # present on the main parser and on every subparser, so they are accepted
    # in either position; SUPPRESS keeps subparsers from clobbering values
    # already parsed at the top level
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--threads", type=int, default=1 if not suppress else d)
    parser.add_argument("--cap-n", type=int, default=d,
                        help="override grid/enumeration caps")
    parser.add_argument("--out", default=d, help="write results to this path (atomic)")
    parser.add_argument("--format", choices=("json", "csv"),
                        default="json" if not suppress else d)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="qpairs", description=__doc__)
    _global_flags(top, suppress=False)
    _sub = top.add_subparsers(dest="subcommand", required=True)

    class _SubFactory:
        def add_parser(self, name, **kw):
            parser = _sub.add_parser(name, **kw)
            _global_flags(parser, suppress=True)
            return parser

    sub = _SubFactory()

    p = sub.add_parser("classify")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)
    p.add_argument("--pair", choices=("xy", "xz", "yz"), default="xy")
    p.add_argument("--prime-limit", type=int, default=10**5)

    p = sub.add_parser("solve")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)
    p.add_argument("--family", default="auto")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=1)

    p = sub.add_parser("obstruct")
    p.add_argument("a", type=int, nargs="?", default=1)
    p.add_argument("b", type=int, nargs="?", default=1)
    p.add_argument("c", type=int, nargs="?", default=1)
    p.add_argument("--prime-limit", type=int, default=10**5)
    p.add_argument("--split", nargs=2, metavar=("F1", "F2"), default=None,
                   help="comma lists of primes or -1: residues, nonresidues")

    p = sub.add_parser("verify-coloring")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)
    p.add_argument("--coloring", required=True, help="rado:P | two-adic | dyadic:L")
    p.add_argument("--bound", type=int, default=2000)

    p = sub.add_parser("omega")
    p.add_argument("--form", required=True)
    p.add_argument("--modulus", type=int, default=2)
    p.add_argument("--fast", action="store_true")
    p.add_argument("--hensel", default=None, help="p,root,k")
    p.add_argument("--partner", default=None, help="second form literal")
    p.add_argument("--congruence-pair", default=None, help="second form literal")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--exponents", default=None, help="p:l,p:l")

    p = sub.add_parser("distance")
    p.add_argument("--f", required=True)
    p.add_argument("--g", default="principal")
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--y", type=float, default=None)
    p.add_argument("--form", default=None)
    p.add_argument("--profile", default=None, help="comma list of cutoffs")

    p = sub.add_parser("ring")
    p.add_argument("action", choices=(
        "norm", "count-solutions", "count-ideals", "unit", "regular", "associate"))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--element", default="1")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--box", type=int, default=40)
    p.add_argument("--c-bound", type=float, default=2.0)
    p.add_argument("--t-range", type=int, default=5)

    p = sub.add_parser("weights")
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("divstat")
    p.add_argument("--form", required=True)
    p.add_argument("--primes", default="", help="comma list")
    p.add_argument("--bound-l", type=int, default=None,
                   help="probe l | P(Qm+a,Qn+b) against Q^2/l instead")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--a", type=int, default=0)
    p.add_argument("--b", type=int, default=0)
    p.add_argument("--n", type=int, default=2000)

    p = sub.add_parser("folner")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--f", default="principal")
    p.add_argument("--partner", nargs=2, metavar=("P1", "P2"), default=None)
    p.add_argument("--j", type=int, default=1, choices=(1, 2))

    for name in SCHEMAS:
        p = sub.add_parser(name)
        p.add_argument("params", nargs="*", help="key=value tokens")
        p.add_argument("--config", default=None, help="key = value file")

    p = sub.add_parser("sweep")
    p.add_argument("--sub", required=True, choices=sorted(SCHEMAS))
    p.add_argument("--axis", required=True)
    p.add_argument("--values", required=True, help="comma list of axis values")
    p.add_argument("params", nargs="*", help="key=value tokens")
    p.add_argument("--config", default=None)

    return top


def _collect_kv(args) -> dict[str, str]:
    raw: dict[str, str] = {}
    if args.config:
        with open(args.config) as fh:
            raw.update(parse_kv_text(fh.read()))
    for token in args.params:
        if "=" not in token:
            raise DomainError(f"expected key=value, got {token!r}")
        key, val = token.split("=", 1)
        raw[key.strip()] = val.strip()
    return raw


FLAG_HANDLERS: dict[str, Callable] = {
    "classify": cmd_classify,
    "solve": cmd_solve,
    "obstruct": cmd_obstruct,
    "verify-coloring": cmd_verify_coloring,
    "omega": cmd_omega,
    "distance": cmd_distance,
    "ring": cmd_ring,
    "weights": cmd_weights,
    "divstat": cmd_divstat,
    "folner": cmd_folner,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    saved_caps = (CAPS.grid_n, CAPS.divisor_grid_n, CAPS.enumerate_bound)
    if args.cap_n is not None:
        CAPS.grid_n = args.cap_n
        CAPS.divisor_grid_n = args.cap_n
        CAPS.enumerate_bound = args.cap_n
    try:
        if args.subcommand in FLAG_HANDLERS:
            rows = FLAG_HANDLERS[args.subcommand](args)
        elif args.subcommand in SCHEMAS:
            raw = _collect_kv(args)
            values, _, run_id = resolve_spec(args.subcommand, SCHEMAS[args.subcommand], raw)
            rows = run_experiment(args.subcommand, values, run_id, args.threads)
        elif args.subcommand == "sweep":
            raw = _collect_kv(args)
            schema = SCHEMAS[args.sub]
            if args.axis not in schema:
                raise DomainError(f"{args.axis} is not a parameter of {args.sub}")
            points = [v for v in args.values.split(",") if v.strip()]
            if not points:
                raise DomainError("empty sweep value list")
            rows = []
            for point in points:
                raw_point = dict(raw)
                raw_point[args.axis] = point.strip()
                values, _, run_id = resolve_spec(args.sub, schema, raw_point)
                for row in run_experiment(args.sub, values, run_id, args.threads):
                    row["axis"] = args.axis
                    row["axis_value"] = point.strip()
                    rows.append(row)
        else:  # pragma: no cover
            raise DomainError(f"unknown subcommand {args.subcommand}")
        emit(rows, args.format, args.out)
        return 0
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 4
    finally:
        CAPS.grid_n, CAPS.divisor_grid_n, CAPS.enumerate_bound = saved_caps


if __name__ == "__main__":
    sys.exit(main())
