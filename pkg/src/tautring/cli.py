"""Command-line front end: ``tautring <command> ...``.

Every command prints a short text report and, with ``--out DIR``, writes the
same data as ``DIR/<command>.json`` and ``DIR/<command>.csv``.  Exit status is
0 when all checks pass, 1 when a check fails and 2 on usage or config errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import bps, filtrations, hrr, pipeline, relations
from .descendent import SPACE, STACK, ToppType
from .poly import to_text

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    registry: Optional[str] = None
    dmax: Optional[int] = None
    out: Optional[str] = None
    use_ln: bool = False
    trim: bool = False
    subspace: bool = True
    targets: List[tuple] = field(default_factory=list)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        targets = []
        if getattr(ns, "d", None) is not None:
            targets.append((ns.d, ns.chi, getattr(ns, "kind", SPACE)))
        return cls(ns.command, ns.registry, ns.dmax, ns.out, ns.use_ln, ns.trim,
                   not getattr(ns, "dimension_only", False), targets)

    def to_dict(self) -> Dict[str, object]:
        return {"command": self.command, "registry": self.registry, "dmax": self.dmax, "out": self.out,
                "use_ln": self.use_ln, "trim": self.trim, "subspace": self.subspace,
                "targets": [list(t) for t in self.targets]}

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "RunConfig":
        data = dict(data)
        data["targets"] = [tuple(t) for t in data.get("targets", [])]
        return cls(**data)


class Report:
    def __init__(self, command: str):
        self.command = command
        self.checks: List[Dict[str, object]] = []
        self.tables: Dict[str, List[Dict[str, object]]] = {}
        self.lines: List[str] = []

    def check(self, name: str, ok: bool, reason: str = "") -> bool:
        self.checks.append({"check": name, "ok": bool(ok), "reason": "" if ok else reason})
        return ok

    def table(self, name: str, rows: List[Dict[str, object]]) -> None:
        self.tables[name] = rows

    def say(self, line: str) -> None:
        self.lines.append(line)

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_dict(self) -> Dict[str, object]:
        return {"command": self.command, "ok": self.ok, "checks": self.checks, "tables": self.tables}

    def text(self) -> str:
        out = list(self.lines)
        for c in self.checks:
            tag = "PASS" if c["ok"] else "FAIL"
            out.append(f"{tag} {c['check']}" + (f" reason={c['reason']}" if c["reason"] else ""))
        return "\n".join(out)

    def write(self, outdir: str) -> None:
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, f"{self.command}.json"), "w") as fh:
            json.dump(_jsonable(self.to_dict()), fh, indent=1, sort_keys=True)
            fh.write("\n")
        with open(os.path.join(outdir, f"{self.command}.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["section", "key", "value"])
            for c in self.checks:
                w.writerow(["check", c["check"], "pass" if c["ok"] else f"fail:{c['reason']}"])
            for name in sorted(self.tables):
                for i, row in enumerate(self.tables[name]):
                    for k in sorted(row):
                        w.writerow([name, f"{i}.{k}", _scalar(row[k])])


def _scalar(v) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(_scalar(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    try:
        if v.denominator == 1:
            return int(v.numerator)
    except AttributeError:
        pass
    return str(v)


# ---------------------------------------------------------------- shared helpers
def _options(cfg: RunConfig) -> pipeline.BuildOptions:
    return pipeline.BuildOptions(use_ln=cfg.use_ln)


def _registry(cfg: RunConfig) -> pipeline.RingRegistry:
    if cfg.registry and os.path.exists(cfg.registry):
        return pipeline.registry_load(cfg.registry)
    return pipeline.RingRegistry()


def _save(cfg: RunConfig, reg: pipeline.RingRegistry) -> None:
    if cfg.registry:
        pipeline.registry_save(reg, cfg.registry)


def _alpha(d: int, chi: int) -> ToppType:
    try:
        return ToppType(d, chi)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _space(reg, cfg: RunConfig, d: int, chi: int = 1):
    """The space ring of exactly ``(d, chi)``, built if missing."""
    alpha = _alpha(d, chi)
    pres = reg.get(alpha, SPACE)
    if pres is None:
        return pipeline.ensure_ring(reg, alpha, SPACE, options=_options(cfg))
    if pres.alpha != alpha:
        # only a ring for another chi in the same class is stored; build this one on its own
        pres = pipeline.build_ring(alpha, SPACE, registry=reg, options=_options(cfg))
        reg.add(pres)
    return pres


def _omegas(reg, cfg: RunConfig, dmax: int) -> Dict[int, Dict]:
    out = {}
    for d in range(1, dmax + 1):
        out[d] = filtrations.omega(d, filtrations.perverse_filtration(_space(reg, cfg, d)))
    return out


def _bi_rows(bi: Dict) -> List[Dict[str, object]]:
    return [{"i": a, "j": c, "value": v} for (a, c), v in sorted(bi.items())]


# ---------------------------------------------------------------- commands
def cmd_build(cfg: RunConfig, d: int, chi: int, kind: str) -> Report:
    alpha = _alpha(d, chi)
    if kind == SPACE and not alpha.coprime:
        raise UsageError(f"space rings need gcd(d, chi) = 1, got ({d}, {chi})")
    if kind == STACK and cfg.dmax is None:
        raise UsageError("stack builds need --dmax")
    rep = Report("build")
    reg = _registry(cfg)
    if kind == SPACE:
        pres = _space(reg, cfg, d, chi)
    else:
        pres = pipeline.ensure_ring(reg, alpha, kind, cfg.dmax, _options(cfg))
    _save(cfg, reg)
    hf = pres.hilbert_function()
    rep.say(f"{kind} ({d}, {chi}) built through q-degree {pres.dmax}")
    rep.say("hilbert " + " ".join(map(str, hf)))
    rep.table("hilbert", [{"D": D, "dim": h} for D, h in enumerate(hf)])
    if cfg.trim:
        tr = pres.trimmed()
        rep.say("generators " + " ".join(tr["generators"]))
        rep.say("relations " + " ".join(f"H^{2 * D}:{n}" for D, n in sorted(tr["relations"].items())))
        rep.table("generators", [{"name": g} for g in tr["generators"]])
        rep.table("relations", [{"H": 2 * D, "count": n} for D, n in sorted(tr["relations"].items())])
        rep.table("presentation", [{"D": D, "relation": to_text(g)}
                                   for D in range(1, pres.dmax + 1)
                                   for g in pres.ideal.minimal_generators(D)])
    if kind == SPACE:
        rep.check("gorenstein", pres.gorenstein(), "hilbert function not symmetric with one-dimensional top")
        rep.check("complete", pres.complete, "vanishing above the top degree not certified")
    else:
        rep.check("matches_target", pres.matches_target(), "hilbert function differs from the stack series")
        rep.check("no_stuck_degrees", not pres.stuck, "stuck at " + ",".join(map(str, sorted(pres.stuck))))
    return rep


def cmd_bps(cfg: RunConfig, mu: Fraction, qdeg: Optional[int]) -> Report:
    dmax = cfg.dmax or 2
    d0, c0 = mu.denominator, mu.numerator
    kcut = dmax // d0
    if kcut < 1:
        raise UsageError(f"--dmax {dmax} is below the primitive degree {d0} of slope {mu}")
    rep = Report("bps")
    reg = _registry(cfg)
    need = {k: k * k * d0 * d0 + k * (k + 1) // 2 + 2 for k in range(1, kcut + 1)}
    q = max(need.values()) if qdeg is None else qdeg
    inputs = {}
    for k in range(1, kcut + 1):
        sp = _space(reg, cfg, k * d0, 1)
        inputs[k] = sp.hilbert_function()[:sp.top + 1]
    _save(cfg, reg)
    series = bps.stack_series(inputs, d0, kcut, q)
    for k in range(1, kcut + 1):
        d = k * d0
        E = [int(c) for c in series[d]]
        rep.say(f"E(stack {d},{k * c0}) = " + " ".join(map(str, E)))
        rep.table(f"E_{d}", [{"q": i, "coeff": c} for i, c in enumerate(E)])
        try:
            A = bps.structural_decompose(E, d, k)
            rep.check(f"structural_{d}_{k}", True)
            rep.table(f"A_{d}_{k}", [{"q": i, "coeff": c} for i, c in enumerate(A)])
        except ValueError as exc:
            rep.check(f"structural_{d}_{k}", False, str(exc).replace(" ", "_"))
    return rep


def cmd_pc(cfg: RunConfig, d: int, chi: int, kind: str) -> Report:
    rep = Report("pc")
    reg = _registry(cfg)
    alpha = _alpha(d, chi)
    if kind == SPACE:
        if not alpha.coprime:
            raise UsageError("space P=C needs gcd(d, chi) = 1")
        pres = _space(reg, cfg, d, chi)
        v = filtrations.pc_check(pres, subspace=cfg.subspace)
        rep.check(f"p_equals_c_{v.level}", v.ok, f"first_violation_k{v.first_violation[0]}_D{v.first_violation[1]}"
                  if v.first_violation else "")
        rep.table("perverse_gr", [{"D": D, "gr": row} for D, row in sorted(v.perverse.items())])
        rep.table("chern_gr", [{"D": D, "gr": row} for D, row in sorted(v.chern.items())])
        for l, ok in filtrations.vanishing_window_check(pres).items():
            rep.check(f"vanishing_window_l{l}", ok, "nonzero_intersection")
    else:
        if chi % d:
            raise UsageError("stacky P=C is implemented on the slope-zero ray only")
        if cfg.dmax is None:
            raise UsageError("stack P=C needs --dmax")
        om = _omegas(reg, cfg, d)
        pres = pipeline.ensure_ring(reg, alpha, STACK, cfg.dmax, _options(cfg))
        ok, want, got = filtrations.stack_pc_check(pres, om, cfg.dmax)
        bad = sorted(k for k in set(want) | set(got) if want.get(k, 0) != got.get(k, 0))
        rep.check("stacky_p_equals_c", ok, f"mismatch_at_{bad[0][0]}_{bad[0][1]}" if bad else "")
        rep.table("stacky_perverse", _bi_rows(want))
        rep.table("chern", _bi_rows(got))
    _save(cfg, reg)
    return rep


def cmd_gv(cfg: RunConfig) -> Report:
    rep = Report("gv")
    reg = _registry(cfg)
    dmax = cfg.dmax or 3
    om = _omegas(reg, cfg, dmax)
    _save(cfg, reg)
    for d in range(1, dmax + 1):
        rep.table(f"omega_{d}", _bi_rows(om[d]))
        rep.check(f"omega_{d}_symmetric", filtrations.is_symmetric(om[d]), "not_symmetric")
        try:
            N = filtrations.gv_extract(om[d])
            back = filtrations.gv_reconstruct(N)
            rep.check(f"gv_{d}_integral", back == {k: v for k, v in om[d].items() if v}, "reconstruction_differs")
            rep.table(f"gv_{d}", [{"jL": str(jl), "jR": str(jr), "N": n} for (jl, jr), n in sorted(N.items())])
            rep.say(f"d={d} N " + " ".join(f"({jl},{jr}):{n}" for (jl, jr), n in sorted(N.items())))
        except ValueError as exc:
            rep.check(f"gv_{d}_integral", False, str(exc).replace(" ", "_"))
        try:
            mt = filtrations.maulik_toda(om[d])
            rep.table(f"mt_{d}", [{"g": g, "n": n} for g, n in sorted(mt.items())])
            rep.say(f"d={d} n_g " + " ".join(f"{g}:{n}" for g, n in sorted(mt.items())))
            rep.check(f"mt_{d}", True)
        except ValueError as exc:
            rep.check(f"mt_{d}", False, str(exc).replace(" ", "_"))
    return rep


def cmd_gvpt(cfg: RunConfig, pt_file: Optional[str], qmax: int) -> Report:
    rep = Report("gvpt")
    reg = _registry(cfg)
    dmax = cfg.dmax or 2
    om = _omegas(reg, cfg, dmax)
    _save(cfg, reg)
    rhs = filtrations.gvpt_rhs(om, dmax, qmax)
    for d in range(1, dmax + 1):
        rows = [{"q": a, "t": c, "coeff": v} for (a, c), v in sorted(rhs[d].coeffs.items())]
        rep.table(f"Q{d}", rows)
    mt = {d: filtrations.maulik_toda(om[d]) for d in om}
    t1 = filtrations.gvpt_t1_from_mt(mt, dmax, qmax)
    rep.check("t1_matches_mt", [r.at_t1() for r in rhs] == t1, "t1_specialization_differs")
    if pt_file:
        if not os.path.exists(pt_file):
            raise UsageError(f"PT file {pt_file} not found")
        bad = filtrations.compare_pt(rhs, filtrations.read_pt_file(pt_file))
        rep.check("pt_file", bad is None, f"mismatch_d{bad[0]}_n{bad[1]}" if bad else "")
    return rep


def cmd_euler(cfg: RunConfig, d: int, chi: int, mmax: int) -> Report:
    rep = Report("euler")
    alpha = _alpha(d, chi)
    if not alpha.coprime:
        raise UsageError("Euler characteristics need gcd(d, chi) = 1")
    reg = _registry(cfg)
    pres = _space(reg, cfg, d, chi)
    _save(cfg, reg)
    f = hrr.normalize_integral(pres)
    rows = []
    ok = True
    for m in range(mmax + 1):
        try:
            got = int(hrr.euler_characteristic(f, m))
        except hrr.IntegrationError as exc:
            rep.check(f"integral_m{m}", False, "non_integral")
            ok = False
            continue
        want = hrr.expected_euler(d, m)
        rows.append({"m": m, "chi": got, "expected": want})
        ok = ok and got == want
    rep.table("euler", rows)
    rep.say("point class " + to_text(f.point_class()))
    rep.say("chi " + " ".join(str(r["chi"]) for r in rows))
    rep.check("matches_binomial", ok, "differs_from_binom(m+3d-1,m)")
    return rep


def cmd_verify_appendix(cfg: RunConfig, nmax: int, samples: int = 200, seed: int = 0) -> Report:
    rep = Report("verify-appendix")
    D = cfg.dmax or 4
    pairs = [(ToppType(2, 1), ToppType(1, 0)), (ToppType(3, 1), ToppType(1, 0))]
    for a, ap in pairs:
        for n in range(nmax + 1):
            ok, res = relations.quadratic_identity_check(a, ap, n, D)
            rep.check(f"quadratic_{a.d}{a.chi}_{ap.d}{ap.chi}_n{n}", ok, f"residual_terms_{len(res.terms)}")
        rep.check(f"right_lowering_{a.d}{a.chi}_{ap.d}{ap.chi}", relations.lemma_right_lowering(a, ap, D),
                  "lowering_identity_fails")
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        a = Fraction(rng.randint(-50, 50), rng.randint(1, 12))
        b = Fraction(rng.randint(-50, 50), rng.randint(1, 12))
        m = rng.randint(0, 10)
        bad += not relations.falling_factorial_identity(a, b, m)
    rep.check("falling_factorial", bad == 0, f"{bad}_failures")
    return rep


def cmd_registry_verify(cfg: RunConfig) -> Report:
    if not cfg.registry:
        raise UsageError("registry-verify needs --registry")
    if not os.path.exists(cfg.registry):
        raise UsageError(f"registry {cfg.registry} not found")
    rep = Report("registry-verify")
    try:
        reg = pipeline.registry_load(cfg.registry)
    except (pipeline.RegistryError, ValueError, KeyError) as exc:
        rep.check("load", False, str(exc).replace(" ", "_"))
        return rep
    rep.check("load", True)
    rows = []
    for (d, chi, kind), pres in sorted(reg.rings.items()):
        rows.append({"d": d, "chi": chi, "kind": kind, "dmax": pres.dmax, "complete": pres.complete})
        if kind == SPACE:
            rep.check(f"space_{d}_{chi}_complete", pres.complete, "incomplete")
    rep.table("rings", rows)
    return rep


# ---------------------------------------------------------------- argument parsing
def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad slope {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--registry", help="JSON registry of built rings (read and updated)")
    common.add_argument("--dmax", type=int, help="maximal q-degree or curve degree, depending on the command")
    common.add_argument("--out", help="directory for structured reports")
    common.add_argument("--use-ln", action="store_true", help="close ideals under the full L_n as well")
    common.add_argument("--trim", action="store_true", help="emit the trimmed presentation")

    p = argparse.ArgumentParser(prog="tautring", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def typed(name: str, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("d", type=int)
        sp.add_argument("chi", type=int)
        return sp

    b = typed("build", "build a stack or space ring")
    b.add_argument("--kind", choices=(STACK, SPACE), default=SPACE)
    s = sub.add_parser("bps", parents=[common], help="stack series along a ray and their decompositions")
    s.add_argument("--mu", type=_fraction, default=Fraction(0))
    s.add_argument("--qdeg", type=int)
    c = typed("pc", "compare perverse and Chern filtrations")
    c.add_argument("--kind", choices=(STACK, SPACE), default=SPACE)
    c.add_argument("--dimension-only", action="store_true")
    sub.add_parser("gv", parents=[common], help="Omega tables, GV and MT numbers")
    g = sub.add_parser("gvpt", parents=[common], help="GV/PT generating series")
    g.add_argument("--pt-file")
    g.add_argument("--qmax", type=int, default=6)
    e = typed("euler", "Euler characteristics of multiples of c_0(2)")
    e.add_argument("--mmax", type=int, default=6)
    v = sub.add_parser("verify-appendix", parents=[common], help="quadratic descendent identities")
    v.add_argument("--n", type=int, default=2)
    sub.add_parser("registry-verify", parents=[common], help="re-check a stored registry")
    return p


def run(argv: Optional[Sequence[str]] = None) -> tuple:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    cmd = ns.command
    if cmd == "build":
        rep = cmd_build(cfg, ns.d, ns.chi, ns.kind)
    elif cmd == "bps":
        rep = cmd_bps(cfg, ns.mu, ns.qdeg)
    elif cmd == "pc":
        rep = cmd_pc(cfg, ns.d, ns.chi, ns.kind)
    elif cmd == "gv":
        rep = cmd_gv(cfg)
    elif cmd == "gvpt":
        rep = cmd_gvpt(cfg, ns.pt_file, ns.qmax)
    elif cmd == "euler":
        rep = cmd_euler(cfg, ns.d, ns.chi, ns.mmax)
    elif cmd == "verify-appendix":
        rep = cmd_verify_appendix(cfg, ns.n)
    else:
        rep = cmd_registry_verify(cfg)
    return cfg, rep


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg, rep = run(argv)
    except SystemExit as exc:          # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except UsageError as exc:
        print(f"error reason={str(exc).replace(' ', '_')}", file=sys.stderr)
        return EXIT_USAGE
    except pipeline.RegistryError as exc:
        print(f"error reason=registry:{str(exc).replace(' ', '_')}", file=sys.stderr)
        return EXIT_USAGE
    print(rep.text())
    if cfg.out:
        rep.write(cfg.out)
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
