"""Inductive construction of ring presentations.

Each degree is opened, fed relations until its dimension reaches the
target (stacks) or every family has been tried (spaces), then closed.
Injection order at a degree: Virasoro closure of lower generators,
primitive MR, the remaining MR classes, primitive GMR, the full GMR
sweep, BR.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from . import linalg
from .bps import stack_series
from .descendent import SPACE, STACK, ToppType, drop_c11
from .graded import GradedIdeal
from .poly import C_TABLE, Polynomial, c_index, cvar, from_text, to_text
from .relations import (BR, GMR, MR, GMRStream, MumfordStream, RightRing, base_relations_at, mr_twists,
                        precedes, right_ring_for, slope_window)
from .virasoro import closure_images

SCHEMA = "tautring.registry/1"
CLOSURE = "closure"


class MissingPrerequisite(LookupError):
    """A ring needed for GMR relations or the BPS target is not in the registry."""


class InconsistentRelations(RuntimeError):
    """The relations cut the quotient below the target dimension."""


@dataclass
class BuildOptions:
    mode: str = "lazy"                 # lazy | full | primitive
    families: Tuple[str, ...] = (MR, GMR, BR)
    closure: bool = True
    use_ln: bool = False
    gmr_max_dprime: Optional[int] = None
    e_cap: Optional[int] = None        # right-degree cap for stack right rings
    use_target: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("lazy", "full", "primitive"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class Event:
    degree: int
    source: str
    added: int
    dim: int


def active_variables(kind: str, dmax: int) -> List[int]:
    skip = c_index(1, 1) if kind == SPACE else -1
    return [i for i in range(C_TABLE.nvars) if C_TABLE.degrees[i] <= dmax and i != skip]


class RingPresentation:
    def __init__(self, alpha: ToppType, kind: str, ideal: GradedIdeal, target: Optional[List[int]] = None):
        self.alpha, self.kind, self.ideal = alpha, kind, ideal
        self.target = target
        self.trace: List[Event] = []
        self.stuck: Dict[int, Dict[str, int]] = {}
        self.pd_rounds = 0

    @property
    def table(self):
        return self.ideal.table

    @property
    def dmax(self) -> int:
        return self.ideal.built

    @property
    def top(self) -> int:
        return self.alpha.dim_space if self.kind == SPACE else self.alpha.dim_stack

    def hilbert_function(self, upto: Optional[int] = None) -> List[int]:
        return self.ideal.hilbert_function(upto)

    def reduce(self, p: Polynomial) -> Polynomial:
        return self.ideal.reduce(drop_c11(p) if self.kind == SPACE else p)

    def contains(self, p: Polynomial) -> bool:
        return not self.reduce(p).terms

    def generators(self) -> List[str]:
        return [self.table.labels[i] for i in self.ideal.surviving]

    def trimmed(self) -> Dict[str, object]:
        """Minimal presentation summary: surviving generators and relation counts per q-degree."""
        return {"generators": self.generators(), "relations": self.ideal.relation_degrees()}

    def matches_target(self) -> bool:
        if self.target is None:
            return False
        hf = self.hilbert_function()
        return hf == [int(x) for x in self.target[:len(hf)]]

    def gorenstein(self) -> bool:
        hf = self.hilbert_function()
        top = self.top
        if self.dmax < top + 1 or hf[top] != 1:
            return False
        if any(hf[D] != hf[top - D] for D in range(top + 1)):
            return False
        return all(h == 0 for h in hf[top + 1:])

    def certified_zero_above_top(self) -> bool:
        """Quotient vanishes in every degree above ``top``."""
        hf = self.hilbert_function()
        gmax = max((self.table.degrees[i] for i in self.ideal.surviving), default=1)
        return self.dmax >= self.top + gmax and all(h == 0 for h in hf[self.top + 1:])

    @property
    def complete(self) -> bool:
        if self.kind == STACK:
            return self.matches_target() and not self.stuck
        return self.gorenstein() and self.certified_zero_above_top()

    def status(self) -> Dict[str, object]:
        return {"complete": self.complete,
                "gorenstein": self.kind == SPACE and self.gorenstein(),
                "stuck_degrees": sorted(self.stuck)}

    def __repr__(self) -> str:
        return f"RingPresentation({self.kind} {self.alpha.d},{self.alpha.chi}; built {self.dmax})"


# ---------------------------------------------------------------- registry
def canonical_key(alpha: ToppType, kind: str) -> Tuple[int, int, str]:
    """Representative of ``alpha`` under ``chi -> chi + d`` and ``chi -> -chi``."""
    r = alpha.chi % alpha.d
    return alpha.d, min(r, (-r) % alpha.d), kind


class RingRegistry:
    def __init__(self) -> None:
        self.rings: Dict[Tuple[int, int, str], RingPresentation] = {}

    def add(self, pres: RingPresentation) -> None:
        self.rings[(pres.alpha.d, pres.alpha.chi, pres.kind)] = pres

    def get(self, alpha: ToppType, kind: str) -> Optional[RingPresentation]:
        exact = self.rings.get((alpha.d, alpha.chi, kind))
        if exact is not None:
            return exact
        key = canonical_key(alpha, kind)
        for pres in self.rings.values():
            if canonical_key(pres.alpha, pres.kind) == key:
                return pres
        return None

    def require(self, alpha: ToppType, kind: str) -> RingPresentation:
        pres = self.get(alpha, kind)
        if pres is None:
            raise MissingPrerequisite(f"build the {kind} ring for (d, chi) = ({alpha.d}, {alpha.chi}) first")
        return pres

    def right_ring(self, alpha_p: ToppType, kind: str) -> RightRing:
        base = self.require(alpha_p, kind)
        return right_ring_for(alpha_p, kind, base.ideal, base.alpha)

    def space_for_degree(self, d: int) -> RingPresentation:
        for pres in self.rings.values():
            if pres.kind == SPACE and pres.alpha.d == d:
                return pres
        raise MissingPrerequisite(f"build a coprime space ring of degree {d} first")

    def __contains__(self, key) -> bool:
        alpha, kind = key
        return self.get(alpha, kind) is not None

    def __len__(self) -> int:
        return len(self.rings)


# ---------------------------------------------------------------- targets
def target_series(alpha: ToppType, kind: str, registry: RingRegistry, qdeg: int) -> Optional[List[int]]:
    """Stack Poincare series from the space rings on the same ray; ``None`` for spaces."""
    if kind == SPACE:
        return None
    m = alpha.m
    dmin = alpha.d // m
    inputs = {}
    for k in range(1, m + 1):
        pres = registry.space_for_degree(k * dmin)
        if not pres.complete:
            raise MissingPrerequisite(f"space ring of degree {k * dmin} is not complete")
        inputs[k] = pres.hilbert_function(pres.top)
    out = stack_series(inputs, dmin, m, qdeg)[alpha.d]
    return [int(c) for c in out]


def right_ring_types(alpha: ToppType, max_dprime: Optional[int] = None) -> List[Tuple[ToppType, str]]:
    """Types ``alpha'`` preceding ``alpha`` within the slope window, in increasing order."""
    mu = Fraction(alpha.chi, alpha.d)
    out = []
    for dp in range(1, alpha.d + 1):
        if max_dprime is not None and dp > max_dprime:
            break
        lo = floor(dp * (mu - 3)) + 1
        hi = ceil(dp * mu) - 1
        for chip in range(lo, hi + 1):
            ap = ToppType(dp, chip)
            if precedes(ap, alpha) and slope_window(alpha, ap):
                out.append((ap, SPACE if ap.coprime else STACK))
    out.sort(key=lambda t: (t[0].d, t[0].m, t[0].chi))
    return out


# ---------------------------------------------------------------- build
class _Sources:
    def __init__(self, alpha: ToppType, kind: str, registry: RingRegistry, opts: BuildOptions, dmax: int):
        self.alpha, self.kind, self.opts = alpha, kind, opts
        fam = set(opts.families)
        self.mr = [MumfordStream(alpha, s, k, kind) for s, k in mr_twists(alpha, dmax)] if MR in fam else []
        self.gmr: List[GMRStream] = []
        if GMR in fam:
            for ap, kp in right_ring_types(alpha, opts.gmr_max_dprime):
                right = registry.right_ring(ap, kp)
                cap = None
                if kp == STACK:
                    cap = opts.e_cap if opts.e_cap is not None else alpha.d * ap.d + 2
                self.gmr.append(GMRStream(alpha, kind, right, e_cap=cap))
        self.br = BR in fam

    def closure(self, ideal: GradedIdeal, D: int) -> List[Polynomial]:
        out = []
        for n in range(1, D):
            gens = ideal.minimal_generators(D - n)
            if gens:
                out.extend(closure_images(gens, n, self.alpha, self.kind, self.opts.use_ln))
        return out

    def mr_at(self, ideal: GradedIdeal, D: int, primitive: bool) -> List[Polynomial]:
        out = []
        for s in self.mr:
            if (s.rank == D - 1) if primitive else (s.rank < D - 1):
                out.append(s.chern(D, ideal))
        return out

    def gmr_at(self, ideal: GradedIdeal, D: int, primitive: bool) -> List[Polynomial]:
        out = []
        for s in self.gmr:
            out.extend(s.relations(D, ideal, primitive=primitive))
        return out

    def br_at(self, D: int, primitive: bool) -> List[Polynomial]:
        if not self.br or D <= self.alpha.b:
            return []
        if primitive:
            return [cvar(0, 2) ** D] if D == self.alpha.b + 1 else []
        return base_relations_at(self.alpha, D)

    def steps(self, ideal: GradedIdeal, D: int):
        mode = self.opts.mode
        if self.opts.closure:
            yield CLOSURE, lambda: self.closure(ideal, D)
        yield "MR-primitive", lambda: self.mr_at(ideal, D, True)
        if mode != "primitive":
            yield "MR", lambda: self.mr_at(ideal, D, False)
        yield "GMR-primitive", lambda: self.gmr_at(ideal, D, True)
        if mode != "primitive":
            yield "GMR", lambda: self.gmr_at(ideal, D, False)
        yield "BR-primitive" if mode == "primitive" else "BR", lambda: self.br_at(D, mode == "primitive")


def build_ring(alpha: ToppType, kind: str = STACK, Dmax: Optional[int] = None,
               registry: Optional[RingRegistry] = None, options: Optional[BuildOptions] = None,
               target: Optional[Sequence[int]] = None) -> RingPresentation:
    """Build the presentation of the stack or space ring of ``alpha`` through ``Dmax``.

    Spaces default to building until vanishing above the top degree is
    certified.  Stacks need ``Dmax`` and take their target from the
    registry's space rings unless one is given.
    """
    if kind not in (STACK, SPACE):
        raise ValueError(f"kind must be {STACK!r} or {SPACE!r}")
    if kind == SPACE and not alpha.coprime:
        raise ValueError(f"space rings need gcd(d, chi) = 1, got {alpha}")
    registry = registry if registry is not None else RingRegistry()
    opts = options or BuildOptions()
    if Dmax is None:
        if kind == STACK:
            raise ValueError("stack builds need Dmax")
        Dmax = 2 * alpha.dim_space + 2
        auto = True
    else:
        auto = False
    if target is None and kind == STACK and opts.use_target:
        target = target_series(alpha, kind, registry, Dmax)
    target = list(target) if target is not None else None
    ideal = GradedIdeal(C_TABLE, Dmax, active_variables(kind, Dmax))
    pres = RingPresentation(alpha, kind, ideal, target)
    src = _Sources(alpha, kind, registry, opts, Dmax)
    lazy = opts.mode == "lazy" and target is not None
    for D in range(1, Dmax + 1):
        w = ideal.open_degree()
        evidence: Dict[str, int] = {}
        for name, gen in src.steps(ideal, D):
            if lazy and w.current_dim() == target[D]:
                break
            n = w.add(gen())
            evidence[name] = evidence.get(name, 0) + n
            pres.trace.append(Event(D, name, n, w.current_dim()))
        if target is not None:
            dim = w.current_dim()
            if dim < target[D]:
                raise InconsistentRelations(f"degree {D}: dimension {dim} below target {target[D]}")
            if dim > target[D]:
                pres.stuck[D] = evidence
        ideal.close_degree()
        if auto and D > pres.top and pres.certified_zero_above_top():
            break
    return pres


def incompleteness_report(pres: RingPresentation) -> List[Dict[str, object]]:
    out = []
    for D, ev in sorted(pres.stuck.items()):
        out.append({"degree": D, "dimension": pres.hilbert_function(D)[D],
                    "target": pres.target[D] if pres.target else None, "yield": dict(ev)})
    return out


# ---------------------------------------------------------------- transforms
def _all_generators(ideal: GradedIdeal) -> List[Polynomial]:
    out = []
    for D in range(1, ideal.built + 1):
        out.extend(ideal.minimal_generators(D))
    return out


def rebuild(pres: RingPresentation, extra: Iterable[Polynomial] = (), kind: Optional[str] = None,
            upto: Optional[int] = None) -> RingPresentation:
    kind = kind or pres.kind
    gens = _all_generators(pres.ideal) + list(extra)
    if kind == SPACE:
        gens = [drop_c11(g) for g in gens]
    top = pres.ideal.built if upto is None else upto
    ideal = GradedIdeal(C_TABLE, max(top, 1), active_variables(kind, top))
    ideal.extend(gens, upto=top)
    out = RingPresentation(pres.alpha, kind, ideal, pres.target if kind == pres.kind else None)
    return out


def descend_to_space(stack: RingPresentation) -> RingPresentation:
    """Set ``c_1(1) = 0`` in every generator and re-echelonize."""
    if not stack.alpha.coprime:
        raise ValueError(f"descent needs gcd(d, chi) = 1, got {stack.alpha}")
    if stack.kind == SPACE:
        return stack
    return rebuild(stack, kind=SPACE)


def pairing_kernel(pres: RingPresentation) -> Dict[int, List[Polynomial]]:
    """Elements pairing to zero with everything into the top degree, plus all classes above it."""
    I, top = pres.ideal, pres.top
    if I.built < top:
        raise ValueError(f"ring built to {I.built}, need the top degree {top}")
    if len(I.basis(top)) != 1:
        raise ValueError(f"top degree {top} has dimension {len(I.basis(top))}; more relations are needed first")
    point = I.basis(top)[0]
    out: Dict[int, List[Polynomial]] = {}
    for D in range(1, top):
        left, right = I.basis(D), I.basis(top - D)
        rows = []
        for a in left:
            row = {}
            for t, b in enumerate(right):
                c = I.nf_monomial(a + b).get(point)
                if c:
                    row[t] = c
            rows.append(row)
        ker = linalg.kernel_of(rows)
        if ker:
            out[D] = [Polynomial._raw(C_TABLE, {left[i]: c for i, c in x.items()}) for x in ker]
    for D in range(top + 1, I.built + 1):
        if I.basis(D):
            out[D] = [Polynomial._raw(C_TABLE, {m: mpq(1)}) for m in I.basis(D)]
    return out


def pd_complete(pres: RingPresentation, max_rounds: int = 10) -> RingPresentation:
    """Adjoin the Poincare-pairing kernel until the quotient is Gorenstein."""
    if pres.kind != SPACE:
        raise ValueError("pairing completion applies to space rings")
    cur = pres
    rounds = 0
    while True:
        ker = pairing_kernel(cur)
        if not ker:
            break
        rounds += 1
        if rounds > max_rounds:
            raise RuntimeError("pairing completion did not reach a fixpoint")
        extra = [p for ps in ker.values() for p in ps]
        nxt = rebuild(cur, extra)
        nxt.trace = cur.trace + [Event(D, "pairing", len(ps), -1) for D, ps in sorted(ker.items())]
        cur = nxt
    cur.pd_rounds = rounds
    return cur


def same_ideal(a: RingPresentation, b: RingPresentation, upto: Optional[int] = None) -> bool:
    """Slice-for-slice equality of two presentations over the same variables."""
    top = min(a.dmax, b.dmax) if upto is None else upto
    if a.hilbert_function(top) != b.hilbert_function(top):
        return False
    for x, y in ((a, b), (b, a)):
        for D in range(1, top + 1):
            for g in x.ideal.minimal_generators(D):
                if y.ideal.reduce(g).terms:
                    return False
    return True


# ---------------------------------------------------------------- persistence
def _ring_record(pres: RingPresentation) -> Dict[str, object]:
    I = pres.ideal
    gens = {str(D): [to_text(g) for g in I.minimal_generators(D)]
            for D in range(1, I.built + 1) if I.mingens[D]}
    rec = {"d": pres.alpha.d, "chi": pres.alpha.chi, "kind": pres.kind, "dmax": I.built,
           "hilbert": I.hilbert_function(), "target": pres.target,
           "generators": gens, "stuck": sorted(pres.stuck)}
    rec["checksum"] = _checksum(rec)
    return rec


def _checksum(rec: Dict[str, object]) -> str:
    body = {k: v for k, v in rec.items() if k != "checksum"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def registry_save(registry: RingRegistry, path: str) -> None:
    data = {"schema": SCHEMA, "rings": [_ring_record(p) for _, p in sorted(registry.rings.items())]}
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
        fh.write("\n")


class RegistryError(ValueError):
    pass


def ring_from_record(rec: Dict[str, object]) -> RingPresentation:
    if rec.get("checksum") != _checksum(rec):
        raise RegistryError(f"checksum mismatch for ring ({rec.get('d')}, {rec.get('chi')}, {rec.get('kind')})")
    alpha = ToppType(int(rec["d"]), int(rec["chi"]))
    kind = rec["kind"]
    top = int(rec["dmax"])
    gens = [from_text(C_TABLE, s) for D in sorted(rec["generators"], key=int) for s in rec["generators"][D]]
    ideal = GradedIdeal(C_TABLE, max(top, 1), active_variables(kind, top))
    ideal.extend(gens, upto=top)
    if ideal.hilbert_function() != list(rec["hilbert"]):
        raise RegistryError(f"stored ranks do not match the relations for ({alpha.d}, {alpha.chi}, {kind})")
    pres = RingPresentation(alpha, kind, ideal, rec.get("target"))
    for D in rec.get("stuck", []):
        pres.stuck[int(D)] = {}
    return pres


def registry_load(path: str) -> RingRegistry:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != SCHEMA:
        raise RegistryError(f"unsupported registry schema {data.get('schema')!r}")
    reg = RingRegistry()
    for rec in data["rings"]:
        reg.add(ring_from_record(rec))
    return reg


def ensure_ring(registry: RingRegistry, alpha: ToppType, kind: str, Dmax: Optional[int] = None,
                options: Optional[BuildOptions] = None) -> RingPresentation:
    """Build ``alpha`` and, recursively, everything it depends on."""
    pres = registry.get(alpha, kind)
    if pres is not None and (Dmax is None or pres.dmax >= Dmax):
        return pres
    for ap, kp in right_ring_types(alpha, options.gmr_max_dprime if options else None):
        dp = None if kp == SPACE else max(alpha.d * ap.d + 2, ap.dim_stack + 2)
        ensure_ring(registry, ToppType(ap.d, canonical_key(ap, kp)[1] if kp == SPACE else 0), kp, dp)
    if kind == STACK:
        dmin = alpha.d // alpha.m
        for k in range(1, alpha.m + 1):
            ensure_ring(registry, ToppType(k * dmin, 1), SPACE)
    pres = build_ring(alpha, kind, Dmax, registry, options)
    registry.add(pres)
    return pres
