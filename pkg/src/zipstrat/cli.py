"""Command-line driver: strict JSON configs in, deterministic JSON/CSV/DOT out.

Exit codes: 0 ok, 1 invariant failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from . import __version__
from .affine import AffineCtx, adm, hilbert_ekor, mu_of_ranks
from .coxeter import build_poset, dot_export
from .dieudonne import (
    FactorData,
    FactorLift,
    FVDatum,
    LocalFactor,
    PELDatum,
    SignatureError,
    hodge_polygon,
    is_max_kr,
    newton_polygon,
    polygon_leq,
    pr_polygon,
    sample_fv,
    validate_fv,
)
from .epsmod import EpsModule, SplittingStructure
from .ffalg import FieldError, SemilinearMap, Subspace, make_field
from .rng import stream
from .tseries import SeriesRing
from .zipclass import (
    ClassificationError,
    SizeBoundError,
    VertexSpec,
    ZipShape,
    group_order,
    point_counts,
    reduced_type,
    shape_of_factor,
    zip_type,
)
from .zipify import (
    LemmaViolation,
    assemble_zip,
    hasse_filtration_criterion,
    hilbert_partial_hasse,
    mu_ordinary_hasse,
    verify_zip,
)

FORMAT = "zipstrat/1"
COMMANDS = ("verify", "sample", "classify", "eo-poset", "hilbert-ekor", "adm", "point-count", "polygons")

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


# -- strict JSON helpers -----------------------------------------------------

def _obj(x: Any, where: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
    if not isinstance(x, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(x) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
    missing = sorted(required - set(x))
    if missing:
        raise ConfigError(f"{where}: missing field(s) {', '.join(missing)}")
    return x


def _int(x: Any, where: str, lo: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where}: expected an integer")
    if lo is not None and x < lo:
        raise ConfigError(f"{where}: must be >= {lo}")
    return x


def _ints(x: Any, where: str, lo: int | None = None) -> list[int]:
    if not isinstance(x, list):
        raise ConfigError(f"{where}: expected a list")
    return [_int(v, f"{where}[{i}]", lo) for i, v in enumerate(x)]


def _matrix(x: Any, where: str) -> tuple[tuple[int, ...], ...]:
    if not isinstance(x, list):
        raise ConfigError(f"{where}: expected a list of rows")
    return tuple(tuple(_ints(r, f"{where}[{i}]", 0)) for i, r in enumerate(x))


# -- PEL data and sampled datum round trip ------------------------------------

FACTOR_KEYS = {"label", "kind", "e", "f", "d", "mult", "signature"}


def parse_pel(x: Any) -> PELDatum:
    x = _obj(x, "pel", {"p", "m", "factors"}, {"p", "factors"})
    p = _int(x["p"], "pel.p", 2)
    m = _int(x.get("m", 1), "pel.m", 1)
    if not isinstance(x["factors"], list) or not x["factors"]:
        raise ConfigError("pel.factors: expected a non-empty list")
    facs = []
    for i, fx in enumerate(x["factors"]):
        where = f"pel.factors[{i}]"
        fx = _obj(fx, where, FACTOR_KEYS, {"kind", "e", "f", "d"})
        sig = fx.get("signature", [])
        if not isinstance(sig, list):
            raise ConfigError(f"{where}.signature: expected a list of rows")
        sig = tuple(tuple(_ints(r, f"{where}.signature[{k}]", 0)) for k, r in enumerate(sig))
        if not isinstance(fx.get("label", "1"), str) or not isinstance(fx["kind"], str):
            raise ConfigError(f"{where}: label and kind must be strings")
        facs.append(LocalFactor(fx.get("label", str(i + 1)), fx["kind"], _int(fx["e"], where + ".e"),
                                _int(fx["f"], where + ".f"), _int(fx["d"], where + ".d"),
                                _int(fx.get("mult", 1), where + ".mult"), sig))
    try:
        make_field(p, m)
    except FieldError as ex:
        raise ConfigError(f"pel: {ex}") from ex
    return PELDatum(p, m, tuple(facs))


def pel_json(pel: PELDatum) -> dict:
    facs = []
    for fac in pel.factors:
        facs.append({"label": fac.label, "kind": fac.kind, "e": fac.e, "f": fac.f, "d": fac.d,
                     "mult": fac.mult, "signature": [list(r) for r in fac.signature]})
    return {"p": pel.p, "m": pel.m, "factors": facs}


def _map_json(m: SemilinearMap) -> dict:
    return {"matrix": [list(r) for r in m.matrix], "twist": m.twist, "cols": m.ncols}


def datum_json(d: FVDatum) -> dict:
    facs = []
    for i, fd in enumerate(d.factors):
        facs.append({
            "factor": i,
            "H": fd.host.rank,
            "splittings": [{"ranks": list(s.ranks), "steps": [[list(r) for r in st.basis] for st in s.steps]}
                           for s in fd.splittings],
            "frob": [_map_json(m) for m in fd.frob],
            "ver": [_map_json(m) for m in fd.ver],
            "pairing": None if fd.pairing is None else [list(r) for r in fd.pairing],
            "lift": None if fd.lift is None else {
                "prec": fd.lift.prec,
                "ver": [[[list(x) for x in row] for row in A] for A in fd.lift.ver],
                "frob": [[[list(x) for x in row] for row in A] for A in fd.lift.frob],
            },
        })
    return {"field": {"p": d.pel.p, "m": d.pel.m}, "factors": facs}


def _parse_map(F, x: Any, where: str, n: int) -> SemilinearMap:
    x = _obj(x, where, {"matrix", "twist", "cols"}, {"matrix", "twist"})
    A = _matrix(x["matrix"], where + ".matrix")
    if len(A) != n or any(len(r) != n for r in A) or any(v >= F.q for r in A for v in r):
        raise ConfigError(f"{where}: expected a {n}x{n} matrix over GF({F.q})")
    return SemilinearMap.make(F, A, _int(x["twist"], where + ".twist"), n)


def _parse_lift(F, x: Any, where: str, f: int, h: int) -> FactorLift:
    x = _obj(x, where, {"prec", "ver", "frob"}, {"prec", "ver", "frob"})
    R = SeriesRing(F, _int(x["prec"], where + ".prec", 1))
    mats = {}
    for key in ("ver", "frob"):
        if not isinstance(x[key], list) or len(x[key]) != f:
            raise ConfigError(f"{where}.{key}: expected {f} matrices")
        mats[key] = []
        for j, A in enumerate(x[key]):
            wj = f"{where}.{key}[{j}]"
            if not isinstance(A, list) or len(A) != h or any(not isinstance(r, list) or len(r) != h for r in A):
                raise ConfigError(f"{wj}: expected a {h}x{h} matrix of series")
            rows = []
            for r in A:
                row = []
                for c in r:
                    ser = _ints(c, wj, 0)
                    if len(ser) != R.prec or any(v >= F.q for v in ser):
                        raise ConfigError(f"{wj}: series must have {R.prec} coefficients in GF({F.q})")
                    row.append(tuple(ser))
                rows.append(row)
            mats[key].append(rows)
    return FactorLift(R, tuple(mats["ver"]), tuple(mats["frob"]))


def parse_datum(pel: PELDatum, x: Any, where: str) -> FVDatum:
    x = _obj(x, where, {"field", "factors"}, {"factors"})
    if "field" in x:
        fl = _obj(x["field"], where + ".field", {"p", "m"}, {"p", "m"})
        if (fl["p"], fl["m"]) != (pel.p, pel.m):
            raise ConfigError(f"{where}.field does not match pel")
    F = pel.field
    if not isinstance(x["factors"], list) or len(x["factors"]) != len(pel.factors):
        raise ConfigError(f"{where}.factors: expected one entry per pel factor")
    out = []
    for i, (fac, fx) in enumerate(zip(pel.factors, x["factors"])):
        w = f"{where}.factors[{i}]"
        fx = _obj(fx, w, {"factor", "H", "splittings", "frob", "ver", "pairing", "lift"},
                  {"H", "splittings", "frob", "ver"})
        h = _int(fx["H"], w + ".H", 1)
        if h != fac.host_rank:
            raise ConfigError(f"{w}.H: expected rank {fac.host_rank}")
        H = EpsModule(F, fac.e, h)
        for key in ("splittings", "frob", "ver"):
            if not isinstance(fx[key], list) or len(fx[key]) != fac.f:
                raise ConfigError(f"{w}.{key}: expected {fac.f} entries")
        sps = []
        for j, sx in enumerate(fx["splittings"]):
            sx = _obj(sx, f"{w}.splittings[{j}]", {"ranks", "steps"}, {"ranks", "steps"})
            if not isinstance(sx["steps"], list) or len(sx["steps"]) != fac.e + 1:
                raise ConfigError(f"{w}.splittings[{j}].steps: expected {fac.e + 1} subspaces")
            steps = []
            for k, b in enumerate(sx["steps"]):
                B = _matrix(b, f"{w}.splittings[{j}].steps[{k}]")
                if any(len(r) != H.dim or any(v >= F.q for v in r) for r in B):
                    raise ConfigError(f"{w}.splittings[{j}].steps[{k}]: bad basis vectors")
                steps.append(Subspace.span(F, H.dim, B))
            sps.append(SplittingStructure(H, tuple(steps), tuple(_ints(sx["ranks"], f"{w}.ranks", 0))))
        frob = tuple(_parse_map(F, m, f"{w}.frob[{j}]", H.dim) for j, m in enumerate(fx["frob"]))
        ver = tuple(_parse_map(F, m, f"{w}.ver[{j}]", H.dim) for j, m in enumerate(fx["ver"]))
        pairing = fx.get("pairing")
        G = None if pairing is None else _matrix(pairing, w + ".pairing")
        lift = None if fx.get("lift") is None else _parse_lift(F, fx["lift"], w + ".lift", fac.f, h)
        out.append(FactorData(fac, H, tuple(sps), frob, ver, G, lift))
    return FVDatum(pel, tuple(out))


# -- run configuration ---------------------------------------------------------

TOP_KEYS = {"format", "pel", "seed", "count", "q", "precision", "hilbert", "adm", "group", "data"}


@dataclass
class RunConfig:
    pel: PELDatum | None = None
    seed: int = 0
    count: int = 1
    q: list[int] = field(default_factory=list)
    precision: int | None = None
    hilbert: tuple[list[int], list[int]] | None = None
    adm: tuple[str, tuple[int, ...]] | None = None
    group: VertexSpec | None = None
    data: list[FVDatum] | None = None


def parse_config(raw: Any) -> RunConfig:
    x = _obj(raw, "config", TOP_KEYS, {"format"})
    if x["format"] != FORMAT:
        raise ConfigError(f"config: format must be {FORMAT!r}")
    cfg = RunConfig()
    try:
        if "pel" in x:
            cfg.pel = parse_pel(x["pel"])
        if "seed" in x:
            cfg.seed = _int(x["seed"], "seed", 0)
        if "count" in x:
            cfg.count = _int(x["count"], "count", 0)
        if "q" in x:
            cfg.q = _ints(x["q"], "q", 2)
        if x.get("precision") is not None:
            cfg.precision = _int(x["precision"], "precision", 1)
        if "hilbert" in x:
            hx = _obj(x["hilbert"], "hilbert", {"e", "f"}, {"e", "f"})
            cfg.hilbert = (_ints(hx["e"], "hilbert.e", 1), _ints(hx["f"], "hilbert.f", 1))
            if len(cfg.hilbert[0]) != len(cfg.hilbert[1]) or not cfg.hilbert[0]:
                raise ConfigError("hilbert: e and f must be non-empty lists of equal length")
        if "adm" in x:
            ax = _obj(x["adm"], "adm", {"group", "mu"}, {"group", "mu"})
            if ax["group"] not in ("GL", "GSp"):
                raise ConfigError("adm.group must be 'GL' or 'GSp'")
            cfg.adm = (ax["group"], tuple(_ints(ax["mu"], "adm.mu")))
        if "group" in x:
            gx = _obj(x["group"], "group", {"kind", "h", "c"}, {"kind", "h", "c"})
            cfg.group = VertexSpec(gx["kind"], _int(gx["h"], "group.h", 1), _int(gx["c"], "group.c", 0))
        if "data" in x:
            if cfg.pel is None:
                raise ConfigError("data: needs pel")
            if not isinstance(x["data"], list):
                raise ConfigError("data: expected a list")
            cfg.data = [parse_datum(cfg.pel, d, f"data[{i}]") for i, d in enumerate(x["data"])]
    except (SignatureError, FieldError) as ex:
        raise ConfigError(str(ex)) from ex
    except ValueError as ex:
        if isinstance(ex, ConfigError):
            raise
        raise ConfigError(str(ex)) from ex
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as ex:
        raise ConfigError(f"cannot read {path}: {ex.strerror}") from ex
    except json.JSONDecodeError as ex:
        raise ConfigError(f"{path}: invalid JSON ({ex.msg} at line {ex.lineno})") from ex
    return parse_config(raw)


def prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if q % p == 0:
            m, r = 0, q
            while r % p == 0:
                r //= p
                m += 1
            if r != 1:
                break
            return p, m
    raise ConfigError(f"q={q} is not a prime power")


# -- commands --------------------------------------------------------------------

@dataclass
class Result:
    text: str
    code: int = EXIT_OK


def _need_pel(cfg: RunConfig) -> PELDatum:
    if cfg.pel is None:
        raise ConfigError("this command needs a pel section")
    return cfg.pel


def _data(cfg: RunConfig) -> list[tuple[int, FVDatum]]:
    """Embedded data if present, else cfg.count samples; sample i uses stream (seed, i)."""
    if cfg.data is not None:
        return list(enumerate(cfg.data))
    pel = _need_pel(cfg)
    return [(i, sample_fv(pel, stream(cfg.seed, i))) for i in range(cfg.count)]


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def invariant_failures(d: FVDatum, precision: int | None = None) -> list[dict]:
    """Every invariant of one datum; each failure names the violated check."""
    rep = validate_fv(d)
    if not rep:
        return [{"check": "datum/" + (rep.condition or "invalid"), "factor": rep.factor, "j": rep.j,
                 "detail": rep.detail}]
    z = assemble_zip(d, check=False)
    zrep = verify_zip(z)
    if not zrep:
        return [{"check": "zip/" + what, "factor": i, "j": j, "l": l} for i, j, l, what in zrep.failures]
    out = []
    for i, (fd, fz) in enumerate(zip(d.factors, z.factors)):
        Hd, PR = hodge_polygon(fd), pr_polygon(fd.factor)
        if fd.lift is not None and not polygon_leq(newton_polygon(fd, precision), Hd):
            out.append({"check": "polygon/Newt <= Hdg", "factor": i})
        if not polygon_leq(Hd, PR):
            out.append({"check": "polygon/Hdg <= PR", "factor": i})
        if is_max_kr(fd) and Hd != PR:
            out.append({"check": "polygon/Hdg = PR at maximal KR type", "factor": i})
        if fd.factor.kind != "C":
            continue
        zt = zip_type(fz)
        red = reduced_type(fd)
        nonzero = not mu_ordinary_hasse(fz).zero
        if not nonzero == zt.is_maximal == (red is not None and red.is_maximal):
            out.append({"check": "hasse/mu-ordinary equivalence", "factor": i})
        if fd.factor.d == 1:
            hp, crit = hilbert_partial_hasse(fz), hasse_filtration_criterion(fd)
            bad = sorted(k for k in hp if hp[k].zero != crit[k])
            if bad:
                out.append({"check": "hasse/partial Hasse vs filtration", "factor": i,
                            "blocks": [list(k) for k in bad]})
    return out


def cmd_verify(cfg: RunConfig) -> Result:
    failed = []
    data = _data(cfg)
    if not data:
        print("warning: no samples, vacuous pass", file=sys.stderr)
    for i, d in data:
        for f in invariant_failures(d, cfg.precision):
            failed.append({"sample": i, **f})
    report = {"format": FORMAT, "command": "verify", "seed": cfg.seed, "samples": len(data),
              "passed": not failed, "failed": failed}
    return Result(_json(report), EXIT_OK if not failed else EXIT_INVARIANT)


def cmd_sample(cfg: RunConfig) -> Result:
    pel = _need_pel(cfg)
    data = [datum_json(d) for _, d in _data(cfg)]
    return Result(_json({"format": FORMAT, "pel": pel_json(pel), "seed": cfg.seed, "data": data}))


def cmd_classify(cfg: RunConfig) -> Result:
    results = []
    code = EXIT_OK
    for i, d in _data(cfg):
        rep = validate_fv(d)
        if not rep:
            results.append({"sample": i, "error": "datum/" + (rep.condition or "invalid")})
            code = EXIT_INVARIANT
            continue
        z = assemble_zip(d, check=False)
        zrep = verify_zip(z)
        if not zrep:
            results.append({"sample": i, "error": "zip/" + zrep.describe()})
            code = EXIT_INVARIANT
            continue
        parts = []
        for fac, fz in zip(d.pel.factors, z.factors):
            zt = zip_type(fz)
            parts.append({"label": fac.label, "w": zt.word, "length": zt.length,
                          "maximal": zt.is_maximal, "minimal": zt.is_minimal})
        word = " | ".join(p["w"] for p in parts)
        results.append({"sample": i, "w": word, "length": sum(p["length"] for p in parts), "factors": parts})
    return Result(_json({"format": FORMAT, "command": "classify", "results": results}), code)


def _hilbert_pel(cfg: RunConfig) -> list[LocalFactor]:
    if cfg.hilbert is not None:
        es, fs = cfg.hilbert
        return [LocalFactor(str(i + 1), "C", e, f, 1) for i, (e, f) in enumerate(zip(es, fs))]
    return list(_need_pel(cfg).factors)


def cmd_eo_poset(cfg: RunConfig) -> Result:
    out = []
    for i, fac in enumerate(_hilbert_pel(cfg)):
        shape = shape_of_factor(fac)
        name = "eo" if i == 0 else f"eo_{i}"
        out.append(dot_export(build_poset(shape.weyl(), shape.J()), name))
    return Result("".join(out))


def cmd_hilbert_ekor(cfg: RunConfig) -> Result:
    if cfg.hilbert is None:
        raise ConfigError("hilbert-ekor needs a hilbert section")
    table = hilbert_ekor(*cfg.hilbert)
    rows = [[";".join(map(str, t.a)), t.dim, t.t, t.ekor_count, ";".join(map(str, t.ekor_dims))]
            for t in table.types]
    return Result(_csv(["a", "dim", "t", "ekor", "ekor_dims"], rows))


def _adm_request(cfg: RunConfig) -> tuple[AffineCtx, tuple[int, ...]]:
    if cfg.adm is not None:
        kind, mu = cfg.adm
        return AffineCtx(kind, len(mu)), mu
    fac = _need_pel(cfg).factors[0]
    h = fac.host_rank
    return AffineCtx("GSp" if fac.kind == "C" else "GL", h), mu_of_ranks(fac.ranks(0), h)


def cmd_adm(cfg: RunConfig) -> Result:
    ctx, mu = _adm_request(cfg)
    A = adm(ctx, mu)
    special = A.special_maximal()
    report = {
        "format": FORMAT, "command": "adm", "group": f"{ctx.kind}{ctx.n}", "mu": list(mu),
        "size": len(A.elements),
        "elements": [{"lambda": list(a[0]), "w": list(a[1]), "length": A.lengths[a]} for a in A.elements],
        "maximal": [{"lambda": list(a[0]), "w": list(a[1])} for a in A.maximal()],
        "special_classes": [list(c) for c in A.special_classes()],
        "special_maximal": [list(c) for c in special],
    }
    return Result(_json(report), EXIT_OK if special == [mu] else EXIT_INVARIANT)


def cmd_point_count(cfg: RunConfig) -> Result:
    if cfg.group is None:
        raise ConfigError("point-count needs a group section")
    if not cfg.q:
        raise ConfigError("point-count needs a q list")
    vertex = cfg.group
    shape = ZipShape((vertex,), (1,))
    W = shape.weyl()
    rows, code = [], EXIT_OK
    for q in cfg.q:
        F = make_field(*prime_power(q))
        counts = point_counts(shape, F)
        if sum(counts.values()) != group_order(vertex, q):
            code = EXIT_INVARIANT
        for w in sorted(counts, key=lambda u: (W.length(u), W.word_label(u))):
            rows.append([q, W.word_label(w), counts[w]])
    return Result(_csv(["q", "w", "count"], rows), code)


def cmd_polygons(cfg: RunConfig) -> Result:
    rows, code = [], EXIT_OK
    for i, d in _data(cfg):
        for k, fd in enumerate(d.factors):
            polys = {"hodge": hodge_polygon(fd), "pr": pr_polygon(fd.factor)}
            if fd.lift is not None:
                polys = {"newton": newton_polygon(fd, cfg.precision), **polys}
                if not polygon_leq(polys["newton"], polys["hodge"]):
                    code = EXIT_INVARIANT
            if not polygon_leq(polys["hodge"], polys["pr"]):
                code = EXIT_INVARIANT
            for name, P in polys.items():
                for s, y in enumerate(P.ys):
                    rows.append([i, k, name, s, str(y)])
    return Result(_csv(["sample", "factor", "polygon", "s", "y"], rows), code)


HANDLERS: dict[str, Callable[[RunConfig], Result]] = {
    "verify": cmd_verify,
    "sample": cmd_sample,
    "classify": cmd_classify,
    "eo-poset": cmd_eo_poset,
    "hilbert-ekor": cmd_hilbert_ekor,
    "adm": cmd_adm,
    "point-count": cmd_point_count,
    "polygons": cmd_polygons,
}


# -- entry point -------------------------------------------------------------------

def _q_list(s: str) -> list[int]:
    try:
        qs = [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad q list {s!r}")
    if not qs or any(q < 2 for q in qs):
        raise argparse.ArgumentTypeError(f"bad q list {s!r}")
    return qs


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zipstrat", description="F-zip and EO stratification toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON config with format zipstrat/1")
    ap.add_argument("--seed", type=int, help="root seed (overrides the config)")
    ap.add_argument("--count", type=int, help="number of samples (overrides the config)")
    ap.add_argument("--q", type=_q_list, help="comma-separated field sizes, e.g. 2,3,4")
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--version", action="version", version=f"zipstrat {__version__}")
    return ap


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be >= 0")
            cfg.seed = args.seed
        if args.count is not None:
            if args.count < 0:
                raise ConfigError("--count must be >= 0")
            cfg.count = args.count
        if args.q is not None:
            cfg.q = args.q
        res = HANDLERS[args.command](cfg)
    except (ClassificationError, LemmaViolation) as ex:
        print(f"zipstrat: invariant failure: {ex}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ValueError, SizeBoundError) as ex:
        print(f"zipstrat: error: {ex}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(res.text)
    else:
        sys.stdout.write(res.text)
    return res.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
