"""JSON instance files: parsing, canonical serialization, kind detection."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict

from ..errors import ParseError, TreeLCError
from ..exactnum import format_ext, format_rational, is_neg_inf, parse_ext, parse_rational
from ..matroid import Matroid
from ..poly import HomogPoly, MConvexFunction
from ..setfn import SetFunction, ValuatedMatroid
from ..symmat import Inertia, NotPsd, Psd, Relax, RowOp
from ..trees import UltrametricTree, tree_from_ultrametric, vkey
from ..verdict import elements_of, mask_of

KINDS = ("setfunction", "valuated", "matroid", "tree", "poly", "mconvex")


@dataclass
class Instance:
    kind: str
    obj: Any
    provenance: Dict[str, Any] = field(default_factory=dict)


# --------------------------------------------------------------------------
# to JSON


def _sorted_sets(masks):
    return [elements_of(m) for m in sorted(masks)]


def setfunction_to_json(nu: SetFunction) -> dict:
    vals = [{"set": elements_of(S), "v": format_ext(v)} for S, v in enumerate(nu.values) if not is_neg_inf(v)]
    return {"n": nu.n, "default": "-inf", "values": vals}


def valuated_to_json(vm: ValuatedMatroid) -> dict:
    vals = [{"set": elements_of(B), "v": format_ext(v)} for B, v in sorted(vm.values.items())]
    return {"n": vm.n, "d": vm.d, "values": vals}


def matroid_to_json(M: Matroid) -> dict:
    return {"n": M.n, "independent": _sorted_sets(M.independent)}


def tree_to_json(T: UltrametricTree) -> dict:
    edges = sorted(T.edges(), key=lambda e: (vkey(e[0]), vkey(e[1])))
    return {"root": T.root, "edges": [[p, c, format_rational(ell)] for p, c, ell in edges]}


def poly_to_json(f: HomogPoly) -> dict:
    terms = [{"exp": list(e), "c": format_ext(c)} for e, c in f.terms.items()]
    return {"nvars": f.nvars, "degree": f.degree, "terms": terms}


def mconvex_to_json(nu: MConvexFunction) -> dict:
    return {"n": nu.n, "d": nu.d, "points": [{"exp": list(a), "v": format_rational(v)} for a, v in nu.values.items()]}


_WRITERS = {
    "setfunction": setfunction_to_json,
    "valuated": valuated_to_json,
    "matroid": matroid_to_json,
    "tree": tree_to_json,
    "poly": poly_to_json,
    "mconvex": mconvex_to_json,
}


def instance_to_json(inst: Instance) -> dict:
    out = {"kind": inst.kind}
    out.update(_WRITERS[inst.kind](inst.obj))
    if inst.provenance:
        out["provenance"] = inst.provenance
    return out


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def dump_instance(inst: Instance) -> str:
    return dumps_canonical(instance_to_json(inst))


# --------------------------------------------------------------------------
# from JSON


def detect_kind(data: dict) -> str:
    if "kind" in data:
        if data["kind"] not in KINDS:
            raise ParseError(f"unknown kind {data['kind']!r}")
        return data["kind"]
    if "edges" in data and "root" in data or "d" in data and isinstance(data["d"], list):
        return "tree"
    if "terms" in data:
        return "poly"
    if "points" in data:
        return "mconvex"
    if "independent" in data or "uniform_rank" in data or "graph_edges" in data or "bases" in data:
        return "matroid"
    if "values" in data and "d" in data:
        return "valuated"
    if "values" in data:
        return "setfunction"
    raise ParseError("cannot determine the instance kind")


def _values(entries):
    for ent in entries:
        v = ent["v"]
        yield mask_of(ent["set"]), parse_ext(v) if isinstance(v, str) else Fraction(v)


def instance_from_json(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    kind = detect_kind(data)
    prov = data.get("provenance", {})
    try:
        if kind == "setfunction":
            n = int(data["n"])
            default = parse_ext(str(data.get("default", "-inf")))
            vals = [default] * (1 << n)
            for m, v in _values(data["values"]):
                vals[m] = v
            return Instance(kind, SetFunction(n, vals), prov)
        if kind == "valuated":
            return Instance(kind, ValuatedMatroid(int(data["n"]), int(data["d"]), dict(_values(data["values"]))), prov)
        if kind == "matroid":
            if "graph_edges" in data:
                M = Matroid.graphic(data["graph_edges"])
            elif "uniform_rank" in data:
                M = Matroid.uniform(int(data["uniform_rank"]), int(data["n"]))
            elif "bases" in data:
                M = Matroid.from_bases(int(data["n"]), data["bases"])
            else:
                M = Matroid.from_sets(int(data["n"]), data["independent"])
            return Instance(kind, M, prov)
        if kind == "tree":
            if "edges" in data:
                edges = [(p, c, parse_rational(str(ell))) for p, c, ell in data["edges"]]
                T = UltrametricTree(data["root"], edges)
            else:
                T = tree_from_ultrametric([[parse_rational(str(x)) for x in row] for row in data["d"]])
            return Instance(kind, T, prov)
        if kind == "poly":
            terms = {}
            for t in data["terms"]:
                c = t["c"]
                terms[tuple(t["exp"])] = parse_rational(c) if isinstance(c, str) else Fraction(c)
            return Instance(kind, HomogPoly(int(data["nvars"]), int(data["degree"]), terms), prov)
        if kind == "mconvex":
            pts = {tuple(p["exp"]): parse_rational(str(p["v"])) for p in data["points"]}
            return Instance(kind, MConvexFunction(int(data["n"]), int(data["d"]), pts), prov)
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, TreeLCError) as exc:
        raise ParseError(f"invalid {kind} instance: {exc}") from exc
    raise ParseError(f"unsupported kind {kind!r}")


def loads_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return instance_from_json(data)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_instance(inst))


# --------------------------------------------------------------------------
# report values


def jsonable(x):
    """Convert verdict witnesses, margins and certificates into plain JSON values."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, float):
        return "-inf" if is_neg_inf(x) else x
    if isinstance(x, Inertia):
        return [x.n_pos, x.n_zero, x.n_neg]
    if isinstance(x, RowOp):
        return {"op": "row", "target": x.target, "source": x.source, "factor": jsonable(x.factor)}
    if isinstance(x, Relax):
        return {"op": "relax", "index": x.index, "amount": jsonable(x.amount)}
    if isinstance(x, NotPsd):
        return {"psd": False, "witness": jsonable(x.witness), "value": jsonable(x.value)}
    if isinstance(x, Psd):
        return {"psd": True, "pivots": jsonable(x.pivots), "steps": jsonable(x.steps)}
    if isinstance(x, HomogPoly):
        return poly_to_json(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "__dataclass_fields__"):
        return {k: jsonable(getattr(x, k)) for k in x.__dataclass_fields__}
    return str(x)
