"""Canonical text and JSON serialization for every toolkit object.

Text files are line-oriented: a ring line, an object-kind line, then the
object's fields in a fixed order.  Matrices print as `RxC [[a, b], ...]`
with entries in the element grammar, so every format round-trips byte for
byte.  JSON files carry the same content keyed by field name.
"""

from __future__ import annotations

import json
import re

from .complexes import ChainComplex, ChainMap
from .descent import (
    Assignment, Equation, PolynomialSystem, SystemShape, SystemVariable,
    VarPoly, format_varpoly, variable_sort_key,
)
from .dgmodules import DGModule
from .duality import ModulePresentation
from .errors import FormatError
from .koszul import KoszulAlgebra, koszul
from .matrices import Matrix
from .rings import RingHom, format_element, make_ring, parse_element, ring_spec


# ---------------------------------------------------------------------------
# matrices


def format_matrix(M):
    rows = ", ".join(
        "[" + ", ".join(format_element(x) for x in row) + "]" for row in M.data)
    return f"{M.rows}x{M.cols} [{rows}]"


def parse_matrix(ring, text):
    m = re.fullmatch(r"\s*(\d+)x(\d+)\s*\[(.*)\]\s*", text, re.S)
    if not m:
        raise FormatError(f"bad matrix syntax: {text[:40]!r}")
    rows, cols, body = int(m.group(1)), int(m.group(2)), m.group(3).strip()
    if rows == 0:
        return Matrix.zeros(ring, 0, cols)
    row_texts = re.findall(r"\[(.*?)\]", body)
    if len(row_texts) != rows:
        raise FormatError(f"expected {rows} rows, found {len(row_texts)}")
    data = []
    for rt in row_texts:
        entries = [e.strip() for e in rt.split(",")] if rt.strip() else []
        if len(entries) != cols:
            raise FormatError(f"expected {cols} entries per row, got {len(entries)}")
        data.append([parse_element(ring, e) for e in entries])
    if cols == 0:
        return Matrix.zeros(ring, rows, 0)
    return Matrix.from_rows(ring, data)


def _sequence_text(elements):
    return "[" + ", ".join(format_element(a) for a in elements) + "]"


def _parse_sequence(ring, text):
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise FormatError(f"bad sequence: {text!r}")
    inner = body[1:-1].strip()
    if not inner:
        return []
    return [parse_element(ring, t.strip()) for t in inner.split(",")]


def _subset_text(H):
    return "{" + ",".join(str(i) for i in H) + "}"


def _parse_subset(text):
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise FormatError(f"bad subset: {text!r}")
    inner = body[1:-1].strip()
    return tuple(int(t) for t in inner.split(",")) if inner else ()


# ---------------------------------------------------------------------------
# line-file scaffolding


def _split_lines(text):
    out = []
    for raw in text.splitlines():
        line = raw.rstrip()
        if line and not line.lstrip().startswith("#"):
            out.append(line)
    return out


def _expect_kind(lines, kind):
    if len(lines) < 2:
        raise FormatError("truncated file")
    if lines[1].strip() != kind:
        raise FormatError(f"expected a {kind} file, found {lines[1].strip()!r}")
    return make_ring(lines[0].removeprefix("ring").strip())


def _field_lines(lines, prefix):
    out = []
    for line in lines:
        if line.startswith(prefix):
            out.append(line[len(prefix):])
    return out


# ---------------------------------------------------------------------------
# complexes


def save_complex(M):
    lines = [f"ring {ring_spec(M.ring)}", "complex"]
    for n in sorted(M.support):
        lines.append(f"rank {n} = {M.rank(n)}")
    for n in sorted(M._diffs):
        lines.append(f"diff {n} = {format_matrix(M.diff(n))}")
    return "\n".join(lines) + "\n"


def load_complex(text):
    lines = _split_lines(text)
    ring = _expect_kind(lines, "complex")
    ranks, diffs = {}, {}
    for line in lines[2:]:
        m = re.fullmatch(r"rank\s+(-?\d+)\s*=\s*(\d+)", line)
        if m:
            ranks[int(m.group(1))] = int(m.group(2))
            continue
        m = re.fullmatch(r"diff\s+(-?\d+)\s*=\s*(.*)", line)
        if m:
            diffs[int(m.group(1))] = parse_matrix(ring, m.group(2))
            continue
        raise FormatError(f"unrecognized complex line: {line!r}")
    return ChainComplex(ring, ranks, diffs)


# ---------------------------------------------------------------------------
# koszul algebras


def save_koszul(K):
    return (f"ring {ring_spec(K.ring)}\nkoszul\n"
            f"sequence {_sequence_text(K.elements)}\n")


def load_koszul(text):
    lines = _split_lines(text)
    ring = _expect_kind(lines, "koszul")
    seqs = _field_lines(lines[2:], "sequence ")
    if len(seqs) != 1:
        raise FormatError("koszul file needs exactly one sequence line")
    return koszul(ring, _parse_sequence(ring, seqs[0]))


# ---------------------------------------------------------------------------
# DG modules


def save_dg_module(D):
    K = D.algebra
    lines = [f"ring {ring_spec(K.ring)}", "dgmodule",
             f"sequence {_sequence_text(K.elements)}"]
    under = D.underlying
    for n in sorted(under.support):
        lines.append(f"rank {n} = {under.rank(n)}")
    for n in sorted(under._diffs):
        lines.append(f"diff {n} = {format_matrix(under.diff(n))}")
    for H in sorted(D.action, key=lambda S: (len(S), S)):
        per = D.action[H]
        for n in sorted(per):
            lines.append(f"act {_subset_text(H)} {n} = {format_matrix(per[n])}")
    return "\n".join(lines) + "\n"


def load_dg_module(text):
    lines = _split_lines(text)
    ring = _expect_kind(lines, "dgmodule")
    sequence = None
    ranks, diffs = {}, {}
    action = {}
    for line in lines[2:]:
        if line.startswith("sequence "):
            sequence = _parse_sequence(ring, line[len("sequence "):])
            continue
        m = re.fullmatch(r"rank\s+(-?\d+)\s*=\s*(\d+)", line)
        if m:
            ranks[int(m.group(1))] = int(m.group(2))
            continue
        m = re.fullmatch(r"diff\s+(-?\d+)\s*=\s*(.*)", line)
        if m:
            diffs[int(m.group(1))] = parse_matrix(ring, m.group(2))
            continue
        m = re.fullmatch(r"act\s+(\{[^}]*\})\s+(-?\d+)\s*=\s*(.*)", line)
        if m:
            H = _parse_subset(m.group(1))
            action.setdefault(H, {})[int(m.group(2))] = parse_matrix(ring, m.group(3))
            continue
        raise FormatError(f"unrecognized dgmodule line: {line!r}")
    if sequence is None:
        raise FormatError("dgmodule file needs a sequence line")
    K = koszul(ring, sequence)
    under = ChainComplex(ring, ranks, diffs)
    full_action = {}
    for H in (S for d in K.basis.values() for S in d):
        per = {}
        for n in under.degrees():
            rows = under.rank(n + len(H))
            cols = under.rank(n)
            got = action.get(H, {}).get(n)
            if got is not None:
                per[n] = got
            elif rows and cols:
                per[n] = Matrix.zeros(ring, rows, cols)
        full_action[H] = per
    D = DGModule(K, under, full_action)
    from .dgmodules import verify_dg_module
    report = verify_dg_module(D)
    if not report.ok:
        first = report.failures()[0]
        raise FormatError(
            f"serialized module fails the {first.name} axiom ({first.counterexample})")
    return D


# ---------------------------------------------------------------------------
# module presentations


def save_presentation(P):
    return (f"ring {ring_spec(P.ring)}\nmodule\ngens {P.gens}\n"
            f"relations {format_matrix(P.relations)}\n")


def load_presentation(text):
    lines = _split_lines(text)
    ring = _expect_kind(lines, "module")
    gens = None
    rel = None
    for line in lines[2:]:
        if line.startswith("gens "):
            gens = int(line[len("gens "):])
        elif line.startswith("relations "):
            if gens is None:
                raise FormatError("gens line must precede relations")
            rel = parse_matrix(ring, line[len("relations "):])
        else:
            raise FormatError(f"unrecognized module line: {line!r}")
    if gens is None:
        raise FormatError("module file needs a gens line")
    if rel is None:
        rel = Matrix.zeros(ring, gens, 0)
    return ModulePresentation(ring, gens, rel)


# ---------------------------------------------------------------------------
# chain maps


def save_chain_map(phi):
    lines = [f"ring {ring_spec(phi.source.ring)}", "map"]
    for n in sorted(phi.components):
        lines.append(f"component {n} = {format_matrix(phi.components[n])}")
    return "\n".join(lines) + "\n"


def load_chain_map(text, source, target):
    lines = _split_lines(text)
    ring = _expect_kind(lines, "map")
    comps = {}
    for line in lines[2:]:
        m = re.fullmatch(r"component\s+(-?\d+)\s*=\s*(.*)", line)
        if not m:
            raise FormatError(f"unrecognized map line: {line!r}")
        comps[int(m.group(1))] = parse_matrix(ring, m.group(2))
    return ChainMap(source, target, comps)


# ---------------------------------------------------------------------------
# descent systems and assignments
#
# Equation lines:  S1|S2|S4  n row col : polynomial
#                  S3 h=<k> n row col : polynomial
# Variable tokens X_n_i_j / Y_n_i_j / Z_n_i_j extend the element grammar.


_VAR_TOKEN = re.compile(r"([XYZ])_(\d+)_(\d+)_(\d+)")


def save_system(system):
    shape = system.shape
    lines = [f"ring {ring_spec(system.ring)}", "system",
             f"m={shape.m} e={shape.e} s={list(shape.s)} r={list(shape.r)}"]
    for eq in system.equations:
        poly = format_varpoly(eq.poly)
        if eq.tag == "S3":
            lines.append(f"{eq.tag} h={eq.h} {eq.n} {eq.row} {eq.col} : {poly}")
        else:
            lines.append(f"{eq.tag} {eq.n} {eq.row} {eq.col} : {poly}")
    return "\n".join(lines) + "\n"


def parse_varpoly(ring, text):
    def hook(name):
        m = _VAR_TOKEN.fullmatch(name)
        if m is None:
            return None
        var = SystemVariable(m.group(1), int(m.group(2)), int(m.group(3)),
                             int(m.group(4)))
        return VarPoly.variable(ring, var)
    parsed = parse_element(ring, text, variable_hook=hook)
    if isinstance(parsed, VarPoly):
        return parsed
    return VarPoly.constant(ring, parsed)


def load_system(text):
    """Parse a serialized system (header plus equations).

    The result verifies assignments; reconstruction needs the Koszul and
    module data, which the CLI re-derives from their own files.
    """
    lines = _split_lines(text)
    ring = _expect_kind(lines, "system")
    header = lines[2]
    m = re.fullmatch(
        r"m=(\d+)\s+e=(\d+)\s+s=\[([0-9, ]*)\]\s+r=\[([0-9, ]*)\]", header)
    if not m:
        raise FormatError(f"bad system header: {header!r}")
    mm, ee = int(m.group(1)), int(m.group(2))
    s = tuple(int(t) for t in m.group(3).split(",")) if m.group(3).strip() else ()
    r = tuple(int(t) for t in m.group(4).split(",")) if m.group(4).strip() else ()
    shape = SystemShape(mm, ee, s, r)
    from math import comb
    for n in range(mm + ee + 1):
        expected = sum(comb(ee, n - p) * shape.s_at(p)
                       for p in range(mm + 1) if 0 <= n - p <= ee)
        if shape.r_at(n) != expected:
            raise FormatError(
                f"header ranks are inconsistent at degree {n}: "
                f"{shape.r_at(n)} vs {expected}")
    equations = []
    variables = set()
    eq_re = re.compile(
        r"(S[1-4])\s+(?:h=(\d+)\s+)?(-?\d+)\s+(\d+)\s+(\d+)\s*:\s*(.*)")
    for line in lines[3:]:
        m = eq_re.fullmatch(line)
        if not m:
            raise FormatError(f"bad equation line: {line!r}")
        tag, h, n, row, col, poly_text = m.groups()
        poly = parse_varpoly(ring, poly_text)
        equations.append(Equation(tag, int(h) if h else None, int(n),
                                  int(row), int(col), poly))
        variables.update(poly.variables())
    vars_sorted = expected_variables(shape)
    return PolynomialSystem(ring, shape, vars_sorted, equations, (), {}, {}, None)


def expected_variables(shape):
    out = []
    for n in range(1, shape.m + 1):
        for i in range(shape.s_at(n - 1)):
            for j in range(shape.s_at(n)):
                out.append(SystemVariable("X", n, i + 1, j + 1))
    for n in range(0, shape.m + shape.e + 1):
        for i in range(shape.r_at(n)):
            for j in range(shape.r_at(n)):
                out.append(SystemVariable("Y", n, i + 1, j + 1))
    for n in range(0, shape.m + shape.e + 1):
        for i in range(shape.r_at(n + 1) + shape.r_at(n)):
            for j in range(shape.r_at(n) + shape.r_at(n - 1)):
                out.append(SystemVariable("Z", n, i + 1, j + 1))
    out.sort(key=variable_sort_key)
    return out


def save_assignment(assignment):
    lines = [f"ring {ring_spec(assignment.target)}", "assignment"]
    for var in sorted(assignment.values, key=variable_sort_key):
        lines.append(f"{var.token()} = {format_element(assignment.values[var])}")
    return "\n".join(lines) + "\n"


def load_assignment(text, coefficient_ring=None):
    """Parse an assignment; the homomorphism from the coefficient ring is
    the identity for a matching ring and the canonical map from Z."""
    lines = _split_lines(text)
    ring = _expect_kind(lines, "assignment")
    values = {}
    for line in lines[2:]:
        m = re.fullmatch(r"([XYZ])_(\d+)_(\d+)_(\d+)\s*=\s*(.*)", line)
        if not m:
            raise FormatError(f"bad assignment line: {line!r}")
        var = SystemVariable(m.group(1), int(m.group(2)), int(m.group(3)),
                             int(m.group(4)))
        values[var] = parse_element(ring, m.group(5))
    src = coefficient_ring if coefficient_ring is not None else ring
    if src == ring:
        hom = RingHom.identity(ring)
    else:
        hom = RingHom(src, ring)
    return Assignment(hom, values)


# ---------------------------------------------------------------------------
# JSON mirror


def to_json(obj):
    """Structured interchange form of any serializable toolkit object."""
    if isinstance(obj, ChainComplex):
        return json.dumps({
            "kind": "complex", "ring": ring_spec(obj.ring),
            "ranks": {str(n): obj.rank(n) for n in sorted(obj.support)},
            "diffs": {str(n): format_matrix(obj.diff(n))
                      for n in sorted(obj._diffs)},
        }, indent=1, sort_keys=True) + "\n"
    if isinstance(obj, KoszulAlgebra):
        return json.dumps({
            "kind": "koszul", "ring": ring_spec(obj.ring),
            "sequence": [format_element(a) for a in obj.elements],
        }, indent=1, sort_keys=True) + "\n"
    if isinstance(obj, DGModule):
        return json.dumps({
            "kind": "dgmodule", "ring": ring_spec(obj.algebra.ring),
            "sequence": [format_element(a) for a in obj.algebra.elements],
            "ranks": {str(n): obj.underlying.rank(n)
                      for n in sorted(obj.underlying.support)},
            "diffs": {str(n): format_matrix(obj.underlying.diff(n))
                      for n in sorted(obj.underlying._diffs)},
            "action": {_subset_text(H): {str(n): format_matrix(mat)
                                         for n, mat in sorted(per.items())}
                       for H, per in sorted(obj.action.items(),
                                            key=lambda kv: (len(kv[0]), kv[0]))},
        }, indent=1, sort_keys=True) + "\n"
    if isinstance(obj, PolynomialSystem):
        return json.dumps({
            "kind": "system", "ring": ring_spec(obj.ring),
            "m": obj.shape.m, "e": obj.shape.e,
            "s": list(obj.shape.s), "r": list(obj.shape.r),
            "equations": [
                {"tag": eq.tag, **({"h": eq.h} if eq.h is not None else {}),
                 "n": eq.n, "row": eq.row, "col": eq.col,
                 "poly": format_varpoly(eq.poly)}
                for eq in obj.equations],
        }, indent=1, sort_keys=True) + "\n"
    if isinstance(obj, Assignment):
        return json.dumps({
            "kind": "assignment", "ring": ring_spec(obj.target),
            "values": {v.token(): format_element(x)
                       for v, x in sorted(obj.values.items(),
                                          key=lambda kv: variable_sort_key(kv[0]))},
        }, indent=1, sort_keys=True) + "\n"
    if isinstance(obj, ModulePresentation):
        return json.dumps({
            "kind": "module", "ring": ring_spec(obj.ring),
            "gens": obj.gens, "relations": format_matrix(obj.relations),
        }, indent=1, sort_keys=True) + "\n"
    raise FormatError(f"no JSON form for {type(obj).__name__}")


def from_json(text):
    data = json.loads(text)
    kind = data.get("kind")
    ring = make_ring(data["ring"])
    if kind == "complex":
        ranks = {int(n): r for n, r in data["ranks"].items()}
        diffs = {int(n): parse_matrix(ring, t) for n, t in data["diffs"].items()}
        return ChainComplex(ring, ranks, diffs)
    if kind == "koszul":
        return koszul(ring, [parse_element(ring, t) for t in data["sequence"]])
    if kind == "dgmodule":
        text_lines = [f"ring {data['ring']}", "dgmodule",
                      "sequence [" + ", ".join(data["sequence"]) + "]"]
        for n, r in sorted(data["ranks"].items(), key=lambda kv: int(kv[0])):
            text_lines.append(f"rank {n} = {r}")
        for n, t in sorted(data["diffs"].items(), key=lambda kv: int(kv[0])):
            text_lines.append(f"diff {n} = {t}")
        for H, per in data["action"].items():
            for n, t in sorted(per.items(), key=lambda kv: int(kv[0])):
                text_lines.append(f"act {H} {n} = {t}")
        return load_dg_module("\n".join(text_lines) + "\n")
    if kind == "system":
        lines = [f"ring {data['ring']}", "system",
                 f"m={data['m']} e={data['e']} s={data['s']} r={data['r']}"]
        for eq in data["equations"]:
            if "h" in eq:
                lines.append(f"{eq['tag']} h={eq['h']} {eq['n']} {eq['row']} "
                             f"{eq['col']} : {eq['poly']}")
            else:
                lines.append(f"{eq['tag']} {eq['n']} {eq['row']} {eq['col']} : "
                             f"{eq['poly']}")
        return load_system("\n".join(lines) + "\n")
    if kind == "assignment":
        lines = [f"ring {data['ring']}", "assignment"]
        for tok, val in data["values"].items():
            lines.append(f"{tok} = {val}")
        return load_assignment("\n".join(lines) + "\n")
    if kind == "module":
        return ModulePresentation(ring, data["gens"],
                                  parse_matrix(ring, data["relations"]))
    raise FormatError(f"unknown JSON kind {kind!r}")


# ---------------------------------------------------------------------------
# extension-aware entry points


_SAVERS = {
    ChainComplex: save_complex,
    KoszulAlgebra: save_koszul,
    DGModule: save_dg_module,
    ModulePresentation: save_presentation,
    PolynomialSystem: save_system,
    Assignment: save_assignment,
}


def save(obj, path):
    import pathlib
    p = pathlib.Path(path)
    if p.suffix == ".json":
        p.write_text(to_json(obj), encoding="utf-8")
        return
    for cls, fn in _SAVERS.items():
        if isinstance(obj, cls):
            p.write_text(fn(obj), encoding="utf-8")
            return
    raise FormatError(f"cannot serialize {type(obj).__name__}")


_LOADERS = {
    "complex": load_complex,
    "koszul": load_koszul,
    "dgmodule": load_dg_module,
    "module": load_presentation,
    "system": load_system,
}


def load(path, coefficient_ring=None):
    import pathlib
    p = pathlib.Path(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".json":
        return from_json(text)
    lines = _split_lines(text)
    if len(lines) < 2:
        raise FormatError(f"truncated file {path}")
    kind = lines[1].strip()
    if kind == "assignment":
        return load_assignment(text, coefficient_ring)
    loader = _LOADERS.get(kind)
    if loader is None:
        raise FormatError(f"unknown object kind {kind!r} in {path}")
    return loader(text)
