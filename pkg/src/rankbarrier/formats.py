"""JSON reading and writing for every object the command line consumes or emits.

Parse errors carry a location: either the line/column from the JSON decoder or
a path such as ``entries[1][0].terms[2].coef`` into the document. Tensor
indices and block subsets are 1-based on disk and 0-based in memory.
"""

from __future__ import annotations

import json
from typing import Any

from .decomposition import HomDecomposition, SMDecomposition, SymbolicDecomposition
from .depth3 import PsiImage
from .field import QQ, Field, FieldError
from .poly import BASES, Polynomial
from .polymatrix import PolyMatrix
from .rank_methods import FAMILIES, TENSOR, WARING, LinearMap, RankMethodError, Tensor


class FormatError(ValueError):
    """Malformed input document; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = "$"):
        super().__init__(f"{where}: {message}")
        self.message = message
        self.where = where

    def to_dict(self) -> dict:
        return {"error": "format", "where": self.where, "message": self.message}


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc


def load_file(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(str(exc.strerror or exc), path) from exc
    return loads(text)


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


# ----- small validators -------------------------------------------------------

def _require(doc: Any, key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise FormatError("expected an object", where)
    if key not in doc:
        raise FormatError(f"missing key {key!r}", where)
    return doc[key]


def _int(x: Any, where: str, lo: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"expected an integer, got {x!r}", where)
    if lo is not None and x < lo:
        raise FormatError(f"expected an integer >= {lo}, got {x}", where)
    return x


def _list(x: Any, where: str) -> list:
    if not isinstance(x, list):
        raise FormatError(f"expected a list, got {type(x).__name__}", where)
    return x


def _int_list(x: Any, where: str, lo: int | None = None) -> list[int]:
    return [_int(v, f"{where}[{i}]", lo) for i, v in enumerate(_list(x, where))]


def _coef(x: Any, field: Field, where: str):
    try:
        return field.parse(x)
    except FieldError as exc:
        raise FormatError(str(exc), where) from exc


def format_coef(c, field: Field) -> str:
    return field.format(c)


# ----- polynomials and matrices -----------------------------------------------

def polynomial_to_json(p: Polynomial) -> dict:
    return {
        "vars": p.nvars,
        "basis": p.basis,
        "terms": [{"exp": list(e), "coef": format_coef(c, p.field)} for e, c in p.sorted_terms()],
    }


def polynomial_from_json(doc: Any, field: Field = QQ, where: str = "$") -> Polynomial:
    n = _int(_require(doc, "vars", where), f"{where}.vars", 0)
    basis = doc.get("basis", "standard")
    if basis not in BASES:
        raise FormatError(f"basis must be one of {list(BASES)}, got {basis!r}", f"{where}.basis")
    terms: dict = {}
    for k, t in enumerate(_list(_require(doc, "terms", where), f"{where}.terms")):
        tw = f"{where}.terms[{k}]"
        e = tuple(_int_list(_require(t, "exp", tw), f"{tw}.exp", 0))
        if len(e) != n:
            raise FormatError(f"exponent has length {len(e)}, expected {n}", f"{tw}.exp")
        c = _coef(_require(t, "coef", tw), field, f"{tw}.coef")
        terms[e] = terms.get(e, 0) + c
    return Polynomial(n, terms, basis, field)


def polymatrix_to_json(M: PolyMatrix) -> dict:
    m, k = M.shape
    return {
        "rows": m,
        "cols": k,
        "entries": [[polynomial_to_json(p) for p in row] for row in M.entries],
    }


def polymatrix_from_json(doc: Any, field: Field = QQ, where: str = "$") -> PolyMatrix:
    m = _int(_require(doc, "rows", where), f"{where}.rows", 0)
    k = _int(_require(doc, "cols", where), f"{where}.cols", 0)
    rows = _list(_require(doc, "entries", where), f"{where}.entries")
    if len(rows) != m:
        raise FormatError(f"{len(rows)} rows given, header says {m}", f"{where}.entries")
    entries = []
    nvars = basis = None
    for i, row in enumerate(rows):
        rw = f"{where}.entries[{i}]"
        row = _list(row, rw)
        if len(row) != k:
            raise FormatError(f"row has {len(row)} entries, header says {k}", rw)
        out = []
        for j, cell in enumerate(row):
            cw = f"{rw}[{j}]"
            p = polynomial_from_json(cell, field, cw)
            if nvars is None:
                nvars, basis = p.nvars, p.basis
            elif p.nvars != nvars:
                raise FormatError(f"entry has {p.nvars} variables, earlier entries have {nvars}", cw)
            elif p.basis != basis:
                p = p.to_basis(basis)
            out.append(p)
        entries.append(out)
    if nvars is None:
        nvars = _int(doc.get("vars", 0), f"{where}.vars", 0)
        basis = "standard"
    return PolyMatrix(entries, nvars, basis, field)


def const_matrix_to_json(A, field: Field) -> list:
    return [[format_coef(c, field) for c in row] for row in A]


def const_matrix_from_json(doc: Any, m: int, field: Field, where: str) -> list:
    rows = _list(doc, where)
    if len(rows) != m:
        raise FormatError(f"matrix has {len(rows)} rows, expected {m}", where)
    out = []
    for i, row in enumerate(rows):
        row = _list(row, f"{where}[{i}]")
        if len(row) != m:
            raise FormatError(f"row has {len(row)} entries, expected {m}", f"{where}[{i}]")
        out.append([_coef(c, field, f"{where}[{i}][{j}]") for j, c in enumerate(row)])
    return out


# ----- tensors and linear maps ------------------------------------------------

def tensor_to_json(T: Tensor) -> dict:
    return {
        "n": T.n,
        "d": T.d,
        "entries": [
            {"idx": [i + 1 for i in idx], "coef": format_coef(c, T.field)}
            for idx, c in sorted(T.entries.items())
        ],
    }


def tensor_from_json(doc: Any, field: Field = QQ, where: str = "$") -> Tensor:
    n = _int(_require(doc, "n", where), f"{where}.n", 1)
    d = _int(_require(doc, "d", where), f"{where}.d", 1)
    entries: dict = {}
    for k, t in enumerate(_list(_require(doc, "entries", where), f"{where}.entries")):
        tw = f"{where}.entries[{k}]"
        idx = _int_list(_require(t, "idx", tw), f"{tw}.idx", 1)
        if len(idx) != d or max(idx, default=1) > n:
            raise FormatError(f"index {idx} out of range for n={n}, d={d} (1-based)", f"{tw}.idx")
        key = tuple(i - 1 for i in idx)
        entries[key] = entries.get(key, 0) + _coef(_require(t, "coef", tw), field, f"{tw}.coef")
    return Tensor(n, d, entries, field)


def linear_map_to_json(L: LinearMap) -> dict:
    images = []
    for key in sorted(L.images):
        A = const_matrix_to_json(L.images[key], L.field)
        if L.family == WARING:
            images.append({"exp": list(key), "matrix": A})
        else:
            images.append({"idx": [i + 1 for i in key], "matrix": A})
    return {"family": L.family, "n": L.n, "d": L.d, "m": L.m, "images": images}


def linear_map_from_json(doc: Any, field: Field = QQ, where: str = "$") -> LinearMap:
    family = _require(doc, "family", where)
    if family not in FAMILIES:
        raise FormatError(f"family must be one of {list(FAMILIES)}, got {family!r}", f"{where}.family")
    n = _int(_require(doc, "n", where), f"{where}.n", 1)
    d = _int(_require(doc, "d", where), f"{where}.d", 1)
    m = _int(_require(doc, "m", where), f"{where}.m", 1)
    images: dict = {}
    for k, img in enumerate(_list(_require(doc, "images", where), f"{where}.images")):
        iw = f"{where}.images[{k}]"
        if family == WARING:
            key = tuple(_int_list(_require(img, "exp", iw), f"{iw}.exp", 0))
        else:
            key = tuple(i - 1 for i in _int_list(_require(img, "idx", iw), f"{iw}.idx", 1))
        if key in images:
            raise FormatError("basis element listed twice", iw)
        images[key] = const_matrix_from_json(_require(img, "matrix", iw), m, field, f"{iw}.matrix")
    try:
        return LinearMap(family, n, d, m, images, field)
    except RankMethodError as exc:
        raise FormatError(str(exc), f"{where}.images") from exc


def domain_element_from_json(doc: Any, family: str, field: Field = QQ, where: str = "$"):
    """A Polynomial for the waring family, a Tensor for the tensor family."""
    if family == TENSOR:
        return tensor_from_json(doc, field, where)
    return polynomial_from_json(doc, field, where)


def detect_family(doc: Any) -> str:
    """Polynomial documents have ``vars``; tensor documents have ``idx``-keyed entries."""
    if isinstance(doc, dict) and "vars" in doc:
        return WARING
    if isinstance(doc, dict) and "entries" in doc and "d" in doc:
        return TENSOR
    raise FormatError("input is neither a polynomial nor a tensor document")


# ----- decompositions and depth-3 images -------------------------------------

def _vector_to_json(v) -> list:
    return [polynomial_to_json(p) for p in v]


def decomposition_to_json(dec) -> dict:
    if isinstance(dec, HomDecomposition):
        return {
            "mode": "hom",
            "degree": dec.degree,
            "symbolic_rank": dec.symbolic_rank,
            "bound": dec.bound,
            "count": len(dec),
            "terms": [
                {"u": _vector_to_json(t.u), "v": _vector_to_json(t.v), "deg_u": t.deg_u, "deg_v": t.deg_v}
                for t in dec.terms
            ],
        }
    if isinstance(dec, SMDecomposition):
        return {
            "mode": "sm",
            "partition": [[i + 1 for i in b] for b in dec.partition.blocks],
            "symbolic_rank": dec.symbolic_rank,
            "bound": dec.bound,
            "count": len(dec),
            "terms": [
                {"u": _vector_to_json(t.u), "v": _vector_to_json(t.v), "S": sorted(j + 1 for j in t.S)}
                for t in dec.terms
            ],
        }
    if isinstance(dec, SymbolicDecomposition):
        return {
            "mode": "symbolic",
            "degree": dec.degree,
            "count": len(dec),
            "shift_point": [str(a) for a in dec.shift_point],
            "terms": [{"f": _vector_to_json(f), "g": _vector_to_json(g)} for f, g in dec.pairs],
        }
    raise TypeError(f"not a decomposition: {type(dec).__name__}")


def _vector_from_json(doc: Any, field: Field, where: str) -> tuple:
    return tuple(polynomial_from_json(p, field, f"{where}[{i}]") for i, p in enumerate(_list(doc, where)))


def decomposition_pairs_from_json(doc: Any, field: Field = QQ, where: str = "$") -> list[tuple]:
    """The ``(u, v)`` (or ``(f, g)``) pairs of any decomposition document."""
    pairs = []
    for k, t in enumerate(_list(_require(doc, "terms", where), f"{where}.terms")):
        tw = f"{where}.terms[{k}]"
        a, b = ("f", "g") if isinstance(t, dict) and "f" in t else ("u", "v")
        pairs.append((_vector_from_json(_require(t, a, tw), field, f"{tw}.{a}"),
                      _vector_from_json(_require(t, b, tw), field, f"{tw}.{b}")))
    return pairs


def psi_to_json(P: PsiImage) -> dict:
    return {
        "n": P.n,
        "D": P.D,
        "d": P.d,
        "coords": [{"exp": list(e), "poly": polynomial_to_json(P.coords[e])} for e in P.keys()],
    }


def psi_from_json(doc: Any, field: Field = QQ, where: str = "$") -> PsiImage:
    n = _int(_require(doc, "n", where), f"{where}.n", 1)
    D = _int(_require(doc, "D", where), f"{where}.D", 1)
    d = _int(_require(doc, "d", where), f"{where}.d", 1)
    coords = {}
    for k, c in enumerate(_list(_require(doc, "coords", where), f"{where}.coords")):
        cw = f"{where}.coords[{k}]"
        e = tuple(_int_list(_require(c, "exp", cw), f"{cw}.exp", 0))
        coords[e] = polynomial_from_json(_require(c, "poly", cw), field, f"{cw}.poly")
    return PsiImage(n, D, d, coords)


def parse_partition(text: str, nvars: int | None = None) -> list[list[int]]:
    """``"1,2;3,4"`` (1-based) into 0-based blocks."""
    blocks = []
    for k, chunk in enumerate(text.split(";")):
        try:
            block = [int(tok) - 1 for tok in chunk.split(",") if tok.strip()]
        except ValueError as exc:
            raise FormatError(f"bad variable list {chunk!r}", f"partition block {k + 1}") from exc
        if not block or min(block) < 0:
            raise FormatError("blocks hold positive variable numbers", f"partition block {k + 1}")
        blocks.append(block)
    if nvars is not None and sum(len(b) for b in blocks) != nvars:
        raise FormatError(f"partition covers {sum(len(b) for b in blocks)} variables, matrix has {nvars}", "partition")
    return blocks

