"""Line-oriented model DSL: parsing, canonical serialization, bounds files.

Format (``#`` starts a comment)::

    model <name>
    scale N = <int>
    partition <relaxed|strict>          # optional, defaults to relaxed
    param <name> = <real>
    species <name> : <fluid|discrete> [, init <int>] [, bounds [<int>, <int|inf>]]
    reaction <name> : 2 A + B -> A + 2 B @ mass_action <param|real>
    reaction <name> : A -> 0 @ expr <expression>

``0`` denotes an empty reaction side.  Model files use the ``.rxn`` extension.
Bounds-override files have one ``name lower upper`` line per species, with
``inf`` allowed for the upper bound.
"""
from __future__ import annotations

import re

from . import expr as _expr
from .model import (
    DISCRETE,
    FLUID,
    ExprRate,
    MassAction,
    Model,
    Reaction,
    Species,
    validate_model,
)


class ParseError(ValueError):
    """DSL syntax or consistency error with a 1-based line and column."""

    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


class _SpeciesDecl:
    def __init__(self, name, kind, init, lo, hi, line):
        self.name, self.kind, self.init, self.lo, self.hi, self.line = name, kind, init, lo, hi, line


def _parse_number(tok: str, lineno: int, col: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a number, found {tok!r}", lineno, col) from None


def _parse_side(text: str, lineno: int, col0: int, species: dict[str, int]) -> dict[int, int]:
    """Parse `2 A + B` (or `0`) into {species index: multiplicity}."""
    out: dict[int, int] = {}
    text = text.strip()
    if text == "0":
        return out
    if not text:
        raise ParseError("empty reaction side (use 0)", lineno, col0)
    for part in text.split("+"):
        part = part.strip()
        m = re.fullmatch(r"(?:([0-9]+)\s+)?([A-Za-z_][A-Za-z0-9_]*)", part)
        if m is None:
            raise ParseError(f"malformed reaction term {part!r}", lineno, col0)
        mult = int(m.group(1)) if m.group(1) else 1
        name = m.group(2)
        if name not in species:
            raise ParseError(f"unknown species {name!r} in reaction", lineno, col0)
        out[species[name]] = out.get(species[name], 0) + mult
    return out


def parse_model(text: str) -> Model:
    """Parse DSL text into a validated Model."""
    name = None
    scale = None
    partition = "relaxed"
    params: list[tuple[str, float]] = []
    species_order: list[_SpeciesDecl] = []
    species_idx: dict[str, int] = {}
    raw_reactions: list[tuple] = []  # (name, inside, outside, kindtok, payload, lineno, col)

    lines = text.split("\n")
    first_content = None
    for lineno, raw in enumerate(lines, start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if first_content is None:
            first_content = lineno
            if not line.startswith("model"):
                raise ParseError("missing model header", lineno)
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "model":
            if name is not None:
                raise ParseError("duplicate model header", lineno)
            if not _IDENT.fullmatch(rest):
                raise ParseError(f"invalid model name {rest!r}", lineno)
            name = rest
        elif key == "scale":
            m = re.fullmatch(r"N\s*=\s*([0-9]+)", rest)
            if m is None:
                raise ParseError("expected `scale N = <positive integer>`", lineno)
            scale = int(m.group(1))
        elif key == "partition":
            if rest not in ("relaxed", "strict"):
                raise ParseError(f"unknown partition mode {rest!r}", lineno)
            partition = rest
        elif key == "param":
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)", rest)
            if m is None:
                raise ParseError("expected `param <name> = <real>`", lineno)
            params.append((m.group(1), _parse_number(m.group(2), lineno, 1)))
        elif key == "species":
            m = re.fullmatch(
                r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(fluid|discrete)"
                r"(?:\s*,\s*init\s+([0-9]+))?"
                r"(?:\s*,\s*bounds\s*\[\s*([0-9]+)\s*,\s*([0-9]+|inf)\s*\])?",
                rest,
            )
            if m is None:
                raise ParseError(f"malformed species declaration {rest!r}", lineno)
            sname, kind, init, lo, hi = m.groups()
            if sname in species_idx:
                raise ParseError(f"duplicate species {sname!r}", lineno)
            species_idx[sname] = len(species_order)
            species_order.append(
                _SpeciesDecl(
                    sname,
                    FLUID if kind == "fluid" else DISCRETE,
                    int(init) if init else 0,
                    int(lo) if lo is not None else None,
                    (None if hi == "inf" else int(hi)) if hi is not None else None,
                    lineno,
                )
            )
        elif key == "reaction":
            m = re.fullmatch(
                r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*?)->(.*?)@\s*(mass_action|expr)\s+(.*)", rest
            )
            if m is None:
                raise ParseError(f"malformed reaction declaration {rest!r}", lineno)
            rname, inside, outside, kindtok, payload = m.groups()
            col = raw.find("@") + 1
            raw_reactions.append((rname, inside, outside, kindtok, payload.strip(), lineno, col))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)

    if name is None:
        raise ParseError("missing model header", len(lines))
    if scale is None:
        raise ParseError("missing `scale N = <int>` declaration", len(lines))
    if not species_order:
        raise ParseError("model declares no species", len(lines))

    param_map = dict(params)
    if len(param_map) != len(params):
        raise ParseError("duplicate parameter name", len(lines))

    n_s = len(species_order)
    reactions = []
    for rname, inside, outside, kindtok, payload, lineno, col in raw_reactions:
        ivec = [0] * n_s
        ovec = [0] * n_s
        for idx, mult in _parse_side(inside, lineno, 1, species_idx).items():
            ivec[idx] = mult
        for idx, mult in _parse_side(outside, lineno, 1, species_idx).items():
            ovec[idx] = mult
        if kindtok == "mass_action":
            if _IDENT.fullmatch(payload):
                if payload not in param_map:
                    raise ParseError(f"unknown parameter {payload!r}", lineno, col)
                rate: MassAction | ExprRate = MassAction(param_map[payload], payload)
            else:
                rate = MassAction(_parse_number(payload, lineno, col))
        else:
            known = set(species_idx) | set(param_map)
            try:
                tree = _expr.parse_expr(payload, known=known, line0=lineno, col0=col + 1)
            except _expr.ExprParseError as e:
                raise ParseError(str(e).rsplit(" (line", 1)[0], e.line, e.col) from None
            rate = ExprRate(tree)
        reactions.append(Reaction(rname, tuple(ivec), tuple(ovec), rate))

    m = Model(
        name=name,
        species=tuple(
            Species(d.name, d.kind, d.init, d.lo, d.hi) for d in species_order
        ),
        reactions=tuple(reactions),
        scale=scale,
        params=tuple(params),
        partition_mode=partition,
    )
    return validate_model(m)


def load_model(path: str) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def _side_text(vec: tuple[int, ...], names: tuple[str, ...]) -> str:
    parts = []
    for mult, nm in zip(vec, names):
        if mult == 1:
            parts.append(nm)
        elif mult > 1:
            parts.append(f"{mult} {nm}")
    return " + ".join(parts) if parts else "0"


def serialize_model(model: Model) -> str:
    """Canonical DSL text; declaration order preserved, byte-deterministic."""
    names = model.species_names
    out = [f"model {model.name}", f"scale N = {model.scale}", f"partition {model.partition_mode}"]
    for pname, val in model.params:
        out.append(f"param {pname} = {_fmt(val)}")
    for sp in model.species:
        hi = "inf" if sp.upper_bound is None else str(sp.upper_bound)
        lo = 0 if sp.lower_bound is None else sp.lower_bound
        out.append(f"species {sp.name} : {sp.kind}, init {sp.init_count}, bounds [{lo}, {hi}]")
    for r in model.reactions:
        lhs = _side_text(r.inputs, names)
        rhs = _side_text(r.outputs, names)
        if isinstance(r.rate, MassAction):
            payload = f"mass_action {r.rate.param or _fmt(r.rate.constant)}"
        else:
            payload = f"expr {_expr.serialize(r.rate.tree)}"
        out.append(f"reaction {r.name} : {lhs} -> {rhs} @ {payload}")
    return "\n".join(out) + "\n"


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


def parse_bounds_file(text: str) -> dict[str, tuple[int, int | None]]:
    """`name lower upper` per line; `inf` for an unbounded upper."""
    out: dict[str, tuple[int, int | None]] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError("expected `name lower upper`", lineno)
        name, lo_s, hi_s = parts
        if not _IDENT.fullmatch(name) or not _INT.fullmatch(lo_s):
            raise ParseError("expected `name lower upper`", lineno)
        if hi_s != "inf" and not _INT.fullmatch(hi_s):
            raise ParseError("upper bound must be an integer or `inf`", lineno)
        out[name] = (int(lo_s), None if hi_s == "inf" else int(hi_s))
    return out
